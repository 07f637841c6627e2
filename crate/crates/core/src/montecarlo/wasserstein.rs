use rand::seq::IndexedRandom;
use rand::RngCore;

use crate::error::{Error, Result};

/// `W₁` between two empirical laws of equal size: mean absolute difference of
/// the sorted samples.
pub fn empirical_w1(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput);
    }
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(f64::total_cmp);
    sb.sort_by(f64::total_cmp);
    Ok(sa.iter().zip(&sb).map(|(x, y)| (x - y).abs()).sum::<f64>() / a.len() as f64)
}

/// As [`empirical_w1`], first subsampling the larger set without replacement
/// down to the size of the smaller one.
pub fn empirical_w1_resampled<R: RngCore>(a: &[f64], b: &[f64], rng: &mut R) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput);
    }
    let m = a.len().min(b.len());
    let shrink = |v: &[f64], rng: &mut R| -> Vec<f64> {
        if v.len() == m {
            v.to_vec()
        } else {
            v.choose_multiple(rng, m).copied().collect()
        }
    };
    let sa = shrink(a, rng);
    let sb = shrink(b, rng);
    empirical_w1(&sa, &sb)
}
