use crate::error::{Error, Result};

/// Sample mean, standard deviation and standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    pub mean: f64,
    pub sd: f64,
    pub stderr: f64,
    pub count: usize,
}

impl MeanEstimate {
    /// Two-pass estimate; the standard deviation uses the `n - 1` denominator.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let sd = var.sqrt();
        Ok(Self {
            mean,
            sd,
            stderr: sd / n.sqrt(),
            count: values.len(),
        })
    }

    pub fn collect(values: impl IntoIterator<Item = f64>) -> Result<Self> {
        let v: Vec<f64> = values.into_iter().collect();
        Self::from_values(&v)
    }
}

/// Ordinary least squares `y = slope·x + intercept`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            found: ys.len(),
        });
    }
    if xs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx <= f64::EPSILON * mx.abs().max(1.0) {
        return Err(Error::InvalidParameter(
            "regression needs at least two distinct abscissae".into(),
        ));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Linear-interpolated quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::EmptyInput);
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    Ok(sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo]))
}

pub fn interquartile_range(values: &[f64]) -> Result<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(quantile_sorted(&sorted, 0.75)? - quantile_sorted(&sorted, 0.25)?)
}

/// `n` logarithmically spaced points from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|k| match k {
                    0 => lo,
                    k if k == n - 1 => hi,
                    _ => (a + (b - a) * k as f64 / (n - 1) as f64).exp(),
                })
                .collect()
        }
    }
}

/// `n` linearly spaced points from `lo` to `hi` inclusive.
pub fn lin_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}
