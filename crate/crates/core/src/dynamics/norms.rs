//! Pairwise expressions of the Euclidean and ℓ¹ norms on the zero-sum subspace.

use crate::model::RatingVector;

/// `(1/2N) Σ_{i,j} (x^i - x^j)²`, equal to `‖x‖²` for zero-sum `x`.
pub fn pairwise_square_norm(x: &RatingVector) -> f64 {
    let xs = x.as_slice();
    let n = xs.len() as f64;
    let sum: f64 = xs
        .iter()
        .map(|a| xs.iter().map(|b| (a - b) * (a - b)).sum::<f64>())
        .sum();
    sum / (2.0 * n)
}

/// `(1/N) Σ_{i,j} |x^i - x^j|`, an upper bound on `|x|₁` for zero-sum `x`.
pub fn pairwise_l1_bound(x: &RatingVector) -> f64 {
    let xs = x.as_slice();
    let n = xs.len() as f64;
    let sum: f64 = xs
        .iter()
        .map(|a| xs.iter().map(|b| (a - b).abs()).sum::<f64>())
        .sum();
    sum / n
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_players() {
        let x = RatingVector::new(vec![1.5, -1.5]).unwrap();
        assert_eq!(pairwise_square_norm(&x), 4.5);
        assert_eq!(pairwise_l1_bound(&x), 3.0);
        assert_eq!(x.l1_norm(), 3.0);
    }

    proptest! {
        #[test]
        fn identities_hold(raw in proptest::collection::vec(-100.0f64..100.0, 2..12)) {
            let x = RatingVector::centred(raw).unwrap();
            let sq = x.norm().powi(2);
            prop_assert!((pairwise_square_norm(&x) - sq).abs() <= 1e-9 * sq.max(1e-300));
            prop_assert!(x.l1_norm() <= pairwise_l1_bound(&x) + 1e-12 * x.l1_norm().max(1.0));
        }
    }
}
