//! Two-player maps on the symmetric coordinate.
//!
//! With two players at `u` and `-u`, a forced win moves `u` to
//! `E₊(u) = u + K(1 - b(2u))` and a forced loss to `E₋(u) = u + K(-1 - b(2u))`.
//! Both are strictly increasing when `2KL < 1`, which is what makes the inverses
//! below well defined.

use crate::error::{Error, Result};
use crate::model::EloParams;

/// Bisection stops once the bracket is this narrow.
pub const INVERSE_TOL: f64 = 1e-12;
pub const INVERSE_MAX_ITER: usize = 200;

/// Which forced outcome a two-player map represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Win,
    Loss,
}

impl Outcome {
    pub fn score(self) -> f64 {
        match self {
            Outcome::Win => 1.0,
            Outcome::Loss => -1.0,
        }
    }

    /// `E₊` or `E₋`.
    #[inline]
    pub fn apply(self, u: f64, params: &EloParams) -> f64 {
        u + params.k_factor() * (self.score() - params.link().eval(2.0 * u))
    }

    /// The unique `v` with `apply(v) = u`.
    pub fn invert(self, u: f64, params: &EloParams) -> Result<f64> {
        params.require_invertible_maps()?;
        let reach = 2.0 * params.k_factor() + 1.0;
        let (mut lo, mut hi) = (u - reach, u + reach);
        debug_assert!(self.apply(lo, params) <= u && self.apply(hi, params) >= u);
        for _ in 0..INVERSE_MAX_ITER {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= INVERSE_TOL || mid == lo || mid == hi {
                return Ok(mid);
            }
            if self.apply(mid, params) < u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Err(Error::IterationCap {
            stage: "inverse map bisection",
            cap: INVERSE_MAX_ITER as u64,
        })
    }
}

pub fn e_plus(u: f64, params: &EloParams) -> f64 {
    Outcome::Win.apply(u, params)
}

pub fn e_minus(u: f64, params: &EloParams) -> f64 {
    Outcome::Loss.apply(u, params)
}

pub fn e_plus_inv(u: f64, params: &EloParams) -> Result<f64> {
    Outcome::Win.invert(u, params)
}

pub fn e_minus_inv(u: f64, params: &EloParams) -> Result<f64> {
    Outcome::Loss.invert(u, params)
}
