use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::model::{EloParams, RatingVector};

/// One realised match: players `i` and `j` (0-based) and the score of `i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchEvent {
    pub i: usize,
    pub j: usize,
    pub s: f64,
}

impl MatchEvent {
    pub fn new(i: usize, j: usize, s: f64) -> Result<Self> {
        if i == j {
            return Err(Error::InvalidParameter(format!("match ({i}, {j}) needs distinct players")));
        }
        if !(-1.0..=1.0).contains(&s) {
            return Err(Error::InvalidParameter(format!("score {s} outside [-1, 1]")));
        }
        Ok(Self { i, j, s })
    }

    fn check(&self, n: usize) -> Result<()> {
        for index in [self.i, self.j] {
            if index >= n {
                return Err(Error::IndexOutOfRange { index, n });
            }
        }
        if self.i == self.j {
            return Err(Error::InvalidParameter("match needs distinct players".into()));
        }
        Ok(())
    }
}

/// Rating points moved from `j` to `i` by the event at state `x`.
#[inline]
pub(crate) fn transfer(x: &[f64], ev: &MatchEvent, params: &EloParams) -> f64 {
    params.k_factor() * (ev.s - params.link().eval(x[ev.i] - x[ev.j]))
}

/// Applies an event in place. The transfer is computed once and applied with
/// opposite signs, so the coordinate sum only sees rounding from the two additions.
#[inline]
pub(crate) fn apply_event(x: &mut [f64], ev: &MatchEvent, params: &EloParams) {
    let delta = transfer(x, ev, params);
    x[ev.i] += delta;
    x[ev.j] -= delta;
}

/// Deterministic single update `x + K {s - b(x^i - x^j)} (e_i - e_j)`.
pub fn elo_step(x: &RatingVector, ev: &MatchEvent, params: &EloParams) -> Result<RatingVector> {
    if x.len() != params.n_players() {
        return Err(Error::DimensionMismatch {
            expected: params.n_players(),
            found: x.len(),
        });
    }
    ev.check(x.len())?;
    let mut next = x.clone();
    apply_event(next.as_mut_slice(), ev, params);
    Ok(next)
}

/// Draws an ordered pair of distinct players uniformly.
#[inline]
pub(crate) fn sample_pair<R: RngCore>(n: usize, rng: &mut R) -> (usize, usize) {
    let k = rng.random_range(0..n * (n - 1));
    let i = k / (n - 1);
    let r = k % (n - 1);
    (i, if r >= i { r + 1 } else { r })
}

/// Draws a pair and its score.
#[inline]
pub(crate) fn sample_event<R: RngCore>(params: &EloParams, rng: &mut R) -> MatchEvent {
    let (i, j) = sample_pair(params.n_players(), rng);
    let s = params.scores().sample_unchecked(i, j, rng);
    MatchEvent { i, j, s }
}

/// Advances a raw state by one random match and returns the event.
#[inline]
pub(crate) fn step_in_place<R: RngCore>(x: &mut [f64], params: &EloParams, rng: &mut R) -> MatchEvent {
    let ev = sample_event(params, rng);
    apply_event(x, &ev, params);
    ev
}

/// One step of the rating chain.
pub fn chain_step<R: RngCore>(
    x: &RatingVector,
    params: &EloParams,
    rng: &mut R,
) -> Result<(RatingVector, MatchEvent)> {
    if x.len() != params.n_players() {
        return Err(Error::DimensionMismatch {
            expected: params.n_players(),
            found: x.len(),
        });
    }
    let mut next = x.clone();
    let ev = step_in_place(next.as_mut_slice(), params, rng);
    Ok((next, ev))
}

/// Runs `steps` chain steps in place on a rating vector.
pub fn run_chain<R: RngCore>(x: &mut RatingVector, params: &EloParams, steps: u64, rng: &mut R) -> Result<()> {
    if x.len() != params.n_players() {
        return Err(Error::DimensionMismatch {
            expected: params.n_players(),
            found: x.len(),
        });
    }
    let slice = x.as_mut_slice();
    for _ in 0..steps {
        step_in_place(slice, params, rng);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(n: usize) -> EloParams {
        EloParams::logistic_binary(0.4, 0.5, &vec![0.0; n]).unwrap()
    }

    #[test]
    fn step_from_origin() {
        let x = RatingVector::zeros(2).unwrap();
        let y = elo_step(&x, &MatchEvent::new(0, 1, 1.0).unwrap(), &params(2)).unwrap();
        assert_eq!(y.as_slice(), &[0.4, -0.4]);
    }

    #[test]
    fn step_with_prediction() {
        let x = RatingVector::new(vec![1.0, -1.0]).unwrap();
        let y = elo_step(&x, &MatchEvent::new(0, 1, 1.0).unwrap(), &params(2)).unwrap();
        let delta = 0.4 * (1.0 - 1f64.tanh());
        assert_abs_diff_eq!(y[0], 1.0 + delta, epsilon = 1e-15);
        assert_abs_diff_eq!(y[0], 1.095362, epsilon = 1e-6);
        assert_abs_diff_eq!(y[1], -1.095362, epsilon = 1e-6);
    }

    #[test]
    fn predicted_score_is_a_fixed_point() {
        let p = params(3);
        let x = RatingVector::new(vec![0.7, -0.2, -0.5]).unwrap();
        let s = p.link().eval(x[0] - x[2]);
        let y = elo_step(&x, &MatchEvent::new(0, 2, s).unwrap(), &p).unwrap();
        assert_eq!(y, x);
    }

    #[test]
    fn untouched_coordinates_are_bit_identical() {
        let p = params(4);
        let x = RatingVector::centred(vec![0.31, -1.7, 2.2, 0.05]).unwrap();
        let y = elo_step(&x, &MatchEvent::new(3, 1, -1.0).unwrap(), &p).unwrap();
        assert_eq!(x[0].to_bits(), y[0].to_bits());
        assert_eq!(x[2].to_bits(), y[2].to_bits());
        assert_eq!(y[3] - x[3], -(y[1] - x[1]));
    }

    #[test]
    fn invalid_events() {
        let p = params(2);
        let x = RatingVector::zeros(2).unwrap();
        assert!(MatchEvent::new(0, 0, 1.0).is_err());
        assert!(MatchEvent::new(0, 1, 1.5).is_err());
        let ev = MatchEvent { i: 0, j: 2, s: 1.0 };
        assert!(matches!(elo_step(&x, &ev, &p), Err(Error::IndexOutOfRange { index: 2, n: 2 })));
        let x3 = RatingVector::zeros(3).unwrap();
        assert!(elo_step(&x3, &MatchEvent::new(0, 1, 1.0).unwrap(), &p).is_err());
    }

    #[test]
    fn two_players_always_meet() {
        let p = params(2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut forward = 0usize;
        let trials = 100_000;
        for _ in 0..trials {
            let (i, j) = sample_pair(2, &mut rng);
            assert!(i != j && i < 2 && j < 2);
            forward += usize::from(i == 0);
        }
        let sd = (trials as f64 * 0.25).sqrt();
        assert!((forward as f64 - trials as f64 / 2.0).abs() < 4.0 * sd);
        let (_, ev) = chain_step(&RatingVector::zeros(2).unwrap(), &p, &mut rng).unwrap();
        assert!(ev.i != ev.j);
    }

    #[test]
    fn pair_frequencies_uniform() {
        // Multinomial oracle: each of the 12 ordered pairs has probability 1/12.
        let n = 4;
        let steps = 1_000_000;
        let mut counts = vec![0u64; n * n];
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..steps {
            let (i, j) = sample_pair(n, &mut rng);
            counts[i * n + j] += 1;
        }
        let p = 1.0 / 12.0;
        let expected = steps as f64 * p;
        let sd = (steps as f64 * p * (1.0 - p)).sqrt();
        for i in 0..n {
            assert_eq!(counts[i * n + i], 0);
            for j in (0..n).filter(|&j| j != i) {
                assert!((counts[i * n + j] as f64 - expected).abs() < 4.0 * sd);
            }
        }
    }

    #[test]
    fn zero_sum_over_a_million_steps() {
        let p = EloParams::logistic_binary(0.4, 0.5, &[0.9, 0.1, -0.3, -0.7]).unwrap();
        let mut x = RatingVector::centred(vec![1.0, -2.0, 0.5, 0.5]).unwrap();
        let start = x.sum();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        run_chain(&mut x, &p, 1_000_000, &mut rng).unwrap();
        assert!((x.sum() - start).abs() <= 1e-9);
    }
}
