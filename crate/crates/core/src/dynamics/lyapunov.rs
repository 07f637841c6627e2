use rand::RngCore;

use super::step::{sample_event, transfer};
use crate::error::{Error, Result};
use crate::model::{EloParams, RatingVector, TrueSkillVector};

/// Default exponential scale for the Lyapunov functional.
pub const DEFAULT_SCALE: f64 = 0.05;

/// Above this value of `a·max|x^i - ρ^i|` the functional is evaluated in log space.
const LOG_SPACE_THRESHOLD: f64 = 700.0;

/// `V(x) = Σ_i cosh(a (x^i - ρ^i))`.
#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovSpec {
    a: f64,
    skills: TrueSkillVector,
}

impl LyapunovSpec {
    pub fn new(a: f64, skills: TrueSkillVector) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidParameter(format!("Lyapunov scale must be positive, got {a}")));
        }
        Ok(Self { a, skills })
    }

    pub fn scale(&self) -> f64 {
        self.a
    }

    pub fn skills(&self) -> &TrueSkillVector {
        &self.skills
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.skills.len() {
            return Err(Error::DimensionMismatch {
                expected: self.skills.len(),
                found: x.len(),
            });
        }
        Ok(())
    }

    /// `ln V(x)`, stable for arbitrarily large arguments.
    pub fn log_value(&self, x: &RatingVector) -> Result<f64> {
        self.check(x.as_slice())?;
        let args: Vec<f64> = x
            .as_slice()
            .iter()
            .zip(self.skills.as_slice())
            .map(|(xi, ri)| (self.a * (xi - ri)).abs())
            .collect();
        let peak = args.iter().cloned().fold(0.0, f64::max);
        // cosh(z) = e^{z} (1 + e^{-2z}) / 2
        let sum: f64 = args
            .iter()
            .map(|z| (z - peak).exp() * 0.5 * (1.0 + (-2.0 * z).exp()))
            .sum();
        Ok(peak + sum.ln())
    }

    pub fn value(&self, x: &RatingVector) -> Result<f64> {
        self.check(x.as_slice())?;
        let peak = x
            .as_slice()
            .iter()
            .zip(self.skills.as_slice())
            .fold(0.0f64, |m, (xi, ri)| m.max((self.a * (xi - ri)).abs()));
        if peak > LOG_SPACE_THRESHOLD {
            return Ok(self.log_value(x)?.exp());
        }
        Ok(self.value_raw(x.as_slice()))
    }

    fn value_raw(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(self.skills.as_slice())
            .map(|(xi, ri)| (self.a * (xi - ri)).cosh())
            .sum()
    }

    /// `V(x + h(e_i - e_j)) - V(x)` via `cosh(A+H) - cosh(A) = 2 sinh(A + H/2) sinh(H/2)`.
    fn increment(&self, x: &[f64], i: usize, j: usize, h: f64) -> f64 {
        let rho = self.skills.as_slice();
        let a = self.a;
        let half = 0.5 * a * h;
        let ui = a * (x[i] - rho[i]);
        let uj = a * (x[j] - rho[j]);
        2.0 * (ui + half).sinh() * half.sinh() - 2.0 * (uj - half).sinh() * half.sinh()
    }
}

/// `V(x)`.
pub fn lyapunov_value(x: &RatingVector, spec: &LyapunovSpec) -> Result<f64> {
    spec.value(x)
}

/// Exact one-step drift `E[V(X₁) | X₀ = x] - V(x)` by enumerating every ordered
/// pair and every score atom.
pub fn exact_drift(x: &RatingVector, spec: &LyapunovSpec, params: &EloParams) -> Result<f64> {
    let n = params.n_players();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x.len(),
        });
    }
    spec.check(x.as_slice())?;
    let xs = x.as_slice();
    let k = params.k_factor();
    let mut total = 0.0;
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            let atoms = params.scores().atoms(i, j).ok_or_else(|| {
                Error::Unsupported("exact drift needs a finite-support score model".into())
            })?;
            let predicted = params.link().eval(xs[i] - xs[j]);
            for (s, p) in atoms {
                if p > 0.0 {
                    total += p * spec.increment(xs, i, j, k * (s - predicted));
                }
            }
        }
    }
    Ok(total / params.ordered_pairs() as f64)
}

/// Monte Carlo estimate of the one-step drift: `(mean, standard error)` over
/// `samples` independent single steps from `x`.
pub fn sampled_drift<R: RngCore>(
    x: &RatingVector,
    spec: &LyapunovSpec,
    params: &EloParams,
    samples: usize,
    rng: &mut R,
) -> Result<(f64, f64)> {
    if samples < 2 {
        return Err(Error::InvalidParameter("need at least two samples".into()));
    }
    spec.check(x.as_slice())?;
    if x.len() != params.n_players() {
        return Err(Error::DimensionMismatch {
            expected: params.n_players(),
            found: x.len(),
        });
    }
    let xs = x.as_slice();
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let ev = sample_event(params, rng);
        let d = spec.increment(xs, ev.i, ev.j, transfer(xs, &ev, params));
        sum += d;
        sum_sq += d * d;
    }
    let m = samples as f64;
    let mean = sum / m;
    let var = (sum_sq / m - mean * mean).max(0.0) * m / (m - 1.0);
    Ok((mean, (var / m).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn spec(a: f64, n: usize) -> LyapunovSpec {
        LyapunovSpec::new(a, TrueSkillVector::zeros(n).unwrap()).unwrap()
    }

    #[test]
    fn value_at_skills_is_n() {
        let skills = TrueSkillVector::new(vec![0.3, -0.1, -0.2]).unwrap();
        let s = LyapunovSpec::new(0.05, skills.clone()).unwrap();
        assert_eq!(s.value(&skills.to_rating_vector()).unwrap(), 3.0);
    }

    #[test]
    fn value_two_players() {
        let x = RatingVector::new(vec![1.0, -1.0]).unwrap();
        let v = lyapunov_value(&x, &spec(0.1, 2)).unwrap();
        assert_abs_diff_eq!(v, 2.0 * 0.1f64.cosh(), epsilon = 1e-15);
        assert_abs_diff_eq!(v, 2.010008, epsilon = 1e-6);
    }

    #[test]
    fn log_space_agrees_and_survives_overflow() {
        let s = spec(0.05, 3);
        let x = RatingVector::new(vec![40.0, -10.0, -30.0]).unwrap();
        assert_abs_diff_eq!(s.log_value(&x).unwrap(), s.value(&x).unwrap().ln(), epsilon = 1e-12);
        let s = spec(0.05, 2);
        let huge = RatingVector::new(vec![20_000.0, -20_000.0]).unwrap();
        let log_v = s.log_value(&huge).unwrap();
        assert_abs_diff_eq!(log_v, 1000.0, epsilon = 1e-9);
        assert!(s.value(&huge).unwrap().is_infinite());
        assert!(RatingVector::new(vec![0.0, 0.0]).map(|x| s.value(&x).unwrap() >= 2.0).unwrap());
    }

    #[test]
    fn drift_at_origin_closed_form() {
        let p = EloParams::logistic_binary(0.4, 0.5, &[0.0, 0.0]).unwrap();
        for a in [0.05, 0.3, 1.0] {
            let d = exact_drift(&RatingVector::zeros(2).unwrap(), &spec(a, 2), &p).unwrap();
            assert_abs_diff_eq!(d, 2.0 * ((0.4 * a).cosh() - 1.0), epsilon = 1e-15);
        }
    }

    #[test]
    fn drift_negative_far_out_and_symmetric() {
        let p = EloParams::logistic_binary(0.4, 0.5, &[0.0, 0.0]).unwrap();
        let s = spec(0.05, 2);
        let x = RatingVector::new(vec![50.0, -50.0]).unwrap();
        let minus = RatingVector::new(vec![-50.0, 50.0]).unwrap();
        let d = exact_drift(&x, &s, &p).unwrap();
        assert!(d < 0.0);
        assert_abs_diff_eq!(d, exact_drift(&minus, &s, &p).unwrap(), epsilon = 1e-12 * d.abs());
    }

    #[test]
    fn drift_rejects_continuous_scores() {
        use crate::model::{LinkFunction, ScoreKind, ScoreLaw};
        use std::sync::Arc;

        struct Uniformish;
        impl ScoreLaw for Uniformish {
            fn name(&self) -> &str {
                "uniformish"
            }
            fn sample(&self, mean: f64, rng: &mut dyn RngCore) -> f64 {
                use rand::Rng;
                // Mixture of ±1 and a uniform draw, mean preserved.
                let u: f64 = rng.random::<f64>() * 2.0 - 1.0;
                if rng.random::<bool>() {
                    u
                } else if rng.random::<f64>() < 0.5 * (1.0 + 2.0 * mean) {
                    1.0
                } else {
                    -1.0
                }
            }
        }
        let p = EloParams::new(
            0.4,
            LinkFunction::logistic(0.5).unwrap(),
            ScoreKind::Continuous(Arc::new(Uniformish)),
            TrueSkillVector::zeros(2).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            exact_drift(&RatingVector::zeros(2).unwrap(), &spec(0.05, 2), &p),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn enumeration_matches_sampling() {
        let p = EloParams::new(
            0.4,
            crate::model::LinkFunction::logistic(0.5).unwrap(),
            crate::model::ScoreKind::ThreePoint { p_tie: 0.2 },
            TrueSkillVector::new(vec![0.4, 0.0, -0.4]).unwrap(),
        )
        .unwrap();
        let s = LyapunovSpec::new(0.3, p.skills().clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for x in [vec![0.0, 0.0, 0.0], vec![3.0, -1.0, -2.0], vec![-6.0, 5.0, 1.0]] {
            let x = RatingVector::new(x).unwrap();
            let exact = exact_drift(&x, &s, &p).unwrap();
            let (mean, se) = sampled_drift(&x, &s, &p, 100_000, &mut rng).unwrap();
            assert!((exact - mean).abs() <= 5.0 * se, "{exact} vs {mean} ± {se}");
        }
    }
}
