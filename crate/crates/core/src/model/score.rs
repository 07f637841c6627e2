use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::link::LinkFunction;
use super::rating::TrueSkillVector;
use crate::error::{Error, Result};

/// Draws per distinct mean when a continuous law is registered.
pub const CUSTOM_VALIDATION_DRAWS: usize = 100_000;

const CUSTOM_VALIDATION_SEED: u64 = 0x5C0_4E5;

/// A user-supplied score law on `[-1, 1]`.
///
/// `sample` must return draws whose expectation is `mean`. The law for the reversed
/// pair is obtained by negation, so implementations only see the orientation
/// `i < j`.
pub trait ScoreLaw: Send + Sync {
    fn name(&self) -> &str;

    fn sample(&self, mean: f64, rng: &mut dyn RngCore) -> f64;

    /// Exact variance of the law with the given mean, if known.
    fn variance(&self, _mean: f64) -> Option<f64> {
        None
    }
}

#[derive(Clone)]
pub enum ScoreKind {
    /// Scores in `{-1, +1}`.
    Binary,
    /// Scores in `{-1, 0, +1}` with a fixed tie probability.
    ThreePoint { p_tie: f64 },
    Continuous(Arc<dyn ScoreLaw>),
}

impl fmt::Debug for ScoreKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScoreKind::Binary => write!(f, "Binary"),
            ScoreKind::ThreePoint { p_tie } => write!(f, "ThreePoint(p_tie={p_tie})"),
            ScoreKind::Continuous(law) => write!(f, "Continuous({})", law.name()),
        }
    }
}

impl ScoreKind {
    pub fn describe(&self) -> String {
        match self {
            ScoreKind::Binary => "binary".into(),
            ScoreKind::ThreePoint { p_tie } => format!("three_point(p_tie={p_tie})"),
            ScoreKind::Continuous(law) => format!("continuous({})", law.name()),
        }
    }

    pub fn is_finite_support(&self) -> bool {
        !matches!(self, ScoreKind::Continuous(_))
    }
}

/// Per-pair score distributions with mean `b(ρ^i - ρ^j)`.
#[derive(Clone)]
pub struct ScoreModel {
    kind: ScoreKind,
    n: usize,
    /// `b(ρ^i - ρ^j)`, row-major.
    means: Vec<f64>,
}

impl fmt::Debug for ScoreModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScoreModel")
            .field("kind", &self.kind)
            .field("n", &self.n)
            .finish()
    }
}

impl ScoreModel {
    pub fn new(kind: ScoreKind, link: &LinkFunction, skills: &TrueSkillVector) -> Result<Self> {
        let n = skills.len();
        let mut means = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    means[i * n + j] = link.eval(skills[i] - skills[j]);
                }
            }
        }
        let model = Self { kind, n, means };
        match &model.kind {
            ScoreKind::Binary => {}
            ScoreKind::ThreePoint { p_tie } => {
                let p_tie = *p_tie;
                if !(0.0..1.0).contains(&p_tie) {
                    return Err(Error::InvalidParameter(format!(
                        "p_tie must lie in [0, 1), got {p_tie}"
                    )));
                }
                for (i, j) in model.pairs() {
                    let mean = model.mean(i, j);
                    if mean.abs() > 1.0 - p_tie {
                        return Err(Error::InfeasibleScoreModel {
                            i,
                            j,
                            reason: format!(
                                "|b(δ)| = {} exceeds 1 - p_tie = {}",
                                mean.abs(),
                                1.0 - p_tie
                            ),
                        });
                    }
                }
            }
            ScoreKind::Continuous(law) => model.validate_law(law.as_ref())?,
        }
        Ok(model)
    }

    /// Empirical check of a continuous law: range and a 5σ gate on the mean.
    fn validate_law(&self, law: &dyn ScoreLaw) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(CUSTOM_VALIDATION_SEED);
        let mut seen: Vec<u64> = Vec::new();
        for (i, j) in self.pairs().filter(|(i, j)| i < j) {
            let mean = self.mean(i, j);
            if seen.contains(&mean.to_bits()) {
                continue;
            }
            seen.push(mean.to_bits());
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in 0..CUSTOM_VALIDATION_DRAWS {
                let s = law.sample(mean, &mut rng);
                if !(-1.0..=1.0).contains(&s) {
                    return Err(Error::InfeasibleScoreModel {
                        i,
                        j,
                        reason: format!("draw {s} outside [-1, 1]"),
                    });
                }
                sum += s;
                sum_sq += s * s;
            }
            let m = CUSTOM_VALIDATION_DRAWS as f64;
            let emp_mean = sum / m;
            let emp_var = (sum_sq / m - emp_mean * emp_mean).max(0.0);
            let gate = 5.0 * (emp_var / m).sqrt();
            if (emp_mean - mean).abs() > gate {
                return Err(Error::InfeasibleScoreModel {
                    i,
                    j,
                    reason: format!(
                        "empirical mean {emp_mean} differs from declared {mean} by more than {gate}"
                    ),
                });
            }
        }
        Ok(())
    }

    fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        (0..n).flat_map(move |i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
    }

    pub fn kind(&self) -> &ScoreKind {
        &self.kind
    }

    pub fn n_players(&self) -> usize {
        self.n
    }

    /// `E[S^{ij}] = b(ρ^i - ρ^j)`.
    #[inline]
    pub fn mean(&self, i: usize, j: usize) -> f64 {
        self.means[i * self.n + j]
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        for index in [i, j] {
            if index >= self.n {
                return Err(Error::IndexOutOfRange { index, n: self.n });
            }
        }
        if i == j {
            return Err(Error::InvalidParameter(format!("pair ({i}, {j}) is not distinct")));
        }
        Ok(())
    }

    /// Draws `S^{ij}`. Indices are assumed valid and distinct.
    #[inline]
    pub fn sample_unchecked<R: RngCore>(&self, i: usize, j: usize, rng: &mut R) -> f64 {
        let mean = self.mean(i, j);
        match &self.kind {
            ScoreKind::Binary => {
                if rng.random::<f64>() < 0.5 * (1.0 + mean) {
                    1.0
                } else {
                    -1.0
                }
            }
            ScoreKind::ThreePoint { p_tie } => {
                let u = rng.random::<f64>();
                let p_plus = 0.5 * ((1.0 - p_tie) + mean);
                if u < p_plus {
                    1.0
                } else if u < p_plus + p_tie {
                    0.0
                } else {
                    -1.0
                }
            }
            ScoreKind::Continuous(law) => {
                if i < j {
                    law.sample(mean, rng)
                } else {
                    -law.sample(-mean, rng)
                }
            }
        }
    }

    /// Exact variance of `σ^{ij}`.
    pub fn variance(&self, i: usize, j: usize) -> Result<f64> {
        self.check_pair(i, j)?;
        let mean = self.mean(i, j);
        match &self.kind {
            ScoreKind::Binary => Ok(1.0 - mean * mean),
            ScoreKind::ThreePoint { p_tie } => Ok((1.0 - p_tie) - mean * mean),
            ScoreKind::Continuous(law) => {
                let oriented = if i < j { mean } else { -mean };
                law.variance(oriented).ok_or_else(|| {
                    Error::Unsupported(format!("score law {} has no closed-form variance", law.name()))
                })
            }
        }
    }

    /// Atoms `(score, probability)` in the order `+1, 0, -1` for finite-support kinds.
    pub fn atoms(&self, i: usize, j: usize) -> Option<[(f64, f64); 3]> {
        let mean = self.mean(i, j);
        match &self.kind {
            ScoreKind::Binary => Some([
                (1.0, 0.5 * (1.0 + mean)),
                (0.0, 0.0),
                (-1.0, 0.5 * (1.0 - mean)),
            ]),
            ScoreKind::ThreePoint { p_tie } => Some([
                (1.0, 0.5 * ((1.0 - p_tie) + mean)),
                (0.0, *p_tie),
                (-1.0, 0.5 * ((1.0 - p_tie) - mean)),
            ]),
            ScoreKind::Continuous(_) => None,
        }
    }

    /// Probability of the extreme score `s ∈ {-1, +1}` for finite-support kinds.
    pub fn extreme_probability(&self, i: usize, j: usize, s: f64) -> Option<f64> {
        self.atoms(i, j)?
            .iter()
            .find(|(v, _)| *v == s)
            .map(|&(_, p)| p)
    }
}

/// Draws one score for the ordered pair `(i, j)`.
pub fn score_sample<R: RngCore>(model: &ScoreModel, i: usize, j: usize, rng: &mut R) -> Result<f64> {
    model.check_pair(i, j)?;
    Ok(model.sample_unchecked(i, j, rng))
}

/// Exact variance of the score for the ordered pair `(i, j)`.
pub fn score_variance(model: &ScoreModel, i: usize, j: usize) -> Result<f64> {
    model.variance(i, j)
}
