use super::link::LinkFunction;
use super::rating::TrueSkillVector;
use super::score::{ScoreKind, ScoreModel};
use crate::error::{Error, Result};

/// Everything that defines one rating chain.
#[derive(Debug, Clone)]
pub struct EloParams {
    k_factor: f64,
    link: LinkFunction,
    scores: ScoreModel,
    skills: TrueSkillVector,
}

impl EloParams {
    /// Validates `K > 0` and `K L < 1` and builds the per-pair score model.
    pub fn new(
        k_factor: f64,
        link: LinkFunction,
        score_kind: ScoreKind,
        skills: TrueSkillVector,
    ) -> Result<Self> {
        if !(k_factor.is_finite() && k_factor > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "K must be positive, got {k_factor}"
            )));
        }
        let kl = k_factor * link.lipschitz();
        if kl >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "K·L = {kl} must be below 1 (K = {k_factor}, L = {})",
                link.lipschitz()
            )));
        }
        let scores = ScoreModel::new(score_kind, &link, &skills)?;
        Ok(Self {
            k_factor,
            link,
            scores,
            skills,
        })
    }

    /// Logistic link with binary scores.
    pub fn logistic_binary(k_factor: f64, c: f64, skills: &[f64]) -> Result<Self> {
        Self::new(
            k_factor,
            LinkFunction::logistic(c)?,
            ScoreKind::Binary,
            TrueSkillVector::new(skills.to_vec())?,
        )
    }

    /// Same link, scores and skills with a different K-factor.
    pub fn with_k(&self, k_factor: f64) -> Result<Self> {
        Self::new(
            k_factor,
            self.link.clone(),
            self.scores.kind().clone(),
            self.skills.clone(),
        )
    }

    /// Same link, score kind and K-factor with different skills.
    pub fn with_skills(&self, skills: TrueSkillVector) -> Result<Self> {
        Self::new(self.k_factor, self.link.clone(), self.scores.kind().clone(), skills)
    }

    pub fn n_players(&self) -> usize {
        self.skills.len()
    }

    pub fn k_factor(&self) -> f64 {
        self.k_factor
    }

    pub fn link(&self) -> &LinkFunction {
        &self.link
    }

    pub fn scores(&self) -> &ScoreModel {
        &self.scores
    }

    pub fn skills(&self) -> &TrueSkillVector {
        &self.skills
    }

    /// `K L`, below 1 for every valid parameter set.
    pub fn kl(&self) -> f64 {
        self.k_factor * self.link.lipschitz()
    }

    /// Number of ordered pairs of distinct players, `N (N - 1)`.
    pub fn ordered_pairs(&self) -> usize {
        let n = self.n_players();
        n * (n - 1)
    }

    /// The reachability construction needs the two-player maps to be invertible.
    pub fn require_invertible_maps(&self) -> Result<()> {
        let two_kl = 2.0 * self.kl();
        if two_kl >= 1.0 {
            return Err(Error::Precondition(format!(
                "path construction requires 2·K·L < 1, got 2·K·L = {two_kl}"
            )));
        }
        Ok(())
    }

    /// One-line parameter echo without commas, for CSV headers and reports.
    pub fn describe(&self) -> String {
        let skills: Vec<String> = self.skills.as_slice().iter().map(|v| v.to_string()).collect();
        format!(
            "n={} k={} link={} score={} skills=[{}]",
            self.n_players(),
            self.k_factor,
            self.link.describe(),
            self.scores.kind().describe(),
            skills.join(" ")
        )
    }
}
