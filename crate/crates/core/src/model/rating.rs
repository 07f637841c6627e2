use std::ops::Index;

use crate::error::{Error, Result};

/// Absolute tolerance on the coordinate sum of a [`RatingVector`].
pub const ZERO_SUM_TOL: f64 = 1e-9;

/// Sums above this are re-centred when building a [`TrueSkillVector`].
pub const RECENTRE_TOL: f64 = 1e-12;

/// A point of the zero-sum subspace: the state of the rating chain.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingVector {
    entries: Vec<f64>,
}

impl RatingVector {
    /// Builds a rating vector, rejecting inputs that are not zero-sum.
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        check_len(entries.len())?;
        check_finite(&entries)?;
        let sum: f64 = entries.iter().sum();
        if sum.abs() > ZERO_SUM_TOL {
            return Err(Error::NotZeroSum { sum });
        }
        Ok(Self { entries })
    }

    /// Builds a rating vector after subtracting the mean of `entries`.
    pub fn centred(mut entries: Vec<f64>) -> Result<Self> {
        check_len(entries.len())?;
        check_finite(&entries)?;
        recentre(&mut entries);
        Ok(Self { entries })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        check_len(n)?;
        Ok(Self { entries: vec![0.0; n] })
    }

    /// Wraps entries that are zero-sum by construction (e.g. produced by the dynamics).
    pub(crate) fn from_raw(entries: Vec<f64>) -> Self {
        debug_assert!(entries.len() >= 2);
        Self { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.entries
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.entries
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().sum()
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn l1_norm(&self) -> f64 {
        self.entries.iter().map(|v| v.abs()).sum()
    }

    /// Euclidean distance to `other`.
    pub fn distance(&self, other: &RatingVector) -> f64 {
        euclidean_distance(&self.entries, &other.entries)
    }
}

impl Index<usize> for RatingVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.entries[i]
    }
}

/// Latent player strengths. Always zero-sum; non-centred input is re-centred and
/// the fact is remembered.
#[derive(Debug, Clone, PartialEq)]
pub struct TrueSkillVector {
    entries: Vec<f64>,
    recentred: bool,
}

impl TrueSkillVector {
    pub fn new(mut entries: Vec<f64>) -> Result<Self> {
        check_len(entries.len())?;
        check_finite(&entries)?;
        let sum: f64 = entries.iter().sum();
        let recentred = sum.abs() > RECENTRE_TOL;
        if recentred {
            recentre(&mut entries);
        }
        Ok(Self { entries, recentred })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![0.0; n])
    }

    /// Two players with skills `(rho1, -rho1)`.
    pub fn pair(rho1: f64) -> Result<Self> {
        Self::new(vec![rho1, -rho1])
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    /// Whether the input had to be shifted onto the zero-sum subspace.
    pub fn was_recentred(&self) -> bool {
        self.recentred
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn to_rating_vector(&self) -> RatingVector {
        RatingVector::from_raw(self.entries.clone())
    }
}

impl Index<usize> for TrueSkillVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.entries[i]
    }
}

pub(crate) fn euclidean_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub(crate) fn recentre(entries: &mut [f64]) {
    let mean = entries.iter().sum::<f64>() / entries.len() as f64;
    entries.iter_mut().for_each(|v| *v -= mean);
}

fn check_len(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 players, got {n}"
        )));
    }
    Ok(())
}

fn check_finite(entries: &[f64]) -> Result<()> {
    if entries.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("non-finite rating".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_zero_sum() {
        assert!(matches!(
            RatingVector::new(vec![1.0, 0.0]),
            Err(Error::NotZeroSum { .. })
        ));
        assert!(RatingVector::new(vec![1.0, -1.0]).is_ok());
    }

    #[test]
    fn rejects_single_player() {
        assert!(RatingVector::new(vec![0.0]).is_err());
        assert!(TrueSkillVector::new(vec![0.0]).is_err());
    }

    #[test]
    fn skills_are_recentred_and_flagged() {
        let s = TrueSkillVector::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert!(s.was_recentred());
        assert_eq!(s.as_slice(), &[-1.0, 0.0, 1.0]);

        let s = TrueSkillVector::pair(0.5).unwrap();
        assert!(!s.was_recentred());
        assert_eq!(s.max_abs(), 0.5);
    }

    #[test]
    fn centred_constructor() {
        let x = RatingVector::centred(vec![3.0, 1.0]).unwrap();
        assert_eq!(x.as_slice(), &[1.0, -1.0]);
        assert_eq!(x.sum(), 0.0);
        assert_eq!(x.distance(&RatingVector::zeros(2).unwrap()), 2f64.sqrt());
    }
}
