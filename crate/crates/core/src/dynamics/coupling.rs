use rand::RngCore;

use super::step::{apply_event, sample_event, MatchEvent};
use crate::error::{Error, Result};
use crate::model::{euclidean_distance, EloParams, RatingVector};

/// Absolute slack allowed on the one-step contraction inequality.
pub const CONTRACTION_TOL: f64 = 1e-9;

/// Slack for the monotone distance check, relative to the current distance.
pub const MONOTONE_TOL: f64 = 1e-12;

/// Two copies of the chain driven by the same pairs and scores.
#[derive(Debug, Clone)]
pub struct CouplingState {
    x: RatingVector,
    y: RatingVector,
    distance_history: Vec<f64>,
    steps: usize,
}

/// What one coupled step did.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupledStepRecord {
    pub event: MatchEvent,
    /// `‖x' - y'‖² - ‖x - y‖²`.
    pub change: f64,
    /// `-2K(1 - KL) |Δu| |Δb|`.
    pub bound: f64,
    pub distance: f64,
}

impl CouplingState {
    pub fn new(x: RatingVector, y: RatingVector) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: y.len(),
            });
        }
        let d0 = x.distance(&y);
        Ok(Self {
            x,
            y,
            distance_history: vec![d0],
            steps: 0,
        })
    }

    pub fn x(&self) -> &RatingVector {
        &self.x
    }

    pub fn y(&self) -> &RatingVector {
        &self.y
    }

    /// Distances `‖x_t - y_t‖`, starting with the initial one.
    pub fn distance_history(&self) -> &[f64] {
        &self.distance_history
    }

    pub fn distance(&self) -> f64 {
        *self.distance_history.last().expect("history starts non-empty")
    }

    pub fn initial_distance(&self) -> f64 {
        self.distance_history[0]
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Applies one realised event to both copies and checks the contraction
    /// inequality and distance monotonicity. Both are deterministic facts for any
    /// `KL < 1`, so a failure means a bug.
    pub fn apply(&mut self, ev: &MatchEvent, params: &EloParams) -> Result<CoupledStepRecord> {
        let (i, j) = (ev.i, ev.j);
        let link = params.link();
        let previous = self.distance();
        let (xs, ys) = (self.x.as_mut_slice(), self.y.as_mut_slice());

        let du = xs[i] - xs[j] - ys[i] + ys[j];
        let db = link.eval(xs[i] - xs[j]) - link.eval(ys[i] - ys[j]);
        let (di, dj) = (xs[i] - ys[i], xs[j] - ys[j]);

        apply_event(xs, ev, params);
        apply_event(ys, ev, params);

        let (ni, nj) = (xs[i] - ys[i], xs[j] - ys[j]);
        // Only coordinates i and j move: difference of squares, without cancellation.
        let change = (ni - di) * (ni + di) + (nj - dj) * (nj + dj);
        let k = params.k_factor();
        let bound = -2.0 * k * (1.0 - params.kl()) * du.abs() * db.abs();

        self.steps += 1;
        if change > bound + CONTRACTION_TOL {
            return Err(Error::CouplingViolation {
                step: self.steps,
                lhs: change,
                rhs: bound,
            });
        }
        let distance = euclidean_distance(xs, ys);
        if distance > previous + MONOTONE_TOL * previous.max(1.0) {
            return Err(Error::CouplingViolation {
                step: self.steps,
                lhs: distance,
                rhs: previous,
            });
        }
        self.distance_history.push(distance);
        Ok(CoupledStepRecord {
            event: *ev,
            change,
            bound,
            distance,
        })
    }

    /// Draws one event and applies it to both copies.
    pub fn step<R: RngCore>(&mut self, params: &EloParams, rng: &mut R) -> Result<CoupledStepRecord> {
        if self.x.len() != params.n_players() {
            return Err(Error::DimensionMismatch {
                expected: params.n_players(),
                found: self.x.len(),
            });
        }
        let ev = sample_event(params, rng);
        self.apply(&ev, params)
    }
}

/// One step of the natural coupling.
pub fn coupled_step<R: RngCore>(
    mut state: CouplingState,
    params: &EloParams,
    rng: &mut R,
) -> Result<CouplingState> {
    state.step(params, rng)?;
    Ok(state)
}
