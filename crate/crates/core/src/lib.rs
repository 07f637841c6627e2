//! Elo rating dynamics viewed as a Markov chain on zero-sum rating vectors.
//!
//! The crate simulates the chain, runs parallel ensembles, and checks its
//! stationary behaviour numerically: contraction under the natural coupling,
//! a negative Lyapunov drift, reachability of arbitrary boxes, bias and
//! variance bounds of the stationary ratings.
//!
//! ```
//! use elo_dyn::{run_ensemble, EloParams, EnsembleConfig};
//!
//! let params = EloParams::logistic_binary(0.4, 0.5, &[0.5, -0.5]).unwrap();
//! let result = run_ensemble(&EnsembleConfig::new(params, 1000, 7)).unwrap();
//! assert!(result.summary.mean[0] > 0.0);
//! ```

pub mod dynamics;
pub mod error;
pub mod model;
pub mod montecarlo;
pub mod verify;

pub use dynamics::{
    chain_step, coupled_step, elo_step, exact_drift, find_path_nd, lyapunov_value, run_chain, CouplingState,
    LyapunovSpec, MatchEvent, Outcome, PathPlan,
};
pub use error::{Error, Result};
pub use model::{EloParams, LinkFunction, ParamConfig, RatingVector, ScoreKind, ScoreLaw, ScoreModel, TrueSkillVector};
pub use montecarlo::{run_ensemble, EnsembleConfig, EnsembleResult, InitialCondition, DEFAULT_SEED};
