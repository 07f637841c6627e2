//! Single-step maps, the random chain, the natural coupling, the two-player maps
//! and their inverses, the Lyapunov functional and the reachability construction.

mod coupling;
mod lyapunov;
mod maps;
mod norms;
mod path;
mod step;

pub use coupling::{coupled_step, CoupledStepRecord, CouplingState, CONTRACTION_TOL, MONOTONE_TOL};
pub use lyapunov::{exact_drift, lyapunov_value, sampled_drift, LyapunovSpec, DEFAULT_SCALE};
pub use maps::{e_minus, e_minus_inv, e_plus, e_plus_inv, Outcome, INVERSE_MAX_ITER, INVERSE_TOL};
pub use norms::{pairwise_l1_bound, pairwise_square_norm};
pub use path::{find_path_1d, find_path_nd, replay_1d, PathPlan, MAX_EXPANSIONS, MAX_WALK};
pub use step::{chain_step, elo_step, run_chain, MatchEvent};

pub(crate) use step::step_in_place;
