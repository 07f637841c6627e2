//! Parallel ensembles of independent chains and the statistics computed on them.

mod ensemble;
mod histogram;
mod seed;
mod stats;
mod wasserstein;

pub use ensemble::{
    convergence_diagnostic, default_burn_in, run_ensemble, run_with_snapshots, EnsembleConfig,
    EnsembleResult, EnsembleSummary, InitialCondition, SnapshotRun, DEFAULT_MOMENT_SCALE,
    MIN_BURN_IN,
};
pub use histogram::{bimodality, make_histogram, Bimodality, Histogram, BIMODAL_RATIO, DEFAULT_BINS};
pub use seed::{chain_rng, derive_seed, DEFAULT_SEED};
pub use stats::{interquartile_range, lin_space, linear_fit, log_space, quantile_sorted, MeanEstimate};
pub use wasserstein::{empirical_w1, empirical_w1_resampled};
