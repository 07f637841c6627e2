//! Quantitative properties of the chain as named pass/fail checks with explicit
//! tolerances and CSV reports.

mod report;
mod stationary;
mod structural;
mod suite;

pub use report::{reports_to_csv, CheckReport, Measurement, Relation, REPORT_HEADER};
pub use stationary::{
    abs_deviation_point, check_bias_sign, check_bimodality, check_exponential_moments, check_sandwich,
    check_sqrtk_bound, check_sqrtk_scaling, check_unbiased_prediction, eta, mean_abs_deviation, sandwich_bounds,
    sandwich_statistic, scaling_slope, sqrtk_bound, ScanPoint,
};
pub use structural::{
    check_coupling_convergence, check_coupling_inequality, check_drift_monte_carlo, check_drift_negative,
    check_norm_identities, check_support_reachability, check_zero_sum, drift_grid,
};
pub use suite::{run_check, run_suite, validate_names, SuiteConfig, CHECK_NAMES, SCALING_GRID};
