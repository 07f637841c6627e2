use super::report::CheckReport;
use super::stationary::{
    check_bias_sign, check_bimodality, check_exponential_moments, check_sandwich, check_sqrtk_bound,
    check_sqrtk_scaling, check_unbiased_prediction,
};
use super::structural::{
    check_coupling_convergence, check_coupling_inequality, check_drift_monte_carlo, check_drift_negative,
    check_norm_identities, check_support_reachability, check_zero_sum,
};
use crate::dynamics::{LyapunovSpec, DEFAULT_SCALE};
use crate::error::{Error, Result};
use crate::model::{EloParams, RatingVector};
use crate::montecarlo::{derive_seed, run_ensemble, EnsembleConfig, DEFAULT_BINS};

/// Names accepted by [`run_suite`], in execution order.
pub const CHECK_NAMES: &[&str] = &[
    "zero_sum",
    "coupling_inequality",
    "coupling_convergence",
    "unbiased_prediction",
    "sandwich",
    "sqrtk_bound",
    "sqrtk_scaling",
    "bias_sign",
    "support_reachability_n2",
    "support_reachability_n3",
    "drift_negative_n2",
    "drift_negative_n3",
    "drift_monte_carlo",
    "exponential_moments",
    "norm_identities",
    "bimodality",
];

/// Desk-scale settings for the full suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Chains per equilibrium ensemble. The K-scan uses half, the bimodality
    /// histogram ten times as many and the moment check a tenth.
    pub m: usize,
    pub threads: Option<usize>,
}

impl SuiteConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            m: 100_000,
            threads: None,
        }
    }
}

/// The K grid of the scaling check.
pub const SCALING_GRID: [f64; 4] = [1e-3, 2e-3, 4e-3, 8e-3];

/// Rejects names outside [`CHECK_NAMES`].
pub fn validate_names(only: &[String]) -> Result<()> {
    for name in only {
        if !CHECK_NAMES.contains(&name.as_str()) {
            return Err(Error::InvalidParameter(format!(
                "unknown check `{name}`; known: {}",
                CHECK_NAMES.join(" ")
            )));
        }
    }
    Ok(())
}

fn pair(k: f64, rho1: f64) -> Result<EloParams> {
    EloParams::logistic_binary(k, 0.5, &[rho1, -rho1])
}

/// Runs the named check with suite defaults.
pub fn run_check(name: &str, cfg: &SuiteConfig) -> Result<CheckReport> {
    let index = CHECK_NAMES
        .iter()
        .position(|n| *n == name)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown check `{name}`")))?;
    let seed = derive_seed(cfg.seed, index as u64);
    let ensemble = |params: EloParams, m: usize| EnsembleConfig::new(params, m, seed).with_threads(cfg.threads);
    let report = match name {
        "zero_sum" => check_zero_sum(&EloParams::logistic_binary(0.4, 0.5, &[0.3, 0.1, -0.1, -0.3])?, 1_000_000, seed),
        "coupling_inequality" => check_coupling_inequality(&EloParams::logistic_binary(0.4, 0.5, &[0.5, 0.0, -0.5])?, 100_000, seed),
        "coupling_convergence" => check_coupling_convergence(&pair(0.4, 0.5)?, 20, 100_000, 10.0, seed),
        "unbiased_prediction" => {
            check_unbiased_prediction(&run_ensemble(&ensemble(pair(0.4, 0.5)?, cfg.m).with_t_star(500))?)
        }
        "sandwich" => check_sandwich(&run_ensemble(&ensemble(pair(0.1, 0.5)?, cfg.m))?),
        "sqrtk_bound" => check_sqrtk_bound(&run_ensemble(&ensemble(pair(0.01, 0.5)?, cfg.m))?),
        "sqrtk_scaling" => {
            let grid = SCALING_GRID
                .iter()
                .enumerate()
                .map(|(k, &kf)| {
                    Ok(EnsembleConfig::new(pair(kf, 0.5)?, (cfg.m / 2).max(1), derive_seed(seed, k as u64))
                        .with_threads(cfg.threads))
                })
                .collect::<Result<Vec<_>>>()?;
            check_sqrtk_scaling(&grid)
        }
        "bias_sign" => {
            let grid = [0.0, 0.25, 0.5, 0.75]
                .iter()
                .enumerate()
                .map(|(k, &rho)| {
                    Ok(EnsembleConfig::new(pair(1.0, rho)?, cfg.m, derive_seed(seed, k as u64)).with_threads(cfg.threads))
                })
                .collect::<Result<Vec<_>>>()?;
            check_bias_sign(&grid)
        }
        "support_reachability_n2" => check_support_reachability(&pair(0.4, 0.0)?, 100, 0.01, seed),
        "support_reachability_n3" => {
            check_support_reachability(&EloParams::logistic_binary(0.4, 0.5, &[0.0; 3])?, 100, 0.05, seed)
        }
        "drift_negative_n2" | "drift_negative_n3" => {
            let n = if name.ends_with("n2") { 2 } else { 3 };
            let params = EloParams::logistic_binary(0.4, 0.5, &vec![0.0; n])?;
            let spec = LyapunovSpec::new(DEFAULT_SCALE, params.skills().clone())?;
            let radii = [0.0, 5.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 80.0, 100.0, 150.0, 200.0, 400.0];
            check_drift_negative(&params, &spec, &radii, 40.0, 16, seed)
        }
        "drift_monte_carlo" => {
            let params = EloParams::logistic_binary(0.4, 0.5, &[0.0; 3])?;
            let spec = LyapunovSpec::new(DEFAULT_SCALE, params.skills().clone())?;
            let states = [
                RatingVector::zeros(3)?,
                RatingVector::new(vec![10.0, -4.0, -6.0])?,
                RatingVector::new(vec![-45.0, 40.0, 5.0])?,
            ];
            check_drift_monte_carlo(&params, &spec, &states, 100_000, seed)
        }
        "exponential_moments" => check_exponential_moments(
            &ensemble(pair(0.4, 0.5)?, (cfg.m / 10).max(2)),
            &[200, 400, 800, 1600],
            DEFAULT_SCALE,
            1.5,
        ),
        "norm_identities" => check_norm_identities(&(2..=10).collect::<Vec<_>>(), 1000, seed),
        "bimodality" => check_bimodality(&run_ensemble(&ensemble(pair(1.2, 0.0)?, cfg.m * 10))?, DEFAULT_BINS, 0.0),
        _ => unreachable!("name validated above"),
    };
    report.map(|mut r| {
        r.name = name.to_string();
        r
    })
}

/// Runs every check, or only those named in `only`, in [`CHECK_NAMES`] order.
/// A check that errors out is reported as failed rather than aborting the suite.
pub fn run_suite(cfg: &SuiteConfig, only: &[String]) -> Result<Vec<CheckReport>> {
    validate_names(only)?;
    Ok(CHECK_NAMES
        .iter()
        .filter(|n| only.is_empty() || only.iter().any(|o| o == *n))
        .map(|name| {
            run_check(name, cfg).unwrap_or_else(|e| {
                let mut r = CheckReport::new(*name, "", cfg.seed);
                r.fail_with(e);
                r.finish()
            })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_names_are_rejected() {
        assert!(validate_names(&["sandwich".into()]).is_ok());
        assert!(validate_names(&["nope".into()]).is_err());
        assert!(run_suite(&SuiteConfig::new(1), &["nope".into()]).is_err());
    }

    #[test]
    fn cheap_subset_passes_and_is_reproducible() {
        let only = vec!["norm_identities".to_string(), "drift_negative_n2".to_string()];
        let a = run_suite(&SuiteConfig::new(5), &only).unwrap();
        let b = run_suite(&SuiteConfig::new(5), &only).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 2);
        assert_eq!(a[0].name, "drift_negative_n2");
        assert!(a.iter().all(|r| r.passed));
    }
}
