//! Checks on equilibrium ensembles.

use super::report::{CheckReport, Measurement, Relation};
use crate::error::{Error, Result};
use crate::model::EloParams;
use crate::montecarlo::{
    bimodality, linear_fit, make_histogram, run_ensemble, run_with_snapshots, EnsembleConfig, EnsembleResult,
    MeanEstimate, BIMODAL_RATIO,
};

fn ensemble_report(name: &str, result: &EnsembleResult) -> CheckReport {
    let cfg = &result.config;
    let echo = format!("t_star={} m={} {}", cfg.t_star, cfg.m, cfg.describe());
    let mut r = CheckReport::new(name, echo, cfg.master_seed);
    r.samples_used = result.m() as u64;
    r
}

/// Mean predicted score of each player against the field, versus the same sum
/// at the true skills. Gate: 4 standard errors.
pub fn check_unbiased_prediction(result: &EnsembleResult) -> Result<CheckReport> {
    let params = &result.config.params;
    let n = params.n_players();
    let link = params.link();
    let rho = params.skills().as_slice();
    let mut r = ensemble_report("unbiased_prediction", result);
    for i in 0..n {
        let est = result.estimate(|x| (0..n).filter(|&j| j != i).map(|j| link.eval(x[i] - x[j])).sum());
        let target: f64 = (0..n).filter(|&j| j != i).map(|j| link.eval(rho[i] - rho[j])).sum();
        r.measure(Measurement::new(
            format!("predicted_{}", i + 1),
            est.mean,
            Relation::WithinBand(target),
            4.0 * est.stderr,
        ));
    }
    Ok(r.finish())
}

/// Per-sample average over ordered pairs of `|Δx - Δρ| · |b(Δx) - b(Δρ)|`.
pub fn sandwich_statistic(params: &EloParams, x: &[f64]) -> f64 {
    let n = params.n_players();
    let rho = params.skills().as_slice();
    let link = params.link();
    let mut total = 0.0;
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            let (dx, dr) = (x[i] - x[j], rho[i] - rho[j]);
            total += (dx - dr).abs() * (link.eval(dx) - link.eval(dr)).abs();
        }
    }
    total / params.ordered_pairs() as f64
}

/// Closed-form bounds `(K · avg var(S^{ij}), 2K)` of the sandwich statistic.
pub fn sandwich_bounds(params: &EloParams) -> Result<(f64, f64)> {
    let n = params.n_players();
    let mut var = 0.0;
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            var += params.scores().variance(i, j)?;
        }
    }
    let k = params.k_factor();
    Ok((k * var / params.ordered_pairs() as f64, 2.0 * k))
}

/// The sandwich statistic lies between `K var(S)` and `2K`, with 3σ̂ slack.
pub fn check_sandwich(result: &EnsembleResult) -> Result<CheckReport> {
    let params = &result.config.params;
    let (lo, hi) = sandwich_bounds(params)?;
    let est = result.estimate(|x| sandwich_statistic(params, x));
    let mut r = ensemble_report("sandwich", result);
    r.measure(Measurement::new("estimate", est.mean, Relation::Between(lo, hi), 3.0 * est.stderr));
    Ok(r.finish())
}

/// `η = 1 + 2 max|ρ^i|`.
pub fn eta(params: &EloParams) -> f64 {
    1.0 + 2.0 * params.skills().max_abs()
}

/// `((N-1)/N) √(8K/ℓ_η)`, defined for `K ≤ ℓ_η / 2`.
pub fn sqrtk_bound(params: &EloParams) -> Result<f64> {
    let ell = params.link().ell(eta(params))?;
    let k = params.k_factor();
    if k > ell / 2.0 {
        return Err(Error::Precondition(format!(
            "bound needs K <= l_eta/2 = {}, got K = {k}",
            ell / 2.0
        )));
    }
    let n = params.n_players() as f64;
    Ok((n - 1.0) / n * (8.0 * k / ell).sqrt())
}

/// Mean per-player absolute deviation `(1/N)|X - ρ|₁`.
pub fn mean_abs_deviation(params: &EloParams, x: &[f64]) -> f64 {
    let rho = params.skills().as_slice();
    x.iter().zip(rho).map(|(a, b)| (a - b).abs()).sum::<f64>() / x.len() as f64
}

/// `E[(1/N)|X - ρ|₁]` stays below the `√K` bound, with 3σ̂ slack.
pub fn check_sqrtk_bound(result: &EnsembleResult) -> Result<CheckReport> {
    let params = &result.config.params;
    let bound = sqrtk_bound(params)?;
    let est = result.estimate(|x| mean_abs_deviation(params, x));
    let mut r = ensemble_report("sqrtk_bound", result);
    r.measure(Measurement::new("mean_abs_dev", est.mean, Relation::AtMost(bound), 3.0 * est.stderr));
    Ok(r.finish())
}

/// One point of a K-scan: `E|X¹ - ρ¹|` at the configured K.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub k_factor: f64,
    pub t_star: u64,
    pub estimate: MeanEstimate,
}

pub fn abs_deviation_point(cfg: &EnsembleConfig) -> Result<ScanPoint> {
    let result = run_ensemble(cfg)?;
    let rho1 = cfg.params.skills()[0];
    Ok(ScanPoint {
        k_factor: cfg.params.k_factor(),
        t_star: cfg.t_star,
        estimate: result.estimate(|x| (x[0] - rho1).abs()),
    })
}

/// Least-squares slope of `log E|X¹ - ρ¹|` against `log K`.
pub fn scaling_slope(points: &[ScanPoint]) -> Result<f64> {
    let xs: Vec<f64> = points.iter().map(|p| p.k_factor.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.estimate.mean.ln()).collect();
    Ok(linear_fit(&xs, &ys)?.0)
}

/// Log-log slope over a grid of configurations differing in K; passes inside `[0.4, 0.6]`.
pub fn check_sqrtk_scaling(grid: &[EnsembleConfig]) -> Result<CheckReport> {
    if grid.len() < 2 {
        return Err(Error::InvalidParameter("scaling fit needs at least two K values".into()));
    }
    let points = grid.iter().map(abs_deviation_point).collect::<Result<Vec<_>>>()?;
    let slope = scaling_slope(&points)?;
    let ks: Vec<String> = grid.iter().map(|c| c.params.k_factor().to_string()).collect();
    let first = &grid[0];
    let mut r = CheckReport::new(
        "sqrtk_scaling",
        format!("K={} m={} {}", ks.join(" "), first.m, first.params.describe()),
        first.master_seed,
    );
    r.samples_used = grid.iter().map(|c| c.m as u64).sum();
    r.measure(Measurement::new("slope", slope, Relation::Between(0.4, 0.6), 0.0));
    for p in &points {
        r.diagnostic(format!("E|X1-rho1|@K={}", p.k_factor), p.estimate.mean);
    }
    Ok(r.finish())
}

/// `E[X¹] - ρ¹` is positive beyond 3σ̂ for each positive skill, and zero within
/// 3σ̂ when the skill is zero. Each configuration is a two-player ensemble.
pub fn check_bias_sign(grid: &[EnsembleConfig]) -> Result<CheckReport> {
    if grid.is_empty() {
        return Err(Error::EmptyInput);
    }
    let first = &grid[0];
    let rhos: Vec<String> = grid.iter().map(|c| c.params.skills()[0].to_string()).collect();
    let mut r = CheckReport::new(
        "bias_sign",
        format!("rho1={} m={} k={}", rhos.join(" "), first.m, first.params.k_factor()),
        first.master_seed,
    );
    for cfg in grid {
        if cfg.params.n_players() != 2 {
            return Err(Error::Precondition("bias check is for two players".into()));
        }
        let rho1 = cfg.params.skills()[0];
        let result = run_ensemble(cfg)?;
        let est = result.estimate(|x| x[0] - rho1);
        let label = format!("bias@rho1={rho1}");
        let relation = if rho1 == 0.0 {
            Relation::WithinBand(0.0)
        } else if rho1 > 0.0 {
            Relation::Exceeds(0.0)
        } else {
            Relation::Below(0.0)
        };
        r.measure(Measurement::new(label, est.mean, relation, 3.0 * est.stderr));
        r.samples_used += result.m() as u64;
    }
    Ok(r.finish())
}

/// Ensemble average of `Σ_i exp(a|X_t^i|)` at increasing times: the spread
/// `max/min` stays under `factor`, and the last value does not exceed the first
/// by more than 3 combined standard errors.
pub fn check_exponential_moments(cfg: &EnsembleConfig, times: &[u64], a: f64, factor: f64) -> Result<CheckReport> {
    if times.len() < 2 {
        return Err(Error::InvalidParameter("need at least two times".into()));
    }
    let cfg = cfg.clone().with_t_star(*times.last().unwrap());
    let run = run_with_snapshots(&cfg, &times[..times.len() - 1])?;
    let n = cfg.params.n_players();
    let moment = |samples: &[f64]| {
        MeanEstimate::collect(samples.chunks_exact(n).map(|x| x.iter().map(|v| (a * v.abs()).exp()).sum()))
    };
    let mut estimates = run
        .snapshots
        .iter()
        .map(|(_, s)| moment(s))
        .collect::<Result<Vec<_>>>()?;
    estimates.push(moment(run.result.raw_samples())?);

    let means: Vec<f64> = estimates.iter().map(|e| e.mean).collect();
    let max = means.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = means.iter().cloned().fold(f64::INFINITY, f64::min);
    let (first, last) = (estimates[0], estimates[estimates.len() - 1]);
    let trend_se = (first.stderr.powi(2) + last.stderr.powi(2)).sqrt();

    let ts: Vec<String> = times.iter().map(|t| t.to_string()).collect();
    let mut r = CheckReport::new(
        "exponential_moments",
        format!("t={} a={a} m={} {}", ts.join(" "), cfg.m, cfg.params.describe()),
        cfg.master_seed,
    );
    r.samples_used = cfg.m as u64;
    r.measure(Measurement::new("max_over_min", max / min, Relation::Below(factor), 0.0));
    r.measure(Measurement::new("last_minus_first", last.mean - first.mean, Relation::AtMost(0.0), 3.0 * trend_se));
    for (t, m) in times.iter().zip(&means) {
        r.diagnostic(format!("moment@t={t}"), *m);
    }
    Ok(r.finish())
}

/// Histogram of `X¹` has a dip at `centre`: the centre bin density is below
/// `0.95 ×` the lower of the two side peaks.
pub fn check_bimodality(result: &EnsembleResult, bins: usize, centre: f64) -> Result<CheckReport> {
    let hist = make_histogram(&result.coordinate(0), bins)?;
    let b = bimodality(&hist, centre)?;
    let mut r = ensemble_report("bimodality", result);
    r.measure(Measurement::new("centre_over_peak", b.ratio, Relation::Below(BIMODAL_RATIO), 0.0));
    r.diagnostic("left_peak", b.left_peak);
    r.diagnostic("right_peak", b.right_peak);
    r.diagnostic("centre_density", b.centre_density);
    Ok(r.finish())
}
