//! Deterministic and path-wise checks: conservation, coupling, reachability,
//! Lyapunov drift and norm identities.

use rand::{Rng, RngCore};

use super::report::{CheckReport, Measurement, Relation};
use crate::dynamics::{
    exact_drift, find_path_nd, pairwise_l1_bound, pairwise_square_norm, run_chain, sampled_drift, CouplingState,
    LyapunovSpec,
};
use crate::error::{Error, Result};
use crate::model::{recentre, EloParams, RatingVector};
use crate::montecarlo::chain_rng;

/// A zero-sum vector with coordinates uniform in `[-r, r]` before re-centring.
fn random_zero_sum<R: RngCore>(n: usize, r: f64, rng: &mut R) -> RatingVector {
    let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-r..r)).collect();
    recentre(&mut v);
    RatingVector::from_raw(v)
}

/// A random zero-sum direction of unit Euclidean norm.
fn random_direction<R: RngCore>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v = random_zero_sum(n, 1.0, rng);
        let norm = v.norm();
        if norm > 1e-3 {
            return v.as_slice().iter().map(|x| x / norm).collect();
        }
    }
}

fn scaled(direction: &[f64], r: f64) -> RatingVector {
    let mut v: Vec<f64> = direction.iter().map(|d| d * r).collect();
    recentre(&mut v);
    RatingVector::from_raw(v)
}

/// Runs one chain for `steps` steps from zero and reports `|Σ_i X^i|` at the end.
pub fn check_zero_sum(params: &EloParams, steps: u64, seed: u64) -> Result<CheckReport> {
    let mut x = RatingVector::zeros(params.n_players())?;
    let mut rng = chain_rng(seed, 0);
    run_chain(&mut x, params, steps, &mut rng)?;
    let mut r = CheckReport::new("zero_sum", format!("steps={steps} {}", params.describe()), seed);
    r.samples_used = steps;
    r.measure(Measurement::new("abs_sum", x.sum().abs(), Relation::AtMost(1e-9), 0.0));
    Ok(r.finish())
}

/// Runs one coupled pair for `steps` steps and records the worst slack of the
/// one-step contraction inequality. Any violation is a hard failure.
pub fn check_coupling_inequality(params: &EloParams, steps: u64, seed: u64) -> Result<CheckReport> {
    let n = params.n_players();
    let mut rng = chain_rng(seed, 0);
    let x = random_zero_sum(n, 5.0, &mut rng);
    let y = random_zero_sum(n, 5.0, &mut rng);
    let mut state = CouplingState::new(x, y)?;
    let mut r = CheckReport::new("coupling_inequality", format!("steps={steps} {}", params.describe()), seed);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..steps {
        match state.step(params, &mut rng) {
            Ok(rec) => worst = worst.max(rec.change - rec.bound),
            Err(e @ Error::CouplingViolation { .. }) => {
                r.fail_with(e);
                break;
            }
            Err(e) => return Err(e),
        }
    }
    r.samples_used = state.steps() as u64;
    r.measure(Measurement::new(
        "max_change_minus_bound",
        worst,
        Relation::AtMost(0.0),
        crate::dynamics::CONTRACTION_TOL,
    ));
    Ok(r.finish())
}

/// Final over initial coupling distance for `pairs` random starting pairs at
/// distance `initial_distance`; a zero initial distance counts as ratio 0.
pub fn check_coupling_convergence(
    params: &EloParams,
    pairs: usize,
    t_max: u64,
    initial_distance: f64,
    seed: u64,
) -> Result<CheckReport> {
    let n = params.n_players();
    let mut r = CheckReport::new(
        "coupling_convergence",
        format!("pairs={pairs} t_max={t_max} d0={initial_distance} {}", params.describe()),
        seed,
    );
    let mut worst = 0.0f64;
    'pairs: for p in 0..pairs {
        let mut rng = chain_rng(seed, p as u64);
        let x = random_zero_sum(n, 3.0, &mut rng);
        let dir = random_direction(n, &mut rng);
        let y: Vec<f64> = x.as_slice().iter().zip(&dir).map(|(a, d)| a + initial_distance * d).collect();
        let mut state = CouplingState::new(x, RatingVector::centred(y)?)?;
        for _ in 0..t_max {
            if let Err(e) = state.step(params, &mut rng) {
                r.fail_with(e);
                break 'pairs;
            }
        }
        let d0 = state.initial_distance();
        let ratio = if d0 == 0.0 { 0.0 } else { state.distance() / d0 };
        worst = worst.max(ratio);
        r.samples_used += t_max;
    }
    r.measure(Measurement::new("max_ratio", worst, Relation::Below(1e-3), 0.0));
    Ok(r.finish())
}

/// Plans into `trials` random boxes of width `box_width` with centres uniform in
/// `[-3, 3]`, from random starts. Every replay must land and every plan must have
/// positive probability under the chain.
pub fn check_support_reachability(params: &EloParams, trials: usize, box_width: f64, seed: u64) -> Result<CheckReport> {
    if box_width.is_nan() || box_width <= 0.0 {
        return Err(Error::InvalidParameter(format!("box width must be positive, got {box_width}")));
    }
    params.require_invertible_maps()?;
    let n = params.n_players();
    let mut rng = chain_rng(seed, 0);
    let (mut landed, mut positive) = (0usize, 0usize);
    let mut log_probs = Vec::with_capacity(trials);
    let mut steps = 0u64;
    for _ in 0..trials {
        let start = random_zero_sum(n, 3.0, &mut rng);
        let boxes: Vec<(f64, f64)> = (0..n - 1)
            .map(|_| {
                let c: f64 = rng.random_range(-3.0..3.0);
                (c - box_width / 2.0, c + box_width / 2.0)
            })
            .collect();
        let plan = find_path_nd(&start, &boxes, params)?;
        steps += plan.len() as u64;
        if plan.contains(&plan.replay(params)?) {
            landed += 1;
        }
        if let Some(lp) = plan.log_probability(params).filter(|lp| lp.is_finite()) {
            positive += 1;
            log_probs.push(lp);
        }
    }
    let mut r = CheckReport::new(
        "support_reachability",
        format!("trials={trials} width={box_width} {}", params.describe()),
        seed,
    );
    r.samples_used = trials as u64;
    let frac = |k: usize| k as f64 / trials.max(1) as f64;
    r.measure(Measurement::new("landed_fraction", frac(landed), Relation::AtLeast(1.0), 0.0));
    r.measure(Measurement::new("positive_probability_fraction", frac(positive), Relation::AtLeast(1.0), 0.0));
    r.diagnostic("total_matches", steps as f64);
    if let Some(min) = log_probs.iter().cloned().reduce(f64::min) {
        r.diagnostic("min_log_probability", min);
        r.diagnostic("max_log_probability", log_probs.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    }
    Ok(r.finish())
}

/// The drift grid: every radius along the max-spread direction `(1, -1, 0, …)/√2`
/// and along `random_directions` random zero-sum directions, offset by the skills.
pub fn drift_grid(params: &EloParams, radii: &[f64], random_directions: usize, seed: u64) -> Vec<(f64, RatingVector)> {
    let n = params.n_players();
    let mut rng = chain_rng(seed, 0);
    let mut spread = vec![0.0; n];
    spread[0] = std::f64::consts::FRAC_1_SQRT_2;
    spread[1] = -std::f64::consts::FRAC_1_SQRT_2;
    let mut directions = vec![spread];
    directions.extend((0..random_directions).map(|_| random_direction(n, &mut rng)));
    let rho = params.skills().as_slice();
    let mut grid = Vec::new();
    for d in &directions {
        for &r in radii {
            let x = scaled(d, r);
            let shifted: Vec<f64> = x.as_slice().iter().zip(rho).map(|(a, b)| a + b).collect();
            grid.push((r, RatingVector::from_raw(shifted)));
        }
    }
    grid
}

/// Exact drift is negative at every grid state at least `threshold` away from the skills.
pub fn check_drift_negative(
    params: &EloParams,
    spec: &LyapunovSpec,
    radii: &[f64],
    threshold: f64,
    random_directions: usize,
    seed: u64,
) -> Result<CheckReport> {
    let grid = drift_grid(params, radii, random_directions, seed);
    let mut worst = f64::NEG_INFINITY;
    let mut inside_max = f64::NEG_INFINITY;
    for (r, x) in &grid {
        let d = exact_drift(x, spec, params)?;
        if *r >= threshold {
            worst = worst.max(d);
        } else {
            inside_max = inside_max.max(d);
        }
    }
    if worst == f64::NEG_INFINITY {
        return Err(Error::InvalidParameter(format!("no grid radius reaches the threshold {threshold}")));
    }
    let mut r = CheckReport::new(
        "drift_negative",
        format!("a={} threshold={threshold} {}", spec.scale(), params.describe()),
        seed,
    );
    r.samples_used = grid.len() as u64;
    r.measure(Measurement::new("max_drift_outside", worst, Relation::Below(0.0), 0.0));
    if inside_max.is_finite() {
        r.diagnostic("max_drift_inside", inside_max);
    }
    Ok(r.finish())
}

/// Exact drift against a Monte Carlo estimate at each state, within 5σ̂.
pub fn check_drift_monte_carlo(
    params: &EloParams,
    spec: &LyapunovSpec,
    states: &[RatingVector],
    samples: usize,
    seed: u64,
) -> Result<CheckReport> {
    let mut r = CheckReport::new(
        "drift_monte_carlo",
        format!("a={} samples={samples} {}", spec.scale(), params.describe()),
        seed,
    );
    for (k, x) in states.iter().enumerate() {
        let exact = exact_drift(x, spec, params)?;
        let mut rng = chain_rng(seed, k as u64);
        let (mean, se) = sampled_drift(x, spec, params, samples, &mut rng)?;
        r.measure(Measurement::new(format!("sampled_{}", k + 1), mean, Relation::WithinBand(exact), 5.0 * se));
        r.samples_used += samples as u64;
    }
    Ok(r.finish())
}

/// Pairwise norm identities on random zero-sum vectors with sizes in `sizes`:
/// the squared-norm identity to relative `1e-9` and the ℓ¹ bound.
pub fn check_norm_identities(sizes: &[usize], vectors: usize, seed: u64) -> Result<CheckReport> {
    let mut rng = chain_rng(seed, 0);
    let (mut worst_rel, mut worst_l1) = (0.0f64, f64::NEG_INFINITY);
    for k in 0..vectors {
        let n = sizes[k % sizes.len()];
        let scale = 10f64.powf(rng.random_range(-3.0..3.0));
        let x = random_zero_sum(n, scale, &mut rng);
        let norm2 = x.norm().powi(2);
        let rel = (pairwise_square_norm(&x) - norm2).abs() / norm2.max(f64::MIN_POSITIVE);
        worst_rel = worst_rel.max(rel);
        let l1 = x.l1_norm();
        worst_l1 = worst_l1.max((l1 - pairwise_l1_bound(&x)) / l1.max(f64::MIN_POSITIVE));
    }
    let sz: Vec<String> = sizes.iter().map(|n| n.to_string()).collect();
    let mut r = CheckReport::new("norm_identities", format!("n={} vectors={vectors}", sz.join(" ")), seed);
    r.samples_used = vectors as u64;
    r.measure(Measurement::new("max_rel_square_error", worst_rel, Relation::AtMost(1e-9), 0.0));
    r.measure(Measurement::new("max_rel_l1_excess", worst_l1, Relation::AtMost(0.0), 1e-12));
    Ok(r.finish())
}
