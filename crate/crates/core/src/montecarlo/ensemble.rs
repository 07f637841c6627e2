use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;

use super::seed::chain_rng;
use super::stats::MeanEstimate;
use super::wasserstein::empirical_w1;
use crate::dynamics::step_in_place;
use crate::error::{Error, Result};
use crate::model::{recentre, EloParams, RatingVector};

/// Minimum burn-in; longer for small K, see [`default_burn_in`].
pub const MIN_BURN_IN: u64 = 200;

/// Scale used for the exponential moment in [`EnsembleSummary`].
pub const DEFAULT_MOMENT_SCALE: f64 = 0.05;

/// `max(200, ceil(10 / K))`: the relaxation time of the chain grows like `1/K`.
pub fn default_burn_in(k_factor: f64) -> u64 {
    MIN_BURN_IN.max((10.0 / k_factor).ceil() as u64)
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    Zero,
    /// Each coordinate uniform on `[lo, hi)`, then re-centred.
    Uniform { lo: f64, hi: f64 },
    Point(RatingVector),
}

impl InitialCondition {
    pub fn describe(&self) -> String {
        match self {
            InitialCondition::Zero => "zero".into(),
            InitialCondition::Uniform { lo, hi } => format!("uniform({lo}:{hi})"),
            InitialCondition::Point(x) => {
                let v: Vec<String> = x.as_slice().iter().map(|v| v.to_string()).collect();
                format!("point({})", v.join(" "))
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct EnsembleConfig {
    pub params: EloParams,
    /// Number of independent chains.
    pub m: usize,
    /// Steps per chain.
    pub t_star: u64,
    pub master_seed: u64,
    pub initial: InitialCondition,
    /// Worker cap; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl EnsembleConfig {
    /// Zero start and the default burn-in for the K-factor of `params`.
    pub fn new(params: EloParams, m: usize, master_seed: u64) -> Self {
        let t_star = default_burn_in(params.k_factor());
        Self {
            params,
            m,
            t_star,
            master_seed,
            initial: InitialCondition::Zero,
            threads: None,
        }
    }

    pub fn with_t_star(mut self, t_star: u64) -> Self {
        self.t_star = t_star;
        self
    }

    pub fn with_initial(mut self, initial: InitialCondition) -> Self {
        self.initial = initial;
        self
    }

    pub fn with_threads(mut self, threads: Option<usize>) -> Self {
        self.threads = threads;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidParameter("ensemble needs m >= 1".into()));
        }
        match &self.initial {
            InitialCondition::Uniform { lo, hi } if !(lo.is_finite() && hi.is_finite() && lo < hi) => {
                Err(Error::InvalidParameter(format!("bad uniform range [{lo}, {hi})")))
            }
            InitialCondition::Point(x) if x.len() != self.params.n_players() => Err(Error::DimensionMismatch {
                expected: self.params.n_players(),
                found: x.len(),
            }),
            _ => Ok(()),
        }
    }

    /// Initial condition and parameter echo, without commas.
    pub fn describe(&self) -> String {
        format!("initial={} {}", self.initial.describe(), self.params.describe())
    }
}

/// Per-coordinate summaries of an ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSummary {
    pub mean: Vec<f64>,
    /// `E|X^i - ρ^i|` per coordinate.
    pub abs_deviation: Vec<f64>,
    /// Ensemble average of `Σ_i exp(a |X^i|)`.
    pub exp_moment: f64,
    pub moment_scale: f64,
}

/// Terminal states of `m` chains, stored row-major (`m` rows of `N` ratings).
#[derive(Debug, Clone)]
pub struct EnsembleResult {
    pub config: EnsembleConfig,
    samples: Vec<f64>,
    pub summary: EnsembleSummary,
    pub elapsed: Duration,
}

impl EnsembleResult {
    fn new(config: EnsembleConfig, samples: Vec<f64>, elapsed: Duration) -> Self {
        let summary = summarise(&config.params, &samples, DEFAULT_MOMENT_SCALE);
        Self {
            config,
            samples,
            summary,
            elapsed,
        }
    }

    pub fn n_players(&self) -> usize {
        self.config.params.n_players()
    }

    /// Number of samples; always equals the configured chain count.
    pub fn m(&self) -> usize {
        self.samples.len() / self.n_players()
    }

    pub fn sample(&self, k: usize) -> &[f64] {
        let n = self.n_players();
        &self.samples[k * n..(k + 1) * n]
    }

    pub fn samples(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.samples.chunks_exact(self.n_players())
    }

    pub fn raw_samples(&self) -> &[f64] {
        &self.samples
    }

    /// Marginal samples of coordinate `i` (0-based).
    pub fn coordinate(&self, i: usize) -> Vec<f64> {
        self.samples().map(|x| x[i]).collect()
    }

    /// Mean and standard error of a per-sample statistic.
    pub fn estimate(&self, f: impl Fn(&[f64]) -> f64) -> MeanEstimate {
        let values: Vec<f64> = self.samples().map(f).collect();
        MeanEstimate::from_values(&values).expect("ensembles are non-empty")
    }

    pub fn summary_with_scale(&self, a: f64) -> EnsembleSummary {
        summarise(&self.config.params, &self.samples, a)
    }

    /// Sample dump of coordinate `i`: a `#` header with seed, burn-in and chain
    /// count, then one rating per line.
    pub fn to_csv(&self, i: usize) -> String {
        let mut out = format!(
            "# seed={} t_star={} m={}\n# {}\n",
            self.config.master_seed,
            self.config.t_star,
            self.m(),
            self.config.describe()
        );
        for x in self.samples() {
            let _ = writeln!(out, "{}", x[i]);
        }
        out
    }
}

fn summarise(params: &EloParams, samples: &[f64], a: f64) -> EnsembleSummary {
    let n = params.n_players();
    let m = (samples.len() / n) as f64;
    let rho = params.skills().as_slice();
    let mut mean = vec![0.0; n];
    let mut abs_deviation = vec![0.0; n];
    let mut exp_moment = 0.0;
    for x in samples.chunks_exact(n) {
        for i in 0..n {
            mean[i] += x[i];
            abs_deviation[i] += (x[i] - rho[i]).abs();
            exp_moment += (a * x[i].abs()).exp();
        }
    }
    mean.iter_mut().for_each(|v| *v /= m);
    abs_deviation.iter_mut().for_each(|v| *v /= m);
    EnsembleSummary {
        mean,
        abs_deviation,
        exp_moment: exp_moment / m,
        moment_scale: a,
    }
}

/// Ensemble states at intermediate times, plus the terminal result.
#[derive(Debug, Clone)]
pub struct SnapshotRun {
    /// `(t, row-major samples at time t)`, in checkpoint order.
    pub snapshots: Vec<(u64, Vec<f64>)>,
    pub result: EnsembleResult,
}

impl SnapshotRun {
    pub fn coordinate_at(&self, snapshot: usize, i: usize) -> Vec<f64> {
        let n = self.result.n_players();
        self.snapshots[snapshot].1.chunks_exact(n).map(|x| x[i]).collect()
    }
}

/// Runs `m` independent chains for `t_star` steps each.
///
/// Chain `k` draws from stream `k` of the master seed, so the output does not
/// depend on how chains are spread across threads.
pub fn run_ensemble(cfg: &EnsembleConfig) -> Result<EnsembleResult> {
    Ok(run_with_snapshots(cfg, &[])?.result)
}

/// Like [`run_ensemble`], also recording every chain at the given times
/// (ascending, at most `t_star`; `0` is the initial state).
pub fn run_with_snapshots(cfg: &EnsembleConfig, checkpoints: &[u64]) -> Result<SnapshotRun> {
    cfg.validate()?;
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("checkpoints must be strictly ascending".into()));
    }
    if checkpoints.last().is_some_and(|&t| t > cfg.t_star) {
        return Err(Error::InvalidParameter(format!(
            "checkpoint beyond t_star = {}",
            cfg.t_star
        )));
    }
    let started = Instant::now();
    let n = cfg.params.n_players();
    let block = n * (checkpoints.len() + 1);
    let len = cfg
        .m
        .checked_mul(block)
        .ok_or_else(|| Error::Allocation(format!("{} chains", cfg.m)))?;
    let mut buffer: Vec<f64> = Vec::new();
    buffer
        .try_reserve_exact(len)
        .map_err(|_| Error::Allocation(format!("{} chains of {n} ratings", cfg.m)))?;
    buffer.resize(len, 0.0);

    let work = |buffer: &mut Vec<f64>| {
        buffer
            .par_chunks_mut(block)
            .enumerate()
            .for_each(|(k, out)| run_chain_into(cfg, k as u64, checkpoints, out));
    };
    match cfg.threads {
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads.max(1))
                .build()
                .map_err(|e| Error::Allocation(format!("worker pool: {e}")))?;
            pool.install(|| work(&mut buffer));
        }
        None => work(&mut buffer),
    }

    let mut snapshots: Vec<(u64, Vec<f64>)> = Vec::with_capacity(checkpoints.len());
    for (c, &t) in checkpoints.iter().enumerate() {
        let mut snap = Vec::new();
        snap.try_reserve_exact(cfg.m * n)
            .map_err(|_| Error::Allocation("snapshot".into()))?;
        snap.extend(buffer.chunks_exact(block).flat_map(|b| &b[c * n..(c + 1) * n]));
        snapshots.push((t, snap));
    }
    let terminal: Vec<f64> = if checkpoints.is_empty() {
        buffer
    } else {
        let offset = checkpoints.len() * n;
        buffer
            .chunks_exact(block)
            .flat_map(|b| &b[offset..offset + n])
            .copied()
            .collect()
    };
    Ok(SnapshotRun {
        snapshots,
        result: EnsembleResult::new(cfg.clone(), terminal, started.elapsed()),
    })
}

fn run_chain_into(cfg: &EnsembleConfig, index: u64, checkpoints: &[u64], out: &mut [f64]) {
    let n = cfg.params.n_players();
    let mut rng = chain_rng(cfg.master_seed, index);
    let mut x = vec![0.0; n];
    match &cfg.initial {
        InitialCondition::Zero => {}
        InitialCondition::Uniform { lo, hi } => {
            x.iter_mut().for_each(|v| *v = rng.random_range(*lo..*hi));
            recentre(&mut x);
        }
        InitialCondition::Point(p) => x.copy_from_slice(p.as_slice()),
    }
    let mut t = 0u64;
    for (c, &checkpoint) in checkpoints.iter().enumerate() {
        while t < checkpoint {
            step_in_place(&mut x, &cfg.params, &mut rng);
            t += 1;
        }
        out[c * n..(c + 1) * n].copy_from_slice(&x);
    }
    while t < cfg.t_star {
        step_in_place(&mut x, &cfg.params, &mut rng);
        t += 1;
    }
    let offset = checkpoints.len() * n;
    out[offset..offset + n].copy_from_slice(&x);
}

/// `W₁` between the law of coordinate `i` at each checkpoint and at `t_star`.
pub fn convergence_diagnostic(cfg: &EnsembleConfig, checkpoints: &[u64], i: usize) -> Result<Vec<(u64, f64)>> {
    if i >= cfg.params.n_players() {
        return Err(Error::IndexOutOfRange {
            index: i,
            n: cfg.params.n_players(),
        });
    }
    let run = run_with_snapshots(cfg, checkpoints)?;
    let terminal = run.result.coordinate(i);
    checkpoints
        .iter()
        .enumerate()
        .map(|(c, &t)| Ok((t, empirical_w1(&run.coordinate_at(c, i), &terminal)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(rho1: f64, k: f64) -> EloParams {
        EloParams::logistic_binary(k, 0.5, &[rho1, -rho1]).unwrap()
    }

    #[test]
    fn burn_in_rule() {
        assert_eq!(default_burn_in(0.4), 200);
        assert_eq!(default_burn_in(0.01), 1000);
        assert_eq!(default_burn_in(1e-3), 10_000);
    }

    #[test]
    fn no_steps_returns_start() {
        let x0 = RatingVector::new(vec![0.7, -0.7]).unwrap();
        let cfg = EnsembleConfig::new(params(0.0, 0.4), 1, 1)
            .with_t_star(0)
            .with_initial(InitialCondition::Point(x0.clone()));
        let r = run_ensemble(&cfg).unwrap();
        assert_eq!(r.m(), 1);
        assert_eq!(r.sample(0), x0.as_slice());
    }

    #[test]
    fn rejects_empty_ensemble_and_bad_checkpoints() {
        let cfg = EnsembleConfig::new(params(0.0, 0.4), 0, 1);
        assert!(run_ensemble(&cfg).is_err());
        let cfg = EnsembleConfig::new(params(0.0, 0.4), 10, 1);
        assert!(run_with_snapshots(&cfg, &[5, 5]).is_err());
        assert!(run_with_snapshots(&cfg, &[500]).is_err());
        let bad = cfg.clone().with_initial(InitialCondition::Uniform { lo: 1.0, hi: 1.0 });
        assert!(run_ensemble(&bad).is_err());
    }

    #[test]
    fn thread_count_does_not_change_samples() {
        let cfg = EnsembleConfig::new(params(0.5, 0.4), 257, 99)
            .with_initial(InitialCondition::Uniform { lo: -3.0, hi: 3.0 });
        let one = run_ensemble(&cfg.clone().with_threads(Some(1))).unwrap();
        let three = run_ensemble(&cfg.clone().with_threads(Some(3))).unwrap();
        let global = run_ensemble(&cfg).unwrap();
        assert_eq!(one.raw_samples(), three.raw_samples());
        assert_eq!(one.raw_samples(), global.raw_samples());
    }

    #[test]
    fn snapshots_are_consistent_with_plain_runs() {
        let cfg = EnsembleConfig::new(params(0.5, 0.4), 64, 3).with_t_star(50);
        let run = run_with_snapshots(&cfg, &[0, 10, 50]).unwrap();
        assert!(run.snapshots[0].1.iter().all(|&v| v == 0.0));
        assert_eq!(run.snapshots[2].1, run.result.raw_samples());
        let short = run_ensemble(&cfg.clone().with_t_star(10)).unwrap();
        assert_eq!(run.snapshots[1].1, short.raw_samples());
    }

    #[test]
    fn symmetric_mean_is_zero() {
        let cfg = EnsembleConfig::new(params(0.0, 0.4), 20_000, 5);
        let r = run_ensemble(&cfg).unwrap();
        let est = r.estimate(|x| x[0]);
        assert!(est.mean.abs() < 4.0 * est.stderr);
        assert_eq!(r.summary.mean.len(), 2);
        assert!((r.summary.mean[0] + r.summary.mean[1]).abs() < 1e-12);
    }

    #[test]
    fn csv_dump_header() {
        let cfg = EnsembleConfig::new(params(0.0, 0.4), 3, 42).with_t_star(5);
        let text = run_ensemble(&cfg).unwrap().to_csv(0);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# seed=42 t_star=5 m=3"));
        assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 3);
    }

    #[test]
    fn far_start_converges_monotonically() {
        let x0 = RatingVector::new(vec![10.0, -10.0]).unwrap();
        let cfg = EnsembleConfig::new(params(0.5, 0.4), 100_000, 8)
            .with_t_star(500)
            .with_initial(InitialCondition::Point(x0));
        let diag = convergence_diagnostic(&cfg, &[0, 10, 50, 200], 0).unwrap();
        // From a point mass at 10 the distance is roughly 10 - E[X¹].
        assert!((diag[0].1 - 9.5).abs() < 0.5, "{diag:?}");
        assert!(diag.windows(2).all(|w| w[1].1 < w[0].1), "{diag:?}");
        assert!(diag[3].1 < 5.0 / (100_000f64).sqrt(), "{diag:?}");
    }
}
