use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use elo_dyn::dynamics::find_path_nd;
use elo_dyn::model::ScoreKind;
use elo_dyn::montecarlo::{
    default_burn_in, derive_seed, lin_space, log_space, make_histogram, run_ensemble, EnsembleConfig,
    DEFAULT_BINS, DEFAULT_SEED,
};
use elo_dyn::verify::{reports_to_csv, run_suite, validate_names, SuiteConfig};
use elo_dyn::{EloParams, RatingVector};

use crate::args::{join, ReachArgs, SimArgs, SimulateArgs, VerifyArgs, DEFAULT_LINK_C};

pub const DENSITY_RHO_DEFAULTS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
pub const DENSITY_K_DEFAULTS: [f64; 5] = [0.02, 0.1, 0.4, 0.8, 1.2];

/// Files written and whether every check passed (always true outside `verify`).
#[derive(Debug, Default)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    pub success: bool,
}

impl RunOutcome {
    fn ok(files: Vec<PathBuf>) -> Self {
        Self { files, success: true }
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(path)
}

/// The canonical flag echo for one ensemble: reparsing it reproduces the run.
fn echo(sub: &str, args: &SimArgs, params: &EloParams, m: usize, t_star: u64, seed: u64, extra: &[String]) -> String {
    let skills = if args.skills.is_empty() {
        format!("--rho1 {} --n {}", params.skills()[0], params.n_players())
    } else {
        format!("--skills {}", join(&args.skills))
    };
    let mut s = format!(
        "{sub} --m {m} --t-star {t_star} --seed {seed} --k {} --L {} {skills}",
        params.k_factor(),
        args.link_c(),
    );
    match params.scores().kind() {
        ScoreKind::ThreePoint { p_tie } => {
            let _ = write!(s, " --score-kind three-point --p-tie {p_tie}");
        }
        _ => s.push_str(" --score-kind binary"),
    }
    for e in extra {
        let _ = write!(s, " {e}");
    }
    s
}

fn header(lines: &[String]) -> String {
    lines.iter().map(|l| format!("# {l}\n")).collect()
}

fn ensemble(params: EloParams, m: usize, t_star: Option<u64>, seed: u64, threads: Option<usize>) -> EnsembleConfig {
    let cfg = EnsembleConfig::new(params, m, seed).with_threads(threads);
    match t_star {
        Some(t) => cfg.with_t_star(t),
        None => cfg,
    }
}

fn density_file(
    sub: &str,
    args: &SimArgs,
    params: EloParams,
    m: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<String> {
    let bins = args.bins.unwrap_or(DEFAULT_BINS);
    ensure!(bins > 0, "--bins must be at least 1");
    let cfg = ensemble(params, m, args.t_star, seed, threads);
    let result = run_ensemble(&cfg)?;
    let hist = make_histogram(&result.coordinate(0), bins)?;
    let mut out = header(&[
        format!("elo-dyn {sub}: stationary density of X1"),
        format!("seed={} t_star={} m={}", seed, cfg.t_star, m),
        cfg.params.describe(),
        format!(
            "args: {}",
            echo(sub, args, &cfg.params, m, cfg.t_star, args.seed(), &[format!("--bins {bins}")])
        ),
    ]);
    hist.write_rows(&mut out);
    Ok(out)
}

pub fn density_rho(args: &SimArgs, threads: Option<usize>, log: &mut dyn Write) -> Result<RunOutcome> {
    let rhos = if args.rho1.is_empty() { DENSITY_RHO_DEFAULTS.to_vec() } else { args.rho1.clone() };
    ensure!(args.skills.is_empty(), "density-rho varies --rho1; --skills is not accepted");
    let k = SimArgs::single(&args.k, "k", 0.4)?;
    let m = args.m_or(1_000_000)?;
    let mut files = Vec::new();
    for rho in rhos {
        let seed = derive_seed(args.seed(), rho.to_bits());
        let params = args.params(k, rho)?;
        let csv = density_file("density-rho", args, params, m, seed, threads)?;
        let path = write_file(&args.out_dir, &format!("density_rho_{rho}.csv"), &csv)?;
        writeln!(log, "wrote {}", path.display())?;
        files.push(path);
    }
    Ok(RunOutcome::ok(files))
}

pub fn density_k(args: &SimArgs, threads: Option<usize>, log: &mut dyn Write) -> Result<RunOutcome> {
    let ks = if args.k.is_empty() { DENSITY_K_DEFAULTS.to_vec() } else { args.k.clone() };
    let rho = SimArgs::single(&args.rho1, "rho1", 0.0)?;
    let m = args.m_or(1_000_000)?;
    // Validate the whole list before simulating anything.
    let params = ks
        .iter()
        .map(|&k| {
            ensure!(
                k * args.link_c() < 1.0,
                "K = {k} with L = {} violates KL < 1",
                args.link_c()
            );
            args.params(k, rho)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut files = Vec::new();
    for (k, p) in ks.iter().zip(params) {
        let seed = derive_seed(args.seed(), k.to_bits());
        let csv = density_file("density-k", args, p, m, seed, threads)?;
        let path = write_file(&args.out_dir, &format!("density_k_{k}.csv"), &csv)?;
        writeln!(log, "wrote {}", path.display())?;
        files.push(path);
    }
    Ok(RunOutcome::ok(files))
}

pub fn bias_scan(args: &SimArgs, threads: Option<usize>, log: &mut dyn Write) -> Result<RunOutcome> {
    ensure!(
        args.n.unwrap_or(2) == 2 && args.skills.is_empty(),
        "bias-scan is a two-player experiment driven by the ρ¹ grid"
    );
    ensure!(args.rho1.is_empty(), "bias-scan sweeps ρ¹ itself; use --points to change the grid");
    let k = SimArgs::single(&args.k, "k", 1.0)?;
    let m = args.m_or(10_000)?;
    let points = args.points.unwrap_or(101);
    ensure!(points >= 1, "--points must be at least 1");
    let base = args.params(k, 0.0)?;
    let t_star = args.t_star.unwrap_or_else(|| default_burn_in(k));
    let mut out = header(&[
        "elo-dyn bias-scan: stationary mean of X1 against rho1".into(),
        format!("seed={} t_star={t_star} m={m} points={points}", args.seed()),
        base.describe(),
        format!(
            "args: bias-scan --m {m} --t-star {t_star} --seed {} --k {k} --L {} --points {points}{}",
            args.seed(),
            args.link_c(),
            match base.scores().kind() {
                ScoreKind::ThreePoint { p_tie } => format!(" --score-kind three-point --p-tie {p_tie}"),
                _ => " --score-kind binary".into(),
            }
        ),
    ]);
    out.push_str("rho1,b2rho1,mean_X1,b_2meanX1,mean_b2X1,stderr\n");
    let link = base.link().clone();
    for (idx, rho) in lin_space(-1.0, 1.0, points).into_iter().enumerate() {
        let params = args.params(k, rho)?;
        let cfg = ensemble(params, m, Some(t_star), derive_seed(args.seed(), idx as u64), threads);
        let result = run_ensemble(&cfg)?;
        let x1 = result.estimate(|x| x[0]);
        let bx = result.estimate(|x| link.eval(x[0] - x[1]));
        let _ = writeln!(
            out,
            "{rho},{},{},{},{},{}",
            link.eval(2.0 * rho),
            x1.mean,
            link.eval(2.0 * x1.mean),
            bx.mean,
            x1.stderr
        );
    }
    let path = write_file(&args.out_dir, "bias_scan.csv", &out)?;
    writeln!(log, "wrote {}", path.display())?;
    Ok(RunOutcome::ok(vec![path]))
}

pub fn k_scan(args: &SimArgs, threads: Option<usize>, log: &mut dyn Write) -> Result<RunOutcome> {
    ensure!(args.k.is_empty(), "k-scan sweeps K itself; use --points to change the grid");
    let rho = SimArgs::single(&args.rho1, "rho1", 0.5)?;
    let m = args.m_or(10_000)?;
    let points = args.points.unwrap_or(100);
    ensure!(points >= 1, "--points must be at least 1");
    let ks = log_space(1e-3, 1.0, points);
    let params = ks.iter().map(|&k| args.params(k, rho)).collect::<Result<Vec<_>>>()?;
    let skills = params[0].skills().as_slice().to_vec();
    let t_echo = args.t_star.map(|t| format!(" --t-star {t}")).unwrap_or_default();
    let mut out = header(&[
        "elo-dyn k-scan: E|X1 - rho1| against K".into(),
        format!(
            "seed={} t_star={} m={m} points={points}",
            args.seed(),
            args.t_star.map_or("auto".into(), |t| t.to_string())
        ),
        params[0].describe(),
        format!(
            "args: k-scan --m {m}{t_echo} --seed {} --L {} --skills {} --points {points}{}",
            args.seed(),
            args.link_c(),
            join(&skills),
            match params[0].scores().kind() {
                ScoreKind::ThreePoint { p_tie } => format!(" --score-kind three-point --p-tie {p_tie}"),
                _ => " --score-kind binary".into(),
            }
        ),
    ]);
    out.push_str("K,mean_abs_dev,stderr,t_star_used\n");
    for (idx, p) in params.into_iter().enumerate() {
        let k = p.k_factor();
        let rho1 = p.skills()[0];
        let cfg = ensemble(p, m, args.t_star, derive_seed(args.seed(), idx as u64), threads);
        let result = run_ensemble(&cfg)?;
        let est = result.estimate(|x| (x[0] - rho1).abs());
        let _ = writeln!(out, "{k},{},{},{}", est.mean, est.stderr, cfg.t_star);
    }
    let path = write_file(&args.out_dir, "k_scan.csv", &out)?;
    writeln!(log, "wrote {}", path.display())?;
    Ok(RunOutcome::ok(vec![path]))
}

pub fn verify(args: &VerifyArgs, threads: Option<usize>, log: &mut dyn Write) -> Result<RunOutcome> {
    validate_names(&args.only)?;
    let mut cfg = SuiteConfig::new(args.seed.unwrap_or(DEFAULT_SEED));
    if let Some(m) = args.m {
        ensure!(m >= 2, "--m must be at least 2");
        cfg.m = m;
    }
    cfg.threads = threads;
    let reports = run_suite(&cfg, &args.only)?;
    let mut comments = vec![
        "elo-dyn verify".to_string(),
        format!("seed={} m={}", cfg.seed, cfg.m),
    ];
    let mut echo = format!("args: verify --seed {} --m {}", cfg.seed, cfg.m);
    if !args.only.is_empty() {
        let _ = write!(echo, " --only {}", args.only.join(","));
    }
    comments.push(echo);
    let csv = reports_to_csv(&comments, &reports);
    for r in &reports {
        write!(log, "{}", r.summary())?;
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    writeln!(log, "{} checks, {failed} failed", reports.len())?;
    let path = write_file(&args.out_dir, "verify_report.csv", &csv)?;
    writeln!(log, "wrote {}", path.display())?;
    Ok(RunOutcome {
        files: vec![path],
        success: failed == 0,
    })
}

pub fn reach(args: &ReachArgs, log: &mut dyn Write) -> Result<RunOutcome> {
    let n = args.start.len();
    ensure!(n >= 2, "--start needs at least two ratings");
    if args.target.len() != 2 * (n - 1) {
        bail!(
            "--target needs {} values (an interval a,b for each of players 1..{}), got {}",
            2 * (n - 1),
            n - 1,
            args.target.len()
        );
    }
    let boxes: Vec<(f64, f64)> = args.target.chunks_exact(2).map(|c| (c[0], c[1])).collect();
    let k = args.k.unwrap_or(0.4);
    let c = args.link_c.unwrap_or(DEFAULT_LINK_C);
    let params = EloParams::logistic_binary(k, c, &vec![0.0; n])?;
    params.require_invertible_maps()?;
    let start = RatingVector::new(args.start.clone()).context("--start must sum to zero")?;
    let plan = find_path_nd(&start, &boxes, &params)?;
    let end = plan.replay(&params)?;
    let log_p = plan.log_probability(&params);
    writeln!(log, "plan length: {}", plan.len())?;
    writeln!(log, "terminal state: {}", join(end.as_slice()))?;
    writeln!(log, "in targets: {}", plan.contains(&end))?;
    match log_p {
        Some(lp) => writeln!(log, "log probability: {lp}")?,
        None => writeln!(log, "log probability: -inf")?,
    }
    let text = format!("# k={k} L={c}\n{}", plan.to_text());
    let path = write_file(&args.out_dir, "reach_plan.txt", &text)?;
    writeln!(log, "wrote {}", path.display())?;
    Ok(RunOutcome::ok(vec![path]))
}

pub fn simulate(args: &SimulateArgs, threads: Option<usize>, log: &mut dyn Write) -> Result<RunOutcome> {
    let text = fs::read_to_string(&args.config).with_context(|| format!("cannot read {}", args.config.display()))?;
    let params = EloParams::from_config_str(&text)?;
    let n = params.n_players();
    ensure!(
        (1..=n).contains(&args.coord),
        "--coord must be between 1 and {n}, got {}",
        args.coord
    );
    let m = args.m.unwrap_or(100_000);
    ensure!(m >= 1, "--m must be at least 1");
    let cfg = ensemble(params, m, args.t_star, args.seed.unwrap_or(DEFAULT_SEED), threads);
    let result = run_ensemble(&cfg)?;
    let name = format!("simulate_x{}.csv", args.coord);
    let path = write_file(&args.out_dir, &name, &result.to_csv(args.coord - 1))?;
    writeln!(
        log,
        "mean X{} = {:.6}; wrote {}",
        args.coord,
        result.summary.mean[args.coord - 1],
        path.display()
    )?;
    Ok(RunOutcome::ok(vec![path]))
}
