use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use elo_dyn::model::{LinkFunction, ScoreKind, TrueSkillVector};
use elo_dyn::montecarlo::DEFAULT_SEED;
use elo_dyn::EloParams;

/// Monte Carlo experiments on Elo rating dynamics.
#[derive(Debug, Clone, Parser)]
#[command(name = "elo-dyn", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Stationary density of X¹ for several skills ρ¹ (one histogram CSV each).
    DensityRho(SimArgs),
    /// Stationary density of X¹ at ρ¹ = 0 for several K (one histogram CSV each).
    DensityK(SimArgs),
    /// Stationary bias of X¹ over a grid of ρ¹ in [-1, 1].
    BiasScan(SimArgs),
    /// E|X¹ - ρ¹| over log-spaced K from 1e-3 to 1.
    KScan(SimArgs),
    /// Runs the verification suite and writes a report CSV.
    Verify(VerifyArgs),
    /// Builds a forced-outcome plan from a start state into target intervals.
    Reach(ReachArgs),
    /// Simulates an ensemble from a parameter file and dumps one coordinate.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScoreKindArg {
    Binary,
    ThreePoint,
}

/// Flags shared by the simulation subcommands. Unset values take the
/// subcommand's defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct SimArgs {
    /// Chains per ensemble.
    #[arg(long)]
    pub m: Option<usize>,
    /// Steps per chain; defaults to max(200, ceil(10/K)).
    #[arg(long = "t-star")]
    pub t_star: Option<u64>,
    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// K-factor; a comma-separated list for density-k.
    #[arg(long = "k", value_delimiter = ',', allow_hyphen_values = true)]
    pub k: Vec<f64>,
    /// Slope parameter of the logistic link b(u) = tanh(L u); also its Lipschitz constant.
    #[arg(long = "L", visible_alias = "c", allow_hyphen_values = true)]
    pub link_c: Option<f64>,
    /// Skill of player 1; a comma-separated list for density-rho.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub rho1: Vec<f64>,
    /// Full skill vector (comma-separated, re-centred); overrides --rho1.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub skills: Vec<f64>,
    /// Number of players.
    #[arg(long)]
    pub n: Option<usize>,
    /// Histogram bins.
    #[arg(long)]
    pub bins: Option<usize>,
    /// Grid points for the scans.
    #[arg(long)]
    pub points: Option<usize>,
    /// Directory receiving the CSV files.
    #[arg(long = "out-dir", default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long = "score-kind", value_enum)]
    pub score_kind: Option<ScoreKindArg>,
    /// Draw probability for three-point scores.
    #[arg(long = "p-tie")]
    pub p_tie: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Chains per equilibrium ensemble.
    #[arg(long)]
    pub m: Option<usize>,
    /// Comma-separated check names; all checks when absent.
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<String>,
    #[arg(long = "out-dir", default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ReachArgs {
    /// Start ratings, comma-separated and summing to zero.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub start: Vec<f64>,
    /// Target intervals `a1,b1,a2,b2,…` for players 1..N-1.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub target: Vec<f64>,
    /// K-factor [default: 0.4].
    #[arg(long = "k", allow_hyphen_values = true)]
    pub k: Option<f64>,
    /// Logistic link slope [default: 0.5]; the plan needs 2KL < 1.
    #[arg(long = "L", visible_alias = "c", allow_hyphen_values = true)]
    pub link_c: Option<f64>,
    #[arg(long = "out-dir", default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Parameter file (`key = value` lines).
    #[arg(long)]
    pub config: PathBuf,
    /// 1-based coordinate to dump.
    #[arg(long, default_value_t = 1)]
    pub coord: usize,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long = "t-star")]
    pub t_star: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "out-dir", default_value = ".")]
    pub out_dir: PathBuf,
}

pub const DEFAULT_LINK_C: f64 = 0.5;

impl SimArgs {
    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn link_c(&self) -> f64 {
        self.link_c.unwrap_or(DEFAULT_LINK_C)
    }

    pub fn m_or(&self, default: usize) -> Result<usize> {
        match self.m.unwrap_or(default) {
            0 => bail!("--m must be at least 1"),
            m => Ok(m),
        }
    }

    /// A flag that this subcommand reads as a single value.
    pub fn single(values: &[f64], flag: &str, default: f64) -> Result<f64> {
        match values {
            [] => Ok(default),
            [v] => Ok(*v),
            _ => bail!("--{flag} takes a single value here, got {}", values.len()),
        }
    }

    pub fn score_kind(&self) -> Result<ScoreKind> {
        match (self.score_kind.unwrap_or(ScoreKindArg::Binary), self.p_tie) {
            (ScoreKindArg::Binary, None) => Ok(ScoreKind::Binary),
            (ScoreKindArg::Binary, Some(_)) => bail!("--p-tie needs --score-kind three-point"),
            (ScoreKindArg::ThreePoint, p) => Ok(ScoreKind::ThreePoint { p_tie: p.unwrap_or(0.0) }),
        }
    }

    /// Skills from `--skills`, or `(ρ¹, -ρ¹/(N-1), …)` from `--rho1`.
    pub fn skills(&self, rho1: f64) -> Result<Vec<f64>> {
        if !self.skills.is_empty() {
            if let Some(n) = self.n {
                if n != self.skills.len() {
                    bail!("--n {n} does not match {} skills", self.skills.len());
                }
            }
            return Ok(self.skills.clone());
        }
        let n = self.n.unwrap_or(2);
        if n < 2 {
            bail!("--n must be at least 2");
        }
        // `+ 0.0` turns a negative zero into a positive one for the echoes.
        let mut v = vec![-rho1 / (n - 1) as f64 + 0.0; n];
        v[0] = rho1 + 0.0;
        Ok(v)
    }

    pub fn params(&self, k: f64, rho1: f64) -> Result<EloParams> {
        let link = LinkFunction::logistic(self.link_c())?;
        let skills = TrueSkillVector::new(self.skills(rho1)?)?;
        EloParams::new(k, link, self.score_kind()?, skills)
            .with_context(|| format!("invalid parameters at K = {k}"))
    }
}

/// `ELO_DYN_THREADS`, if set, caps the worker count.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var("ELO_DYN_THREADS") {
        Ok(v) if !v.trim().is_empty() => {
            let n: usize = v
                .trim()
                .parse()
                .with_context(|| format!("ELO_DYN_THREADS must be a positive integer, got `{v}`"))?;
            if n == 0 {
                bail!("ELO_DYN_THREADS must be a positive integer, got 0");
            }
            Ok(Some(n))
        }
        _ => Ok(None),
    }
}

/// Comma-joined list in the form the flags accept.
pub fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}
