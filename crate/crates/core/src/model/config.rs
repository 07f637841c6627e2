//! Flat `key = value` parameter files.
//!
//! ```text
//! # two players, logistic link
//! n_players = 2
//! k_factor = 0.4
//! link.kind = logistic
//! link.c = 0.5
//! score.kind = binary
//! skills = 0.5, -0.5
//! ```
//!
//! Blank lines and `#` comments are ignored. Unknown or repeated keys are errors.

use std::fmt::Write as _;

use super::link::LinkFunction;
use super::params::EloParams;
use super::rating::TrueSkillVector;
use super::score::ScoreKind;
use crate::error::{Error, Result};

pub const KEYS: [&str; 7] = [
    "n_players",
    "k_factor",
    "link.kind",
    "link.c",
    "score.kind",
    "score.p_tie",
    "skills",
];

/// Parameters as they appear in a config file, before validation.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamConfig {
    pub n_players: usize,
    pub k_factor: f64,
    pub link_c: f64,
    pub score: ScoreSetting,
    /// Empty means all skills zero.
    pub skills: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScoreSetting {
    Binary,
    ThreePoint { p_tie: f64 },
}

impl Default for ParamConfig {
    fn default() -> Self {
        Self {
            n_players: 2,
            k_factor: 0.4,
            link_c: 0.5,
            score: ScoreSetting::Binary,
            skills: Vec::new(),
        }
    }
}

impl ParamConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ParamConfig::default();
        let mut seen: Vec<&str> = Vec::new();
        let mut score_kind: Option<String> = None;
        let mut p_tie: Option<f64> = None;
        let mut n_given = false;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let err = |message: String| Error::Config { line: line_no, message };
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let known = KEYS
                .iter()
                .find(|k| **k == key)
                .ok_or_else(|| err(format!("unknown key `{key}`")))?;
            if seen.contains(known) {
                return Err(err(format!("duplicate key `{key}`")));
            }
            seen.push(known);

            let real = |v: &str| -> Result<f64> {
                v.parse::<f64>()
                    .map_err(|_| err(format!("`{key}`: cannot parse `{v}` as a number")))
            };
            match key {
                "n_players" => {
                    cfg.n_players = value
                        .parse()
                        .map_err(|_| err(format!("`n_players`: cannot parse `{value}`")))?;
                    n_given = true;
                }
                "k_factor" => cfg.k_factor = real(value)?,
                "link.kind" => {
                    if value != "logistic" {
                        return Err(err(format!(
                            "link.kind `{value}` not supported in files (only `logistic`)"
                        )));
                    }
                }
                "link.c" => cfg.link_c = real(value)?,
                "score.kind" => score_kind = Some(value.to_string()),
                "score.p_tie" => p_tie = Some(real(value)?),
                "skills" => {
                    cfg.skills = value
                        .split(',')
                        .map(|v| real(v.trim()))
                        .collect::<Result<Vec<_>>>()?;
                }
                _ => unreachable!("key list and match arms agree"),
            }
        }

        cfg.score = match (score_kind.as_deref(), p_tie) {
            (None | Some("binary"), None) => ScoreSetting::Binary,
            (Some("three_point"), Some(p_tie)) => ScoreSetting::ThreePoint { p_tie },
            (Some("three_point"), None) => ScoreSetting::ThreePoint { p_tie: 0.0 },
            (None | Some("binary"), Some(_)) => {
                return Err(Error::Config {
                    line: 0,
                    message: "score.p_tie given for a binary score model".into(),
                })
            }
            (Some(other), _) => {
                return Err(Error::Config {
                    line: 0,
                    message: format!("unknown score.kind `{other}`"),
                })
            }
        };
        if !cfg.skills.is_empty() {
            if n_given && cfg.skills.len() != cfg.n_players {
                return Err(Error::Config {
                    line: 0,
                    message: format!(
                        "n_players = {} but {} skills given",
                        cfg.n_players,
                        cfg.skills.len()
                    ),
                });
            }
            cfg.n_players = cfg.skills.len();
        }
        Ok(cfg)
    }

    /// Renders the config in the file format; `parse(render(c)) == c`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "n_players = {}", self.n_players);
        let _ = writeln!(out, "k_factor = {}", self.k_factor);
        let _ = writeln!(out, "link.kind = logistic");
        let _ = writeln!(out, "link.c = {}", self.link_c);
        match self.score {
            ScoreSetting::Binary => {
                let _ = writeln!(out, "score.kind = binary");
            }
            ScoreSetting::ThreePoint { p_tie } => {
                let _ = writeln!(out, "score.kind = three_point");
                let _ = writeln!(out, "score.p_tie = {p_tie}");
            }
        }
        if !self.skills.is_empty() {
            let skills: Vec<String> = self.skills.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "skills = {}", skills.join(", "));
        }
        out
    }

    pub fn to_params(&self) -> Result<EloParams> {
        let skills = if self.skills.is_empty() {
            TrueSkillVector::zeros(self.n_players)?
        } else {
            TrueSkillVector::new(self.skills.clone())?
        };
        let kind = match self.score {
            ScoreSetting::Binary => ScoreKind::Binary,
            ScoreSetting::ThreePoint { p_tie } => ScoreKind::ThreePoint { p_tie },
        };
        EloParams::new(self.k_factor, LinkFunction::logistic(self.link_c)?, kind, skills)
    }
}

impl EloParams {
    /// Parses and validates a parameter file.
    pub fn from_config_str(text: &str) -> Result<Self> {
        ParamConfig::parse(text)?.to_params()
    }
}
