//! Constructive reachability: finite sequences of forced wins and losses that
//! steer ratings into prescribed open intervals.

use std::fmt::Write as _;

use super::maps::Outcome;
use super::step::{apply_event, MatchEvent};
use crate::error::{Error, Result};
use crate::model::{EloParams, RatingVector};

/// Cap on preimage expansions in [`find_path_1d`].
pub const MAX_EXPANSIONS: u64 = 1_000_000;
/// Cap on forward steps while walking into an interval.
pub const MAX_WALK: u64 = 100_000_000;

/// Targets are shrunk by this relative margin so that bisection error in the
/// preimages cannot push the replayed endpoint onto the boundary.
const TARGET_MARGIN: f64 = 1e-9;

/// Forced outcomes for the two-player symmetric coordinate that take `u` into the
/// open interval `(a, b)`. Empty if `u` is already inside.
pub fn find_path_1d(u: f64, a: f64, b: f64, params: &EloParams) -> Result<Vec<Outcome>> {
    if !(a.is_finite() && b.is_finite() && u.is_finite()) || a >= b {
        return Err(Error::InvalidParameter(format!(
            "need finite u and a < b, got u = {u}, ({a}, {b})"
        )));
    }
    params.require_invertible_maps()?;
    if a < u && u < b {
        return Ok(Vec::new());
    }
    let two_k = 2.0 * params.k_factor();
    let margin = (0.25 * (b - a)).min(TARGET_MARGIN * (1.0 + a.abs().max(b.abs())));
    let (lo, hi) = (a + margin, b - margin);

    let path = if hi - lo >= two_k {
        walk_into(u, lo, hi, params)?
    } else {
        // Grow the target by preimages until it is wide enough to be hit by a walk.
        let (outer_lo, outer_hi) = (lo - two_k, hi + two_k);
        let mut interval = (lo, hi);
        let mut maps = Vec::new();
        while interval.1 - interval.0 < two_k {
            if maps.len() as u64 >= MAX_EXPANSIONS {
                return Err(Error::IterationCap {
                    stage: "preimage expansion",
                    cap: MAX_EXPANSIONS,
                });
            }
            let win = (
                Outcome::Win.invert(interval.0, params)?,
                Outcome::Win.invert(interval.1, params)?,
            );
            let loss = (
                Outcome::Loss.invert(interval.0, params)?,
                Outcome::Loss.invert(interval.1, params)?,
            );
            let fits = |p: (f64, f64)| p.0 >= outer_lo && p.1 <= outer_hi;
            // A win preimage lies below, a loss preimage above. When neither stays in
            // the band, steer back towards the target so the interval cannot escape.
            let (outcome, preimage) = if fits(win) {
                (Outcome::Win, win)
            } else if fits(loss) || interval.0 + interval.1 < lo + hi {
                (Outcome::Loss, loss)
            } else {
                (Outcome::Win, win)
            };
            maps.push(outcome);
            interval = preimage;
        }
        let mut path = walk_into(u, interval.0, interval.1, params)?;
        path.extend(maps.iter().rev());
        path
    };

    let end = replay_1d(u, &path, params);
    if !(a < end && end < b) {
        return Err(Error::Precondition(format!(
            "replayed path ends at {end}, outside ({a}, {b}); target too narrow for f64 resolution"
        )));
    }
    Ok(path)
}

/// Monotone walk with repeated wins (from below) or losses (from above). Needs an
/// interval at least `2K` wide: a single jump is strictly shorter than `2K`.
fn walk_into(u: f64, lo: f64, hi: f64, params: &EloParams) -> Result<Vec<Outcome>> {
    let mut v = u;
    let mut path = Vec::new();
    while !(lo < v && v < hi) {
        if path.len() as u64 >= MAX_WALK {
            return Err(Error::IterationCap {
                stage: "forward walk",
                cap: MAX_WALK,
            });
        }
        let outcome = if v <= lo { Outcome::Win } else { Outcome::Loss };
        v = outcome.apply(v, params);
        path.push(outcome);
    }
    Ok(path)
}

/// Applies the outcomes in order to the symmetric coordinate.
pub fn replay_1d(u: f64, path: &[Outcome], params: &EloParams) -> f64 {
    path.iter().fold(u, |v, o| o.apply(v, params))
}

/// A start state, open target intervals for players `1..N-1` and a sequence of
/// decisive matches that takes the start into the targets.
#[derive(Debug, Clone, PartialEq)]
pub struct PathPlan {
    pub start: RatingVector,
    pub targets: Vec<(f64, f64)>,
    pub events: Vec<MatchEvent>,
}

/// Builds a plan that puts every player except the last into its box, using the
/// last player as the opponent in every match.
///
/// Player `i` and the pivot keep their pairwise sum while they play each other, so
/// the one-dimensional construction applies to half their rating difference. Later
/// pivot games leave player `i` untouched.
pub fn find_path_nd(x: &RatingVector, boxes: &[(f64, f64)], params: &EloParams) -> Result<PathPlan> {
    let n = params.n_players();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x.len(),
        });
    }
    if boxes.len() != n - 1 {
        return Err(Error::DimensionMismatch {
            expected: n - 1,
            found: boxes.len(),
        });
    }
    params.require_invertible_maps()?;
    let pivot = n - 1;
    let mut state = x.as_slice().to_vec();
    let mut events = Vec::new();
    for (i, &(a, b)) in boxes.iter().enumerate() {
        let mid = 0.5 * (state[i] + state[pivot]);
        let u = state[i] - mid;
        for outcome in find_path_1d(u, a - mid, b - mid, params)? {
            let ev = MatchEvent {
                i,
                j: pivot,
                s: outcome.score(),
            };
            apply_event(&mut state, &ev, params);
            events.push(ev);
        }
    }
    let plan = PathPlan {
        start: x.clone(),
        targets: boxes.to_vec(),
        events,
    };
    let end = plan.replay(params)?;
    if !plan.contains(&end) {
        return Err(Error::Precondition(format!(
            "replayed plan ends at {:?}, outside the targets",
            end.as_slice()
        )));
    }
    Ok(plan)
}

impl PathPlan {
    /// Replays the events from the start with [`super::elo_step`] arithmetic.
    pub fn replay(&self, params: &EloParams) -> Result<RatingVector> {
        let n = params.n_players();
        if self.start.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.start.len(),
            });
        }
        let mut state = self.start.as_slice().to_vec();
        for ev in &self.events {
            if ev.i >= n || ev.j >= n || ev.i == ev.j {
                return Err(Error::IndexOutOfRange {
                    index: ev.i.max(ev.j),
                    n,
                });
            }
            apply_event(&mut state, ev, params);
        }
        Ok(RatingVector::from_raw(state))
    }

    /// Strict membership of every targeted coordinate in its open interval.
    pub fn contains(&self, x: &RatingVector) -> bool {
        self.targets
            .iter()
            .enumerate()
            .all(|(i, &(a, b))| a < x[i] && x[i] < b)
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Log-probability that the chain realises exactly these pairs and scores:
    /// each step contributes `ln(1/(N(N-1)))` for the pair and the log of the score
    /// atom. `None` if the score model has no atom at some required score.
    pub fn log_probability(&self, params: &EloParams) -> Option<f64> {
        let pair = -(params.ordered_pairs() as f64).ln();
        let mut total = 0.0;
        for ev in &self.events {
            let p = params.scores().extreme_probability(ev.i, ev.j, ev.s)?;
            if p <= 0.0 {
                return None;
            }
            total += pair + p.ln();
        }
        Some(total)
    }

    /// Line format: a `# start=… targets=a:b,…` header, then one `i j s` line per
    /// event with 1-based player indices and a signed score.
    pub fn to_text(&self) -> String {
        let start: Vec<String> = self.start.as_slice().iter().map(|v| v.to_string()).collect();
        let targets: Vec<String> = self.targets.iter().map(|(a, b)| format!("{a}:{b}")).collect();
        let mut out = format!("# start={} targets={}\n", start.join(","), targets.join(","));
        for ev in &self.events {
            let _ = writeln!(out, "{} {} {:+}", ev.i + 1, ev.j + 1, ev.s);
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let err = |line: usize, message: String| Error::PlanParse { line, message };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| err(1, "missing header".into()))?;
        let header = header
            .strip_prefix('#')
            .ok_or_else(|| err(1, "header must start with `#`".into()))?;
        let mut start = None;
        let mut targets = None;
        for field in header.split_whitespace() {
            if let Some(v) = field.strip_prefix("start=") {
                let values = v
                    .split(',')
                    .map(|s| s.parse::<f64>().map_err(|_| err(1, format!("bad start value `{s}`"))))
                    .collect::<Result<Vec<_>>>()?;
                start = Some(RatingVector::new(values).map_err(|e| err(1, e.to_string()))?);
            } else if let Some(v) = field.strip_prefix("targets=") {
                let parsed = v
                    .split(',')
                    .map(|pair| {
                        let (a, b) = pair
                            .split_once(':')
                            .ok_or_else(|| err(1, format!("bad target `{pair}`")))?;
                        let a = a.parse::<f64>().map_err(|_| err(1, format!("bad bound `{a}`")))?;
                        let b = b.parse::<f64>().map_err(|_| err(1, format!("bad bound `{b}`")))?;
                        Ok((a, b))
                    })
                    .collect::<Result<Vec<_>>>()?;
                targets = Some(parsed);
            }
        }
        let start = start.ok_or_else(|| err(1, "header lacks start=".into()))?;
        let targets = targets.ok_or_else(|| err(1, "header lacks targets=".into()))?;
        if targets.len() + 1 != start.len() {
            return Err(err(1, format!("{} targets for {} players", targets.len(), start.len())));
        }

        let mut events = Vec::new();
        for (idx, line) in lines {
            let line_no = idx + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(err(line_no, format!("expected `i j s`, got `{line}`")));
            }
            let index = |f: &str| -> Result<usize> {
                match f.parse::<usize>() {
                    Ok(v) if v >= 1 && v <= start.len() => Ok(v - 1),
                    _ => Err(err(line_no, format!("bad player index `{f}`"))),
                }
            };
            let (i, j) = (index(fields[0])?, index(fields[1])?);
            let s = fields[2]
                .parse::<f64>()
                .map_err(|_| err(line_no, format!("bad score `{}`", fields[2])))?;
            events.push(MatchEvent::new(i, j, s).map_err(|e| err(line_no, e.to_string()))?);
        }
        Ok(Self {
            start,
            targets,
            events,
        })
    }
}
