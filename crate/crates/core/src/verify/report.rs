use std::fmt::{self, Write as _};

/// How an observed value is judged against its bound, with `tolerance` as slack.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Relation {
    /// `observed ≤ bound + tolerance`.
    AtMost(f64),
    /// `observed ≥ bound - tolerance`.
    AtLeast(f64),
    /// `observed > bound + tolerance`: a margin that must be cleared.
    Exceeds(f64),
    /// `observed < bound - tolerance`.
    Below(f64),
    /// `|observed - target| ≤ tolerance`.
    WithinBand(f64),
    /// `lo - tolerance ≤ observed ≤ hi + tolerance`.
    Between(f64, f64),
}

impl Relation {
    pub fn holds(&self, observed: f64, tolerance: f64) -> bool {
        if observed.is_nan() {
            return false;
        }
        match *self {
            Relation::AtMost(b) => observed <= b + tolerance,
            Relation::AtLeast(b) => observed >= b - tolerance,
            Relation::Exceeds(b) => observed > b + tolerance,
            Relation::Below(b) => observed < b - tolerance,
            Relation::WithinBand(t) => (observed - t).abs() <= tolerance,
            Relation::Between(lo, hi) => lo - tolerance <= observed && observed <= hi + tolerance,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relation::AtMost(b) => write!(f, "<={b}"),
            Relation::AtLeast(b) => write!(f, ">={b}"),
            Relation::Exceeds(b) => write!(f, ">{b}"),
            Relation::Below(b) => write!(f, "<{b}"),
            Relation::WithinBand(t) => write!(f, "~{t}"),
            Relation::Between(lo, hi) => write!(f, "[{lo}:{hi}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub label: String,
    pub observed: f64,
    pub relation: Relation,
    pub tolerance: f64,
}

impl Measurement {
    pub fn new(label: impl Into<String>, observed: f64, relation: Relation, tolerance: f64) -> Self {
        Self {
            label: label.into(),
            observed,
            relation,
            tolerance,
        }
    }

    pub fn holds(&self) -> bool {
        self.relation.holds(self.observed, self.tolerance)
    }
}

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: String,
    /// Parameter echo without commas.
    pub params: String,
    pub seed: u64,
    pub measurements: Vec<Measurement>,
    pub passed: bool,
    pub samples_used: u64,
    /// Hard failure that stopped the check, such as a coupling violation.
    pub error: Option<String>,
    /// Extra numbers worth reporting that carry no pass/fail relation.
    pub diagnostics: Vec<(String, f64)>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, params: impl Into<String>, seed: u64) -> Self {
        Self {
            name: name.into(),
            params: params.into(),
            seed,
            measurements: Vec::new(),
            passed: false,
            samples_used: 0,
            error: None,
            diagnostics: Vec::new(),
        }
    }

    pub fn measure(&mut self, m: Measurement) -> &mut Self {
        self.measurements.push(m);
        self
    }

    pub fn diagnostic(&mut self, label: impl Into<String>, value: f64) -> &mut Self {
        self.diagnostics.push((label.into(), value));
        self
    }

    pub fn fail_with(&mut self, error: impl fmt::Display) -> &mut Self {
        self.error = Some(error.to_string());
        self
    }

    /// The pass flag implied by the recorded fields.
    pub fn recompute_passed(&self) -> bool {
        self.error.is_none() && !self.measurements.is_empty() && self.measurements.iter().all(Measurement::holds)
    }

    /// Sets `passed` from the recorded fields and returns the report.
    pub fn finish(mut self) -> Self {
        self.passed = self.recompute_passed();
        self
    }

    /// One CSV row; multiple measurements are joined with `;`.
    pub fn csv_row(&self) -> String {
        let join = |f: &dyn Fn(&Measurement) -> String| {
            self.measurements.iter().map(f).collect::<Vec<_>>().join(";")
        };
        let observed = join(&|m| format!("{}={}", m.label, m.observed));
        let bound = join(&|m| m.relation.to_string());
        let tolerance = join(&|m| m.tolerance.to_string());
        let mut echo = format!("{} seed={}", self.params, self.seed);
        if let Some(e) = &self.error {
            let _ = write!(echo, " error={}", e.replace(',', ";"));
        }
        format!(
            "{},{},{},{},{},{},{}",
            self.name, echo, observed, bound, tolerance, self.passed, self.samples_used
        )
    }

    /// Multi-line human-readable summary.
    pub fn summary(&self) -> String {
        let mut out = format!(
            "{} {} ({} samples)\n",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.samples_used
        );
        for m in &self.measurements {
            let _ = writeln!(
                out,
                "    {} {} = {:.6} vs {} (tol {:.3e})",
                if m.holds() { "ok " } else { "BAD" },
                m.label,
                m.observed,
                m.relation,
                m.tolerance
            );
        }
        for (label, v) in &self.diagnostics {
            let _ = writeln!(out, "    .   {label} = {v:.6}");
        }
        if let Some(e) = &self.error {
            let _ = writeln!(out, "    error: {e}");
        }
        out
    }
}

pub const REPORT_HEADER: &str = "check,param_echo,observed,bound,tolerance,passed,samples";

/// Full report file: `#` comment lines, the column header, one row per check.
pub fn reports_to_csv(comments: &[String], reports: &[CheckReport]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    out.push_str(REPORT_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}
