//! Check outcomes and the documents that collect them.

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Passed because a premise never held; never counts as a failure.
    Vacuous,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn is_fail(self) -> bool {
        self == Verdict::Fail
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exhaustive,
    Randomized,
    /// Decided by a per-instance solver fact rather than enumeration.
    SolverAsserted,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Exhaustive => "exhaustive",
            Mode::Randomized => "randomized",
            Mode::SolverAsserted => "solver-asserted",
        })
    }
}

/// Outcome of one law, pullback, classification or independence check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    /// The mathematical statement being checked.
    pub property: String,
    pub verdict: Verdict,
    pub mode: Mode,
    /// Number of cases examined.
    pub trials: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, property: impl Into<String>, mode: Mode) -> Self {
        CheckReport {
            name: name.into(),
            property: property.into(),
            verdict: Verdict::Pass,
            mode,
            trials: 0,
            seed: None,
            witness: None,
            notes: Vec::new(),
            details: None,
        }
    }

    pub fn passed(&self) -> bool {
        !self.verdict.is_fail()
    }

    pub fn fail_with(&mut self, witness: Value) {
        self.verdict = Verdict::Fail;
        self.witness = Some(witness);
    }

    /// Adds the standard caveat to randomized passes.
    pub fn label_randomized(&mut self) {
        if self.mode == Mode::Randomized && self.verdict == Verdict::Pass {
            self.notes.push(format!("no counterexample found in {} trials", self.trials));
        }
    }
}

/// A run document: the configuration echo plus every check performed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool_version: String,
    pub config: Value,
    pub checks: Vec<CheckReport>,
    pub summary: Verdict,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(tool_version: impl Into<String>, config: Value, checks: Vec<CheckReport>) -> Self {
        let summary = summarize(&checks);
        Report { tool_version: tool_version.into(), config, checks, summary, warnings: Vec::new() }
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# gsmon report (v{})\n\n", self.tool_version));
        out.push_str(&format!("Summary: **{}**\n\n", verdict_str(self.summary)));
        for w in &self.warnings {
            out.push_str(&format!("> warning: {w}\n"));
        }
        if !self.warnings.is_empty() {
            out.push('\n');
        }
        out.push_str("| check | property | verdict | class | mode | trials | seed | witness |\n");
        out.push_str("|---|---|---|---|---|---|---|---|\n");
        for c in &self.checks {
            let witness = c.witness.as_ref().map(|w| w.to_string().replace('|', "\\|")).unwrap_or_default();
            out.push_str(&format!(
                "| {} | {} | {} | {} | {} | {} | {} | {} |\n",
                c.name,
                c.property,
                verdict_str(c.verdict),
                c.details.as_ref().and_then(|d| d.get("class")).and_then(Value::as_str).unwrap_or(""),
                c.mode,
                c.trials,
                c.seed.map(|s| s.to_string()).unwrap_or_default(),
                witness
            ));
        }
        out
    }
}

/// Fail iff some non-vacuous check failed.
pub fn summarize(checks: &[CheckReport]) -> Verdict {
    if checks.iter().any(|c| c.verdict.is_fail()) {
        Verdict::Fail
    } else {
        Verdict::Pass
    }
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::Vacuous => "vacuous-pass",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_ignores_vacuous() {
        let mut a = CheckReport::new("a", "p", Mode::Exhaustive);
        a.verdict = Verdict::Vacuous;
        let b = CheckReport::new("b", "q", Mode::Randomized);
        assert_eq!(Report::new("0", Value::Null, vec![a.clone(), b]).summary, Verdict::Pass);
        let mut c = CheckReport::new("c", "r", Mode::Exhaustive);
        c.fail_with(Value::from(1));
        assert_eq!(Report::new("0", Value::Null, vec![a, c]).summary, Verdict::Fail);
    }

    #[test]
    fn markdown_has_one_row_per_check() {
        let r = Report::new(
            "0.1.0",
            Value::Null,
            vec![CheckReport::new("x", "p", Mode::Exhaustive), CheckReport::new("y", "q", Mode::Exhaustive)],
        );
        let md = r.to_markdown();
        assert_eq!(md.lines().filter(|l| l.starts_with("| x") || l.starts_with("| y")).count(), 2);
    }
}
