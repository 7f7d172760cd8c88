//! Check reports: one row per verified identity, with a witness on failure
//! and a residual where floating point is involved.
//!
//! Reports are deterministic: checks are sorted by name before emission and
//! timings are kept out of the serialized form unless explicitly requested,
//! so identical inputs produce byte-identical output.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail { witness: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    #[serde(flatten)]
    pub status: CheckStatus,
    /// Max absolute residual for float checks; absent for exact checks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
}

impl Check {
    pub fn passed(&self) -> bool {
        matches!(self.status, CheckStatus::Pass)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub checks: Vec<Check>,
    /// Wall-clock time; set only when the caller asks for timings, so that
    /// serialized reports stay reproducible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn pass(&mut self, name: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            status: CheckStatus::Pass,
            residual: None,
        });
    }

    pub fn fail(&mut self, name: impl Into<String>, witness: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            status: CheckStatus::Fail {
                witness: witness.into(),
            },
            residual: None,
        });
    }

    /// Records `name` as pass/fail depending on `ok`; the witness is only
    /// evaluated on failure.
    pub fn check(&mut self, name: impl Into<String>, ok: bool, witness: impl FnOnce() -> String) {
        if ok {
            self.pass(name);
        } else {
            self.fail(name, witness());
        }
    }

    /// Float check: passes when `residual <= tol`.
    pub fn check_residual(&mut self, name: impl Into<String>, residual: f64, tol: f64) {
        let status = if residual.is_finite() && residual <= tol {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail {
                witness: format!("residual {residual:.3e} exceeds tolerance {tol:.1e}"),
            }
        };
        self.checks.push(Check {
            name: name.into(),
            status,
            residual: Some(residual),
        });
    }

    pub fn merge(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    /// Sorts checks by name; run this before emitting a report assembled
    /// from concurrent workers.
    pub fn normalize(&mut self) {
        self.checks.sort_by(|a, b| a.name.cmp(&b.name));
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    /// Plain-text table, one line per check.
    pub fn render_human(&self) -> String {
        let mut out = String::new();
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let res = c
                .residual
                .map(|r| format!("  residual={r:.3e}"))
                .unwrap_or_default();
            match &c.status {
                CheckStatus::Pass => {
                    out.push_str(&format!("PASS  {:width$}{res}\n", c.name, width = width));
                }
                CheckStatus::Fail { witness } => {
                    out.push_str(&format!(
                        "FAIL  {:width$}{res}  [{witness}]\n",
                        c.name,
                        width = width
                    ));
                }
            }
        }
        if let Some(ms) = self.elapsed_ms {
            out.push_str(&format!("elapsed: {ms} ms\n"));
        }
        out
    }
}
