//! The machine-readable report. It holds no wall-clock data, so two runs
//! with the same input and settings give byte-identical output.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::checks::Check;
use crate::Settings;

#[derive(Debug, Serialize)]
pub struct InputInfo {
    pub source: String,
    pub digest: String,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub suite: String,
    pub input: InputInfo,
    pub settings: Settings,
    pub checks: Vec<Check>,
    pub verdicts: Value,
    pub pass: bool,
}

impl Report {
    pub fn new(suite: &str, input: InputInfo, settings: Settings, checks: Vec<Check>, verdicts: Value) -> Report {
        let pass = checks.iter().all(|c| c.pass);
        Report { tool: "qact", version: env!("CARGO_PKG_VERSION"), suite: suite.into(), input, settings, checks, verdicts, pass }
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One line per check, for the terminal.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let mark = if c.detail.get("skipped").is_some() {
                "SKIP"
            } else if c.pass {
                "ok"
            } else {
                "FAIL"
            };
            match c.residual {
                Some(r) => out.push_str(&format!("{mark:>4}  {:<36} {r:.3e}\n", c.name)),
                None => out.push_str(&format!("{mark:>4}  {}\n", c.name)),
            }
        }
        let failed = self.checks.iter().filter(|c| !c.pass).count();
        out.push_str(&format!("{} checks, {} failed: {}\n", self.checks.len(), failed, if self.pass { "PASS" } else { "FAIL" }));
        out
    }
}

/// Seconds per suite stage; written separately from the report.
#[derive(Debug, Default, Serialize)]
pub struct Timings(pub BTreeMap<String, f64>);
