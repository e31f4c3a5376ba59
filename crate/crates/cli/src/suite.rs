//! Check suites over a loaded input.

use std::str::FromStr;
use std::time::Instant;

use serde_json::{json, Value};

use crate::checks::{
    coaction_checks, fixed_point_checks, freeness_checks, index_checks, isotypic_checks, projectivity_checks,
    qg_checks, verdicts_json, Check,
};
use crate::input::Loaded;
use crate::report::{InputInfo, Report, Timings};
use crate::{CliError, Settings};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Axioms,
    Freeness,
    Projectivity,
    Index,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Axioms => "axioms",
            Suite::Freeness => "freeness",
            Suite::Projectivity => "projectivity",
            Suite::Index => "index",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "axioms" => Suite::Axioms,
            "freeness" => Suite::Freeness,
            "projectivity" => Suite::Projectivity,
            "index" => Suite::Index,
            "all" => Suite::All,
            _ => return Err(format!("unknown suite {s:?}; expected axioms, freeness, projectivity, index or all")),
        })
    }
}

struct Clock(Instant, Timings);

impl Clock {
    fn lap(&mut self, stage: &str) {
        let now = Instant::now();
        self.1 .0.insert(stage.into(), (now - self.0).as_secs_f64());
        self.0 = now;
    }
}

pub fn run_suite(l: &Loaded, suite: Suite, s: &Settings) -> Result<(Report, Timings), CliError> {
    let c = l.coaction()?;
    let mut clock = Clock(Instant::now(), Timings::default());
    let mut checks: Vec<Check> = Vec::new();
    let mut verdicts = Value::Null;
    let all = suite == Suite::All;
    if all || suite == Suite::Axioms {
        checks.extend(qg_checks(&l.group, s));
        checks.extend(coaction_checks(c, s));
        checks.extend(fixed_point_checks(c, s));
        checks.extend(isotypic_checks(c, None, s));
        clock.lap("axioms");
    }
    let mut free = l.expected_free;
    if all || suite != Suite::Axioms {
        let (fc, v) = freeness_checks(l, c, s);
        if let Some(v) = &v {
            verdicts = verdicts_json(v);
            free = Some(v.free);
        }
        if all || suite == Suite::Freeness {
            checks.extend(fc);
        }
        clock.lap("freeness");
    }
    if all || suite == Suite::Projectivity {
        checks.extend(projectivity_checks(c, free, None, s));
        clock.lap("projectivity");
    }
    if all || suite == Suite::Index {
        checks.extend(index_checks(c, free, None, s));
        clock.lap("index");
    }
    let input = InputInfo { source: l.source.clone(), digest: l.digest.clone() };
    let report = Report::new(suite.name(), input, *s, checks, if verdicts.is_null() { json!({}) } else { verdicts });
    Ok((report, clock.1))
}
