//! Check reports and the runner that fills them.

use std::collections::BTreeMap;
use std::fmt::{Display, Write as _};
use std::time::Instant;

use nearby_core::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub provenance: String,
    pub pass: bool,
    pub millis: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub command: String,
    pub params: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    pub pass: bool,
    /// Extra material (rendered pages, stalk tables); omitted when empty.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub artifacts: BTreeMap<String, Value>,
}

pub struct Outcome {
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

impl Outcome {
    pub fn eq<T: Display + PartialEq>(expected: T, actual: T) -> Self {
        Self {
            pass: expected == actual,
            expected: expected.to_string(),
            actual: actual.to_string(),
        }
    }

    pub fn holds(pass: bool) -> Self {
        Self::eq(true, pass)
    }
}

type Job = Box<dyn FnOnce() -> Result<Outcome> + Send>;

pub struct PendingCheck {
    pub name: String,
    pub provenance: String,
    job: Job,
}

impl PendingCheck {
    pub fn new(
        name: impl Into<String>,
        provenance: impl Into<String>,
        job: impl FnOnce() -> Result<Outcome> + Send + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            provenance: provenance.into(),
            job: Box::new(job),
        }
    }

    /// Internal errors become failed checks; anything else (bad input,
    /// scale refusal) aborts the run.
    fn run(self) -> Result<Check> {
        let start = Instant::now();
        let outcome = match (self.job)() {
            Ok(o) => o,
            Err(e) if e.is_internal() => Outcome {
                expected: "no internal error".into(),
                actual: format!("error: {e}"),
                pass: false,
            },
            Err(e) => return Err(e),
        };
        Ok(Check {
            name: self.name,
            expected: outcome.expected,
            actual: outcome.actual,
            provenance: self.provenance,
            pass: outcome.pass,
            millis: start.elapsed().as_millis() as u64,
        })
    }
}

/// Runs the checks in order, or on `jobs` threads; the report keeps the
/// submission order either way.
pub fn run_checks(
    command: &str,
    params: BTreeMap<String, Value>,
    pending: Vec<PendingCheck>,
    jobs: Option<usize>,
) -> Result<CheckReport> {
    let results: Vec<Result<Check>> = match jobs {
        Some(j) if j > 1 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j)
                .build()
                .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
            pool.install(|| pending.into_par_iter().map(PendingCheck::run).collect())
        }
        _ => pending.into_iter().map(PendingCheck::run).collect(),
    };
    let checks = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(CheckReport {
        command: command.to_string(),
        params,
        pass: checks.iter().all(|c| c.pass),
        checks,
        artifacts: BTreeMap::new(),
    })
}

impl CheckReport {
    /// Pretty JSON with object keys sorted.
    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("report serializes");
        serde_json::to_string_pretty(&v).expect("value serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "command",
            "name",
            "expected",
            "actual",
            "provenance",
            "pass",
            "millis",
        ])
        .expect("in-memory write");
        for c in &self.checks {
            w.write_record([
                self.command.as_str(),
                &c.name,
                &c.expected,
                &c.actual,
                &c.provenance,
                if c.pass { "true" } else { "false" },
                &c.millis.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let params: Vec<String> = self
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        let _ = writeln!(out, "{} {}", self.command, params.join(" "));
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{} {}: expected {}, got {} [{}] {}ms",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.expected,
                c.actual,
                c.provenance,
                c.millis
            );
        }
        for (name, v) in &self.artifacts {
            match v {
                Value::String(s) => {
                    let _ = writeln!(out, "\n{name}:\n{s}");
                }
                other => {
                    let _ = writeln!(out, "\n{name}: {other}");
                }
            }
        }
        let passed = self.checks.iter().filter(|c| c.pass).count();
        let _ = writeln!(
            out,
            "{}: {passed}/{} checks passed",
            if self.pass { "PASS" } else { "FAIL" },
            self.checks.len()
        );
        out
    }
}
