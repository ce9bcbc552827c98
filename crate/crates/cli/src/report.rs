use serde::Serialize;
use serde_json::Value;

use crate::config::Command;

/// One pass/fail item. Observational checks are reported but never change
/// the exit status.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub enforced: bool,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn enforced(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            enforced: true,
            pass,
            detail: detail.into(),
        }
    }

    pub fn observed(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            enforced: false,
            ..Self::enforced(name, pass, detail)
        }
    }
}

/// JSON report of one run. Wall time is not part of it so that identical
/// inputs give identical bytes.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: Command,
    pub version: &'static str,
    pub inputs: Value,
    pub results: Value,
    pub checks: Vec<Check>,
}

impl RunReport {
    pub fn new(command: Command, inputs: Value, results: Value, checks: Vec<Check>) -> Self {
        Self {
            command,
            version: env!("CARGO_PKG_VERSION"),
            inputs,
            results,
            checks,
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass || !c.enforced)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is serializable");
        s.push('\n');
        s
    }
}

/// Comma-separated table with a header line.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }
}

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}
