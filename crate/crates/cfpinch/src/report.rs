//! JSON reports.
//!
//! ```text
//! {
//!   "schema_version": 1,
//!   "command": "pinch",
//!   "seed": 7,
//!   "passed": true,
//!   "sections": [
//!     {
//!       "name": "derdzinski n=4",
//!       "checks": [
//!         { "name": "|P| / scale", "value": 3.1e-9, "relation": "<=", "tolerance": 1e-6, "passed": true }
//!       ],
//!       "info": { "P": -1.2e-7, "scale": 41.3 }
//!     }
//!   ]
//! }
//! ```
//!
//! `relation` is `<=`, `>=` or `==`. `info` holds measured values that are
//! reported but not asserted. Key order is fixed and reports carry no
//! timings, so equal inputs give byte-identical files.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "==")]
    Equal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: impl Into<String>, value: f64, relation: Relation, tolerance: f64) -> Self {
        let passed = match relation {
            Relation::AtMost => value <= tolerance,
            Relation::AtLeast => value >= tolerance,
            Relation::Equal => value == tolerance,
        };
        Check {
            name: name.into(),
            value,
            relation,
            tolerance,
            passed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub name: String,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub info: BTreeMap<String, serde_json::Value>,
}

impl Section {
    pub fn new(name: impl Into<String>) -> Self {
        Section {
            name: name.into(),
            checks: Vec::new(),
            info: BTreeMap::new(),
        }
    }

    pub fn at_most(&mut self, name: impl Into<String>, value: f64, tolerance: f64) -> &mut Self {
        self.checks.push(Check::new(name, value, Relation::AtMost, tolerance));
        self
    }

    pub fn at_least(&mut self, name: impl Into<String>, value: f64, bound: f64) -> &mut Self {
        self.checks.push(Check::new(name, value, Relation::AtLeast, bound));
        self
    }

    pub fn equal(&mut self, name: impl Into<String>, value: f64, target: f64) -> &mut Self {
        self.checks.push(Check::new(name, value, Relation::Equal, target));
        self
    }

    /// A computation that could not produce its value counts as failed.
    pub fn failure(&mut self, name: impl Into<String>, err: impl std::fmt::Display) -> &mut Self {
        let name = name.into();
        self.info.insert(format!("{name} error"), err.to_string().into());
        self.checks.push(Check {
            name,
            value: f64::NAN,
            relation: Relation::AtMost,
            tolerance: 0.0,
            passed: false,
        });
        self
    }

    pub fn info(&mut self, key: impl Into<String>, value: impl Into<serde_json::Value>) -> &mut Self {
        self.info.insert(key.into(), value.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub passed: bool,
    pub sections: Vec<Section>,
}

impl Report {
    pub fn new(command: &str, seed: Option<u64>, sections: Vec<Section>) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            seed,
            passed: sections.iter().all(Section::passed),
            sections,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn failures(&self) -> impl Iterator<Item = (&Section, &Check)> {
        self.sections
            .iter()
            .flat_map(|s| s.checks.iter().filter(|c| !c.passed).map(move |c| (s, c)))
    }

    /// One line per section.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for s in &self.sections {
            let failed = s.checks.iter().filter(|c| !c.passed).count();
            let verdict = if failed == 0 { "PASS" } else { "FAIL" };
            out.push_str(&format!("{verdict} {} ({} checks, {failed} failed)\n", s.name, s.checks.len()));
            for c in s.checks.iter().filter(|c| !c.passed) {
                out.push_str(&format!("  {}: {:e} not {} {:e}\n", c.name, c.value, rel(c.relation), c.tolerance));
            }
        }
        out.push_str(if self.passed { "all checks passed\n" } else { "some checks FAILED\n" });
        out
    }
}

fn rel(r: Relation) -> &'static str {
    match r {
        Relation::AtMost => "<=",
        Relation::AtLeast => ">=",
        Relation::Equal => "==",
    }
}
