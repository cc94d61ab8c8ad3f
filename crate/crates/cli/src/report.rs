//! Machine-readable run reports.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

pub const SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub value: f64,
    pub expected: String,
    /// Signed distance to the threshold; negative when the check fails.
    pub slack: f64,
}

impl Check {
    fn new(name: impl Into<String>, ok: bool, value: f64, expected: String, slack: f64) -> Self {
        let status = if ok { Status::Pass } else { Status::Fail };
        Check { name: name.into(), status, value, expected, slack }
    }

    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::new(name, value <= bound, value, format!("<= {bound:e}"), bound - value)
    }

    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::new(name, value >= bound, value, format!(">= {bound:e}"), value - bound)
    }

    pub fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        let slack = (value - lo).min(hi - value);
        Self::new(name, slack >= 0.0, value, format!("in [{lo:e}, {hi:e}]"), slack)
    }

    /// Exact comparison of values rendered as text; `value` is informational.
    pub fn exact(name: impl Into<String>, found: &str, expected: &str, value: f64) -> Self {
        let ok = found == expected;
        Self::new(name, ok, value, format!("== {expected}"), if ok { 0.0 } else { -1.0 })
    }

    pub fn flag(name: impl Into<String>, ok: bool, expected: &str) -> Self {
        Self::new(name, ok, f64::from(u8::from(ok)), expected.to_string(), if ok { 0.0 } else { -1.0 })
    }

    /// A check that could not be evaluated.
    pub fn error(name: impl Into<String>, message: impl std::fmt::Display) -> Self {
        Self::new(name, false, f64::NAN, format!("no error ({message})"), f64::NAN)
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: Vec<String>,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<String>,
    pub checks: Vec<Check>,
    pub runtime_seconds: f64,
}

impl Report {
    pub fn new(command: Vec<String>, seed: u64) -> Self {
        Report { schema: SCHEMA, command, seed, tolerances: BTreeMap::new(), result: None, checks: Vec::new(), runtime_seconds: 0.0 }
    }

    pub fn tolerance(&mut self, name: &str, value: f64) {
        self.tolerances.insert(name.to_string(), value);
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = Check>) {
        self.checks.extend(checks);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    /// Sorts checks by name so that output does not depend on evaluation order.
    pub fn finish(&mut self, runtime_seconds: f64) {
        self.checks.sort_by(|a, b| a.name.cmp(&b.name));
        self.runtime_seconds = runtime_seconds;
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn write_json(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_json() + "\n")
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = if c.passed() { "PASS" } else { "FAIL" };
            out.push_str(&format!("{tag} {} = {:e} (expected {})\n", c.name, c.value, c.expected));
        }
        let passed = self.checks.iter().filter(|c| c.passed()).count();
        out.push_str(&format!("{passed}/{} checks passed\n", self.checks.len()));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn helpers_set_status_and_slack() {
        assert!(Check::at_most("a", 1.0, 2.0).passed());
        assert_eq!(Check::at_most("a", 3.0, 2.0).slack, -1.0);
        assert!(Check::at_least("b", -1e-9, -1e-8).passed());
        assert!(!Check::within("c", 2.0, 0.0, 1.0).passed());
        assert!(Check::exact("d", "48", "48", 48.0).passed());
        assert!(!Check::error("e", "boom").passed());
    }

    #[test]
    fn checks_are_sorted_and_nan_serializes() {
        let mut r = Report::new(vec!["x".into()], 3);
        r.push(Check::flag("z", true, "true"));
        r.push(Check::error("a", "bad"));
        r.finish(0.5);
        assert_eq!(r.checks[0].name, "a");
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["schema"], 1);
        assert!(v["checks"][0]["value"].is_null());
        assert_eq!(v["checks"][1]["status"], "pass");
    }
}
