//! Pass/fail bookkeeping shared by the verification routines and the CLI.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub relation: Relation,
    pub passed: bool,
    pub note: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Close,
    AtLeast,
    AtMost,
    Flag,
}

impl Check {
    /// Passes when `|measured - expected| <= tolerance`.
    pub fn close(name: impl Into<String>, measured: f64, expected: f64, tolerance: f64) -> Self {
        let passed = (measured - expected).abs() <= tolerance;
        Self { name: name.into(), measured, expected, tolerance, relation: Relation::Close, passed, note: String::new() }
    }

    /// Passes when `measured >= bound`.
    pub fn at_least(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            expected: bound,
            tolerance: 0.0,
            relation: Relation::AtLeast,
            passed: measured >= bound,
            note: String::new(),
        }
    }

    /// Passes when `measured <= bound`.
    pub fn at_most(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            expected: bound,
            tolerance: 0.0,
            relation: Relation::AtMost,
            passed: measured <= bound,
            note: String::new(),
        }
    }

    pub fn flag(name: impl Into<String>, passed: bool, note: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            measured: if passed { 1.0 } else { 0.0 },
            expected: 1.0,
            tolerance: 0.0,
            relation: Relation::Flag,
            passed,
            note: note.into(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {}", self.name)?;
        match self.relation {
            Relation::Close => write!(
                f,
                ": {:.10e} vs {:.10e} (|diff| {:.2e}, tol {:.1e})",
                self.measured,
                self.expected,
                (self.measured - self.expected).abs(),
                self.tolerance
            )?,
            Relation::AtLeast => write!(f, ": {:.10e} >= {:.10e}", self.measured, self.expected)?,
            Relation::AtMost => write!(f, ": {:.10e} <= {:.10e}", self.measured, self.expected)?,
            Relation::Flag => {}
        }
        match (self.relation, self.note.is_empty()) {
            (_, true) => Ok(()),
            (Relation::Flag, false) => write!(f, ": {}", self.note),
            (_, false) => write!(f, " [{}]", self.note),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub title: String,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Self { title: title.into(), checks: Vec::new() }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "== {} ==", self.title)?;
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let n_fail = self.failures().count();
        write!(f, "{} checks, {} failed", self.checks.len(), n_fail)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_kinds() {
        assert!(Check::close("a", 1.0, 1.0 + 1e-9, 1e-8).passed);
        assert!(!Check::close("a", 1.0, 1.1, 1e-8).passed);
        assert!(Check::at_least("b", 2.0, 1.0).passed);
        assert!(!Check::at_most("c", 2.0, 1.0).passed);
        let mut r = Report::new("t");
        r.push(Check::flag("d", true, ""));
        assert!(r.passed());
        r.push(Check::flag("e", false, "broken"));
        assert!(!r.passed());
        assert!(r.to_string().contains("FAIL e: broken"));
    }
}
