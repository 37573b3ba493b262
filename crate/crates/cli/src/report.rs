//! CSV tables and the plain-text summary of checks.

use std::fmt::Write as _;

pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn flag(b: bool) -> String {
    if b { "1" } else { "0" }.to_string()
}

/// Column used where a quantity does not apply.
pub const MISSING: &str = "nan";

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if self.header.is_empty() {
            return out;
        }
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// measured < limit
    Below,
    /// measured <= limit
    AtMost,
    /// measured > limit
    Above,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Self::Below => "<",
            Self::AtMost => "<=",
            Self::Above => ">",
        }
    }

    fn holds(self, measured: f64, limit: f64) -> bool {
        match self {
            Self::Below => measured < limit,
            Self::AtMost => measured <= limit,
            Self::Above => measured > limit,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Line {
    Check {
        name: String,
        measured: f64,
        relation: Relation,
        limit: f64,
        passed: bool,
    },
    Info {
        name: String,
        value: String,
    },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Summary {
    pub lines: Vec<Line>,
}

impl Summary {
    /// Records a check; NaN never passes.
    pub fn check(&mut self, name: impl Into<String>, measured: f64, relation: Relation, limit: f64) -> bool {
        let passed = relation.holds(measured, limit);
        self.lines.push(Line::Check {
            name: name.into(),
            measured,
            relation,
            limit,
            passed,
        });
        passed
    }

    pub fn info(&mut self, name: impl Into<String>, value: impl Into<String>) {
        self.lines.push(Line::Info {
            name: name.into(),
            value: value.into(),
        });
    }

    pub fn info_real(&mut self, name: impl Into<String>, value: f64) {
        self.info(name, real(value));
    }

    pub fn passed(&self) -> bool {
        self.lines
            .iter()
            .all(|l| !matches!(l, Line::Check { passed: false, .. }))
    }

    pub fn check_count(&self) -> usize {
        self.lines.iter().filter(|l| matches!(l, Line::Check { .. })).count()
    }

    /// Prefixes every line name, used to tag sweep runs.
    pub fn tagged(self, tag: &str) -> Self {
        let lines = self
            .lines
            .into_iter()
            .map(|l| match l {
                Line::Check { name, measured, relation, limit, passed } => Line::Check {
                    name: format!("[{tag}] {name}"),
                    measured,
                    relation,
                    limit,
                    passed,
                },
                Line::Info { name, value } => Line::Info {
                    name: format!("[{tag}] {name}"),
                    value,
                },
            })
            .collect();
        Self { lines }
    }

    pub fn extend(&mut self, other: Summary) {
        self.lines.extend(other.lines);
    }

    pub fn render(&self, scenario: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "scenario: {scenario}");
        for line in &self.lines {
            match line {
                Line::Check { name, measured, relation, limit, passed } => {
                    let status = if *passed { "PASS" } else { "FAIL" };
                    let _ = writeln!(out, "{status} {name}: measured {} {} {}", real(*measured), relation.symbol(), real(*limit));
                }
                Line::Info { name, value } => {
                    let _ = writeln!(out, "INFO {name}: {value}");
                }
            }
        }
        let failed = self
            .lines
            .iter()
            .filter(|l| matches!(l, Line::Check { passed: false, .. }))
            .count();
        let verdict = if failed == 0 { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "result: {verdict} ({} checks, {failed} failed)", self.check_count());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_precision_reals() {
        assert_eq!(real(0.1), "1.0000000000000001e-1");
        let x = 1.0 / 3.0;
        assert_eq!(real(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn nan_fails_checks() {
        let mut s = Summary::default();
        assert!(!s.check("x", f64::NAN, Relation::Below, 1.0));
        assert!(!s.passed());
        assert!(s.render("demo").contains("FAIL x"));
    }

    #[test]
    fn empty_table_is_empty_csv() {
        assert_eq!(Table::default().to_csv(), "");
        let mut t = Table::new(["a", "b"]);
        t.push(vec!["1".into(), "2".into()]);
        assert_eq!(t.to_csv(), "a,b\n1,2\n");
    }
}
