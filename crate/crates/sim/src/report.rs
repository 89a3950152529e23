//! Experiment reports and their table, CSV and JSON renderings.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::Format;

pub const SIGNIFICANT_DIGITS: usize = 10;

/// One branch of a record foliation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub branch: String,
    #[serde(serialize_with = "ser_rounded")]
    pub measure: f64,
    #[serde(serialize_with = "ser_rounded")]
    pub expected: f64,
    #[serde(serialize_with = "ser_rounded")]
    pub residual: f64,
}

impl Row {
    pub fn new(branch: impl Into<String>, measure: f64, expected: f64) -> Self {
        Self {
            branch: branch.into(),
            measure,
            expected,
            residual: (measure - expected).abs(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    /// Passes when the value is below the bound.
    Below,
    /// Passes when the value is above the bound.
    Above,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    #[serde(serialize_with = "ser_rounded")]
    pub value: f64,
    pub bound: Bound,
    #[serde(serialize_with = "ser_rounded")]
    pub limit: f64,
    pub passed: bool,
}

impl Check {
    /// A residual that must stay below `limit`.
    pub fn below(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            bound: Bound::Below,
            limit,
            passed: value < limit,
        }
    }

    /// A quantity that must exceed `limit`.
    pub fn above(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            bound: Bound::Above,
            limit,
            passed: value > limit,
        }
    }
}

/// A named number reported alongside the checks. `None` marks an
/// undefined quantity, such as a conditional on an empty branch.
#[derive(Clone, Debug, PartialEq)]
pub struct Metric {
    pub name: String,
    pub value: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Section {
    pub experiment: String,
    pub rows: Vec<Row>,
    pub checks: Vec<Check>,
    pub metrics: Vec<Metric>,
}

impl Section {
    pub fn new(experiment: impl Into<String>) -> Self {
        Self {
            experiment: experiment.into(),
            rows: Vec::new(),
            checks: Vec::new(),
            metrics: Vec::new(),
        }
    }

    pub fn metric(&mut self, name: impl Into<String>, value: impl Into<Option<f64>>) {
        self.metrics.push(Metric {
            name: name.into(),
            value: value.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("experiment".into(), Value::from(self.experiment.clone()));
        obj.insert("passed".into(), Value::from(self.passed()));
        obj.insert(
            "rows".into(),
            serde_json::to_value(&self.rows).expect("rows serialize"),
        );
        obj.insert(
            "checks".into(),
            serde_json::to_value(&self.checks).expect("checks serialize"),
        );
        for m in &self.metrics {
            obj.insert(m.name.clone(), m.value.map_or(Value::Null, json_number));
        }
        Value::Object(obj)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub tolerance: f64,
    pub sections: Vec<Section>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.sections.iter().all(Section::passed)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Table => self.to_table(),
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    /// A single section is written flat; several sections prefix each
    /// branch with the experiment name.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["branch", "measure", "expected", "residual"])
            .expect("write to memory");
        let prefix = self.sections.len() > 1;
        for section in &self.sections {
            for row in &section.rows {
                let branch = if prefix {
                    format!("{}/{}", section.experiment, row.branch)
                } else {
                    row.branch.clone()
                };
                w.write_record([
                    branch,
                    fmt_num(row.measure),
                    fmt_num(row.expected),
                    fmt_num(row.residual),
                ])
                .expect("write to memory");
            }
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv is utf-8")
    }

    /// A single section is the top-level object; several are nested under
    /// `sections`.
    pub fn to_json(&self) -> String {
        let value = match self.sections.as_slice() {
            [only] => {
                let mut v = only.to_json();
                v.as_object_mut()
                    .expect("object")
                    .insert("tolerance".into(), json_number(self.tolerance));
                v
            }
            sections => {
                let mut obj = Map::new();
                obj.insert("experiment".into(), Value::from("all"));
                obj.insert("passed".into(), Value::from(self.passed()));
                obj.insert("tolerance".into(), json_number(self.tolerance));
                obj.insert(
                    "sections".into(),
                    Value::Array(sections.iter().map(Section::to_json).collect()),
                );
                Value::Object(obj)
            }
        };
        let mut out = serde_json::to_string_pretty(&value).expect("json serialize");
        out.push('\n');
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        for section in &self.sections {
            let _ = writeln!(out, "== {} ==", section.experiment);
            if !section.rows.is_empty() {
                let _ = writeln!(
                    out,
                    "{:<10} {:>18} {:>18} {:>18}",
                    "branch", "measure", "expected", "residual"
                );
                for r in &section.rows {
                    let _ = writeln!(
                        out,
                        "{:<10} {:>18} {:>18} {:>18}",
                        r.branch,
                        fmt_num(r.measure),
                        fmt_num(r.expected),
                        fmt_num(r.residual)
                    );
                }
            }
            for m in &section.metrics {
                let value = m.value.map_or_else(|| "undefined".to_string(), fmt_num);
                let _ = writeln!(out, "  {:<32} {value}", m.name);
            }
            for c in &section.checks {
                let op = match c.bound {
                    Bound::Below => "<",
                    Bound::Above => ">",
                };
                let verdict = if c.passed { "PASS" } else { "FAIL" };
                let _ = writeln!(
                    out,
                    "  {verdict} {:<27} {} {op} {}",
                    c.name,
                    fmt_num(c.value),
                    fmt_num(c.limit)
                );
            }
            out.push('\n');
        }
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{verdict} at tolerance {}", fmt_num(self.tolerance));
        out
    }
}

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

/// Shortest text of the rounded value; exponent form outside `[1e-4, 1e10)`.
pub fn fmt_num(x: f64) -> String {
    let r = round_sig(x);
    if r == 0.0 {
        return "0".into();
    }
    let a = r.abs();
    if (1e-4..1e10).contains(&a) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

fn json_number(x: f64) -> Value {
    serde_json::Number::from_f64(round_sig(x)).map_or(Value::Null, Value::Number)
}

fn ser_rounded<S: serde::Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round_sig(*x))
}
