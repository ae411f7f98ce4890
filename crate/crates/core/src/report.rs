//! CSV and JSON rendering for bound records, violation reports and the
//! smaller row types the command line emits.
//!
//! Finite floats are written with 17 significant digits in exponent form
//! (`1.2500000000000000e+0`), which round-trips every `f64` and matches
//! what JSON numbers print as. Non-finite values become `inf`, `-inf` or
//! `NaN` in CSV and `null` in JSON.

use std::str::FromStr;

use serde::{Deserialize, Serialize, Serializer};
use serde_json::{Number, Value};

use crate::bounds::{BoundRecord, Verdict};
use crate::lemma_verify::ViolationReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

pub const BOUND_HEADER: &str = "func,n,alpha,x,lhs,rhs,margin,hyp_pow,hyp_j,hyp_n,verdict";
pub const SUMMARY_HEADER: &str = "check,total,violations,max_slack";
pub const DETAIL_HEADER: &str = "check,case,lhs,rhs,slack";

pub fn fmt_float(v: f64) -> String {
    if v.is_finite() {
        let s = format!("{v:.16e}");
        match s.split_once('e') {
            Some((m, e)) if !e.starts_with('-') => format!("{m}e+{e}"),
            _ => s,
        }
    } else if v.is_nan() {
        "NaN".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn json_float(v: f64) -> Value {
    if v.is_finite() {
        Value::Number(Number::from_str(&fmt_float(v)).expect("formatted float is a JSON number"))
    } else {
        Value::Null
    }
}

fn ser_float<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    json_float(*v).serialize(s)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Flat form of a [`BoundRecord`], one CSV row or JSON object.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub func: String,
    pub n: u64,
    pub alpha: u32,
    #[serde(serialize_with = "ser_float")]
    pub x: f64,
    #[serde(serialize_with = "ser_float")]
    pub lhs: f64,
    #[serde(serialize_with = "ser_float")]
    pub rhs: f64,
    #[serde(serialize_with = "ser_float")]
    pub margin: f64,
    pub hyp_pow: bool,
    pub hyp_j: bool,
    pub hyp_n: bool,
    pub verdict: Verdict,
}

impl From<&BoundRecord> for BoundRow {
    fn from(r: &BoundRecord) -> Self {
        BoundRow {
            func: r.func_id.clone(),
            n: r.params.n,
            alpha: r.params.alpha,
            x: r.params.x,
            lhs: r.lhs,
            rhs: r.rhs,
            margin: r.margin,
            hyp_pow: r.hyp.pow_cond,
            hyp_j: r.hyp.j_cond,
            hyp_n: r.hyp.n_cond,
            verdict: r.verdict,
        }
    }
}

impl BoundRow {
    fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            csv_field(&self.func),
            self.n,
            self.alpha,
            fmt_float(self.x),
            fmt_float(self.lhs),
            fmt_float(self.rhs),
            fmt_float(self.margin),
            self.hyp_pow,
            self.hyp_j,
            self.hyp_n,
            self.verdict.as_str()
        )
    }
}

pub fn render_bounds(records: &[BoundRecord], format: Format) -> String {
    let rows: Vec<BoundRow> = records.iter().map(BoundRow::from).collect();
    match format {
        Format::Csv => {
            let mut out = String::from(BOUND_HEADER);
            out.push('\n');
            for r in &rows {
                out.push_str(&r.csv());
                out.push('\n');
            }
            out
        }
        Format::Json => to_json(&rows),
    }
}

#[derive(Serialize)]
struct DetailRow<'a> {
    case: String,
    #[serde(serialize_with = "ser_float")]
    lhs: f64,
    #[serde(serialize_with = "ser_float")]
    rhs: f64,
    #[serde(serialize_with = "ser_float")]
    slack: f64,
    #[serde(skip)]
    check: &'a str,
}

#[derive(Serialize)]
struct SummaryRow<'a> {
    check: &'a str,
    total: u64,
    violations: usize,
    #[serde(serialize_with = "ser_float")]
    max_slack: f64,
    #[serde(serialize_with = "ser_float")]
    tolerance: f64,
    details: Vec<DetailRow<'a>>,
}

/// Summary rows, a blank line, then one detail row per violation.
pub fn render_reports(reports: &[ViolationReport], format: Format) -> String {
    let rows: Vec<SummaryRow> = reports
        .iter()
        .map(|r| SummaryRow {
            check: &r.check_id,
            total: r.total_cases,
            violations: r.violations.len(),
            max_slack: r.max_slack,
            tolerance: r.tolerance,
            details: r
                .violations
                .iter()
                .map(|v| DetailRow {
                    case: v.case.to_string(),
                    lhs: v.lhs,
                    rhs: v.rhs,
                    slack: v.slack,
                    check: &r.check_id,
                })
                .collect(),
        })
        .collect();
    match format {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let mut out = format!("{SUMMARY_HEADER}\n");
            for r in &rows {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    csv_field(r.check),
                    r.total,
                    r.violations,
                    fmt_float(r.max_slack)
                ));
            }
            out.push('\n');
            out.push_str(DETAIL_HEADER);
            out.push('\n');
            for d in rows.iter().flat_map(|r| &r.details) {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    csv_field(d.check),
                    csv_field(&d.case),
                    fmt_float(d.lhs),
                    fmt_float(d.rhs),
                    fmt_float(d.slack)
                ));
            }
            out
        }
    }
}

/// A generic table: named columns, each cell already a JSON value.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

/// Cell helpers for [`Table`].
pub fn cell_f(v: f64) -> Value {
    json_float(v)
}

pub fn cell_opt_f(v: Option<f64>) -> Value {
    v.map_or(Value::Null, json_float)
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut out = self.columns.join(",");
                out.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row
                        .iter()
                        .map(|v| match v {
                            Value::Null => String::new(),
                            Value::String(s) => csv_field(s),
                            other => other.to_string(),
                        })
                        .collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Json => {
                let objs: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        Value::Object(
                            self.columns
                                .iter()
                                .map(|c| c.to_string())
                                .zip(row.iter().cloned())
                                .collect(),
                        )
                    })
                    .collect();
                to_json(&objs)
            }
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("rows serialize");
    s.push('\n');
    s
}
