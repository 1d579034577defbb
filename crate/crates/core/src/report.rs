//! Report assembly and emission.
//!
//! A report is a canonical part (config echo, hypothesis checks, result
//! payload, histogram rows) plus a `meta` block holding wall-clock data.
//! Only the canonical part is compared when checking reproducibility.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::curvewin::{Histogram, HypothesisCheck, JointHistogram};
use crate::error::{Error, Result};
use crate::scalar::decimal6;
use crate::Rational;

pub const CSV_HEADER: [&str; 5] = ["a", "count", "phi_num", "phi_den", "phi_dec"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    #[default]
    Json,
}

/// One residue class (or joint cell) with `Φ = count / total` reduced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistRow {
    pub a: String,
    pub count: u64,
    pub phi_num: u64,
    pub phi_den: u64,
    pub phi_dec: String,
}

impl HistRow {
    fn new(a: String, count: u64, total: u64) -> Self {
        let (num, den) = if total == 0 {
            (0, 1)
        } else {
            let g = count.gcd(&total);
            (count / g, total / g)
        };
        Self {
            a,
            count,
            phi_num: num,
            phi_den: den,
            phi_dec: decimal6(&BigInt::from(num), &BigInt::from(den)),
        }
    }
}

pub fn histogram_rows(h: &Histogram) -> Vec<HistRow> {
    h.counts()
        .iter()
        .enumerate()
        .map(|(a, &c)| HistRow::new(a.to_string(), c, h.total()))
        .collect()
}

/// Every cell of `(Z/mZ)^k`, empty ones included, keyed `a1;a2;...`.
pub fn joint_rows(h: &JointHistogram) -> Vec<HistRow> {
    let m = h.m();
    let k = h.k() as u32;
    let cells = m.pow(k);
    (0..cells)
        .map(|mut code| {
            let mut a = vec![0u64; k as usize];
            for slot in a.iter_mut().rev() {
                *slot = code % m;
                code /= m;
            }
            let key = a.iter().map(u64::to_string).collect::<Vec<_>>().join(";");
            HistRow::new(key, h.count(&a), h.total())
        })
        .collect()
}

/// `{"num": "...", "den": "...", "dec": ...}` for an exact rational.
pub fn rational_value(r: &Rational) -> Value {
    serde_json::json!({
        "num": r.numer().to_string(),
        "den": r.denom().to_string(),
        "dec": crate::scalar::Scalar::to_f64(r),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub duration_ms: u64,
    pub threads: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub version: String,
    pub config: Value,
    pub checks: Vec<HypothesisCheck>,
    pub result: Value,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub histogram: Vec<HistRow>,
    pub meta: Meta,
}

impl Report {
    pub fn new(command: &str, config: Value) -> Self {
        Self {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config,
            checks: Vec::new(),
            result: Value::Null,
            histogram: Vec::new(),
            meta: Meta {
                duration_ms: 0,
                threads: 1,
            },
        }
    }

    /// The report without `meta`, keys sorted.
    pub fn canonical(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Value::Object(map) = &mut v {
            map.remove("meta");
        }
        v
    }

    pub fn canonical_string(&self) -> String {
        serde_json::to_string(&self.canonical()).expect("report serializes")
    }

    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("report serializes");
        let mut s = serde_json::to_string_pretty(&v).expect("report serializes");
        s.push('\n');
        s
    }

    /// The histogram table if there is one, else flattened `key,value` rows.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Internal(format!("csv: {e}"));
        if self.histogram.is_empty() {
            w.write_record(["key", "value"]).map_err(io)?;
            let mut rows = Vec::new();
            flatten("", &self.result, &mut rows);
            for check in &self.checks {
                rows.push((format!("check.{}", check.name), check.pass.to_string()));
            }
            for (k, v) in rows {
                w.write_record([k, v]).map_err(io)?;
            }
        } else {
            w.write_record(CSV_HEADER).map_err(io)?;
            for row in &self.histogram {
                w.write_record([
                    row.a.clone(),
                    row.count.to_string(),
                    row.phi_num.to_string(),
                    row.phi_den.to_string(),
                    row.phi_dec.clone(),
                ])
                .map_err(io)?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Internal(format!("csv: {e}")))?;
        String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => Ok(self.to_json()),
            Format::Csv => self.to_csv(),
        }
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                flatten(&key(k), x, out);
            }
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), x, out);
            }
        }
        Value::Null => {}
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

/// Writes the rendered report to `path`, or stdout when `path` is `None`.
pub fn emit(report: &Report, format: Format, path: Option<&Path>) -> Result<()> {
    let text = report.render(format)?;
    match path {
        Some(path) => {
            let mut f = File::create(path).map_err(|e| write_error(path, e))?;
            f.write_all(text.as_bytes()).map_err(|e| write_error(path, e))
        }
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::Internal(format!("stdout: {e}"))),
    }
}

fn write_error(path: &Path, e: io::Error) -> Error {
    Error::invalid("output", format!("cannot write {}: {e}", path.display()))
}
