//! Rendering of records and reports.

use brjuno::experiments::{ExperimentReport, CSV_HEADER};
use serde_json::Value;

use crate::Format;

/// Flattened `(key, value)` pairs in key order, nested keys joined by dots.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, x, out);
            }
        }
        Value::String(s) => out.push((prefix.into(), s.clone())),
        other => out.push((prefix.into(), other.to_string())),
    }
}

fn csv_line(fields: &[&str]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(fields).expect("in-memory write");
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

pub fn record(v: &Value, format: Format) -> String {
    let mut pairs = Vec::new();
    flatten("", v, &mut pairs);
    match format {
        Format::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(v).expect("value serializes")
        ),
        Format::Csv => {
            let keys: Vec<&str> = pairs.iter().map(|p| p.0.as_str()).collect();
            let vals: Vec<&str> = pairs.iter().map(|p| p.1.as_str()).collect();
            csv_line(&keys) + &csv_line(&vals)
        }
        Format::Table => {
            let width = pairs.iter().map(|p| p.0.len()).max().unwrap_or(0);
            pairs
                .iter()
                .map(|(k, v)| format!("{k:<width$}  {v}\n"))
                .collect()
        }
    }
}

pub fn report(r: &ExperimentReport, format: Format) -> String {
    match format {
        Format::Json => format!("{}\n", r.to_json()),
        Format::Csv => r.to_csv(),
        Format::Table => {
            let cells: Vec<[String; 7]> = r
                .rows
                .iter()
                .map(|x| {
                    [
                        x.label.clone(),
                        x.index.map(|i| i.to_string()).unwrap_or_default(),
                        x.h.as_ref().map(|h| h.to_string()).unwrap_or_default(),
                        x.measured.clone(),
                        x.bound.clone(),
                        if x.certified { "yes" } else { "no" }.into(),
                        if x.pass { "ok" } else { "FAIL" }.into(),
                    ]
                })
                .collect();
            let mut widths = CSV_HEADER.map(str::len);
            for c in &cells {
                for (w, s) in widths.iter_mut().zip(c) {
                    *w = (*w).max(s.chars().count());
                }
            }
            let line = |c: &[String]| -> String {
                let mut s: String = c
                    .iter()
                    .zip(&widths)
                    .map(|(x, w)| format!("{x:<w$}  ", w = *w))
                    .collect::<String>();
                s.truncate(s.trim_end().len());
                s + "\n"
            };
            let mut out = format!("{}\n", r.name);
            out += &line(&CSV_HEADER.map(String::from));
            for c in &cells {
                out += &line(c);
            }
            out += &format!("violations  {}\n", r.summary.violations);
            for (k, v) in &r.summary.fitted_constants {
                out += &format!("{k}  {v}\n");
            }
            out
        }
    }
}
