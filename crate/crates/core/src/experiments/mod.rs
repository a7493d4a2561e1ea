//! Numerical experiments around Φ and Ψ, packaged as deterministic reports.
//!
//! Every row says whether it is certified (an enclosure comparison) or an
//! estimate. Only certified rows can count as violations.

mod asymptotic;
mod cremer;
mod inequalities;
mod lebesgue;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::enclosure::Enclosure;
use crate::error::{Error, Result};
use crate::rational::Rational;

pub use asymptotic::{
    omega_scan, rational_asymptotic_residual, rational_residual_scan, ResidualResult,
};
pub use cremer::{cremer_divergence_probe, GrowthRule};
pub use inequalities::inequality_suite;
pub use lebesgue::{
    lebesgue_average, lebesgue_scan, phi_sample, rational_quotient_scan, LebesgueEstimate, Sampling,
};

/// Outcome of one certified comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Undecided,
    Violated,
}

/// `a <= b` decided on enclosures.
pub fn compare_le(a: &Enclosure, b: &Enclosure) -> Verdict {
    if a.certainly_le(b) {
        Verdict::Holds
    } else if b.certainly_lt(a) {
        Verdict::Violated
    } else {
        Verdict::Undecided
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub label: String,
    pub index: Option<i64>,
    pub h: Option<Rational>,
    pub measured: String,
    pub bound: String,
    pub certified: bool,
    pub pass: bool,
}

impl Row {
    pub fn new(label: impl Into<String>) -> Row {
        Row {
            label: label.into(),
            index: None,
            h: None,
            measured: String::new(),
            bound: String::new(),
            certified: false,
            pass: true,
        }
    }

    pub fn index(mut self, i: i64) -> Row {
        self.index = Some(i);
        self
    }

    pub fn h(mut self, h: &Rational) -> Row {
        self.h = Some(h.clone());
        self
    }

    pub fn measured(mut self, m: impl ToString) -> Row {
        self.measured = m.to_string();
        self
    }

    pub fn bound(mut self, b: impl ToString) -> Row {
        self.bound = b.to_string();
        self
    }

    pub fn certified(mut self, c: bool) -> Row {
        self.certified = c;
        self
    }

    pub fn pass(mut self, p: bool) -> Row {
        self.pass = p;
        self
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Summary {
    pub violations: u64,
    pub fitted_constants: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub name: String,
    pub parameters: serde_json::Value,
    pub rows: Vec<Row>,
    pub summary: Summary,
}

pub const CSV_HEADER: [&str; 7] = [
    "label",
    "index",
    "h",
    "measured",
    "bound",
    "certified",
    "pass",
];

impl ExperimentReport {
    pub fn new(name: &str, parameters: serde_json::Value) -> ExperimentReport {
        ExperimentReport {
            name: name.into(),
            parameters,
            rows: Vec::new(),
            summary: Summary::default(),
        }
    }

    /// Sort rows canonically and recount violations from the rows.
    pub fn finish(mut self) -> ExperimentReport {
        self.rows
            .sort_by(|a, b| (&a.label, a.index, &a.h).cmp(&(&b.label, b.index, &b.h)));
        self.summary.violations =
            self.rows.iter().filter(|r| r.certified && !r.pass).count() as u64;
        self
    }

    pub fn fit(&mut self, key: &str, value: f64) {
        self.summary.fitted_constants.insert(key.into(), value);
    }

    /// True when no row failed, certified or not.
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory write");
        for r in &self.rows {
            let index = r.index.map(|i| i.to_string()).unwrap_or_default();
            let h = r.h.as_ref().map(|h| h.to_string()).unwrap_or_default();
            w.write_record([
                r.label.as_str(),
                &index,
                &h,
                &r.measured,
                &r.bound,
                if r.certified { "true" } else { "false" },
                if r.pass { "true" } else { "false" },
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Hex digest of the canonical parameter JSON.
    pub fn parameter_hash(&self) -> String {
        let canon = serde_json::to_string(&self.parameters).expect("parameters serialize");
        hex::encode(&Sha256::digest(canon.as_bytes())[..8])
    }

    /// `<experiment>-<seed>-<hash>.csv`
    pub fn file_name(&self, seed: u64) -> String {
        format!("{}-{}-{}.csv", self.name, seed, self.parameter_hash())
    }

    pub fn write_csv(&self, dir: &Path, seed: u64) -> Result<PathBuf> {
        let path = dir.join(self.file_name(seed));
        std::fs::write(&path, self.to_csv())
            .map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }
}

/// Rational `10^(-d)`.
pub fn decade(d: u32) -> Rational {
    Rational::from_big(1.into(), num_bigint::BigInt::from(10u32).pow(d))
}

/// A small positive rational close to `x`, for tolerances.
pub(crate) fn rational_near(x: f64) -> Rational {
    Rational::parse(&format!("{:.3e}", x)).expect("formatted float parses")
}
