//! Partial Brjuno sums along streams with explosive quotients.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use serde_json::json;

use super::{ExperimentReport, Row};
use crate::brjuno::brjuno_terms_of_table;
use crate::cf::convergents_of_word;
use crate::enclosure::Enclosure;
use crate::error::{Error, Result};

/// How the next quotient is chosen from the current denominator.
#[derive(Clone, Debug)]
pub enum GrowthRule {
    /// `a_{k+1} = 2^min(q_k^exponent, cap_bits)`.
    PowerOfTwo { exponent: u32, cap_bits: u64 },
    /// The block repeated forever.
    Periodic(Vec<BigInt>),
}

impl GrowthRule {
    pub fn label(&self) -> String {
        match self {
            GrowthRule::PowerOfTwo { exponent, cap_bits } => {
                format!("2^(q^{exponent}) cap {cap_bits}")
            }
            GrowthRule::Periodic(b) => format!("periodic {}", crate::cf::word_to_string(b)),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            GrowthRule::Periodic(b) if b.is_empty() => {
                Err(Error::Input("empty growth rule".into()))
            }
            GrowthRule::Periodic(b) if b.iter().any(|a| !a.is_positive()) => {
                Err(Error::Input("quotients must be positive".into()))
            }
            GrowthRule::PowerOfTwo { cap_bits: 0, .. } => {
                Err(Error::Input("bit cap must be positive".into()))
            }
            _ => Ok(()),
        }
    }

    /// Next quotient and whether the cap was hit.
    fn next(&self, k: usize, q: &BigInt) -> (BigInt, bool) {
        match self {
            GrowthRule::Periodic(b) => (b[k % b.len()].clone(), false),
            GrowthRule::PowerOfTwo { exponent, cap_bits } => {
                let wanted = q.to_u64().and_then(|q| q.checked_pow(*exponent));
                match wanted {
                    Some(e) if e <= *cap_bits => (BigInt::one() << e, false),
                    _ => (BigInt::one() << *cap_bits, true),
                }
            }
        }
    }
}

fn probe_rows(rule: &GrowthRule, k_max: usize, prec: u32, report: &mut ExperimentReport) {
    let label = rule.label();
    let mut t = convergents_of_word(&[]).expect("empty word is valid");
    let mut capped = Vec::new();
    for k in 0..k_max {
        let (a, hit) = rule.next(k, t.q(k as isize));
        capped.push(hit);
        t.push(a);
    }
    let terms = brjuno_terms_of_table(&t, prec);
    let mut sum = Enclosure::zero(prec);
    let mut first_above = -1i64;
    for (k, term) in terms.iter().enumerate() {
        sum = &sum + term;
        if first_above < 0 && sum.lo().to_f64() > 10.0 {
            first_above = k as i64;
        }
        let bits = t.a(k + 1).bits();
        let note = if capped[k] {
            format!("a has {bits} bits, capped")
        } else {
            format!("a has {bits} bits")
        };
        report.rows.push(
            Row::new(&label)
                .index(k as i64)
                .measured(&sum)
                .bound(note)
                .certified(false),
        );
    }
    report.fit(&format!("partial_sum[{label}]"), sum.mid_f64());
    report.fit(&format!("first_above_10[{label}]"), first_above as f64);
}

/// Partial sums `Σ_{k<=K} log(q_{k+1})/q_k` for `K < k_max` under `rule`, with
/// the golden stream as a contrast.
pub fn cremer_divergence_probe(
    rule: &GrowthRule,
    k_max: usize,
    prec: u32,
) -> Result<ExperimentReport> {
    rule.validate()?;
    if k_max == 0 {
        return Err(Error::Input("k_max must be positive".into()));
    }
    let mut report = ExperimentReport::new(
        "cremer",
        json!({ "rule": rule.label(), "k_max": k_max, "precision": prec }),
    );
    probe_rows(rule, k_max, prec, &mut report);
    let golden = GrowthRule::Periodic(vec![BigInt::one()]);
    if rule.label() != golden.label() {
        probe_rows(&golden, k_max, prec, &mut report);
    }
    Ok(report.finish())
}
