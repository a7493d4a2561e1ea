//! Increments of Ψ near rationals and the modulus of continuity.

use num_integer::Integer;
use serde::Serialize;
use serde_json::json;

use super::{compare_le, decade, rational_near, ExperimentReport, Row, Verdict};
use crate::brjuno::phi_rational;
use crate::enclosure::Enclosure;
use crate::error::{Error, Result};
use crate::psi::psi_increment;
use crate::rational::Rational;

#[derive(Clone, Debug, Serialize)]
pub struct ResidualResult {
    pub residual: Enclosure,
    pub normalized: Enclosure,
}

/// `Ψ(r+h) - Ψ(r)` minus `(h/q) log(1/|h|) + (1/q - 2 log(q)/q + Φ(r)) h`,
/// also divided by `q h^2 log(1/(q^2 |h|))`.
pub fn rational_asymptotic_residual(
    r: &Rational,
    h: &Rational,
    tol: &Rational,
    prec: u32,
) -> Result<ResidualResult> {
    let q = Rational::from_integer(r.den().clone());
    let scale = &(&q * &q) * &h.abs();
    if h.is_zero() || scale >= Rational::new(2, 3).unwrap() {
        return Err(Error::Precondition(format!(
            "need 0 < q^2 |h| < 2/3, got q^2 |h| = {scale}"
        )));
    }
    let inc = psi_increment(r, h, tol, prec)?;
    let ln_q = Enclosure::ln_rational(&q, prec);
    let ln_inv_h = Enclosure::ln_rational(&h.abs().recip(), prec);
    let phi = phi_rational(r)?.evaluate(prec);
    let linear = (&phi
        - &ln_q
            .mul_rational(&Rational::from_integer(2))
            .div_rational(&q))
        .add_rational(&q.recip());
    let model = &ln_inv_h.mul_rational(&(h / &q)) + &linear.mul_rational(h);
    let residual = &inc - &model;
    let norm = Enclosure::ln_rational(&scale.recip(), prec).mul_rational(&(&q * &(h * h)));
    let normalized = residual.div(&norm);
    Ok(ResidualResult {
        residual,
        normalized,
    })
}

fn abs_bounds(e: &Enclosure) -> (f64, f64) {
    let (lo, hi) = (e.lo().to_f64(), e.hi().to_f64());
    if lo <= 0.0 && hi >= 0.0 {
        (0.0, lo.abs().max(hi.abs()))
    } else {
        (lo.abs().min(hi.abs()), lo.abs().max(hi.abs()))
    }
}

/// Normalized residuals at `h = ±10^-d`, `d_lo <= d <= d_hi`. For each decade
/// the fitted constant is the larger magnitude of the two signs; the stability
/// row bounds the ratio of the largest to the smallest fitted constant.
pub fn rational_residual_scan(
    rs: &[Rational],
    d_lo: u32,
    d_hi: u32,
    prec: u32,
) -> Result<ExperimentReport> {
    if rs.is_empty() || d_lo > d_hi {
        return Err(Error::Input(
            "need at least one rational and d_lo <= d_hi".into(),
        ));
    }
    let names: Vec<String> = rs.iter().map(|r| r.to_string()).collect();
    let mut report = ExperimentReport::new(
        "rational-asym",
        json!({ "r": names, "d_lo": d_lo, "d_hi": d_hi, "precision": prec }),
    );
    for r in rs {
        let label = format!("r={r}");
        let q = Rational::from_integer(r.den().clone()).to_f64();
        // per decade: bounds on C_d = max over both signs of |N|
        let mut fitted: Vec<(f64, f64)> = Vec::new();
        for d in d_lo..=d_hi {
            let (mut c_lo, mut c_hi, mut c_mid) = (0.0f64, 0.0f64, 0.0f64);
            for sign in [1i64, -1] {
                let h = &decade(d) * &Rational::from(sign);
                let hf = 10f64.powi(-(d as i32));
                let tol = rational_near(1e-6 * q * hf * hf * (1.0 / (q * q * hf)).ln());
                let res = rational_asymptotic_residual(r, &h, &tol, prec)?;
                let (a_lo, a_hi) = abs_bounds(&res.normalized);
                c_lo = c_lo.max(a_lo);
                c_hi = c_hi.max(a_hi);
                c_mid = c_mid.max(res.normalized.mid_f64().abs());
                report.rows.push(
                    Row::new(&label)
                        .index(sign * d as i64)
                        .h(&h)
                        .measured(res.normalized.mid_f64())
                        .bound(&res.normalized)
                        .certified(true),
                );
            }
            report.fit(&format!("C[{r}, 1e-{d}]"), c_mid);
            fitted.push((c_lo, c_hi));
        }
        let max_hi = fitted.iter().map(|c| c.1).fold(0.0, f64::max);
        let max_lo = fitted.iter().map(|c| c.0).fold(0.0, f64::max);
        let min_lo = fitted.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
        let min_hi = fitted.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
        let ratio_hi = if min_lo > 0.0 {
            max_hi / min_lo
        } else {
            f64::INFINITY
        };
        let ratio_lo = max_lo / min_hi;
        let verdict = if ratio_hi < 10.0 {
            Verdict::Holds
        } else if ratio_lo >= 10.0 {
            Verdict::Violated
        } else {
            Verdict::Undecided
        };
        report.fit(&format!("C[{r}]"), max_hi);
        report.fit(&format!("ratio[{r}]"), ratio_hi);
        report.rows.push(
            Row::new(format!("{label} stability"))
                .measured(ratio_hi)
                .bound(10)
                .certified(verdict != Verdict::Undecided)
                .pass(verdict == Verdict::Holds),
        );
    }
    Ok(report.finish())
}

/// Start points of the pairs `(x, x+h)` searched for the modulus of continuity:
/// both ends of [0,1] and three placements around every `p/q` with `q <= 20`.
fn candidate_starts(h: &Rational) -> Vec<Rational> {
    let one = Rational::one();
    let mut out = vec![Rational::zero(), &one - h];
    let half = h * &Rational::new(1, 2).unwrap();
    for q in 2u32..=20 {
        for p in 1..q {
            if p.gcd(&q) != 1 {
                continue;
            }
            let r = Rational::new(p, q).unwrap();
            for x in [r.clone(), &r - h, &r - &half] {
                if !x.is_negative() && &x + h <= one {
                    out.push(x);
                }
            }
        }
    }
    out
}

/// Certified sandwich `h log(1/h) + h <= Ψ(h) - Ψ(0) <= ω(h)` and
/// `Ψ(x+h) - Ψ(x) <= 10 h log(1/h)` on every sampled pair, with the empirical
/// supremum `ω̂(h)`. Increments are computed to `tol · h`.
pub fn omega_scan(h_grid: &[Rational], tol: &Rational, prec: u32) -> Result<ExperimentReport> {
    let cap = Rational::new(1353, 10000).unwrap();
    if h_grid.iter().any(|h| !h.is_positive() || *h > cap) {
        return Err(Error::Precondition(
            "grid values must lie in (0, e^-2]".into(),
        ));
    }
    let names: Vec<String> = h_grid.iter().map(|h| h.to_string()).collect();
    let mut report = ExperimentReport::new(
        "omega",
        json!({ "h": names, "tol": tol.to_string(), "precision": prec }),
    );
    let (mut ex_lo, mut ex_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for h in h_grid {
        let t = tol * h;
        let ln_inv = Enclosure::ln_rational(&h.recip(), prec);
        let main = ln_inv.mul_rational(h);
        let lower_model = main.add_rational(h);
        let upper = main.mul_rational(&Rational::from_integer(10));
        let at_zero = psi_increment(&Rational::zero(), h, &t, prec)?;
        let lower = compare_le(&lower_model, &at_zero);
        let mut best = (at_zero.mid_f64(), Rational::zero());
        let mut worst_upper = Verdict::Holds;
        for x in candidate_starts(h) {
            let inc = psi_increment(&x, h, &t, prec)?;
            match compare_le(&inc, &upper) {
                Verdict::Violated => worst_upper = Verdict::Violated,
                Verdict::Undecided if worst_upper == Verdict::Holds => {
                    worst_upper = Verdict::Undecided
                }
                _ => {}
            }
            if inc.mid_f64() > best.0 {
                best = (inc.mid_f64(), x);
            }
        }
        let both = if lower == Verdict::Violated || worst_upper == Verdict::Violated {
            Verdict::Violated
        } else if lower == Verdict::Holds && worst_upper == Verdict::Holds {
            Verdict::Holds
        } else {
            Verdict::Undecided
        };
        report.rows.push(
            Row::new("sandwich")
                .h(h)
                .measured(format!("{}", at_zero.lo().to_decimal(20, crate::Dir::Down)))
                .bound(format!(
                    "[{}, {}]",
                    lower_model.hi().to_decimal(20, crate::Dir::Up),
                    upper.lo().to_decimal(20, crate::Dir::Down)
                ))
                .certified(both != Verdict::Undecided)
                .pass(both == Verdict::Holds),
        );
        let hf = h.to_f64();
        let main_f = main.mid_f64();
        let excess = (best.0 - main_f) / hf;
        ex_lo = ex_lo.min(excess);
        ex_hi = ex_hi.max(excess);
        report.rows.push(
            Row::new("excess")
                .h(h)
                .measured(excess)
                .bound(format!("argmax x={}", best.1)),
        );
        report
            .rows
            .push(Row::new("ratio").h(h).measured(best.0 / main_f));
    }
    report.fit("excess_min", ex_lo);
    report.fit("excess_max", ex_hi);
    Ok(report.finish())
}
