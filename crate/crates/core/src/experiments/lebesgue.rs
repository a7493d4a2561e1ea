//! Local averages of |Φ - Φ(x)| and one-sided difference quotients of Ψ.

use num_bigint::BigInt;
use rand::Rng;
use serde::Serialize;
use serde_json::json;

use super::{decade, rational_near, ExperimentReport, Row};
use crate::brjuno::{phi_rational, phi_stream};
use crate::cf::{alpha_enclosure, QuotientSpec};
use crate::error::{Error, Result};
use crate::psi::psi_increment;
use crate::rational::Rational;
use crate::sample;

/// Stratified sampling: one jittered point per stratum.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Sampling {
    pub samples: usize,
    pub seed: u64,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling {
            samples: 1 << 14,
            seed: 0,
        }
    }
}

/// Non-certified estimate with a noise level of about three standard errors.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LebesgueEstimate {
    pub estimate: f64,
    pub noise: f64,
    pub samples: usize,
    pub certified: bool,
}

/// Φ at a double, by the Gauss map until `beta` drops below `1e-17`.
pub fn phi_sample(x: f64) -> f64 {
    let (mut a, mut beta, mut s) = (x, 1.0f64, 0.0f64);
    for _ in 0..400 {
        if a <= 0.0 || beta < 1e-17 {
            break;
        }
        s += beta * (1.0 / a).ln();
        beta *= a;
        a = (1.0 / a).fract();
    }
    s
}

fn point_and_value(spec: &QuotientSpec, prec: u32) -> Result<(f64, f64)> {
    if let Some(r) = spec.rational_value() {
        return Ok((r.to_f64(), phi_rational(r)?.evaluate(prec).mid_f64()));
    }
    let x = alpha_enclosure(spec, 0, prec)?.mid_f64();
    let phi = phi_stream(spec, &Rational::parse("1e-15").unwrap(), prec)?;
    Ok((x, phi.value.mid_f64()))
}

/// `(1/h) ∫_{x-h/2}^{x+h/2} |Φ(t) - Φ(x)| dt`, sampled in double precision.
pub fn lebesgue_average(
    spec: &QuotientSpec,
    h: &Rational,
    sampling: &Sampling,
    prec: u32,
) -> Result<LebesgueEstimate> {
    if !h.is_positive() {
        return Err(Error::Precondition("window width must be positive".into()));
    }
    if sampling.samples < 2 {
        return Err(Error::Input("at least two samples are needed".into()));
    }
    let (x, phi_x) = point_and_value(spec, prec)?;
    let hf = h.to_f64();
    if x - hf / 2.0 <= 0.0 || x + hf / 2.0 >= 1.0 {
        return Err(Error::Precondition(format!(
            "window of width {h} around {x} leaves (0,1)"
        )));
    }
    let n = sampling.samples & !1;
    let mut rng = sample::rng(sampling.seed);
    let values: Vec<f64> = (0..n)
        .map(|i| {
            let s = (i as f64 + rng.gen::<f64>()) / n as f64;
            (phi_sample(x + hf * (s - 0.5)) - phi_x).abs()
        })
        .collect();
    let estimate = values.iter().sum::<f64>() / n as f64;
    let spread: f64 = values.chunks(2).map(|p| (p[0] - p[1]).powi(2)).sum();
    let noise = 3.0 * spread.sqrt() / n as f64;
    Ok(LebesgueEstimate {
        estimate,
        noise,
        samples: n,
        certified: false,
    })
}

/// Averages along `h = 2^-j` for `j` in `j_lo..=j_hi`.
pub fn lebesgue_scan(
    spec: &QuotientSpec,
    j_lo: u32,
    j_hi: u32,
    sampling: &Sampling,
    prec: u32,
) -> Result<ExperimentReport> {
    if j_lo >= j_hi {
        return Err(Error::Input("need j_lo < j_hi".into()));
    }
    let mut report = ExperimentReport::new(
        "lebesgue",
        json!({ "point": spec.label(), "j_lo": j_lo, "j_hi": j_hi, "samples": sampling.samples, "seed": sampling.seed }),
    );
    let label = spec.label();
    let mut prev: Option<LebesgueEstimate> = None;
    let mut first = None;
    let mut fit = Vec::new();
    for j in j_lo..=j_hi {
        let h = Rational::from_big(BigInt::from(1), BigInt::from(1) << j);
        let est = lebesgue_average(spec, &h, sampling, prec)?;
        let monotone = prev.map_or(true, |p| est.estimate <= p.estimate + p.noise + est.noise);
        report.rows.push(
            Row::new(&label)
                .index(j as i64)
                .h(&h)
                .measured(est.estimate)
                .bound(est.noise)
                .pass(monotone),
        );
        first.get_or_insert(est.estimate);
        fit.push((h.to_f64().ln(), est.estimate.ln()));
        prev = Some(est);
    }
    let ratio = prev.unwrap().estimate / first.unwrap();
    report.fit("final_over_initial", ratio);
    report.fit("decay_exponent", slope(&fit));
    report.rows.push(
        Row::new(format!("{label} final/initial"))
            .measured(ratio)
            .bound(0.25)
            .pass(ratio < 0.25),
    );
    Ok(report.finish())
}

/// Least-squares slope of `y` against `x`.
pub(crate) fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// `(Ψ(r+h) - Ψ(r))/h` for `h = 10^-d`, regressed against `log(1/h)`.
/// The expected slope is `1/q`.
pub fn rational_quotient_scan(
    r: &Rational,
    d_lo: u32,
    d_hi: u32,
    prec: u32,
) -> Result<ExperimentReport> {
    if d_lo >= d_hi {
        return Err(Error::Input("need d_lo < d_hi".into()));
    }
    let mut report = ExperimentReport::new(
        "rational-quotient",
        json!({ "r": r.to_string(), "d_lo": d_lo, "d_hi": d_hi, "precision": prec }),
    );
    let label = format!("r={r}");
    let mut pts = Vec::new();
    for d in d_lo..=d_hi {
        let h = decade(d);
        let tol = rational_near(h.to_f64() * 1e-9);
        let q = psi_increment(r, &h, &tol, prec)?.div_rational(&h);
        pts.push(((1.0 / h.to_f64()).ln(), q.mid_f64()));
        report.rows.push(
            Row::new(&label)
                .index(d as i64)
                .h(&h)
                .measured(q.mid_f64())
                .bound(&q)
                .certified(false),
        );
    }
    let s = slope(&pts);
    let expected = Rational::from_big(BigInt::from(1), r.den().clone()).to_f64();
    report.fit("slope", s);
    report.fit("expected_slope", expected);
    let ok = (s - expected).abs() <= 0.05 * expected;
    report.rows.push(
        Row::new(format!("{label} slope"))
            .measured(s)
            .bound(expected)
            .pass(ok),
    );
    Ok(report.finish())
}
