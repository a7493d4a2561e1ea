//! Randomized campaign over the elementary inequalities of the theory.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use serde_json::json;

use super::{compare_le, ExperimentReport, Row, Verdict};
use crate::cells::boundary_distance;
use crate::cf::{self, alpha_beta_gamma, ConvergentTable, QuotientSpec, Value};
use crate::enclosure::Enclosure;
use crate::rational::Rational;
use crate::sample;

const MAX_DEN: u64 = 1_000_000;
const MAX_BOUND: u64 = 10;
const MAX_STREAM_DEPTH: usize = 30;
const GAMMA_DEPTH: usize = 30;
const DISTANCE_DEPTH: usize = 20;

#[derive(Default)]
struct Tally {
    checked: u64,
    undecided: u64,
    violated: u64,
    example: Option<String>,
}

struct Campaign {
    prec: u32,
    tallies: BTreeMap<&'static str, Tally>,
}

impl Campaign {
    fn record(&mut self, name: &'static str, v: Verdict, what: impl FnOnce() -> String) {
        let t = self.tallies.entry(name).or_default();
        t.checked += 1;
        match v {
            Verdict::Holds => {}
            Verdict::Undecided => t.undecided += 1,
            Verdict::Violated => {
                t.violated += 1;
                if t.example.is_none() {
                    t.example = Some(what());
                }
            }
        }
    }

    fn exact(&mut self, name: &'static str, ok: bool, what: impl FnOnce() -> String) {
        self.record(
            name,
            if ok {
                Verdict::Holds
            } else {
                Verdict::Violated
            },
            what,
        );
    }

    fn int(&self, n: &BigInt) -> Enclosure {
        Enclosure::from_int(n.clone(), self.prec)
    }

    fn ln_int(&self, n: &BigInt) -> Enclosure {
        Enclosure::ln_rational(&Rational::from_integer(n.clone()), self.prec)
    }

    /// Σ_{j<=k} q_j <= 3 q_k for every k.
    fn denominator_sums(&mut self, t: &ConvergentTable, who: &str) {
        let mut sum = BigInt::zero();
        for k in 0..=t.len() {
            sum += t.q(k as isize);
            let ok = sum <= t.q(k as isize) * 3;
            self.exact("denominator_sum", ok, || format!("{who} k={k}"));
        }
    }

    /// `-log(2q_k)/q_k <= gamma_k - log(q_{k+1})/q_k <= [k=0] log 2 / q_k`
    fn gamma_sandwich(&mut self, k: usize, gamma: &Enclosure, t: &ConvergentTable, who: &str) {
        let qk = t.q(k as isize);
        let qk_e = self.int(qk);
        let mid = gamma - &self.ln_int(t.q(k as isize + 1)).div(&qk_e);
        let lower = -self.ln_int(&(qk * 2)).div(&qk_e);
        let upper = if k == 0 {
            self.ln_int(&BigInt::from(2)).div(&qk_e)
        } else {
            Enclosure::zero(self.prec)
        };
        self.record("gamma_lower", compare_le(&lower, &mid), || {
            format!("{who} k={k} mid={mid}")
        });
        self.record("gamma_upper", compare_le(&mid, &upper), || {
            format!("{who} k={k} mid={mid}")
        });
    }

    /// `1/(q_{k+1}+q_k) <= beta_k <= 1/q_{k+1}` and `q_{k+1}/(2q_k) <= 1/alpha_k <= a_{k+1}+1`.
    fn beta_alpha(
        &mut self,
        k: usize,
        alpha: &Value,
        beta: &Value,
        t: &ConvergentTable,
        who: &str,
    ) {
        let (qk, qk1) = (t.q(k as isize), t.q(k as isize + 1));
        let beta_lo = Rational::from_big(BigInt::one(), qk1 + qk);
        let beta_hi = Rational::from_big(BigInt::one(), qk1.clone());
        let inv_lo = Rational::from_big(qk1.clone(), qk * 2);
        let inv_hi = Rational::from_integer(t.a(k + 1) + 1);
        match (alpha, beta) {
            (Value::Exact(a), Value::Exact(b)) => {
                let inv = a.recip();
                self.exact("beta_lower", beta_lo <= *b, || format!("{who} k={k}"));
                self.exact("beta_upper", *b <= beta_hi, || format!("{who} k={k}"));
                self.exact("alpha_lower", inv_lo <= inv, || format!("{who} k={k}"));
                self.exact("alpha_upper", inv <= inv_hi, || format!("{who} k={k}"));
            }
            _ => {
                let p = self.prec;
                let b = beta.enclosure(p);
                let inv = alpha.enclosure(p).recip();
                let e = |r: &Rational| Enclosure::from_rational(r, p);
                self.record("beta_lower", compare_le(&e(&beta_lo), &b), || {
                    format!("{who} k={k} beta={b}")
                });
                self.record("beta_upper", compare_le(&b, &e(&beta_hi)), || {
                    format!("{who} k={k} beta={b}")
                });
                self.record("alpha_lower", compare_le(&e(&inv_lo), &inv), || {
                    format!("{who} k={k} 1/alpha={inv}")
                });
                self.record("alpha_upper", compare_le(&inv, &e(&inv_hi)), || {
                    format!("{who} k={k} 1/alpha={inv}")
                });
            }
        }
    }

    /// Two-sided bounds on `delta_k` and the logarithmic bound built from them.
    fn distance(&mut self, spec: &QuotientSpec, k: usize, t: &ConvergentTable, who: &str) {
        let delta = match boundary_distance(spec, k, self.prec) {
            Ok(d) => d,
            Err(_) => return,
        };
        let (qk, qk1, qk2) = (t.q(k as isize), t.q(k as isize + 1), t.q(k as isize + 2));
        let upper = Rational::from_big(BigInt::one(), qk * qk1);
        let lower = if t.a(k + 1).is_one() {
            Rational::from_big(BigInt::one(), qk1 * qk2 * 2)
        } else {
            Rational::from_big(BigInt::one(), qk * qk1 * 2)
        };
        let p = self.prec;
        match &delta {
            Value::Exact(d) => {
                self.exact("distance_upper", *d <= upper, || format!("{who} k={k}"));
                self.exact("distance_lower", lower <= *d, || format!("{who} k={k}"));
            }
            Value::Enclosed(d) => {
                let e = |r: &Rational| Enclosure::from_rational(r, p);
                self.record("distance_upper", compare_le(d, &e(&upper)), || {
                    format!("{who} k={k} delta={d}")
                });
                self.record("distance_lower", compare_le(&e(&lower), d), || {
                    format!("{who} k={k} delta={d}")
                });
            }
        }
        let d = delta.enclosure(p);
        let lhs = (&d * &Enclosure::from_int(2, p))
            .recip()
            .ln()
            .div(&self.int(qk));
        let two = Enclosure::from_int(2, p);
        let rhs = &(&two * &self.ln_int(qk1)).div(&self.int(qk))
            + &(&two * &self.ln_int(qk2)).div(&self.int(qk1));
        self.record("distance_log", compare_le(&lhs, &rhs), || {
            format!("{who} k={k} lhs={lhs} rhs={rhs}")
        });
    }

    fn rational(&mut self, r: &Rational) {
        let who = r.to_string();
        let word = cf::expand_rational(r).expect("random rational lies in (0,1)");
        let t = cf::convergents_of_word(&word).expect("valid word");
        let depth = word.len();
        let alphas = cf::rational_alphas(r);
        let betas = cf::rational_betas(&alphas);
        self.denominator_sums(&t, &who);
        for k in 0..depth {
            // betas[k] is beta_{k-1}
            if k <= GAMMA_DEPTH {
                let gamma =
                    Enclosure::ln_rational(&alphas[k].recip(), self.prec).mul_rational(&betas[k]);
                self.gamma_sandwich(k, &gamma, &t, &who);
            }
            self.beta_alpha(
                k,
                &Value::Exact(alphas[k].clone()),
                &Value::Exact(betas[k + 1].clone()),
                &t,
                &who,
            );
        }
        if depth >= 2 {
            let spec = QuotientSpec::FiniteRational { value: r.clone() };
            for k in 0..=(depth - 2).min(DISTANCE_DEPTH) {
                self.distance(&spec, k, &t, &who);
            }
        }
    }

    fn stream(&mut self, quotients: Vec<BigInt>, bound: u64) {
        let who = format!("B={bound} {}", cf::word_to_string(&quotients));
        let n = quotients.len();
        let t = cf::convergents_of_word(&quotients).expect("valid word");
        let spec = QuotientSpec::ExplicitPrefix {
            quotients,
            quotient_bound: Some(BigInt::from(bound)),
        };
        self.denominator_sums(&t, &who);
        for k in 0..n.min(GAMMA_DEPTH) {
            let abg = alpha_beta_gamma(&spec, k, self.prec).expect("prefix covers k+1 quotients");
            self.gamma_sandwich(k, &abg.gamma, &t, &who);
            self.beta_alpha(k, &abg.alpha, &abg.beta, &t, &who);
        }
        for k in 0..=DISTANCE_DEPTH {
            if k + 2 > n {
                break;
            }
            self.distance(&spec, k, &t, &who);
        }
    }

    /// `2 Γ(q+1) <= q^q`: exact factorials on integers, a Stirling upper bound on quarter steps.
    fn gamma_function(&mut self) {
        let mut fact = BigInt::one();
        for q in 1u32..=100 {
            fact *= q;
            if q < 2 {
                continue;
            }
            let ok = &fact * 2 <= BigInt::from(q).pow(q);
            self.exact("gamma_function", ok, || format!("q={q}"));
        }
        let p = self.prec;
        // ln(2π) rounded up
        let ln_two_pi = Rational::parse("1.8378770664093454836").unwrap();
        for quarter in 9u32..400 {
            if quarter % 4 == 0 {
                continue;
            }
            let q = Rational::new(quarter, 4).unwrap();
            let z = &q + &Rational::one();
            let ln_z = Enclosure::ln_rational(&z, p);
            let half = Rational::new(1, 2).unwrap();
            let stirling = &ln_z.mul_rational(&(&z - &half)) - &Enclosure::from_rational(&z, p);
            let correction = &ln_two_pi * &half + (&Rational::from_integer(12) * &z).recip();
            let ln_gamma_hi = stirling.add_rational(&correction);
            let lhs = Enclosure::ln_rational(&Rational::from_integer(2), p) + ln_gamma_hi;
            let rhs = Enclosure::ln_rational(&q, p).mul_rational(&q);
            self.record("gamma_function", compare_le(&lhs, &rhs), || {
                format!("q={q}")
            });
        }
    }

    /// `∫_a^{a+h} log(1/t) dt <= h log(1/h) + h`.
    fn log_integral(&mut self, a: &Rational, h: &Rational) {
        let p = self.prec;
        let f = |t: &Rational| -> Enclosure {
            if t.is_zero() {
                Enclosure::zero(p)
            } else {
                Enclosure::ln_rational(&t.recip(), p)
                    .mul_rational(t)
                    .add_rational(t)
            }
        };
        if a.is_zero() {
            // the two sides coincide
            self.exact("log_integral", true, String::new);
            return;
        }
        let lhs = &f(&(a + h)) - &f(a);
        let rhs = f(h);
        self.record("log_integral", compare_le(&lhs, &rhs), || {
            format!("a={a} h={h}")
        });
    }

    /// `Σ_{m<=l<=n} 1/l^3 <= 3(n-m)/(m^2 n)`.
    fn inverse_cubes(&mut self, m: u64, n: u64) {
        let mut s = Rational::zero();
        for l in m..=n {
            s = s + Rational::from_big(BigInt::one(), BigInt::from(l).pow(3));
        }
        let bound = Rational::from_big(BigInt::from(3 * (n - m)), BigInt::from(m).pow(2) * n);
        self.exact("inverse_cubes", s <= bound, || format!("m={m} n={n}"));
    }
}

/// Runs every inequality on seeded random inputs.
///
/// `samples` random rationals, `samples/4` bounded streams, and as many
/// instances of each scalar lemma.
pub fn inequality_suite(seed: u64, samples: usize, prec: u32) -> ExperimentReport {
    let mut rng = sample::rng(seed);
    let mut c = Campaign {
        prec,
        tallies: BTreeMap::new(),
    };
    for _ in 0..samples {
        let r = sample::random_rational(&mut rng, MAX_DEN);
        c.rational(&r);
    }
    for _ in 0..(samples / 4).max(1) {
        let bound = rng.gen_range(1..=MAX_BOUND);
        let depth = rng.gen_range(3..=MAX_STREAM_DEPTH);
        let word = (0..depth)
            .map(|_| BigInt::from(rng.gen_range(1..=bound)))
            .collect();
        c.stream(word, bound);
    }
    let golden = cf::convergents_of_word(&vec![BigInt::one(); 20]).expect("valid word");
    c.denominator_sums(&golden, "golden");
    c.gamma_function();
    for i in 0..samples {
        let a = if i % 16 == 0 {
            Rational::zero()
        } else {
            sample::random_rational(&mut rng, MAX_DEN)
        };
        let room = &Rational::one() - &a;
        let h = &room * &sample::random_rational(&mut rng, MAX_DEN);
        c.log_integral(&a, &h);
        let m = rng.gen_range(1..=2000u64);
        let n = m + rng.gen_range(1..=200u64);
        c.inverse_cubes(m, n);
    }

    let mut report = ExperimentReport::new(
        "inequalities",
        json!({ "seed": seed, "samples": samples, "precision": prec, "max_denominator": MAX_DEN, "max_bound": MAX_BOUND }),
    );
    let mut total_checked = 0;
    let mut total_undecided = 0;
    for (name, t) in &c.tallies {
        total_checked += t.checked;
        total_undecided += t.undecided;
        report.rows.push(
            Row::new(*name)
                .measured(format!("{} checked, {} undecided", t.checked, t.undecided))
                .bound(
                    t.example
                        .clone()
                        .map(|e| format!("{} violated, first {e}", t.violated))
                        .unwrap_or_default(),
                )
                .certified(true)
                .pass(t.violated == 0),
        );
    }
    report.fit("checked", total_checked as f64);
    report.fit("undecided", total_undecided as f64);
    report.finish()
}
