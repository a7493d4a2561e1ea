//! The Brjuno function `Φ`: exact log-sums at rationals and certified
//! enclosures along quotient streams.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::cf::{self, alpha_beta_gamma, QuotientSpec, Supply};
use crate::enclosure::{Dir, Dyadic, Enclosure};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Default cap on the number of series terms.
pub const ITERATION_CAP: usize = 10_000;

/// `Σ c_i log(s_i)` with rational coefficients and positive rational arguments.
///
/// Canonical form: every argument is `> 1` and not a perfect power of
/// exponent `<= 64`; equal arguments are merged; zero coefficients dropped;
/// terms sorted by argument.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct LogSum {
    terms: Vec<(Rational, Rational)>,
}

const SMALL_PRIMES: [u32; 18] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61,
];

/// Write `s = t^e` with `e <= 64` as large as the prime search finds.
fn split_power(s: &Rational) -> (Rational, u32) {
    let (mut n, mut d) = (s.num().clone(), s.den().clone());
    let mut e = 1u32;
    'outer: loop {
        for &p in SMALL_PRIMES.iter() {
            if e * p > 64 {
                continue;
            }
            let rn = n.nth_root(p);
            if num_traits::pow(rn.clone(), p as usize) != n {
                continue;
            }
            let rd = d.nth_root(p);
            if num_traits::pow(rd.clone(), p as usize) != d {
                continue;
            }
            n = rn;
            d = rd;
            e *= p;
            continue 'outer;
        }
        break;
    }
    (Rational::from_big(n, d), e)
}

impl LogSum {
    pub fn zero() -> Self {
        LogSum { terms: vec![] }
    }

    /// `c log s` for a single term.
    pub fn term(c: Rational, s: Rational) -> Self {
        LogSum::from_terms(vec![(c, s)])
    }

    pub fn from_terms(terms: Vec<(Rational, Rational)>) -> Self {
        let mut acc: BTreeMap<Rational, Rational> = BTreeMap::new();
        for (c, s) in terms {
            assert!(s.is_positive(), "log of a nonpositive argument");
            if c.is_zero() || s.is_one() {
                continue;
            }
            let (mut c, mut s) = (c, s);
            if s < Rational::one() {
                s = s.recip();
                c = -c;
            }
            let (base, e) = split_power(&s);
            let c = c * Rational::from_integer(e);
            let entry = acc.entry(base).or_insert_with(Rational::zero);
            *entry = &*entry + &c;
        }
        let terms = acc
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(s, c)| (c, s))
            .collect();
        LogSum { terms }
    }

    pub fn terms(&self) -> &[(Rational, Rational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &LogSum) -> LogSum {
        LogSum::from_terms(self.terms.iter().chain(o.terms.iter()).cloned().collect())
    }

    pub fn scale(&self, r: &Rational) -> LogSum {
        LogSum::from_terms(self.terms.iter().map(|(c, s)| (c * r, s.clone())).collect())
    }

    pub fn evaluate(&self, prec: u32) -> Enclosure {
        let mut acc = Enclosure::zero(prec);
        for (c, s) in &self.terms {
            acc = acc + Enclosure::ln_rational(s, prec + 8).mul_rational(c);
        }
        acc.with_precision(prec)
    }
}

impl fmt::Display for LogSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (c, s)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if i > 0 {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            } else if neg {
                write!(f, "-")?;
            }
            let a = c.abs();
            if !a.is_one() {
                write!(f, "({a})*")?;
            }
            if s.is_integer() {
                write!(f, "log {}", s.num())?;
            } else {
                write!(f, "log({s})")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LogSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LogSum({self})")
    }
}

impl Serialize for LogSum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.terms.serialize(s)
    }
}

/// Exact `Φ(r) = Σ_{k<K} beta_{k-1} log(1/alpha_k)` for `r` in [0,1].
pub fn phi_rational(r: &Rational) -> Result<LogSum> {
    if r.is_negative() || *r > Rational::one() {
        return Err(Error::Input(format!("{r} is not in [0,1]")));
    }
    let alphas = cf::rational_alphas(r);
    let betas = cf::rational_betas(&alphas);
    let depth = alphas.len() - 1;
    let terms = (0..depth)
        .map(|k| (betas[k].clone(), alphas[k].recip()))
        .collect();
    Ok(LogSum::from_terms(terms))
}

/// Outcome of a stream evaluation.
#[derive(Clone, Debug)]
pub struct PhiResult {
    pub value: Enclosure,
    pub terms_used: usize,
    /// Upper bound on the omitted tail `Σ_{k >= K'} gamma_k`.
    pub tail_bound: Dyadic,
    pub certified: bool,
}

impl Serialize for PhiResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (lo, hi) = self.value.decimal_bounds();
        let mut st = s.serialize_struct("PhiResult", 5)?;
        st.serialize_field("lo", &lo)?;
        st.serialize_field("hi", &hi)?;
        st.serialize_field("terms_used", &self.terms_used)?;
        st.serialize_field("tail_bound", &self.tail_bound.to_decimal(6, Dir::Up))?;
        st.serialize_field("certified", &self.certified)?;
        st.end()
    }
}

/// Upper bound on `Σ_{k >= K'} log(q_{k+1})/q_k` given `q_{K'}` and a quotient
/// bound `B`, using `q_k >= q_{K'} F_{k-K'+1}`, `F_n >= φ^{n-2}` and
/// `log q_{k+1} <= log q_{K'} + (k+1-K') log(B+1)`.
pub fn tail_majorant(q: &BigInt, bound: &BigInt, prec: u32) -> Enclosure {
    // Σ_m φ^{1-m} = φ^3 and Σ_m (m+1) φ^{1-m} = φ^5
    let phi3 = Rational::new(42361, 10000).unwrap();
    let phi5 = Rational::new(110903, 10000).unwrap();
    let lq = Enclosure::ln_rational(&Rational::from_integer(q.clone()), prec);
    let lb = Enclosure::ln_rational(&Rational::from_integer(bound + 1), prec);
    let total = lq.mul_rational(&phi3) + lb.mul_rational(&phi5);
    let t = total.div(&Enclosure::from_int(q.clone(), prec));
    Enclosure::point(t.hi().clone(), prec)
}

/// Certified enclosure of `Φ` along a quotient stream.
pub fn phi_stream(spec: &QuotientSpec, target_tail: &Rational, prec: u32) -> Result<PhiResult> {
    phi_stream_capped(spec, target_tail, prec, ITERATION_CAP)
}

pub fn phi_stream_capped(
    spec: &QuotientSpec,
    target_tail: &Rational,
    prec: u32,
    cap: usize,
) -> Result<PhiResult> {
    spec.validate()?;
    if !target_tail.is_positive() {
        return Err(Error::Input("target tail must be positive".into()));
    }
    let work = prec + 16;
    if let Some(r) = spec.rational_value() {
        let ls = phi_rational(r)?;
        return Ok(PhiResult {
            value: ls.evaluate(prec),
            terms_used: cf::rational_alphas(r).len() - 1,
            tail_bound: Dyadic::zero(),
            certified: true,
        });
    }
    let target = Dyadic::from_rational(target_tail, 64, Dir::Down);
    let (bound, certified, available) = match spec.supply() {
        Supply::Infinite => (spec.quotient_bound().unwrap(), true, None),
        Supply::Prefix(n) => match spec.quotient_bound() {
            Some(b) => (b, true, Some(n)),
            None => {
                let est = spec
                    .available_quotients(n)
                    .into_iter()
                    .max()
                    .unwrap_or_else(BigInt::one);
                (est, false, Some(n))
            }
        },
        Supply::Finite(_) => unreachable!(),
    };
    // smallest K' >= 1 whose tail majorant meets the target
    let mut table = cf::convergents_of_word(&[])?;
    let mut k_used = 0usize;
    let mut tail;
    loop {
        if let Some(n) = available {
            if k_used >= n {
                let t = tail_majorant(table.q(k_used as isize), &bound, work);
                tail = t.hi().clone();
                if certified && tail > target {
                    return Err(Error::Precondition(format!(
                        "only {n} quotients listed; best certified tail is {}",
                        tail.to_decimal(6, Dir::Up)
                    )));
                }
                break;
            }
        }
        if k_used >= cap {
            let t = tail_majorant(table.q(k_used as isize), &bound, work);
            return Err(Error::IterationCap {
                cap,
                tail: t.hi().to_decimal(6, Dir::Up),
            });
        }
        let a = spec.prefix_quotients(k_used + 1)?.pop().unwrap();
        table.push(a);
        k_used += 1;
        let t = tail_majorant(table.q(k_used as isize), &bound, work);
        tail = t.hi().clone();
        if tail <= target {
            break;
        }
    }
    let mut sum = Enclosure::zero(work);
    for k in 0..k_used {
        let g = alpha_beta_gamma(spec, k, work)?.gamma;
        sum = sum + g;
    }
    let value = Enclosure::new(sum.lo().clone(), sum.hi().add(&tail, work, Dir::Up), work)
        .with_precision(prec);
    Ok(PhiResult {
        value,
        terms_used: k_used,
        tail_bound: tail,
        certified,
    })
}

/// `log(q_{k+1})/q_k` for `k < K`.
pub fn brjuno_partial_series(
    spec: &QuotientSpec,
    k_max: usize,
    prec: u32,
) -> Result<Vec<Enclosure>> {
    spec.validate()?;
    let needed = k_max + 1;
    match spec.supply() {
        Supply::Finite(n) | Supply::Prefix(n) if n < needed => {
            return Err(Error::InsufficientQuotients {
                index: k_max,
                needed,
                available: n,
            });
        }
        _ => {}
    }
    let t = cf::convergents_of_word(&spec.prefix_quotients(k_max)?)?;
    Ok((0..k_max)
        .map(|k| {
            let qk1 = Rational::from_integer(t.q(k as isize + 1).clone());
            Enclosure::ln_rational(&qk1, prec)
                .div(&Enclosure::from_int(t.q(k as isize).clone(), prec))
        })
        .collect())
}

/// `log(q_{k+1})/q_k` from a convergent table, for huge quotient experiments.
pub fn brjuno_terms_of_table(t: &cf::ConvergentTable, prec: u32) -> Vec<Enclosure> {
    (0..t.len())
        .map(|k| {
            let qk1 = Rational::from_integer(t.q(k as isize + 1).clone());
            Enclosure::ln_rational(&qk1, prec)
                .div(&Enclosure::from_int(t.q(k as isize).clone(), prec))
        })
        .collect()
}

/// `gamma_k` of a rational, exact symbolic form.
pub fn gamma_rational(r: &Rational, k: usize) -> Result<LogSum> {
    let alphas = cf::rational_alphas(r);
    if k + 1 > alphas.len() {
        return Err(Error::InsufficientQuotients {
            index: k,
            needed: k + 1,
            available: alphas.len() - 1,
        });
    }
    if alphas[k].is_zero() {
        return Err(Error::Exhausted(k));
    }
    let betas = cf::rational_betas(&alphas);
    Ok(LogSum::term(betas[k].clone(), alphas[k].recip()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    #[test]
    fn phi_of_unit_fractions() {
        for k in 2..50 {
            let ls = phi_rational(&r(1, k)).unwrap();
            assert_eq!(ls, LogSum::term(Rational::one(), r(k, 1)));
        }
        assert_eq!(
            phi_rational(&r(1, 2)).unwrap().terms(),
            &[(r(1, 1), r(2, 1))]
        );
        assert_eq!(
            phi_rational(&r(1, 4)).unwrap().terms(),
            &[(r(2, 1), r(2, 1))]
        );
    }

    #[test]
    fn phi_two_fifths() {
        let ls = phi_rational(&r(2, 5)).unwrap();
        assert_eq!(
            ls,
            LogSum::from_terms(vec![(r(1, 1), r(5, 2)), (r(2, 5), r(2, 1))])
        );
        let v = ls.evaluate(128);
        assert!((v.mid_f64() - ((2.5f64).ln() + 0.4 * 2f64.ln())).abs() < 1e-15);
        assert!(phi_rational(&r(0, 1)).unwrap().is_zero());
        assert!(phi_rational(&r(1, 1)).unwrap().is_zero());
    }

    #[test]
    fn canonical_form() {
        let a = LogSum::from_terms(vec![(r(1, 1), r(4, 1)), (r(-2, 1), r(2, 1))]);
        assert!(a.is_zero());
        let b = LogSum::from_terms(vec![(r(1, 1), r(1, 8))]);
        assert_eq!(b.terms(), &[(r(-3, 1), r(2, 1))]);
        let c = LogSum::from_terms(vec![(r(1, 1), r(9, 4))]);
        assert_eq!(c.terms(), &[(r(2, 1), r(3, 2))]);
        assert_eq!(format!("{}", phi_rational(&r(1, 2)).unwrap()), "log 2");
    }

    #[test]
    fn golden_stream() {
        let res = phi_stream(&QuotientSpec::golden(), &r(1, 1_000_000_000_000), 128).unwrap();
        assert!(res.certified);
        assert!((res.value.mid_f64() - 1.2598289137944102).abs() < 1e-11);
    }

    #[test]
    fn rational_stream_matches_symbolic() {
        let s = QuotientSpec::rational(r(2, 5)).unwrap();
        let res = phi_stream(&s, &r(1, 1000), 128).unwrap();
        assert!(res.tail_bound.is_zero());
        assert_eq!(res.terms_used, 2);
        assert!(res
            .value
            .overlaps(&phi_rational(&r(2, 5)).unwrap().evaluate(128)));
    }

    #[test]
    fn unbounded_prefix_is_uncertified() {
        let s = QuotientSpec::prefix(cf::word_from_u64(&[1, 2, 1, 2, 1, 2, 1, 2]), None).unwrap();
        let res = phi_stream(&s, &r(1, 10), 128).unwrap();
        assert!(!res.certified);
    }

    #[test]
    fn short_bounded_prefix_reports_reachable_tail() {
        let s = QuotientSpec::prefix(cf::word_from_u64(&[1, 2, 1]), Some(BigInt::from(2))).unwrap();
        assert!(phi_stream(&s, &r(1, 1_000_000), 128).is_err());
        let ok = phi_stream(&s, &r(10, 1), 128).unwrap();
        assert!(ok.certified);
    }

    #[test]
    fn cap_is_reported() {
        let e =
            phi_stream_capped(&QuotientSpec::golden(), &r(1, 1_000_000_000), 128, 5).unwrap_err();
        assert!(matches!(e, Error::IterationCap { cap: 5, .. }));
    }

    #[test]
    fn partial_series_golden() {
        let t = brjuno_partial_series(&QuotientSpec::golden(), 5, 128).unwrap();
        let fib = [1.0f64, 1.0, 2.0, 3.0, 5.0, 8.0];
        for k in 0..5 {
            assert!((t[k].mid_f64() - fib[k + 1].ln() / fib[k]).abs() < 1e-15);
        }
        let s = QuotientSpec::rational(r(2, 5)).unwrap();
        assert!(brjuno_partial_series(&s, 2, 128).is_err());
    }

    fn unit_rational() -> impl Strategy<Value = Rational> {
        (2i64..1_000_000).prop_flat_map(|d| (1..d).prop_map(move |n| r(n, d)))
    }

    proptest! {
        #[test]
        fn functional_equation_symbolic(x in unit_rational()) {
            let lhs = phi_rational(&x).unwrap();
            let ax = cf::gauss_map(&x).unwrap();
            let rhs = LogSum::term(Rational::one(), x.recip()).add(&phi_rational(&ax).unwrap().scale(&x));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn generalized_functional_equation(x in unit_rational()) {
            let alphas = cf::rational_alphas(&x);
            let betas = cf::rational_betas(&alphas);
            let whole = phi_rational(&x).unwrap();
            for k in 0..alphas.len() {
                let mut acc = LogSum::zero();
                for j in 0..k {
                    acc = acc.add(&gamma_rational(&x, j).unwrap());
                }
                let tail = phi_rational(&alphas[k]).unwrap().scale(&betas[k]);
                prop_assert_eq!(&acc.add(&tail), &whole);
            }
        }

        #[test]
        fn functional_equation_numeric(x in unit_rational()) {
            let prec = 128;
            let lhs = phi_rational(&x).unwrap().evaluate(prec);
            let ax = cf::gauss_map(&x).unwrap();
            let rhs = Enclosure::ln_rational(&x.recip(), prec) + phi_rational(&ax).unwrap().evaluate(prec).mul_rational(&x);
            prop_assert!((lhs - rhs).contains_rational(&Rational::zero()));
        }

        #[test]
        fn gamma_terms_are_nonnegative(x in unit_rational()) {
            let depth = cf::rational_alphas(&x).len() - 1;
            for k in 0..depth {
                let g = gamma_rational(&x, k).unwrap().evaluate(96);
                prop_assert!(g.is_nonnegative());
            }
        }

        #[test]
        fn stream_refinement_nests(per in proptest::collection::vec(1u64..6, 1..4)) {
            let s = QuotientSpec::periodic(vec![], cf::word_from_u64(&per)).unwrap();
            let coarse = phi_stream(&s, &r(1, 1000), 128).unwrap();
            let fine = phi_stream(&s, &r(1, 1_000_000_000), 128).unwrap();
            prop_assert!(fine.tail_bound <= coarse.tail_bound);
            prop_assert!(coarse.value.overlaps(&fine.value));
            prop_assert!(fine.terms_used >= coarse.terms_used);
        }
    }
}
