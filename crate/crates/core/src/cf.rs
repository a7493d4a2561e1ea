//! Continued fractions: expansion, convergents, the Gauss map, and the
//! `alpha_k`, `beta_k`, `gamma_k` family attached to a point.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::enclosure::Enclosure;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Canonical expansion `[a_1, .., a_K]` of `r` in (0,1), with `a_K >= 2`.
pub fn expand_rational(r: &Rational) -> Result<Vec<BigInt>> {
    if !r.is_positive() || *r >= Rational::one() {
        return Err(Error::Input(format!("{r} is not in (0,1)")));
    }
    Ok(expansion_of_unit(r))
}

/// Expansion of a rational in [0,1]; empty for 0 and 1.
pub(crate) fn expansion_of_unit(r: &Rational) -> Vec<BigInt> {
    let mut out = Vec::new();
    if r.is_zero() || r.is_one() {
        return out;
    }
    let (mut num, mut den) = (r.num().clone(), r.den().clone());
    while !num.is_zero() {
        let (a, rem) = den.div_rem(&num);
        out.push(a);
        den = num;
        num = rem;
    }
    out
}

/// Value of `[0; a_1, .., a_n]`.
pub fn evaluate(word: &[BigInt]) -> Rational {
    let t = convergents_unchecked(word);
    Rational::from_big(
        t.p(word.len() as isize).clone(),
        t.q(word.len() as isize).clone(),
    )
}

/// The Gauss map `x -> {1/x}`.
pub fn gauss_map(x: &Rational) -> Result<Rational> {
    if !x.is_positive() || *x > Rational::one() {
        return Err(Error::Input(format!("gauss map needs 0 < x <= 1, got {x}")));
    }
    Ok(x.recip().fract())
}

/// Convergents `p_k/q_k` for `k = -1..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergentTable {
    quotients: Vec<BigInt>,
    p: Vec<BigInt>,
    q: Vec<BigInt>,
}

impl ConvergentTable {
    pub fn quotients(&self) -> &[BigInt] {
        &self.quotients
    }

    /// Number of quotients `n`.
    pub fn len(&self) -> usize {
        self.quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quotients.is_empty()
    }

    /// `a_k` for `1 <= k <= n`; `a_0 = 0`.
    pub fn a(&self, k: usize) -> BigInt {
        if k == 0 {
            BigInt::zero()
        } else {
            self.quotients[k - 1].clone()
        }
    }

    /// `p_k` for `-1 <= k <= n`.
    pub fn p(&self, k: isize) -> &BigInt {
        &self.p[(k + 1) as usize]
    }

    pub fn q(&self, k: isize) -> &BigInt {
        &self.q[(k + 1) as usize]
    }

    pub fn convergent(&self, k: usize) -> Rational {
        Rational::from_big(self.p(k as isize).clone(), self.q(k as isize).clone())
    }

    pub fn push(&mut self, a: BigInt) {
        let n = self.p.len();
        let p = &a * &self.p[n - 1] + &self.p[n - 2];
        let q = &a * &self.q[n - 1] + &self.q[n - 2];
        self.quotients.push(a);
        self.p.push(p);
        self.q.push(q);
    }
}

fn convergents_unchecked(word: &[BigInt]) -> ConvergentTable {
    let mut t = ConvergentTable {
        quotients: Vec::with_capacity(word.len()),
        p: vec![BigInt::one(), BigInt::zero()],
        q: vec![BigInt::zero(), BigInt::one()],
    };
    for a in word {
        t.push(a.clone());
    }
    t
}

/// Convergent table of a word of positive quotients.
pub fn convergents(word: &[BigInt]) -> Result<ConvergentTable> {
    if word.is_empty() {
        return Err(Error::Input("empty quotient list".into()));
    }
    check_word(word)?;
    Ok(convergents_unchecked(word))
}

/// Convergent table of a possibly empty word.
pub fn convergents_of_word(word: &[BigInt]) -> Result<ConvergentTable> {
    check_word(word)?;
    Ok(convergents_unchecked(word))
}

pub(crate) fn check_word(word: &[BigInt]) -> Result<()> {
    if let Some(i) = word.iter().position(|a| !a.is_positive()) {
        return Err(Error::Input(format!(
            "partial quotient #{} is {} (must be >= 1)",
            i + 1,
            word[i]
        )));
    }
    Ok(())
}

pub fn word_from_u64(w: &[u64]) -> Vec<BigInt> {
    w.iter().map(|&a| BigInt::from(a)).collect()
}

/// A point of [0,1] described by its partial quotients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum QuotientSpec {
    FiniteRational {
        value: Rational,
    },
    EventuallyPeriodic {
        #[serde(with = "big_list")]
        preperiod: Vec<BigInt>,
        #[serde(with = "big_list")]
        period: Vec<BigInt>,
    },
    ExplicitPrefix {
        #[serde(with = "big_list")]
        quotients: Vec<BigInt>,
        #[serde(with = "big_opt", default)]
        quotient_bound: Option<BigInt>,
    },
}

/// How many quotients a spec provides.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Supply {
    /// Rational of this depth: `a_1..a_K` then exhausted.
    Finite(usize),
    /// Infinitely many, all computable.
    Infinite,
    /// This many listed, the rest unknown.
    Prefix(usize),
}

impl QuotientSpec {
    pub fn rational(value: Rational) -> Result<Self> {
        let s = QuotientSpec::FiniteRational { value };
        s.validate()?;
        Ok(s)
    }

    pub fn periodic(preperiod: Vec<BigInt>, period: Vec<BigInt>) -> Result<Self> {
        let s = QuotientSpec::EventuallyPeriodic { preperiod, period };
        s.validate()?;
        Ok(s)
    }

    pub fn prefix(quotients: Vec<BigInt>, quotient_bound: Option<BigInt>) -> Result<Self> {
        let s = QuotientSpec::ExplicitPrefix {
            quotients,
            quotient_bound,
        };
        s.validate()?;
        Ok(s)
    }

    /// The golden mean conjugate `(sqrt 5 - 1)/2 = [0; 1, 1, ..]`.
    pub fn golden() -> Self {
        QuotientSpec::EventuallyPeriodic {
            preperiod: vec![],
            period: vec![BigInt::one()],
        }
    }

    /// `sqrt 2 - 1 = [0; 2, 2, ..]`.
    pub fn silver() -> Self {
        QuotientSpec::EventuallyPeriodic {
            preperiod: vec![],
            period: vec![BigInt::from(2)],
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            QuotientSpec::FiniteRational { value } => {
                if value.is_negative() || *value > Rational::one() {
                    return Err(Error::Input(format!("{value} is not in [0,1]")));
                }
            }
            QuotientSpec::EventuallyPeriodic { preperiod, period } => {
                if period.is_empty() {
                    return Err(Error::Input("empty period".into()));
                }
                check_word(preperiod)?;
                check_word(period)?;
            }
            QuotientSpec::ExplicitPrefix {
                quotients,
                quotient_bound,
            } => {
                check_word(quotients)?;
                if let Some(b) = quotient_bound {
                    if !b.is_positive() {
                        return Err(Error::Input("quotient bound must be >= 1".into()));
                    }
                    if let Some(a) = quotients.iter().find(|a| *a > b) {
                        return Err(Error::Input(format!("quotient {a} exceeds the bound {b}")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn supply(&self) -> Supply {
        match self {
            QuotientSpec::FiniteRational { value } => {
                Supply::Finite(expansion_of_unit(value).len())
            }
            QuotientSpec::EventuallyPeriodic { .. } => Supply::Infinite,
            QuotientSpec::ExplicitPrefix { quotients, .. } => Supply::Prefix(quotients.len()),
        }
    }

    /// Largest partial quotient that can occur, when known.
    pub fn quotient_bound(&self) -> Option<BigInt> {
        match self {
            QuotientSpec::FiniteRational { value } => Some(
                expansion_of_unit(value)
                    .into_iter()
                    .max()
                    .unwrap_or_else(BigInt::one),
            ),
            QuotientSpec::EventuallyPeriodic { preperiod, period } => {
                preperiod.iter().chain(period.iter()).max().cloned()
            }
            QuotientSpec::ExplicitPrefix { quotient_bound, .. } => quotient_bound.clone(),
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, QuotientSpec::FiniteRational { .. })
    }

    /// First `n` partial quotients `a_1..a_n`.
    pub fn prefix_quotients(&self, n: usize) -> Result<Vec<BigInt>> {
        match self {
            QuotientSpec::FiniteRational { value } => {
                let e = expansion_of_unit(value);
                if n > e.len() {
                    return Err(Error::InsufficientQuotients {
                        index: n,
                        needed: n,
                        available: e.len(),
                    });
                }
                Ok(e[..n].to_vec())
            }
            QuotientSpec::EventuallyPeriodic { preperiod, period } => Ok((0..n)
                .map(|i| {
                    if i < preperiod.len() {
                        preperiod[i].clone()
                    } else {
                        period[(i - preperiod.len()) % period.len()].clone()
                    }
                })
                .collect()),
            QuotientSpec::ExplicitPrefix { quotients, .. } => {
                if n > quotients.len() {
                    return Err(Error::InsufficientQuotients {
                        index: n,
                        needed: n,
                        available: quotients.len(),
                    });
                }
                Ok(quotients[..n].to_vec())
            }
        }
    }

    /// Up to `n` quotients, fewer if the spec runs out.
    pub fn available_quotients(&self, n: usize) -> Vec<BigInt> {
        let m = match self.supply() {
            Supply::Finite(k) | Supply::Prefix(k) => n.min(k),
            Supply::Infinite => n,
        };
        self.prefix_quotients(m).expect("within supply")
    }

    /// Point value when the spec is a rational.
    pub fn rational_value(&self) -> Option<&Rational> {
        match self {
            QuotientSpec::FiniteRational { value } => Some(value),
            _ => None,
        }
    }

    /// Short human-readable label.
    pub fn label(&self) -> String {
        let join = |w: &[BigInt]| {
            w.iter()
                .map(|a| a.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        match self {
            QuotientSpec::FiniteRational { value } => value.to_string(),
            QuotientSpec::EventuallyPeriodic { preperiod, period } => {
                format!("periodic:[{}];[{}]", join(preperiod), join(period))
            }
            QuotientSpec::ExplicitPrefix {
                quotients,
                quotient_bound,
            } => match quotient_bound {
                Some(b) => format!("prefix:[{}]<={b}", join(quotients)),
                None => format!("prefix:[{}]", join(quotients)),
            },
        }
    }
}

/// An exact value or an enclosure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Exact(Rational),
    Enclosed(Enclosure),
}

impl Value {
    pub fn enclosure(&self, prec: u32) -> Enclosure {
        match self {
            Value::Exact(r) => Enclosure::from_rational(r, prec),
            Value::Enclosed(e) => e.clone(),
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Value::Exact(r) => Some(r),
            Value::Enclosed(_) => None,
        }
    }
}

/// `alpha_k`, `beta_k`, `gamma_k` at one index.
#[derive(Clone, Debug)]
pub struct AlphaBetaGamma {
    pub alpha: Value,
    pub beta: Value,
    pub gamma: Enclosure,
}

/// Exact `alpha_k(r)` for `0 <= k <= K`, the Gauss iterates of a rational.
/// Both 0 and 1 have depth 0.
pub fn rational_alphas(r: &Rational) -> Vec<Rational> {
    let mut out = vec![r.clone()];
    let mut x = r.clone();
    while !x.is_zero() && !x.is_one() {
        x = x.recip().fract();
        out.push(x.clone());
    }
    out
}

/// Exact `beta_{-1}, beta_0, .., beta_K` of a rational (products of alphas).
pub fn rational_betas(alphas: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::one()];
    for a in alphas {
        let next = out.last().unwrap() * a;
        out.push(next);
    }
    out
}

/// Enclosure of the tail value `[0; a_{k+1}, a_{k+2}, ..]` of an infinite spec.
pub fn alpha_enclosure(spec: &QuotientSpec, k: usize, prec: u32) -> Result<Enclosure> {
    match spec.supply() {
        Supply::Finite(_) => {
            let r = spec.rational_value().unwrap();
            let alphas = rational_alphas(r);
            match alphas.get(k) {
                Some(a) => Ok(Enclosure::from_rational(a, prec)),
                None => Err(Error::InsufficientQuotients {
                    index: k,
                    needed: k + 1,
                    available: alphas.len() - 1,
                }),
            }
        }
        Supply::Infinite => {
            // tail word long enough that consecutive convergents pin the value
            let target = BigInt::one() << (prec as u64 / 2 + 4);
            let mut m = 8usize;
            loop {
                let all = spec.prefix_quotients(k + m)?;
                let t = convergents_unchecked(&all[k..]);
                if *t.q(m as isize) >= target || m > 100_000 {
                    return Ok(mobius_range(&t, &Rational::zero(), &Rational::one(), prec));
                }
                m *= 2;
            }
        }
        Supply::Prefix(n) => {
            if k + 1 > n {
                return Err(Error::InsufficientQuotients {
                    index: k,
                    needed: k + 1,
                    available: n,
                });
            }
            let all = spec.prefix_quotients(n)?;
            let t = convergents_unchecked(&all[k..]);
            let lo_tail = match spec.quotient_bound() {
                Some(b) => Rational::from_big(BigInt::one(), b + 1),
                None => Rational::zero(),
            };
            Ok(mobius_range(&t, &lo_tail, &Rational::one(), prec))
        }
    }
}

/// Hull of `(P_m + t P_{m-1}) / (Q_m + t Q_{m-1})` over `t` in `[t0, t1]`.
fn mobius_range(t: &ConvergentTable, t0: &Rational, t1: &Rational, prec: u32) -> Enclosure {
    let m = t.len() as isize;
    let at = |s: &Rational| {
        let num =
            Rational::from_integer(t.p(m).clone()) + s * Rational::from_integer(t.p(m - 1).clone());
        let den =
            Rational::from_integer(t.q(m).clone()) + s * Rational::from_integer(t.q(m - 1).clone());
        num / den
    };
    let (a, b) = (at(t0), at(t1));
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    Enclosure::from_rational(&lo, prec).hull(&Enclosure::from_rational(&hi, prec))
}

/// `alpha_k`, `beta_k` and `gamma_k = beta_{k-1} log(1/alpha_k)` of a point.
pub fn alpha_beta_gamma(spec: &QuotientSpec, k: usize, prec: u32) -> Result<AlphaBetaGamma> {
    spec.validate()?;
    if let Some(r) = spec.rational_value() {
        let alphas = rational_alphas(r);
        let depth = alphas.len() - 1;
        if k > depth {
            return Err(Error::InsufficientQuotients {
                index: k,
                needed: k + 1,
                available: depth,
            });
        }
        if k == depth {
            return Err(Error::Exhausted(k));
        }
        let betas = rational_betas(&alphas);
        let alpha = alphas[k].clone();
        let gamma = Enclosure::ln_rational(&alpha.recip(), prec).mul_rational(&betas[k]);
        return Ok(AlphaBetaGamma {
            alpha: Value::Exact(alpha),
            beta: Value::Exact(betas[k + 1].clone()),
            gamma,
        });
    }
    if let Supply::Prefix(n) = spec.supply() {
        if k + 1 > n {
            return Err(Error::InsufficientQuotients {
                index: k,
                needed: k + 1,
                available: n,
            });
        }
    }
    let word = spec.available_quotients(k + 1);
    let t = convergents_unchecked(&word);
    let alpha = alpha_enclosure(spec, k, prec)?;
    let beta_of = |j: usize| -> Result<Enclosure> {
        // beta_j = 1 / (q_{j+1} + alpha_{j+1} q_j)
        let a1 = alpha_enclosure_or_unit(spec, j + 1, prec)?;
        let q1 = Enclosure::from_int(t.q(j as isize + 1).clone(), prec);
        let q0 = Enclosure::from_int(t.q(j as isize).clone(), prec);
        Ok((q1 + a1 * q0).recip())
    };
    let beta = beta_of(k)?;
    let beta_prev = if k == 0 {
        Enclosure::from_int(1, prec)
    } else {
        beta_of(k - 1)?
    };
    let gamma = &beta_prev * &alpha.recip().ln();
    Ok(AlphaBetaGamma {
        alpha: Value::Enclosed(alpha),
        beta: Value::Enclosed(beta),
        gamma,
    })
}

/// Like [`alpha_enclosure`] but falls back to the a-priori range when the
/// prefix is exhausted.
fn alpha_enclosure_or_unit(spec: &QuotientSpec, k: usize, prec: u32) -> Result<Enclosure> {
    match alpha_enclosure(spec, k, prec) {
        Err(Error::InsufficientQuotients { .. }) if matches!(spec.supply(), Supply::Prefix(_)) => {
            let lo = match spec.quotient_bound() {
                Some(b) => Rational::from_big(BigInt::one(), b + 1),
                None => Rational::zero(),
            };
            Ok(Enclosure::from_rational(&lo, prec).hull(&Enclosure::from_int(1, prec)))
        }
        other => other,
    }
}

/// Fibonacci numbers with `F_1 = F_2 = 1`; `fibonacci(0) = 0`.
pub fn fibonacci(n: usize) -> BigInt {
    let (mut a, mut b) = (BigInt::zero(), BigInt::one());
    for _ in 0..n {
        let c = &a + &b;
        a = b;
        b = c;
    }
    a
}

/// Parity sign `(-1)^k` as an integer.
pub fn parity_sign(k: isize) -> BigInt {
    if k.rem_euclid(2) == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

/// Small-quotient convenience for displays.
pub fn word_to_string(word: &[BigInt]) -> String {
    let parts: Vec<String> = word.iter().map(|a| a.to_string()).collect();
    format!("[{}]", parts.join(","))
}

/// Quotient as `u64` when small enough.
pub fn small(a: &BigInt) -> Option<u64> {
    a.to_u64()
}

pub(crate) mod big_list {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::big_json;

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(big_json::to_json)
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let raw = Vec::<serde_json::Value>::deserialize(d)?;
        raw.iter()
            .map(|v| big_json::from_json(v).map_err(serde::de::Error::custom))
            .collect()
    }
}

mod big_opt {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::big_json;

    pub fn serialize<S: Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref().map(big_json::to_json).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigInt>, D::Error> {
        let raw = Option::<serde_json::Value>::deserialize(d)?;
        raw.map(|v| big_json::from_json(&v).map_err(serde::de::Error::custom))
            .transpose()
    }
}

mod big_json {
    use std::str::FromStr;

    use num_bigint::BigInt;
    use num_traits::ToPrimitive;

    /// Numbers that fit in `u64` stay JSON numbers; larger ones become strings.
    pub fn to_json(a: &BigInt) -> serde_json::Value {
        match a.to_u64() {
            Some(x) => serde_json::Value::from(x),
            None => serde_json::Value::from(a.to_string()),
        }
    }

    pub fn from_json(v: &serde_json::Value) -> Result<BigInt, String> {
        match v {
            serde_json::Value::Number(n) => n
                .as_u64()
                .map(BigInt::from)
                .ok_or_else(|| format!("bad quotient {n}")),
            serde_json::Value::String(s) => {
                BigInt::from_str(s).map_err(|_| format!("bad quotient {s:?}"))
            }
            other => Err(format!("bad quotient {other}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    fn w(v: &[u64]) -> Vec<BigInt> {
        word_from_u64(v)
    }

    #[test]
    fn expansions() {
        assert_eq!(expand_rational(&r(5, 7)).unwrap(), w(&[1, 2, 2]));
        assert_eq!(expand_rational(&r(1, 2)).unwrap(), w(&[2]));
        assert_eq!(expand_rational(&r(1, 3)).unwrap(), w(&[3]));
        assert!(expand_rational(&r(0, 1)).is_err());
        assert!(expand_rational(&r(1, 1)).is_err());
        assert!(expand_rational(&r(3, 2)).is_err());
    }

    #[test]
    fn convergent_examples() {
        let t = convergents(&w(&[1, 2, 2])).unwrap();
        let ps: Vec<i64> = (-1..=3).map(|k| t.p(k).to_i64().unwrap()).collect();
        let qs: Vec<i64> = (-1..=3).map(|k| t.q(k).to_i64().unwrap()).collect();
        assert_eq!(ps, vec![1, 0, 1, 2, 5]);
        assert_eq!(qs, vec![0, 1, 1, 3, 7]);
        let t = convergents(&w(&[2])).unwrap();
        assert_eq!(
            (t.p(1).clone(), t.q(1).clone()),
            (BigInt::from(1), BigInt::from(2))
        );
        let t = convergents(&w(&[1, 1, 1, 1, 1])).unwrap();
        let qs: Vec<i64> = (0..=5).map(|k| t.q(k).to_i64().unwrap()).collect();
        assert_eq!(qs, vec![1, 1, 2, 3, 5, 8]);
        assert!(convergents(&[]).is_err());
        assert!(convergents(&w(&[1, 0])).is_err());
    }

    #[test]
    fn gauss_examples() {
        assert_eq!(gauss_map(&r(5, 7)).unwrap(), r(2, 5));
        assert_eq!(gauss_map(&r(1, 2)).unwrap(), r(0, 1));
        assert_eq!(gauss_map(&r(2, 5)).unwrap(), r(1, 2));
        assert!(gauss_map(&r(0, 1)).is_err());
    }

    #[test]
    fn abg_rational_examples() {
        let s = QuotientSpec::rational(r(5, 7)).unwrap();
        let x = alpha_beta_gamma(&s, 0, 128).unwrap();
        assert_eq!(x.alpha.exact().unwrap(), &r(5, 7));
        assert_eq!(x.beta.exact().unwrap(), &r(5, 7));
        assert!((x.gamma.mid_f64() - (7.0f64 / 5.0).ln()).abs() < 1e-15);
        let x = alpha_beta_gamma(&s, 2, 128).unwrap();
        assert_eq!(x.alpha.exact().unwrap(), &r(1, 2));
        assert_eq!(x.beta.exact().unwrap(), &r(1, 7));
        assert_eq!(
            alpha_beta_gamma(&s, 3, 128).unwrap_err(),
            Error::Exhausted(3)
        );
        assert!(matches!(
            alpha_beta_gamma(&s, 4, 128),
            Err(Error::InsufficientQuotients { .. })
        ));
    }

    #[test]
    fn abg_golden() {
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for k in [0, 1, 5, 20] {
            let x = alpha_beta_gamma(&QuotientSpec::golden(), k, 128).unwrap();
            let a = x.alpha.enclosure(128);
            assert!((a.mid_f64() - g).abs() < 1e-15);
            assert!(a.width_f64() < 1e-30);
            let b = x.beta.enclosure(128);
            assert!((b.mid_f64() - g.powi(k as i32 + 1)).abs() < 1e-14);
        }
    }

    #[test]
    fn prefix_spec_with_bound() {
        let s = QuotientSpec::prefix(w(&[1, 2, 1, 2, 1, 2]), Some(BigInt::from(2))).unwrap();
        let x = alpha_beta_gamma(&s, 5, 128).unwrap();
        let a = x.alpha.enclosure(128);
        // a_6 = 2 then a tail in [1/3, 1]
        assert!(a.contains_rational(&r(1, 3)) || a.lo().to_f64() >= 1.0 / 3.0 - 1e-12);
        assert!(matches!(
            alpha_beta_gamma(&s, 6, 128),
            Err(Error::InsufficientQuotients { .. })
        ));
        assert!(QuotientSpec::prefix(w(&[3]), Some(BigInt::from(2))).is_err());
    }

    #[test]
    fn spec_json() {
        let s = QuotientSpec::golden();
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(
            j,
            r#"{"type":"EventuallyPeriodic","preperiod":[],"period":[1]}"#
        );
        let back: QuotientSpec = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
        let p = QuotientSpec::prefix(vec![BigInt::from(1) << 80u32], None).unwrap();
        let j = serde_json::to_string(&p).unwrap();
        assert!(j.contains("\"1208925819614629174706176\""));
        assert_eq!(serde_json::from_str::<QuotientSpec>(&j).unwrap(), p);
        let f: QuotientSpec =
            serde_json::from_str(r#"{"type":"FiniteRational","value":"2/5"}"#).unwrap();
        assert_eq!(f, QuotientSpec::rational(r(2, 5)).unwrap());
    }

    #[test]
    fn fib() {
        let f: Vec<u64> = (0..10).map(|n| fibonacci(n).to_u64().unwrap()).collect();
        assert_eq!(f, vec![0, 1, 1, 2, 3, 5, 8, 13, 21, 34]);
    }

    fn unit_rational() -> impl Strategy<Value = Rational> {
        (2i64..1_000_000).prop_flat_map(|d| (1..d).prop_map(move |n| r(n, d)))
    }

    proptest! {
        #[test]
        fn expansion_round_trips(x in unit_rational()) {
            let word = expand_rational(&x).unwrap();
            prop_assert!(word.last().unwrap() >= &BigInt::from(2));
            prop_assert_eq!(evaluate(&word), x);
        }

        #[test]
        fn gauss_map_shifts_expansion(x in unit_rational()) {
            let word = expand_rational(&x).unwrap();
            let y = gauss_map(&x).unwrap();
            if word.len() == 1 {
                prop_assert!(y.is_zero());
            } else {
                prop_assert_eq!(expand_rational(&y).unwrap(), word[1..].to_vec());
            }
        }

        #[test]
        fn determinant_identities(word in proptest::collection::vec(1u64..50, 1..40)) {
            let t = convergents(&w(&word)).unwrap();
            for k in 0..=t.len() as isize {
                let d = t.p(k) * t.q(k - 1) - t.q(k) * t.p(k - 1);
                prop_assert_eq!(d, parity_sign(k - 1));
                if k >= 1 && (k as usize) < t.len() {
                    let e = t.p(k + 1) * t.q(k - 1) - t.p(k - 1) * t.q(k + 1);
                    prop_assert_eq!(e, parity_sign(k - 1) * t.a(k as usize + 1));
                }
            }
        }

        #[test]
        fn denominator_growth(word in proptest::collection::vec(1u64..50, 1..40)) {
            let t = convergents(&w(&word)).unwrap();
            let mut sum = BigInt::zero();
            for k in 0..=t.len() {
                prop_assert!(*t.q(k as isize) >= fibonacci(k + 1));
                sum += t.q(k as isize);
                prop_assert!(sum <= BigInt::from(3) * t.q(k as isize));
            }
        }

        #[test]
        fn rational_alpha_beta_bounds(x in unit_rational()) {
            let word = expand_rational(&x).unwrap();
            let t = convergents(&word).unwrap();
            let alphas = rational_alphas(&x);
            let betas = rational_betas(&alphas);
            for k in 0..word.len() {
                let (qk, qk1) = (Rational::from_integer(t.q(k as isize).clone()), Rational::from_integer(t.q(k as isize + 1).clone()));
                let beta = &betas[k + 1];
                prop_assert!(Rational::one() / (&qk1 + &qk) <= *beta);
                prop_assert!(*beta <= Rational::one() / &qk1);
                let inv = alphas[k].recip();
                prop_assert!(&qk1 / (Rational::from_integer(2) * &qk) <= inv);
                prop_assert!(inv <= Rational::from_integer(t.a(k + 1) + 1));
                // beta_k = |p_k - x q_k|
                let direct = (Rational::from_integer(t.p(k as isize).clone()) - &x * &qk).abs();
                prop_assert_eq!(&direct, beta);
            }
        }
    }
}
