//! Certified integration of the Brjuno function.
//!
//! On a cell of depth `d` with denominators `(A, B) = (q_d, q_{d-1})` the
//! substitution `u = α_d(t)` turns `∫ Φ(t) dt` into
//! `W(A, B; J) = ∫_J Φ(u) (A + B u)⁻³ du`. Writing `Φ(u) = log(1/u) + u Φ(α(u))`,
//!
//! `W(A, B; J) = L(A, B; J) + Σₙ W(A n + B, A; Vₙ)`
//!
//! where `L` is elementary and `Vₙ` is the part of `J` inside child `n`, mapped
//! by the Gauss map. Children covered completely contribute
//! `(A n + B)⁻³ m(A / (A n + B))` through the moment table, so only the two
//! chains of partially covered children are followed, each at most as deep as
//! the continued fraction of its endpoint.

mod interval;
mod moments;
pub mod oracle;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use self::interval::Iv;
use self::moments::Moments;
use crate::cells::{cell_from_word, Cell};
use crate::enclosure::{Dir, Dyadic, Enclosure};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Default cap on visited cells.
pub const VISIT_CAP: u64 = 1_000_000;

/// A certified value of Ψ(x) or of an increment.
#[derive(Clone, Debug)]
pub struct PsiResult {
    pub value: Enclosure,
    pub cells_visited: u64,
    /// The dyadic head cutoff `2^-j` with `9 ε log(1/ε) <= tol/3`.
    pub epsilon: Rational,
    /// Deepest cell depth reached.
    pub depth_cap: usize,
}

impl Serialize for PsiResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (lo, hi) = self.value.decimal_bounds();
        let mut m = s.serialize_map(Some(5))?;
        m.serialize_entry("lo", &lo)?;
        m.serialize_entry("hi", &hi)?;
        m.serialize_entry("cells_visited", &self.cells_visited)?;
        m.serialize_entry("epsilon", &self.epsilon.to_string())?;
        m.serialize_entry("depth_cap", &self.depth_cap)?;
        m.end()
    }
}

/// `∫ₐᵇ γₖ` over part of a cell.
#[derive(Clone, Debug, Serialize)]
pub struct GammaIntegralPiece {
    pub k: usize,
    #[serde(serialize_with = "crate::cf::big_list::serialize")]
    pub word: Vec<BigInt>,
    pub a: Rational,
    pub b: Rational,
    pub value: Enclosure,
}

/// `∫_{u0}^{u1} log(1/u) (A + B u)⁻³ du` for `0 <= u0 <= u1 <= 1`.
pub(crate) fn log_weight_integral(
    a: &BigInt,
    b: &BigInt,
    u0: &Rational,
    u1: &Rational,
    prec: u32,
) -> Enclosure {
    if u0 == u1 {
        return Enclosure::zero(prec);
    }
    // the two antiderivative values nearly cancel when the interval is short
    let rel = ((u1 - u0) / u1.clone()).to_f64();
    let guard = 32 + (-rel.log2()).clamp(0.0, 4000.0) as u32;
    let p = prec + guard;
    let v = &antiderivative(a, b, u0, p) - &antiderivative(a, b, u1, p);
    v.with_precision(prec)
}

/// `I(u) = ∫₀ᵘ log(s) (A + B s)⁻³ ds`
/// `     = u(2A + Bu) log u / (2A²(A+Bu)²) − log(1 + Bu/A)/(2BA²) − u/(2A²(A+Bu))`,
/// and `(u log u − u)/A³` when `B = 0`.
fn antiderivative(a: &BigInt, b: &BigInt, u: &Rational, prec: u32) -> Enclosure {
    if u.is_zero() {
        return Enclosure::zero(prec);
    }
    let ar = Rational::from_integer(a.clone());
    let log_u = Enclosure::ln_rational(u, prec);
    if b.is_zero() {
        let a3 = ar.pow(3);
        return (&log_u - &Enclosure::from_int(1, prec)).mul_rational(&(u / &a3));
    }
    let br = Rational::from_integer(b.clone());
    let two = Rational::from(2);
    let a2 = &ar * &ar;
    let apbu = &ar + &(&br * u);
    let g = u * &(&(&two * &ar) + &(&br * u)) / (&(&two * &a2) * &(&apbu * &apbu));
    let first = log_u.mul_rational(&g);
    let second = Enclosure::ln_rational(&(&apbu / &ar), prec).div_rational(&(&(&two * &br) * &a2));
    let third = Enclosure::from_rational(&(u / &(&(&two * &a2) * &apbu)), prec);
    &(&first - &second) - &third
}

/// Upper bound on `∫_J Φ` for an interval of length `len` (at most `e⁻²` uses the sharp form).
fn increment_upper(len: &Rational, psi1: &Dyadic, prec: u32) -> Dyadic {
    let sharp = Rational::new(1353, 10000).unwrap();
    if len > &sharp {
        return psi1.clone();
    }
    let b = Enclosure::ln_rational(&len.recip(), prec).mul_rational(&(len * &Rational::from(10)));
    b.hi().clone().min(psi1.clone())
}

/// `[ε log(1/ε) + ε, 10 ε log(1/ε)]`, valid for `ε <= e⁻²`.
pub fn head_bounds(eps: &Rational, prec: u32) -> Enclosure {
    let log = Enclosure::ln_rational(&eps.recip(), prec);
    let lo = log.mul_rational(eps).add_rational(eps);
    let hi = log.mul_rational(&(eps * &Rational::from(10)));
    Enclosure::new(lo.lo().clone(), hi.hi().clone(), prec)
}

/// Smallest `j >= 3` with `9 · 2^-j · log(2^j) <= tol/3`.
pub fn head_cutoff(tol: &Rational) -> Rational {
    let ln2 = Enclosure::ln_rational(&Rational::from(2), 64);
    let target = Enclosure::from_rational(&(tol / &Rational::from(3)), 64);
    let mut j: u32 = 3;
    loop {
        let eps = Rational::from_big(BigInt::one(), BigInt::one() << j);
        let v = ln2.mul_rational(&(&eps * &Rational::from(9 * j as i64)));
        if v.certainly_le(&target) || j >= 4096 {
            return eps;
        }
        j += 1;
    }
}

struct Integrator {
    table: &'static Moments,
    prec: u32,
    leaf_budget: Dyadic,
    psi1: Dyadic,
    visits: u64,
    cap: u64,
    depth: usize,
}

impl Integrator {
    fn new(tol: &Rational, prec: u32, cap: u64) -> Integrator {
        let table = moments::table();
        Integrator {
            table,
            prec,
            leaf_budget: Dyadic::from_rational(&(tol / &Rational::from(8)), prec, Dir::Down),
            psi1: Dyadic::from_f64(table.m0().hi),
            visits: 0,
            cap,
            depth: 0,
        }
    }

    fn enclose(&self, iv: Iv, scale: &BigInt) -> Enclosure {
        let s = Rational::from_big(BigInt::one(), scale.pow(3));
        Enclosure::from_f64_bounds(iv.lo, iv.hi, self.prec).mul_rational(&s)
    }

    /// Completely covered child: `A⁻³ m(B/A)`.
    fn full(&mut self, a: &BigInt, b: &BigInt) -> Enclosure {
        self.visits += 1;
        let t = Iv::of_rational(&Rational::from_big(b.clone(), a.clone()));
        let m = self.table.at(t);
        self.enclose(m, a)
    }

    /// Children `first..=last` (unbounded when `last` is `None`), all completely covered.
    fn bulk(&mut self, a: &BigInt, b: &BigInt, first: &BigInt, last: Option<&BigInt>) -> Enclosure {
        let c = Iv::of_rational(&Rational::from_big(b.clone(), a.clone()));
        let (s, explicit) = self.table.series(c, first, last);
        self.visits += explicit + 1;
        self.enclose(s, a)
    }

    /// Partially covered child `n` with Gauss-map range `[v0, v1]`.
    fn child(
        &mut self,
        a: &BigInt,
        b: &BigInt,
        n: &BigInt,
        v0: &Rational,
        v1: &Rational,
        depth: usize,
    ) -> Enclosure {
        let a2 = a * n + b;
        if v0.is_zero() && v1.is_one() {
            return self.full(&a2, a);
        }
        self.depth = self.depth.max(depth);
        let l = log_weight_integral(&a2, a, v0, v1, self.prec);
        let len = v1 - v0;
        let weight = Rational::from_integer(a2.clone()) + v0 * &Rational::from_integer(a.clone());
        let upper = Dyadic::from_rational(&weight.pow(-3), self.prec, Dir::Up);
        let upper = upper.mul(
            &increment_upper(&len, &self.psi1, self.prec),
            self.prec,
            Dir::Up,
        );
        let leaf = Enclosure::new(l.lo().clone(), upper.max(l.hi().clone()), self.prec);
        self.visits += 1;
        if leaf.width() <= self.leaf_budget || self.visits >= self.cap {
            return leaf;
        }
        let deeper = self.node(&a2, a, v0, v1, l, depth);
        deeper.intersect(&leaf).unwrap_or(deeper)
    }

    /// `W(A, B; [u0, u1])` given `L(A, B; [u0, u1])`.
    fn node(
        &mut self,
        a: &BigInt,
        b: &BigInt,
        u0: &Rational,
        u1: &Rational,
        l: Enclosure,
        depth: usize,
    ) -> Enclosure {
        let mut acc = l;
        let inv1 = u1.recip();
        let n1 = inv1.floor();
        let v1 = &inv1 - &Rational::from_integer(n1.clone());
        let bottom = if u0.is_zero() {
            None
        } else {
            let inv0 = u0.recip();
            let n0 = if inv0.is_integer() {
                inv0.floor() - 1
            } else {
                inv0.floor()
            };
            let v0 = &inv0 - &Rational::from_integer(n0.clone());
            Some((n0, v0))
        };
        match bottom {
            Some((n0, v0)) if n0 == n1 => {
                let c = self.child(a, b, &n1, &v1, &v0, depth + 1);
                acc = &acc + &c;
            }
            bottom => {
                let first = if v1.is_zero() {
                    n1.clone()
                } else {
                    let c = self.child(a, b, &n1, &v1, &Rational::one(), depth + 1);
                    acc = &acc + &c;
                    &n1 + 1
                };
                let (last, partial) = match bottom {
                    None => (None, None),
                    Some((n0, v0)) if v0.is_one() => (Some(n0), None),
                    Some((n0, v0)) => (Some(&n0 - 1), Some((n0, v0))),
                };
                if last.as_ref().is_none_or(|l| *l >= first) {
                    let s = self.bulk(a, b, &first, last.as_ref());
                    acc = &acc + &s;
                }
                if let Some((n0, v0)) = partial {
                    let c = self.child(a, b, &n0, &Rational::zero(), &v0, depth + 1);
                    acc = &acc + &c;
                }
            }
        }
        acc
    }
}

fn check_tol(tol: &Rational) -> Result<()> {
    if !tol.is_positive() {
        return Err(Error::Input(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    Ok(())
}

fn check_unit(x: &Rational, what: &str) -> Result<()> {
    if x.is_negative() || x > &Rational::one() {
        return Err(Error::Input(format!("{what} = {x} is outside [0, 1]")));
    }
    Ok(())
}

/// `∫ₐᵇ Φ` for `0 <= a <= b <= 1`, with an explicit visit cap.
pub fn integrate_capped(
    a: &Rational,
    b: &Rational,
    tol: &Rational,
    prec: u32,
    cap: u64,
) -> Result<PsiResult> {
    check_tol(tol)?;
    check_unit(a, "lower limit")?;
    check_unit(b, "upper limit")?;
    if a > b {
        return Err(Error::Input(format!("limits out of order: {a} > {b}")));
    }
    let epsilon = head_cutoff(tol);
    if a == b {
        return Ok(PsiResult {
            value: Enclosure::zero(prec),
            cells_visited: 0,
            epsilon,
            depth_cap: 0,
        });
    }
    let mut it = Integrator::new(tol, prec, cap);
    let one = BigInt::one();
    let zero = BigInt::zero();
    let l = log_weight_integral(&one, &zero, a, b, prec);
    it.visits += 1;
    let value = it.node(&one, &zero, a, b, l, 0);
    let width = value.width();
    if width > Dyadic::from_rational(tol, prec, Dir::Up) {
        return Err(Error::VisitCap {
            cap: cap as usize,
            achieved: width.to_decimal(3, Dir::Up),
        });
    }
    Ok(PsiResult {
        value,
        cells_visited: it.visits,
        epsilon,
        depth_cap: it.depth,
    })
}

/// Certified Ψ(x) = ∫₀ˣ Φ with width at most `tol`.
pub fn psi(x: &Rational, tol: &Rational, prec: u32) -> Result<PsiResult> {
    integrate_capped(&Rational::zero(), x, tol, prec, VISIT_CAP)
}

/// Ψ(x+h) − Ψ(x) with its bookkeeping, integrated directly over the interval.
pub fn psi_increment_result(
    x: &Rational,
    h: &Rational,
    tol: &Rational,
    prec: u32,
) -> Result<PsiResult> {
    let y = x + h;
    check_unit(x, "x")?;
    check_unit(&y, "x + h")?;
    let (lo, hi) = if h.is_negative() { (&y, x) } else { (x, &y) };
    let mut r = integrate_capped(lo, hi, tol, prec, VISIT_CAP)?;
    if h.is_negative() {
        r.value = -r.value;
    }
    Ok(r)
}

/// Certified Ψ(x+h) − Ψ(x); the sign follows `h`.
pub fn psi_increment(x: &Rational, h: &Rational, tol: &Rational, prec: u32) -> Result<Enclosure> {
    psi_increment_result(x, h, tol, prec).map(|r| r.value)
}

/// `∫ₐᵇ γₖ` for `[a, b]` inside the closure of `cell`, whose depth is at least `k`.
pub fn integrate_gamma_closed_form(
    k: usize,
    cell: &Cell,
    a: &Rational,
    b: &Rational,
    prec: u32,
) -> Result<GammaIntegralPiece> {
    if a > b {
        return Err(Error::Input(format!("interval out of order: {a} > {b}")));
    }
    if cell.depth() < k {
        return Err(Error::Input(format!(
            "cell depth {} is below k = {k}",
            cell.depth()
        )));
    }
    if !cell.contains_closed(a) || !cell.contains_closed(b) {
        return Err(Error::Input(format!("[{a}, {b}] is not inside the cell")));
    }
    let ancestor = cell_from_word(&cell.word()[..k])?;
    let (ua, ub) = (ancestor.parameter(a), ancestor.parameter(b));
    let (u0, u1) = if ua <= ub { (ua, ub) } else { (ub, ua) };
    let value = log_weight_integral(
        ancestor.convergent().1,
        ancestor.previous().1,
        &u0,
        &u1,
        prec,
    );
    Ok(GammaIntegralPiece {
        k,
        word: cell.word().to_vec(),
        a: a.clone(),
        b: b.clone(),
        value,
    })
}

/// Bounds `(lower, upper)` on `m(s) = ∫₀¹ Φ(u)(1+su)⁻³ du`, from the certified table.
pub fn moment_bounds(s: &Rational) -> Result<(f64, f64)> {
    check_unit(s, "s")?;
    let m = moments::table().at(Iv::of_rational(s));
    Ok((m.lo, m.hi))
}

#[cfg(test)]
mod tests;
