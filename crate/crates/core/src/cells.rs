//! Cylinder cells of the continued-fraction expansion.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::cf::{self, alpha_beta_gamma, ConvergentTable, QuotientSpec, Supply, Value};
use crate::enclosure::Enclosure;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// The open interval of points whose expansion starts with `word`.
#[derive(Clone, Debug)]
pub struct Cell {
    word: Vec<BigInt>,
    p: BigInt,
    q: BigInt,
    p_prev: BigInt,
    q_prev: BigInt,
}

impl PartialEq for Cell {
    fn eq(&self, o: &Self) -> bool {
        self.word == o.word
    }
}

impl Eq for Cell {}

impl Cell {
    fn from_table(word: Vec<BigInt>, t: &ConvergentTable) -> Cell {
        let k = word.len() as isize;
        Cell {
            p: t.p(k).clone(),
            q: t.q(k).clone(),
            p_prev: t.p(k - 1).clone(),
            q_prev: t.q(k - 1).clone(),
            word,
        }
    }

    pub fn root() -> Cell {
        Cell {
            word: vec![],
            p: BigInt::zero(),
            q: BigInt::one(),
            p_prev: BigInt::one(),
            q_prev: BigInt::zero(),
        }
    }

    pub fn word(&self) -> &[BigInt] {
        &self.word
    }

    pub fn depth(&self) -> usize {
        self.word.len()
    }

    /// `(p_k, q_k)`.
    pub fn convergent(&self) -> (&BigInt, &BigInt) {
        (&self.p, &self.q)
    }

    /// `(p_{k-1}, q_{k-1})`.
    pub fn previous(&self) -> (&BigInt, &BigInt) {
        (&self.p_prev, &self.q_prev)
    }

    /// The endpoint `p_k/q_k`, where the children accumulate.
    pub fn principal_endpoint(&self) -> Rational {
        Rational::from_big(self.p.clone(), self.q.clone())
    }

    /// The endpoint `(p_k + p_{k-1})/(q_k + q_{k-1})`.
    pub fn mediant_endpoint(&self) -> Rational {
        Rational::from_big(&self.p + &self.p_prev, &self.q + &self.q_prev)
    }

    /// `(left, right)` with `left < right`.
    pub fn endpoints(&self) -> (Rational, Rational) {
        let (a, b) = (self.principal_endpoint(), self.mediant_endpoint());
        if self.depth() % 2 == 0 {
            (a, b)
        } else {
            (b, a)
        }
    }

    /// `1/(q_k (q_k + q_{k-1}))`.
    pub fn length(&self) -> Rational {
        Rational::from_big(BigInt::one(), &self.q * (&self.q + &self.q_prev))
    }

    /// Open-interval membership.
    pub fn contains(&self, x: &Rational) -> bool {
        let (l, r) = self.endpoints();
        l < *x && *x < r
    }

    /// Closed-interval membership.
    pub fn contains_closed(&self, x: &Rational) -> bool {
        let (l, r) = self.endpoints();
        l <= *x && *x <= r
    }

    /// The parameter `u = alpha_k(x)` with `x = (p_k + u p_{k-1})/(q_k + u q_{k-1})`.
    pub fn parameter(&self, x: &Rational) -> Rational {
        let num =
            Rational::from_integer(self.p.clone()) - x * Rational::from_integer(self.q.clone());
        let den = x * Rational::from_integer(self.q_prev.clone())
            - Rational::from_integer(self.p_prev.clone());
        num / den
    }

    /// The point with parameter `u`.
    pub fn point(&self, u: &Rational) -> Rational {
        let num = Rational::from_integer(self.p.clone())
            + u * Rational::from_integer(self.p_prev.clone());
        let den = Rational::from_integer(self.q.clone())
            + u * Rational::from_integer(self.q_prev.clone());
        num / den
    }

    /// Child `n >= 1`: the points with next quotient `n`.
    pub fn child(&self, n: &BigInt) -> Cell {
        assert!(n.is_positive(), "child index must be >= 1");
        let mut word = self.word.clone();
        word.push(n.clone());
        Cell {
            p: n * &self.p + &self.p_prev,
            q: n * &self.q + &self.q_prev,
            p_prev: self.p.clone(),
            q_prev: self.q.clone(),
            word,
        }
    }

    /// Child index containing an interior point, or `None` on a child boundary.
    pub fn child_index(&self, x: &Rational) -> Option<BigInt> {
        let u = self.parameter(x);
        if !u.is_positive() || u > Rational::one() {
            return None;
        }
        let inv = u.recip();
        if inv.is_integer() {
            return None;
        }
        Some(inv.floor())
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (l, r) = self.endpoints();
        let mut st = s.serialize_struct("Cell", 3)?;
        let word: Vec<serde_json::Value> = self
            .word
            .iter()
            .map(|a| match num_traits::ToPrimitive::to_u64(a) {
                Some(x) => serde_json::Value::from(x),
                None => serde_json::Value::from(a.to_string()),
            })
            .collect();
        st.serialize_field("word", &word)?;
        st.serialize_field("endpoints", &[l, r])?;
        st.serialize_field("length", &self.length())?;
        st.end()
    }
}

pub fn cell_from_word(word: &[BigInt]) -> Result<Cell> {
    let t = cf::convergents_of_word(word)?;
    Ok(Cell::from_table(word.to_vec(), &t))
}

/// The depth-`k` cell containing the point.
pub fn cell_containing(spec: &QuotientSpec, k: usize) -> Result<Cell> {
    spec.validate()?;
    match spec.supply() {
        Supply::Finite(depth) => {
            if k > depth {
                return Err(Error::InsufficientQuotients {
                    index: k,
                    needed: k,
                    available: depth,
                });
            }
            let r = spec.rational_value().unwrap();
            if r.is_zero() || r.is_one() {
                if k == 0 {
                    return Err(Error::CellEndpoint(0));
                }
            }
            let cell = cell_from_word(&spec.prefix_quotients(k)?)?;
            if !cell.contains(r) {
                return Err(Error::CellEndpoint(k));
            }
            Ok(cell)
        }
        _ => cell_from_word(&spec.prefix_quotients(k)?),
    }
}

/// Children `n_lo..=n_hi` of a cell.
pub fn children(cell: &Cell, n_lo: &BigInt, n_hi: &BigInt) -> Result<Vec<Cell>> {
    if !n_lo.is_positive() || n_lo > n_hi {
        return Err(Error::Input(format!("bad child range {n_lo}..={n_hi}")));
    }
    let mut out = Vec::new();
    let mut n = n_lo.clone();
    while &n <= n_hi {
        out.push(cell.child(&n));
        n += 1;
    }
    Ok(out)
}

/// Distance `delta_k` from the point to the boundary of its depth-`k` cell.
pub fn boundary_distance(spec: &QuotientSpec, k: usize, prec: u32) -> Result<Value> {
    spec.validate()?;
    let needed = k + 2;
    match spec.supply() {
        Supply::Finite(n) | Supply::Prefix(n) if n < needed => {
            return Err(Error::InsufficientQuotients {
                index: k,
                needed,
                available: n,
            });
        }
        _ => {}
    }
    let word = spec.prefix_quotients(k + 2)?;
    let t = cf::convergents_of_word(&word)?;
    let (qk, qk1, qkm1) = (
        t.q(k as isize).clone(),
        t.q(k as isize + 1).clone(),
        t.q(k as isize - 1).clone(),
    );
    let a = t.a(k + 1);
    let extra = Rational::from_big(&a - 1, &qk1 * (&qk + &qkm1));
    let beta_k = alpha_beta_gamma(spec, k, prec).map(|x| x.beta);
    let beta_k1 = beta_at(spec, k + 1, prec);
    match (beta_k?, beta_k1?) {
        (Value::Exact(b0), Value::Exact(b1)) => {
            let first = &b0 / Rational::from_integer(qk);
            let second = &b1 / Rational::from_integer(qk1) + extra;
            Ok(Value::Exact(first.min(second)))
        }
        (b0, b1) => {
            let first = b0.enclosure(prec).div(&Enclosure::from_int(qk, prec));
            let second = b1
                .enclosure(prec)
                .div(&Enclosure::from_int(qk1, prec))
                .add_rational(&extra);
            Ok(Value::Enclosed(first.min(&second)))
        }
    }
}

/// `beta_k`, including the exhaustion index of a rational where it vanishes.
fn beta_at(spec: &QuotientSpec, k: usize, prec: u32) -> Result<Value> {
    match alpha_beta_gamma(spec, k, prec) {
        Ok(x) => Ok(x.beta),
        Err(Error::Exhausted(_)) => Ok(Value::Exact(Rational::zero())),
        Err(e) => Err(e),
    }
}

/// Depth and thickness of an open segment.
#[derive(Clone, Debug, Serialize)]
pub struct SegmentProfile {
    pub depth: usize,
    /// Number of depth-(K+1) cells meeting the segment; `None` when infinite
    /// (an end sits on the accumulation endpoint of the enclosing cell).
    #[serde(serialize_with = "ser_thickness")]
    pub thickness: Option<BigInt>,
    pub enclosing_cell: Cell,
}

fn ser_thickness<S: Serializer>(t: &Option<BigInt>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match t {
        Some(n) => s.serialize_str(&n.to_string()),
        None => s.serialize_str("inf"),
    }
}

/// Deepest cell containing the open segment `(a, b)`, and how many of its
/// children the segment meets.
pub fn segment_profile(a: &Rational, b: &Rational) -> Result<SegmentProfile> {
    if !a.is_positive() || a >= b || *b >= Rational::one() {
        return Err(Error::Input(format!("need 0 < a < b < 1, got ({a}, {b})")));
    }
    let mut cell = Cell::root();
    loop {
        let (ua, ub) = (cell.parameter(a), cell.parameter(b));
        let (u_lo, u_hi) = if ua <= ub { (ua, ub) } else { (ub, ua) };
        // children touched by the open parameter interval (u_lo, u_hi)
        let n_top = u_hi.recip().floor();
        if u_lo.is_zero() {
            return Ok(SegmentProfile {
                depth: cell.depth(),
                thickness: None,
                enclosing_cell: cell,
            });
        }
        let inv_lo = u_lo.recip();
        let n_bot = if inv_lo.is_integer() {
            inv_lo.floor() - 1
        } else {
            inv_lo.floor()
        };
        let thickness = &n_bot - &n_top + 1;
        if thickness > BigInt::one() {
            return Ok(SegmentProfile {
                depth: cell.depth(),
                thickness: Some(thickness),
                enclosing_cell: cell,
            });
        }
        cell = cell.child(&n_top);
    }
}

/// The two depth-`K` cells meeting at a rational `r` of depth `K >= 1`:
/// first the one with far endpoint `(p - p')/(q - q')`, then the one with far
/// endpoint `(p + p')/(q + q')`.
pub fn flanking_cells(r: &Rational) -> Result<(Cell, Cell)> {
    if !r.is_positive() || *r >= Rational::one() {
        return Err(Error::Input(format!("{r} has depth 0")));
    }
    let word = cf::expand_rational(r)?;
    let outer = cell_from_word(&word)?;
    let mut shorter = word.clone();
    let last = shorter.last_mut().unwrap();
    *last -= 1;
    let inner = cell_from_word(&shorter)?;
    Ok((inner, outer))
}

/// `2/(3 q^2)` for a reduced rational `p/q`.
pub fn flank_radius(r: &Rational) -> Rational {
    Rational::from_big(BigInt::from(2), BigInt::from(3) * r.den() * r.den())
}

/// Does `(r - rho, r + rho) \ {r}` lie in the union of the two flanking cells?
pub fn flank_inclusion_holds(r: &Rational, cells: &(Cell, Cell), rho: &Rational) -> bool {
    let lo = r - rho;
    let hi = r + rho;
    let covers = |c: &Cell| {
        let (l, rr) = c.endpoints();
        (l <= lo && &rr == r) || (&l == r && hi <= rr)
    };
    let (a, b) = cells;
    let (al, ar) = a.endpoints();
    let (bl, br) = b.endpoints();
    let left_of = |l: &Rational, rr: &Rational| l < rr;
    covers(a) && covers(b) && left_of(&al, &ar) && left_of(&bl, &br) && (ar == *r) != (br == *r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::word_from_u64;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    fn cw(v: &[u64]) -> Cell {
        cell_from_word(&word_from_u64(v)).unwrap()
    }

    #[test]
    fn words() {
        let c = cw(&[2]);
        assert_eq!(c.endpoints(), (r(1, 3), r(1, 2)));
        assert_eq!(c.length(), r(1, 6));
        assert_eq!(cw(&[]).endpoints(), (r(0, 1), r(1, 1)));
        let c = cw(&[1]);
        assert_eq!(c.endpoints(), (r(1, 2), r(1, 1)));
        assert_eq!(c.length(), r(1, 2));
    }

    #[test]
    fn containing() {
        let c = cell_containing(&QuotientSpec::golden(), 2).unwrap();
        assert_eq!(c.endpoints(), (r(1, 2), r(2, 3)));
        let c = cell_containing(&QuotientSpec::golden(), 0).unwrap();
        assert_eq!(c.endpoints(), (r(0, 1), r(1, 1)));
        let s = QuotientSpec::rational(r(5, 7)).unwrap();
        let c = cell_containing(&s, 2).unwrap();
        assert_eq!(c.endpoints(), (r(2, 3), r(3, 4)));
        assert_eq!(cell_containing(&s, 3).unwrap_err(), Error::CellEndpoint(3));
        assert!(cell_containing(&s, 4).is_err());
    }

    #[test]
    fn child_examples() {
        let kids = children(&cw(&[2]), &BigInt::from(1), &BigInt::from(3)).unwrap();
        let ends: Vec<_> = kids.iter().map(|c| c.endpoints()).collect();
        assert_eq!(
            ends,
            vec![(r(1, 3), r(2, 5)), (r(2, 5), r(3, 7)), (r(3, 7), r(4, 9))]
        );
        let kids = children(&Cell::root(), &BigInt::from(1), &BigInt::from(2)).unwrap();
        let ends: Vec<_> = kids.iter().map(|c| c.endpoints()).collect();
        assert_eq!(ends, vec![(r(1, 2), r(1, 1)), (r(1, 3), r(1, 2))]);
        assert!(children(&Cell::root(), &BigInt::from(3), &BigInt::from(2)).is_err());
    }

    #[test]
    fn golden_boundary_distance() {
        let d = boundary_distance(&QuotientSpec::golden(), 0, 128)
            .unwrap()
            .enclosure(128);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        assert!((d.mid_f64() - (1.0 - g)).abs() < 1e-15);
    }

    #[test]
    fn rational_boundary_distance_is_exact() {
        // 2/5 sits in cell [2] = (1/3, 1/2); the nearest boundary is 1/3
        let s = QuotientSpec::rational(r(2, 5)).unwrap();
        assert_eq!(
            boundary_distance(&s, 0, 128).unwrap(),
            Value::Exact(r(2, 5))
        );
        let d = boundary_distance(&QuotientSpec::rational(r(5, 13)).unwrap(), 1, 128).unwrap();
        assert_eq!(d, Value::Exact(r(5, 13) - r(1, 3)));
    }

    #[test]
    fn profiles() {
        let p = segment_profile(&r(3, 10), &r(17, 50)).unwrap();
        assert_eq!((p.depth, p.thickness), (0, Some(BigInt::from(2))));
        let p = segment_profile(&r(41, 100), &r(9, 20)).unwrap();
        assert_eq!((p.depth, p.thickness), (1, Some(BigInt::from(3))));
        let p = segment_profile(&r(49, 100), &r(51, 100)).unwrap();
        assert_eq!(p.depth, 0);
        let p = segment_profile(&r(1, 3), &r(2, 5)).unwrap();
        assert_eq!(p.depth, 2);
        assert!(segment_profile(&r(1, 2), &r(1, 3)).is_err());
    }

    #[test]
    fn flanks() {
        let (a, b) = flanking_cells(&r(1, 2)).unwrap();
        assert_eq!(a.endpoints(), (r(1, 2), r(1, 1)));
        assert_eq!(a.word(), word_from_u64(&[1]).as_slice());
        assert_eq!(b.endpoints(), (r(1, 3), r(1, 2)));
        assert_eq!(b.word(), word_from_u64(&[2]).as_slice());
        assert_eq!(flank_radius(&r(1, 2)), r(1, 6));
        let (a, b) = flanking_cells(&r(2, 5)).unwrap();
        assert_eq!(a.mediant_endpoint(), r(2, 5));
        assert_eq!(a.principal_endpoint(), r(1, 3));
        assert_eq!(b.mediant_endpoint(), r(3, 7));
        assert!(flank_inclusion_holds(
            &r(2, 5),
            &(a, b),
            &flank_radius(&r(2, 5))
        ));
        assert!(flanking_cells(&r(0, 1)).is_err());
    }

    #[test]
    fn serializes() {
        let j = serde_json::to_string(&cw(&[2])).unwrap();
        assert_eq!(
            j,
            r#"{"word":[2],"endpoints":["1/3","1/2"],"length":"1/6"}"#
        );
    }
}
