//! Outward-rounded interval arithmetic on dyadic endpoints.

mod dyadic;
mod log;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use serde::Serialize;

pub use self::dyadic::{Dir, Dyadic};
pub use self::log::{ln_dyadic, ln_ratio};
use crate::rational::Rational;

pub const DEFAULT_PRECISION: u32 = 128;

/// A closed interval `[lo, hi]` holding a real value.
#[derive(Clone, PartialEq, Eq)]
pub struct Enclosure {
    lo: Dyadic,
    hi: Dyadic,
    prec: u32,
}

impl Enclosure {
    pub fn new(lo: Dyadic, hi: Dyadic, prec: u32) -> Self {
        assert!(lo <= hi, "inverted enclosure");
        Enclosure { lo, hi, prec }
    }

    pub fn zero(prec: u32) -> Self {
        Enclosure::point(Dyadic::zero(), prec)
    }

    pub fn point(d: Dyadic, prec: u32) -> Self {
        Enclosure {
            lo: d.clone(),
            hi: d,
            prec,
        }
    }

    pub fn from_int(n: impl Into<BigInt>, prec: u32) -> Self {
        Enclosure::point(Dyadic::from_int(n), prec)
    }

    pub fn from_rational(r: &Rational, prec: u32) -> Self {
        Enclosure {
            lo: Dyadic::from_rational(r, prec, Dir::Down),
            hi: Dyadic::from_rational(r, prec, Dir::Up),
            prec,
        }
    }

    /// Interval between two doubles, taken exactly.
    pub fn from_f64_bounds(lo: f64, hi: f64, prec: u32) -> Self {
        Enclosure::new(Dyadic::from_f64(lo), Dyadic::from_f64(hi), prec)
    }

    /// `ln r` for a positive rational.
    pub fn ln_rational(r: &Rational, prec: u32) -> Self {
        assert!(r.is_positive(), "log of a nonpositive rational");
        let (lo, hi) = ln_ratio(r.num(), r.den(), prec);
        Enclosure { lo, hi, prec }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn with_precision(mut self, prec: u32) -> Self {
        self.lo = self.lo.round(prec, Dir::Down);
        self.hi = self.hi.round(prec, Dir::Up);
        self.prec = prec;
        self
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo, self.prec, Dir::Up)
    }

    pub fn width_f64(&self) -> f64 {
        self.width().to_f64()
    }

    pub fn mid_f64(&self) -> f64 {
        (self.lo.to_f64() + self.hi.to_f64()) / 2.0
    }

    pub fn mid(&self) -> Dyadic {
        self.lo.exact_add(&self.hi).shl(-1)
    }

    pub fn contains_rational(&self, r: &Rational) -> bool {
        self.lo.to_rational() <= *r && *r <= self.hi.to_rational()
    }

    pub fn contains(&self, o: &Enclosure) -> bool {
        self.lo <= o.lo && o.hi <= self.hi
    }

    pub fn overlaps(&self, o: &Enclosure) -> bool {
        self.lo <= o.hi && o.lo <= self.hi
    }

    /// True when every point of `self` is `<=` every point of `o`.
    pub fn certainly_le(&self, o: &Enclosure) -> bool {
        self.hi <= o.lo
    }

    pub fn certainly_lt(&self, o: &Enclosure) -> bool {
        self.hi < o.lo
    }

    /// True when some point of `self` is `<=` some point of `o`.
    pub fn possibly_le(&self, o: &Enclosure) -> bool {
        self.lo <= o.hi
    }

    pub fn is_nonnegative(&self) -> bool {
        !self.lo.is_negative()
    }

    pub fn hull(&self, o: &Enclosure) -> Enclosure {
        Enclosure {
            lo: self.lo.clone().min(o.lo.clone()),
            hi: self.hi.clone().max(o.hi.clone()),
            prec: self.prec.max(o.prec),
        }
    }

    pub fn intersect(&self, o: &Enclosure) -> Option<Enclosure> {
        let lo = self.lo.clone().max(o.lo.clone());
        let hi = self.hi.clone().min(o.hi.clone());
        (lo <= hi).then(|| Enclosure {
            lo,
            hi,
            prec: self.prec.max(o.prec),
        })
    }

    /// Pointwise maximum of two enclosed values.
    pub fn max(&self, o: &Enclosure) -> Enclosure {
        Enclosure {
            lo: self.lo.clone().max(o.lo.clone()),
            hi: self.hi.clone().max(o.hi.clone()),
            prec: self.prec.max(o.prec),
        }
    }

    pub fn min(&self, o: &Enclosure) -> Enclosure {
        Enclosure {
            lo: self.lo.clone().min(o.lo.clone()),
            hi: self.hi.clone().min(o.hi.clone()),
            prec: self.prec.max(o.prec),
        }
    }

    /// Widen symmetrically by `r >= 0`.
    pub fn inflate(&self, r: &Dyadic) -> Enclosure {
        Enclosure {
            lo: self.lo.sub(r, self.prec, Dir::Down),
            hi: self.hi.add(r, self.prec, Dir::Up),
            prec: self.prec,
        }
    }

    pub fn recip(&self) -> Enclosure {
        Enclosure::from_int(1, self.prec).div(self)
    }

    /// Quotient; panics if the divisor straddles zero.
    pub fn div(&self, o: &Enclosure) -> Enclosure {
        assert!(
            o.lo.is_positive() || o.hi.is_negative(),
            "division by an enclosure containing zero"
        );
        let p = self.prec.max(o.prec);
        let mut lo: Option<Dyadic> = None;
        let mut hi: Option<Dyadic> = None;
        for a in [&self.lo, &self.hi] {
            for b in [&o.lo, &o.hi] {
                let d = a.div(b, p, Dir::Down);
                let u = a.div(b, p, Dir::Up);
                lo = Some(match lo {
                    Some(x) if x <= d => x,
                    _ => d,
                });
                hi = Some(match hi {
                    Some(x) if x >= u => x,
                    _ => u,
                });
            }
        }
        Enclosure {
            lo: lo.unwrap(),
            hi: hi.unwrap(),
            prec: p,
        }
    }

    pub fn mul_rational(&self, r: &Rational) -> Enclosure {
        if r.den().bits() <= 1 {
            return self * &Enclosure::from_int(r.num().clone(), self.prec);
        }
        self * &Enclosure::from_rational(r, self.prec)
    }

    pub fn div_rational(&self, r: &Rational) -> Enclosure {
        self.div(&Enclosure::from_rational(r, self.prec))
    }

    pub fn add_rational(&self, r: &Rational) -> Enclosure {
        self + &Enclosure::from_rational(r, self.prec)
    }

    /// Natural log; panics unless the enclosure is strictly positive.
    pub fn ln(&self) -> Enclosure {
        assert!(self.lo.is_positive(), "log of an enclosure reaching zero");
        Enclosure {
            lo: ln_dyadic(&self.lo, self.prec, Dir::Down),
            hi: ln_dyadic(&self.hi, self.prec, Dir::Up),
            prec: self.prec,
        }
    }

    pub fn sqrt(&self) -> Enclosure {
        assert!(
            !self.lo.is_negative(),
            "square root of a negative enclosure"
        );
        Enclosure {
            lo: self.lo.sqrt(self.prec, Dir::Down),
            hi: self.hi.sqrt(self.prec, Dir::Up),
            prec: self.prec,
        }
    }

    pub fn square(&self) -> Enclosure {
        if !self.lo.is_negative() || !self.hi.is_positive() {
            return self * self;
        }
        let m = self.lo.abs().max(self.hi.abs());
        Enclosure {
            lo: Dyadic::zero(),
            hi: m.mul(&m, self.prec, Dir::Up),
            prec: self.prec,
        }
    }

    /// Decimal endpoints with enough digits for the working precision.
    pub fn decimal_bounds(&self) -> (String, String) {
        let digits = (self.prec as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1;
        (
            self.lo.to_decimal(digits, Dir::Down),
            self.hi.to_decimal(digits, Dir::Up),
        )
    }

    pub fn sum<'a>(items: impl IntoIterator<Item = &'a Enclosure>, prec: u32) -> Enclosure {
        items
            .into_iter()
            .fold(Enclosure::zero(prec), |acc, e| &acc + e)
    }
}

impl fmt::Debug for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}]",
            self.lo.to_decimal(20, Dir::Down),
            self.hi.to_decimal(20, Dir::Up)
        )
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lo, hi) = self.decimal_bounds();
        write!(f, "[{lo}, {hi}]")
    }
}

impl Serialize for Enclosure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let (lo, hi) = self.decimal_bounds();
        let mut st = s.serialize_struct("Enclosure", 2)?;
        st.serialize_field("lo", &lo)?;
        st.serialize_field("hi", &hi)?;
        st.end()
    }
}

impl Add<&Enclosure> for &Enclosure {
    type Output = Enclosure;
    fn add(self, o: &Enclosure) -> Enclosure {
        let p = self.prec.max(o.prec);
        Enclosure {
            lo: self.lo.add(&o.lo, p, Dir::Down),
            hi: self.hi.add(&o.hi, p, Dir::Up),
            prec: p,
        }
    }
}

impl Sub<&Enclosure> for &Enclosure {
    type Output = Enclosure;
    fn sub(self, o: &Enclosure) -> Enclosure {
        let p = self.prec.max(o.prec);
        Enclosure {
            lo: self.lo.sub(&o.hi, p, Dir::Down),
            hi: self.hi.sub(&o.lo, p, Dir::Up),
            prec: p,
        }
    }
}

impl Mul<&Enclosure> for &Enclosure {
    type Output = Enclosure;
    fn mul(self, o: &Enclosure) -> Enclosure {
        let p = self.prec.max(o.prec);
        let products = [
            self.lo.exact_mul(&o.lo),
            self.lo.exact_mul(&o.hi),
            self.hi.exact_mul(&o.lo),
            self.hi.exact_mul(&o.hi),
        ];
        let lo = products.iter().min().unwrap().round(p, Dir::Down);
        let hi = products.iter().max().unwrap().round(p, Dir::Up);
        Enclosure { lo, hi, prec: p }
    }
}

impl Neg for &Enclosure {
    type Output = Enclosure;
    fn neg(self) -> Enclosure {
        Enclosure {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
            prec: self.prec,
        }
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr<Enclosure> for Enclosure {
            type Output = Enclosure;
            fn $m(self, o: Enclosure) -> Enclosure {
                (&self).$m(&o)
            }
        }
        impl $tr<&Enclosure> for Enclosure {
            type Output = Enclosure;
            fn $m(self, o: &Enclosure) -> Enclosure {
                (&self).$m(o)
            }
        }
        impl $tr<Enclosure> for &Enclosure {
            type Output = Enclosure;
            fn $m(self, o: Enclosure) -> Enclosure {
                self.$m(&o)
            }
        }
    };
}

owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl Neg for Enclosure {
    type Output = Enclosure;
    fn neg(self) -> Enclosure {
        -&self
    }
}
