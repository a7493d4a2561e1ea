//! Double-precision intervals with one-ulp outward widening after every operation.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Iv {
    pub lo: f64,
    pub hi: f64,
}

impl Iv {
    pub fn new(lo: f64, hi: f64) -> Iv {
        debug_assert!(lo <= hi, "inverted interval {lo} {hi}");
        Iv { lo, hi }
    }

    /// A double taken exactly.
    pub fn exact(x: f64) -> Iv {
        Iv { lo: x, hi: x }
    }

    /// Bounds on a nonnegative rational no larger than about 2^1000.
    pub fn of_rational(r: &Rational) -> Iv {
        debug_assert!(!r.is_negative());
        widen(r.to_f64(), 4)
    }

    pub fn of_int(n: &BigInt) -> Iv {
        match n.to_u64() {
            Some(v) if v < 1 << 53 => Iv::exact(v as f64),
            _ => widen(n.to_f64().unwrap_or(f64::INFINITY), 2),
        }
    }

    pub fn add(self, o: Iv) -> Iv {
        Iv {
            lo: (self.lo + o.lo).next_down(),
            hi: (self.hi + o.hi).next_up(),
        }
    }

    pub fn sub(self, o: Iv) -> Iv {
        Iv {
            lo: (self.lo - o.hi).next_down(),
            hi: (self.hi - o.lo).next_up(),
        }
    }

    pub fn mul(self, o: Iv) -> Iv {
        let p = [
            self.lo * o.lo,
            self.lo * o.hi,
            self.hi * o.lo,
            self.hi * o.hi,
        ];
        let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Iv {
            lo: lo.next_down(),
            hi: hi.next_up(),
        }
    }

    /// Reciprocal of a strictly positive interval.
    pub fn recip(self) -> Iv {
        debug_assert!(self.lo > 0.0);
        Iv {
            lo: (1.0 / self.hi).next_down().max(0.0),
            hi: (1.0 / self.lo).next_up(),
        }
    }

    pub fn powi(self, k: u32) -> Iv {
        let mut r = Iv::exact(1.0);
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    #[cfg(test)]
    pub fn width(self) -> f64 {
        self.hi - self.lo
    }
}

fn widen(x: f64, ulps: usize) -> Iv {
    let (mut lo, mut hi) = (x, x);
    for _ in 0..ulps {
        lo = lo.next_down();
        hi = hi.next_up();
    }
    if x >= 0.0 {
        lo = lo.max(0.0);
    }
    if x < 1e-300 {
        hi = hi.max(1e-300);
    }
    Iv { lo, hi }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_bounds_contain_value() {
        for (p, q) in [(1, 3), (2, 7), (123456789, 1000000007), (1, 1)] {
            let r = Rational::new(p, q).unwrap();
            let iv = Iv::of_rational(&r);
            assert!(Rational::parse(&format!("{:e}", iv.lo)).unwrap() <= r);
            assert!(Rational::parse(&format!("{:e}", iv.hi)).unwrap() >= r);
        }
    }

    #[test]
    fn arithmetic_is_outward() {
        let third = Iv::exact(3.0).recip();
        let one = third.mul(Iv::exact(3.0));
        assert!(one.lo < 1.0 && one.hi > 1.0);
        let d = Iv::exact(0.1).sub(Iv::exact(0.1));
        assert!(d.lo < 0.0 && d.hi > 0.0);
    }
}
