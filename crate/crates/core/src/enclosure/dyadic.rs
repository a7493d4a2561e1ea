use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rational::Rational;

/// Rounding direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dir {
    Down,
    Up,
}

impl Dir {
    pub fn flip(self) -> Dir {
        match self {
            Dir::Down => Dir::Up,
            Dir::Up => Dir::Down,
        }
    }
}

/// The exact binary number `man * 2^exp`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    man: BigInt,
    exp: i64,
}

pub(crate) fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

pub(crate) fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

/// `floor(a / 2^s)` or `ceil(a / 2^s)`.
pub(crate) fn shr_round(a: &BigInt, s: u64, dir: Dir) -> BigInt {
    match dir {
        Dir::Down => a >> s,
        Dir::Up => -((-a) >> s),
    }
}

impl Dyadic {
    pub fn new(man: BigInt, exp: i64) -> Self {
        Dyadic { man, exp }.normalized()
    }

    pub fn zero() -> Self {
        Dyadic {
            man: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Dyadic::new(n.into(), 0)
    }

    /// Exact conversion of a finite double.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "non-finite double");
        if x == 0.0 {
            return Dyadic::zero();
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let e = ((bits >> 52) & 0x7ff) as i64;
        let frac = (bits & ((1u64 << 52) - 1)) as i64;
        let (m, ex) = if e == 0 {
            (frac, -1074)
        } else {
            (frac | (1i64 << 52), e - 1075)
        };
        Dyadic::new(BigInt::from(sign * m), ex)
    }

    fn normalized(mut self) -> Self {
        if self.man.is_zero() {
            self.exp = 0;
            return self;
        }
        let tz = self.man.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.man >>= tz;
            self.exp += tz as i64;
        }
        self
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.man
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn sign(&self) -> Sign {
        self.man.sign()
    }

    pub fn is_negative(&self) -> bool {
        self.man.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.man.is_positive()
    }

    /// Position just above the leading bit: `|x| < 2^top`.
    pub(crate) fn top(&self) -> i64 {
        self.exp + self.man.bits() as i64
    }

    pub fn neg(&self) -> Self {
        Dyadic {
            man: -&self.man,
            exp: self.exp,
        }
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            man: self.man.abs(),
            exp: self.exp,
        }
    }

    /// Round to at most `prec` significant bits in direction `dir`.
    pub fn round(&self, prec: u32, dir: Dir) -> Self {
        let bits = self.man.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let s = bits - prec as u64;
        Dyadic::new(shr_round(&self.man, s, dir), self.exp + s as i64)
    }

    pub fn to_rational(&self) -> Rational {
        if self.exp >= 0 {
            Rational::from_integer(&self.man << self.exp as u64)
        } else {
            Rational::from_big(self.man.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    /// Round a rational to `prec` bits in direction `dir`.
    pub fn from_rational(r: &Rational, prec: u32, dir: Dir) -> Self {
        Dyadic::from_int(r.num().clone()).div(&Dyadic::from_int(r.den().clone()), prec, dir)
    }

    pub(crate) fn exact_add(&self, o: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(o.exp);
        let a = &self.man << (self.exp - e) as u64;
        let b = &o.man << (o.exp - e) as u64;
        Dyadic::new(a + b, e)
    }

    /// `self + o` rounded to `prec` bits.
    pub fn add(&self, o: &Dyadic, prec: u32, dir: Dir) -> Dyadic {
        if self.is_zero() {
            return o.round(prec, dir);
        }
        if o.is_zero() {
            return self.round(prec, dir);
        }
        let (big, small) = if self.top() >= o.top() {
            (self, o)
        } else {
            (o, self)
        };
        let floor_pos = big.exp.min(big.top() - prec as i64) - 4;
        if small.top() < floor_pos {
            // `small` sits far below the last kept bit of `big`; replace it by a
            // one-sided bound of comparable size.
            let t = Dyadic::new(BigInt::one(), floor_pos);
            let sticky = match (dir, small.is_positive()) {
                (Dir::Down, true) | (Dir::Up, false) => Dyadic::zero(),
                (Dir::Down, false) => t.neg(),
                (Dir::Up, true) => t,
            };
            return big.exact_add(&sticky).round(prec, dir);
        }
        big.exact_add(small).round(prec, dir)
    }

    pub fn sub(&self, o: &Dyadic, prec: u32, dir: Dir) -> Dyadic {
        self.add(&o.neg(), prec, dir)
    }

    pub fn exact_mul(&self, o: &Dyadic) -> Dyadic {
        Dyadic::new(&self.man * &o.man, self.exp + o.exp)
    }

    pub fn mul(&self, o: &Dyadic, prec: u32, dir: Dir) -> Dyadic {
        self.exact_mul(o).round(prec, dir)
    }

    /// Multiply by `2^k` exactly.
    pub fn shl(&self, k: i64) -> Dyadic {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic {
            man: self.man.clone(),
            exp: self.exp + k,
        }
    }

    /// `self / o` rounded; panics on division by zero.
    pub fn div(&self, o: &Dyadic, prec: u32, dir: Dir) -> Dyadic {
        assert!(!o.is_zero(), "division by zero");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let want = prec as i64 + 2 + o.man.bits() as i64 - self.man.bits() as i64;
        let s = want.max(0);
        let a = &self.man << s as u64;
        let (num, den) = if o.man.is_negative() {
            (-a, -&o.man)
        } else {
            (a, o.man.clone())
        };
        let q = match dir {
            Dir::Down => floor_div(&num, &den),
            Dir::Up => ceil_div(&num, &den),
        };
        Dyadic::new(q, self.exp - o.exp - s).round(prec, dir)
    }

    /// Square root of a nonnegative value, rounded.
    pub fn sqrt(&self, prec: u32, dir: Dir) -> Dyadic {
        assert!(!self.is_negative(), "square root of a negative number");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let bits = self.man.bits() as i64;
        let mut s = (2 * prec as i64 + 4 - bits).max(0);
        if (self.exp - s).rem_euclid(2) != 0 {
            s += 1;
        }
        let r = &self.man << s as u64;
        let mut root = r.sqrt();
        if dir == Dir::Up && &root * &root != r {
            root += 1;
        }
        Dyadic::new(root, (self.exp - s) / 2).round(prec, dir)
    }

    /// Step one unit of the `prec`-bit grid outward in direction `dir`.
    pub fn pad(&self, prec: u32, dir: Dir) -> Dyadic {
        let top = if self.is_zero() { 0 } else { self.top() };
        let ulp = Dyadic::new(BigInt::one(), top - prec as i64);
        match dir {
            Dir::Up => self.exact_add(&ulp),
            Dir::Down => self.exact_add(&ulp.neg()),
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.man.bits() as i64;
        let (m, e) = if bits > 62 {
            (&self.man >> (bits - 62) as u64, self.exp + bits - 62)
        } else {
            (self.man.clone(), self.exp)
        };
        let m = m.to_f64().unwrap_or(0.0);
        if e > 2000 {
            return m.signum() * f64::INFINITY;
        }
        if e < -2200 {
            return 0.0;
        }
        // split the scaling so intermediate powers stay finite
        let half = e / 2;
        m * 2f64.powi(half as i32) * 2f64.powi((e - half) as i32)
    }

    /// Decimal string with `digits` significant digits, rounded in `dir`.
    pub fn to_decimal(&self, digits: usize, dir: Dir) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let digits = digits.max(1) as i64;
        // estimate of floor(log10 |x|)
        let e10 = ((self.top() - 1) as f64 * std::f64::consts::LOG10_2).floor() as i64;
        let mut scale = digits - 1 - e10;
        for _ in 0..8 {
            let n = self.scaled_int(scale, dir);
            let len = n.abs().to_string().len() as i64;
            if len > digits {
                scale -= len - digits;
            } else if len < digits {
                scale += digits - len;
            } else {
                return format_scientific(&n, scale, digits as usize);
            }
        }
        // a carry can bounce between two lengths; accept one extra digit
        let n = self.scaled_int(scale, dir);
        let len = n.abs().to_string().len();
        format_scientific(&n, scale, len)
    }

    /// `floor` or `ceil` of `self * 10^scale`.
    fn scaled_int(&self, scale: i64, dir: Dir) -> BigInt {
        let ten = BigInt::from(10u32);
        let (mut num, mut den) = (self.man.clone(), BigInt::one());
        if scale >= 0 {
            num *= num_traits::pow(ten, scale as usize);
        } else {
            den *= num_traits::pow(ten, (-scale) as usize);
        }
        if self.exp >= 0 {
            num <<= self.exp as u64;
        } else {
            den <<= (-self.exp) as u64;
        }
        match dir {
            Dir::Down => floor_div(&num, &den),
            Dir::Up => ceil_div(&num, &den),
        }
    }
}

fn format_scientific(n: &BigInt, scale: i64, digits: usize) -> String {
    let neg = n.is_negative();
    let s = n.abs().to_string();
    let exp10 = digits as i64 - 1 - scale;
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if (-5..=20).contains(&exp10) {
        if exp10 >= 0 {
            let int_len = (exp10 + 1) as usize;
            if int_len >= s.len() {
                out.push_str(&s);
                out.push_str(&"0".repeat(int_len - s.len()));
            } else {
                out.push_str(&s[..int_len]);
                out.push('.');
                out.push_str(&s[int_len..]);
            }
        } else {
            out.push_str("0.");
            out.push_str(&"0".repeat((-exp10 - 1) as usize));
            out.push_str(&s);
        }
    } else {
        out.push_str(&s[..1]);
        if s.len() > 1 {
            out.push('.');
            out.push_str(&s[1..]);
        }
        out.push_str(&format!("e{exp10}"));
    }
    out
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, o: &Self) -> Ordering {
        let (sa, sb) = (self.man.sign(), o.man.sign());
        if sa != sb {
            return sign_rank(sa).cmp(&sign_rank(sb));
        }
        if sa == Sign::NoSign {
            return Ordering::Equal;
        }
        let (ta, tb) = (self.top(), o.top());
        if ta != tb {
            let by_mag = ta.cmp(&tb);
            return if sa == Sign::Plus {
                by_mag
            } else {
                by_mag.reverse()
            };
        }
        let e = self.exp.min(o.exp);
        let a = &self.man << (self.exp - e) as u64;
        let b = &o.man << (o.exp - e) as u64;
        a.cmp(&b)
    }
}

fn sign_rank(s: Sign) -> i8 {
    match s {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(20, Dir::Down))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    #[test]
    fn shift_right_floors_negative() {
        assert_eq!(BigInt::from(-5) >> 1u32, BigInt::from(-3));
        assert_eq!(shr_round(&BigInt::from(-5), 1, Dir::Up), BigInt::from(-2));
    }

    #[test]
    fn division_directed() {
        let one = Dyadic::from_int(1);
        let three = Dyadic::from_int(3);
        let lo = one.div(&three, 64, Dir::Down);
        let hi = one.div(&three, 64, Dir::Up);
        assert!(lo.to_rational() < r(1, 3));
        assert!(hi.to_rational() > r(1, 3));
        let nlo = one.neg().div(&three, 64, Dir::Down);
        assert!(nlo.to_rational() < r(-1, 3));
    }

    #[test]
    fn far_apart_addition_is_one_sided() {
        let big = Dyadic::from_int(1);
        let tiny = Dyadic::new(BigInt::from(1), -100_000);
        let lo = big.add(&tiny, 64, Dir::Down);
        let hi = big.add(&tiny, 64, Dir::Up);
        assert_eq!(lo, big);
        assert!(hi > big);
        let lo2 = big.add(&tiny.neg(), 64, Dir::Down);
        assert!(lo2 < big);
        assert_eq!(big.add(&tiny.neg(), 64, Dir::Up), big);
    }

    #[test]
    fn sqrt_brackets() {
        let two = Dyadic::from_int(2);
        let lo = two.sqrt(100, Dir::Down);
        let hi = two.sqrt(100, Dir::Up);
        assert!(lo.exact_mul(&lo) < two);
        assert!(hi.exact_mul(&hi) > two);
        assert!(hi.sub(&lo, 200, Dir::Up) <= Dyadic::new(BigInt::one(), -95));
    }

    #[test]
    fn decimals() {
        let x = Dyadic::from_rational(&r(1, 3), 128, Dir::Down);
        assert_eq!(x.to_decimal(5, Dir::Down), "0.33333");
        assert_eq!(x.to_decimal(5, Dir::Up), "0.33334");
        let y = Dyadic::new(BigInt::from(1), -100);
        assert_eq!(y.to_decimal(3, Dir::Down), "7.88e-31");
        assert_eq!(Dyadic::from_int(1000).to_decimal(3, Dir::Down), "1000");
        assert_eq!(Dyadic::from_int(-25).to_decimal(4, Dir::Down), "-25.00");
    }

    #[test]
    fn f64_round_trip() {
        for x in [0.1, -3.5, 1e-300, 5e-324, 1.7e308] {
            assert_eq!(Dyadic::from_f64(x).to_f64(), x);
        }
    }

    #[test]
    fn ordering() {
        let a = Dyadic::from_rational(&r(1, 3), 64, Dir::Down);
        let b = Dyadic::from_rational(&r(1, 3), 64, Dir::Up);
        assert!(a < b);
        assert!(Dyadic::from_int(-1) < Dyadic::zero());
        assert!(Dyadic::new(BigInt::from(-1), 10) < Dyadic::from_int(-1));
    }
}
