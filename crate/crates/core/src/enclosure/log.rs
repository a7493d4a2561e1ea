//! Natural logarithm of positive rationals with a rigorous error bound.
//!
//! `x = y * 2^k` with `y` in [3/4, 3/2), then `ln y = 2 atanh(z)`, `z = (y-1)/(y+1)`,
//! summed in fixed point with separate floor and ceiling tracks.

use std::cell::RefCell;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::dyadic::{ceil_div, floor_div, shr_round, Dir, Dyadic};

/// Fixed-point bounds `[lo, hi] * 2^-w` on `atanh(num/den)` for `0 <= num/den <= 1/3`.
fn atanh_fixed(num: &BigInt, den: &BigInt, w: u64) -> (BigInt, BigInt) {
    debug_assert!(!num.is_negative() && BigInt::from(3) * num <= *den);
    if num.is_zero() {
        return (BigInt::zero(), BigInt::zero());
    }
    let scaled = num << w;
    let z_lo = floor_div(&scaled, den);
    let z_hi = ceil_div(&scaled, den);
    let z2_lo = &z_lo * &z_lo >> w;
    let z2_hi = shr_round(&(&z_hi * &z_hi), w, Dir::Up);
    let (mut p_lo, mut p_hi) = (z_lo, z_hi);
    let (mut s_lo, mut s_hi) = (BigInt::zero(), BigInt::zero());
    let mut i: u64 = 0;
    loop {
        let d = BigInt::from(2 * i + 1);
        s_lo += floor_div(&p_lo, &d);
        s_hi += ceil_div(&p_hi, &d);
        p_lo = &p_lo * &z2_lo >> w;
        p_hi = shr_round(&(&p_hi * &z2_hi), w, Dir::Up);
        i += 1;
        if p_hi.bits() < 2 {
            // remaining terms sum to at most p_hi / (1 - z^2) <= 9/8 p_hi
            s_hi += &p_hi * 2;
            break;
        }
    }
    (s_lo, s_hi)
}

thread_local! {
    static LN2: RefCell<HashMap<u64, (BigInt, BigInt)>> = RefCell::new(HashMap::new());
}

/// Fixed-point bounds on ln 2 = 2 atanh(1/3).
fn ln2_fixed(w: u64) -> (BigInt, BigInt) {
    LN2.with(|c| {
        c.borrow_mut()
            .entry(w)
            .or_insert_with(|| {
                let (lo, hi) = atanh_fixed(&BigInt::one(), &BigInt::from(3), w);
                (lo * 2, hi * 2)
            })
            .clone()
    })
}

/// Bounds `(lo, hi)` on `ln(num/den)`, each rounded outward to `prec` bits and
/// then padded by one more unit in the last place.
pub fn ln_ratio(num: &BigInt, den: &BigInt, prec: u32) -> (Dyadic, Dyadic) {
    assert!(
        num.is_positive() && den.is_positive(),
        "log of a nonpositive number"
    );
    if num == den {
        return (Dyadic::zero(), Dyadic::zero());
    }
    // y = x / 2^k in [3/4, 3/2): 3 den 2^k <= 4 num and 2 num < 3 den 2^k
    let mut k = num.bits() as i64 - den.bits() as i64;
    let scaled = |k: i64| -> (BigInt, BigInt) {
        if k >= 0 {
            (num.clone(), den << k as u64)
        } else {
            (num << (-k) as u64, den.clone())
        }
    };
    let (n, d) = loop {
        let (n, d) = scaled(k);
        if BigInt::from(3) * &d > BigInt::from(4) * &n {
            k -= 1;
        } else if BigInt::from(2) * &n >= BigInt::from(3) * &d {
            k += 1;
        } else {
            break (n, d);
        }
    };
    let (z_num, z_den) = (&n - &d, &n + &d);
    // near 1 the result is small, so widen the fixed point to keep relative accuracy
    let small = if k == 0 {
        z_den.bits().saturating_sub(z_num.bits())
    } else {
        0
    };
    let w = prec as u64 + 40 + small + (64 - (k.unsigned_abs().max(1)).leading_zeros()) as u64;
    let (a_lo, a_hi) = if z_num.is_negative() {
        let (lo, hi) = atanh_fixed(&-z_num, &z_den, w);
        (-hi, -lo)
    } else {
        atanh_fixed(&z_num, &z_den, w)
    };
    let (lo, hi) = if k == 0 {
        (a_lo * 2, a_hi * 2)
    } else {
        let (l2_lo, l2_hi) = ln2_fixed(w);
        let kb = BigInt::from(k);
        if k > 0 {
            (&kb * l2_lo + a_lo * 2, &kb * l2_hi + a_hi * 2)
        } else {
            (&kb * l2_hi + a_lo * 2, &kb * l2_lo + a_hi * 2)
        }
    };
    let lo = Dyadic::new(lo, -(w as i64))
        .round(prec, Dir::Down)
        .pad(prec, Dir::Down);
    let hi = Dyadic::new(hi, -(w as i64))
        .round(prec, Dir::Up)
        .pad(prec, Dir::Up);
    (lo, hi)
}

/// Lower or upper bound on `ln d` for a positive dyadic.
pub fn ln_dyadic(d: &Dyadic, prec: u32, dir: Dir) -> Dyadic {
    assert!(d.is_positive(), "log of a nonpositive number");
    let (num, den) = if d.exponent() >= 0 {
        (d.mantissa() << d.exponent() as u64, BigInt::one())
    } else {
        (
            d.mantissa().clone(),
            BigInt::one() << (-d.exponent()) as u64,
        )
    };
    let (lo, hi) = ln_ratio(&num, &den, prec);
    match dir {
        Dir::Down => lo,
        Dir::Up => hi,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(n: i64, d: i64, expect: f64) {
        let (lo, hi) = ln_ratio(&BigInt::from(n), &BigInt::from(d), 128);
        assert!(lo <= hi);
        assert!(
            (lo.to_f64() - expect).abs() <= 1e-15 * expect.abs().max(1.0),
            "{n}/{d}"
        );
        assert!(hi.sub(&lo, 200, Dir::Up).to_f64() < 1e-36 * expect.abs().max(1.0));
    }

    #[test]
    fn matches_f64() {
        check(2, 1, std::f64::consts::LN_2);
        check(1, 2, -std::f64::consts::LN_2);
        check(7, 5, (7.0f64 / 5.0).ln());
        check(10, 1, 10f64.ln());
        check(1, 1000, (0.001f64).ln());
        check(3, 4, 0.75f64.ln());
        check(3, 2, 1.5f64.ln());
        check(123456789, 1000, (123456.789f64).ln());
    }

    #[test]
    fn one_is_exact() {
        let (lo, hi) = ln_ratio(&BigInt::from(5), &BigInt::from(5), 64);
        assert!(lo.is_zero() && hi.is_zero());
    }

    #[test]
    fn near_one_keeps_relative_accuracy() {
        let big = BigInt::one() << 200u32;
        let (lo, hi) = ln_ratio(&(&big + 1), &big, 64);
        // ln(1 + 2^-200) = 2^-200 - 2^-401 + ...
        let expect = Dyadic::new(BigInt::one(), -200);
        assert!(lo <= expect && lo.to_f64() > 0.0);
        let rel = hi.sub(&lo, 300, Dir::Up).to_f64() / expect.to_f64();
        assert!(rel < 1e-15, "{rel}");
    }

    #[test]
    fn huge_arguments() {
        let x = BigInt::one() << 5000u32;
        let (lo, hi) = ln_ratio(&x, &BigInt::one(), 128);
        let expect = 5000.0 * std::f64::consts::LN_2;
        assert!((lo.to_f64() - expect).abs() < 1e-9);
        assert!(lo < hi);
    }
}
