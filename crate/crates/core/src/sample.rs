//! Seeded random inputs.

use num_bigint::BigInt;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rational::Rational;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Denominator log-uniform in [2, max_den], numerator uniform and coprime, value in (0, 1).
pub fn random_rational<R: Rng>(rng: &mut R, max_den: u64) -> Rational {
    let max_den = max_den.max(2);
    let q = ((rng.gen::<f64>() * (max_den as f64).ln()).exp().round() as u64).clamp(2, max_den);
    loop {
        let p = rng.gen_range(1..q);
        if p.gcd(&q) == 1 {
            return Rational::from_big(BigInt::from(p), BigInt::from(q));
        }
    }
}

/// Rational uniform on the grid `k / 2^bits` strictly inside (lo, hi).
pub fn random_between<R: Rng>(rng: &mut R, lo: f64, hi: f64, bits: u32) -> Rational {
    let scale = (1u64 << bits) as f64;
    let a = (lo * scale).ceil() as u64 + 1;
    let b = ((hi * scale).floor() as u64).max(a + 1) - 1;
    let k = rng.gen_range(a..=b.max(a));
    Rational::from_big(BigInt::from(k), BigInt::from(1u64) << bits)
}
