//! Rigorous table of `m(s) = ∫₀¹ Φ(u) (1 + s u)⁻³ du` for `s` in [0, 1].
//!
//! `m` is the fixed point of `m(s) = ℓ(s) + Σ_{n≥1} (n+s)⁻³ m(1/(n+s))` with
//! `ℓ(s) = log(1+s)/(2s) + 1/(2(1+s))`. Bounds are held on a uniform grid and
//! extended off-grid by cubic interpolation plus a fourth-derivative remainder.
//! The right-hand side maps valid bounds to valid bounds, so it is iterated in
//! place and intersected until the widths stop shrinking.
//!
//! Facts used: `m` is decreasing and convex, `m'' ≤ 12 μ₂`, `m'''' ≤ 360 μ₄`
//! with `μⱼ = ∫ uʲ Φ`, and `μⱼ ≤ ∫ uʲ log(1/u) + m(1) + (ζ(j+3) − 1) m(0)`.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::interval::Iv;
use crate::enclosure::Enclosure;
use crate::rational::Rational;

const GRID: usize = 1024;
const DELTA: f64 = 1.0 / GRID as f64;
/// Terms summed one by one when building the table.
const BUILD_TERMS: u64 = 1000;
/// Terms summed one by one before a series switches to its tail bound.
const SERIES_TERMS: u64 = 2000;
/// Ψ(1) = Σ ∫γₖ ≤ Σ 2/F_{k+1} ≤ 2 · 3.36.
const INITIAL_UPPER: f64 = 6.72;
/// Absolute allowance for rounding inside one interpolation.
const ROUNDING: f64 = 1e-13;

pub(crate) struct Moments {
    lo: Vec<f64>,
    hi: Vec<f64>,
    m2: f64,
    m4: f64,
    slope0: f64,
    iterations: usize,
}

static TABLE: OnceLock<Moments> = OnceLock::new();

pub(crate) fn table() -> &'static Moments {
    TABLE.get_or_init(Moments::build)
}

fn mul_pos(a: Iv, b: Iv) -> Iv {
    Iv::new((a.lo * b.lo).next_down().max(0.0), (a.hi * b.hi).next_up())
}

impl Moments {
    fn build() -> Moments {
        let ell: Vec<Iv> = (0..=GRID).map(ell_at).collect();
        let mut t = Moments {
            lo: ell.iter().map(|e| e.lo).collect(),
            hi: vec![INITIAL_UPPER; GRID + 1],
            m2: 0.0,
            m4: 0.0,
            slope0: f64::NEG_INFINITY,
            iterations: 0,
        };
        t.refresh();
        let mut width = t.max_width();
        while t.iterations < 500 {
            for (i, e) in ell.iter().enumerate() {
                let r = t.rhs(i, *e);
                let lo = t.lo[i].max(r.lo);
                let hi = t.hi[i].min(r.hi);
                assert!(lo <= hi, "moment bounds crossed at grid point {i}");
                t.lo[i] = lo;
                t.hi[i] = hi;
            }
            t.refresh();
            t.iterations += 1;
            let w = t.max_width();
            if w > 0.99 * width {
                break;
            }
            width = w;
        }
        t
    }

    fn refresh(&mut self) {
        let (m0, m1) = (self.hi[0], self.hi[GRID]);
        let up = |x: f64| x * (1.0 + 1e-12);
        self.m2 = up(12.0 * (1.0 / 9.0 + m1 + 0.037 * m0)).min(up(12.0 * m0));
        self.m4 = up(360.0 * (1.0 / 25.0 + m1 + 0.00835 * m0)).min(up(360.0 * m0));
        let mut best = f64::NEG_INFINITY;
        let mut d = DELTA;
        for _ in 0..6 {
            let chord = Iv::exact(self.interp(d, false)).sub(Iv::exact(m0));
            let chord = chord.mul(Iv::exact(d).recip());
            let curve = Iv::exact(self.m2 / 2.0).mul(Iv::exact(d));
            best = best.max(chord.sub(curve).lo);
            d /= 8.0;
        }
        self.slope0 = self.slope0.max(best);
    }

    fn max_width(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| h - l)
            .fold(0.0, f64::max)
    }

    fn rhs(&self, i: usize, ell: Iv) -> Iv {
        let s = i as f64 * DELTA;
        let mut acc = ell;
        for n in 1..=BUILD_TERMS {
            acc = acc.add(self.term(Iv::exact(n as f64 + s)));
        }
        acc.add(self.tail(Iv::exact((BUILD_TERMS + 1) as f64 + s), None))
    }

    /// Bound on `m` at the exact point `x` in [0, 1].
    fn interp(&self, x: f64, upper: bool) -> f64 {
        let gx = x * GRID as f64;
        let j0 = (gx.floor() as usize).saturating_sub(1).min(GRID - 3);
        let th = gx - j0 as f64;
        let (a, b, c) = (th - 1.0, th - 2.0, th - 3.0);
        let w = [
            -(a * b * c) / 6.0,
            th * b * c / 2.0,
            -(th * a * c) / 2.0,
            th * a * b / 6.0,
        ];
        let mut v = 0.0;
        for (k, wk) in w.iter().enumerate() {
            let y = if (*wk >= 0.0) == upper {
                self.hi[j0 + k]
            } else {
                self.lo[j0 + k]
            };
            v += wk * y;
        }
        let d4 = DELTA * DELTA * DELTA * DELTA;
        let err = self.m4 / 24.0 * d4 * (th * a * b * c).abs() * (1.0 + 1e-9) + ROUNDING;
        if upper {
            (v + err).next_up()
        } else {
            (v - err).next_down().max(0.0)
        }
    }

    /// Bounds on `m(t)` for every `t` in the interval.
    pub fn at(&self, t: Iv) -> Iv {
        let lo = self.interp(t.hi.min(1.0), false);
        let hi = self.interp(t.lo.max(0.0), true);
        Iv::new(lo.min(hi), hi)
    }

    pub fn m0(&self) -> Iv {
        Iv::new(self.lo[0], self.hi[0])
    }

    /// `x⁻³ m(1/x)` for `x >= 1`.
    pub fn term(&self, x: Iv) -> Iv {
        let t = x.recip();
        mul_pos(mul_pos(mul_pos(t, t), t), self.at(t))
    }

    /// Upper bound on `(m(τ) − m(0))/τ`, hence on the same quotient at any `t <= τ`.
    fn slope_up(&self, tau: f64) -> f64 {
        let num = Iv::exact(self.interp(tau, true)).sub(Iv::exact(self.lo[0]));
        num.mul(Iv::exact(tau).recip()).hi
    }

    /// `Σ_{j=0}^{N-1} (a+j)⁻³ m(1/(a+j))` for `a >= 1`, with `N` infinite when `None`.
    fn tail(&self, a: Iv, count: Option<Iv>) -> Iv {
        let (z3, z4) = match count {
            None => (hurwitz(3, a), hurwitz(4, a)),
            Some(n) => (hurwitz_segment(3, a, n), hurwitz_segment(4, a, n)),
        };
        let tau = a.recip().hi;
        let g = Iv::new(self.slope0.min(0.0), self.slope_up(tau).max(self.slope0));
        self.m0().mul(z3).add(g.mul(z4))
    }

    /// `Σ_{n=start}^{end} (n+c)⁻³ m(1/(n+c))` for `start >= 1`, `c` in [0, 1];
    /// also returns how many terms were evaluated one at a time.
    pub fn series(&self, c: Iv, start: &BigInt, end: Option<&BigInt>) -> (Iv, u64) {
        let mut acc = Iv::exact(0.0);
        let mut next = start.clone();
        let mut explicit = 0;
        if let Some(s) = start.to_u64().filter(|s| *s < 1 << 52) {
            let mut stop = s + SERIES_TERMS;
            if let Some(e) = end.and_then(|e| e.to_u64()) {
                stop = stop.min(e + 1);
            }
            for n in s..stop {
                acc = acc.add(self.term(Iv::exact(n as f64).add(c)));
            }
            explicit = stop - s;
            next = BigInt::from(stop);
        }
        let count = end.map(|e| e - &next + 1);
        if count.as_ref().is_some_and(|k| k <= &BigInt::from(0)) {
            return (acc, explicit);
        }
        let a = Iv::of_int(&next).add(c);
        (
            acc.add(self.tail(a, count.as_ref().map(Iv::of_int))),
            explicit,
        )
    }

    #[cfg(test)]
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    #[cfg(test)]
    pub fn max_grid_width(&self) -> f64 {
        self.max_width()
    }
}

/// ℓ at grid point `i`, from a high-precision enclosure.
fn ell_at(i: usize) -> Iv {
    if i == 0 {
        return Iv::exact(1.0);
    }
    let prec = 96;
    let s = Rational::new(i as i64, GRID as i64).unwrap();
    let one_s = &s + &Rational::one();
    let log = Enclosure::ln_rational(&one_s, prec);
    let e = &log.div_rational(&(&s * &Rational::from(2)))
        + &Enclosure::from_rational(&(&one_s * &Rational::from(2)).recip(), prec);
    let (mut lo, mut hi) = (e.lo().to_f64(), e.hi().to_f64());
    for _ in 0..2 {
        lo = lo.next_down();
        hi = hi.next_up();
    }
    Iv::new(lo, hi)
}

/// Euler-Maclaurin pieces `a^{1-k}/(k-1) + a^{-k}/2 + k a^{-k-1}/12` and the
/// first omitted term `k(k+1)(k+2) a^{-k-3}/720` at an exact point.
fn em_parts(k: u32, a: f64) -> (Iv, Iv) {
    let inv = Iv::exact(a).recip();
    let p = |j: u32| inv.powi(j);
    let kf = Iv::exact(k as f64);
    let s = p(k - 1)
        .mul(Iv::exact((k - 1) as f64).recip())
        .add(p(k).mul(Iv::exact(0.5)))
        .add(p(k + 1).mul(kf).mul(Iv::exact(12.0).recip()));
    let t = p(k + 3)
        .mul(Iv::exact((k * (k + 1) * (k + 2)) as f64))
        .mul(Iv::exact(720.0).recip());
    (s, t)
}

/// Hurwitz zeta `ζ(k, a) = Σ_{j>=0} (a+j)^{-k}` for `a >= 1`; the expansion
/// brackets the value between `S` and `S - T`.
pub(crate) fn hurwitz(k: u32, a: Iv) -> Iv {
    let (s_hi, _) = em_parts(k, a.lo);
    let (s_lo, t_lo) = em_parts(k, a.hi);
    Iv::new(s_lo.sub(t_lo).lo.max(0.0), s_hi.hi)
}

/// `a^{-j} - (a+n)^{-j}` without cancellation when `n` is small next to `a`.
fn power_gap(j: u32, a: Iv, n: Iv) -> Iv {
    let b = a.add(n);
    let delta = n.mul(b.recip());
    if delta.hi >= 0.5 {
        let d = a.recip().powi(j).sub(b.recip().powi(j));
        return Iv::new(d.lo.max(0.0), d.hi);
    }
    // 1 - (1-δ)^j = Σ_{i>=1} C(j,i) (-1)^{i+1} δ^i
    let mut poly = Iv::exact(0.0);
    let mut binom = 1.0;
    for i in 1..=j {
        binom = binom * (j - i + 1) as f64 / i as f64;
        let term = delta.powi(i).mul(Iv::exact(binom));
        poly = if i % 2 == 1 {
            poly.add(term)
        } else {
            poly.sub(term)
        };
    }
    let d = a.recip().powi(j).mul(poly);
    Iv::new(d.lo.max(0.0), d.hi)
}

/// `Σ_{j=0}^{n-1} (a+j)^{-k}` for `a >= 1`, `n >= 1`.
pub(crate) fn hurwitz_segment(k: u32, a: Iv, n: Iv) -> Iv {
    let kf = Iv::exact(k as f64);
    let main = power_gap(k - 1, a, n)
        .mul(Iv::exact((k - 1) as f64).recip())
        .add(power_gap(k, a, n).mul(Iv::exact(0.5)))
        .add(power_gap(k + 1, a, n).mul(kf).mul(Iv::exact(12.0).recip()));
    let (_, t_a) = em_parts(k, a.lo);
    let (_, t_b) = em_parts(k, a.add(n).lo);
    let r = main.sub(t_a).lo.max(0.0);
    Iv::new(r, main.add(t_b).hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct(k: i32, a: f64, n: usize) -> f64 {
        (0..n).rev().map(|j| (a + j as f64).powi(-k)).sum()
    }

    #[test]
    fn hurwitz_brackets_direct_sums() {
        for a in [1.0, 1.5, 7.25, 2000.0, 1e6] {
            for k in [3u32, 4] {
                let exact = direct(k as i32, a, 2_000_000) + hurwitz(k, Iv::exact(a + 2e6)).lo;
                let z = hurwitz(k, Iv::exact(a));
                assert!(
                    z.lo <= exact * (1.0 + 1e-12) && exact <= z.hi * (1.0 + 1e-12),
                    "{k} {a}"
                );
                if a >= 1000.0 {
                    assert!(z.width() <= 1e-12 * z.hi, "{k} {a} {z:?}");
                }
            }
        }
    }

    #[test]
    fn segments_match_direct_sums() {
        for (a, n) in [
            (1.0, 10.0),
            (5.5, 1000.0),
            (1e12, 3.0),
            (1e9, 1e6),
            (3.0, 1e9),
        ] {
            let z = hurwitz_segment(3, Iv::exact(a), Iv::exact(n));
            let reference = if n <= 1e6 {
                direct(3, a, n as usize)
            } else {
                hurwitz(3, Iv::exact(a)).hi - hurwitz(3, Iv::exact(a + n)).lo
            };
            assert!(
                z.lo <= reference * (1.0 + 1e-12) && reference <= z.hi * (1.0 + 1e-12),
                "{a} {n} {z:?} {reference}"
            );
            if a >= 1000.0 {
                assert!(z.width() <= 1e-9 * reference, "{a} {n} {z:?}");
            }
        }
    }

    #[test]
    fn table_is_tight_and_consistent() {
        let t = table();
        assert!(t.max_grid_width() < 1e-8, "width {}", t.max_grid_width());
        let m0 = t.m0();
        // m(0) = ∫Φ exceeds ∫log(1/u) = 1
        assert!(m0.lo > 1.0 && m0.hi < INITIAL_UPPER);
        for i in 0..GRID {
            assert!(t.hi[i + 1] <= t.hi[i] + 1e-8, "not decreasing at {i}");
        }
        // the slope bound is a lower bound of a negative derivative
        assert!(t.slope0 < 0.0 && t.slope0 > -3.0 * m0.hi);
    }

    #[test]
    fn series_tail_agrees_with_explicit_terms() {
        let t = table();
        let c = Iv::exact(0.375);
        let (direct, explicit) = t.series(c, &BigInt::from(3000), Some(&BigInt::from(9000)));
        assert_eq!(explicit, 2000);
        let mut acc = Iv::exact(0.0);
        for n in 3000..=9000u64 {
            acc = acc.add(t.term(Iv::exact(n as f64 + 0.375)));
        }
        assert!(direct.lo <= acc.hi && acc.lo <= direct.hi);
        assert!(
            direct.width() < 1e-7 * direct.hi,
            "{direct:?} {acc:?} {} {}",
            t.iterations(),
            t.max_grid_width()
        );
    }
}
