//! Double-precision estimates used to cross-check the certified integrator.
//!
//! Nothing here is certified. The moment function is solved by Chebyshev
//! collocation, elementary integrals by tanh-sinh quadrature, and the error
//! heuristic is the change in the estimate when the discretisation is halved.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::cells::{cell_from_word, Cell};
use crate::rational::Rational;

/// An uncertified estimate with a heuristic error.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct OracleEstimate {
    pub estimate: f64,
    pub error: f64,
}

pub const DEFAULT_SUBDIVISIONS: usize = 16;

/// Abscissae and weights of tanh-sinh quadrature on [0, 1] with step `h`,
/// given as (distance to 0, distance to 1, weight).
fn tanh_sinh(h: f64) -> Vec<(f64, f64, f64)> {
    let mut out = Vec::new();
    let kmax = (4.0 / h).ceil() as i64;
    for k in -kmax..=kmax {
        let t = k as f64 * h;
        let y = PI / 2.0 * t.sinh();
        let d0 = 1.0 / (1.0 + (-2.0 * y).exp());
        let d1 = 1.0 / (1.0 + (2.0 * y).exp());
        let w = h * PI / 2.0 * t.cosh() / (2.0 * (y.cosh()).powi(2));
        if w > 0.0 && d0 > 0.0 && d1 > 0.0 {
            // d0 + d1 = 1; the formula keeps the small one accurate
            out.push((
                if y < 0.0 { d0 } else { 1.0 - d1 },
                if y > 0.0 { d1 } else { 1.0 - d0 },
                w,
            ));
        }
    }
    out
}

fn integrate(h: f64, f: impl Fn(f64, f64) -> f64) -> f64 {
    tanh_sinh(h)
        .iter()
        .map(|(d0, d1, w)| w * f(*d0, *d1))
        .filter(|v| v.is_finite())
        .sum()
}

/// Hurwitz zeta by summing ten terms and an Euler-Maclaurin remainder.
fn hurwitz(k: i32, a: f64) -> f64 {
    let head: f64 = (0..10).map(|j| (a + j as f64).powi(-k)).sum();
    let b = a + 10.0;
    let kf = k as f64;
    head + b.powf(1.0 - kf) / (kf - 1.0) + 0.5 * b.powi(-k) + kf / 12.0 * b.powi(-k - 1)
        - kf * (kf + 1.0) * (kf + 2.0) / 720.0 * b.powi(-k - 3)
}

/// `m(s)` from Chebyshev-Lobatto collocation of its fixed-point equation.
struct ChebMoments {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    values: Vec<f64>,
}

impl ChebMoments {
    fn solve(degree: usize, terms: usize) -> ChebMoments {
        let nodes: Vec<f64> = (0..=degree)
            .map(|i| (1.0 - (PI * i as f64 / degree as f64).cos()) / 2.0)
            .collect();
        let weights: Vec<f64> = (0..=degree)
            .map(|i| {
                let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                if i == 0 || i == degree {
                    s / 2.0
                } else {
                    s
                }
            })
            .collect();
        let mut m = ChebMoments {
            nodes,
            weights,
            values: vec![0.0; degree + 1],
        };
        let dim = degree + 1;
        let mut mat = vec![vec![0.0; dim]; dim];
        let mut rhs = vec![0.0; dim];
        let h = 1e-3;
        let b0 = m.basis(0.0);
        let b1 = m.basis(h);
        let b2 = m.basis(2.0 * h);
        for i in 0..dim {
            let s = m.nodes[i];
            rhs[i] = if s == 0.0 {
                1.0
            } else {
                (1.0 + s).ln() / (2.0 * s) + 0.5 / (1.0 + s)
            };
            mat[i][i] += 1.0;
            for n in 1..=terms {
                let x = n as f64 + s;
                let b = m.basis(1.0 / x);
                let w = x.powi(-3);
                for j in 0..dim {
                    mat[i][j] -= w * b[j];
                }
            }
            // tail: m(t) ≈ m(0) + m'(0) t + m''(0) t²/2
            let a = (terms + 1) as f64 + s;
            let (z3, z4, z5) = (hurwitz(3, a), hurwitz(4, a), hurwitz(5, a));
            for j in 0..dim {
                let d1 = (-3.0 * b0[j] + 4.0 * b1[j] - b2[j]) / (2.0 * h);
                let d2 = (b0[j] - 2.0 * b1[j] + b2[j]) / (h * h);
                mat[i][j] -= z3 * b0[j] + z4 * d1 + z5 * d2 / 2.0;
            }
        }
        m.values = gauss_solve(mat, rhs);
        m
    }

    fn basis(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.nodes.len()];
        if let Some(j) = self.nodes.iter().position(|s| *s == t) {
            out[j] = 1.0;
            return out;
        }
        let mut total = 0.0;
        for (j, s) in self.nodes.iter().enumerate() {
            out[j] = self.weights[j] / (t - s);
            total += out[j];
        }
        out.iter_mut().for_each(|v| *v /= total);
        out
    }

    fn eval(&self, t: f64) -> f64 {
        self.basis(t)
            .iter()
            .zip(&self.values)
            .map(|(b, v)| b * v)
            .sum()
    }
}

fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|i, j| a[*i][col].abs().total_cmp(&a[*j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

fn cheb(subdivisions: usize) -> Arc<ChebMoments> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<ChebMoments>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry(subdivisions)
        .or_insert_with(|| {
            Arc::new(ChebMoments::solve(
                (8 + subdivisions).min(48),
                25 * subdivisions,
            ))
        })
        .clone()
}

struct Ctx {
    m: Arc<ChebMoments>,
    h: f64,
    terms: usize,
    m0: f64,
    d1: f64,
    d2: f64,
}

impl Ctx {
    fn new(subdivisions: usize) -> Ctx {
        let m = cheb(subdivisions);
        let h = 1e-3;
        let (a, b, c) = (m.eval(0.0), m.eval(h), m.eval(2.0 * h));
        Ctx {
            h: 2.0 / subdivisions as f64,
            terms: 64 * subdivisions,
            m0: a,
            d1: (-3.0 * a + 4.0 * b - c) / (2.0 * h),
            d2: (a - 2.0 * b + c) / (h * h),
            m,
        }
    }

    /// `∫₀ˣ log(1/u) (1 + c u)⁻³ du`
    fn log_weight(&self, c: f64, x: f64) -> f64 {
        integrate(self.h, |d0, _| {
            let u = x * d0;
            -(u.ln()) * (1.0 + c * u).powi(-3)
        }) * x
    }

    /// `Σ_{j>=first} (j+c)⁻³ m(1/(j+c))`
    fn series(&self, c: f64, first: f64) -> f64 {
        let mut s = 0.0;
        for j in 0..self.terms {
            let x = first + j as f64 + c;
            s += x.powi(-3) * self.m.eval(1.0 / x);
        }
        let a = first + self.terms as f64 + c;
        s + self.m0 * hurwitz(3, a) + self.d1 * hurwitz(4, a) + self.d2 / 2.0 * hurwitz(5, a)
    }

    /// `∫₀ˣ Φ(u) (A + B u)⁻³ du` divided by `A⁻³`, for exact `x` in [0, 1].
    fn weighted(&self, c: f64, x: &Rational) -> f64 {
        if x.is_zero() {
            return 0.0;
        }
        if x.is_one() {
            return self.m.eval(c);
        }
        let inv = x.recip();
        let n = inv.floor();
        let alpha = &inv - &Rational::from_integer(n.clone());
        let nf = n.to_f64().unwrap_or(f64::INFINITY);
        let mut v = self.log_weight(c, x.to_f64());
        if !nf.is_finite() || nf > 1e15 {
            // children are negligible next to the log term this close to 0
            return v + self.m0 * 0.5 / (nf * nf);
        }
        v += self.series(c, nf + 1.0);
        // partial child n: full moment minus the part beyond α(x)
        let x2 = nf + c;
        let scale = x2.powi(-3);
        v += scale * self.m.eval(1.0 / x2);
        if scale > 1e-30 {
            v -= scale * self.weighted(1.0 / x2, &alpha);
        }
        v
    }
}

fn estimate_at(x: &Rational, subdivisions: usize) -> f64 {
    Ctx::new(subdivisions).weighted(0.0, x)
}

fn with_heuristic(f: impl Fn(usize) -> f64, subdivisions: usize) -> OracleEstimate {
    let fine = f(subdivisions);
    let coarse = f((subdivisions / 2).max(1));
    OracleEstimate {
        estimate: fine,
        error: (fine - coarse).abs() + 1e-14 * (1.0 + fine.abs()),
    }
}

/// Estimate of Ψ(x) for `x` in [0, 1].
pub fn psi_oracle(x: &Rational, subdivisions: usize) -> OracleEstimate {
    if x.is_zero() {
        return OracleEstimate {
            estimate: 0.0,
            error: 0.0,
        };
    }
    with_heuristic(|s| estimate_at(x, s), subdivisions.max(2))
}

/// Estimate of `m(s) = ∫₀¹ Φ(u)(1+su)⁻³ du`.
pub fn moment_oracle(s: f64, subdivisions: usize) -> OracleEstimate {
    with_heuristic(|k| cheb(k).eval(s), subdivisions.max(2))
}

/// Estimate of `∫ₐᵇ γₖ` by quadrature in the original variable.
pub fn gamma_piece_oracle(
    k: usize,
    cell: &Cell,
    a: &Rational,
    b: &Rational,
    subdivisions: usize,
) -> OracleEstimate {
    if a == b {
        return OracleEstimate {
            estimate: 0.0,
            error: 0.0,
        };
    }
    let anc = cell_from_word(&cell.word()[..k]).expect("prefix of a valid word");
    let (p, q) = anc.convergent();
    let (pp, qp) = anc.previous();
    let big = |v: &BigInt| Rational::from_integer(v.clone());
    let (p, q, pp, qp) = (big(p), big(q), big(pp), big(qp));
    // numerator p_k - t q_k and denominator t q_{k-1} - p_{k-1} at both ends
    let na = (&p - &(a * &q)).to_f64();
    let nb = (&p - &(b * &q)).to_f64();
    let da = (&(a * &qp) - &pp).to_f64();
    let db = (&(b * &qp) - &pp).to_f64();
    let len = (b - a).to_f64();
    let (qf, qpf) = (q.to_f64(), qp.to_f64());
    let f = |h: f64| {
        integrate(h, |d0, d1| {
            let (num, den) = if d0 <= d1 {
                (na - d0 * len * qf, da + d0 * len * qpf)
            } else {
                (nb + d1 * len * qf, db - d1 * len * qpf)
            };
            let (num, den) = (num.abs(), den.abs());
            den * (den.ln() - num.ln())
        }) * len
    };
    with_heuristic(|s| f(2.0 / s as f64), subdivisions.max(2))
}

/// `∫_{u0}^{u1} log(1/u) (A + B u)⁻³ du` by quadrature, for cross-checks of the closed form.
pub fn log_weight_oracle(a: f64, b: f64, u0: f64, u1: f64, subdivisions: usize) -> OracleEstimate {
    let f = |h: f64| {
        integrate(h, |d0, d1| {
            let u = if d0 <= d1 {
                u0 + d0 * (u1 - u0)
            } else {
                u1 - d1 * (u1 - u0)
            };
            -(u.ln()) * (a + b * u).powi(-3)
        }) * (u1 - u0)
    };
    with_heuristic(|s| f(2.0 / s as f64), subdivisions.max(2))
}
