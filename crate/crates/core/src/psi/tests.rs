use proptest::prelude::*;
use rand::Rng;

use super::oracle::{gamma_piece_oracle, log_weight_oracle, moment_oracle, psi_oracle};
use super::*;
use crate::sample::{random_rational, rng};

const P: u32 = 128;

fn r(s: &str) -> Rational {
    Rational::parse(s).unwrap()
}

fn agrees(e: &Enclosure, est: f64, err: f64) -> bool {
    e.lo().to_f64() - err - 1e-15 <= est && est <= e.hi().to_f64() + err + 1e-15
}

/// Φ by the Gauss map in double precision; the series is truncated once β is negligible.
fn phi_f64(x: f64) -> f64 {
    let (mut a, mut beta, mut s) = (x, 1.0, 0.0);
    for _ in 0..40 {
        if a <= 0.0 || beta < 1e-14 {
            break;
        }
        s += beta * (1.0 / a).ln();
        beta *= a;
        a = (1.0 / a).fract();
    }
    s
}

#[test]
fn closed_form_k0_example() {
    let cell = Cell::root();
    let piece =
        integrate_gamma_closed_form(0, &cell, &r("13534/100000"), &r("36788/100000"), P).unwrap();
    let f = |t: f64| t * (1.0 - t.ln());
    let expect = f(0.36788) - f(0.13534);
    assert!((piece.value.mid_f64() - expect).abs() < 1e-14);
    assert!((expect - 0.329753).abs() < 1e-5);
    assert!(piece.value.width_f64() < 1e-30);
}

#[test]
fn closed_form_empty_interval_is_zero() {
    let cell = cell_from_word(&[BigInt::from(2), BigInt::from(3)]).unwrap();
    let (a, _) = cell.endpoints();
    for k in 0..=2 {
        let p = integrate_gamma_closed_form(k, &cell, &a, &a, P).unwrap();
        assert!(p.value.lo().is_zero() && p.value.hi().is_zero());
    }
}

#[test]
fn closed_form_full_cell_two() {
    let cell = cell_from_word(&[BigInt::from(2)]).unwrap();
    let (a, b) = cell.endpoints();
    assert_eq!((a.clone(), b.clone()), (r("1/3"), r("1/2")));
    let piece = integrate_gamma_closed_form(1, &cell, &a, &b, P).unwrap();
    let o = gamma_piece_oracle(1, &cell, &a, &b, 16);
    assert!(
        agrees(&piece.value, o.estimate, o.error + 1e-13),
        "{} {:?}",
        piece.value,
        o
    );
    // ∫₀¹ log(1/u)(2+u)⁻³ du = log(3/2)/8 + 1/24
    let expect = (1.5f64).ln() / 8.0 + 1.0 / 24.0;
    assert!((piece.value.mid_f64() - expect).abs() < 1e-15);
}

#[test]
fn closed_form_rejects_bad_input() {
    let cell = cell_from_word(&[BigInt::from(2)]).unwrap();
    assert!(integrate_gamma_closed_form(1, &cell, &r("1/2"), &r("1/3"), P).is_err());
    assert!(integrate_gamma_closed_form(2, &cell, &r("1/3"), &r("1/2"), P).is_err());
    assert!(integrate_gamma_closed_form(1, &cell, &r("1/4"), &r("1/2"), P).is_err());
}

#[test]
fn closed_form_matches_quadrature_on_random_pieces() {
    let mut g = rng(11);
    for _ in 0..200 {
        let depth = g.gen_range(1..=6);
        let word: Vec<BigInt> = (0..depth)
            .map(|_| BigInt::from(g.gen_range(1..=12u32)))
            .collect();
        let cell = cell_from_word(&word).unwrap();
        let k = g.gen_range(0..=depth);
        let (l, rr) = cell.endpoints();
        let len = &rr - &l;
        let s = random_rational(&mut g, 1000);
        let t = random_rational(&mut g, 1000);
        let (s, t) = if s <= t { (s, t) } else { (t, s) };
        let a = &l + &(&len * &s);
        let b = &l + &(&len * &t);
        let piece = integrate_gamma_closed_form(k, &cell, &a, &b, P).unwrap();
        let o = gamma_piece_oracle(k, &cell, &a, &b, 16);
        let tol = o.error + 1e-9 * o.estimate.abs() + 1e-300;
        assert!(
            agrees(&piece.value, o.estimate, tol),
            "{word:?} k={k} [{a}, {b}] {} {:?}",
            piece.value,
            o
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn log_weight_integral_matches_quadrature(a in 1u64..10_000, bf in 0.0f64..=1.0, s in 0u32..1000, t in 1u32..=1000) {
        let b = ((a as f64) * bf).floor() as u64;
        let (s, t) = (s.min(t - 1), t);
        let (u0, u1) = (Rational::new(s, 1000).unwrap(), Rational::new(t, 1000).unwrap());
        let v = log_weight_integral(&BigInt::from(a), &BigInt::from(b), &u0, &u1, P);
        let o = log_weight_oracle(a as f64, b as f64, u0.to_f64(), u1.to_f64(), 16);
        prop_assert!(agrees(&v, o.estimate, o.error + 1e-12 * o.estimate.abs()), "{v} {o:?}");
        prop_assert!(v.is_nonnegative());
    }
}

#[test]
fn moment_table_agrees_with_collocation() {
    for s in ["0", "1/7", "1/2", "3/4", "1"] {
        let (lo, hi) = moment_bounds(&r(s)).unwrap();
        let o = moment_oracle(r(s).to_f64(), 16);
        assert!(
            lo - o.error <= o.estimate && o.estimate <= hi + o.error,
            "{s}: [{lo}, {hi}] {o:?}"
        );
        assert!(hi - lo < 1e-9);
    }
}

#[test]
fn psi_of_zero_is_exactly_zero() {
    let v = psi(&Rational::zero(), &r("1e-9"), P).unwrap();
    assert!(v.value.lo().is_zero() && v.value.hi().is_zero());
    assert_eq!(v.cells_visited, 0);
}

#[test]
fn psi_near_zero_follows_the_log_model() {
    let x = r("1/100");
    let v = psi(&x, &r("1e-3"), P).unwrap();
    let o = psi_oracle(&x, 16);
    assert!(agrees(&v.value, o.estimate, o.error), "{} {o:?}", v.value);
    assert!(v.value.width_f64() <= 1e-3);
    // x log(1/x) + x = 0.056052, up to O(x²)
    assert!((v.value.mid_f64() - 0.056052).abs() < 0.01);
}

#[test]
fn psi_one_matches_oracle_and_sampling() {
    let v = psi(&Rational::one(), &r("1e-3"), P).unwrap();
    let o = psi_oracle(&Rational::one(), 16);
    assert!(agrees(&v.value, o.estimate, o.error));
    let mut g = rng(5);
    let n = 40_000;
    let mean: f64 = (0..n).map(|_| phi_f64(g.gen::<f64>())).sum::<f64>() / n as f64;
    assert!(
        (mean - v.value.mid_f64()).abs() < 0.05,
        "sampled {mean} vs {}",
        v.value
    );
}

#[test]
fn psi_matches_oracle_at_random_points() {
    let mut g = rng(21);
    for _ in 0..20 {
        let x = random_rational(&mut g, 1_000_000);
        let v = psi(&x, &r("1e-9"), P).unwrap();
        let o = psi_oracle(&x, 16);
        assert!(v.value.width_f64() <= 1e-9);
        assert!(
            (o.estimate - v.value.mid_f64()).abs() <= 1e-9 + o.error,
            "{x}: {} {o:?}",
            v.value
        );
    }
}

#[test]
fn oracle_error_covers_refinement() {
    let mut g = rng(8);
    for _ in 0..20 {
        let x = random_rational(&mut g, 100_000);
        let a = psi_oracle(&x, 16);
        let b = psi_oracle(&x, 32);
        assert!(
            (a.estimate - b.estimate).abs() <= a.error,
            "{x}: {a:?} {b:?}"
        );
    }
}

#[test]
fn head_lies_between_the_two_sided_bounds() {
    for tol in ["1e-3", "1e-6", "1e-9"] {
        let eps = head_cutoff(&r(tol));
        let b = head_bounds(&eps, P);
        assert!(b.width_f64() <= r(tol).to_f64() / 3.0);
        let h = psi(&eps, &r("1e-12"), P).unwrap();
        assert!(b.contains(&h.value), "{tol}: head {} outside {b}", h.value);
        // dyadic, and the smallest such
        assert!(eps.num().is_one());
        let twice = &eps * &Rational::from(2);
        assert!(head_bounds(&twice, P).width_f64() > r(tol).to_f64() / 3.0 || twice > r("1/8"));
    }
}

#[test]
fn nesting_under_tighter_tolerance() {
    let mut g = rng(3);
    for _ in 0..10 {
        let x = random_rational(&mut g, 10_000);
        let wide = psi(&x, &r("1e-4"), P).unwrap();
        let narrow = psi(&x, &r("5e-5"), P).unwrap();
        assert!(
            wide.value.contains(&narrow.value),
            "{x}: {} vs {}",
            wide.value,
            narrow.value
        );
    }
}

#[test]
fn increments_are_additive_and_signed() {
    let tol = r("1e-10");
    let (a, b, c) = (r("1/7"), r("2/7"), r("5/9"));
    let ac = psi_increment(&a, &(&c - &a), &tol, P).unwrap();
    let ab = psi_increment(&a, &(&b - &a), &tol, P).unwrap();
    let bc = psi_increment(&b, &(&c - &b), &tol, P).unwrap();
    assert!(ac.overlaps(&(&ab + &bc)));
    let back = psi_increment(&c, &(&a - &c), &tol, P).unwrap();
    assert!(back.hi().is_negative());
    assert!(back.overlaps(&-ac));
    let zero = psi_increment(&r("1/2"), &Rational::zero(), &tol, P).unwrap();
    assert!(zero.lo().is_zero() && zero.hi().is_zero());
}

#[test]
fn increment_matches_difference_of_values() {
    let tol = r("1e-10");
    let (x, h) = (r("3/10"), r("1/1000"));
    let inc = psi_increment(&x, &h, &tol, P).unwrap();
    let d = &psi(&(&x + &h), &tol, P).unwrap().value - &psi(&x, &tol, P).unwrap().value;
    assert!(inc.overlaps(&d));
}

#[test]
fn increment_at_one_half_follows_rational_model() {
    let (x, h) = (r("1/2"), r("1e-4"));
    let inc = psi_increment(&x, &h, &r("1e-14"), P).unwrap();
    let hf = 1e-4f64;
    let model = hf / 2.0 * (1.0 / hf).ln() + hf / 2.0;
    let scale = 2.0 * hf * hf * (1.0 / (4.0 * hf)).ln();
    let c = (inc.mid_f64() - model) / scale;
    assert!(c.abs() < 10.0, "normalized residual {c}");
}

#[test]
fn increments_stay_below_ten_h_log() {
    let mut g = rng(17);
    for _ in 0..30 {
        let e: u32 = g.gen_range(3..=9);
        let h = Rational::new(g.gen_range(1..10u64), 10u64.pow(e)).unwrap();
        let x = random_rational(&mut g, 100_000);
        let x = if &x + &h > Rational::one() {
            &Rational::one() - &h
        } else {
            x
        };
        let inc = psi_increment(&x, &h, &r("1e-12"), P).unwrap();
        let bound = Enclosure::ln_rational(&h.recip(), P).mul_rational(&(&h * &Rational::from(10)));
        assert!(inc.certainly_le(&bound), "{x} {h}");
        assert!(inc.hi().to_f64() > 0.0);
    }
}

#[test]
fn midpoints_increase_along_a_grid() {
    let x0 = r("1/5");
    let mut last = -1.0;
    for i in 1..=40 {
        let b = &x0 + &Rational::new(i, 100).unwrap();
        let v = psi_increment(&x0, &(&b - &x0), &r("1e-10"), P).unwrap();
        assert!(v.lo().to_f64() >= -v.width_f64());
        assert!(v.mid_f64() > last);
        last = v.mid_f64();
    }
}

#[test]
fn log_alpha_integrals_respect_the_interval_bound() {
    // ∫_I log(1/α_k) ≤ e |I| log(1/|I|) for |I| ≤ e⁻², by stratified sampling
    let mut g = rng(29);
    for _ in 0..40 {
        let k = g.gen_range(0..=8usize);
        let len = 10f64.powf(-g.gen_range(1.0..5.0)).min(0.135);
        let a = g.gen_range(0.0..1.0 - len);
        let samples = 4000;
        let mut acc = 0.0;
        for i in 0..samples {
            let t = a + len * (i as f64 + g.gen::<f64>()) / samples as f64;
            let mut u = Rational::parse(&format!("{t:.17}")).unwrap();
            for _ in 0..k {
                if u.is_zero() {
                    break;
                }
                u = u.recip().fract();
            }
            if !u.is_zero() {
                acc += (1.0 / u.to_f64()).ln();
            }
        }
        let est = acc / samples as f64 * len;
        let bound = std::f64::consts::E * len * (1.0 / len).ln();
        assert!(est <= bound, "k={k} a={a} len={len}: {est} > {bound}");
    }
}

#[test]
fn result_serializes_with_fixed_keys() {
    let v = psi(&r("1/3"), &r("1e-6"), P).unwrap();
    let j = serde_json::to_string(&v).unwrap();
    assert!(j.starts_with("{\"lo\":"));
    for key in [
        "\"hi\"",
        "\"cells_visited\"",
        "\"epsilon\"",
        "\"depth_cap\"",
    ] {
        assert!(j.contains(key));
    }
}

#[test]
fn invalid_arguments_are_rejected() {
    assert!(psi(&r("3/2"), &r("1e-6"), P).is_err());
    assert!(psi(&r("1/2"), &Rational::zero(), P).is_err());
    assert!(psi_increment(&r("9/10"), &r("1/5"), &r("1e-6"), P).is_err());
}

#[test]
fn unreachable_tolerance_reports_width() {
    match psi(&r("1/3"), &r("1e-30"), P) {
        Err(Error::VisitCap { achieved, .. }) => assert!(!achieved.is_empty()),
        other => panic!("expected an unreachable-tolerance error, got {other:?}"),
    }
}
