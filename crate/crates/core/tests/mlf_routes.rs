use std::f64::consts::PI;

use fracdisp_core::mlf::{
    decomposition_denominator, heat_integral_weight, laplace_identity_residual, mlf_eval, mlf_integral_ray,
    mlf_integral_sector, mlf_operator_symbols, mlf_series, series_sum, MlfParams, QuadratureRule, RayArgument,
    WeightKind,
};
use num_complex::Complex64;
use proptest::prelude::*;

const ORACLE: &str = include_str!("oracles/mlf_highprec.csv");

struct Row {
    alpha: f64,
    tag: String,
    b: f64,
    t: f64,
    rho: f64,
    beta_space: f64,
    z: Complex64,
    e: Complex64,
}

fn rows() -> Vec<Row> {
    ORACLE
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            let p = |i: usize| f[i].parse::<f64>().unwrap();
            Row {
                alpha: p(0),
                tag: f[1].to_string(),
                b: p(2),
                t: p(3),
                rho: p(4),
                beta_space: p(5),
                z: Complex64::new(p(6), p(7)),
                e: Complex64::new(p(8), p(9)),
            }
        })
        .collect()
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

#[test]
fn oracle_grid_is_complete() {
    let r = rows();
    assert_eq!(r.len(), 325);
    assert!(r.iter().all(|row| row.z.norm() <= 20.0));
}

#[test]
fn integral_route_matches_high_precision_series() {
    let rule = QuadratureRule::default();
    for row in rows().iter().filter(|r| r.tag == "1" || r.tag == "alpha") {
        let p = MlfParams::new(row.alpha, row.b).unwrap();
        let v = mlf_integral_ray(&p, row.z, &rule).unwrap();
        assert!(rel(v, row.e) < 1e-9, "alpha={} b={} z={}: {} vs {}", row.alpha, row.b, row.z, v, row.e);
    }
}

#[test]
fn decomposition_matches_high_precision_series() {
    let rule = QuadratureRule::default();
    for row in rows().iter().filter(|r| r.tag == "1" || r.tag == "alpha") {
        let p = MlfParams::new(row.alpha, row.b).unwrap();
        let arg = RayArgument::new(row.t, row.rho, row.beta_space, row.alpha).unwrap();
        assert!((arg.z(row.alpha) - row.z).norm() < 1e-13 * row.z.norm().max(1.0));
        let (e1, ea) = mlf_operator_symbols(&arg, &p, &rule).unwrap();
        let v = if row.tag == "1" { e1 } else { ea };
        assert!(rel(v, row.e) < 1e-9, "alpha={} b={} z={}: {} vs {}", row.alpha, row.b, row.z, v, row.e);
    }
}

#[test]
fn routed_evaluation_matches_for_all_indices() {
    for row in rows() {
        let v = mlf_eval(row.alpha, row.b, row.z).unwrap();
        assert!(rel(v, row.e) < 1e-9, "alpha={} b={} z={}: {} vs {}", row.alpha, row.b, row.z, v, row.e);
    }
}

#[test]
fn f64_series_agrees_inside_series_radius() {
    for row in rows().iter().filter(|r| r.z.norm().powf(1.0 / r.alpha) <= 8.0) {
        let p = MlfParams::new(row.alpha, row.b).unwrap();
        let v = mlf_series(&p, row.z).unwrap();
        assert!(rel(v, row.e) < 1e-11, "alpha={} b={} z={}", row.alpha, row.b, row.z);
    }
}

#[test]
fn series_matches_erfc_closed_form() {
    // E_{1/2,1}(z) = exp(z²) erfc(−z)
    let p = MlfParams::new(0.5, 1.0).unwrap();
    let v = mlf_series(&p, Complex64::new(-1.0, 0.0)).unwrap();
    let oracle = 1f64.exp() * libm::erfc(1.0);
    assert!((v.re - oracle).abs() < 1e-14);
    assert!((v.re - 0.4275836).abs() < 1e-7);
    assert!(v.im.abs() < 1e-15);
}

#[test]
fn documented_integral_examples() {
    let rule = QuadratureRule::default();
    let cases = [
        (0.75, 1.0, Complex64::from_polar(1.0, -0.75 * PI / 2.0)),
        (0.6, 0.6, Complex64::from_polar(2f64.powf(0.6) * 2f64.powf(1.5), -0.6 * PI / 2.0)),
    ];
    for (alpha, b, z) in cases {
        let p = MlfParams::new(alpha, b).unwrap();
        let s = mlf_series(&p, z).unwrap();
        let q = mlf_integral_ray(&p, z, &rule).unwrap();
        assert!(rel(q, s) <= 1e-8);
    }
}

#[test]
fn decomposition_example_alpha_075() {
    let rule = QuadratureRule::default();
    let arg = RayArgument::new(1.0, 1.0, 1.5, 0.75).unwrap();
    let z = arg.z(0.75);
    let (e1, ea) = mlf_operator_symbols(&arg, &MlfParams::new(0.75, 1.0).unwrap(), &rule).unwrap();
    let s1 = mlf_series(&MlfParams::new(0.75, 1.0).unwrap(), z).unwrap();
    let sa = mlf_series(&MlfParams::new(0.75, 0.75).unwrap(), z).unwrap();
    assert!(rel(e1, s1) <= 1e-7);
    assert!(rel(ea, sa) <= 1e-7);
}

#[test]
fn negative_axis_sector_formula() {
    let rule = QuadratureRule::default();
    for &(alpha, b) in &[(0.5, 1.0), (0.7, 0.7), (0.6, 1.2)] {
        let p = MlfParams::new(alpha, b).unwrap();
        for &x in &[0.5, 1.5, 3.0] {
            let z = Complex64::new(-x, 0.0);
            let q = mlf_integral_sector(&p, z, &rule).unwrap();
            let s = mlf_series(&p, z).unwrap();
            assert!(rel(q, s) < 1e-10, "alpha={alpha} b={b} x={x}");
        }
    }
}

#[test]
fn laplace_identity_grid() {
    let rule = QuadratureRule::default();
    for &alpha in &[0.5, 0.7] {
        for &b in &[1.0, alpha] {
            for &a in &[-1.0, -2.0] {
                for &s in &[2.0, 3.0] {
                    let r = laplace_identity_residual(alpha, b, Complex64::new(a, 0.0), Complex64::new(s, 0.0), &rule)
                        .unwrap();
                    assert!(r <= 1e-5, "alpha={alpha} b={b} a={a} s={s}: {r}");
                }
            }
        }
    }
}

#[test]
fn laplace_identity_trivial_pair() {
    let r = laplace_identity_residual(0.6, 0.8, Complex64::new(0.0, 0.0), Complex64::new(2.5, 0.0), &QuadratureRule::default())
        .unwrap();
    assert!(r <= 1e-10, "{r}");
}

#[test]
fn laplace_rejects_bad_arguments() {
    let rule = QuadratureRule::default();
    assert!(laplace_identity_residual(0.5, 1.0, Complex64::new(-1.0, 0.0), Complex64::new(-1.0, 0.0), &rule).is_err());
    assert!(laplace_identity_residual(0.5, 1.0, Complex64::new(9.0, 0.0), Complex64::new(2.0, 0.0), &rule).is_err());
}

#[test]
fn denominator_never_vanishes_on_log_grid() {
    for &alpha in &[0.5, 0.6, 0.75, 0.9] {
        let mut min = f64::INFINITY;
        for k in 0..10_000 {
            let r = 10f64.powf(-6.0 + 12.0 * k as f64 / 9_999.0);
            min = min.min(decomposition_denominator(alpha, r.powf(alpha)).norm());
        }
        assert!(min > 0.0);
        let at_one = decomposition_denominator(alpha, 1.0);
        let expect = 2.0 * (alpha * PI / 2.0).cos() - 2.0 * (alpha * PI).cos();
        assert!((at_one.re - expect).abs() < 1e-14 && at_one.im.abs() < 1e-14);
    }
}

#[test]
fn weight_examples() {
    let big = 1e8;
    let w = heat_integral_weight(0.75, WeightKind::E1, big).unwrap();
    assert!((w.norm() * big.powf(1.75) - 1.0).abs() < 1e-4);

    let alpha = 0.6;
    let ia = Complex64::from_polar(1.0, alpha * PI / 2.0);
    let direct = 1.0 / (ia - 2.0 * (alpha * PI).cos() + ia.conj());
    let w = heat_integral_weight(alpha, WeightKind::Ea, 1.0).unwrap();
    assert!((w - direct).norm() < 1e-15 && w.norm() > 0.0);
}

#[test]
fn series_remainder_is_reported() {
    let s = series_sum(0.75, 1.0, Complex64::new(0.5, -0.5), 1e-14, 500).unwrap();
    assert!(s.remainder <= 1e-14 * s.value.norm());
    assert!(s.peak >= 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conjugate_symmetry(alpha in 0.55f64..0.95, mag in 0.1f64..15.0, frac in -0.45f64..0.45, b_is_one in any::<bool>()) {
        let b = if b_is_one { 1.0 } else { alpha };
        let z = Complex64::from_polar(mag, frac * alpha * PI);
        let p = MlfParams::new(alpha, b).unwrap();
        let rule = QuadratureRule::default();
        let e = mlf_eval(alpha, b, z).unwrap();
        let ec = mlf_eval(alpha, b, z.conj()).unwrap();
        prop_assert!((ec - e.conj()).norm() <= 1e-12 * e.norm().max(1.0));
        let q = mlf_integral_ray(&p, z, &rule).unwrap();
        let qc = mlf_integral_ray(&p, z.conj(), &rule).unwrap();
        prop_assert!((qc - q.conj()).norm() <= 1e-12 * q.norm().max(1.0));
    }

    #[test]
    fn integral_and_series_agree_off_ray(alpha in 0.55f64..0.95, mag in 0.05f64..2.5, frac in -0.9f64..0.9) {
        let z = Complex64::from_polar(mag, frac * alpha * PI);
        for b in [1.0, alpha] {
            let p = MlfParams::new(alpha, b).unwrap();
            let s = mlf_series(&p, z).unwrap();
            let q = mlf_integral_ray(&p, z, &QuadratureRule::default()).unwrap();
            prop_assert!(rel(q, s) < 1e-8, "b={} z={} {} {}", b, z, q, s);
        }
    }
}
