use std::f64::consts::PI;

use fracdisp_core::mlf::minus_i_pow;
use fracdisp_core::spectral::{mlf_propagator_1, Field, Grid, Space, SymbolSpec};
use fracdisp_core::verify::*;
use fracdisp_core::{Error, FracParams};
use num_complex::Complex64;
use proptest::prelude::*;
use statrs::function::gamma::ln_gamma;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn ml_series(alpha: f64, b: f64, z: Complex64) -> Complex64 {
    let lz = z.ln();
    (1..200)
        .map(|n| (lz * n as f64 - ln_gamma(alpha * n as f64 + b)).exp())
        .sum::<Complex64>()
        + (-ln_gamma(b)).exp()
}

fn simpson(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    h / 3.0 * (f(a) + f(b) + inner)
}

// ---- fit ----

#[test]
fn exact_power_law_fits_exactly() {
    let s: Vec<(f64, f64)> = log_times(1.0, 64.0, 7).iter().map(|&t| (t, t.powf(-1.0 / 3.0))).collect();
    let f = fit_power_law(&s, -1.0 / 3.0, 1e-9).unwrap();
    assert!((f.slope + 1.0 / 3.0).abs() < 1e-12 && (f.r_squared - 1.0).abs() < 1e-12 && f.pass);
}

#[test]
fn wobbling_power_law() {
    let s: Vec<(f64, f64)> = log_times(1.0, 100.0, 12)
        .iter()
        .map(|&t| (t, 5.0 * t.powf(-0.5) * (1.0 + 0.01 * t.ln().sin())))
        .collect();
    let f = fit_power_law(&s, -0.5, 0.04).unwrap();
    assert!((f.slope + 0.5).abs() <= 0.02 && f.pass, "{f:?}");
}

#[test]
fn constant_samples_have_zero_slope() {
    let s: Vec<(f64, f64)> = log_times(1.0, 10.0, 5).iter().map(|&t| (t, 2.5)).collect();
    let f = fit_power_law(&s, 0.0, 1e-3).unwrap();
    assert!(f.slope.abs() < 1e-12 && f.pass);
}

#[test]
fn degenerate_fits_are_rejected() {
    let ok: Vec<(f64, f64)> = log_times(1.0, 10.0, 5).iter().map(|&t| (t, 1.0 / t)).collect();
    let mut bad = ok.clone();
    bad[2].1 = 0.0;
    assert!(matches!(fit_power_law(&bad, -1.0, 0.1), Err(Error::DegenerateFit(_))));
    assert!(matches!(fit_power_law(&ok[..3], -1.0, 0.1), Err(Error::DegenerateFit(_))));
    let narrow: Vec<(f64, f64)> = log_times(1.0, 5.0, 6).iter().map(|&t| (t, 1.0 / t)).collect();
    assert!(matches!(fit_power_law(&narrow, -1.0, 0.1), Err(Error::DegenerateFit(_))));
}

proptest! {
    #[test]
    fn fit_recovers_any_exponent(e in -3.0f64..3.0, a in 0.01f64..100.0) {
        let s: Vec<(f64, f64)> = log_times(0.5, 50.0, 9).iter().map(|&t| (t, a * t.powf(e))).collect();
        let f = fit_power_law(&s, e, 1e-6).unwrap();
        prop_assert!((f.slope - e).abs() < 1e-9);
        prop_assert!((f.intercept - a.ln()).abs() < 1e-9);
    }
}

// ---- dispersive decay ----

#[test]
fn schrodinger_gaussian_ratios_match_closed_form() {
    // e^{−itD²}g_σ = σ(σ²+2it)^{−1/2} e^{−x²/(2(σ²+2it))}
    let search = DilationSearch::default();
    for (t, sigma) in [(1.0f64, 1.0f64), (3.0, 0.7), (10.0, 2.5)] {
        let sym = SymbolSpec::Schrodinger { t, delta: 2.0 };
        let q = sigma.powi(4) + 4.0 * t * t;
        let sup = sigma / q.powf(0.25);
        let inf_ratio = dilation_ratio(1, &sym, 2.0, t, f64::INFINITY, sigma, &search).unwrap();
        let exact = sup / ((2.0 * PI).sqrt() * sigma);
        assert!((inf_ratio - exact).abs() <= 1e-10 * exact, "t={t}: {inf_ratio} vs {exact}");

        let l4 = (sup.powi(4) * (PI * q / (2.0 * sigma * sigma)).sqrt()).powf(0.25);
        let g43 = (2.0 * PI * sigma * sigma * 0.75).powf(0.5 * 0.75);
        let r4 = dilation_ratio(1, &sym, 2.0, t, 4.0, sigma, &search).unwrap();
        assert!((r4 - l4 / g43).abs() <= 1e-10 * r4, "t={t}: {r4} vs {}", l4 / g43);
    }
}

#[test]
fn radial_three_dimensional_gaussian_matches_closed_form() {
    // In d = 3 the free Schrödinger evolution of a Gaussian is the cube of the 1D factor.
    let search = DilationSearch::default();
    let (t, sigma) = (2.0f64, 1.2f64);
    let sym = SymbolSpec::Schrodinger { t, delta: 2.0 };
    let sup = (sigma / (sigma.powi(4) + 4.0 * t * t).powf(0.25)).powi(3);
    let r = dilation_ratio(3, &sym, 2.0, t, f64::INFINITY, sigma, &search).unwrap();
    let exact = sup / (2.0 * PI * sigma * sigma).powf(1.5);
    assert!((r - exact).abs() <= 1e-6 * exact, "{r} vs {exact}");
}

#[test]
fn dispersive_sup_norm_decay() {
    let fp = FracParams::new(0.5, 1.5, 1, 3.0).unwrap();
    let f = verify_dispersive_group(&fp, f64::INFINITY, &log_times(1.0, 64.0, 7), 0.07, &DilationSearch::default()).unwrap();
    assert!(f.pass && (f.target + 1.0 / 3.0).abs() < 1e-15, "{f:?}");
}

#[test]
fn dispersive_l2_is_conserved() {
    let fp = FracParams::new(0.5, 1.5, 1, 3.0).unwrap();
    let f = verify_dispersive_group(&fp, 2.0, &log_times(1.0, 64.0, 7), 1e-3, &DilationSearch::default()).unwrap();
    assert!(f.pass && f.target == 0.0 && f.slope.abs() < 1e-3);
    assert!(f.samples.iter().all(|s| (s.1 - 1.0).abs() < 1e-10));
}

#[test]
fn dispersive_l4_decay() {
    let fp = FracParams::new(0.6, 1.5, 1, 3.0).unwrap();
    assert!((fp.delta() - 2.5).abs() < 1e-12);
    let f = verify_dispersive_group(&fp, 4.0, &log_times(1.0, 64.0, 7), 0.07, &DilationSearch::default()).unwrap();
    assert!(f.pass && (f.target + 0.2).abs() < 1e-12, "{f:?}");
}

#[test]
fn dispersive_rejects_p_below_two() {
    let fp = FracParams::new(0.5, 1.5, 1, 3.0).unwrap();
    let r = verify_dispersive_group(&fp, 1.5, &log_times(1.0, 64.0, 7), 0.07, &DilationSearch::default());
    assert!(matches!(r, Err(Error::Precondition(_))));
}

#[test]
fn derivative_loss_decay_one_and_three_dimensions() {
    for dim in [1, 3] {
        let fp = FracParams::new(0.9, 2.5, dim, 3.0).unwrap();
        let f = verify_derivative_loss_dispersive(&fp, &log_times(1.0, 64.0, 7), 0.1, &DilationSearch::default()).unwrap();
        let p = fp.p0().unwrap();
        let gap = fp.delta() - fp.beta;
        assert!((1.0 / p - (0.5 - gap / (dim as f64 * (fp.delta() - 2.0)))).abs() < 1e-12);
        assert!(f.pass, "d={dim}: {f:?}");
    }
    assert!((FracParams::new(0.9, 2.5, 1, 3.0).unwrap().p0().unwrap() - 7.0).abs() < 1e-12);
}

#[test]
fn derivative_loss_rejects_equal_orders() {
    let fp = FracParams {
        alpha: 1.0,
        beta: 2.5,
        dim: 1,
        p: 3.0,
    };
    let r = verify_derivative_loss_dispersive(&fp, &log_times(1.0, 64.0, 7), 0.1, &DilationSearch::default());
    assert!(matches!(r, Err(Error::Precondition(_))));
}

#[test]
fn mlf_operator_decay_both_operators() {
    let fp = FracParams::new(0.9, 2.5, 1, 3.0).unwrap();
    let r = verify_mlf_operator_decay(&fp, &log_times(1.0, 64.0, 7), 0.1, &DilationSearch::default()).unwrap();
    assert!((r.p0 - 7.0).abs() < 1e-12);
    assert!(r.e1.pass && r.ea.pass, "{r:?}");
    // Reported only: the small-time quotient sits near the identity value.
    assert!(r.small_time.iter().all(|s| s.1.is_finite() && s.1 > 0.0));
    assert!((r.small_time[0].1 - r.small_time_limit).abs() < 0.01 * r.small_time_limit);
}

#[test]
fn single_mode_amplitude_is_scalar_mittag_leffler() {
    let (alpha, beta) = (0.9, 2.5);
    let fp = FracParams::new(alpha, beta, 1, 3.0).unwrap();
    let grid = Grid::new(1, 64, PI * 8.0).unwrap();
    let k = 5.0 / 8.0;
    let wave = Field::from_fn(&grid, |x| Complex64::from_polar(1.0, k * x[0]));
    for t in [0.5, 1.0, 2.0] {
        let out = mlf_propagator_1(&wave, t, &fp).unwrap();
        let z = minus_i_pow(alpha) * (f64::powf(t, alpha) * k.powf(beta));
        let oracle = ml_series(alpha, 1.0, z).norm();
        let amp = out.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!((amp - oracle).abs() <= 1e-10, "t={t}: {amp} vs {oracle}");
    }
}

// ---- smoothing ----

fn positive_packet(grid: &Grid, k0: f64, w: f64, amp: f64) -> Field {
    let scale = grid.cell_volume() * (grid.len() as f64).sqrt();
    let mut f = Field::zeros(grid, Space::Frequency);
    for (j, v) in f.values.iter_mut().enumerate() {
        let k = grid.freqs()[j];
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        if k > 0.0 {
            *v = c(amp * sign * (-(k - k0).powi(2) / (2.0 * w * w)).exp() / scale);
        }
    }
    f
}

#[test]
fn smoothing_identity_for_a_positive_packet() {
    let grid = Grid::new(1, 4096, 600.0).unwrap();
    let (k0, w) = (3.0, 0.4);
    let r = verify_smoothing_equality_1d(3.0, &positive_packet(&grid, k0, w, 1.0), &SmoothingOptions::default()).unwrap();
    // (1/2π)∫|ĝ|²/(3ξ²)dξ by direct quadrature of the continuous spectrum.
    let oracle = simpson(1e-3, 12.0, 20000, |k| (-(k - k0).powi(2) / (w * w)).exp() / (3.0 * k * k)) / (2.0 * PI);
    assert!(r.pass && r.max_deviation <= 1e-3);
    for &(x, v) in &r.lhs {
        assert!((v - oracle).abs() <= 1e-3 * oracle, "x={x}: {v} vs {oracle}");
    }
}

#[test]
fn smoothing_identity_scales_quadratically() {
    let grid = Grid::new(1, 4096, 600.0).unwrap();
    let opts = SmoothingOptions::default();
    let a = verify_smoothing_equality_1d(3.0, &positive_packet(&grid, 3.0, 0.4, 1.0), &opts).unwrap();
    let b = verify_smoothing_equality_1d(3.0, &positive_packet(&grid, 3.0, 0.4, 7.0), &opts).unwrap();
    assert!((b.rhs - 49.0 * a.rhs).abs() <= 1e-12 * b.rhs);
    for (x, y) in a.lhs.iter().zip(&b.lhs) {
        assert!((y.1 - 49.0 * x.1).abs() <= 1e-12 * y.1);
    }
    assert!((a.max_deviation - b.max_deviation).abs() < 1e-12);
}

#[test]
fn symmetric_spectrum_is_rejected() {
    let grid = Grid::new(1, 1024, 100.0).unwrap();
    let g = Field::from_fn(&grid, |x| c((-x[0] * x[0]).exp()));
    let r = verify_smoothing_equality_1d(3.0, &g, &SmoothingOptions::default());
    assert!(matches!(r, Err(Error::Precondition(_))));
}

#[test]
fn short_window_is_reported() {
    let grid = Grid::new(1, 4096, 600.0).unwrap();
    let opts = SmoothingOptions {
        window: 0.05,
        ..SmoothingOptions::default()
    };
    let r = verify_smoothing_equality_1d(3.0, &positive_packet(&grid, 3.0, 0.4, 1.0), &opts);
    assert!(matches!(r, Err(Error::WindowTooShort { .. })), "{r:?}");
}

#[test]
fn smoothing_ratio_is_bounded_across_bandwidths() {
    let fp = FracParams::new(0.5, 1.5, 1, 3.0).unwrap();
    let r = verify_smoothing_bound_1d(&fp, 6, &SmoothingBoundOptions::default()).unwrap();
    assert_eq!(r.levels.len(), 3);
    assert!(r.pass && r.spread <= 0.1 && r.amplitude_deviation <= 1e-12, "{r:?}");
}

#[test]
fn smoothing_ratio_quadratic_dispersion() {
    let fp = FracParams::new(0.5, 1.0, 1, 3.0).unwrap();
    let r = verify_smoothing_bound_1d(&fp, 4, &SmoothingBoundOptions::default()).unwrap();
    assert!(r.levels.iter().all(|l| l.max_ratio.is_finite() && l.max_ratio > 0.0));
    // Full-line bound for ±ξ interference: ratio² ≤ 2/δ.
    assert!(r.levels.iter().all(|l| l.max_ratio <= 1.0 + 1e-9), "{r:?}");
}

// ---- self-similarity and asymptotics ----

#[test]
fn self_similarity_scenario() {
    let fp = FracParams::critical(0.9, 2.5, 1).unwrap();
    let r = verify_self_similarity(&fp, &[1.0, 1.25], 8e-3, &SelfSimilarityOptions::default()).unwrap();
    match &r.checks[0] {
        Check::Scalar { value, .. } => assert_eq!(*value, 0.0),
        other => panic!("{other:?}"),
    }
    assert!(r.verdict, "{}", serde_json::to_string_pretty(&r).unwrap());
}

#[test]
fn self_similarity_needs_critical_power() {
    let fp = FracParams::new(0.9, 2.5, 1, 5.0).unwrap();
    let r = verify_self_similarity(&fp, &[1.25], 8e-3, &SelfSimilarityOptions::default());
    assert!(matches!(r, Err(Error::Precondition(_))));
}

fn wide_grid() -> Grid {
    Grid::new(1, 16384, 2048.0).unwrap()
}

fn bump(grid: &Grid, amp: f64, center: f64) -> Field {
    Field::from_fn(grid, |x| c(amp * (-(x[0] - center).powi(2) / 0.5).exp()))
}

#[test]
fn asymptotic_link_identical_data() {
    let fp = FracParams::critical(0.9, 2.5, 1).unwrap();
    let w0 = bump(&wide_grid(), 0.05, 0.0);
    let r = verify_asymptotic_link(&fp, &w0, &w0, &AsymptoticOptions::default()).unwrap();
    assert!(r.verdict);
    assert_eq!(r.note.as_deref(), Some(ASYMPTOTIC_NOTE));
    for ch in &r.checks[..2] {
        match ch {
            Check::Trend { values, .. } => assert!(values.iter().all(|v| v.1 == 0.0)),
            other => panic!("{other:?}"),
        }
    }
}

#[test]
fn asymptotic_link_both_directions() {
    let fp = FracParams::critical(0.9, 2.5, 1).unwrap();
    let grid = wide_grid();
    let w0 = bump(&grid, 0.05, 0.0);
    let v0 = w0.add(&bump(&grid, 0.01, 1.0)).unwrap();
    let r = verify_asymptotic_link(&fp, &w0, &v0, &AsymptoticOptions::default()).unwrap();
    let trends = |r: &VerifyReport| -> Vec<bool> {
        r.checks
            .iter()
            .filter_map(|c| match c {
                Check::Trend { non_increasing, .. } => Some(*non_increasing),
                _ => None,
            })
            .collect()
    };
    assert!(r.verdict && trends(&r) == [true, true]);

    // A difference with a slowly decaying tail: neither series decays.
    let tail = Field::from_fn(&grid, |x| c(0.01 * (x[0].abs() + 1.0).powf(-0.5)));
    let u0 = w0.add(&tail).unwrap();
    let r = verify_asymptotic_link(&fp, &w0, &u0, &AsymptoticOptions::default()).unwrap();
    assert!(r.verdict && trends(&r) == [false, false]);
}

#[test]
fn small_data_search_halves_until_contracting() {
    let fp = FracParams::critical(0.9, 2.5, 1).unwrap();
    let grid = Grid::new(1, 256, 32.0).unwrap();
    let config = fracdisp_core::solver::SolverConfig {
        n_steps: 16,
        ..Default::default()
    };
    let run = small_data_threshold(&bump(&grid, 3.0, 0.0), &config, &fp, 12).unwrap();
    assert!(run.halvings > 0 && contracts(&run.diagnostics));
    assert_eq!(run.scale, 0.5f64.powi(run.halvings as i32));
}

#[test]
fn report_round_trips_through_json() {
    let fp = FracParams::critical(0.9, 2.5, 1).unwrap();
    let mut r = VerifyReport::new("demo", &fp);
    r.push(Check::scalar("x", 0.5, 1.0));
    assert!(r.verdict);
    r.push(Check::scalar("y", 2.0, 1.0));
    assert!(!r.verdict);
    let back: VerifyReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
    assert_eq!(back, r);
}

// ---- Picard harnesses ----

#[test]
fn picard_contraction_harness() {
    let fp = FracParams::critical(0.9, 2.5, 1).unwrap();
    let grid = Grid::new(1, 256, 40.0).unwrap();
    let r = verify_picard_contraction(&fp, &bump(&grid, 2.0, 0.0), &PicardOptions::default()).unwrap();
    assert!(r.report.verdict, "{:?}", r.report);
    assert!(r.scale < 1.0);
    let tail = &r.diagnostics.ratios[r.diagnostics.ratios.len() - 3..];
    assert!(tail.iter().all(|&x| x <= 0.5));
    assert_eq!(r.caputo.iter().map(|c| c.0).collect::<Vec<_>>(), [64.0, 128.0, 256.0]);
}

#[test]
fn beta_lt2_local_run() {
    let fp = FracParams::new(0.9, 1.25, 1, 4.0).unwrap();
    let grid = Grid::new(1, 256, 40.0).unwrap();
    let r = verify_beta_lt2_run(&fp, 0.3, 0.5, &bump(&grid, 0.5, 0.0), &LocalRunOptions::default()).unwrap();
    assert!(r.report.verdict && r.diagnostics.converged && r.lambda.all_finite(), "{r:?}");
    assert!((r.regime.constant("varsigma").unwrap() - 0.25).abs() < 1e-15);
    assert!((r.regime.constant("theta_hi").unwrap() - 0.5625).abs() < 1e-15);
    // With θ = 1/2 the last two functionals coincide.
    assert_eq!(r.lambda.lambda[3], r.lambda.lambda[4]);
}

#[test]
fn beta_lt2_run_reports_failed_conditions() {
    let fp = FracParams::new(0.9, 1.25, 1, 4.0).unwrap();
    let grid = Grid::new(1, 128, 30.0).unwrap();
    let r = verify_beta_lt2_run(&fp, 0.1, 0.5, &bump(&grid, 0.5, 0.0), &LocalRunOptions::default()).unwrap();
    assert!(!r.report.verdict && !r.regime.pass);
}
