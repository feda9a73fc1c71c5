//! Decay exponents of the free group and the Mittag-Leffler operators.
//!
//! A fixed datum decays faster than the operator norm L^{p′} → L^p, so each
//! sample is the largest ratio ‖T(t)g_σ‖_p/‖g_σ‖_{p′} over a family of
//! Gaussians g_σ = e^{−|x|²/2σ²}. In d = 3 the radial profile is handled on a
//! 1D grid through ψ(x) = x·g(|x|), whose 1D transform carries the same radial
//! multiplier.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fit::{fit_power_law, FitResult};
use crate::error::{Error, Result};
use crate::params::FracParams;
use crate::spectral::{apply_multiplier, clear_symbol_cache, Field, Grid, Space, SymbolSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DilationSearch {
    pub sigma_max: f64,
    pub sigma_min: f64,
    /// Ratio between consecutive widths of the coarse scan.
    pub step: f64,
    pub polish_iters: usize,
    pub max_points: usize,
    pub boundary_mass: f64,
}

impl Default for DilationSearch {
    fn default() -> Self {
        Self {
            sigma_max: 32.0,
            sigma_min: 0.25,
            step: 2.0,
            polish_iters: 14,
            max_points: 1 << 22,
            boundary_mass: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormSample {
    pub t: f64,
    pub ratio: f64,
    /// Width of the best Gaussian.
    pub sigma: f64,
}

fn gaussian_norm(sigma: f64, q: f64, dim: usize) -> f64 {
    if q.is_infinite() {
        1.0
    } else {
        (2.0 * PI * sigma * sigma / q).powf(dim as f64 / (2.0 * q))
    }
}

fn conjugate(p: f64) -> f64 {
    if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// ‖T g_σ‖_p/‖g_σ‖_{p′}, enlarging the box until the outer eighth holds at
/// most `boundary_mass` of the measured mass (L² mass when p = ∞).
pub fn dilation_ratio(
    dim: usize,
    symbol: &SymbolSpec,
    speed_order: f64,
    t: f64,
    p: f64,
    sigma: f64,
    search: &DilationSearch,
) -> Result<f64> {
    if dim != 1 && dim != 3 {
        return Err(Error::Precondition(format!("dilation search supports d = 1 and d = 3, got {dim}")));
    }
    if !(p >= 2.0) || !(sigma > 0.0) {
        return Err(Error::InvalidParameter(format!("need p >= 2 and sigma > 0 (p={p}, sigma={sigma})")));
    }
    let k_eff = 4.5 / sigma;
    let travel = if speed_order >= 1.0 {
        speed_order * t.abs() * k_eff.powf(speed_order - 1.0)
    } else {
        10.0 * t.abs().powf(1.0 / speed_order)
    };
    let spacing = PI / (1.6 * k_eff);
    let wanted = 2.0 * (1.25 * (travel + 6.0 * sigma)).max(8.0 * sigma);
    let mut n = ((wanted / spacing).ceil() as usize).next_power_of_two().max(64);
    let mut fraction = f64::NAN;
    while n <= search.max_points {
        let half = 0.5 * n as f64 * spacing;
        let grid = Grid::with_budget(1, n, half, search.max_points)?;
        let data = Field::from_fn(&grid, |x| {
            let g = (-x[0] * x[0] / (2.0 * sigma * sigma)).exp();
            Complex64::new(if dim == 3 { x[0] * g } else { g }, 0.0)
        });
        let out = apply_multiplier(&data, symbol)?;
        debug_assert_eq!(out.space, Space::Physical);
        let h = grid.spacing();
        let edge = 0.875 * half;
        let (mut total, mut outer, mut peak) = (0.0, 0.0, 0.0f64);
        let mut l2_total = 0.0;
        let mut l2_outer = 0.0;
        for j in 0..n {
            let x = grid.coord(j);
            let (value, weight) = if dim == 1 {
                (out.values[j].norm(), h)
            } else if x > 0.0 {
                (out.values[j].norm() / x, 4.0 * PI * x * x * h)
            } else {
                continue;
            };
            peak = peak.max(value);
            let m2 = weight * value * value;
            l2_total += m2;
            let mp = if p.is_infinite() { 0.0 } else { weight * value.powf(p) };
            total += mp;
            if x.abs() >= edge {
                l2_outer += m2;
                outer += mp;
            }
        }
        if dim == 3 {
            // u(0) = ψ′(0), by spectral differentiation.
            let mut d = out.to_frequency();
            for (v, &k) in d.values.iter_mut().zip(grid.freqs()) {
                *v *= Complex64::new(0.0, k);
            }
            peak = peak.max(d.to_physical().values[grid.origin_index()].norm());
        }
        fraction = if p.is_infinite() { l2_outer / l2_total } else { outer / total };
        if fraction <= search.boundary_mass {
            let norm = if p.is_infinite() { peak } else { total.powf(1.0 / p) };
            return Ok(norm / gaussian_norm(sigma, conjugate(p), dim));
        }
        n *= 2;
    }
    Err(Error::BoxTooSmall { fraction, n: n / 2 })
}

/// Largest dilation ratio at time t: a descending scan from `sigma_max` that
/// stops after two consecutive decreases, then a golden-section polish in
/// log σ around the best width.
pub fn operator_norm_estimate(
    dim: usize,
    symbol: &SymbolSpec,
    speed_order: f64,
    t: f64,
    p: f64,
    search: &DilationSearch,
) -> Result<NormSample> {
    if !(search.step > 1.0) || !(search.sigma_min > 0.0) || search.sigma_min > search.sigma_max {
        return Err(Error::InvalidParameter("dilation search needs 0 < sigma_min <= sigma_max and step > 1".into()));
    }
    let eval = |s: f64| dilation_ratio(dim, symbol, speed_order, t, p, s, search);
    let mut scan = vec![(search.sigma_max, eval(search.sigma_max)?)];
    let mut best = 0;
    let mut falls = 0;
    let mut s = search.sigma_max;
    while s / search.step >= search.sigma_min * (1.0 - 1e-12) && falls < 2 {
        s /= search.step;
        let r = eval(s)?;
        scan.push((s, r));
        if r > scan[best].1 {
            best = scan.len() - 1;
            falls = 0;
        } else {
            falls += 1;
        }
    }
    let (mut bs, mut br) = scan[best];
    if best == 0 || best == scan.len() - 1 {
        // Maximum at an end of the family.
        return Ok(NormSample { t, ratio: br, sigma: bs });
    }
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (scan[best + 1].0.ln(), scan[best - 1].0.ln());
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = eval(c.exp())?;
    let mut fd = eval(d.exp())?;
    for _ in 0..search.polish_iters {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = eval(c.exp())?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = eval(d.exp())?;
        }
    }
    for (x, f) in [(c, fc), (d, fd)] {
        if f > br {
            br = f;
            bs = x.exp();
        }
    }
    Ok(NormSample { t, ratio: br, sigma: bs })
}

fn decay_samples<F>(dim: usize, speed: f64, p: f64, t_list: &[f64], search: &DilationSearch, symbol: F) -> Result<Vec<NormSample>>
where
    F: Fn(f64) -> SymbolSpec,
{
    let out = t_list
        .iter()
        .map(|&t| operator_norm_estimate(dim, &symbol(t), speed, t, p, search))
        .collect();
    clear_symbol_cache();
    out
}

fn fit_samples(samples: &[NormSample], target: f64, tolerance: f64) -> Result<FitResult> {
    let pts: Vec<(f64, f64)> = samples.iter().map(|s| (s.t, s.ratio)).collect();
    fit_power_law(&pts, target, tolerance)
}

/// Decay of e^{−itD^δ}: L^{p′} → L^p, target −(αd/β)(1 − 2/p).
pub fn verify_dispersive_group(
    params: &FracParams,
    p: f64,
    t_list: &[f64],
    tolerance: f64,
    search: &DilationSearch,
) -> Result<FitResult> {
    if !(p >= 2.0) {
        return Err(Error::Precondition(format!("need 2 <= p <= inf, got {p}")));
    }
    let delta = params.delta();
    let samples = decay_samples(params.dim, delta, p, t_list, search, |t| SymbolSpec::Schrodinger { t, delta })?;
    fit_samples(&samples, -params.nu_at(p), tolerance)
}

/// Checks 0 ≤ (δ−β)/d < δ/2 − 1 and returns δ − β.
fn derivative_gap(params: &FracParams) -> Result<f64> {
    let delta = params.delta();
    let gap = delta - params.beta;
    if !(gap > 0.0) {
        return Err(Error::Precondition(format!("delta - beta = {gap} must be positive")));
    }
    if !(gap / (params.dim as f64) < 0.5 * delta - 1.0) {
        return Err(Error::Precondition(format!(
            "(delta-beta)/d = {} is not below delta/2 - 1 = {}",
            gap / params.dim as f64,
            0.5 * delta - 1.0
        )));
    }
    Ok(gap)
}

/// Decay of D^{δ−β}e^{−itD^δ} at 1/p = 1/2 − (δ−β)/(d(δ−2)), target
/// α − 1 − (αd/β)(1 − 2/p).
pub fn verify_derivative_loss_dispersive(
    params: &FracParams,
    t_list: &[f64],
    tolerance: f64,
    search: &DilationSearch,
) -> Result<FitResult> {
    let gap = derivative_gap(params)?;
    let p = params.p0()?;
    let delta = params.delta();
    let samples = decay_samples(params.dim, delta, p, t_list, search, |t| {
        SymbolSpec::Product(vec![SymbolSpec::Power { theta: gap }, SymbolSpec::Schrodinger { t, delta }])
    })?;
    fit_samples(&samples, params.alpha - 1.0 - params.nu_at(p), tolerance)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlfDecayReport {
    pub p0: f64,
    pub e1: FitResult,
    pub ea: FitResult,
    /// ‖E_{α,1}(t)g₁‖_{p₀}/‖g₁‖_{p₀′} for the unit Gaussian at small t; reported only.
    pub small_time: Vec<(f64, f64)>,
    /// The t → 0 limit of the same quotient, ‖g₁‖_{p₀}/‖g₁‖_{p₀′}.
    pub small_time_limit: f64,
}

/// Decay of E_{α,1}((−it)^αD^β) and E_{α,α}((−it)^αD^β) on L^{p₀′} → L^{p₀},
/// both with target −(αd/β)(1 − 2/p₀).
pub fn verify_mlf_operator_decay(
    params: &FracParams,
    t_list: &[f64],
    tolerance: f64,
    search: &DilationSearch,
) -> Result<MlfDecayReport> {
    if !(params.beta > 2.0) {
        return Err(Error::Precondition(format!("needs beta > 2, got {}", params.beta)));
    }
    derivative_gap(params)?;
    let p0 = params.p0()?;
    let (alpha, beta, delta) = (params.alpha, params.beta, params.delta());
    let target = -params.nu_at(p0);
    let s1 = decay_samples(params.dim, delta, p0, t_list, search, |t| SymbolSpec::Mlf1 { t, alpha, beta })?;
    let sa = decay_samples(params.dim, delta, p0, t_list, search, |t| SymbolSpec::Mlf2 { t, alpha, beta })?;
    let small_time = [1e-4, 1e-3, 1e-2]
        .iter()
        .map(|&t| {
            dilation_ratio(params.dim, &SymbolSpec::Mlf1 { t, alpha, beta }, delta, t, p0, 1.0, search).map(|r| (t, r))
        })
        .collect::<Result<Vec<_>>>()?;
    clear_symbol_cache();
    Ok(MlfDecayReport {
        p0,
        e1: fit_samples(&s1, target, tolerance)?,
        ea: fit_samples(&sa, target, tolerance)?,
        small_time,
        small_time_limit: gaussian_norm(1.0, p0, params.dim) / gaussian_norm(1.0, conjugate(p0), params.dim),
    })
}

/// The raw (t, best ratio, best width) samples behind a dispersive fit.
pub fn dispersive_samples(params: &FracParams, p: f64, t_list: &[f64], search: &DilationSearch) -> Result<Vec<NormSample>> {
    let delta = params.delta();
    decay_samples(params.dim, delta, p, t_list, search, |t| SymbolSpec::Schrodinger { t, delta })
}
