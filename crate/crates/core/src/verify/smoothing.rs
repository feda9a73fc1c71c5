//! Local smoothing of e^{−itD^δ} in one dimension.
//!
//! For ĝ supported in ξ > 0 the change of variables τ = ξ^δ and Plancherel in t
//! give ∫_ℝ|e^{−itD^δ}g(x)|²dt = (1/2π)∫|ĝ(ξ)|²/(δξ^{δ−1})dξ at every x. The
//! left side is measured here by evolving in time on the periodic box.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::FracParams;
use crate::spectral::{schrodinger_group, Direction, Field, Grid, Space};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SmoothingOptions {
    /// Integration runs over t ∈ [−window, window].
    pub window: f64,
    pub x_points: Vec<f64>,
    pub tolerance: f64,
}

impl Default for SmoothingOptions {
    fn default() -> Self {
        Self {
            window: 4.0,
            x_points: vec![-2.0, 0.0, 1.0, 3.0],
            tolerance: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothingEqualityReport {
    pub delta: f64,
    /// (x, ∫|u(t,x)|²dt) at the grid points nearest the requested x.
    pub lhs: Vec<(f64, f64)>,
    pub rhs: f64,
    pub max_deviation: f64,
    /// Share of the time integral from |t| > 0.9·window, worst x.
    pub tail: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Largest |ξ| carrying |ĝ| above `rel`·max|ĝ|.
fn effective_bandwidth(grid: &Grid, hat: &[Complex64], rel: f64) -> f64 {
    let peak = hat.iter().map(|v| v.norm()).fold(0.0, f64::max);
    hat.iter()
        .zip(grid.freqs())
        .filter(|(v, _)| v.norm() > rel * peak)
        .map(|(_, k)| k.abs())
        .fold(0.0, f64::max)
}

/// Requires the box to hold the solution at ±window.
fn check_box(f: &Field, delta: f64, window: f64) -> Result<()> {
    for t in [-window, window] {
        let u = schrodinger_group(f, t, delta)?;
        let frac = u.boundary_mass_fraction(0.125);
        if frac > 1e-8 {
            return Err(Error::BoxTooSmall { fraction: frac, n: f.grid.n() });
        }
    }
    Ok(())
}

/// Trapezoid time step resolving the beat frequencies of |u|², and the step count.
fn time_steps(bandwidth: f64, delta: f64, window: f64) -> (f64, usize) {
    let tau = bandwidth.powf(delta).max(1.0);
    let steps = ((2.0 * window) / (PI / (2.0 * tau))).ceil() as usize;
    let steps = steps.max(16);
    (2.0 * window / steps as f64, steps)
}

pub fn verify_smoothing_equality_1d(delta: f64, g_hat: &Field, opts: &SmoothingOptions) -> Result<SmoothingEqualityReport> {
    let grid = g_hat.grid.clone();
    if grid.dim() != 1 {
        return Err(Error::Precondition("smoothing identity is one-dimensional".into()));
    }
    if !(delta > 1.0) || !(opts.window > 0.0) {
        return Err(Error::InvalidParameter(format!("need delta > 1 and a positive window (delta={delta})")));
    }
    let spec = g_hat.continuous_spectrum();
    let freqs = grid.freqs();
    let total: f64 = spec.iter().map(|v| v.norm_sqr()).sum();
    let negative: f64 = spec.iter().zip(freqs).filter(|(_, &k)| k <= 0.0).map(|(v, _)| v.norm_sqr()).sum();
    if !(total > 0.0) || negative > 1e-12 * total {
        return Err(Error::Precondition(format!(
            "spectrum must be supported in xi > 0 (share on xi <= 0 is {:e})",
            if total > 0.0 { negative / total } else { 1.0 }
        )));
    }
    let physical = g_hat.to_physical();
    check_box(&physical, delta, opts.window)?;

    let dk = freqs[1] - freqs[0];
    let rhs = dk / (2.0 * PI)
        * spec
            .iter()
            .zip(freqs)
            .filter(|(_, &k)| k > 0.0)
            .map(|(v, &k)| v.norm_sqr() / (delta * k.powf(delta - 1.0)))
            .sum::<f64>();

    let active: Vec<usize> = (0..grid.n()).filter(|&j| freqs[j] > 0.0 && spec[j].norm() > 1e-16 * total.sqrt()).collect();
    let band = active.iter().map(|&j| freqs[j]).fold(0.0, f64::max);
    let (dt, steps) = time_steps(band, delta, opts.window);
    let xs: Vec<f64> = opts
        .x_points
        .iter()
        .map(|&x| grid.coord(((x + grid.half_width()) / grid.spacing()).round() as usize % grid.n()))
        .collect();
    // a_j(x) = ĝ(ξ_j)e^{ixξ_j}Δξ/2π; u(t,x) = Σ a_j e^{−itξ_j^δ}.
    let amps: Vec<Vec<Complex64>> = xs
        .iter()
        .map(|&x| active.iter().map(|&j| spec[j] * Complex64::from_polar(dk / (2.0 * PI), x * freqs[j])).collect())
        .collect();
    let taus: Vec<f64> = active.iter().map(|&j| freqs[j].powf(delta)).collect();
    let mut integral = vec![0.0; xs.len()];
    let mut outer = vec![0.0; xs.len()];
    for m in 0..=steps {
        let t = -opts.window + m as f64 * dt;
        let w = if m == 0 || m == steps { 0.5 * dt } else { dt };
        let phases: Vec<Complex64> = taus.iter().map(|&tau| Complex64::from_polar(1.0, -t * tau)).collect();
        for (i, a) in amps.iter().enumerate() {
            let u: Complex64 = a.iter().zip(&phases).map(|(a, e)| a * e).sum();
            integral[i] += w * u.norm_sqr();
            if t.abs() > 0.9 * opts.window {
                outer[i] += w * u.norm_sqr();
            }
        }
    }
    let tail = outer.iter().zip(&integral).map(|(o, i)| o / i).fold(0.0, f64::max);
    if tail > 0.5 * opts.tolerance {
        return Err(Error::WindowTooShort { tail, tolerance: opts.tolerance });
    }
    let max_deviation = integral.iter().map(|v| (v - rhs).abs() / rhs).fold(0.0, f64::max);
    Ok(SmoothingEqualityReport {
        delta,
        lhs: xs.into_iter().zip(integral).collect(),
        rhs,
        max_deviation,
        tail,
        tolerance: opts.tolerance,
        pass: max_deviation <= opts.tolerance,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SmoothingBoundOptions {
    pub bandwidths: Vec<f64>,
    /// Wave packets per random datum.
    pub packets: usize,
    /// Envelope width of each packet.
    pub envelope: f64,
    pub window: f64,
    /// The sup over x runs over |x| ≤ x_range.
    pub x_range: f64,
    pub seed: u64,
    /// Allowed relative spread of the per-level maxima around their mean.
    pub stability: f64,
    pub amplitude: f64,
}

impl Default for SmoothingBoundOptions {
    fn default() -> Self {
        Self {
            bandwidths: vec![1.0, 2.0, 4.0],
            packets: 6,
            envelope: 2.0,
            window: 6.0,
            x_range: 4.0,
            seed: 2024,
            stability: 0.1,
            amplitude: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandLevel {
    pub bandwidth: f64,
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothingBoundReport {
    pub delta: f64,
    pub levels: Vec<BandLevel>,
    /// max_l |r_l − mean|/mean over the per-level maxima.
    pub spread: f64,
    /// |r(c·f) − r(f)|/r(f) for the first datum.
    pub amplitude_deviation: f64,
    pub pass: bool,
}

/// ‖D^{(δ−1)/2}e^{−itD^δ}f‖_{L^∞_x L²_t} over |x| ≤ x_range and t ∈ [−T, T].
pub fn smoothing_norm(f: &Field, delta: f64, window: f64, x_range: f64) -> Result<f64> {
    let grid = f.grid.clone();
    if grid.dim() != 1 {
        return Err(Error::Precondition("smoothing norm is one-dimensional".into()));
    }
    let hat = f.to_frequency();
    let band = effective_bandwidth(&grid, &hat.values, 1e-12);
    let (dt, steps) = time_steps(band, delta, window);
    let weight: Vec<Complex64> = grid
        .freqs()
        .iter()
        .zip(&hat.values)
        .map(|(&k, v)| v * k.abs().powf(0.5 * (delta - 1.0)))
        .collect();
    let taus: Vec<f64> = grid.freqs().iter().map(|k| k.abs().powf(delta)).collect();
    let picks: Vec<usize> = (0..grid.n()).filter(|&j| grid.coord(j).abs() <= x_range).collect();
    let mut acc = vec![0.0; picks.len()];
    let mut buf = Field::zeros(&grid, Space::Frequency);
    for m in 0..=steps {
        let t = -window + m as f64 * dt;
        let w = if m == 0 || m == steps { 0.5 * dt } else { dt };
        for ((b, a), &tau) in buf.values.iter_mut().zip(&weight).zip(&taus) {
            *b = a * Complex64::from_polar(1.0, -t * tau);
        }
        let mut vals = buf.values.clone();
        grid.fft_axes(&mut vals, Direction::Inverse);
        for (s, &j) in acc.iter_mut().zip(&picks) {
            *s += w * vals[j].norm_sqr();
        }
    }
    Ok(acc.into_iter().fold(0.0, f64::max).sqrt())
}

fn random_datum(grid: &Grid, rng: &mut ChaCha8Rng, bandwidth: f64, opts: &SmoothingBoundOptions) -> Field {
    let packets: Vec<(Complex64, f64, f64)> = (0..opts.packets)
        .map(|_| {
            let c = Complex64::from_polar(rng.gen_range(0.5..1.0), rng.gen_range(0.0..2.0 * PI));
            (c, rng.gen_range(-bandwidth..bandwidth), rng.gen_range(-2.0..2.0))
        })
        .collect();
    let s = opts.envelope;
    let f = Field::from_fn(grid, |x| {
        packets
            .iter()
            .map(|&(c, k, x0)| c * Complex64::from_polar((-(x[0] - x0).powi(2) / (2.0 * s * s)).exp(), k * x[0]))
            .sum()
    });
    let norm = f.l2();
    f.scaled(Complex64::new(1.0 / norm, 0.0))
}

/// Box for packets of the given bandwidth over the window.
fn bound_grid(delta: f64, bandwidth: f64, opts: &SmoothingBoundOptions) -> Result<Grid> {
    let k_eff = bandwidth + 7.0 / opts.envelope;
    let travel = delta * k_eff.powf(delta - 1.0) * opts.window;
    let half = 1.25 * (travel + opts.x_range + 2.0 + 6.0 * opts.envelope);
    let spacing = PI / (1.3 * k_eff);
    let n = ((2.0 * half / spacing).ceil() as usize).next_power_of_two();
    Grid::new(1, n, 0.5 * n as f64 * spacing)
}

pub fn verify_smoothing_bound_1d(params: &FracParams, trials: usize, opts: &SmoothingBoundOptions) -> Result<SmoothingBoundReport> {
    if params.dim != 1 {
        return Err(Error::Precondition("smoothing bound is one-dimensional".into()));
    }
    let delta = params.delta();
    if !(delta > 1.0) || trials == 0 || opts.bandwidths.is_empty() {
        return Err(Error::Precondition(format!(
            "needs delta > 1, at least one trial and one bandwidth (delta={delta})"
        )));
    }
    let mut levels = Vec::new();
    let mut amplitude_deviation = 0.0;
    for (li, &bw) in opts.bandwidths.iter().enumerate() {
        let grid = bound_grid(delta, bw, opts)?;
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(li as u64));
        let mut ratios = Vec::with_capacity(trials);
        for trial in 0..trials {
            let f = random_datum(&grid, &mut rng, bw, opts);
            check_box(&f, delta, opts.window)?;
            let r = smoothing_norm(&f, delta, opts.window, opts.x_range)? / f.l2();
            if li == 0 && trial == 0 {
                let c = Complex64::new(opts.amplitude, 0.0);
                let g = f.scaled(c);
                let rc = smoothing_norm(&g, delta, opts.window, opts.x_range)? / g.l2();
                amplitude_deviation = (rc - r).abs() / r;
            }
            ratios.push(r);
        }
        let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
        levels.push(BandLevel { bandwidth: bw, ratios, max_ratio });
    }
    let mean = levels.iter().map(|l| l.max_ratio).sum::<f64>() / levels.len() as f64;
    let spread = levels.iter().map(|l| (l.max_ratio - mean).abs() / mean).fold(0.0, f64::max);
    let finite = levels.iter().all(|l| l.max_ratio.is_finite() && l.max_ratio > 0.0);
    Ok(SmoothingBoundReport {
        delta,
        pass: finite && spread <= opts.stability && amplitude_deviation <= 1e-12,
        levels,
        spread,
        amplitude_deviation,
    })
}
