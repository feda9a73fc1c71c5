//! Physical-space dispersive kernels
//! K_t(x) = ∫ e^{i(t|ξ|^ϖ + x·ξ)} |ξ|^η dξ and the fractional heat profile.
//!
//! Both are radial, so they reduce to ∫₀^∞ A(ρr) r^{η+d−1} (…) dr with the
//! angular factor A = 2cos, 2πJ₀ or 4π sinc for d = 1, 2, 3. The oscillatory
//! integral runs along the real axis up to a dyadic cutoff R and then along
//! the ray R + s e^{iπ/(2ϖ)}, where e^{itr^ϖ} decays.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mlf::gauss_legendre;
use crate::verify::{fit_power_law, FitResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelQuery {
    pub varpi: f64,
    pub eta: f64,
    pub dim: usize,
    /// Scan positions; only |x| matters.
    pub x_points: Vec<f64>,
    /// Lower bound for the real-axis cutoff.
    pub freq_cutoff: f64,
    /// Dyadic shells below |ξ| = 1: the first edge is 2^{−dyadic_levels}.
    pub dyadic_levels: u32,
    pub nodes_per_panel: usize,
    /// Largest phase change allowed within one panel.
    pub max_panel_phase: f64,
    /// Allowed change under cutoff doubling, relative to max(1, |K|).
    pub tolerance: f64,
}

impl Default for KernelQuery {
    fn default() -> Self {
        Self {
            varpi: 3.0,
            eta: 0.0,
            dim: 1,
            x_points: (0..=200).map(|i| i as f64 * 0.25).collect(),
            freq_cutoff: 1.0,
            dyadic_levels: 8,
            nodes_per_panel: 8,
            max_panel_phase: PI,
            tolerance: 1e-8,
        }
    }
}

impl KernelQuery {
    pub fn new(varpi: f64, eta: f64, dim: usize) -> Result<Self> {
        let q = Self {
            varpi,
            eta,
            dim,
            ..Self::default()
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.varpi >= 2.0) || !(self.eta >= 0.0) || !(1..=3).contains(&self.dim) {
            return Err(Error::InvalidParameter(format!(
                "kernel needs varpi >= 2, eta >= 0, d in 1..=3 (got {}, {}, {})",
                self.varpi, self.eta, self.dim
            )));
        }
        if !(self.freq_cutoff > 0.0) || self.nodes_per_panel < 2 || !(self.max_panel_phase > 0.0) {
            return Err(Error::InvalidParameter(
                "freq_cutoff, max_panel_phase must be positive and nodes_per_panel >= 2".into(),
            ));
        }
        Ok(())
    }

    /// 0 ≤ η/d ≤ ϖ/2 − 1.
    pub fn in_bounded_regime(&self) -> bool {
        self.eta / self.dim as f64 <= self.varpi / 2.0 - 1.0 + 1e-12
    }

    /// Twice the nodes on half the phase per panel.
    pub fn refined(&self) -> Self {
        Self {
            nodes_per_panel: self.nodes_per_panel * 2,
            max_panel_phase: self.max_panel_phase / 2.0,
            freq_cutoff: self.freq_cutoff * 2.0,
            ..self.clone()
        }
    }

    pub fn scaling_exponent(&self) -> f64 {
        -(self.dim as f64 + self.eta) / self.varpi
    }
}

/// J₀ for complex arguments: the Hankel expansion for |z| ≥ 20, otherwise
/// the trapezoid rule on (1/π)∫₀^π cos(z sin τ) dτ, which converges
/// geometrically for this periodic integrand.
fn bessel_j0_complex(z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        return Complex64::new(libm::j0(z.re), 0.0);
    }
    if z.norm() >= 20.0 && z.re > 0.0 {
        let (mut p, mut q) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        let mut term = Complex64::new(1.0, 0.0);
        let mut last = f64::INFINITY;
        for k in 0..30 {
            if k > 0 {
                let j = (2 * k - 1) as f64;
                term *= -(j * j) / (k as f64 * 8.0) / z;
            }
            let mag = term.norm();
            if mag > last || mag < 1e-17 {
                break;
            }
            last = mag;
            // a_k z^{−k}: even k feed P with sign (−1)^{k/2}, odd k feed Q
            let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            if k % 2 == 0 {
                p += term * sign;
            } else {
                q += term * sign;
            }
        }
        let w = z - PI / 4.0;
        return (2.0 / (PI * z)).sqrt() * (p * w.cos() - q * w.sin());
    }
    let m = 2 * (z.norm().ceil() as usize + 24);
    let h = PI / m as f64;
    let s: Complex64 = (0..m).map(|k| (z * (k as f64 * h).sin()).cos()).sum();
    s / m as f64
}

/// Angular factor ∫_{S^{d−1}} e^{iρr ω₁} dσ(ω).
fn angular(dim: usize, rho: f64, r: Complex64) -> Complex64 {
    let z = r * rho;
    match dim {
        1 => 2.0 * z.cos(),
        2 => 2.0 * PI * bessel_j0_complex(z),
        _ => {
            if z.norm() < 1e-4 {
                4.0 * PI * (1.0 - z * z / 6.0)
            } else {
                4.0 * PI * z.sin() / z
            }
        }
    }
}

/// Panels [lo, hi] on [0, cutoff]: dyadic shells, each split so the local
/// phase rate times the panel width stays below `max_phase`.
fn panels(first: f64, cutoff: f64, max_phase: f64, rate: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
    let mut edges = vec![0.0];
    let mut e = first.min(cutoff);
    while e < cutoff {
        edges.push(e);
        e *= 2.0;
    }
    edges.push(cutoff);
    let mut out = Vec::new();
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        let m = ((rate(b) * (b - a)) / max_phase).ceil().max(1.0) as usize;
        let h = (b - a) / m as f64;
        out.extend((0..m).map(|i| (a + i as f64 * h, a + (i + 1) as f64 * h)));
    }
    out
}

fn gl_sum(panels: &[(f64, f64)], nodes: usize, f: impl Fn(f64) -> Complex64) -> Complex64 {
    let rule = gauss_legendre(nodes);
    let mut acc = Complex64::new(0.0, 0.0);
    for &(a, b) in panels {
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        for &(x, w) in rule {
            acc += f(c + h * x) * (w * h);
        }
    }
    acc
}

struct Oscillatory<'a> {
    q: &'a KernelQuery,
    t: f64,
    rho: f64,
}

impl Oscillatory<'_> {
    fn integrand(&self, r: Complex64) -> Complex64 {
        let q = self.q;
        let power = q.eta + q.dim as f64 - 1.0;
        let amp = if power == 0.0 { Complex64::new(1.0, 0.0) } else { r.powf(power) };
        angular(q.dim, self.rho, r) * amp * (Complex64::i() * self.t * r.powf(q.varpi)).exp()
    }

    fn phase_rate(&self, r: f64) -> f64 {
        self.t * self.q.varpi * r.powf(self.q.varpi - 1.0) + self.rho
    }

    /// Smallest cutoff ≥ freq_cutoff where the phase rate tϖR^{ϖ−1} is at
    /// least 2ρ + 4, so the ray integrand decays monotonically.
    fn base_cutoff(&self) -> f64 {
        let q = self.q;
        let r = ((2.0 * self.rho + 4.0) / (self.t * q.varpi)).powf(1.0 / (q.varpi - 1.0));
        r.max(q.freq_cutoff)
    }

    fn evaluate(&self, cutoff: f64) -> Complex64 {
        let q = self.q;
        let first = 2f64.powi(-(q.dyadic_levels as i32));
        let ps = panels(first, cutoff, q.max_panel_phase, |r| self.phase_rate(r));
        let real = gl_sum(&ps, q.nodes_per_panel, |r| self.integrand(Complex64::new(r, 0.0)));
        real + self.ray(cutoff)
    }

    /// ∫ along R + s e^{iθ}, θ = π/(2ϖ), until the integrand has decayed by e^{−45}.
    fn ray(&self, r0: f64) -> Complex64 {
        let q = self.q;
        let dir = Complex64::from_polar(1.0, PI / (2.0 * q.varpi));
        let log_mag = |s: f64| -self.t * (r0 + dir * s).powf(q.varpi).im + self.rho * s * dir.im;
        let rate = |s: f64| self.t * q.varpi * (r0 + s).powf(q.varpi - 1.0) + self.rho;
        let mut len = 1.0 / (self.t * q.varpi * r0.powf(q.varpi - 1.0) - self.rho).max(1e-300) / dir.im;
        while log_mag(len) > -45.0 {
            len *= 2.0;
        }
        let mut ps = Vec::new();
        let mut s = 0.0;
        while s < len {
            let h = (q.max_panel_phase / rate(s)).min(len / 16.0).min(len - s);
            ps.push((s, s + h));
            s += h;
        }
        gl_sum(&ps, q.nodes_per_panel, |s| self.integrand(r0 + dir * s)) * dir
    }
}

/// K_t(x) with the cutoff-doubling certificate.
pub fn oscillatory_kernel_at(q: &KernelQuery, t: f64, x: f64) -> Result<Complex64> {
    q.validate()?;
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("kernel time {t} must be positive")));
    }
    let k = Oscillatory { q, t, rho: x.abs() };
    let r = k.base_cutoff();
    let a = k.evaluate(r);
    let b = k.evaluate(2.0 * r);
    let change = (a - b).norm();
    if change > q.tolerance * b.norm().max(1.0) {
        return Err(Error::NotConverged {
            change,
            tolerance: q.tolerance,
        });
    }
    Ok(b)
}

/// ∫ e^{i(|ξ|^ϖ + x·ξ)} |ξ|^η dξ.
pub fn oscillatory_kernel(q: &KernelQuery, x: f64) -> Result<Complex64> {
    oscillatory_kernel_at(q, 1.0, x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupScan {
    pub sup: f64,
    pub at: f64,
}

/// max |K_t| over the query positions, polished by golden-section search
/// between the neighbours of the best grid point.
pub fn kernel_sup_scan_at(q: &KernelQuery, t: f64) -> Result<SupScan> {
    if q.x_points.is_empty() {
        return Err(Error::InvalidParameter("kernel scan needs x points".into()));
    }
    let mut xs: Vec<f64> = q.x_points.iter().map(|x| x.abs()).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let vals: Vec<f64> = xs
        .par_iter()
        .map(|&x| oscillatory_kernel_at(q, t, x).map(|v| v.norm()))
        .collect::<Result<_>>()?;
    let (i, &best) = vals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty scan");
    let mut lo = xs[i.saturating_sub(1)];
    let mut hi = xs[(i + 1).min(xs.len() - 1)];
    let f = |x: f64| oscillatory_kernel_at(q, t, x).map(|v| v.norm());
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (hi - g * (hi - lo), lo + g * (hi - lo));
    let (mut fa, mut fb) = (f(a)?, f(b)?);
    for _ in 0..40 {
        if hi - lo < 1e-9 * (1.0 + hi) {
            break;
        }
        if fa > fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = f(a)?;
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = f(b)?;
        }
    }
    let (x_best, v_best) = [(xs[i], best), (a, fa), (b, fb)]
        .into_iter()
        .max_by(|p, q| p.1.total_cmp(&q.1))
        .expect("three candidates");
    Ok(SupScan {
        sup: v_best,
        at: x_best,
    })
}

pub fn kernel_sup_scan(q: &KernelQuery) -> Result<f64> {
    kernel_sup_scan_at(q, 1.0).map(|s| s.sup)
}

/// Fits t ↦ sup_x |K_t(x)| against t^{−(d+η)/ϖ}.
pub fn scaled_kernel_decay(q: &KernelQuery, t_list: &[f64], tolerance: f64) -> Result<FitResult> {
    let samples: Vec<(f64, f64)> = t_list
        .iter()
        .map(|&t| kernel_sup_scan_at(q, t).map(|s| (t, s.sup)))
        .collect::<Result<_>>()?;
    fit_power_law(&samples, q.scaling_exponent(), tolerance)
}

/// Closed form of K_t for ϖ = 2, η = 0: (π/t)^{d/2} e^{iπd/4} e^{−i|x|²/(4t)}.
pub fn fresnel_kernel(t: f64, x: f64, dim: usize) -> Complex64 {
    let d = dim as f64;
    Complex64::from_polar((PI / t).powf(d / 2.0), PI * d / 4.0 - x * x / (4.0 * t))
}

/// (2π)^{−d/2} ∫ e^{ix·ξ} |ξ|^θ e^{−t|ξ|^δ} dξ.
pub fn heat_kernel(delta: f64, theta: f64, t: f64, x: f64, dim: usize) -> Result<Complex64> {
    if !(delta > 0.0) || !(theta >= 0.0) || !(t > 0.0) || !(1..=3).contains(&dim) {
        return Err(Error::InvalidParameter(format!(
            "heat kernel needs delta > 0, theta >= 0, t > 0, d in 1..=3 (got {delta}, {theta}, {t}, {dim})"
        )));
    }
    let rho = x.abs();
    let power = theta + dim as f64 - 1.0;
    // e^{−t r^δ} r^power < e^{−40} beyond the cutoff
    let mut cutoff = (40.0 / t).powf(1.0 / delta);
    while t * cutoff.powf(delta) - power * cutoff.ln().max(0.0) < 40.0 {
        cutoff *= 1.25;
    }
    let first = (1e-6 * cutoff).min(2f64.powi(-20).max(1e-300));
    let ps = panels(first, cutoff, PI / 2.0, |r| rho + t * delta * r.powf(delta - 1.0).min(1e6));
    let v = gl_sum(&ps, 16, |r| {
        let rc = Complex64::new(r, 0.0);
        angular(dim, rho, rc) * r.powf(power) * (-t * r.powf(delta)).exp()
    });
    Ok(v * (2.0 * PI).powf(-(dim as f64) / 2.0))
}

/// S_θ(x): the heat kernel at t = 1.
pub fn heat_kernel_profile(delta: f64, theta: f64, x: f64, dim: usize) -> Result<Complex64> {
    heat_kernel(delta, theta, 1.0, x, dim)
}
