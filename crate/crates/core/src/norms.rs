//! Discrete norms: Lebesgue, Sobolev, mixed space-time and time-weighted.
//!
//! L^∞ norms are grid maxima, hence lower bounds of the continuum values.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::FracParams;
use crate::solver::Trajectory;
use crate::spectral::{apply_multiplier, mlf_propagator_1, Field, Space, SymbolSpec};

/// (h^d Σ|f|^p)^{1/p}, or the grid maximum for p = ∞.
pub fn lp_norm(f: &Field, p: f64) -> f64 {
    let phys;
    let values = if f.space == Space::Physical {
        &f.values
    } else {
        phys = f.to_physical();
        &phys.values
    };
    lp_of(values, p, f.grid.cell_volume())
}

fn lp_of(values: &[num_complex::Complex64], p: f64, cell: f64) -> f64 {
    if p.is_infinite() {
        values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    } else if p == 2.0 {
        (cell * values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    } else {
        (cell * values.iter().map(|v| v.norm().powf(p)).sum::<f64>()).powf(1.0 / p)
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if p >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("Lebesgue exponent {p} must lie in [1, inf]")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivativeKind {
    /// D^s = |ξ|^s
    Homogeneous,
    /// ⟨D⟩^s = (1+|ξ|²)^{s/2}
    Inhomogeneous,
}

fn derivative_symbol(s: f64, kind: DerivativeKind) -> Result<SymbolSpec> {
    match kind {
        DerivativeKind::Homogeneous if s < 0.0 => Err(Error::InvalidParameter(format!(
            "homogeneous order {s} < 0 is singular at the zero mode"
        ))),
        DerivativeKind::Homogeneous => Ok(SymbolSpec::Power { theta: s }),
        DerivativeKind::Inhomogeneous => Ok(SymbolSpec::Bracket { s }),
    }
}

fn differentiate(f: &Field, s: f64, kind: DerivativeKind) -> Result<Field> {
    if s == 0.0 {
        return Ok(f.to_physical());
    }
    Ok(apply_multiplier(&f.to_frequency(), &derivative_symbol(s, kind)?)?.to_physical())
}

pub fn sobolev_norm(f: &Field, s: f64, kind: DerivativeKind) -> Result<f64> {
    let sym = derivative_symbol(s, kind)?;
    // Parseval: the unitary transform preserves h^d Σ|·|².
    Ok(lp_norm_frequency(&apply_multiplier(&f.to_frequency(), &sym)?))
}

fn lp_norm_frequency(f: &Field) -> f64 {
    lp_of(&f.values, 2.0, f.grid.cell_volume())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormOrder {
    /// L^p_x L^q_T: time norm inside, space norm outside.
    SpaceFirst,
    /// L^q_T L^p_x: space norm inside, time norm outside.
    TimeFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixedNormSpec {
    pub order: NormOrder,
    /// Space exponent; `f64::INFINITY` for the maximum.
    pub p: f64,
    /// Time exponent.
    pub q: f64,
    pub derivative_order: f64,
    pub derivative_kind: DerivativeKind,
}

/// Trapezoid weights on a possibly non-uniform grid.
pub fn trapezoid_weights(times: &[f64]) -> Vec<f64> {
    let n = times.len();
    let mut w = vec![0.0; n];
    for k in 0..n.saturating_sub(1) {
        let h = 0.5 * (times[k + 1] - times[k]);
        w[k] += h;
        w[k + 1] += h;
    }
    w
}

fn time_norm(values: impl Iterator<Item = f64>, weights: &[f64], q: f64) -> f64 {
    if q.is_infinite() {
        values.fold(0.0, f64::max)
    } else {
        values.zip(weights).map(|(v, w)| w * v.powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

pub fn mixed_norm(traj: &Trajectory, spec: &MixedNormSpec) -> Result<f64> {
    if traj.len() < 2 {
        return Err(Error::InvalidParameter("mixed norms need at least two times".into()));
    }
    check_exponent(spec.p)?;
    check_exponent(spec.q)?;
    let fields: Vec<Field> = traj
        .fields
        .par_iter()
        .map(|f| differentiate(f, spec.derivative_order, spec.derivative_kind))
        .collect::<Result<_>>()?;
    let w = trapezoid_weights(&traj.times);
    Ok(match spec.order {
        NormOrder::TimeFirst => time_norm(fields.iter().map(|f| lp_norm(f, spec.p)), &w, spec.q),
        NormOrder::SpaceFirst => {
            let cell = traj.grid().cell_volume();
            let inner: Vec<num_complex::Complex64> = (0..traj.grid().len())
                .into_par_iter()
                .map(|i| time_norm(fields.iter().map(|f| f.values[i].norm()), &w, spec.q).into())
                .collect();
            lp_of(&inner, spec.p, cell)
        }
    })
}

/// max over the grid of t^κ‖w(t)‖_p; t = 0 is skipped when κ ≠ 0.
pub fn weighted_sup_norm(traj: &Trajectory, kappa: f64, p: f64) -> f64 {
    traj.times
        .par_iter()
        .zip(&traj.fields)
        .filter(|(t, _)| kappa == 0.0 || **t > 0.0)
        .map(|(t, f)| t.powf(kappa) * lp_norm(f, p))
        .reduce(|| 0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaFunctionals {
    pub lambda: [f64; 5],
}

impl LambdaFunctionals {
    pub fn all_finite(&self) -> bool {
        self.lambda.iter().all(|v| v.is_finite())
    }
}

/// λ₁..λ₅ of the one-dimensional β < 2 theory.
pub fn lambda_functionals(traj: &Trajectory, s: f64, theta: f64, params: &FracParams) -> Result<LambdaFunctionals> {
    if params.dim != 1 {
        return Err(Error::Precondition("lambda functionals are one-dimensional".into()));
    }
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidParameter(format!("theta = {theta} must lie in (0, 1)")));
    }
    let delta = params.delta();
    let p = params.p;
    let sigma = s + (3.0 * delta - 1.0) / 4.0 - params.beta / 2.0;
    let gain = s + delta - params.beta;
    let spec = |order, p, q, d| MixedNormSpec {
        order,
        p,
        q,
        derivative_order: d,
        derivative_kind: DerivativeKind::Inhomogeneous,
    };
    let inf = f64::INFINITY;
    let specs = [
        spec(NormOrder::SpaceFirst, inf, 2.0, sigma),
        spec(NormOrder::TimeFirst, 2.0, inf, s),
        spec(NormOrder::SpaceFirst, 2.0 * (p - 2.0), inf, 0.0),
        spec(NormOrder::SpaceFirst, 2.0 * (p - 2.0) / (1.0 - theta), 2.0 / theta, theta * gain),
        spec(NormOrder::SpaceFirst, 2.0 * (p - 2.0) / theta, 2.0 / (1.0 - theta), (1.0 - theta) * gain),
    ];
    let mut lambda = [0.0; 5];
    for (l, sp) in lambda.iter_mut().zip(&specs) {
        *l = mixed_norm(traj, sp)?;
    }
    Ok(LambdaFunctionals { lambda })
}

/// sup of t^κ‖E_{α,1}((−it)^α D^β)w₀‖_{p₀} over a logarithmic grid on
/// [1e-2, 1e2]; only a lower bound for the supremum over all t > 0.
pub fn x0_norm_lower_bound(w0: &Field, params: &FracParams, points: usize) -> Result<f64> {
    let p0 = params.p0()?;
    let kappa = params.kappa_at(p0);
    let points = points.max(2);
    let ts: Vec<f64> = (0..points)
        .map(|i| 10f64.powf(-2.0 + 4.0 * i as f64 / (points - 1) as f64))
        .collect();
    let vals: Vec<f64> = ts
        .par_iter()
        .map(|&t| mlf_propagator_1(w0, t, params).map(|f| t.powf(kappa) * lp_norm(&f, p0)))
        .collect::<Result<_>>()?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}
