//! Scaling invariance w ↦ λ^{β/(p₀−2)} w(λ^δ t, λx) for homogeneous data.
//!
//! The rescaled solution is produced by a second solve on the box enlarged by
//! λ with the same number of points and the time horizon stretched by λ^δ, so
//! grid point j and time index m of both runs correspond exactly and no
//! interpolation enters the comparison.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::report::{non_increasing, Check, VerifyReport};
use crate::error::{Error, Result};
use crate::params::FracParams;
use crate::solver::{check_global_conditions, picard_solve, SolverConfig, Trajectory};
use crate::spectral::{Field, Grid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SelfSimilarityOptions {
    pub half_width: f64,
    pub n: usize,
    /// c in w₀ = c(|x| + ε)^{−β/(p₀−2)}.
    pub amplitude: f64,
    pub eps_halvings: usize,
    pub solver: SolverConfig,
    pub tolerance: f64,
}

impl Default for SelfSimilarityOptions {
    fn default() -> Self {
        Self {
            half_width: 4.0,
            n: 16384,
            amplitude: 0.02,
            eps_halvings: 2,
            solver: SolverConfig {
                t_final: 1.0,
                n_steps: 32,
                ..SolverConfig::default()
            },
            tolerance: 0.05,
        }
    }
}

/// c(|x| + ε)^{−degree}.
pub fn homogeneous_datum(grid: &Grid, amplitude: f64, eps: f64, degree: f64) -> Field {
    Field::from_fn(grid, |x| {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        Complex64::new(amplitude * (r + eps).powf(-degree), 0.0)
    })
}

fn solve(params: &FracParams, opts: &SelfSimilarityOptions, scale: f64, eps: f64, degree: f64) -> Result<Trajectory> {
    let grid = Grid::new(params.dim, opts.n, opts.half_width * scale)?;
    let w0 = homogeneous_datum(&grid, opts.amplitude, eps, degree);
    let config = SolverConfig {
        t_final: opts.solver.t_final * scale.powf(params.delta()),
        ..opts.solver.clone()
    };
    let (traj, diag) = picard_solve(&w0, &config, params)?;
    if !diag.converged {
        return Err(Error::Precondition(format!(
            "Picard iteration did not converge for lambda = {scale}, eps = {eps}; reduce the amplitude"
        )));
    }
    Ok(traj)
}

/// Largest relative L² mismatch over the time grid, on the inner half box.
fn mismatch(a: &Trajectory, b: &Trajectory, factor: f64, half_width: f64) -> f64 {
    let grid = &a.fields[0].grid;
    let d = grid.dim();
    let inner: Vec<usize> = (0..grid.len())
        .filter(|&i| grid.point(i)[..d].iter().all(|x| x.abs() <= 0.5 * half_width))
        .collect();
    a.fields
        .iter()
        .zip(&b.fields)
        .map(|(fa, fb)| {
            let (mut num, mut den) = (0.0, 0.0);
            for &i in &inner {
                num += (fa.values[i] - fb.values[i] * factor).norm_sqr();
                den += fa.values[i].norm_sqr();
            }
            if den == 0.0 {
                0.0
            } else {
                (num / den).sqrt()
            }
        })
        .fold(0.0, f64::max)
}

pub fn verify_self_similarity(
    params: &FracParams,
    lambdas: &[f64],
    eps: f64,
    opts: &SelfSimilarityOptions,
) -> Result<VerifyReport> {
    let regime = check_global_conditions(params)?;
    if !regime.pass {
        return Err(Error::Precondition("self-similarity needs the global regime".into()));
    }
    let p0 = params.p0()?;
    if (params.p - p0).abs() > 1e-9 * p0 {
        return Err(Error::Precondition(format!("nonlinearity power {} must equal p0 = {p0}", params.p)));
    }
    if !(eps > 0.0) || lambdas.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::InvalidParameter("eps and every lambda must be positive".into()));
    }
    let degree = params.beta / (p0 - 2.0);
    let eps_list: Vec<f64> = (0..=opts.eps_halvings).map(|k| eps / 2f64.powi(k as i32)).collect();
    let mut report = VerifyReport::new("self-similarity", params);
    report.note = Some(format!(
        "w0 = {}(|x| + eps)^(-{degree}); second solve on a box scaled by lambda with time scaled by lambda^delta",
        opts.amplitude
    ));
    let bases: Vec<Trajectory> = eps_list
        .iter()
        .map(|&e| solve(params, opts, 1.0, e, degree))
        .collect::<Result<_>>()?;
    for &lambda in lambdas {
        let mut series = Vec::new();
        for (base, &e) in bases.iter().zip(&eps_list) {
            let scaled = solve(params, opts, lambda, e, degree)?;
            series.push((e, mismatch(base, &scaled, lambda.powf(degree), opts.half_width)));
        }
        let worst = series.iter().map(|s| s.1).fold(0.0, f64::max);
        report.push(Check::scalar(format!("mismatch lambda={lambda}"), worst, opts.tolerance));
        let values: Vec<f64> = series.iter().map(|s| s.1).collect();
        let trend = non_increasing(&values, 1e-9);
        report.push(Check::Trend {
            name: format!("mismatch non-increasing as eps halves, lambda={lambda}"),
            values: series,
            non_increasing: trend,
            pass: trend,
        });
    }
    Ok(report)
}
