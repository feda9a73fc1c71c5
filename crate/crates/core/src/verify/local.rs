//! Picard-contraction harness for the global regime and the short-time run
//! of the one-dimensional β < 2 theory.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::asymptotic::small_data_threshold;
use super::report::{Check, VerifyReport};
use crate::error::{Error, Result};
use crate::norms::{lambda_functionals, LambdaFunctionals};
use crate::params::FracParams;
use crate::solver::{
    caputo_residual, check_beta_lt2_conditions, picard_solve, ConvergenceNorm, IterationDiagnostics, RegimeReport,
    SolverConfig,
};
use crate::spectral::Field;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PicardOptions {
    pub solver: SolverConfig,
    pub max_halvings: usize,
    /// Caputo residuals at n_steps·2^k for k < refinement_levels.
    pub refinement_levels: usize,
    pub interior_fraction: f64,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self {
            solver: SolverConfig {
                t_final: 1.0,
                n_steps: 64,
                picard_tol: 1e-12,
                picard_max_iters: 40,
                norm_for_convergence: ConvergenceNorm::XKappa,
                ..SolverConfig::default()
            },
            max_halvings: 12,
            refinement_levels: 3,
            interior_fraction: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicardReport {
    pub report: VerifyReport,
    /// Factor applied to the given datum by the small-data search.
    pub scale: f64,
    pub diagnostics: IterationDiagnostics,
    /// (n_steps, max relative Caputo residual)
    pub caputo: Vec<(f64, f64)>,
}

/// Shrinks the datum until the iteration contracts, then checks the last
/// three ratios, the fixed-point residual and the Caputo residual under
/// time-step refinement.
pub fn verify_picard_contraction(params: &FracParams, w0: &Field, opts: &PicardOptions) -> Result<PicardReport> {
    let run = small_data_threshold(w0, &opts.solver, params, opts.max_halvings)?;
    let diag = run.diagnostics;
    let mut report = VerifyReport::new("picard-contraction", params);
    let last = diag.ratios[diag.ratios.len() - 3..].iter().copied().fold(0.0, f64::max);
    report.push(Check::scalar("last three iterate ratios", last, 0.5));
    report.push(Check::scalar(
        "fixed-point residual",
        diag.fixed_point_residual,
        2.0 * opts.solver.picard_tol,
    ));

    let datum = w0.scaled(Complex64::new(run.scale, 0.0));
    let mut caputo = Vec::new();
    for k in 0..opts.refinement_levels.max(2) {
        let cfg = SolverConfig {
            n_steps: opts.solver.n_steps << k,
            ..opts.solver.clone()
        };
        let traj = if k == 0 {
            run.trajectory.clone()
        } else {
            picard_solve(&datum, &cfg, params)?.0
        };
        let r = caputo_residual(&traj, opts.interior_fraction)?;
        caputo.push((cfg.n_steps as f64, r.max_relative));
    }
    let decreasing = caputo.windows(2).all(|w| w[1].1 < w[0].1);
    report.push(Check::Trend {
        name: "caputo residual under refinement".into(),
        values: caputo.clone(),
        non_increasing: decreasing,
        pass: decreasing,
    });
    report.note = Some(format!("datum scaled by 2^-{}", run.halvings));
    Ok(PicardReport {
        report,
        scale: run.scale,
        diagnostics: diag,
        caputo,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LocalRunOptions {
    /// Starting solver configuration; t_final is halved until Picard converges.
    pub solver: SolverConfig,
    pub max_halvings: usize,
}

impl Default for LocalRunOptions {
    fn default() -> Self {
        Self {
            solver: SolverConfig {
                t_final: 1.0,
                n_steps: 64,
                picard_tol: 1e-10,
                picard_max_iters: 60,
                ..SolverConfig::default()
            },
            max_halvings: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalRunReport {
    pub report: VerifyReport,
    pub regime: RegimeReport,
    pub lambda: LambdaFunctionals,
    /// The horizon the harness settled on.
    pub t_final: f64,
    pub diagnostics: IterationDiagnostics,
}

/// Condition check, then a Picard solve on [0, T] with T halved until the
/// iteration converges, then λ₁..λ₅ of the result.
pub fn verify_beta_lt2_run(params: &FracParams, s: f64, theta: f64, w0: &Field, opts: &LocalRunOptions) -> Result<LocalRunReport> {
    let regime = check_beta_lt2_conditions(params, s, theta)?;
    let mut report = VerifyReport::new("beta-lt-2-local", params);
    let failed = regime.conditions.iter().filter(|c| !c.pass).count();
    report.push(Check::scalar("failed regime conditions", failed as f64, 0.0));

    let mut cfg = opts.solver.clone();
    let mut found = None;
    for _ in 0..=opts.max_halvings {
        match picard_solve(w0, &cfg, params) {
            Ok((traj, diag)) if diag.converged => {
                found = Some((traj, diag));
                break;
            }
            Ok(_) | Err(Error::NotContracting(_)) => cfg.t_final *= 0.5,
            Err(e) => return Err(e),
        }
    }
    let (traj, diag) = found.ok_or_else(|| {
        Error::Precondition(format!(
            "Picard iteration did not converge after {} halvings of T",
            opts.max_halvings
        ))
    })?;
    let last = diag.distances.last().copied().unwrap_or(0.0);
    report.push(Check::scalar("final iterate distance", last, cfg.picard_tol));
    let lambda = lambda_functionals(&traj, s, theta, params)?;
    let bad = lambda.lambda.iter().filter(|v| !v.is_finite()).count();
    report.push(Check::scalar("non-finite lambda functionals", bad as f64, 0.0));
    Ok(LocalRunReport {
        report,
        regime,
        lambda,
        t_final: cfg.t_final,
        diagnostics: diag,
    })
}
