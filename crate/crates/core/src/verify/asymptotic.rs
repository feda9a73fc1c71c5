//! Finite-window view of the asymptotic equivalence between two solutions and
//! the linear evolution of their data difference, and a small-data search.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::report::{non_increasing, Check, VerifyReport};
use crate::error::{Error, Result};
use crate::norms::lp_norm;
use crate::params::FracParams;
use crate::solver::{check_global_conditions, linear_evolve, picard_solve, IterationDiagnostics, SolverConfig, Trajectory};
use crate::spectral::Field;

#[derive(Debug, Clone)]
pub struct SmallDataRun {
    /// Factor applied to the given datum.
    pub scale: f64,
    pub halvings: usize,
    pub trajectory: Trajectory,
    pub diagnostics: IterationDiagnostics,
}

/// True when the iteration converged and its last three successive-distance
/// ratios are at most 0.5.
pub fn contracts(diag: &IterationDiagnostics) -> bool {
    diag.converged && diag.ratios.len() >= 3 && diag.ratios[diag.ratios.len() - 3..].iter().all(|&r| r <= 0.5)
}

/// Halves the datum until the Picard iteration contracts with ratio ≤ 0.5.
pub fn small_data_threshold(w0: &Field, config: &SolverConfig, params: &FracParams, max_halvings: usize) -> Result<SmallDataRun> {
    let mut scale = 1.0;
    for halvings in 0..=max_halvings {
        let datum = w0.scaled(Complex64::new(scale, 0.0));
        match picard_solve(&datum, config, params) {
            Ok((trajectory, diagnostics)) if contracts(&diagnostics) => {
                return Ok(SmallDataRun {
                    scale,
                    halvings,
                    trajectory,
                    diagnostics,
                })
            }
            Ok(_) | Err(Error::NotContracting(_)) => scale *= 0.5,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Precondition(format!(
        "Picard iteration did not contract after {max_halvings} halvings of the datum"
    )))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AsymptoticOptions {
    pub solver: SolverConfig,
    /// Relative slack in the monotonicity test.
    pub slack: f64,
}

impl Default for AsymptoticOptions {
    fn default() -> Self {
        Self {
            solver: SolverConfig {
                t_final: 10.0,
                n_steps: 64,
                ..SolverConfig::default()
            },
            slack: 1e-6,
        }
    }
}

pub const ASYMPTOTIC_NOTE: &str = "finite-window trend check: both weighted series are compared over the final decade \
of the time window; the t -> infinity equivalence itself is not asserted";

/// a(t) = t^κ‖w(t) − v(t)‖_{p₀} and b(t) = t^κ‖E_{α,1}((−it)^αD^β)(w₀ − v₀)‖_{p₀}
/// over the final decade [T/10, T]. The verdict is that the two series share
/// their trend: both non-increasing, or neither.
pub fn verify_asymptotic_link(params: &FracParams, w0: &Field, v0: &Field, opts: &AsymptoticOptions) -> Result<VerifyReport> {
    if !check_global_conditions(params)?.pass {
        return Err(Error::Precondition("asymptotic link needs the global regime".into()));
    }
    let p0 = params.p0()?;
    let kappa = params.kappa_at(p0);
    let run = |d: &Field| -> Result<Trajectory> {
        let (traj, diag) = picard_solve(d, &opts.solver, params)?;
        if !diag.converged {
            return Err(Error::Precondition("data are not small: Picard iteration did not converge".into()));
        }
        Ok(traj)
    };
    let w = run(w0)?;
    let v = run(v0)?;
    let lin = linear_evolve(&w0.sub(v0)?, &w.times, params)?;
    let t_end = *w.times.last().expect("non-empty");
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (m, &t) in w.times.iter().enumerate() {
        if t < 0.1 * t_end * (1.0 - 1e-12) {
            continue;
        }
        let weight = t.powf(kappa);
        a.push((t, weight * lp_norm(&w.fields[m].sub(&v.fields[m])?, p0)));
        b.push((t, weight * lp_norm(&lin.fields[m], p0)));
    }
    let av: Vec<f64> = a.iter().map(|s| s.1).collect();
    let bv: Vec<f64> = b.iter().map(|s| s.1).collect();
    let a_down = non_increasing(&av, opts.slack);
    let b_down = non_increasing(&bv, opts.slack);
    let floor = opts.solver.picard_tol;
    let c_ab = av.iter().zip(&bv).map(|(x, y)| x / (y + floor)).fold(0.0, f64::max);
    let c_ba = av.iter().zip(&bv).map(|(x, y)| y / (x + floor)).fold(0.0, f64::max);

    let mut report = VerifyReport::new("asymptotic-link", params);
    report.note = Some(ASYMPTOTIC_NOTE.to_string());
    report.push(Check::Trend {
        name: "a(t) = t^kappa |w - v|_p0".into(),
        values: a,
        non_increasing: a_down,
        pass: a_down == b_down,
    });
    report.push(Check::Trend {
        name: "b(t) = t^kappa |E1 (w0 - v0)|_p0".into(),
        values: b,
        non_increasing: b_down,
        pass: a_down == b_down,
    });
    report.push(Check::Scalar {
        name: "C with a <= C (b + tol)".into(),
        value: c_ab,
        limit: f64::INFINITY,
        pass: c_ab.is_finite(),
    });
    report.push(Check::Scalar {
        name: "C with b <= C (a + tol)".into(),
        value: c_ba,
        limit: f64::INFINITY,
        pass: c_ba.is_finite(),
    });
    Ok(report)
}
