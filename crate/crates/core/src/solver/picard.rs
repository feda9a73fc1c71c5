use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    check_global_conditions, check_local_conditions, dealias_in_place, duhamel_hat, g_pointwise, linear_hat,
    mode_tables, ConvergenceNorm, ModeTables, RegimeReport, SolverConfig, Trajectory,
};
use crate::error::{Error, Result};
use crate::norms::lp_norm;
use crate::params::FracParams;
use crate::spectral::{Field, Grid, Space};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationDiagnostics {
    pub norm: ConvergenceNorm,
    /// Distance between successive iterates, one per iteration.
    pub distances: Vec<f64>,
    /// distances[k+1] / distances[k]
    pub ratios: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Distance between the result and one further application of the map.
    pub fixed_point_residual: f64,
    pub regime: Option<RegimeReport>,
    /// Set when the regime check failed and the run was forced.
    pub advisory: bool,
}

type Hats = Vec<Vec<Complex64>>;

struct Map<'a> {
    grid: &'a Grid,
    tables: &'a ModeTables,
    params: &'a FracParams,
    linear: Hats,
    dealias: bool,
    nonlinear: bool,
}

impl Map<'_> {
    fn g_hat(&self, w: &[Complex64]) -> Vec<Complex64> {
        let phys = to_physical(self.grid, w);
        let g = Field {
            grid: self.grid.clone(),
            values: phys.into_iter().map(|v| g_pointwise(v, self.params.p)).collect(),
            space: Space::Physical,
        };
        let mut f = g.to_frequency();
        if self.dealias {
            dealias_in_place(&mut f);
        }
        f.values
    }

    fn apply(&self, cur: &Hats) -> Hats {
        if !self.nonlinear {
            return self.linear.clone();
        }
        let g: Hats = cur.par_iter().map(|w| self.g_hat(w)).collect();
        (0..cur.len())
            .into_par_iter()
            .map(|n| {
                let d = duhamel_hat(self.tables, self.grid, self.params.alpha, &g, n);
                self.linear[n].iter().zip(d).map(|(l, d)| l + d).collect()
            })
            .collect()
    }
}

fn to_physical(grid: &Grid, values: &[Complex64]) -> Vec<Complex64> {
    Field {
        grid: grid.clone(),
        values: values.to_vec(),
        space: Space::Frequency,
    }
    .to_physical()
    .values
}

struct Distance<'a> {
    grid: &'a Grid,
    times: &'a [f64],
    norm: ConvergenceNorm,
    /// (weight exponent, Lebesgue exponent) for the weighted norms.
    weight: (f64, f64),
}

impl Distance<'_> {
    fn between(&self, a: &Hats, b: &Hats) -> f64 {
        let cell = self.grid.cell_volume();
        (0..a.len())
            .into_par_iter()
            .map(|n| {
                let diff: Vec<Complex64> = a[n].iter().zip(&b[n]).map(|(x, y)| x - y).collect();
                match self.norm {
                    ConvergenceNorm::SupL2 => (cell * diff.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt(),
                    _ if self.times[n] == 0.0 => 0.0,
                    _ => {
                        let f = Field {
                            grid: self.grid.clone(),
                            values: to_physical(self.grid, &diff),
                            space: Space::Physical,
                        };
                        self.times[n].powf(self.weight.0) * lp_norm(&f, self.weight.1)
                    }
                }
            })
            .reduce(|| 0.0, f64::max)
    }
}

/// Picard iteration w⁽ᵏ⁾ = linear + Duhamel(w⁽ᵏ⁻¹⁾), started from the
/// linear evolution.
pub fn picard_solve(w0: &Field, config: &SolverConfig, params: &FracParams) -> Result<(Trajectory, IterationDiagnostics)> {
    config.validate()?;
    params.validate()?;
    let (regime, weight) = match config.norm_for_convergence {
        ConvergenceNorm::SupL2 => (None, (0.0, 2.0)),
        ConvergenceNorm::XKappa => {
            let r = check_global_conditions(params)?;
            let p0 = params.p0()?;
            (Some(r), (params.kappa_at(p0), p0))
        }
        ConvergenceNorm::YNu => {
            let r = check_local_conditions(params)?;
            let p0 = params.p0()?;
            (Some(r), (params.nu_at(p0), p0))
        }
    };
    let failed = regime.as_ref().is_some_and(|r| !r.pass);
    if failed && !config.force {
        return Err(Error::Precondition(format!(
            "{} regime conditions fail; set force to run anyway",
            regime.as_ref().map(|r| r.regime.as_str()).unwrap_or("")
        )));
    }

    let times = config.times(params.alpha);
    let grid = w0.grid.clone();
    let tables = mode_tables(&grid, params, &times)?;
    let map = Map {
        grid: &grid,
        tables: &tables,
        params,
        linear: linear_hat(w0, &tables),
        dealias: config.dealias,
        nonlinear: config.nonlinear,
    };
    let dist = Distance {
        grid: &grid,
        times: &times,
        norm: config.norm_for_convergence,
        weight,
    };

    let mut cur = map.linear.clone();
    let mut distances = Vec::new();
    let mut ratios = Vec::new();
    let mut rising = 0;
    let mut converged = false;
    for it in 1..=config.picard_max_iters {
        let next = map.apply(&cur);
        let d = dist.between(&next, &cur);
        cur = next;
        if let Some(&prev) = distances.last() {
            let prev: f64 = prev;
            if prev > 0.0 {
                ratios.push(d / prev);
            }
            rising = if d > prev { rising + 1 } else { 0 };
        }
        distances.push(d);
        if !d.is_finite() || rising >= 3 {
            return Err(Error::NotContracting(it));
        }
        if d <= config.picard_tol {
            converged = true;
            break;
        }
    }
    let fixed_point_residual = dist.between(&map.apply(&cur), &cur);

    let mut fields: Vec<Field> = cur
        .into_iter()
        .map(|v| {
            Field {
                grid: grid.clone(),
                values: v,
                space: Space::Frequency,
            }
            .to_physical()
        })
        .collect();
    fields[0] = w0.to_physical();
    let traj = Trajectory {
        times,
        fields,
        params: *params,
        nonlinear: config.nonlinear,
        dealias: config.dealias,
    };
    let diag = IterationDiagnostics {
        norm: config.norm_for_convergence,
        iterations: distances.len(),
        distances,
        ratios,
        converged,
        fixed_point_residual,
        regime,
        advisory: failed,
    };
    Ok((traj, diag))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementStudy {
    pub n_steps: Vec<usize>,
    /// ‖w(T)‖₂ at each level.
    pub final_l2: Vec<f64>,
    /// ‖w_{2N}(T) − w_N(T)‖₂ between consecutive levels.
    pub changes: Vec<f64>,
    /// log₂ of successive change ratios.
    pub observed_orders: Vec<f64>,
}

/// Re-solves with n_steps doubled `levels − 1` times.
pub fn refinement_study(w0: &Field, config: &SolverConfig, params: &FracParams, levels: usize) -> Result<RefinementStudy> {
    let mut n_steps = Vec::new();
    let mut finals: Vec<Field> = Vec::new();
    for l in 0..levels.max(2) {
        let cfg = SolverConfig {
            n_steps: config.n_steps << l,
            ..config.clone()
        };
        let (traj, _) = picard_solve(w0, &cfg, params)?;
        n_steps.push(cfg.n_steps);
        finals.push(traj.fields.last().cloned().expect("non-empty trajectory"));
    }
    let final_l2 = finals.iter().map(Field::l2).collect();
    let changes: Vec<f64> = finals
        .windows(2)
        .map(|w| w[1].sub(&w[0]).map(|d| d.l2()))
        .collect::<Result<_>>()?;
    let observed_orders = changes.windows(2).map(|c| (c[0] / c[1]).log2()).collect();
    Ok(RefinementStudy {
        n_steps,
        final_l2,
        changes,
        observed_orders,
    })
}
