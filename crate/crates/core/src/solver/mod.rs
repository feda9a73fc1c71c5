//! Discrete mild solutions by Picard iteration on the Duhamel form.
//!
//! In Fourier variables, with a = (−i)^α|ξ|^β,
//! ŵ(t) = E_{α,1}(a t^α) ŵ₀ − i^{−α} ∫₀^t (t−s)^{α−1} E_{α,α}(a(t−s)^α) ĝ(s) ds,
//! which is the mild form of i^α ∂_t^α w − (−Δ)^{β/2} w + |w|^{p−2}w = 0.

mod caputo;
mod memory;
mod picard;
mod regime;

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mlf::{minus_i_pow, mlf_eval};
use crate::params::FracParams;
use crate::spectral::{Field, Grid, GridSignature, Space};

pub use caputo::{caputo_residual, CaputoReport};
pub use memory::{DuhamelWeights, MemoryKernelTable};
pub use picard::{picard_solve, refinement_study, IterationDiagnostics, RefinementStudy};
pub use regime::{check_beta_lt2_conditions, check_global_conditions, check_local_conditions, Condition, RegimeReport};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum TimeGrid {
    Uniform,
    /// t_n = T(n/N)^r; r defaults to 2/α.
    Graded { r: Option<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvergenceNorm {
    XKappa,
    YNu,
    SupL2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub t_final: f64,
    pub n_steps: usize,
    pub time_grid: TimeGrid,
    pub picard_tol: f64,
    pub picard_max_iters: usize,
    pub dealias: bool,
    pub norm_for_convergence: ConvergenceNorm,
    /// Run even when the regime conditions for the chosen norm fail.
    pub force: bool,
    /// Switch g off to recover the linear evolution.
    pub nonlinear: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            t_final: 1.0,
            n_steps: 64,
            time_grid: TimeGrid::Uniform,
            picard_tol: 1e-10,
            picard_max_iters: 60,
            dealias: true,
            norm_for_convergence: ConvergenceNorm::SupL2,
            force: false,
            nonlinear: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_final > 0.0) || self.n_steps < 8 || !(self.picard_tol > 0.0) || self.picard_max_iters == 0 {
            return Err(Error::InvalidParameter(
                "solver needs T > 0, n_steps >= 8, picard_tol > 0 and picard_max_iters >= 1".into(),
            ));
        }
        if let TimeGrid::Graded { r: Some(r) } = self.time_grid {
            if !(r >= 1.0) {
                return Err(Error::InvalidParameter(format!("grading exponent {r} must be >= 1")));
            }
        }
        Ok(())
    }

    pub fn times(&self, alpha: f64) -> Vec<f64> {
        let n = self.n_steps;
        let t = self.t_final;
        match self.time_grid {
            TimeGrid::Uniform => (0..=n).map(|i| t * i as f64 / n as f64).collect(),
            TimeGrid::Graded { r } => {
                let r = r.unwrap_or(2.0 / alpha);
                (0..=n).map(|i| t * (i as f64 / n as f64).powf(r)).collect()
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// Physical-space snapshots.
    pub fields: Vec<Field>,
    pub params: FracParams,
    pub nonlinear: bool,
    pub dealias: bool,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, fields: Vec<Field>, params: FracParams) -> Result<Self> {
        if times.len() != fields.len() || times.is_empty() {
            return Err(Error::InvalidParameter("times and fields must have equal, non-zero length".into()));
        }
        Ok(Self {
            times,
            fields,
            params,
            nonlinear: true,
            dealias: false,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.fields[0].grid
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Two-thirds truncation: zero every mode with some axis index above n/3.
pub fn dealias_in_place(f: &mut Field) {
    debug_assert_eq!(f.space, Space::Frequency);
    let g = f.grid.clone();
    let n = g.n();
    let cut = n / 3;
    for (i, v) in f.values.iter_mut().enumerate() {
        let mi = g.multi_index(i);
        if mi[..g.dim()].iter().any(|&j| j.min(n - j) > cut) {
            *v = Complex64::new(0.0, 0.0);
        }
    }
}

fn g_pointwise(v: Complex64, p: f64) -> Complex64 {
    let r = v.norm();
    if r == 0.0 {
        v
    } else {
        v * r.powf(p - 2.0)
    }
}

/// |w|^{p−2}w, with optional two-thirds dealiasing afterwards.
pub fn nonlinearity(f: &Field, p: f64, dealias: bool) -> Result<Field> {
    if !(p >= 3.0) {
        return Err(Error::InvalidParameter(format!("p = {p} must be at least 3")));
    }
    let phys = f.to_physical();
    let out = Field {
        grid: phys.grid.clone(),
        values: phys.values.iter().map(|&v| g_pointwise(v, p)).collect(),
        space: Space::Physical,
    };
    if dealias {
        let mut fr = out.to_frequency();
        dealias_in_place(&mut fr);
        Ok(fr.to_physical())
    } else {
        Ok(out)
    }
}

/// Per-grid tables for a fixed time grid: E_{α,1}(a t_n^α) on each radius
/// and the Duhamel product-integration weights.
pub struct ModeTables {
    pub times: Vec<f64>,
    /// e1[n][r]
    pub e1: Vec<Vec<Complex64>>,
    pub weights: DuhamelWeights,
}

type TableKey = (u64, u64, GridSignature, Vec<u64>);

fn table_cache() -> &'static RwLock<HashMap<TableKey, Arc<ModeTables>>> {
    static CACHE: OnceLock<RwLock<HashMap<TableKey, Arc<ModeTables>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

pub fn clear_table_cache() {
    table_cache().write().unwrap_or_else(|e| e.into_inner()).clear();
}

pub fn mode_tables(grid: &Grid, params: &FracParams, times: &[f64]) -> Result<Arc<ModeTables>> {
    let key = (
        params.alpha.to_bits(),
        params.beta.to_bits(),
        grid.signature(),
        times.iter().map(|t| t.to_bits()).collect::<Vec<_>>(),
    );
    if let Some(t) = table_cache().read().unwrap_or_else(|e| e.into_inner()).get(&key) {
        return Ok(t.clone());
    }
    let (alpha, beta) = (params.alpha, params.beta);
    let radii = &grid.radial().values;
    let rot = minus_i_pow(alpha);
    let e1: Result<Vec<Vec<Complex64>>> = times
        .par_iter()
        .map(|&t| {
            radii
                .iter()
                .map(|&k| mlf_eval(alpha, 1.0, rot * (t.powf(alpha) * k.powf(beta))))
                .collect()
        })
        .collect();
    let tables = Arc::new(ModeTables {
        times: times.to_vec(),
        e1: e1?,
        weights: DuhamelWeights::new(alpha, beta, radii, times)?,
    });
    let mut cache = table_cache().write().unwrap_or_else(|e| e.into_inner());
    if cache.len() > 16 {
        cache.clear();
    }
    cache.insert(key, tables.clone());
    Ok(tables)
}

/// E_{α,1}((−it_n)^α D^β) w₀ at every time, in frequency space.
fn linear_hat(w0: &Field, tables: &ModeTables) -> Vec<Vec<Complex64>> {
    let w0h = w0.to_frequency();
    let idx = &w0.grid.radial().index;
    tables
        .e1
        .iter()
        .map(|e| w0h.values.iter().zip(idx).map(|(v, &r)| v * e[r as usize]).collect())
        .collect()
}

/// The linear mild solution on the given times.
pub fn linear_evolve(w0: &Field, times: &[f64], params: &FracParams) -> Result<Trajectory> {
    memory::check_times(times)?;
    let tables = mode_tables(&w0.grid, params, times)?;
    let hats = linear_hat(w0, &tables);
    let mut fields: Vec<Field> = hats
        .into_iter()
        .map(|v| {
            Field {
                grid: w0.grid.clone(),
                values: v,
                space: Space::Frequency,
            }
            .to_physical()
        })
        .collect();
    fields[0] = w0.to_physical();
    Ok(Trajectory {
        times: times.to_vec(),
        fields,
        params: *params,
        nonlinear: false,
        dealias: false,
    })
}

/// −i^{−α} Σ_j w_{n,j}(ξ) ĝ_j(ξ): the Duhamel term at t_n in frequency space.
pub(crate) fn duhamel_hat(tables: &ModeTables, grid: &Grid, alpha: f64, g_hat: &[Vec<Complex64>], n: usize) -> Vec<Complex64> {
    let coef = -minus_i_pow(alpha);
    let idx = &grid.radial().index;
    let mut acc = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (j, gj) in g_hat.iter().enumerate().take(n + 1) {
        for (slot, a) in acc.iter_mut().enumerate() {
            *a += tables.weights.weight(idx[slot] as usize, n, j) * gj[slot];
        }
    }
    acc.iter_mut().for_each(|a| *a *= coef);
    acc
}

/// The Duhamel term at `times[n_out]` for the nonlinearity of a trajectory.
pub fn duhamel_integral(traj: &Trajectory, n_out: usize, tables: &ModeTables) -> Result<Field> {
    if n_out >= traj.len() || tables.times.len() < traj.len() || tables.times[..traj.len()] != traj.times[..] {
        return Err(Error::Precondition("output time must lie on the trajectory's time grid".into()));
    }
    let grid = traj.grid().clone();
    let g_hat: Vec<Vec<Complex64>> = traj.fields[..=n_out]
        .iter()
        .map(|f| {
            if traj.nonlinear {
                nonlinearity(f, traj.params.p, traj.dealias).map(|g| g.to_frequency().values)
            } else {
                Ok(vec![Complex64::new(0.0, 0.0); grid.len()])
            }
        })
        .collect::<Result<_>>()?;
    let values = duhamel_hat(tables, &grid, traj.params.alpha, &g_hat, n_out);
    Ok(Field {
        grid,
        values,
        space: Space::Frequency,
    }
    .to_physical())
}
