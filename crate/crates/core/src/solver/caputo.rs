//! Equation residual i^α ∂_t^α w − D^β w + g(w) with the L1 Caputo scheme.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{dealias_in_place, g_pointwise, Trajectory};
use crate::error::{Error, Result};
use crate::mlf::i_pow;
use crate::special::gamma;
use crate::spectral::{Field, Space};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaputoReport {
    pub max_relative: f64,
    pub times: Vec<f64>,
    pub relative: Vec<f64>,
}

/// Relative residual at grid times t_n ≥ `interior_fraction`·T. The L1
/// scheme is only first order near t = 0, where mild solutions carry a t^α
/// layer, so early times are left out.
pub fn caputo_residual(traj: &Trajectory, interior_fraction: f64) -> Result<CaputoReport> {
    if !(0.0..1.0).contains(&interior_fraction) || traj.len() < 3 {
        return Err(Error::InvalidParameter(
            "residual needs at least three times and an interior fraction in [0, 1)".into(),
        ));
    }
    let p = &traj.params;
    let grid = traj.grid();
    let cell = grid.cell_volume();
    let t = &traj.times;
    let t_end = *t.last().expect("non-empty");
    let hats: Vec<Vec<Complex64>> = traj.fields.par_iter().map(|f| f.to_frequency().values).collect();
    let sym: Vec<f64> = (0..grid.len()).map(|i| grid.xi_mag(i).powf(p.beta)).collect();
    let ia = i_pow(p.alpha);
    let scale = 1.0 / gamma(2.0 - p.alpha);
    let l2 = |v: &[Complex64]| (cell * v.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt();

    let picks: Vec<usize> = (1..t.len()).filter(|&n| t[n] >= interior_fraction * t_end).collect();
    let rel: Vec<f64> = picks
        .par_iter()
        .map(|&n| {
            let mut cap = vec![Complex64::new(0.0, 0.0); grid.len()];
            for k in 0..n {
                let w = scale * ((t[n] - t[k]).powf(1.0 - p.alpha) - (t[n] - t[k + 1]).powf(1.0 - p.alpha))
                    / (t[k + 1] - t[k]);
                for (c, (a, b)) in cap.iter_mut().zip(hats[k + 1].iter().zip(&hats[k])) {
                    *c += (a - b) * w;
                }
            }
            let cap: Vec<Complex64> = cap.into_iter().map(|c| ia * c).collect();
            let disp: Vec<Complex64> = hats[n].iter().zip(&sym).map(|(w, s)| w * s).collect();
            let g = if traj.nonlinear {
                let phys = &traj.fields[n];
                let mut f = Field {
                    grid: grid.clone(),
                    values: phys.to_physical().values.iter().map(|&v| g_pointwise(v, p.p)).collect(),
                    space: Space::Physical,
                }
                .to_frequency();
                if traj.dealias {
                    dealias_in_place(&mut f);
                }
                f.values
            } else {
                vec![Complex64::new(0.0, 0.0); grid.len()]
            };
            let res: Vec<Complex64> = (0..grid.len()).map(|i| cap[i] - disp[i] + g[i]).collect();
            let scale = l2(&cap).max(l2(&disp)).max(l2(&g));
            if scale == 0.0 {
                0.0
            } else {
                l2(&res) / scale
            }
        })
        .collect();
    Ok(CaputoReport {
        max_relative: rel.iter().copied().fold(0.0, f64::max),
        times: picks.iter().map(|&n| t[n]).collect(),
        relative: rel,
    })
}
