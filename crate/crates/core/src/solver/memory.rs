//! Product-integration weights for ∫₀^{t_n} K(t_n − s) φ(s) ds with φ
//! interpolated piecewise linearly between grid times.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mlf::{minus_i_pow, mlf_eval};
use crate::special::gamma;

/// Node weights given the kernel primitives P0(u) = ∫₀^u K and
/// P1(u) = ∫₀^u (u−v)K(v) dv, evaluated through `prim(i, j) = (P0, P1)` at
/// u = t_i − t_j.
fn node_weights<T, F>(times: &[f64], n: usize, prim: F) -> Vec<T>
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T> + Default,
    F: Fn(usize) -> (T, T),
{
    // prim(j) returns the primitives at u = t_n − t_j.
    let mut w = vec![T::default(); n + 1];
    let p: Vec<(T, T)> = (0..=n).map(&prim).collect();
    for k in 0..n {
        // panel [t_k, t_{k+1}]: u_a = t_n − t_{k+1}, u_b = t_n − t_k
        let inv = 1.0 / (times[k + 1] - times[k]);
        let (p0a, p1a) = p[k + 1];
        let (p0b, p1b) = p[k];
        let d1 = (p1b - p1a) * inv;
        w[k] = w[k] + p0b - d1;
        w[k + 1] = w[k + 1] + d1 - p0a;
    }
    w
}

/// Linz weights for the bare kernel (t−s)^{α−1}; g_α(t) = t^{α−1}/Γ(α) is
/// this kernel divided by Γ(α).
#[derive(Debug, Clone)]
pub struct MemoryKernelTable {
    pub alpha: f64,
    pub times: Vec<f64>,
    /// weights[n][j], j = 0..=n
    pub weights: Vec<Vec<f64>>,
}

impl MemoryKernelTable {
    pub fn new(alpha: f64, times: &[f64]) -> Result<Self> {
        check_times(times)?;
        let weights = (0..times.len())
            .map(|n| {
                node_weights(times, n, |j| {
                    let u = times[n] - times[j];
                    (u.powf(alpha) / alpha, u.powf(alpha + 1.0) / (alpha * (alpha + 1.0)))
                })
            })
            .collect();
        Ok(Self {
            alpha,
            times: times.to_vec(),
            weights,
        })
    }

    pub fn apply(&self, n: usize, values: &[f64]) -> f64 {
        self.weights[n].iter().zip(values).map(|(w, v)| w * v).sum()
    }

    /// Riemann–Liouville integral I^α φ(t_n).
    pub fn riemann_liouville(&self, n: usize, values: &[f64]) -> f64 {
        self.apply(n, values) / gamma(self.alpha)
    }
}

pub(crate) fn check_times(times: &[f64]) -> Result<()> {
    if times.first() != Some(&0.0) || times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("time grid must start at 0 and increase strictly".into()));
    }
    Ok(())
}

fn is_uniform(times: &[f64]) -> bool {
    let dt = times[1] - times[0];
    times
        .windows(2)
        .all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-12 * dt.max(times[times.len() - 1] * 1e-3))
}

/// Per-mode weights for the kernel u^{α−1}E_{α,α}(a u^α), a = (−i)^α|ξ|^β,
/// on each unique radius of a grid.
pub struct DuhamelWeights {
    pub times: Vec<f64>,
    layout: Layout,
}

enum Layout {
    /// Toeplitz: weight of node j at output n is a[n−j]·[j≥1] + b[n−j]·[j<n].
    Uniform { a: Vec<Vec<Complex64>>, b: Vec<Vec<Complex64>> },
    /// full[r][n] holds the n+1 node weights.
    General { full: Vec<Vec<Vec<Complex64>>> },
}

fn primitives(alpha: f64, coef: Complex64, u: f64) -> Result<(Complex64, Complex64)> {
    if u == 0.0 {
        return Ok((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)));
    }
    let z = coef * u.powf(alpha);
    let p0 = mlf_eval(alpha, alpha + 1.0, z)? * u.powf(alpha);
    let p1 = mlf_eval(alpha, alpha + 2.0, z)? * u.powf(alpha + 1.0);
    Ok((p0, p1))
}

impl DuhamelWeights {
    pub fn new(alpha: f64, beta: f64, radii: &[f64], times: &[f64]) -> Result<Self> {
        check_times(times)?;
        let nt = times.len();
        let rot = minus_i_pow(alpha);
        let layout = if is_uniform(times) {
            let dt = times[1] - times[0];
            let per: Result<Vec<(Vec<Complex64>, Vec<Complex64>)>> = radii
                .par_iter()
                .map(|&k| {
                    let coef = rot * k.powf(beta);
                    let p: Vec<(Complex64, Complex64)> =
                        (0..nt).map(|m| primitives(alpha, coef, m as f64 * dt)).collect::<Result<_>>()?;
                    let a = (0..nt - 1).map(|l| (p[l + 1].1 - p[l].1) / dt - p[l].0).collect();
                    let mut b = vec![Complex64::new(0.0, 0.0); nt];
                    for l in 1..nt {
                        b[l] = p[l].0 - (p[l].1 - p[l - 1].1) / dt;
                    }
                    Ok((a, b))
                })
                .collect();
            let (a, b) = per?.into_iter().unzip();
            Layout::Uniform { a, b }
        } else {
            let full: Result<Vec<Vec<Vec<Complex64>>>> = radii
                .par_iter()
                .map(|&k| {
                    let coef = rot * k.powf(beta);
                    (0..nt)
                        .map(|n| {
                            let p: Vec<(Complex64, Complex64)> = (0..=n)
                                .map(|j| primitives(alpha, coef, times[n] - times[j]))
                                .collect::<Result<_>>()?;
                            Ok(node_weights(times, n, |j| p[j]))
                        })
                        .collect()
                })
                .collect();
            Layout::General { full: full? }
        };
        Ok(Self {
            times: times.to_vec(),
            layout,
        })
    }

    /// Weight of node j in the integral up to t_n, for radius r.
    pub fn weight(&self, r: usize, n: usize, j: usize) -> Complex64 {
        match &self.layout {
            Layout::Uniform { a, b } => {
                let l = n - j;
                let mut w = Complex64::new(0.0, 0.0);
                if j >= 1 {
                    w += a[r][l];
                }
                if j < n {
                    w += b[r][l];
                }
                w
            }
            Layout::General { full } => full[r][n][j],
        }
    }

    /// Σ_j w_{n,j}(ξ) ĝ_j(ξ) for one frequency slot with radius index r.
    pub fn convolve(&self, r: usize, n: usize, g: &[Vec<Complex64>], slot: usize) -> Complex64 {
        match &self.layout {
            Layout::Uniform { a, b } => {
                let (a, b) = (&a[r], &b[r]);
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..=n {
                    let l = n - j;
                    let gj = g[j][slot];
                    if j >= 1 {
                        acc += a[l] * gj;
                    }
                    if j < n {
                        acc += b[l] * gj;
                    }
                }
                acc
            }
            Layout::General { full } => full[r][n].iter().zip(g).map(|(w, gj)| w * gj[slot]).sum(),
        }
    }
}
