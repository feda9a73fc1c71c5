use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Grid, GridSignature};
use crate::error::{Error, Result};
use crate::mlf::{mlf_operator_symbols, MlfParams, QuadratureRule, RayArgument};

/// A radial multiplier m(|ξ|).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum SymbolSpec {
    Identity,
    /// |ξ|^θ
    Power { theta: f64 },
    /// (1 + |ξ|²)^{s/2}
    Bracket { s: f64 },
    /// e^{−t|ξ|^δ}
    Heat { t: f64, delta: f64 },
    /// e^{−it|ξ|^δ}
    Schrodinger { t: f64, delta: f64 },
    /// E_{α,1}((−it)^α|ξ|^β)
    Mlf1 { t: f64, alpha: f64, beta: f64 },
    /// E_{α,α}((−it)^α|ξ|^β)
    Mlf2 { t: f64, alpha: f64, beta: f64 },
    Product(Vec<SymbolSpec>),
}

type PairKey = (u64, u64, u64, GridSignature);
type Pair = Arc<(Vec<Complex64>, Vec<Complex64>)>;

fn cache() -> &'static RwLock<HashMap<PairKey, Pair>> {
    static CACHE: OnceLock<RwLock<HashMap<PairKey, Pair>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

pub fn clear_symbol_cache() {
    cache().write().unwrap_or_else(|e| e.into_inner()).clear();
}

/// (E_{α,1}, E_{α,α}) on every unique radius of the grid, memoized per (t, α, β, grid).
pub fn mlf_symbol_pair(grid: &Grid, t: f64, alpha: f64, beta: f64) -> Result<Pair> {
    let key = (t.to_bits(), alpha.to_bits(), beta.to_bits(), grid.signature());
    if let Some(p) = cache().read().unwrap_or_else(|e| e.into_inner()).get(&key) {
        return Ok(p.clone());
    }
    let params = MlfParams::new(alpha, 1.0)?;
    let rule = QuadratureRule::default();
    let pairs: Result<Vec<(Complex64, Complex64)>> = grid
        .radial()
        .values
        .par_iter()
        .map(|&k| {
            let arg = RayArgument::new(t, k, beta, alpha)?;
            mlf_operator_symbols(&arg, &params, &rule)
        })
        .collect();
    let (e1, ea): (Vec<_>, Vec<_>) = pairs?.into_iter().unzip();
    let pair = Arc::new((e1, ea));
    cache()
        .write()
        .unwrap_or_else(|e| e.into_inner())
        .insert(key, pair.clone());
    Ok(pair)
}

impl SymbolSpec {
    /// Values on the grid's unique radii.
    pub fn radial_values(&self, grid: &Grid) -> Result<Vec<Complex64>> {
        let radii = &grid.radial().values;
        let out: Vec<Complex64> = match self {
            SymbolSpec::Mlf1 { t, alpha, beta } => mlf_symbol_pair(grid, *t, *alpha, *beta)?.0.clone(),
            SymbolSpec::Mlf2 { t, alpha, beta } => mlf_symbol_pair(grid, *t, *alpha, *beta)?.1.clone(),
            SymbolSpec::Product(parts) => {
                let mut acc = vec![Complex64::new(1.0, 0.0); radii.len()];
                for p in parts {
                    for (a, v) in acc.iter_mut().zip(p.radial_values(grid)?) {
                        *a *= v;
                    }
                }
                acc
            }
            other => radii.iter().map(|&k| other.eval_scalar(k)).collect(),
        };
        if let Some(i) = out.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::SymbolNonFinite(radii[i]));
        }
        Ok(out)
    }

    /// Pointwise value for the closed-form symbols.
    pub fn eval_scalar(&self, k: f64) -> Complex64 {
        let re = |x: f64| Complex64::new(x, 0.0);
        match self {
            SymbolSpec::Identity => re(1.0),
            SymbolSpec::Power { theta } => {
                if *theta == 0.0 {
                    re(1.0)
                } else if k == 0.0 && *theta > 0.0 {
                    re(0.0)
                } else {
                    re(k.powf(*theta))
                }
            }
            SymbolSpec::Bracket { s } => re((1.0 + k * k).powf(0.5 * s)),
            SymbolSpec::Heat { t, delta } => re((-t * k.powf(*delta)).exp()),
            SymbolSpec::Schrodinger { t, delta } => Complex64::from_polar(1.0, -t * k.powf(*delta)),
            SymbolSpec::Mlf1 { t, alpha, beta } | SymbolSpec::Mlf2 { t, alpha, beta } => {
                let arg = RayArgument::new(*t, k, *beta, *alpha).expect("valid ray");
                let p = MlfParams::new(*alpha, 1.0).expect("valid alpha");
                let (e1, ea) = mlf_operator_symbols(&arg, &p, &QuadratureRule::default())
                    .unwrap_or((re(f64::NAN), re(f64::NAN)));
                if matches!(self, SymbolSpec::Mlf1 { .. }) {
                    e1
                } else {
                    ea
                }
            }
            SymbolSpec::Product(parts) => parts.iter().map(|p| p.eval_scalar(k)).product(),
        }
    }
}
