//! Composite Gauss–Legendre rules on geometric panels.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nodes and weights on [-1, 1], computed once per node count.
pub fn gauss_legendre(nodes: usize) -> &'static [(f64, f64)] {
    static TABLE: OnceLock<Mutex<HashMap<usize, &'static [(f64, f64)]>>> = OnceLock::new();
    let table = TABLE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = table.lock().unwrap_or_else(|e| e.into_inner());
    *guard.entry(nodes).or_insert_with(|| {
        let rule = GaussLegendre::new(nodes.max(2)).expect("node count is at least 2");
        Box::leak(rule.into_node_weight_pairs().into_boxed_slice())
    })
}

/// Caller-facing knobs for the real-line integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub nodes_per_panel: usize,
    /// Ratio between consecutive geometric panel edges.
    pub panel_ratio: f64,
    /// Absolute tolerance for the certified tail bound.
    pub tolerance: f64,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        Self {
            nodes_per_panel: 16,
            panel_ratio: 2.0,
            tolerance: 1e-14,
        }
    }
}

impl QuadratureRule {
    pub fn refined(&self) -> Self {
        Self {
            nodes_per_panel: self.nodes_per_panel * 2,
            panel_ratio: self.panel_ratio.sqrt(),
            tolerance: self.tolerance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Substitution {
    /// u = r^α
    PowerLaw,
    None,
}

/// A concrete discretization of one semi-infinite integral.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub substitution: Substitution,
    pub panel_edges: Vec<f64>,
    pub nodes_per_panel: usize,
    pub tail_cutoff: f64,
    pub tail_bound: f64,
}

impl QuadratureSpec {
    /// Panels `[0, lo], [lo, lo·ratio], ...` ending exactly at `cutoff`.
    pub fn geometric(
        lo: f64,
        cutoff: f64,
        rule: &QuadratureRule,
        substitution: Substitution,
        tail_bound: f64,
    ) -> Result<Self> {
        if !(lo > 0.0 && cutoff > lo && rule.panel_ratio > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "geometric panels need 0 < lo < cutoff and ratio > 1 (lo={lo}, cutoff={cutoff})"
            )));
        }
        if tail_bound > rule.tolerance {
            return Err(Error::Quadrature {
                tail_bound,
                tolerance: rule.tolerance,
            });
        }
        let mut edges = vec![0.0, lo];
        let mut e = lo;
        loop {
            e *= rule.panel_ratio;
            if e >= cutoff * (1.0 - 1e-12) {
                break;
            }
            edges.push(e);
        }
        edges.push(cutoff);
        Ok(Self {
            substitution,
            panel_edges: edges,
            nodes_per_panel: rule.nodes_per_panel,
            tail_cutoff: cutoff,
            tail_bound,
        })
    }

    pub fn panels(&self) -> usize {
        self.panel_edges.len() - 1
    }

    pub fn integrate<F>(&self, mut f: F) -> Complex64
    where
        F: FnMut(f64) -> Complex64,
    {
        let gl = gauss_legendre(self.nodes_per_panel);
        let mut acc = Complex64::new(0.0, 0.0);
        for w in self.panel_edges.windows(2) {
            let (a, b) = (w[0], w[1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            let mut panel = Complex64::new(0.0, 0.0);
            for &(x, wt) in gl {
                panel += f(mid + half * x) * wt;
            }
            acc += panel * half;
        }
        acc
    }
}
