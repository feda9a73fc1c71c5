use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub target: f64,
    /// |slope − target|/|target|, or the absolute error when the target is 0.
    pub rel_error: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub samples: Vec<(f64, f64)>,
}

pub const MIN_R_SQUARED: f64 = 0.98;

/// Least squares on (log t, log v).
pub fn fit_power_law(samples: &[(f64, f64)], target: f64, tolerance: f64) -> Result<FitResult> {
    if samples.len() < 4 {
        return Err(Error::DegenerateFit(format!("{} samples, need at least 4", samples.len())));
    }
    if let Some(&(t, v)) = samples.iter().find(|(t, v)| !(*t > 0.0) || !(*v > 0.0) || !v.is_finite()) {
        return Err(Error::DegenerateFit(format!("non-positive sample ({t}, {v})")));
    }
    let (lo, hi) = samples
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &(t, _)| (lo.min(t), hi.max(t)));
    if hi < 10.0 * lo * (1.0 - 1e-12) {
        return Err(Error::DegenerateFit(format!("samples span [{lo}, {hi}], less than a decade")));
    }
    let pts: Vec<(f64, f64)> = samples.iter().map(|&(t, v)| (t.ln(), v.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let r_squared = if ss_tot <= 1e-30 * n { 1.0 } else { 1.0 - ss_res / ss_tot };
    let rel_error = if target == 0.0 {
        slope.abs()
    } else {
        (slope - target).abs() / target.abs()
    };
    Ok(FitResult {
        slope,
        intercept,
        r_squared,
        target,
        rel_error,
        tolerance,
        pass: rel_error <= tolerance && r_squared >= MIN_R_SQUARED,
        samples: samples.to_vec(),
    })
}

/// n points spaced evenly in log t over [lo, hi].
pub fn log_times(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}
