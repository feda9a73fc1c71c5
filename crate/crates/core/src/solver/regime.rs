//! Parameter conditions of the global and β < 2 existence regimes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{DerivedConstants, FracParams};
use crate::special::beta as beta_fn;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

impl Condition {
    fn less(name: &str, lhs: f64, rhs: f64) -> Self {
        Self {
            name: name.into(),
            lhs,
            rhs,
            pass: lhs < rhs,
        }
    }

    fn greater(name: &str, lhs: f64, rhs: f64) -> Self {
        Self {
            name: name.into(),
            lhs,
            rhs,
            pass: lhs > rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub regime: String,
    pub conditions: Vec<Condition>,
    /// Named scalar constants reported alongside the verdict.
    pub constants: Vec<(String, f64)>,
    pub derived: Option<DerivedConstants>,
    pub pass: bool,
}

impl RegimeReport {
    pub fn constant(&self, name: &str) -> Option<f64> {
        self.constants.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

/// The denominator d(δ−2) − 2(δ−β) of p₀ is positive exactly when
/// (δ−β)/d < δ/2 − 1, so a negative value is an ordinary failed condition.
/// Only a vanishing denominator is degenerate.
fn common(fp: &FracParams) -> Result<(Option<f64>, Vec<Condition>)> {
    let (d, delta) = (fp.dim as f64, fp.delta());
    let den = fp.p0_denominator();
    let exact_zero = fp
        .rational()
        .map(|(a, b)| {
            let d = num_rational::Ratio::from_integer(fp.dim as i64);
            let two = num_rational::Ratio::from_integer(2);
            let dl = b / a;
            d * (dl - two) - two * (dl - b) == num_rational::Ratio::from_integer(0)
        })
        .unwrap_or(den.abs() < 1e-12);
    if exact_zero {
        return Err(Error::DegenerateParams(format!(
            "d(delta-2) - 2(delta-beta) = 0 for alpha={}, beta={}, d={}",
            fp.alpha, fp.beta, fp.dim
        )));
    }
    let conds = vec![
        Condition::greater("beta > 2", fp.beta, 2.0),
        Condition::less("(delta - beta)/d < delta/2 - 1", (delta - fp.beta) / d, delta / 2.0 - 1.0),
    ];
    Ok((fp.p0().ok(), conds))
}

/// Small-data global conditions; κ and ν are taken at p₀.
pub fn check_global_conditions(fp: &FracParams) -> Result<RegimeReport> {
    let (p0, mut conds) = common(fp)?;
    let mut constants = vec![("delta".to_string(), fp.delta())];
    if let Some(p0) = p0 {
        let kappa = fp.kappa_at(p0);
        let nu = fp.nu_at(p0);
        conds.push(Condition::less("kappa (p0 - 1) < 1", kappa * (p0 - 1.0), 1.0));
        constants.extend([
            ("p0".to_string(), p0),
            ("kappa".to_string(), kappa),
            ("kappa_p0_minus_1".to_string(), kappa * (p0 - 1.0)),
            ("nu".to_string(), nu),
            ("B_kappa".to_string(), beta_fn(fp.alpha - nu, 1.0 - kappa * (p0 - 1.0))),
        ]);
    }
    let pass = conds.iter().all(|c| c.pass);
    Ok(RegimeReport {
        regime: "global".into(),
        conditions: conds,
        constants,
        derived: Some(fp.derived()),
        pass,
    })
}

pub fn check_local_conditions(fp: &FracParams) -> Result<RegimeReport> {
    let (p0, mut conds) = common(fp)?;
    let mut constants = vec![("delta".to_string(), fp.delta())];
    if let Some(p0) = p0 {
        let nu = fp.nu_at(p0);
        conds.push(Condition::less("nu (p0 - 1) < alpha", nu * (p0 - 1.0), fp.alpha));
        constants.extend([
            ("p0".to_string(), p0),
            ("nu".to_string(), nu),
            ("nu_p0_minus_1".to_string(), nu * (p0 - 1.0)),
        ]);
    }
    let pass = conds.iter().all(|c| c.pass);
    Ok(RegimeReport {
        regime: "local".into(),
        conditions: conds,
        constants,
        derived: Some(fp.derived()),
        pass,
    })
}

/// One-dimensional β < 2 regime with Sobolev index s and interpolation θ.
pub fn check_beta_lt2_conditions(fp: &FracParams, s: f64, theta: f64) -> Result<RegimeReport> {
    if fp.dim != 1 {
        return Err(Error::Precondition(format!("beta < 2 regime is one-dimensional, got d = {}", fp.dim)));
    }
    let delta = fp.delta();
    let p = fp.p;
    let varsigma = 0.5 - 1.0 / (2.0 * (p - 2.0));
    let gamma = (delta - 1.0) / 2.0;
    let nu = fp.beta - (delta + 1.0) / 2.0;
    let sigma = s + (3.0 * delta - 1.0) / 4.0 - fp.beta / 2.0;
    let lo = gamma / (varsigma + gamma);
    let hi = varsigma / (varsigma + gamma);
    let p_even = p >= 4.0 && p.fract() == 0.0 && (p as i64) % 2 == 0;
    let conds = vec![
        Condition::greater("delta > 1", delta, 1.0),
        Condition::less("delta < 3/2", delta, 1.5),
        Condition::greater("2 beta > delta + 1", 2.0 * fp.beta, delta + 1.0),
        Condition {
            name: "p even and >= 4".into(),
            lhs: p,
            rhs: 4.0,
            pass: p_even,
        },
        Condition {
            name: "s >= varsigma".into(),
            lhs: s,
            rhs: varsigma,
            pass: s >= varsigma,
        },
        Condition::greater("theta > gamma/(varsigma+gamma)", theta, lo),
        Condition::less("theta < varsigma/(varsigma+gamma)", theta, hi),
    ];
    let pass = conds.iter().all(|c| c.pass);
    Ok(RegimeReport {
        regime: "beta-lt-2".into(),
        conditions: conds,
        constants: vec![
            ("delta".into(), delta),
            ("varsigma".into(), varsigma),
            ("gamma".into(), gamma),
            ("nu".into(), nu),
            ("sigma".into(), sigma),
            ("theta_lo".into(), lo),
            ("theta_hi".into(), hi),
        ],
        derived: Some(fp.derived()),
        pass,
    })
}
