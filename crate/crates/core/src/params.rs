//! The exponent tuple (α, β, d, p) and the constants derived from it.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FracParams {
    pub alpha: f64,
    pub beta: f64,
    pub dim: usize,
    /// Power in g(w) = |w|^{p−2}w.
    pub p: f64,
}

impl FracParams {
    pub fn new(alpha: f64, beta: f64, dim: usize, p: f64) -> Result<Self> {
        let fp = Self { alpha, beta, dim, p };
        fp.validate()?;
        Ok(fp)
    }

    /// Parameters with p set to the critical exponent p₀.
    pub fn critical(alpha: f64, beta: f64, dim: usize) -> Result<Self> {
        let mut fp = Self::new(alpha, beta, dim, 3.0)?;
        fp.p = fp.p0()?;
        Ok(fp)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParameter(format!("alpha = {} not in (0,1)", self.alpha)));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("beta = {} must be positive", self.beta)));
        }
        if !(1..=3).contains(&self.dim) {
            return Err(Error::InvalidParameter(format!("dim = {} not in 1..=3", self.dim)));
        }
        if !(self.p >= 3.0) {
            return Err(Error::InvalidParameter(format!("p = {} must be at least 3", self.p)));
        }
        Ok(())
    }

    pub fn delta(&self) -> f64 {
        self.beta / self.alpha
    }

    fn d(&self) -> f64 {
        self.dim as f64
    }

    pub fn p0_denominator(&self) -> f64 {
        let (d, delta) = (self.d(), self.delta());
        d * (delta - 2.0) - 2.0 * (delta - self.beta)
    }

    /// p₀ = 2d(δ−2)/(d(δ−2) − 2(δ−β)).
    pub fn p0(&self) -> Result<f64> {
        let den = self.p0_denominator();
        if den <= 0.0 {
            return Err(Error::DegenerateParams(format!(
                "d(delta-2) - 2(delta-beta) = {den} <= 0, p0 undefined"
            )));
        }
        Ok(2.0 * self.d() * (self.delta() - 2.0) / den)
    }

    /// κ = (α/β)(β/(q−2) − d/q).
    pub fn kappa_at(&self, q: f64) -> f64 {
        self.alpha / self.beta * (self.beta / (q - 2.0) - self.d() / q)
    }

    /// ν = (αd/β)(1/q′ − 1/q).
    pub fn nu_at(&self, q: f64) -> f64 {
        self.alpha * self.d() / self.beta * (1.0 - 2.0 / q)
    }

    pub fn kappa(&self) -> f64 {
        self.kappa_at(self.p)
    }

    pub fn nu(&self) -> f64 {
        self.nu_at(self.p)
    }

    /// Exact (α, β) when both are short decimals or simple fractions.
    pub fn rational(&self) -> Option<(Ratio<i64>, Ratio<i64>)> {
        Some((exact_ratio(self.alpha)?, exact_ratio(self.beta)?))
    }

    pub fn derived(&self) -> DerivedConstants {
        DerivedConstants::from_params(self)
    }
}

/// The rational r with a small denominator such that r as f64 equals x.
pub fn exact_ratio(x: f64) -> Option<Ratio<i64>> {
    if !x.is_finite() {
        return None;
    }
    for den in 1..=10_000i64 {
        let num = (x * den as f64).round();
        if (num / den as f64) == x {
            return Some(Ratio::new(num as i64, den));
        }
    }
    None
}

/// A number printed exactly when it is rational, as a decimal otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exact {
    pub value: f64,
    pub exact: Option<String>,
}

impl Exact {
    fn from_ratio(r: Option<Ratio<i64>>, value: f64) -> Self {
        Self {
            value,
            exact: r.map(|r| {
                if *r.denom() == 1 {
                    r.numer().to_string()
                } else {
                    format!("{}/{}", r.numer(), r.denom())
                }
            }),
        }
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(s) => f.write_str(s),
            None => write!(f, "{:.6}", self.value),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    pub delta: Exact,
    pub p0: Option<Exact>,
    /// κ at p₀.
    pub kappa: Option<Exact>,
    /// ν at p₀.
    pub nu: Option<Exact>,
    /// κ and ν at the configured p.
    pub kappa_p: Exact,
    pub nu_p: Exact,
}

impl DerivedConstants {
    pub fn from_params(fp: &FracParams) -> Self {
        let rat = fp.rational();
        let d = Ratio::from_integer(fp.dim as i64);
        let two = Ratio::from_integer(2);
        let one = Ratio::from_integer(1);
        let delta_r = rat.map(|(a, b)| b / a);
        let p0_r = rat.and_then(|(_, b)| {
            let delta = delta_r?;
            let den = d * (delta - two) - two * (delta - b);
            (den > Ratio::from_integer(0)).then(|| two * d * (delta - two) / den)
        });
        let kappa_r = |q: Ratio<i64>| rat.map(|(a, b)| a / b * (b / (q - two) - d / q));
        let nu_r = |q: Ratio<i64>| rat.map(|(a, b)| a * d / b * (one - two / q));
        let p_r = exact_ratio(fp.p);
        let p0 = fp.p0().ok();
        Self {
            delta: Exact::from_ratio(delta_r, fp.delta()),
            p0: p0.map(|v| Exact::from_ratio(p0_r, v)),
            kappa: p0.map(|v| Exact::from_ratio(p0_r.and_then(kappa_r), fp.kappa_at(v))),
            nu: p0.map(|v| Exact::from_ratio(p0_r.and_then(nu_r), fp.nu_at(v))),
            kappa_p: Exact::from_ratio(p_r.and_then(kappa_r), fp.kappa()),
            nu_p: Exact::from_ratio(p_r.and_then(nu_r), fp.nu()),
        }
    }
}

/// Constants of the one-dimensional β < 2 theory at Sobolev index s:
/// γ = (δ−1)/2, ν = β − (δ+1)/2, ς = 1/2 − 1/(2(p−2)), σ = s + (3δ−1)/4 − β/2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothingConstants {
    pub gamma: Exact,
    pub nu_smooth: Exact,
    pub varsigma: Exact,
    pub sigma: Exact,
}

impl SmoothingConstants {
    pub fn from_params(fp: &FracParams, s: f64) -> Self {
        let delta = fp.delta();
        let one = Ratio::from_integer(1);
        let two = Ratio::from_integer(2);
        let rat = fp.rational().map(|(a, b)| (b / a, b));
        let p_r = exact_ratio(fp.p);
        let varsigma_r = p_r.filter(|p| *p != two).map(|p| one / two - one / (two * (p - two)));
        let sigma_r = rat.zip(exact_ratio(s)).map(|((d, b), s)| {
            s + (Ratio::from_integer(3) * d - one) / Ratio::from_integer(4) - b / two
        });
        Self {
            gamma: Exact::from_ratio(rat.map(|(d, _)| (d - one) / two), (delta - 1.0) / 2.0),
            nu_smooth: Exact::from_ratio(rat.map(|(d, b)| b - (d + one) / two), fp.beta - (delta + 1.0) / 2.0),
            varsigma: Exact::from_ratio(varsigma_r, 0.5 - 1.0 / (2.0 * (fp.p - 2.0))),
            sigma: Exact::from_ratio(sigma_r, s + (3.0 * delta - 1.0) / 4.0 - fp.beta / 2.0),
        }
    }
}
