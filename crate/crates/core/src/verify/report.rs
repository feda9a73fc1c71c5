use serde::{Deserialize, Serialize};

use super::fit::FitResult;
use crate::params::{DerivedConstants, FracParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Check {
    Fit {
        name: String,
        fit: FitResult,
    },
    /// Passes when value ≤ limit.
    Scalar {
        name: String,
        value: f64,
        limit: f64,
        pass: bool,
    },
    Trend {
        name: String,
        values: Vec<(f64, f64)>,
        non_increasing: bool,
        pass: bool,
    },
}

impl Check {
    pub fn scalar(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check::Scalar {
            name: name.into(),
            value,
            limit,
            pass: value <= limit,
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Check::Fit { name, .. } | Check::Scalar { name, .. } | Check::Trend { name, .. } => name,
        }
    }

    pub fn passed(&self) -> bool {
        match self {
            Check::Fit { fit, .. } => fit.pass,
            Check::Scalar { pass, .. } | Check::Trend { pass, .. } => *pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub scenario: String,
    pub params: FracParams,
    pub derived: DerivedConstants,
    pub checks: Vec<Check>,
    pub note: Option<String>,
    pub verdict: bool,
}

impl VerifyReport {
    pub fn new(scenario: impl Into<String>, params: &FracParams) -> Self {
        Self {
            scenario: scenario.into(),
            params: *params,
            derived: params.derived(),
            checks: Vec::new(),
            note: None,
            verdict: false,
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
        self.verdict = self.checks.iter().all(Check::passed);
    }
}

/// True when each value is at most the previous one, up to a relative slack.
pub fn non_increasing(values: &[f64], slack: f64) -> bool {
    values.windows(2).all(|w| w[1] <= w[0] * (1.0 + slack) + f64::MIN_POSITIVE)
}
