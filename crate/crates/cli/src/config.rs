//! Scenario configuration: the JSON schema, kind-specific defaults and the
//! mapping from command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use fracdisp_core::solver::{ConvergenceNorm, SolverConfig, TimeGrid};
use fracdisp_core::verify::{log_times, AsymptoticOptions, LocalRunOptions, PicardOptions, SelfSimilarityOptions};
use fracdisp_core::FracParams;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::CliError;

pub const MANIFEST_FORMAT: &str = "fracdisp-manifest/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    MlfEval,
    Kernel,
    Propagate,
    Solve,
    Norms,
    VerifyDispersive,
    VerifyDerivativeLoss,
    VerifyMlfDecay,
    VerifyKernel,
    VerifySmoothing,
    VerifySmoothingBound,
    VerifyPicard,
    VerifySelfSimilarity,
    VerifyBetaLt2,
    VerifyAsymptotic,
}

impl Kind {
    pub const ALL: [Kind; 15] = [
        Kind::MlfEval,
        Kind::Kernel,
        Kind::Propagate,
        Kind::Solve,
        Kind::Norms,
        Kind::VerifyDispersive,
        Kind::VerifyDerivativeLoss,
        Kind::VerifyMlfDecay,
        Kind::VerifyKernel,
        Kind::VerifySmoothing,
        Kind::VerifySmoothingBound,
        Kind::VerifyPicard,
        Kind::VerifySelfSimilarity,
        Kind::VerifyBetaLt2,
        Kind::VerifyAsymptotic,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Kind::MlfEval => "mlf-eval",
            Kind::Kernel => "kernel",
            Kind::Propagate => "propagate",
            Kind::Solve => "solve",
            Kind::Norms => "norms",
            Kind::VerifyDispersive => "verify-dispersive",
            Kind::VerifyDerivativeLoss => "verify-derivative-loss",
            Kind::VerifyMlfDecay => "verify-mlf-decay",
            Kind::VerifyKernel => "verify-kernel",
            Kind::VerifySmoothing => "verify-smoothing",
            Kind::VerifySmoothingBound => "verify-smoothing-bound",
            Kind::VerifyPicard => "verify-picard",
            Kind::VerifySelfSimilarity => "verify-self-similarity",
            Kind::VerifyBetaLt2 => "verify-beta-lt2",
            Kind::VerifyAsymptotic => "verify-asymptotic",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// A Lebesgue exponent in [1, ∞]; written as the string "inf" in JSON.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent(pub f64);

impl FromStr for Exponent {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let v = match s.trim() {
            "inf" | "infinity" | "∞" => f64::INFINITY,
            t => t.parse::<f64>().map_err(|e| format!("bad exponent {t:?}: {e}"))?,
        };
        if v >= 1.0 {
            Ok(Exponent(v))
        } else {
            Err(format!("exponent {v} must be at least 1"))
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Exponent::from_str(&v.to_string()),
            Repr::Text(t) => Exponent::from_str(&t),
        }
        .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamSpec {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub dim: Option<usize>,
    /// Nonlinearity power; the critical p₀ when absent.
    pub p: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
    pub half_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", deny_unknown_fields)]
pub enum Datum {
    /// amplitude·exp(−|x − center|²/(2 width²))·e^{i wavenumber x₁}
    Gaussian {
        center: f64,
        width: f64,
        amplitude: f64,
        wavenumber: f64,
    },
    /// c(|x| + eps)^{−degree}
    Homogeneous { degree: f64, eps: f64, c: f64 },
    PlaneWave { wavenumber: f64, amplitude: f64 },
    /// A snapshot written by `propagate --snapshots`.
    File { path: PathBuf },
}

impl Datum {
    fn gaussian(amplitude: f64, width: f64) -> Self {
        Datum::Gaussian {
            center: 0.0,
            width,
            amplitude,
            wavenumber: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Operator {
    /// e^{−itD^δ}
    Schrodinger,
    /// D^θ e^{−tD^δ}
    Heat,
    /// E_{α,1}((−it)^α D^β)
    Mlf1,
    /// E_{α,α}((−it)^α D^β)
    Mlf2,
}

impl FromStr for Operator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        serde_json::from_value(serde_json::Value::String(s.into())).map_err(|_| {
            format!("unknown operator {s:?}; expected schrodinger, heat, mlf1 or mlf2")
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Options {
    /// Lebesgue exponent of the estimate or norm.
    pub lebesgue: Option<Exponent>,
    /// Sample times for fits, scans and propagation.
    pub times: Option<Vec<f64>>,
    /// Relative tolerance of the scenario's main check.
    pub tolerance: Option<f64>,
    pub s: Option<f64>,
    pub theta: Option<f64>,
    pub lambda: Option<f64>,
    pub varpi: Option<f64>,
    pub eta: Option<f64>,
    pub operator: Option<Operator>,
    /// Second Mittag-Leffler index b in E_{α,b}.
    pub b: Option<f64>,
    /// Complex argument [re, im] for `mlf`.
    pub z: Option<[f64; 2]>,
    pub trials: Option<usize>,
    pub max_halvings: Option<usize>,
    /// Added to the datum to form the second solution in `verify asymptotic`.
    pub perturbation: Option<Datum>,
    pub snapshots: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub kind: Kind,
    #[serde(default)]
    pub params: ParamSpec,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub solver: Option<SolverConfig>,
    #[serde(default)]
    pub datum: Option<Datum>,
    #[serde(default)]
    pub options: Options,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_output() -> PathBuf {
    PathBuf::from("fracdisp-out")
}

fn default_seed() -> u64 {
    2024
}

impl ScenarioConfig {
    pub fn new(kind: Kind) -> Self {
        Self {
            kind,
            params: ParamSpec::default(),
            grid: None,
            solver: None,
            datum: None,
            options: Options::default(),
            output: default_output(),
            seed: default_seed(),
        }
    }

    /// Reads a config, or the config echoed inside a manifest.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if value.get("format").and_then(|f| f.as_str()) == Some(MANIFEST_FORMAT) {
            value = value
                .get_mut("config")
                .map(serde_json::Value::take)
                .ok_or_else(|| CliError::Config(format!("{}: manifest without a config", path.display())))?;
        }
        serde_json::from_value(value).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Fills every absent field with the default for this kind and checks
    /// the result. Idempotent, so a resolved config resolves to itself.
    pub fn resolve(mut self) -> Result<Self, CliError> {
        let kind = self.kind;
        let (alpha, beta, p) = match kind {
            Kind::VerifyDispersive | Kind::VerifySmoothing | Kind::VerifySmoothingBound => (0.5, 1.5, None),
            Kind::VerifyBetaLt2 => (0.9, 1.25, Some(4.0)),
            _ => (0.9, 2.5, None),
        };
        let ps = &mut self.params;
        let alpha = *ps.alpha.get_or_insert(alpha);
        let beta = *ps.beta.get_or_insert(beta);
        let dim = *ps.dim.get_or_insert(1);
        if ps.p.is_none() {
            ps.p = Some(p.unwrap_or_else(|| critical_power(alpha, beta, dim)));
        }
        let fp = self.frac_params()?;

        let grid = *self.grid.get_or_insert(match kind {
            Kind::VerifyAsymptotic => GridSpec {
                n: 16384,
                half_width: 2048.0,
            },
            Kind::VerifySmoothing => GridSpec {
                n: 4096,
                half_width: 600.0,
            },
            Kind::VerifySelfSimilarity => {
                let o = SelfSimilarityOptions::default();
                GridSpec {
                    n: o.n,
                    half_width: o.half_width,
                }
            }
            _ => GridSpec {
                n: [256, 64, 32][dim.clamp(1, 3) - 1],
                half_width: 40.0,
            },
        });
        if grid.n < 2 || !grid.n.is_power_of_two() || !(grid.half_width > 0.0) {
            return Err(CliError::Config(format!(
                "grid needs a power-of-two n >= 2 and half_width > 0, got {grid:?}"
            )));
        }

        let solver = self.solver.get_or_insert_with(|| match kind {
            Kind::VerifyPicard => PicardOptions::default().solver,
            Kind::VerifyBetaLt2 => LocalRunOptions::default().solver,
            Kind::VerifyAsymptotic => AsymptoticOptions::default().solver,
            Kind::VerifySelfSimilarity => SelfSimilarityOptions::default().solver,
            _ => SolverConfig::default(),
        });
        solver.validate().map_err(|e| CliError::Config(e.to_string()))?;

        let datum = self.datum.get_or_insert_with(|| match kind {
            Kind::Solve => Datum::gaussian(0.1, 1.0),
            Kind::VerifyPicard => Datum::gaussian(2.0, 1.0),
            Kind::VerifyBetaLt2 => Datum::gaussian(0.5, 1.0),
            Kind::VerifyAsymptotic => Datum::gaussian(0.05, 0.5),
            Kind::VerifySmoothing => Datum::Gaussian {
                center: 0.0,
                width: 2.5,
                amplitude: 1.0,
                wavenumber: 3.0,
            },
            Kind::VerifySelfSimilarity => {
                let o = SelfSimilarityOptions::default();
                let degree = fp.p0().map(|p0| beta / (p0 - 2.0)).unwrap_or(0.5);
                Datum::Homogeneous {
                    degree,
                    eps: 8e-3,
                    c: o.amplitude,
                }
            }
            _ => Datum::gaussian(1.0, 1.0),
        });
        match datum {
            Datum::Gaussian { width, .. } if !(*width > 0.0) => {
                return Err(CliError::Config("gaussian width must be positive".into()))
            }
            Datum::Homogeneous { eps, .. } if !(*eps > 0.0) => {
                return Err(CliError::Config("homogeneous eps must be positive".into()))
            }
            _ => {}
        }

        let o = &mut self.options;
        o.lebesgue.get_or_insert(match kind {
            Kind::VerifyDispersive => Exponent(f64::INFINITY),
            Kind::Norms | Kind::Propagate | Kind::Solve => Exponent(fp.p),
            _ => Exponent(2.0),
        });
        o.times.get_or_insert_with(|| match kind {
            Kind::MlfEval | Kind::Kernel | Kind::Propagate => vec![0.5, 1.0, 2.0],
            _ => log_times(1.0, 64.0, 7),
        });
        if o.times.as_ref().is_some_and(|t| t.iter().any(|t| !(*t >= 0.0 && t.is_finite()))) {
            return Err(CliError::Config("times must be finite and non-negative".into()));
        }
        o.tolerance.get_or_insert(match kind {
            Kind::VerifyDispersive => 0.07,
            Kind::VerifyKernel | Kind::VerifySelfSimilarity => 0.05,
            Kind::VerifySmoothing => 1e-3,
            Kind::VerifySmoothingBound => 0.1,
            _ => 0.1,
        });
        o.s.get_or_insert(0.3);
        o.theta.get_or_insert(0.5);
        o.lambda.get_or_insert(1.25);
        o.varpi.get_or_insert(3.0);
        o.eta.get_or_insert(0.0);
        o.operator.get_or_insert(Operator::Mlf1);
        o.b.get_or_insert(1.0);
        o.z.get_or_insert([-1.0, 0.5]);
        o.trials.get_or_insert(6);
        o.max_halvings.get_or_insert(12);
        o.perturbation.get_or_insert_with(|| match kind {
            Kind::VerifyAsymptotic => Datum::Gaussian {
                center: 1.0,
                width: 0.5,
                amplitude: 0.01,
                wavenumber: 0.0,
            },
            _ => Datum::gaussian(0.0, 1.0),
        });
        o.snapshots.get_or_insert(false);
        Ok(self)
    }

    pub fn frac_params(&self) -> Result<FracParams, CliError> {
        let ps = &self.params;
        let (Some(a), Some(b), Some(d), Some(p)) = (ps.alpha, ps.beta, ps.dim, ps.p) else {
            return Err(CliError::Config("parameters are not resolved".into()));
        };
        FracParams::new(a, b, d, p).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn grid(&self) -> GridSpec {
        self.grid.expect("resolved config")
    }

    pub fn solver(&self) -> &SolverConfig {
        self.solver.as_ref().expect("resolved config")
    }

    pub fn datum(&self) -> &Datum {
        self.datum.as_ref().expect("resolved config")
    }
}

/// p₀ when it is defined and admissible, snapped to its exact rational
/// value; 3 otherwise.
fn critical_power(alpha: f64, beta: f64, dim: usize) -> f64 {
    let Ok(fp) = FracParams::new(alpha, beta, dim, 3.0) else {
        return 3.0;
    };
    match fp.derived().p0 {
        Some(p0) if p0.value >= 3.0 => p0
            .exact
            .as_deref()
            .and_then(parse_ratio)
            .unwrap_or(p0.value),
        _ => 3.0,
    }
}

fn parse_ratio(s: &str) -> Option<f64> {
    match s.split_once('/') {
        Some((n, d)) => Some(n.parse::<i64>().ok()? as f64 / d.parse::<i64>().ok()? as f64),
        None => s.parse::<i64>().ok().map(|v| v as f64),
    }
}

/// Command-line mirror of the config fields. Only flags that were given
/// are applied.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Flags {
    /// JSON config (or an emitted manifest); replaces all scenario flags.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long = "out", value_name = "DIR")]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,

    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// Space dimension.
    #[arg(long = "d")]
    pub dim: Option<usize>,
    /// Nonlinearity power; for `verify dispersive` the Lebesgue exponent.
    #[arg(long, value_name = "P|inf")]
    pub p: Option<String>,
    /// Lebesgue exponent of the estimate or norm.
    #[arg(long, value_name = "Q|inf")]
    pub lebesgue: Option<Exponent>,

    /// Grid points per axis (power of two).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub half_width: Option<f64>,

    #[arg(long)]
    pub t_final: Option<f64>,
    #[arg(long)]
    pub n_steps: Option<usize>,
    /// Graded time grid t_n = T(n/N)^r with r = 2/α.
    #[arg(long)]
    pub graded: bool,
    #[arg(long)]
    pub picard_tol: Option<f64>,
    #[arg(long)]
    pub picard_max_iters: Option<usize>,
    /// Distance used for Picard convergence: x-kappa, y-nu or sup-l2.
    #[arg(long, value_parser = parse_norm)]
    pub norm: Option<ConvergenceNorm>,
    /// Run even when the regime conditions fail.
    #[arg(long)]
    pub force: bool,
    /// Switch the nonlinearity off.
    #[arg(long)]
    pub linear: bool,
    #[arg(long)]
    pub no_dealias: bool,

    /// Datum kind: gaussian, homogeneous or plane-wave.
    #[arg(long)]
    pub datum: Option<String>,
    /// Snapshot file to use as the datum.
    #[arg(long, value_name = "FILE")]
    pub datum_file: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub amplitude: Option<f64>,
    #[arg(long)]
    pub width: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub center: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub wavenumber: Option<f64>,
    #[arg(long)]
    pub degree: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,

    /// Comma-separated sample times.
    #[arg(long, value_delimiter = ',')]
    pub times: Option<Vec<f64>>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub varpi: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    /// schrodinger, heat, mlf1 or mlf2.
    #[arg(long)]
    pub operator: Option<Operator>,
    /// Mittag-Leffler index b.
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub z_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub z_im: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub max_halvings: Option<usize>,
    /// Write field snapshots (propagate).
    #[arg(long)]
    pub snapshots: bool,
}

fn parse_norm(s: &str) -> Result<ConvergenceNorm, String> {
    serde_json::from_value(serde_json::Value::String(s.into()))
        .map_err(|_| format!("unknown norm {s:?}; expected x-kappa, y-nu or sup-l2"))
}

impl Flags {
    /// The resolved config for `kind`: from the config file when one is
    /// given (only `--out` still applies), from the flags otherwise.
    pub fn into_config(self, kind: Kind) -> Result<ScenarioConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => {
                let cfg = ScenarioConfig::load(path)?;
                if cfg.kind != kind {
                    return Err(CliError::Config(format!(
                        "{} describes a {} scenario, not {kind}",
                        path.display(),
                        cfg.kind
                    )));
                }
                cfg
            }
            None => self.apply(ScenarioConfig::new(kind))?,
        };
        if let Some(out) = self.output {
            cfg.output = out;
        }
        cfg.resolve()
    }

    fn apply(&self, mut cfg: ScenarioConfig) -> Result<ScenarioConfig, CliError> {
        let kind = cfg.kind;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        let ps = &mut cfg.params;
        ps.alpha = self.alpha.or(ps.alpha);
        ps.beta = self.beta.or(ps.beta);
        ps.dim = self.dim.or(ps.dim);
        let mut lebesgue = self.lebesgue;
        if let Some(p) = &self.p {
            let e: Exponent = p.parse().map_err(CliError::Config)?;
            if kind == Kind::VerifyDispersive {
                lebesgue = lebesgue.or(Some(e));
            } else {
                ps.p = Some(e.0);
            }
        }

        if self.n.is_some() || self.half_width.is_some() {
            let base = ScenarioConfig::new(kind).resolve_grid_only(ps.dim.unwrap_or(1));
            cfg.grid = Some(GridSpec {
                n: self.n.unwrap_or(base.n),
                half_width: self.half_width.unwrap_or(base.half_width),
            });
        }

        let solver_flags = self.t_final.is_some()
            || self.n_steps.is_some()
            || self.graded
            || self.picard_tol.is_some()
            || self.picard_max_iters.is_some()
            || self.norm.is_some()
            || self.force
            || self.linear
            || self.no_dealias;
        if solver_flags {
            let mut s = ScenarioConfig::new(kind)
                .resolve()
                .map(|c| c.solver().clone())
                .unwrap_or_default();
            s.t_final = self.t_final.unwrap_or(s.t_final);
            s.n_steps = self.n_steps.unwrap_or(s.n_steps);
            if self.graded {
                s.time_grid = TimeGrid::Graded { r: None };
            }
            s.picard_tol = self.picard_tol.unwrap_or(s.picard_tol);
            s.picard_max_iters = self.picard_max_iters.unwrap_or(s.picard_max_iters);
            s.norm_for_convergence = self.norm.unwrap_or(s.norm_for_convergence);
            s.force |= self.force;
            s.nonlinear &= !self.linear;
            s.dealias &= !self.no_dealias;
            cfg.solver = Some(s);
        }

        cfg.datum = self.datum_from_flags(&cfg)?;

        let o = &mut cfg.options;
        o.lebesgue = lebesgue;
        o.times = self.times.clone();
        o.tolerance = self.tolerance;
        o.s = self.s;
        o.theta = self.theta;
        o.lambda = self.lambda;
        o.varpi = self.varpi;
        o.eta = self.eta;
        o.operator = self.operator;
        o.b = self.b;
        if self.z_re.is_some() || self.z_im.is_some() {
            o.z = Some([self.z_re.unwrap_or(0.0), self.z_im.unwrap_or(0.0)]);
        }
        o.trials = self.trials;
        o.max_halvings = self.max_halvings;
        if self.snapshots {
            o.snapshots = Some(true);
        }
        Ok(cfg)
    }

    fn datum_from_flags(&self, cfg: &ScenarioConfig) -> Result<Option<Datum>, CliError> {
        if let Some(path) = &self.datum_file {
            return Ok(Some(Datum::File { path: path.clone() }));
        }
        let touched = self.datum.is_some()
            || self.amplitude.is_some()
            || self.width.is_some()
            || self.center.is_some()
            || self.wavenumber.is_some()
            || self.degree.is_some()
            || self.eps.is_some();
        if !touched {
            return Ok(None);
        }
        // Start from the kind's default datum so partial flags refine it.
        let base = ScenarioConfig {
            params: cfg.params.clone(),
            ..ScenarioConfig::new(cfg.kind)
        }
        .resolve()?
        .datum()
        .clone();
        let kind = self.datum.clone().unwrap_or_else(|| match base {
            Datum::Homogeneous { .. } => "homogeneous".into(),
            Datum::PlaneWave { .. } => "plane-wave".into(),
            _ => "gaussian".into(),
        });
        let (amp0, center0, width0, k0, degree0, eps0) = match base {
            Datum::Gaussian {
                center,
                width,
                amplitude,
                wavenumber,
            } => (amplitude, center, width, wavenumber, 0.5, 8e-3),
            Datum::Homogeneous { degree, eps, c } => (c, 0.0, 1.0, 0.0, degree, eps),
            Datum::PlaneWave { wavenumber, amplitude } => (amplitude, 0.0, 1.0, wavenumber, 0.5, 8e-3),
            Datum::File { .. } => (1.0, 0.0, 1.0, 0.0, 0.5, 8e-3),
        };
        let amplitude = self.amplitude.unwrap_or(amp0);
        Ok(Some(match kind.as_str() {
            "gaussian" => Datum::Gaussian {
                center: self.center.unwrap_or(center0),
                width: self.width.unwrap_or(width0),
                amplitude,
                wavenumber: self.wavenumber.unwrap_or(k0),
            },
            "homogeneous" => Datum::Homogeneous {
                degree: self.degree.unwrap_or(degree0),
                eps: self.eps.unwrap_or(eps0),
                c: amplitude,
            },
            "plane-wave" => Datum::PlaneWave {
                wavenumber: self.wavenumber.unwrap_or(k0),
                amplitude,
            },
            other => {
                return Err(CliError::Config(format!(
                    "unknown datum {other:?}; expected gaussian, homogeneous or plane-wave (or --datum-file)"
                )))
            }
        }))
    }
}

impl ScenarioConfig {
    fn resolve_grid_only(mut self, dim: usize) -> GridSpec {
        self.params.dim = Some(dim);
        self.resolve().map(|c| c.grid()).unwrap_or(GridSpec {
            n: 256,
            half_width: 40.0,
        })
    }
}
