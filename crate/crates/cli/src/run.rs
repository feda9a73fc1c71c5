//! Scenario execution. Every runner returns its table and a JSON summary;
//! nothing touches the disk here.

use fracdisp_core::kernels::{
    fresnel_kernel, kernel_sup_scan, kernel_sup_scan_at, oscillatory_kernel, oscillatory_kernel_at,
    scaled_kernel_decay, KernelQuery,
};
use fracdisp_core::mlf::{
    mlf_asymptotic, mlf_eval, mlf_integral_ray, mlf_integral_sector, mlf_series, MlfParams, QuadratureRule,
};
use fracdisp_core::norms::{
    lambda_functionals, lp_norm, sobolev_norm, weighted_sup_norm, x0_norm_lower_bound, DerivativeKind,
};
use fracdisp_core::solver::{linear_evolve, picard_solve};
use fracdisp_core::spectral::{
    fractional_heat, load_field, mlf_propagator_1, mlf_propagator_2, schrodinger_group, Field, Grid,
};
use fracdisp_core::verify::{
    homogeneous_datum, verify_asymptotic_link, verify_beta_lt2_run, verify_derivative_loss_dispersive,
    verify_dispersive_group, verify_mlf_operator_decay, verify_picard_contraction, verify_self_similarity,
    verify_smoothing_bound_1d, verify_smoothing_equality_1d, AsymptoticOptions, Check, DilationSearch,
    LocalRunOptions, PicardOptions, SelfSimilarityOptions, SmoothingBoundOptions, SmoothingOptions, VerifyReport,
};
use fracdisp_core::FracParams;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Datum, Kind, Operator, ScenarioConfig};
use crate::error::CliError;

pub struct Outcome {
    pub pass: bool,
    /// One line for the terminal.
    pub headline: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub summary: Value,
    /// (file name, field, time)
    pub snapshots: Vec<(String, Field, f64)>,
}

impl Outcome {
    fn new(header: &[&str]) -> Self {
        Self {
            pass: true,
            headline: String::new(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
            summary: Value::Null,
            snapshots: Vec::new(),
        }
    }

    fn row(&mut self, cells: &[f64]) {
        self.rows.push(cells.iter().map(|v| num(*v)).collect());
    }

    fn report(mut self, report: &VerifyReport) -> Self {
        self.pass = report.verdict;
        self.headline = report
            .checks
            .iter()
            .map(|c| format!("{} [{}]", c.name(), if c.passed() { "ok" } else { "fail" }))
            .collect::<Vec<_>>()
            .join("; ");
        self
    }
}

/// Shortest representation that reads back to the same f64.
pub fn num(v: f64) -> String {
    format!("{v}")
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

pub fn run(cfg: &ScenarioConfig) -> Result<Outcome, CliError> {
    let fp = cfg.frac_params()?;
    let ctx = CliError::scenario(cfg.kind);
    let out = match cfg.kind {
        Kind::MlfEval => mlf_scenario(cfg, &fp),
        Kind::Kernel => kernel_scenario(cfg, &fp),
        Kind::Propagate => propagate(cfg, &fp),
        Kind::Solve => solve(cfg, &fp),
        Kind::Norms => norms(cfg, &fp),
        Kind::VerifyDispersive => dispersive(cfg, &fp),
        Kind::VerifyDerivativeLoss => derivative_loss(cfg, &fp),
        Kind::VerifyMlfDecay => mlf_decay(cfg, &fp),
        Kind::VerifyKernel => verify_kernel(cfg, &fp),
        Kind::VerifySmoothing => smoothing(cfg, &fp),
        Kind::VerifySmoothingBound => smoothing_bound(cfg, &fp),
        Kind::VerifyPicard => picard(cfg, &fp),
        Kind::VerifySelfSimilarity => self_similarity(cfg, &fp),
        Kind::VerifyBetaLt2 => beta_lt2(cfg, &fp),
        Kind::VerifyAsymptotic => asymptotic(cfg, &fp),
    };
    out.map_err(|e| match e {
        Failure::Core(e) => ctx(e),
        Failure::Cli(e) => e,
    })
}

enum Failure {
    Core(fracdisp_core::Error),
    Cli(CliError),
}

impl From<fracdisp_core::Error> for Failure {
    fn from(e: fracdisp_core::Error) -> Self {
        Failure::Core(e)
    }
}

impl From<CliError> for Failure {
    fn from(e: CliError) -> Self {
        Failure::Cli(e)
    }
}

type Run = Result<Outcome, Failure>;

fn opt<T: Copy>(v: Option<T>) -> T {
    v.expect("resolved config")
}

fn times(cfg: &ScenarioConfig) -> &[f64] {
    cfg.options.times.as_deref().expect("resolved config")
}

fn build_grid(cfg: &ScenarioConfig, fp: &FracParams) -> Result<Grid, Failure> {
    let g = cfg.grid();
    Ok(Grid::new(fp.dim, g.n, g.half_width)?)
}

fn build_datum(datum: &Datum, grid: &Grid) -> Result<Field, Failure> {
    Ok(match *datum {
        Datum::Gaussian {
            center,
            width,
            amplitude,
            wavenumber,
        } => Field::from_fn(grid, |x| {
            let r2: f64 = x.iter().map(|v| (v - center).powi(2)).sum();
            Complex64::from_polar(amplitude * (-r2 / (2.0 * width * width)).exp(), wavenumber * x[0])
        }),
        Datum::Homogeneous { degree, eps, c } => homogeneous_datum(grid, c, eps, degree),
        Datum::PlaneWave { wavenumber, amplitude } => {
            Field::from_fn(grid, |x| Complex64::from_polar(amplitude, wavenumber * x[0]))
        }
        Datum::File { ref path } => {
            let (f, _) = load_field(path)?;
            if f.grid.signature() != grid.signature() {
                return Err(CliError::Config(format!(
                    "{} holds a field on a {}-dimensional grid with n = {}, half width {}; the config asks for \
                     d = {}, n = {}, half width {}",
                    path.display(),
                    f.grid.dim(),
                    f.grid.n(),
                    f.grid.half_width(),
                    grid.dim(),
                    grid.n(),
                    grid.half_width()
                ))
                .into());
            }
            f.to_physical()
        }
    })
}

fn datum(cfg: &ScenarioConfig, fp: &FracParams) -> Result<Field, Failure> {
    build_datum(cfg.datum(), &build_grid(cfg, fp)?)
}

fn mlf_scenario(cfg: &ScenarioConfig, fp: &FracParams) -> Run {
    let (alpha, b) = (fp.alpha, opt(cfg.options.b));
    let [re, im] = opt(cfg.options.z);
    let z = Complex64::new(re, im);
    let params = MlfParams::new(alpha, b)?;
    let rule = QuadratureRule::default();
    let routed = mlf_eval(alpha, b, z)?;
    let mut out = Outcome::new(&["route", "re", "im"]);
    let mut routes = vec![("routed", Ok(routed))];
    routes.push(("series", mlf_series(&params, z)));
    let integral = if z.arg().abs() < alpha * std::f64::consts::PI {
        mlf_integral_ray(&params, z, &rule)
    } else {
        mlf_integral_sector(&params, z, &rule)
    };
    routes.push(("integral", integral));
    routes.push(("asymptotic", Ok(mlf_asymptotic(alpha, b, z))));
    let mut agreement = serde_json::Map::new();
    for (name, v) in &routes {
        match v {
            Ok(v) => {
                out.rows.push(vec![name.to_string(), num(v.re), num(v.im)]);
                agreement.insert(name.to_string(), json!((v - routed).norm() / routed.norm().max(1e-300)));
            }
            Err(e) => {
                agreement.insert(name.to_string(), json!(e.to_string()));
            }
        }
    }
    out.headline = format!("E_{{{alpha},{b}}}({re}{im:+}i) = {} {:+}i", routed.re, routed.im);
    out.summary = json!({ "value": [routed.re, routed.im], "relative_difference_from_routed": agreement });
    Ok(out)
}

fn kernel_query(cfg: &ScenarioConfig, fp: &FracParams) -> Result<KernelQuery, Failure> {
    Ok(KernelQuery::new(opt(cfg.options.varpi), opt(cfg.options.eta), fp.dim)?)
}

fn kernel_scenario(cfg: &ScenarioConfig, fp: &FracParams) -> Run {
    let q = kernel_query(cfg, fp)?;
    let mut out = Outcome::new(&["t", "sup", "argmax", "k0_re", "k0_im"]);
    for &t in times(cfg) {
        let scan = kernel_sup_scan_at(&q, t)?;
        let k0 = oscillatory_kernel_at(&q, t, 0.0)?;
        out.row(&[t, scan.sup, scan.at, k0.re, k0.im]);
    }
    out.headline = format!("sup |K_t| over {} times", out.rows.len());
    out.summary = json!({ "scaling_exponent": q.scaling_exponent(), "bounded_regime": q.in_bounded_regime() });
    Ok(out)
}

fn propagate(cfg: &ScenarioConfig, fp: &FracParams) -> Run {
    let f = datum(cfg, fp)?;
    let q = opt(cfg.options.lebesgue).0;
    let op = opt(cfg.options.operator);
    let theta = opt(cfg.options.theta);
    let mut out = Outcome::new(&["t", "l2", "linf", "lq"]);
    for (i, &t) in times(cfg).iter().enumerate() {
        let g = match op {
            Operator::Schrodinger => schrodinger_group(&f, t, fp.delta()),
            Operator::Heat => fractional_heat(&f, t, fp.delta(), theta),
            Operator::Mlf1 => mlf_propagator_1(&f, t, fp),
            Operator::Mlf2 => mlf_propagator_2(&f, t, fp),
        }?
        .to_physical();
        out.row(&[t, g.l2(), g.max_abs(), lp_norm(&g, q)]);
        if opt(cfg.options.snapshots) {
            out.snapshots.push((format!("snapshot_{i:03}.bin"), g, t));
        }
    }
    out.headline = format!("{op:?} applied at {} times", out.rows.len());
    out.summary = json!({ "initial_l2": f.l2(), "lebesgue": q });
    Ok(out)
}

fn solve(cfg: &ScenarioConfig, fp: &FracParams) -> Run {
    let w0 = datum(cfg, fp)?;
    let (traj, diag) = picard_solve(&w0, cfg.solver(), fp)?;
    let q = opt(cfg.options.lebesgue).0;
    let mut out = Outcome::new(&["t", "l2", "linf", "lq"]);
    for (t, f) in traj.times.iter().zip(&traj.fields) {
        out.row(&[*t, f.l2(), f.max_abs(), lp_norm(f, q)]);
    }
    out.pass = diag.converged;
    out.headline = format!(
        "{} after {} iterations, last ratio {}",
        if diag.converged { "converged" } else { "not converged" },
        diag.iterations,
        diag.ratios.last().map_or("n/a".into(), |r| format!("{r:.4}"))
    );
    out.summary = json!({ "diagnostics": to_json(&diag) });
    Ok(out)
}

fn norms(cfg: &ScenarioConfig, fp: &FracParams) -> Run {
    let f = datum(cfg, fp)?;
    let q = opt(cfg.options.lebesgue).0;
    let s = opt(cfg.options.s);
    let mut out = Outcome::new(&["norm", "value"]);
    let mut push = |name: &str, v: f64| out.rows.push(vec![name.to_string(), num(v)]);
    push("l2", f.l2());
    push("linf", f.max_abs());
    push("lq", lp_norm(&f, q));
    push("h_s", sobolev_norm(&f, s, DerivativeKind::Inhomogeneous)?);
    push("hdot_s", sobolev_norm(&f, s, DerivativeKind::Homogeneous)?);
    if let Ok(p0) = fp.p0() {
        push("x0_lower_bound", x0_norm_lower_bound(&f, fp, 41)?);
        let lin = linear_evolve(&f, &cfg.solver().times(fp.alpha), fp)?;
        push("x_kappa_linear", weighted_sup_norm(&lin, fp.kappa_at(p0), p0));
    }
    if fp.dim == 1 {
        let lin = linear_evolve(&f, &cfg.solver().times(fp.alpha), fp)?;
        let l = lambda_functionals(&lin, s, opt(cfg.options.theta), fp)?;
        for (i, v) in l.lambda.iter().enumerate() {
            push(&format!("lambda{}_linear", i + 1), *v);
        }
    }
    out.headline = format!("{} norms of the datum and its linear evolution", out.rows.len());
    out.summary = json!({ "lebesgue": q, "s": s });
    Ok(out)
}

fn fit_outcome(fit: &fracdisp_core::verify::FitResult, value: &str) -> Outcome {
    let mut out = Outcome::new(&["t", value]);
    for &(t, v) in &fit.samples {
        out.row(&[t, v]);
    }
    out.pass = fit.pass;
    out.headline = format!(
        "slope {:.5} (target {:.5}, relative error {:.2e}, r^2 {:.5})",
        fit.slope, fit.target, fit.rel_error, fit.r_squared
    );
    out.summary = json!({ "fit": to_json(fit) });
    out
}

fn dispersive(cfg: &ScenarioConfig, fp: &FracParams) -> Run {
    let q = opt(cfg.options.lebesgue).0;
    let fit = verify_dispersive_group(fp, q, times(cfg), opt(cfg.options.tolerance), &DilationSearch::default())?;
    Ok(fit_outcome(&fit, "operator_norm"))
}

fn derivative_loss(cfg: &ScenarioConfig, fp: &FracParams) -> Run {
    let fit = verify_derivative_loss_dispersive(fp, times(cfg), opt(cfg.options.tolerance), &DilationSearch::default())?;
    Ok(fit_outcome(&fit, "operator_norm"))
}

fn mlf_decay(cfg: &ScenarioConfig, fp: &FracParams) -> Run {
    let r = verify_mlf_operator_decay(fp, times(cfg), opt(cfg.options.tolerance), &DilationSearch::default())?;
    let mut out = Outcome::new(&["t", "e1", "ea"]);
    for (a, b) in r.e1.samples.iter().zip(&r.ea.samples) {
        out.row(&[a.0, a.1, b.1]);
    }
    out.pass = r.e1.pass && r.ea.pass;
    out.headline = format!(
        "E1 slope {:.5}, E_aa slope {:.5} (target {:.5})",
        r.e1.slope, r.ea.slope, r.e1.target
    );
    out.summary = to_json(&r);
    Ok(out)
}

fn verify_kernel(cfg: &ScenarioConfig, fp: &FracParams) -> Run {
    let q = kernel_query(cfg, fp)?;
    let mut report = VerifyReport::new("kernel", fp);
    let a = kernel_sup_scan(&q)?;
    let b = kernel_sup_scan(&q.refined())?;
    report.push(Check::scalar("sup change under refinement", (a - b).abs() / b, 0.01));
    let fit = scaled_kernel_decay(&q, times(cfg), opt(cfg.options.tolerance))?;
    report.push(Check::Fit {
        name: "sup_x |K_t| scaling".into(),
        fit: fit.clone(),
    });
    if q.varpi == 2.0 && q.eta == 0.0 {
        let mut worst: f64 = 0.0;
        for x in [0.0, 1.0, 5.0, 20.0] {
            let exact = fresnel_kernel(1.0, x, fp.dim);
            worst = worst.max((oscillatory_kernel(&q, x)? - exact).norm() / exact.norm());
        }
        report.push(Check::scalar("deviation from the Fresnel closed form", worst, 0.02));
    }
    let mut out = Outcome::new(&["t", "sup"]);
    for &(t, v) in &fit.samples {
        out.row(&[t, v]);
    }
    let mut out = out.report(&report);
    out.summary = to_json(&report);
    Ok(out)
}

fn smoothing(cfg: &ScenarioConfig, fp: &FracParams) -> Run {
    let mut g = datum(cfg, fp)?.to_frequency();
    let freqs = g.grid.freqs().to_vec();
    for (v, k) in g.values.iter_mut().zip(freqs) {
        if k <= 0.0 {
            *v = Complex64::new(0.0, 0.0);
        }
    }
    let opts = SmoothingOptions {
        tolerance: opt(cfg.options.tolerance),
        ..SmoothingOptions::default()
    };
    let r = verify_smoothing_equality_1d(fp.delta(), &g, &opts)?;
    let mut out = Outcome::new(&["x", "time_integral", "frequency_integral"]);
    for &(x, v) in &r.lhs {
        out.row(&[x, v, r.rhs]);
    }
    out.pass = r.pass;
    out.headline = format!("max relative deviation {:.3e} (limit {:.1e})", r.max_deviation, r.tolerance);
    out.summary = to_json(&r);
    Ok(out)
}

fn smoothing_bound(cfg: &ScenarioConfig, fp: &FracParams) -> Run {
    let opts = SmoothingBoundOptions {
        seed: cfg.seed,
        stability: opt(cfg.options.tolerance),
        ..SmoothingBoundOptions::default()
    };
    let r = verify_smoothing_bound_1d(fp, opt(cfg.options.trials), &opts)?;
    let mut out = Outcome::new(&["bandwidth", "max_ratio"]);
    for l in &r.levels {
        out.row(&[l.bandwidth, l.max_ratio]);
    }
    out.pass = r.pass;
    out.headline = format!(
        "spread {:.3} (limit {}), amplitude deviation {:.1e}",
        r.spread, opts.stability, r.amplitude_deviation
    );
    out.summary = to_json(&r);
    Ok(out)
}

fn picard(cfg: &ScenarioConfig, fp: &FracParams) -> Run {
    let w0 = datum(cfg, fp)?;
    let opts = PicardOptions {
        solver: cfg.solver().clone(),
        max_halvings: opt(cfg.options.max_halvings),
        ..PicardOptions::default()
    };
    let r = verify_picard_contraction(fp, &w0, &opts)?;
    let mut out = Outcome::new(&["iteration", "distance", "ratio"]);
    for (i, d) in r.diagnostics.distances.iter().enumerate() {
        let ratio = if i == 0 { f64::NAN } else { r.diagnostics.ratios[i - 1] };
        out.row(&[(i + 1) as f64, *d, ratio]);
    }
    let mut out = out.report(&r.report);
    out.summary = to_json(&r);
    Ok(out)
}

fn self_similarity(cfg: &ScenarioConfig, fp: &FracParams) -> Run {
    let Datum::Homogeneous { degree, eps, c } = *cfg.datum() else {
        return Err(CliError::Config("self-similarity needs a homogeneous datum".into()).into());
    };
    let p0 = fp.p0()?;
    let expected = fp.beta / (p0 - 2.0);
    if (degree - expected).abs() > 1e-9 * expected {
        return Err(CliError::Config(format!("datum degree {degree} must equal beta/(p0 - 2) = {expected}")).into());
    }
    let grid = cfg.grid();
    let opts = SelfSimilarityOptions {
        half_width: grid.half_width,
        n: grid.n,
        amplitude: c,
        solver: cfg.solver().clone(),
        tolerance: opt(cfg.options.tolerance),
        ..SelfSimilarityOptions::default()
    };
    let report = verify_self_similarity(fp, &[opt(cfg.options.lambda)], eps, &opts)?;
    let mut out = Outcome::new(&["eps", "mismatch"]);
    for ch in &report.checks {
        if let Check::Trend { values, .. } = ch {
            for &(e, m) in values {
                out.row(&[e, m]);
            }
        }
    }
    let mut out = out.report(&report);
    out.summary = to_json(&report);
    Ok(out)
}

fn beta_lt2(cfg: &ScenarioConfig, fp: &FracParams) -> Run {
    let w0 = datum(cfg, fp)?;
    let opts = LocalRunOptions {
        solver: cfg.solver().clone(),
        ..LocalRunOptions::default()
    };
    let r = verify_beta_lt2_run(fp, opt(cfg.options.s), opt(cfg.options.theta), &w0, &opts)?;
    let mut out = Outcome::new(&["index", "lambda"]);
    for (i, v) in r.lambda.lambda.iter().enumerate() {
        out.row(&[(i + 1) as f64, *v]);
    }
    let mut out = out.report(&r.report);
    out.headline = format!("T = {}; {}", r.t_final, out.headline);
    out.summary = to_json(&r);
    Ok(out)
}

fn asymptotic(cfg: &ScenarioConfig, fp: &FracParams) -> Run {
    let grid = build_grid(cfg, fp)?;
    let w0 = build_datum(cfg.datum(), &grid)?;
    let bump = build_datum(cfg.options.perturbation.as_ref().expect("resolved config"), &grid)?;
    let v0 = w0.add(&bump)?;
    let opts = AsymptoticOptions {
        solver: cfg.solver().clone(),
        ..AsymptoticOptions::default()
    };
    let report = verify_asymptotic_link(fp, &w0, &v0, &opts)?;
    let series: Vec<&Vec<(f64, f64)>> = report
        .checks
        .iter()
        .filter_map(|c| match c {
            Check::Trend { values, .. } => Some(values),
            _ => None,
        })
        .collect();
    let mut out = Outcome::new(&["t", "a", "b"]);
    if let [a, b] = series[..] {
        for (x, y) in a.iter().zip(b) {
            out.row(&[x.0, x.1, y.1]);
        }
    }
    let mut out = out.report(&report);
    out.summary = to_json(&report);
    Ok(out)
}
