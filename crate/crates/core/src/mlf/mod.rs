//! Two-parameter Mittag-Leffler function E_{α,b}(z) = Σ zⁿ/Γ(αn+b).
//!
//! Routes: power series, the real-line integral representation (with and
//! without the residue term), a large-|z| asymptotic expansion, and the
//! change-of-variable decomposition used for the propagator symbols on the
//! ray z = (−it)^α|ξ|^β.

mod quadrature;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{gamma, ln_gamma_signed, rgamma};

pub use quadrature::{gauss_legendre, QuadratureRule, QuadratureSpec, Substitution};

/// Largest |z|^{1/α} handed to the f64 series by [`mlf_eval`]. Beyond it the
/// terms grow to about e^{|z|^{1/α}} and cancellation eats the digits.
pub const SERIES_RADIUS: f64 = 8.0;
/// Smallest |z|^{1/α} at which the optimally truncated asymptotic expansion
/// is accurate to f64 precision.
pub const ASYMPTOTIC_RADIUS: f64 = 40.0;

/// i^α = exp(iαπ/2).
pub fn i_pow(alpha: f64) -> Complex64 {
    Complex64::from_polar(1.0, 0.5 * alpha * PI)
}

/// (−i)^α = exp(−iαπ/2).
pub fn minus_i_pow(alpha: f64) -> Complex64 {
    Complex64::from_polar(1.0, -0.5 * alpha * PI)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MlfParams {
    pub alpha: f64,
    pub beta_index: f64,
    pub series_tol: f64,
    pub max_terms: usize,
}

impl MlfParams {
    pub fn new(alpha: f64, beta_index: f64) -> Result<Self> {
        Self::with_tolerance(alpha, beta_index, 1e-15, 2000)
    }

    pub fn with_tolerance(alpha: f64, beta_index: f64, series_tol: f64, max_terms: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} not in (0, 1]")));
        }
        if !(beta_index > 0.0 && beta_index.is_finite()) {
            return Err(Error::InvalidParameter(format!("beta_index = {beta_index} must be positive")));
        }
        if !(series_tol > 0.0) || max_terms < 10 {
            return Err(Error::InvalidParameter("series_tol > 0 and max_terms >= 10 required".into()));
        }
        Ok(Self {
            alpha,
            beta_index,
            series_tol,
            max_terms,
        })
    }

    /// Whether the real-line integral representation applies.
    pub fn integral_admissible(&self) -> bool {
        self.alpha < 1.0 && self.beta_index < 1.0 + self.alpha
    }
}

/// The argument z = (−it)^α|ξ|^β on the propagator ray.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayArgument {
    pub t: f64,
    pub xi_mag: f64,
    pub beta_space: f64,
    pub delta: f64,
}

impl RayArgument {
    pub fn new(t: f64, xi_mag: f64, beta_space: f64, alpha: f64) -> Result<Self> {
        if !(t >= 0.0 && xi_mag >= 0.0 && beta_space > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "ray argument needs t >= 0, |xi| >= 0, beta > 0 (t={t}, xi={xi_mag}, beta={beta_space})"
            )));
        }
        Ok(Self {
            t,
            xi_mag,
            beta_space,
            delta: beta_space / alpha,
        })
    }

    pub fn z(&self, alpha: f64) -> Complex64 {
        minus_i_pow(alpha) * (self.t.powf(alpha) * self.xi_mag.powf(self.beta_space))
    }

    /// c = t|ξ|^δ, so that z^{1/α} = −ic.
    pub fn phase(&self) -> f64 {
        self.t * self.xi_mag.powf(self.delta)
    }
}

/// A converged partial sum with its diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct SeriesSum {
    pub value: Complex64,
    pub terms: usize,
    pub remainder: f64,
    /// Largest single term magnitude; compare with |value| to gauge cancellation.
    pub peak: f64,
}

pub fn series_sum(alpha: f64, b: f64, z: Complex64, tol: f64, max_terms: usize) -> Result<SeriesSum> {
    let r = z.norm();
    if r == 0.0 {
        let v = rgamma(b);
        return Ok(SeriesSum {
            value: Complex64::new(v, 0.0),
            terms: 1,
            remainder: 0.0,
            peak: v.abs(),
        });
    }
    let lr = r.ln();
    let theta = z.arg();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut peak: f64 = 0.0;
    let log_term = |n: usize| {
        let (lg, s) = ln_gamma_signed(alpha * n as f64 + b);
        (n as f64 * lr - lg, s)
    };
    for n in 0..max_terms {
        let (lt, s) = log_term(n);
        let mag = lt.exp();
        peak = peak.max(mag);
        sum += Complex64::from_polar(s * mag, n as f64 * theta);

        // Term ratios |z|Γ(αk+b)/Γ(αk+α+b) decrease in k, so a geometric bound
        // from term n+1 onward is certified once the ratio drops below 1.
        let k = n + 1;
        let xk = alpha * k as f64 + b;
        let q = (lr + ln_gamma_signed(xk).0 - ln_gamma_signed(xk + alpha).0).exp();
        if q < 1.0 {
            let next = log_term(k).0.exp();
            let remainder = next / (1.0 - q);
            if remainder <= tol * sum.norm().max(f64::MIN_POSITIVE) {
                return Ok(SeriesSum {
                    value: sum,
                    terms: n + 1,
                    remainder,
                    peak,
                });
            }
        }
    }
    let k = max_terms;
    let remainder = log_term(k).0.exp();
    Err(Error::NonConvergent {
        max_terms,
        remainder,
    })
}

pub fn mlf_series(params: &MlfParams, z: Complex64) -> Result<Complex64> {
    series_sum(params.alpha, params.beta_index, z, params.series_tol, params.max_terms).map(|s| s.value)
}

/// The real-line part of the integral representation,
/// (1/π)∫₀^∞ v^{α−b}e^{−v}(v^α sin π(1−b) − z sin π(1−b+α))/(v^{2α} − 2v^α z cos πα + z²) dv,
/// evaluated after v = w^m with m = 1/(1+α−b), which removes the endpoint singularity.
fn real_line_integral(alpha: f64, b: f64, z: Complex64, rule: &QuadratureRule) -> Result<(Complex64, QuadratureSpec)> {
    let m = 1.0 / (1.0 + alpha - b);
    let s1 = (PI * (1.0 - b)).sin();
    let s2 = (PI * (1.0 - b + alpha)).sin();
    let c = (PI * alpha).cos();
    let zr = z.norm();

    // Certified tail: for v^α ≥ 2|z|, |num| ≤ v^α(|s1|+|s2|) and |den| ≥ v^{2α}/4.
    let e = alpha - b;
    let mut v_cut = (2.0 * zr).powf(1.0 / alpha).max(40.0).max(2.0 * e.abs());
    let tail = |v: f64| 8.0 * (s1.abs() + s2.abs()) * v.powf(-b) * (-v).exp() / PI;
    while tail(v_cut) > rule.tolerance && v_cut < 1e6 {
        v_cut *= 1.25;
    }
    let w_cut = v_cut.powf(1.0 / m);
    let spec = QuadratureSpec::geometric(w_cut * 1e-12, w_cut, rule, Substitution::None, tail(v_cut))?;
    let z2 = z * z;
    let value = spec.integrate(|w| {
        let v = w.powf(m);
        let va = v.powf(alpha);
        let num = va * s1 - z * s2;
        let den = va * va - z * (2.0 * va * c) + z2;
        num / den * ((-v).exp() * m / PI)
    });
    Ok((value, spec))
}

fn check_integral_domain(params: &MlfParams, z: Complex64) -> Result<()> {
    if !params.integral_admissible() {
        return Err(Error::Domain(format!(
            "integral representation needs alpha < 1 and beta_index < 1 + alpha (alpha={}, beta_index={})",
            params.alpha, params.beta_index
        )));
    }
    if z.norm() == 0.0 {
        return Err(Error::Domain("integral representation needs z != 0".into()));
    }
    Ok(())
}

/// Integral representation with residue term, valid for |arg z| < απ.
pub fn mlf_integral_ray(params: &MlfParams, z: Complex64, rule: &QuadratureRule) -> Result<Complex64> {
    mlf_integral_ray_spec(params, z, rule).map(|(v, _)| v)
}

pub fn mlf_integral_ray_spec(
    params: &MlfParams,
    z: Complex64,
    rule: &QuadratureRule,
) -> Result<(Complex64, QuadratureSpec)> {
    check_integral_domain(params, z)?;
    let (alpha, b) = (params.alpha, params.beta_index);
    if z.arg().abs() >= alpha * PI {
        return Err(Error::Domain(format!(
            "|arg z| = {} >= alpha*pi = {}",
            z.arg().abs(),
            alpha * PI
        )));
    }
    let lead = z.powf((1.0 - b) / alpha) * z.powf(1.0 / alpha).exp() / alpha;
    let (corr, spec) = real_line_integral(alpha, b, z, rule)?;
    Ok((lead + corr, spec))
}

/// Same representation for απ < |arg z| ≤ π, where no residue term appears.
pub fn mlf_integral_sector(params: &MlfParams, z: Complex64, rule: &QuadratureRule) -> Result<Complex64> {
    check_integral_domain(params, z)?;
    if z.arg().abs() <= params.alpha * PI {
        return Err(Error::Domain(format!(
            "|arg z| = {} <= alpha*pi = {}",
            z.arg().abs(),
            params.alpha * PI
        )));
    }
    real_line_integral(params.alpha, params.beta_index, z, rule).map(|(v, _)| v)
}

/// Optimally truncated expansion
/// E ≈ [(1/α)z^{(1−b)/α}e^{z^{1/α}}] − Σ_{k≥1} z^{−k}/Γ(b−αk),
/// with the bracket present for |arg z| < απ.
pub fn mlf_asymptotic(alpha: f64, b: f64, z: Complex64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    if z.arg().abs() < alpha * PI {
        sum += z.powf((1.0 - b) / alpha) * z.powf(1.0 / alpha).exp() / alpha;
    }
    // |1/Γ(b−αk)| = Γ(1−b+αk)|sin π(b−αk)|/π oscillates; truncate on the
    // smooth envelope Γ(1−b+αk)/(π|z|^k) instead.
    let zinv = z.inv();
    let lr = z.norm().ln();
    let mut zk = Complex64::new(1.0, 0.0);
    let mut prev = f64::INFINITY;
    for k in 1..400 {
        zk *= zinv;
        let x = 1.0 - b + alpha * k as f64;
        let env = if x > 0.0 {
            (ln_gamma_signed(x).0 - k as f64 * lr).exp() / PI
        } else {
            f64::INFINITY
        };
        if env > prev {
            break;
        }
        sum -= zk * rgamma(b - alpha * k as f64);
        if env.is_finite() {
            prev = env;
            if env <= 1e-17 * sum.norm() {
                break;
            }
        }
    }
    sum
}

/// Routed evaluation for any α ∈ (0,1), b > 0 and complex z.
pub fn mlf_eval(alpha: f64, b: f64, z: Complex64) -> Result<Complex64> {
    let r = z.norm();
    if r == 0.0 {
        return Ok(Complex64::new(rgamma(b), 0.0));
    }
    let scale = r.powf(1.0 / alpha);
    if scale <= SERIES_RADIUS || alpha >= 1.0 {
        return series_sum(alpha, b, z, 1e-15, 5000).map(|s| s.value);
    }
    if scale >= ASYMPTOTIC_RADIUS {
        return Ok(mlf_asymptotic(alpha, b, z));
    }
    if b >= 1.0 + alpha {
        let lower = mlf_eval(alpha, b - alpha, z)?;
        return Ok((lower - rgamma(b - alpha)) / z);
    }
    let params = MlfParams::new(alpha, b)?;
    let rule = QuadratureRule::default();
    let edge = (z.arg().abs() - alpha * PI).abs();
    if edge < 1e-3 {
        return series_sum(alpha, b, z, 1e-13, 20000).map(|s| s.value);
    }
    if z.arg().abs() < alpha * PI {
        mlf_integral_ray(&params, z, &rule)
    } else {
        mlf_integral_sector(&params, z, &rule)
    }
}

/// Denominator i^α u² − 2u cos απ + (−i)^α of the decomposition, u = r^α.
pub fn decomposition_denominator(alpha: f64, u: f64) -> Complex64 {
    i_pow(alpha) * (u * u) - 2.0 * u * (alpha * PI).cos() + minus_i_pow(alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeightKind {
    /// r^{α−1}, the E_{α,1} integrand.
    E1,
    /// r^α, the E_{α,α} integrand.
    Ea,
}

/// Integrand weight r^{α−1}/D(r) or r^α/D(r) with D(r) = i^α r^{2α} − 2r^α cos απ + (−i)^α.
pub fn heat_integral_weight(alpha: f64, kind: WeightKind, r: f64) -> Result<Complex64> {
    if !(r > 0.0) || !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("need r > 0 and alpha in (0,1), got r={r}, alpha={alpha}")));
    }
    let den = decomposition_denominator(alpha, r.powf(alpha));
    if den.norm() < 1e-14 {
        return Err(Error::SingularDenominator(den.norm()));
    }
    let pow = match kind {
        WeightKind::E1 => r.powf(alpha - 1.0),
        WeightKind::Ea => r.powf(alpha),
    };
    Ok(pow / den)
}

/// The pair (E_{α,1}(z), E_{α,α}(z)) at z = (−it)^α|ξ|^β via the decomposition
/// into an oscillatory term e^{−ic}, c = t|ξ|^δ, plus a damped integral.
pub fn mlf_operator_symbols(
    arg: &RayArgument,
    params: &MlfParams,
    rule: &QuadratureRule,
) -> Result<(Complex64, Complex64)> {
    let alpha = params.alpha;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("decomposition needs alpha in (0,1), got {alpha}")));
    }
    let c = arg.phase();
    if c == 0.0 {
        return Ok((Complex64::new(1.0, 0.0), Complex64::new(rgamma(alpha), 0.0)));
    }
    let inv_a = 1.0 / alpha;
    // Tails beyond U ≥ 4, where |D(u)| ≥ u²/4.
    let tail1 = |u: f64| 4.0 * inv_a * (-c * u.powf(inv_a)).exp() / u;
    let taila = |u: f64| 4.0 * (-c * u.powf(inv_a)).exp() / (c * u);
    let mut v = 50.0;
    let mut u_cut = (v / c).powf(alpha).max(4.0);
    while tail1(u_cut).max(taila(u_cut)) > rule.tolerance && v < 1e4 {
        v *= 1.25;
        u_cut = (v / c).powf(alpha).max(4.0);
    }
    let tail = tail1(u_cut).max(taila(u_cut));
    let lo = u_cut.min(1.0) * 1e-6;
    let spec = QuadratureSpec::geometric(lo, u_cut, rule, Substitution::PowerLaw, tail)?;

    let mut j1 = Complex64::new(0.0, 0.0);
    let mut ja = Complex64::new(0.0, 0.0);
    let gl = gauss_legendre(spec.nodes_per_panel);
    for w in spec.panel_edges.windows(2) {
        let half = 0.5 * (w[1] - w[0]);
        let mid = 0.5 * (w[1] + w[0]);
        for &(x, wt) in gl {
            let u = mid + half * x;
            let r = u.powf(inv_a);
            let f = (-c * r).exp() * wt * half / decomposition_denominator(alpha, u);
            j1 += f;
            ja += f * r;
        }
    }
    j1 *= inv_a;
    ja *= inv_a;

    let s = (alpha * PI).sin() / PI;
    let osc = Complex64::from_polar(1.0, -c);
    let e1 = osc * inv_a - j1 * s;
    let c1 = c.powf(1.0 - alpha);
    let ea = minus_i_pow(1.0 - alpha) * osc * (c1 * inv_a) + i_pow(alpha) * ja * (s * c1);
    Ok((e1, ea))
}

/// |∫₀^∞ e^{−st}t^{b−1}E_{α,b}(at^α)dt − s^{α−b}/(s^α − a)|.
pub fn laplace_identity_residual(
    alpha: f64,
    beta_index: f64,
    a: Complex64,
    s: Complex64,
    rule: &QuadratureRule,
) -> Result<f64> {
    let b = beta_index;
    if !(s.re > 0.0) {
        return Err(Error::Domain(format!("Re s = {} must be positive", s.re)));
    }
    // For |arg a| > απ the left side converges for every Re s > 0 and both
    // sides are analytic there, so |s^{−α}a| < 1 is only needed otherwise.
    if (s.powf(-alpha) * a).norm() >= 1.0 && a.arg().abs() <= alpha * PI {
        return Err(Error::Domain("|s^-alpha a| must be below 1".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0 && b > 0.0) {
        return Err(Error::Domain(format!("need alpha in (0,1) and b > 0 (alpha={alpha}, b={b})")));
    }
    // Sup bound on |E_{α,b}(a t^α)| for t ≥ T.
    let bound_at: Box<dyn Fn(f64) -> f64> = if a.norm() == 0.0 {
        let g = rgamma(b).abs();
        Box::new(move |_| g)
    } else if a.arg().abs() > alpha * PI {
        // From the real-line representation: |den| ≥ |z|²μ₊μ₋, where μ± is the
        // distance of e^{i(arg z ± απ)} to the positive real axis.
        let mu = |phi: f64| {
            let ang = phi.rem_euclid(2.0 * PI);
            let ang = ang.min(2.0 * PI - ang);
            if ang >= 0.5 * PI { 1.0 } else { ang.sin() }
        };
        let mm = mu(a.arg() + alpha * PI) * mu(a.arg() - alpha * PI);
        let s1 = (PI * (1.0 - b)).sin().abs();
        let s2 = (PI * (1.0 - b + alpha)).sin().abs();
        let g1 = gamma(2.0 * alpha - b + 1.0);
        let g2 = gamma(alpha - b + 1.0);
        let an = a.norm();
        Box::new(move |t: f64| {
            let zr = an * t.powf(alpha);
            (s1 * g1 / (zr * zr) + s2 * g2 / zr) / (PI * mm)
        })
    } else {
        return Err(Error::Domain(
            "certified tail bound needs a = 0 or |arg a| > alpha*pi".into(),
        ));
    };
    let sr = s.re;
    let tail = |t: f64| {
        let factor = if b <= 1.0 { 1.0 } else { 2.0 };
        bound_at(t) * factor * t.powf(b - 1.0) * (-sr * t).exp() / sr
    };
    let mut t_cut = 10.0 / sr;
    while (tail(t_cut) > rule.tolerance * 1e3 || (b > 1.0 && t_cut < 2.0 * (b - 1.0) / sr)) && t_cut < 1e5 {
        t_cut *= 1.25;
    }
    // t = w^{1/b} turns t^{b−1}dt into dw/b.
    let w_cut = t_cut.powf(b);
    let spec = QuadratureSpec::geometric(w_cut * 1e-14, w_cut, rule, Substitution::None, tail(t_cut))
        .or_else(|_| {
            let loose = QuadratureRule {
                tolerance: tail(t_cut),
                ..*rule
            };
            QuadratureSpec::geometric(w_cut * 1e-14, w_cut, &loose, Substitution::None, tail(t_cut))
        })?;
    let mut err = None;
    let lhs = spec.integrate(|w| {
        let t = w.powf(1.0 / b);
        match mlf_eval(alpha, b, a * t.powf(alpha)) {
            Ok(e) => (-s * t).exp() * e / b,
            Err(e) => {
                err.get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    let rhs = s.powf(alpha - b) / (s.powf(alpha) - a);
    Ok((lhs - rhs).norm() + spec.tail_bound)
}
