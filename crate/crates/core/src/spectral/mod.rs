//! Periodic uniform grids, complex fields on them and radial Fourier multipliers.

mod snapshot;
mod symbol;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mlf::{mlf_eval, MlfParams};
use crate::params::FracParams;

pub use snapshot::{load_field, save_field, write_atomic, SnapshotMeta};
pub use symbol::{clear_symbol_cache, mlf_symbol_pair, SymbolSpec};

/// Upper bound on n^d, about 256 MiB of complex samples.
pub const DEFAULT_POINT_BUDGET: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Physical,
    Frequency,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Unique radial frequencies and the map from flat index to them.
pub struct RadialIndex {
    pub values: Vec<f64>,
    pub index: Vec<u32>,
}

struct GridInner {
    dim: usize,
    n: usize,
    half_width: f64,
    spacing: f64,
    freqs: Vec<f64>,
    radial: RadialIndex,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

#[derive(Clone)]
pub struct Grid(Arc<GridInner>);

/// Hashable identity of a grid, used as a cache key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSignature {
    pub dim: usize,
    pub n: usize,
    pub half_width_bits: u64,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("dim", &self.0.dim)
            .field("n", &self.0.n)
            .field("half_width", &self.0.half_width)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.signature() == other.signature()
    }
}

impl Grid {
    pub fn new(dim: usize, n: usize, half_width: f64) -> Result<Self> {
        Self::with_budget(dim, n, half_width, DEFAULT_POINT_BUDGET)
    }

    pub fn with_budget(dim: usize, n: usize, half_width: f64, budget: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidParameter(format!("dim = {dim} not in 1..=3")));
        }
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!("n = {n} must be a power of two")));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidParameter(format!("half width {half_width} must be positive")));
        }
        let total = n.checked_pow(dim as u32).filter(|&t| t.saturating_mul(dim) <= budget);
        let total = total.ok_or_else(|| {
            Error::InvalidParameter(format!("n^d = {n}^{dim} exceeds the point budget {budget}"))
        })?;
        let dk = std::f64::consts::PI / half_width;
        let signed = |j: usize| if j < n / 2 { j as i64 } else { j as i64 - n as i64 };
        let freqs = (0..n).map(|j| dk * signed(j) as f64).collect();

        let mut keys = Vec::with_capacity(total);
        for flat in 0..total {
            let mut m = 0i64;
            let mut rem = flat;
            for _ in 0..dim {
                let j = signed(rem % n);
                m += j * j;
                rem /= n;
            }
            keys.push(m);
        }
        let mut uniq: BTreeMap<i64, u32> = keys.iter().map(|&k| (k, 0)).collect();
        let mut values = Vec::with_capacity(uniq.len());
        for (i, (k, slot)) in uniq.iter_mut().enumerate() {
            *slot = i as u32;
            values.push(dk * (*k as f64).sqrt());
        }
        let index = keys.iter().map(|k| uniq[k]).collect();

        let mut planner = FftPlanner::new();
        Ok(Self(Arc::new(GridInner {
            dim,
            n,
            half_width,
            spacing: 2.0 * half_width / n as f64,
            freqs,
            radial: RadialIndex { values, index },
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        })))
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn n(&self) -> usize {
        self.0.n
    }

    pub fn half_width(&self) -> f64 {
        self.0.half_width
    }

    pub fn spacing(&self) -> f64 {
        self.0.spacing
    }

    pub fn len(&self) -> usize {
        self.0.radial.index.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Angular wavenumbers πj/L in DFT order.
    pub fn freqs(&self) -> &[f64] {
        &self.0.freqs
    }

    pub fn radial(&self) -> &RadialIndex {
        &self.0.radial
    }

    pub fn cell_volume(&self) -> f64 {
        self.0.spacing.powi(self.0.dim as i32)
    }

    pub fn signature(&self) -> GridSignature {
        GridSignature {
            dim: self.0.dim,
            n: self.0.n,
            half_width_bits: self.0.half_width.to_bits(),
        }
    }

    /// x_j = −L + jh along one axis.
    pub fn coord(&self, j: usize) -> f64 {
        -self.0.half_width + j as f64 * self.0.spacing
    }

    pub fn axis(&self) -> Vec<f64> {
        (0..self.0.n).map(|j| self.coord(j)).collect()
    }

    /// Per-axis indices of a flat index, axis 0 slowest.
    pub fn multi_index(&self, flat: usize) -> [usize; 3] {
        let (n, d) = (self.0.n, self.0.dim);
        let mut out = [0; 3];
        let mut rem = flat;
        for a in (0..d).rev() {
            out[a] = rem % n;
            rem /= n;
        }
        out
    }

    pub fn point(&self, flat: usize) -> [f64; 3] {
        let mi = self.multi_index(flat);
        let mut x = [0.0; 3];
        for a in 0..self.0.dim {
            x[a] = self.coord(mi[a]);
        }
        x
    }

    /// Flat index of the grid point at the origin.
    pub fn origin_index(&self) -> usize {
        let n = self.0.n;
        (0..self.0.dim).fold(0, |acc, _| acc * n + n / 2)
    }

    /// Radial frequency |ξ| at a flat index.
    pub fn xi_mag(&self, flat: usize) -> f64 {
        self.0.radial.values[self.0.radial.index[flat] as usize]
    }

    pub(crate) fn fft_axes(&self, data: &mut [Complex64], dir: Direction) {
        let (n, d) = (self.0.n, self.0.dim);
        let plan = match dir {
            Direction::Forward => &self.0.fwd,
            Direction::Inverse => &self.0.inv,
        };
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        // Last axis is contiguous and can be processed as one batch.
        plan.process_with_scratch(data, &mut scratch);
        let total = data.len();
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for a in 0..d.saturating_sub(1) {
            let stride = n.pow((d - 1 - a) as u32);
            let block = stride * n;
            for start in (0..total).step_by(block) {
                for off in 0..stride {
                    let base = start + off;
                    for (k, v) in line.iter_mut().enumerate() {
                        *v = data[base + k * stride];
                    }
                    plan.process_with_scratch(&mut line, &mut scratch);
                    for (k, v) in line.iter().enumerate() {
                        data[base + k * stride] = *v;
                    }
                }
            }
        }
        let norm = 1.0 / (total as f64).sqrt();
        data.iter_mut().for_each(|v| *v *= norm);
    }
}

#[derive(Clone, Debug)]
pub struct Field {
    pub grid: Grid,
    pub values: Vec<Complex64>,
    pub space: Space,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<Complex64>, space: Space) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values, space })
    }

    pub fn zeros(grid: &Grid, space: Space) -> Self {
        Self {
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            grid: grid.clone(),
            space,
        }
    }

    pub fn from_fn<F>(grid: &Grid, f: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64,
    {
        let d = grid.dim();
        let values = (0..grid.len()).map(|i| f(&grid.point(i)[..d])).collect();
        Self {
            grid: grid.clone(),
            values,
            space: Space::Physical,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Discrete L² norm with the h^d cell weight (physical space) or the plain
    /// ℓ² norm (frequency space); equal by unitarity.
    pub fn l2(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        (s * self.grid.cell_volume()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
            space: self.space,
        }
    }

    pub fn zip_with<F>(&self, other: &Field, f: F) -> Result<Field>
    where
        F: Fn(Complex64, Complex64) -> Complex64,
    {
        if self.grid != other.grid || self.space != other.space {
            return Err(Error::GridMismatch("fields live on different grids or spaces".into()));
        }
        Ok(Field {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| f(*a, *b)).collect(),
            space: self.space,
        })
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn to_physical(&self) -> Field {
        match self.space {
            Space::Physical => self.clone(),
            Space::Frequency => transform(self, Direction::Inverse).expect("space checked"),
        }
    }

    pub fn to_frequency(&self) -> Field {
        match self.space {
            Space::Frequency => self.clone(),
            Space::Physical => transform(self, Direction::Forward).expect("space checked"),
        }
    }

    /// Samples of the continuous transform ∫f(x)e^{−ix·ξ}dx at the grid
    /// frequencies (DFT order), from a physical-space field.
    pub fn continuous_spectrum(&self) -> Vec<Complex64> {
        let fr = self.to_frequency();
        let g = &self.grid;
        let scale = g.cell_volume() * (g.len() as f64).sqrt();
        (0..g.len())
            .map(|i| {
                let mi = g.multi_index(i);
                let parity: usize = mi[..g.dim()].iter().sum();
                let sign = if parity % 2 == 0 { 1.0 } else { -1.0 };
                fr.values[i] * (scale * sign)
            })
            .collect()
    }

    /// Fraction of the L² mass within `width_frac` of the box faces.
    pub fn boundary_mass_fraction(&self, width_frac: f64) -> f64 {
        let f = self.to_physical();
        let g = &f.grid;
        let edge = g.half_width() * (1.0 - width_frac);
        let mut total = 0.0;
        let mut outer = 0.0;
        for (i, v) in f.values.iter().enumerate() {
            let w = v.norm_sqr();
            total += w;
            if g.point(i)[..g.dim()].iter().any(|x| x.abs() >= edge) {
                outer += w;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            outer / total
        }
    }
}

/// Unitary discrete transform; flips the space tag.
pub fn transform(f: &Field, direction: Direction) -> Result<Field> {
    let expected = match direction {
        Direction::Forward => Space::Physical,
        Direction::Inverse => Space::Frequency,
    };
    if f.space != expected {
        return Err(Error::Precondition(format!("{direction:?} transform of a {:?} field", f.space)));
    }
    let mut values = f.values.clone();
    f.grid.fft_axes(&mut values, direction);
    Ok(Field {
        grid: f.grid.clone(),
        values,
        space: match direction {
            Direction::Forward => Space::Frequency,
            Direction::Inverse => Space::Physical,
        },
    })
}

/// Multiplies the frequency samples by per-radius values.
pub fn multiply_radial(f: &Field, radial: &[Complex64]) -> Field {
    let fr = f.to_frequency();
    let idx = &fr.grid.radial().index;
    let values = fr.values.iter().zip(idx).map(|(v, &k)| v * radial[k as usize]).collect();
    let out = Field {
        grid: fr.grid.clone(),
        values,
        space: Space::Frequency,
    };
    match f.space {
        Space::Physical => out.to_physical(),
        Space::Frequency => out,
    }
}

/// F⁻¹(m(|ξ|) F f), returned in the same space as the input.
pub fn apply_multiplier(f: &Field, m: &SymbolSpec) -> Result<Field> {
    let radial = m.radial_values(&f.grid)?;
    Ok(multiply_radial(f, &radial))
}

pub fn fractional_laplacian(f: &Field, theta: f64) -> Result<Field> {
    if theta < 0.0 {
        return Err(Error::InvalidParameter(format!("theta = {theta} must be non-negative")));
    }
    apply_multiplier(f, &SymbolSpec::Power { theta })
}

pub fn schrodinger_group(f: &Field, t: f64, delta: f64) -> Result<Field> {
    apply_multiplier(f, &SymbolSpec::Schrodinger { t, delta })
}

pub fn fractional_heat(f: &Field, t: f64, delta: f64, theta: f64) -> Result<Field> {
    if !(t > 0.0) {
        return Err(Error::Precondition(format!("heat flow needs t > 0, got {t}")));
    }
    apply_multiplier(
        f,
        &SymbolSpec::Product(vec![SymbolSpec::Power { theta }, SymbolSpec::Heat { t, delta }]),
    )
}

/// E_{α,1}((−it)^α D^β) f.
pub fn mlf_propagator_1(f: &Field, t: f64, params: &FracParams) -> Result<Field> {
    if t < 0.0 {
        return Err(Error::Precondition(format!("propagator needs t >= 0, got {t}")));
    }
    apply_multiplier(
        f,
        &SymbolSpec::Mlf1 {
            t,
            alpha: params.alpha,
            beta: params.beta,
        },
    )
}

/// E_{α,α}((−it)^α D^β) f.
pub fn mlf_propagator_2(f: &Field, t: f64, params: &FracParams) -> Result<Field> {
    if !(t > 0.0) {
        return Err(Error::Precondition(format!("propagator needs t > 0, got {t}")));
    }
    apply_multiplier(
        f,
        &SymbolSpec::Mlf2 {
            t,
            alpha: params.alpha,
            beta: params.beta,
        },
    )
}

/// Series-route value of E_{α,b}((−it)^α k^β) for a single mode, used as an oracle.
pub fn mode_symbol_series(alpha: f64, b: f64, beta: f64, t: f64, k: f64) -> Result<Complex64> {
    let z = crate::mlf::minus_i_pow(alpha) * (t.powf(alpha) * k.powf(beta));
    let p = MlfParams::new(alpha, b)?;
    match crate::mlf::mlf_series(&p, z) {
        Ok(v) => Ok(v),
        Err(_) => mlf_eval(alpha, b, z),
    }
}
