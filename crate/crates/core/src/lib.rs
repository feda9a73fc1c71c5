//! Numerics for the time-space fractional Schrödinger equation
//! i^α ∂_t^α w − (−Δ)^{β/2} w + |w|^{p−2}w = 0.

pub mod error;
pub mod kernels;
pub mod mlf;
pub mod norms;
pub mod params;
pub mod solver;
pub mod special;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use params::FracParams;
