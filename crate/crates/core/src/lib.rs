//! Numerics for the high-dimension behaviour of the random connection model:
//! connection kernels, convolution diagrams, the critical-intensity expansion,
//! decay/Fourier diagnostics, and a torus Monte Carlo sampler.

pub mod assumptions;
pub mod diagrams;
pub mod error;
pub mod expansion;
pub mod kernels;
pub mod logdomain;
pub mod quad;
pub mod ratpoly;
pub mod sim;
pub mod special;

pub use error::{Error, Result};
pub use logdomain::LogValue;
