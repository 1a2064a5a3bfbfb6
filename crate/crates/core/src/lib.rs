//! Spectral simulation and stability analysis for the Hartree equation for
//! random fields,
//!
//! ```text
//! i ∂t X = -ΔX + (w * E|X|²) X,
//! ```
//!
//! on a periodic torus. Random fields are represented by finite families of
//! orthonormal Gaussian modes, which turns every expectation into an exact
//! finite sum.
//!
//! Layout:
//!
//! - [`spectral`]: torus grids, Fourier transforms, Littlewood–Paley blocks and norms.
//! - [`equilibria`]: distribution functions, the covariance profile `h`, potentials.
//! - [`ensemble`]: mode ensembles, split-step dynamics, perturbations, Picard iteration.
//! - [`response`]: the linear-response multiplier `m_f` and stability margins.
//! - [`twowave`]: the 4×4 linearisation around two counter-propagating waves.

pub mod ensemble;
pub mod equilibria;
mod error;
pub mod quadrature;
pub mod response;
pub mod special;
pub mod spectral;
pub mod twowave;

pub use error::{Error, Result};
pub use num_complex::Complex64;
