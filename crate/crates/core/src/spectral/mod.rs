//! Torus discretisation: grids, fields, Fourier multipliers,
//! Littlewood–Paley blocks and the norms built on them.
//!
//! Fourier convention: `f̂(ξ) = ∫ e^{-ix·ξ} f(x) dx`, `f(x) = (2π)^{-d} ∫ e^{ix·ξ} f̂(ξ) dξ`,
//! discretised on the lattice so that `(2π)^{-d} Δξ = 1/V`.

mod field;
mod grid;
pub mod lp;
mod norms;
mod toolbox;

pub use field::{
    apply_multiplier, apply_multiplier_table, forward_transform, free_propagator, inverse_transform, SpectralField,
};
pub use grid::{GridSpec, TorusGrid, MAX_DIM};
pub use lp::{lp_project, BlockStatus, LittlewoodPaley, Projection};
pub use norms::{
    bernstein_ratio, besov_norm, besov_norm_with, bessel_weights, frequency_l2_norm, lebesgue_norm,
    lebesgue_norm_of_magnitudes, sobolev_norm, BesovNorm,
};
pub use toolbox::{parseval_rel_error, partition_error, random_field, run_toolbox, ToolboxReport};
