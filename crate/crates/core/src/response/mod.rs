//! Linear response of the potential around an equilibrium.
//!
//! The linearised potential-to-potential map `L_1` is the space-time Fourier
//! multiplier `ŵ(ξ) m_f(τ, ξ)` with
//!
//! ```text
//! m_f(τ, ξ) = -2 ∫_0^∞ e^{-iτt} sin(|ξ|²t) h(2|ξ|t) dt.
//! ```
//!
//! `1 - L_1` is invertible when `|1 - ŵ m_f|` stays away from zero; the
//! stability margin is its minimum over a sampled grid.

mod l1;
mod margin;
mod multiplier;

pub use l1::{apply_l1_frequency_domain, apply_l1_time_domain};
pub(crate) use margin::linear_fit;
pub use margin::{
    decay_bound_check, decay_slope, epsilon_g, stability_margin, DecayReport, EpsilonG, MarginReport, ShellEntry,
    SlopeFit,
};
pub use multiplier::{compute_mf, default_tau_grid, default_xi_grid, mf_from_profile, MfValue, MultiplierTable};
