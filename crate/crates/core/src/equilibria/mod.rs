//! Translation-invariant equilibria: distribution functions `f`, the
//! covariance profile `h`, interaction potentials `w`, the equilibrium mass,
//! and a numerical check of the stability-theorem hypotheses.

mod covariance;
mod distribution;
mod hypotheses;
mod potential;

pub use covariance::{eval_h, eval_h_direct, CovarianceProfile};
pub use distribution::{eval_f2, Distribution, RadialProfile};
pub use hypotheses::{hypothesis_check, Bullet, HypothesisReport, Verdict};
pub use potential::Potential;

/// `m = ŵ(0) ∫|f|² = ŵ(0) h(0)`: the phase rate that makes the equilibrium an
/// exact solution.
pub fn equilibrium_mass(h0: f64, w: &Potential) -> f64 {
    w.hat_at_zero() * h0
}
