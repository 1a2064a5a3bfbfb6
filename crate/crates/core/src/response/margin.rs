use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{mf_from_profile, MultiplierTable};
use crate::equilibria::{CovarianceProfile, Potential};
use crate::special::sphere_area;
use crate::{Error, Result};

/// Grid minimum of `|1 - ŵ(ξ) m_f(τ, ξ)|` and where it is attained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarginReport {
    pub min: f64,
    pub tau: f64,
    pub xi_abs: f64,
}

pub fn stability_margin(table: &MultiplierTable, w: &Potential) -> Result<MarginReport> {
    let mut best: Option<MarginReport> = None;
    for (tau, xi, mf, _) in table.entries() {
        let v = (Complex64::new(1.0, 0.0) - mf * w.hat(xi)).norm();
        if best.is_none_or(|b| v < b.min) {
            best = Some(MarginReport {
                min: v,
                tau,
                xi_abs: xi,
            });
        }
    }
    best.ok_or_else(|| Error::InvalidParameter("empty multiplier table".into()))
}

/// One dyadic shell of the `(τ, |ξ|) → (0, 0)` approach.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShellEntry {
    pub radius: f64,
    /// `min Re m_f` over the shell.
    pub min_re: f64,
    pub tau: f64,
    pub xi_abs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsilonG {
    /// `-min Re m_f / (2|S^{d-1}|)` over the last two shells.
    pub value: f64,
    /// Range spanned by the last two shells; a point when they agree.
    pub interval: (f64, f64),
    /// Whether the last two shell minima agree within 5%.
    pub converged: bool,
    pub shells: Vec<ShellEntry>,
}

/// `ε_g = -liminf_{(τ,ξ)→0} Re m_f / (2|S^{d-1}|)`, estimated on the shells
/// `(τ, |ξ|) = r_n (cos φ, sin φ)`, `r_n = r0 2^{-n}`, `φ ∈ (0, π)`.
pub fn epsilon_g(profile: &CovarianceProfile, r0: f64, shells: usize, angles: usize) -> EpsilonG {
    let norm = 2.0 * sphere_area(profile.dim());
    let trace: Vec<ShellEntry> = (0..shells.max(2))
        .map(|n| {
            let r = r0 * 0.5f64.powi(n as i32);
            (0..angles.max(1))
                .into_par_iter()
                .map(|k| {
                    let phi = PI * (k as f64 + 0.5) / angles.max(1) as f64;
                    let (tau, xi) = (r * phi.cos(), r * phi.sin());
                    ShellEntry {
                        radius: r,
                        min_re: mf_from_profile(profile, tau, xi).value.re,
                        tau,
                        xi_abs: xi,
                    }
                })
                .reduce_with(|a, b| if b.min_re < a.min_re { b } else { a })
                .expect("at least one angle")
        })
        .collect();
    let a = trace[trace.len() - 2].min_re;
    let b = trace[trace.len() - 1].min_re;
    let lo = -a.max(b) / norm;
    let hi = -a.min(b) / norm;
    let scale = a.abs().max(b.abs());
    let converged = scale == 0.0 || (a - b).abs() <= 0.05 * scale;
    EpsilonG {
        value: hi + 0.0,
        interval: (lo + 0.0, hi + 0.0),
        converged,
        shells: trace,
    }
}

/// `sup |m_f(τ,ξ)| (1+|τ|)/(1+|ξ|)` over a table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayReport {
    pub sup: f64,
    pub tau: f64,
    pub xi_abs: f64,
    pub finite: bool,
}

pub fn decay_bound_check(table: &MultiplierTable) -> DecayReport {
    let mut rep = DecayReport {
        sup: 0.0,
        tau: 0.0,
        xi_abs: 0.0,
        finite: true,
    };
    for (tau, xi, mf, _) in table.entries() {
        let v = mf.norm() * (1.0 + tau.abs()) / (1.0 + xi);
        if !v.is_finite() {
            rep.finite = false;
        }
        if v > rep.sup {
            rep = DecayReport {
                sup: v,
                tau,
                xi_abs: xi,
                finite: rep.finite,
            };
        }
    }
    rep
}

/// Log-log slope of `|m_f(τ, ξ)|` along `τ = τ0 2^k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeFit {
    pub taus: Vec<f64>,
    pub magnitudes: Vec<f64>,
    /// Least-squares slope over the second half of the doublings.
    pub slope: f64,
    /// Root-mean-square residual of that fit.
    pub residual: f64,
}

pub fn decay_slope(profile: &CovarianceProfile, xi_abs: f64, tau0: f64, doublings: usize) -> SlopeFit {
    let taus: Vec<f64> = (0..=doublings).map(|k| tau0 * 2f64.powi(k as i32)).collect();
    let magnitudes: Vec<f64> = taus
        .par_iter()
        .map(|&t| mf_from_profile(profile, t, xi_abs).value.norm())
        .collect();
    let start = taus.len() / 2;
    let pts: Vec<(f64, f64)> = taus[start..]
        .iter()
        .zip(&magnitudes[start..])
        .map(|(t, m)| (t.ln(), m.ln()))
        .collect();
    let (slope, residual) = linear_fit(&pts);
    SlopeFit {
        taus,
        magnitudes,
        slope,
        residual,
    }
}

/// Least-squares slope and RMS residual.
pub(crate) fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return (f64::NAN, f64::NAN);
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let rss: f64 = pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    (slope, (rss / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::Distribution;
    use crate::response::{default_tau_grid, default_xi_grid};

    #[test]
    fn zero_potential_or_zero_f_gives_unit_margin() {
        let p = CovarianceProfile::new(&Distribution::fermi(1.0, 0.0).unwrap(), 4).unwrap();
        let t = MultiplierTable::compute(&p, &default_tau_grid(0.01, 32.0, 5), &default_xi_grid(0.1, 3.0, 4));
        assert_eq!(stability_margin(&t, &Potential::zero()).unwrap().min, 1.0);
        let z = CovarianceProfile::new(&Distribution::zero(), 4).unwrap();
        let t = MultiplierTable::compute(&z, &[0.0, 1.0], &[0.5]);
        assert_eq!(stability_margin(&t, &Potential::delta(3.0).unwrap()).unwrap().min, 1.0);
        assert_eq!(decay_bound_check(&t).sup, 0.0);
    }

    #[test]
    fn epsilon_g_zero_for_zero_f_and_bounded_below() {
        let z = CovarianceProfile::new(&Distribution::zero(), 2).unwrap();
        let e = epsilon_g(&z, 1.0, 4, 8);
        assert_eq!(e.value, 0.0);
        assert!(e.converged);
        let p = CovarianceProfile::new(&Distribution::fermi(1.0, 0.0).unwrap(), 2).unwrap();
        let e = epsilon_g(&p, 1.0, 5, 16);
        let sup = e
            .shells
            .iter()
            .map(|s| mf_from_profile(&p, s.tau, s.xi_abs).value.norm())
            .fold(0.0, f64::max);
        assert!(e.value >= -sup / (2.0 * sphere_area(2)));
    }

    #[test]
    fn fit_recovers_power_law() {
        let pts: Vec<(f64, f64)> = (1..10)
            .map(|k| ((k as f64).ln(), -1.5 * (k as f64).ln() + 2.0))
            .collect();
        let (s, r) = linear_fit(&pts);
        assert!((s + 1.5).abs() < 1e-12 && r < 1e-12);
    }
}
