use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::equilibria::{CovarianceProfile, Distribution};
use crate::quadrature::gk21;
use crate::Result;

/// Relative size of the tail bound at which the integration stops.
const TAIL_TOLERANCE: f64 = 1e-10;

/// A multiplier value with its error estimate (quadrature plus tail bound).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MfValue {
    pub value: Complex64,
    pub error: f64,
}

/// `m_f(τ, ξ) = -2 ∫_0^∞ e^{-iτt} sin(|ξ|²t) h(2|ξ|t) dt`.
///
/// Builds the covariance table first; use [`mf_from_profile`] for repeated
/// evaluation.
pub fn compute_mf(f: &Distribution, dim: usize, tau: f64, xi_abs: f64) -> Result<MfValue> {
    let profile = CovarianceProfile::new(f, dim)?;
    Ok(mf_from_profile(&profile, tau, xi_abs))
}

/// `m_f` from a tabulated `h`.
///
/// After `u = 2ρt` the integral is `-(1/ρ) ∫_0^∞ e^{-iτu/(2ρ)} sin(ρu/2) h(u) du`,
/// integrated panel by panel until the tail bound from
/// `|h(u)| ≤ C ⟨u⟩^{-2}` drops below `1e-10` of the accumulated value.
pub fn mf_from_profile(profile: &CovarianceProfile, tau: f64, xi_abs: f64) -> MfValue {
    let rho = xi_abs.abs();
    if rho == 0.0 || profile.h0() == 0.0 {
        return MfValue {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
        };
    }
    let freq = tau / (2.0 * rho);
    let omega = freq.abs() + 0.5 * rho;
    let pw = profile.panel_width();
    let sub = ((pw * omega / PI).ceil() as usize).max(1);
    let integrand = |u: f64| {
        let (s, c) = (freq * u).sin_cos();
        Complex64::new(c, -s) * ((0.5 * rho * u).sin() * profile.eval(u))
    };
    let panels = (profile.x_max() / pw).round() as usize;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut quad_err = 0.0;
    let mut tail = profile.weighted_sup_beyond(0.0) * 0.5 * PI;
    for i in 0..panels {
        let a = i as f64 * pw;
        for k in 0..sub {
            let lo = a + pw * k as f64 / sub as f64;
            let hi = a + pw * (k + 1) as f64 / sub as f64;
            let (v, e) = gk21(&integrand, lo, hi);
            acc += v;
            quad_err += e;
        }
        let end = a + pw;
        tail = profile.weighted_sup_beyond(end) * (0.5 * PI - end.atan());
        if tail <= TAIL_TOLERANCE * acc.norm() {
            break;
        }
    }
    MfValue {
        value: -acc / rho,
        error: (quad_err + tail) / rho,
    }
}

/// `m_f` sampled on a `τ × |ξ|` grid.
#[derive(Debug, Clone)]
pub struct MultiplierTable {
    dim: usize,
    taus: Vec<f64>,
    xis: Vec<f64>,
    values: Vec<Complex64>,
    errors: Vec<f64>,
}

impl MultiplierTable {
    /// Fills the table in parallel; entry `(i, j)` is `m_f(taus[i], xis[j])`.
    pub fn compute(profile: &CovarianceProfile, taus: &[f64], xis: &[f64]) -> Self {
        let n = taus.len() * xis.len();
        let entries: Vec<MfValue> = (0..n)
            .into_par_iter()
            .map(|idx| mf_from_profile(profile, taus[idx / xis.len()], xis[idx % xis.len()]))
            .collect();
        Self {
            dim: profile.dim(),
            taus: taus.to_vec(),
            xis: xis.to_vec(),
            values: entries.iter().map(|e| e.value).collect(),
            errors: entries.iter().map(|e| e.error).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn taus(&self) -> &[f64] {
        &self.taus
    }

    pub fn xis(&self) -> &[f64] {
        &self.xis
    }

    pub fn get(&self, i_tau: usize, i_xi: usize) -> Complex64 {
        self.values[i_tau * self.xis.len() + i_xi]
    }

    pub fn error(&self, i_tau: usize, i_xi: usize) -> f64 {
        self.errors[i_tau * self.xis.len() + i_xi]
    }

    /// `(τ, |ξ|, m_f, error)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (f64, f64, Complex64, f64)> + '_ {
        let nx = self.xis.len();
        self.values
            .iter()
            .zip(&self.errors)
            .enumerate()
            .map(move |(idx, (v, e))| (self.taus[idx / nx], self.xis[idx % nx], *v, *e))
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_error(&self) -> f64 {
        self.errors.iter().copied().fold(0.0, f64::max)
    }

    /// Worst `|m_f(-τ,ξ) - conj m_f(τ,ξ)|` over mirrored τ pairs, and the
    /// largest error estimate among the entries involved.
    pub fn conjugate_asymmetry(&self) -> (f64, f64) {
        let mut worst = 0.0f64;
        let mut err = 0.0f64;
        for (i, &t) in self.taus.iter().enumerate() {
            let Some(k) = self.taus.iter().position(|&s| s == -t) else {
                continue;
            };
            for j in 0..self.xis.len() {
                worst = worst.max((self.get(k, j) - self.get(i, j).conj()).norm());
                err = err.max(self.error(i, j)).max(self.error(k, j));
            }
        }
        (worst, err)
    }

    /// CSV with columns `tau,xi_abs,re_mf,im_mf,err_estimate`.
    pub fn write_csv(&self, mut out: impl Write) -> io::Result<()> {
        writeln!(out, "tau,xi_abs,re_mf,im_mf,err_estimate")?;
        for (t, x, v, e) in self.entries() {
            writeln!(out, "{t:e},{x:e},{:e},{:e},{e:e}", v.re, v.im)?;
        }
        Ok(())
    }
}

/// Symmetric τ grid: zero and `n` log-spaced magnitudes in
/// `[tau_min, tau_max]`, mirrored.
pub fn default_tau_grid(tau_min: f64, tau_max: f64, n: usize) -> Vec<f64> {
    let pos: Vec<f64> = (0..n)
        .map(|i| {
            let s = if n > 1 { i as f64 / (n - 1) as f64 } else { 1.0 };
            tau_min * (tau_max / tau_min).powf(s)
        })
        .collect();
    let mut out: Vec<f64> = pos.iter().rev().map(|t| -t).collect();
    out.push(0.0);
    out.extend(pos);
    out
}

/// `n` evenly spaced radii on `[xi_min, xi_max]`.
pub fn default_xi_grid(xi_min: f64, xi_max: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![xi_min];
    }
    (0..n)
        .map(|i| xi_min + (xi_max - xi_min) * i as f64 / (n - 1) as f64)
        .collect()
}
