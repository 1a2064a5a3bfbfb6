//! Fixed-point iteration for the perturbation around an equilibrium:
//!
//! ```text
//! Z_j(t) = S(t)Z_j(0) - i ∫_0^t S(t-s) [(w*V)(Y_j + Z_j)](s) ds
//! V(t)   = Σ_j |Z_j|² + 2 Re Σ_j Ȳ_j Z_j
//! ```
//!
//! with `S(t) = e^{-it(m - Δ)}`. One sweep maps `(Z^k, V^k)` to
//! `(Z^{k+1}, Σ|Z^k|² + 2Re ΣȲZ^{k+1})`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::norms::{norm_table, ThetaNorms};
use super::PerturbationState;
use crate::spectral::SpectralField;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PicardSettings {
    pub window: f64,
    /// Spacing of the time lattice carrying the trapezoid rule.
    pub dt: f64,
    pub max_iterations: usize,
    /// Stop once `Θ(X_{k+1} - X_k) ≤ tolerance · Θ(X_{k+1})`.
    pub tolerance: f64,
}

impl Default for PicardSettings {
    fn default() -> Self {
        Self {
            window: 1.0,
            dt: 0.01,
            max_iterations: 12,
            tolerance: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PicardIterate {
    pub iteration: usize,
    /// `Θ(X_k - X_{k-1})`
    pub difference: f64,
    /// `Θ(X_k)`
    pub theta: f64,
    /// `Θ(X_k - X_{k-1}) / Θ(X_{k-1} - X_{k-2})`
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PicardReport {
    pub settings: PicardSettings,
    pub iterates: Vec<PicardIterate>,
    pub converged: bool,
    /// Ratio above one for three consecutive iterates.
    pub diverged: bool,
    pub times: Vec<f64>,
    #[serde(skip)]
    pub z: Vec<Vec<SpectralField>>,
    #[serde(skip)]
    pub v: Vec<Vec<f64>>,
}

impl PicardReport {
    pub fn ratios(&self) -> Vec<f64> {
        self.iterates.iter().filter_map(|i| i.ratio).collect()
    }

    /// Sup over the lattice of `|Z_picard - Z_split|`, with the split-step
    /// solver taking `substeps` steps per lattice interval.
    pub fn compare_with_split_step(&self, state: &PerturbationState, substeps: usize) -> Result<f64> {
        let mut s = state.clone();
        let h = self.settings.dt / substeps.max(1) as f64;
        let mut worst = diff_sup(&self.z[0], &s.deviations());
        for n in 1..self.times.len() {
            for _ in 0..substeps.max(1) {
                s.ensemble_mut().step(h)?;
            }
            worst = worst.max(diff_sup(&self.z[n], &s.deviations()));
        }
        Ok(worst)
    }
}

fn diff_sup(a: &[SpectralField], b: &[SpectralField]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.max_abs_diff(y)).fold(0.0, f64::max)
}

fn theta_of(state: &PerturbationState, times: &[f64], z: &[Vec<SpectralField>], v: &[Vec<f64>]) -> f64 {
    let lp = state.littlewood_paley();
    let tables: Vec<_> = times
        .par_iter()
        .enumerate()
        .map(|(n, &t)| norm_table(lp, &z[n], &v[n], t))
        .collect();
    ThetaNorms::from_tables(lp.grid().dim(), &tables).total()
}

/// Iterates the fixed-point map from `(0, 0)` with `Z(0)` taken from `state`.
pub fn picard_iterate(state: &PerturbationState, settings: &PicardSettings) -> Result<PicardReport> {
    if !(settings.window > 0.0 && settings.dt > 0.0) {
        return Err(Error::InvalidParameter(
            "Picard window and step must be positive".into(),
        ));
    }
    let e = state.ensemble();
    let grid = e.grid();
    let npts = grid.len();
    let nm = e.len();
    let steps = ((settings.window / settings.dt) - 1e-9).ceil().max(1.0) as usize;
    let dt = settings.window / steps as f64;
    let t0 = e.time();
    let times: Vec<f64> = (0..=steps).map(|n| n as f64 * dt).collect();
    let inv_n = 1.0 / npts as f64;
    let mass = e.mass();
    let propagator = |t: f64| -> Vec<Complex64> {
        grid.frequency_sq()
            .iter()
            .map(|k2| Complex64::from_polar(1.0, -t * (mass + k2)))
            .collect()
    };
    let s_dt = propagator(dt);

    let z0_hat: Vec<Vec<Complex64>> = state
        .deviations()
        .into_iter()
        .map(|z| {
            let mut v = z.into_values();
            grid.fft_in_place(&mut v, true);
            v
        })
        .collect();
    // Y_j(t_n) = Y_j(t0) e^{-i(m+|ξ_j|²)t_n}
    let y0: Vec<Vec<Complex64>> = (0..nm).map(|j| e.equilibrium_field(j, t0)).collect();
    let y_phase: Vec<f64> = e
        .modes()
        .iter()
        .map(|m| mass + m.xi[..grid.dim()].iter().map(|x| x * x).sum::<f64>())
        .collect();

    let mut z: Vec<Vec<SpectralField>> = vec![vec![SpectralField::zeros(grid); nm]; steps + 1];
    let mut v: Vec<Vec<f64>> = vec![vec![0.0; npts]; steps + 1];
    let mut iterates = Vec::new();
    let mut prev_diff: Option<f64> = None;
    let mut above_one = 0usize;
    let mut converged = false;
    let mut diverged = false;

    for k in 1..=settings.max_iterations {
        let wv: Vec<Vec<f64>> = v.par_iter().map(|vn| e.convolve(vn)).collect();
        // per mode, march the recursive trapezoid along the lattice
        let new_z_by_mode: Vec<Vec<Vec<Complex64>>> = (0..nm)
            .into_par_iter()
            .map(|j| {
                let mut out = Vec::with_capacity(steps + 1);
                let mut integral = vec![Complex64::new(0.0, 0.0); npts];
                let mut prev_f: Vec<Complex64> = Vec::new();
                for n in 0..=steps {
                    let ph = Complex64::from_polar(1.0, -y_phase[j] * times[n]);
                    let zn = z[n][j].values();
                    let mut f: Vec<Complex64> = (0..npts).map(|i| (y0[j][i] * ph + zn[i]) * wv[n][i]).collect();
                    grid.fft_in_place(&mut f, true);
                    if n > 0 {
                        for i in 0..npts {
                            integral[i] = s_dt[i] * (integral[i] + 0.5 * dt * prev_f[i]) + 0.5 * dt * f[i];
                        }
                    }
                    let s_t = propagator(times[n]);
                    let mut zh: Vec<Complex64> = (0..npts)
                        .map(|i| (s_t[i] * z0_hat[j][i] - Complex64::i() * integral[i]) * inv_n)
                        .collect();
                    grid.fft_in_place(&mut zh, false);
                    out.push(zh);
                    prev_f = f;
                }
                out
            })
            .collect();
        let new_z: Vec<Vec<SpectralField>> = (0..=steps)
            .map(|n| {
                (0..nm)
                    .map(|j| SpectralField::from_values_unchecked(grid, new_z_by_mode[j][n].clone()))
                    .collect()
            })
            .collect();
        let new_v: Vec<Vec<f64>> = (0..=steps)
            .into_par_iter()
            .map(|n| {
                (0..npts)
                    .map(|i| {
                        let mut acc = 0.0;
                        for j in 0..nm {
                            let y = y0[j][i] * Complex64::from_polar(1.0, -y_phase[j] * times[n]);
                            acc += z[n][j].values()[i].norm_sqr() + 2.0 * (y.conj() * new_z[n][j].values()[i]).re;
                        }
                        acc
                    })
                    .collect()
            })
            .collect();

        let dz: Vec<Vec<SpectralField>> = new_z
            .iter()
            .zip(&z)
            .map(|(a, b)| {
                a.iter()
                    .zip(b)
                    .map(|(x, y)| {
                        x.combine(Complex64::new(1.0, 0.0), y, Complex64::new(-1.0, 0.0))
                            .expect("same grid")
                    })
                    .collect()
            })
            .collect();
        let dv: Vec<Vec<f64>> = new_v
            .iter()
            .zip(&v)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
            .collect();
        let difference = theta_of(state, &times, &dz, &dv);
        let theta = theta_of(state, &times, &new_z, &new_v);
        if !(difference.is_finite() && theta.is_finite()) {
            return Err(Error::NonFiniteState { time: t0, mode: 0 });
        }
        let ratio = prev_diff.filter(|&p| p > 0.0).map(|p| difference / p);
        iterates.push(PicardIterate {
            iteration: k,
            difference,
            theta,
            ratio,
        });
        z = new_z;
        v = new_v;
        if difference <= settings.tolerance * theta || difference == 0.0 {
            converged = true;
            break;
        }
        if ratio.is_some_and(|r| r > 1.0) {
            above_one += 1;
            if above_one >= 3 {
                diverged = true;
                break;
            }
        } else {
            above_one = 0;
        }
        prev_diff = Some(difference);
    }

    Ok(PicardReport {
        settings: PicardSettings { dt, ..*settings },
        iterates,
        converged,
        diverged,
        times,
        z,
        v,
    })
}
