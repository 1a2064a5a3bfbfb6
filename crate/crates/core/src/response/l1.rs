use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::mf_from_profile;
use crate::equilibria::{CovarianceProfile, Potential};
use crate::spectral::{SpectralField, TorusGrid};
use crate::{Error, Result};

/// Coefficient magnitude below which a frequency shell is skipped in the
/// frequency-domain route.
const NEGLIGIBLE: f64 = 1e-300;

fn check_series(v: &[SpectralField], dt: f64) -> Result<TorusGrid> {
    let first = v
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty time series".into()))?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("time step must be positive, got {dt}")));
    }
    let grid = first.grid().clone();
    if v.iter().any(|f| f.grid() != &grid) {
        return Err(Error::GridMismatch);
    }
    Ok(grid)
}

/// Lattice points grouped by shell `|k|²`, with the shell radius.
fn shells(grid: &TorusGrid) -> BTreeMap<i64, (f64, Vec<usize>)> {
    let mut out: BTreeMap<i64, (f64, Vec<usize>)> = BTreeMap::new();
    for i in 0..grid.len() {
        out.entry(grid.lattice_norm_sq(i))
            .or_insert_with(|| (grid.frequency_abs(i), Vec::new()))
            .1
            .push(i);
    }
    out
}

/// `L_1 V` on the time lattice `t_n = n·dt` by trapezoidal causal convolution
/// with the kernel `-2ŵ(ξ) sin(|ξ|²t) h(2|ξ|t)`.
pub fn apply_l1_time_domain(
    v: &[SpectralField],
    dt: f64,
    profile: &CovarianceProfile,
    w: &Potential,
) -> Result<Vec<SpectralField>> {
    let grid = check_series(v, dt)?;
    let nt = v.len();
    let coeffs: Vec<&[Complex64]> = v.iter().map(|f| f.coefficients()).collect();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); grid.len()]; nt];
    for (rho, idx) in shells(&grid).into_values() {
        let what = w.hat(rho);
        if rho == 0.0 || what == 0.0 || profile.h0() == 0.0 {
            continue;
        }
        let kernel: Vec<f64> = (0..nt)
            .map(|m| {
                let t = m as f64 * dt;
                -2.0 * what * (rho * rho * t).sin() * profile.eval(2.0 * rho * t)
            })
            .collect();
        let columns: Vec<Vec<Complex64>> = idx
            .par_iter()
            .map(|&k| {
                (0..nt)
                    .map(|n| {
                        if n == 0 {
                            return Complex64::new(0.0, 0.0);
                        }
                        let mut s = coeffs[0][k] * (0.5 * kernel[n]);
                        for j in 1..n {
                            s += coeffs[j][k] * kernel[n - j];
                        }
                        s * dt
                    })
                    .collect()
            })
            .collect();
        for (&k, col) in idx.iter().zip(columns) {
            for (n, c) in col.into_iter().enumerate() {
                out[n][k] = c;
            }
        }
    }
    out.into_iter()
        .map(|c| SpectralField::from_coefficients(&grid, c))
        .collect()
}

/// `L_1 V` as the space-time multiplier `ŵ m_f`: zero-pad `V` in time by
/// `pad` (rounded up to a power of two), transform, multiply, transform back.
///
/// Treats `V` as zero outside the sampled window, so it agrees with the
/// causal convolution when `V` is smooth and vanishes near the window ends.
pub fn apply_l1_frequency_domain(
    v: &[SpectralField],
    dt: f64,
    profile: &CovarianceProfile,
    w: &Potential,
    pad: usize,
) -> Result<Vec<SpectralField>> {
    let grid = check_series(v, dt)?;
    let nt = v.len();
    let m = (nt * pad.max(2)).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    let period = m as f64 * dt;
    let taus: Vec<f64> = (0..m)
        .map(|q| {
            let q = if q < m / 2 { q as i64 } else { q as i64 - m as i64 };
            2.0 * std::f64::consts::PI * q as f64 / period
        })
        .collect();
    let coeffs: Vec<&[Complex64]> = v.iter().map(|f| f.coefficients()).collect();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); grid.len()]; nt];
    for (rho, idx) in shells(&grid).into_values() {
        let what = w.hat(rho);
        if rho == 0.0 || what == 0.0 || profile.h0() == 0.0 {
            continue;
        }
        let active: Vec<usize> = idx
            .into_iter()
            .filter(|&k| coeffs.iter().any(|c| c[k].norm() > NEGLIGIBLE))
            .collect();
        if active.is_empty() {
            continue;
        }
        let symbol: Vec<Complex64> = taus
            .par_iter()
            .map(|&tau| mf_from_profile(profile, tau, rho).value * what)
            .collect();
        for k in active {
            let mut buf = vec![Complex64::new(0.0, 0.0); m];
            for n in 0..nt {
                buf[n] = coeffs[n][k];
            }
            fwd.process(&mut buf);
            for (b, s) in buf.iter_mut().zip(&symbol) {
                *b *= s;
            }
            inv.process(&mut buf);
            for n in 0..nt {
                out[n][k] = buf[n] / m as f64;
            }
        }
    }
    out.into_iter()
        .map(|c| SpectralField::from_coefficients(&grid, c))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::Distribution;

    fn series(grid: &TorusGrid, nt: usize, dt: f64, amp: f64) -> Vec<SpectralField> {
        (0..nt)
            .map(|n| {
                let t = n as f64 * dt;
                let env = amp * (-(t - 1.0).powi(2) * 8.0).exp();
                SpectralField::from_fn(grid, |x| Complex64::new(env * x[0].cos(), 0.0))
            })
            .collect()
    }

    #[test]
    fn zero_inputs_give_zero() {
        let g = TorusGrid::new(1, 2.0 * std::f64::consts::PI, 8).unwrap();
        let p = CovarianceProfile::new(&Distribution::fermi(1.0, 0.0).unwrap(), 1).unwrap();
        let w = Potential::delta(1.0).unwrap();
        let out = apply_l1_time_domain(&series(&g, 20, 0.1, 0.0), 0.1, &p, &w).unwrap();
        assert!(out.iter().all(|f| f.max_abs() == 0.0));
        let z = CovarianceProfile::new(&Distribution::zero(), 1).unwrap();
        let out = apply_l1_time_domain(&series(&g, 20, 0.1, 1.0), 0.1, &z, &w).unwrap();
        assert!(out.iter().all(|f| f.max_abs() == 0.0));
    }

    #[test]
    fn causal_output_vanishes_at_start() {
        let g = TorusGrid::new(1, 2.0 * std::f64::consts::PI, 8).unwrap();
        let p = CovarianceProfile::new(&Distribution::gaussian(1.0).unwrap(), 1).unwrap();
        let w = Potential::delta(1.0).unwrap();
        let out = apply_l1_time_domain(&series(&g, 50, 0.05, 1.0), 0.05, &p, &w).unwrap();
        assert_eq!(out[0].max_abs(), 0.0);
        assert!(out[49].max_abs() > 0.0);
    }
}
