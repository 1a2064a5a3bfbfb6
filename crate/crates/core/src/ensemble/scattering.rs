use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::PerturbationState;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatteringSettings {
    pub window: f64,
    pub dt: f64,
    /// Steps between probe samples.
    pub stride: usize,
    /// Ball for the local mass; `None` centres it in the box.
    pub ball_center: Option<Vec<f64>>,
    pub ball_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatteringReport {
    pub times: Vec<f64>,
    /// `‖S(-t_{n+1})Z(t_{n+1}) - S(-t_n)Z(t_n)‖_{L²}` for consecutive samples.
    pub cauchy: Vec<f64>,
    /// `∫_B E|Z|²` at each sample.
    pub local_mass: Vec<f64>,
    /// `max_n ‖S(-t_n)Z(t_n) - Z(0)‖_{L²}`
    pub profile_drift: f64,
    pub cauchy_decreasing: bool,
    pub local_mass_decreasing: bool,
    pub recurrence_time: f64,
    pub warning: Option<String>,
}

fn non_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] <= w[0])
}

/// Evolves the perturbed state over the window and records the pulled-back
/// profile `S(-t)Z(t)` and the local mass of `Z`.
pub fn scattering_probe(state: &PerturbationState, settings: &ScatteringSettings) -> Result<ScatteringReport> {
    if !(settings.window > 0.0 && settings.dt > 0.0 && settings.ball_radius > 0.0) {
        return Err(Error::InvalidParameter(
            "window, dt and ball radius must be positive".into(),
        ));
    }
    let mut s = state.clone();
    let grid = s.ensemble().grid().clone();
    let d = grid.dim();
    let l = grid.length();
    let center = match &settings.ball_center {
        Some(c) if c.len() == d => c.clone(),
        Some(_) => return Err(Error::InvalidParameter(format!("ball center needs {d} components"))),
        None => vec![0.5 * l; d],
    };
    let in_ball: Vec<bool> = (0..grid.len())
        .map(|i| {
            let x = grid.position(i);
            let r2: f64 = (0..d)
                .map(|a| {
                    let mut dx = (x[a] - center[a]).rem_euclid(l);
                    if dx > 0.5 * l {
                        dx -= l;
                    }
                    dx * dx
                })
                .sum();
            r2 <= settings.ball_radius * settings.ball_radius
        })
        .collect();
    let mass = s.ensemble().mass();
    let t0 = s.ensemble().time();
    let inv_v = 1.0 / grid.volume();
    let dv = grid.cell_volume();

    // S(-t)Z(t) in continuum Fourier coefficients, one vector per mode
    let pull_back = |s: &PerturbationState| -> (Vec<Vec<Complex64>>, f64) {
        let t = s.ensemble().time() - t0;
        let z = s.deviations();
        let local: f64 = z
            .iter()
            .map(|f| {
                f.values()
                    .iter()
                    .zip(&in_ball)
                    .filter(|(_, b)| **b)
                    .map(|(v, _)| v.norm_sqr())
                    .sum::<f64>()
                    * dv
            })
            .sum();
        let coeffs = z
            .par_iter()
            .map(|f| {
                f.coefficients()
                    .iter()
                    .zip(grid.frequency_sq())
                    .map(|(c, k2)| c * Complex64::from_polar(1.0, t * (mass + k2)))
                    .collect()
            })
            .collect();
        (coeffs, local)
    };
    let l2_dist = |a: &[Vec<Complex64>], b: &[Vec<Complex64>]| -> f64 {
        let s: f64 = a
            .iter()
            .zip(b)
            .map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>())
            .sum();
        (s * inv_v).sqrt()
    };

    let steps = ((settings.window / settings.dt) - 1e-9).ceil().max(1.0) as usize;
    let h = settings.window / steps as f64;
    let stride = settings.stride.max(1);
    let (first, m0) = pull_back(&s);
    let mut prev = first.clone();
    let mut times = vec![0.0];
    let mut local_mass = vec![m0];
    let mut cauchy = Vec::new();
    let mut drift = 0.0f64;
    for n in 1..=steps {
        s.ensemble_mut().step(h)?;
        if n % stride == 0 || n == steps {
            let (cur, m) = pull_back(&s);
            cauchy.push(l2_dist(&cur, &prev));
            drift = drift.max(l2_dist(&cur, &first));
            times.push(n as f64 * h);
            local_mass.push(m);
            prev = cur;
        }
    }
    let recurrence_time = l * l / (4.0 * PI);
    let warning = (settings.window > recurrence_time).then(|| {
        format!(
            "window {} exceeds the recurrence time {recurrence_time:.3}; torus effects dominate",
            settings.window
        )
    });
    Ok(ScatteringReport {
        cauchy_decreasing: non_increasing(&cauchy),
        local_mass_decreasing: non_increasing(&local_mass),
        times,
        cauchy,
        local_mass,
        profile_drift: drift,
        recurrence_time,
        warning,
    })
}
