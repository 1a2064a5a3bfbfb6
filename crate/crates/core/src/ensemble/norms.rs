use num_complex::Complex64;
use serde::Serialize;

use crate::spectral::{
    apply_multiplier_table, besov_norm_with, bessel_weights, lebesgue_norm_of_magnitudes, LittlewoodPaley,
    SpectralField, TorusGrid,
};

/// Exponents of the perturbation norm in dimension `d`:
/// `s = d/2 - 1`, `p = 2(d+2)/d`, `q = 4d/(d+1)`, `r = (d+2)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaExponents {
    pub s: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub strichartz: f64,
}

impl ThetaExponents {
    pub fn for_dim(d: usize) -> Self {
        let d = d as f64;
        Self {
            s: d / 2.0 - 1.0,
            p: 2.0 * (d + 2.0) / d,
            q: 4.0 * d / (d + 1.0),
            r: (d + 2.0) / 2.0,
            strichartz: d + 2.0,
        }
    }
}

/// Spatial norms of `(Z, V)` at one time. `Z` norms are `L²_ω`-valued:
/// pointwise magnitudes are `(Σ_j |·_j|²)^{1/2}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormTable {
    pub time: f64,
    /// `‖Z‖_{H^s}`
    pub z_sobolev: f64,
    /// `‖Z‖_{L^{d+2}}`
    pub z_strichartz: f64,
    /// `‖Z‖_{W^{s,p}}`
    pub z_w_sp: f64,
    /// `‖Z‖_{B_q^{0,1/4}}`
    pub z_besov: f64,
    /// `‖V‖_{L^{(d+2)/2}}`
    pub v_lebesgue: f64,
}

fn pointwise_magnitude(grid: &TorusGrid, fields: &[SpectralField], weights: Option<&[Complex64]>) -> Vec<f64> {
    let mut acc = vec![0.0; grid.len()];
    for f in fields {
        let g;
        let vals = match weights {
            Some(w) => {
                g = apply_multiplier_table(f, w).expect("weights are finite");
                g.values()
            }
            None => f.values(),
        };
        for (a, v) in acc.iter_mut().zip(vals) {
            *a += v.norm_sqr();
        }
    }
    acc.into_iter().map(f64::sqrt).collect()
}

/// All spatial ingredients of the perturbation norm at time `time`.
pub fn norm_table(lp: &LittlewoodPaley, z: &[SpectralField], v: &[f64], time: f64) -> NormTable {
    let grid = lp.grid();
    let e = ThetaExponents::for_dim(grid.dim());
    let weights = bessel_weights(grid, e.s);
    let raw = pointwise_magnitude(grid, z, None);
    let smooth = pointwise_magnitude(grid, z, Some(&weights));
    let inv_v = 1.0 / grid.volume();
    let hs: f64 = z
        .iter()
        .map(|f| {
            f.coefficients()
                .iter()
                .zip(&weights)
                .map(|(c, w)| (c * w).norm_sqr())
                .sum::<f64>()
                * inv_v
        })
        .sum();
    let v_abs: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    NormTable {
        time,
        z_sobolev: hs.sqrt(),
        z_strichartz: lebesgue_norm_of_magnitudes(grid, &raw, e.strichartz),
        z_w_sp: lebesgue_norm_of_magnitudes(grid, &smooth, e.p),
        z_besov: if z.is_empty() {
            0.0
        } else {
            besov_norm_with(lp, z, e.q, 0.0, 0.25).value
        },
        v_lebesgue: lebesgue_norm_of_magnitudes(grid, &v_abs, e.r),
    }
}

/// Space-time norms over a sampled window, time integrals by the trapezoid rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaNorms {
    pub window: f64,
    /// `L^∞_t H^s`
    pub z_sobolev: f64,
    /// `L^{d+2}_{t,x}`
    pub z_strichartz: f64,
    /// `L^p_t W^{s,p}`
    pub z_w_sp: f64,
    /// `L^4_t B_q^{0,1/4}`
    pub z_besov: f64,
    /// `L^{(d+2)/2}_{t,x}`
    pub v_lebesgue: f64,
}

fn time_lp(times: &[f64], vals: &[f64], p: f64) -> f64 {
    if times.len() == 1 {
        return vals[0];
    }
    let mut acc = 0.0;
    for i in 1..times.len() {
        acc += 0.5 * (times[i] - times[i - 1]) * (vals[i].powf(p) + vals[i - 1].powf(p));
    }
    acc.powf(1.0 / p)
}

impl ThetaNorms {
    pub fn from_tables(dim: usize, tables: &[NormTable]) -> Self {
        let e = ThetaExponents::for_dim(dim);
        if tables.is_empty() {
            return Self {
                window: 0.0,
                z_sobolev: 0.0,
                z_strichartz: 0.0,
                z_w_sp: 0.0,
                z_besov: 0.0,
                v_lebesgue: 0.0,
            };
        }
        let t: Vec<f64> = tables.iter().map(|r| r.time).collect();
        let col = |f: fn(&NormTable) -> f64| tables.iter().map(f).collect::<Vec<f64>>();
        Self {
            window: t[t.len() - 1] - t[0],
            z_sobolev: col(|r| r.z_sobolev).into_iter().fold(0.0, f64::max),
            z_strichartz: time_lp(&t, &col(|r| r.z_strichartz), e.strichartz),
            z_w_sp: time_lp(&t, &col(|r| r.z_w_sp), e.p),
            z_besov: time_lp(&t, &col(|r| r.z_besov), 4.0),
            v_lebesgue: time_lp(&t, &col(|r| r.v_lebesgue), e.r),
        }
    }

    pub fn theta_z(&self) -> f64 {
        self.z_sobolev + self.z_strichartz + self.z_w_sp + self.z_besov
    }

    pub fn total(&self) -> f64 {
        self.theta_z() + self.v_lebesgue
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn norms_scale_linearly() {
        let g = TorusGrid::new(2, 2.0 * PI, 16).unwrap();
        let lp = LittlewoodPaley::new(&g);
        let z = vec![SpectralField::from_fn(&g, |x| {
            Complex64::new((x[0]).cos() * (-(x[1] - PI).powi(2)).exp(), x[1].sin())
        })];
        let a = norm_table(&lp, &z, &[], 0.0);
        let z3: Vec<_> = z.iter().map(|f| f.scaled(Complex64::new(3.0, 0.0))).collect();
        let b = norm_table(&lp, &z3, &[], 0.0);
        for (x, y) in [
            (a.z_sobolev, b.z_sobolev),
            (a.z_strichartz, b.z_strichartz),
            (a.z_w_sp, b.z_w_sp),
            (a.z_besov, b.z_besov),
        ] {
            assert!(x > 0.0 && (y / x - 3.0).abs() < 1e-12, "{x} {y}");
        }
    }

    #[test]
    fn constant_in_time_integrates_exactly() {
        let t: Vec<NormTable> = (0..5)
            .map(|i| NormTable {
                time: i as f64 * 0.25,
                z_sobolev: 1.0,
                z_strichartz: 1.0,
                z_w_sp: 1.0,
                z_besov: 1.0,
                v_lebesgue: 1.0,
            })
            .collect();
        let th = ThetaNorms::from_tables(1, &t);
        assert!((th.z_besov - 1.0).abs() < 1e-15 && (th.z_strichartz - 1.0).abs() < 1e-15);
    }
}
