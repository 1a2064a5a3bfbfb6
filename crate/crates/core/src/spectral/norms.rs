use num_complex::Complex64;

use super::lp::{BlockStatus, LittlewoodPaley};
use super::{apply_multiplier_table, SpectralField, TorusGrid};
use crate::{Error, Result};

/// `(Σ_x m(x)^p Δx)^{1/p}` for nonnegative magnitudes; `p = ∞` is the lattice max.
pub fn lebesgue_norm_of_magnitudes(grid: &TorusGrid, mags: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return mags.iter().copied().fold(0.0, f64::max);
    }
    let dv = grid.cell_volume();
    if p == 2.0 {
        return (mags.iter().map(|m| m * m).sum::<f64>() * dv).sqrt();
    }
    let peak = mags.iter().copied().fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    // scale by the peak to keep large exponents in range
    let s: f64 = mags.iter().map(|m| (m / peak).powf(p)).sum();
    peak * (s * dv).powf(1.0 / p)
}

pub fn lebesgue_norm(field: &SpectralField, p: f64) -> f64 {
    let mags: Vec<f64> = field.values().iter().map(|v| v.norm()).collect();
    lebesgue_norm_of_magnitudes(field.grid(), &mags, p)
}

/// Frequency-side L² norm `((2π)^{-d} Σ_ξ |f̂(ξ)|² Δξ)^{1/2}`.
pub fn frequency_l2_norm(field: &SpectralField) -> f64 {
    let g = field.grid();
    let s: f64 = field.coefficients().iter().map(|c| c.norm_sqr()).sum();
    (s / g.volume()).sqrt()
}

/// `⟨ξ⟩^s` sampled in storage order.
pub fn bessel_weights(grid: &TorusGrid, s: f64) -> Vec<Complex64> {
    grid.frequency_sq()
        .iter()
        .map(|k2| Complex64::new((1.0 + k2).powf(0.5 * s), 0.0))
        .collect()
}

/// `‖⟨D⟩^s f‖_{L^p}`.
pub fn sobolev_norm(field: &SpectralField, s: f64, p: f64) -> f64 {
    let w = bessel_weights(field.grid(), s);
    let g = apply_multiplier_table(field, &w).expect("weights are finite");
    lebesgue_norm(&g, p)
}

/// Inhomogeneous Besov norm with the mass that fell outside the resolvable
/// block range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesovNorm {
    pub value: f64,
    /// `Σ ‖f_j‖²_{L²}` over covering blocks outside the resolvable range,
    /// plus the zero-frequency mass `|f̂(0)|²/V`.
    pub truncated_l2_mass: f64,
}

/// `(Σ_{j<0} 2^{2js}‖f_j‖²_{L^p} + Σ_{j≥0} 2^{2jt}‖f_j‖²_{L^p})^{1/2}` over
/// the resolvable blocks of the grid.
pub fn besov_norm(field: &SpectralField, p: f64, s: f64, t: f64) -> BesovNorm {
    let lp = LittlewoodPaley::new(field.grid());
    besov_norm_with(&lp, std::slice::from_ref(field), p, s, t)
}

/// Besov norm of an `L²_ω`-valued field given by its Gaussian components:
/// blocks are measured through `(Σ_k |Δ_j u_k|²)^{1/2}`.
pub fn besov_norm_with(lp: &LittlewoodPaley, components: &[SpectralField], p: f64, s: f64, t: f64) -> BesovNorm {
    let g = lp.grid();
    let mut acc = 0.0;
    let mut truncated = 0.0;
    for j in lp.covering_range() {
        let mut mags2 = vec![0.0; g.len()];
        for c in components {
            let fj = lp.project(c, j).field;
            for (m, v) in mags2.iter_mut().zip(fj.values()) {
                *m += v.norm_sqr();
            }
        }
        let mags: Vec<f64> = mags2.iter().map(|m| m.sqrt()).collect();
        match lp.status(j) {
            BlockStatus::Resolved => {
                let n = lebesgue_norm_of_magnitudes(g, &mags, p);
                let e = if j < 0 { s } else { t };
                acc += (2.0 * j as f64 * e).exp2() * n * n;
            }
            _ => {
                let n = lebesgue_norm_of_magnitudes(g, &mags, 2.0);
                truncated += n * n;
            }
        }
    }
    for c in components {
        truncated += c.coefficients()[0].norm_sqr() / g.volume();
    }
    BesovNorm {
        value: acc.sqrt(),
        truncated_l2_mass: truncated,
    }
}

/// `‖f_j‖_{L^a} / (2^{jd(1/b - 1/a)} ‖f_j‖_{L^b})` for the block-`j` part of `field`.
pub fn bernstein_ratio(field: &SpectralField, j: i32, a: f64, b: f64) -> Result<f64> {
    if !(a >= b && b >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "Bernstein exponents need a >= b >= 1, got a={a}, b={b}"
        )));
    }
    let fj = LittlewoodPaley::new(field.grid()).project(field, j).field;
    let num = lebesgue_norm(&fj, a);
    let den = lebesgue_norm(&fj, b);
    // rounding leaves ~1e-16 residue in blocks the field does not reach
    if den <= 1e-13 * lebesgue_norm(field, b) {
        return Err(Error::InvalidParameter(format!(
            "block {j} is empty; Bernstein ratio undefined"
        )));
    }
    let d = field.grid().dim() as f64;
    let inv_a = if a.is_infinite() { 0.0 } else { 1.0 / a };
    let scale = (j as f64 * d * (1.0 / b - inv_a)).exp2();
    Ok(num / (scale * den))
}
