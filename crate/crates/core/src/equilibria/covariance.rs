//! The covariance profile `h(x) = ∫_{ℝ^d} |f(ξ)|² e^{iξ·x} dξ` (no `(2π)^{-d}`).
//!
//! Direct evaluation goes through a radial integral against the exact
//! angular kernel. For repeated use the profile is tabulated once on
//! Chebyshev panels out to the radius where it has decayed.

use rayon::prelude::*;

use super::Distribution;
use crate::quadrature::{integrate, uniform_breakpoints, QuadResult};
use crate::special::{radial_kernel, sphere_area};
use crate::{Error, Result};

const CHEB_ORDER: usize = 16;
/// Relative size below which `h` is considered to have decayed.
const DECAY_THRESHOLD: f64 = 1e-13;
const DECAYED_PANELS: usize = 6;
const DEFAULT_X_CAP: f64 = 120.0;

/// `h(|x|)` by adaptive radial quadrature.
pub fn eval_h(f: &Distribution, dim: usize, x: f64) -> QuadResult<f64> {
    let x = x.abs();
    let cutoff = f.cutoff();
    let mut bps = vec![0.0];
    bps.extend(f.breakpoints());
    if let Distribution::ZeroTempFermi { mu } = f {
        // integrate exactly up to the Fermi surface
        bps.retain(|b| *b < mu.sqrt());
    }
    bps.push(cutoff);
    let width = if x > 0.0 {
        (std::f64::consts::PI / x).min(cutoff / 4.0)
    } else {
        cutoff / 4.0
    };
    let mut all = vec![0.0];
    for w in bps.windows(2) {
        let seg = uniform_breakpoints(w[0], w[1], width);
        all.extend_from_slice(&seg[1..]);
    }
    let scale = sphere_area(dim) * f.eval_f2(0.0).max(f.eval_f2(0.5 * cutoff)).max(1e-300);
    let integrand = |r: f64| f.eval_f2(r) * r.powi(dim as i32 - 1) * radial_kernel(dim, r * x);
    integrate(integrand, &all, 1e-15 * scale, 1e-14, 20_000)
}

/// Chebyshev expansion of `h` on one panel `[a, a + w]`.
#[derive(Debug, Clone)]
struct ChebPanel {
    a: f64,
    w: f64,
    coeffs: [f64; CHEB_ORDER + 1],
}

impl ChebPanel {
    fn from_samples(a: f64, w: f64, samples: &[f64]) -> Self {
        let n = CHEB_ORDER;
        let mut coeffs = [0.0; CHEB_ORDER + 1];
        for (j, c) in coeffs.iter_mut().enumerate() {
            let mut s = 0.0;
            for (k, v) in samples.iter().enumerate() {
                let wk = if k == 0 || k == n { 0.5 } else { 1.0 };
                s += wk * v * ((j * k) as f64 * std::f64::consts::PI / n as f64).cos();
            }
            *c = 2.0 * s / n as f64;
        }
        coeffs[0] *= 0.5;
        coeffs[n] *= 0.5;
        Self { a, w, coeffs }
    }

    fn nodes(a: f64, w: f64) -> Vec<f64> {
        let n = CHEB_ORDER;
        (0..=n)
            .map(|k| a + 0.5 * w * (1.0 + (k as f64 * std::f64::consts::PI / n as f64).cos()))
            .collect()
    }

    fn clenshaw(coeffs: &[f64], u: f64) -> f64 {
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for &c in coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * u * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        u * b1 - b2 + coeffs[0]
    }

    fn local(&self, x: f64) -> f64 {
        2.0 * (x - self.a) / self.w - 1.0
    }

    fn eval(&self, x: f64) -> f64 {
        Self::clenshaw(&self.coeffs, self.local(x))
    }

    /// `k`-th derivative in `x`.
    fn derivative(&self, x: f64, k: usize) -> f64 {
        let mut c: Vec<f64> = self.coeffs.to_vec();
        for _ in 0..k {
            let n = c.len() - 1;
            let mut d = vec![0.0; n + 1];
            if n >= 1 {
                d[n - 1] = 2.0 * n as f64 * c[n];
                for j in (1..n).rev() {
                    let next = if j < n { d[j + 1] } else { 0.0 };
                    d[j - 1] = next + 2.0 * j as f64 * c[j];
                }
                d[0] *= 0.5;
            }
            c = d.into_iter().map(|v| v * 2.0 / self.w).collect();
        }
        Self::clenshaw(&c, self.local(x))
    }
}

/// Tabulated covariance profile of a distribution in dimension `d`.
#[derive(Debug, Clone)]
pub struct CovarianceProfile {
    dim: usize,
    h0: f64,
    panel_width: f64,
    panels: Vec<ChebPanel>,
    /// `sup_{x ≥ panel start} ⟨x⟩²|h(x)|`, per panel.
    weighted_tail_sup: Vec<f64>,
    decayed: bool,
    max_quad_error: f64,
    all_converged: bool,
}

impl CovarianceProfile {
    pub fn new(f: &Distribution, dim: usize) -> Result<Self> {
        Self::with_cap(f, dim, DEFAULT_X_CAP)
    }

    /// Tabulates until `h` has decayed or `x_cap` is reached.
    pub fn with_cap(f: &Distribution, dim: usize, x_cap: f64) -> Result<Self> {
        if !(1..=4).contains(&dim) {
            return Err(Error::InvalidParameter(format!("dimension {dim} outside 1..=4")));
        }
        let q0 = eval_h(f, dim, 0.0);
        let h0 = q0.value;
        let panel_width = (2.0 / f.cutoff()).min(0.5);
        let mut panels = Vec::new();
        let mut max_err = q0.error;
        let mut all_converged = q0.converged;
        let mut quiet = 0usize;
        let mut decayed = h0 == 0.0;
        // tabulate in batches so the panel loop parallelises
        let batch = 16;
        let mut next = 0usize;
        while !decayed && (next as f64) * panel_width < x_cap {
            let starts: Vec<f64> = (next..next + batch).map(|i| i as f64 * panel_width).collect();
            let built: Vec<(ChebPanel, f64, bool)> = starts
                .par_iter()
                .map(|&a| {
                    let nodes = ChebPanel::nodes(a, panel_width);
                    let mut err = 0.0f64;
                    let mut conv = true;
                    let vals: Vec<f64> = nodes
                        .iter()
                        .map(|&x| {
                            let q = eval_h(f, dim, x);
                            err = err.max(q.error);
                            conv &= q.converged;
                            q.value
                        })
                        .collect();
                    (ChebPanel::from_samples(a, panel_width, &vals), err, conv)
                })
                .collect();
            for (p, e, c) in built {
                max_err = max_err.max(e);
                all_converged &= c;
                let peak = ChebPanel::nodes(p.a, p.w)
                    .iter()
                    .map(|&x| p.eval(x).abs())
                    .fold(0.0, f64::max);
                panels.push(p);
                if peak <= DECAY_THRESHOLD * h0.abs() {
                    quiet += 1;
                    if quiet >= DECAYED_PANELS {
                        decayed = true;
                        break;
                    }
                } else {
                    quiet = 0;
                }
            }
            next += batch;
        }
        if decayed && !panels.is_empty() {
            let keep = panels.len().saturating_sub(DECAYED_PANELS - 1).max(1);
            panels.truncate(keep);
        }
        let mut weighted_tail_sup = vec![0.0; panels.len()];
        let mut running = 0.0f64;
        for (i, p) in panels.iter().enumerate().rev() {
            let local = (0..=64)
                .map(|k| {
                    let x = p.a + p.w * k as f64 / 64.0;
                    (1.0 + x * x) * p.eval(x).abs()
                })
                .fold(0.0, f64::max);
            running = running.max(local);
            weighted_tail_sup[i] = running;
        }
        Ok(Self {
            dim,
            h0,
            panel_width,
            panels,
            weighted_tail_sup,
            decayed,
            max_quad_error: max_err,
            all_converged,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `h(0) = ∫|f|²`.
    pub fn h0(&self) -> f64 {
        self.h0
    }

    /// End of the tabulated range; `h` is taken as zero beyond it.
    pub fn x_max(&self) -> f64 {
        self.panels.len() as f64 * self.panel_width
    }

    pub fn panel_width(&self) -> f64 {
        self.panel_width
    }

    /// Whether `h` fell below `1e-13·h(0)` inside the tabulated range.
    pub fn decayed(&self) -> bool {
        self.decayed
    }

    pub fn max_quadrature_error(&self) -> f64 {
        self.max_quad_error
    }

    pub fn quadrature_converged(&self) -> bool {
        self.all_converged
    }

    /// `h(|x|)` from the table.
    pub fn eval(&self, x: f64) -> f64 {
        let x = x.abs();
        let i = (x / self.panel_width) as usize;
        match self.panels.get(i) {
            Some(p) => p.eval(x),
            None => 0.0,
        }
    }

    /// `d^k h / dr^k` at radius `x ≥ 0`.
    pub fn derivative(&self, x: f64, k: usize) -> f64 {
        let i = (x.abs() / self.panel_width) as usize;
        match self.panels.get(i) {
            Some(p) => p.derivative(x.abs(), k),
            None => 0.0,
        }
    }

    /// `sup_{y ≥ x} ⟨y⟩²|h(y)|`; beyond the table this is the value at the table end
    /// when `h` did not decay, and zero when it did.
    pub fn weighted_sup_beyond(&self, x: f64) -> f64 {
        let i = (x.abs() / self.panel_width) as usize;
        match self.weighted_tail_sup.get(i) {
            Some(v) => *v,
            None if self.decayed => 0.0,
            None => self.weighted_tail_sup.last().copied().unwrap_or(0.0),
        }
    }

    /// Dense sample radii covering the table.
    pub fn sample_radii(&self, per_panel: usize) -> Vec<f64> {
        let n = self.panels.len() * per_panel;
        (0..=n).map(|i| self.x_max() * i as f64 / n.max(1) as f64).collect()
    }

    /// `∫_0^{x_max} φ(r) dr` of a function of the table, by panelwise Gauss–Kronrod.
    pub fn radial_integral(&self, phi: impl Fn(f64) -> f64) -> f64 {
        let bps: Vec<f64> = (0..=self.panels.len()).map(|i| i as f64 * self.panel_width).collect();
        if bps.len() < 2 {
            return 0.0;
        }
        integrate(phi, &bps, 0.0, 1e-12, 4 * bps.len()).value
    }
}

/// `h(x)` by direct quadrature.
pub fn eval_h_direct(f: &Distribution, dim: usize, x: f64) -> Result<QuadResult<f64>> {
    if !(1..=4).contains(&dim) {
        return Err(Error::InvalidParameter(format!("dimension {dim} outside 1..=4")));
    }
    let q = eval_h(f, dim, x);
    if !q.converged {
        return Err(Error::Quadrature { residual: q.error });
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_distribution_gives_zero() {
        let f = Distribution::zero();
        assert_eq!(eval_h(&f, 3, 1.3).value, 0.0);
        let p = CovarianceProfile::new(&f, 2).unwrap();
        assert_eq!(p.h0(), 0.0);
        assert_eq!(p.eval(0.7), 0.0);
    }

    #[test]
    fn gaussian_transform_in_two_dimensions() {
        // ∫ e^{-|ξ|²} e^{iξ·x} dξ = π e^{-|x|²/4}
        let f = Distribution::gaussian(1.0).unwrap();
        assert!((eval_h(&f, 2, 0.0).value - PI).abs() < 1e-12);
        let v = eval_h(&f, 2, 2.0).value;
        assert!((v - PI * (-1.0f64).exp()).abs() < 1e-10, "{v}");
    }

    #[test]
    fn gaussian_transform_all_dimensions() {
        let f = Distribution::gaussian(1.0).unwrap();
        for d in 1..=4 {
            for x in [0.0f64, 0.5, 1.7, 4.0] {
                let exact = PI.powf(d as f64 / 2.0) * (-x * x / 4.0).exp();
                let v = eval_h(&f, d, x).value;
                assert!((v - exact).abs() < 1e-11, "d={d} x={x}: {v} vs {exact}");
            }
        }
    }

    #[test]
    fn zero_temperature_closed_form_in_one_dimension() {
        // h(x) = 2 sin(√μ x)/x
        let mu = 1.7;
        let f = Distribution::zero_temp_fermi(mu).unwrap();
        for &x in &[0.3, 1.0, 5.0, 17.5] {
            let exact = 2.0 * (mu.sqrt() * x).sin() / x;
            let v = eval_h(&f, 1, x).value;
            assert!((v - exact).abs() < 1e-8, "x={x}");
        }
    }

    #[test]
    fn table_matches_direct_quadrature() {
        let f = Distribution::fermi(1.0, 0.0).unwrap();
        for d in [1, 4] {
            let p = CovarianceProfile::new(&f, d).unwrap();
            assert!(p.decayed());
            for i in 0..40 {
                let x = 0.37 * i as f64;
                let direct = eval_h(&f, d, x).value;
                assert!((p.eval(x) - direct).abs() < 1e-11 * p.h0(), "d={d} x={x}");
            }
            // evenness
            assert_eq!(p.eval(-1.3), p.eval(1.3));
        }
    }

    #[test]
    fn table_derivative_matches_gaussian() {
        let f = Distribution::gaussian(1.0).unwrap();
        let p = CovarianceProfile::new(&f, 3).unwrap();
        let c = PI.powf(1.5);
        for &x in &[0.2, 1.0, 3.3] {
            let h1 = -c * x / 2.0 * (-x * x / 4.0).exp();
            let h2 = c * (x * x / 4.0 - 0.5) * (-x * x / 4.0).exp();
            assert!((p.derivative(x, 1) - h1).abs() < 1e-9);
            assert!((p.derivative(x, 2) - h2).abs() < 1e-7);
        }
    }

    #[test]
    fn bounded_by_value_at_origin() {
        let f = Distribution::bose(1.0, -0.5).unwrap();
        let p = CovarianceProfile::new(&f, 3).unwrap();
        for x in p.sample_radii(4) {
            assert!(p.eval(x).abs() <= p.h0() * (1.0 + 1e-12));
        }
    }
}
