use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const MAX_DIM: usize = 4;

/// Parameters that fully determine a [`TorusGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub length: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn new(dim: usize, length: f64, points: usize) -> Self {
        Self { dim, length, points }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_DIM).contains(&self.dim) {
            return Err(Error::InvalidGrid(format!(
                "dimension {} outside 1..={MAX_DIM}",
                self.dim
            )));
        }
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "box length {} must be positive and finite",
                self.length
            )));
        }
        if self.points < 2 || !self.points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis {} must be a power of two >= 2",
                self.points
            )));
        }
        let total = (self.points as u128).pow(self.dim as u32);
        if total > (1u128 << 28) {
            return Err(Error::InvalidGrid(format!(
                "{}^{} lattice points is too large",
                self.points, self.dim
            )));
        }
        Ok(())
    }
}

struct GridInner {
    spec: GridSpec,
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// |ξ|² for every lattice index, in storage order.
    xi_sq: Vec<f64>,
}

/// Periodic lattice `[0, L)^d` with `N` points per axis and its dual
/// frequency lattice `ξ = (2π/L) k`, `k ∈ [-N/2, N/2)^d`.
///
/// Storage is row-major with axis 0 slowest. Cloning is cheap.
#[derive(Clone)]
pub struct TorusGrid {
    inner: Arc<GridInner>,
}

impl fmt::Debug for TorusGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TorusGrid")
            .field("dim", &self.dim())
            .field("length", &self.length())
            .field("points", &self.points())
            .finish()
    }
}

impl PartialEq for TorusGrid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.spec() == other.spec()
    }
}

impl TorusGrid {
    pub fn new(dim: usize, length: f64, points: usize) -> Result<Self> {
        Self::from_spec(GridSpec::new(dim, length, points))
    }

    pub fn from_spec(spec: GridSpec) -> Result<Self> {
        spec.validate()?;
        let len = spec.points.pow(spec.dim as u32);
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(spec.points);
        let inverse = planner.plan_fft_inverse(spec.points);
        let dk = 2.0 * PI / spec.length;
        let mut xi_sq = Vec::with_capacity(len);
        let mut idx = [0i64; MAX_DIM];
        for flat in 0..len {
            lattice_index_into(flat, spec.dim, spec.points, &mut idx);
            let s: f64 = idx[..spec.dim].iter().map(|&k| (k as f64 * dk).powi(2)).sum();
            xi_sq.push(s);
        }
        Ok(Self {
            inner: Arc::new(GridInner {
                spec,
                len,
                forward,
                inverse,
                xi_sq,
            }),
        })
    }

    pub fn spec(&self) -> GridSpec {
        self.inner.spec
    }

    pub fn dim(&self) -> usize {
        self.inner.spec.dim
    }

    pub fn length(&self) -> f64 {
        self.inner.spec.length
    }

    pub fn points(&self) -> usize {
        self.inner.spec.points
    }

    /// Total number of lattice points, `N^d`.
    pub fn len(&self) -> usize {
        self.inner.len
    }

    pub fn is_empty(&self) -> bool {
        self.inner.len == 0
    }

    pub fn spacing(&self) -> f64 {
        self.length() / self.points() as f64
    }

    /// Physical cell volume `(L/N)^d`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim() as i32)
    }

    pub fn volume(&self) -> f64 {
        self.length().powi(self.dim() as i32)
    }

    /// Frequency lattice spacing `2π/L`.
    pub fn freq_spacing(&self) -> f64 {
        2.0 * PI / self.length()
    }

    /// Frequency cell volume `(2π/L)^d`.
    pub fn freq_cell(&self) -> f64 {
        self.freq_spacing().powi(self.dim() as i32)
    }

    /// Largest resolved frequency per axis, `πN/L`.
    pub fn nyquist(&self) -> f64 {
        PI * self.points() as f64 / self.length()
    }

    /// Largest `|ξ|` present on the lattice (a corner of the frequency box).
    pub fn max_frequency(&self) -> f64 {
        self.nyquist() * (self.dim() as f64).sqrt()
    }

    /// Time after which free Schrödinger flow on this torus refocuses.
    pub fn recurrence_time(&self) -> f64 {
        self.length().powi(2) / (4.0 * PI)
    }

    /// Signed lattice index `k ∈ [-N/2, N/2)^d` of storage position `flat`.
    pub fn lattice_index(&self, flat: usize) -> [i64; MAX_DIM] {
        let mut idx = [0i64; MAX_DIM];
        lattice_index_into(flat, self.dim(), self.points(), &mut idx);
        idx
    }

    /// Storage position of the (wrapped) signed lattice index `k`.
    pub fn flat_index(&self, k: &[i64]) -> usize {
        let n = self.points() as i64;
        k.iter()
            .take(self.dim())
            .fold(0usize, |acc, &ki| acc * self.points() + ki.rem_euclid(n) as usize)
    }

    /// Frequency vector at storage position `flat` (unused axes are zero).
    pub fn frequency(&self, flat: usize) -> [f64; MAX_DIM] {
        let dk = self.freq_spacing();
        let k = self.lattice_index(flat);
        let mut xi = [0.0; MAX_DIM];
        for a in 0..self.dim() {
            xi[a] = k[a] as f64 * dk;
        }
        xi
    }

    /// Position of lattice point `flat` in `[0, L)^d`.
    pub fn position(&self, flat: usize) -> [f64; MAX_DIM] {
        let h = self.spacing();
        let n = self.points();
        let mut x = [0.0; MAX_DIM];
        let mut rem = flat;
        for a in (0..self.dim()).rev() {
            x[a] = (rem % n) as f64 * h;
            rem /= n;
        }
        x
    }

    /// `|ξ|²` for every lattice index.
    pub fn frequency_sq(&self) -> &[f64] {
        &self.inner.xi_sq
    }

    /// Integer `|k|²` of the lattice index; equal for every point of a frequency shell.
    pub fn lattice_norm_sq(&self, flat: usize) -> i64 {
        self.lattice_index(flat).iter().map(|k| k * k).sum()
    }

    pub fn frequency_abs(&self, flat: usize) -> f64 {
        self.inner.xi_sq[flat].sqrt()
    }

    /// Storage position of the lattice frequency nearest to `xi`.
    pub fn nearest_frequency(&self, xi: &[f64]) -> usize {
        let dk = self.freq_spacing();
        let half = (self.points() / 2) as i64;
        let k: Vec<i64> = (0..self.dim())
            .map(|a| {
                let v = xi.get(a).copied().unwrap_or(0.0);
                ((v / dk).round() as i64).clamp(-half, half - 1)
            })
            .collect();
        self.flat_index(&k)
    }

    /// In-place unnormalised multi-dimensional DFT.
    pub(crate) fn fft_in_place(&self, data: &mut [Complex64], forward: bool) {
        debug_assert_eq!(data.len(), self.len());
        let plan = if forward {
            &self.inner.forward
        } else {
            &self.inner.inverse
        };
        let n = self.points();
        let d = self.dim();
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        // Last axis is contiguous.
        for line in data.chunks_exact_mut(n) {
            plan.process_with_scratch(line, &mut scratch);
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for axis in 0..d.saturating_sub(1) {
            let stride = n.pow((d - 1 - axis) as u32);
            let block = stride * n;
            for base in (0..data.len()).step_by(block) {
                for off in 0..stride {
                    let start = base + off;
                    for (i, b) in buf.iter_mut().enumerate() {
                        *b = data[start + i * stride];
                    }
                    plan.process_with_scratch(&mut buf, &mut scratch);
                    for (i, b) in buf.iter().enumerate() {
                        data[start + i * stride] = *b;
                    }
                }
            }
        }
    }

    /// Physical values → continuum-normalised coefficients
    /// `f̂(ξ) = Σ_x f(x) e^{-iξ·x} Δx`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.fft_in_place(data, true);
        let scale = self.cell_volume();
        data.iter_mut().for_each(|c| *c *= scale);
    }

    /// Coefficients → physical values, `f(x) = V^{-1} Σ_ξ f̂(ξ) e^{iξ·x}`.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.fft_in_place(data, false);
        let scale = 1.0 / self.volume();
        data.iter_mut().for_each(|c| *c *= scale);
    }
}

fn lattice_index_into(flat: usize, dim: usize, n: usize, out: &mut [i64; MAX_DIM]) {
    let half = n / 2;
    let mut rem = flat;
    for a in (0..dim).rev() {
        let i = rem % n;
        rem /= n;
        out[a] = if i < half { i as i64 } else { i as i64 - n as i64 };
    }
    for o in out.iter_mut().skip(dim) {
        *o = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_specs() {
        assert!(TorusGrid::new(0, 1.0, 8).is_err());
        assert!(TorusGrid::new(5, 1.0, 8).is_err());
        assert!(TorusGrid::new(1, -1.0, 8).is_err());
        assert!(TorusGrid::new(1, 1.0, 12).is_err());
        assert!(TorusGrid::new(1, 1.0, 1).is_err());
    }

    #[test]
    fn lattice_indices_cover_symmetric_range() {
        let g = TorusGrid::new(2, 2.0 * PI, 8).unwrap();
        assert_eq!(g.len(), 64);
        assert_eq!(g.lattice_index(0), [0, 0, 0, 0]);
        assert_eq!(g.lattice_index(7), [0, -1, 0, 0]);
        assert_eq!(g.lattice_index(4 * 8 + 3), [-4, 3, 0, 0]);
        for flat in 0..g.len() {
            let k = g.lattice_index(flat);
            assert_eq!(g.flat_index(&k[..2]), flat);
        }
        assert!((g.frequency_sq()[8 + 1] - 2.0).abs() < 1e-15);
        assert!(g.nyquist() > 0.0);
    }

    #[test]
    fn nearest_frequency_rounds() {
        let g = TorusGrid::new(1, 16.0 * PI, 64).unwrap();
        let idx = g.nearest_frequency(&[3f64.sqrt()]);
        assert!((g.frequency(idx)[0] - 1.75).abs() < 1e-14);
    }
}
