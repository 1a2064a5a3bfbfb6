//! Dyadic Littlewood–Paley blocks on the torus.
//!
//! The raw profile `β` is a smooth bump equal to 1 on `[3/4, 3/2]` and
//! supported in `(1/2, 2)`. Block weights are normalised by the dyadic sum
//! `Σ_k β(2^{-k} r)`, so `Σ_j η_j(r) = 1` for every `r > 0`.

use std::ops::RangeInclusive;

use num_complex::Complex64;

use super::{SpectralField, TorusGrid};

/// `e^{-1/x}` smoothly glued to `e^{-1/(1-x)}`; 0 at 0, 1 at 1.
fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / x).exp();
    let b = (-1.0 / (1.0 - x)).exp();
    a / (a + b)
}

/// Unnormalised bump.
pub fn raw_bump(r: f64) -> f64 {
    if r <= 0.5 || r >= 2.0 {
        0.0
    } else if r < 0.75 {
        smooth_step((r - 0.5) / 0.25)
    } else if r <= 1.5 {
        1.0
    } else {
        smooth_step((2.0 - r) / 0.5)
    }
}

fn dyadic_sum(r: f64) -> f64 {
    let k0 = r.log2().floor() as i32;
    (k0 - 1..=k0 + 1).map(|k| raw_bump(r * (-k as f64).exp2())).sum()
}

/// Normalised profile `η(r)`.
pub fn profile(r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let b = raw_bump(r);
    if b == 0.0 {
        0.0
    } else {
        b / dyadic_sum(r)
    }
}

/// `η_j(r) = η(2^{-j} r)`.
pub fn block_weight(j: i32, r: f64) -> f64 {
    profile(r * (-j as f64).exp2())
}

/// Where a requested block sits relative to the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockStatus {
    /// Annulus lies inside `[2π/L, Nyquist]`.
    Resolved,
    /// Block touches lattice frequencies but its annulus is cut by the grid.
    Truncated,
    /// No lattice frequency falls in the annulus; the projection is zero.
    OutOfRange,
}

#[derive(Debug, Clone)]
pub struct Projection {
    pub j: i32,
    pub field: SpectralField,
    pub status: BlockStatus,
}

/// Littlewood–Paley decomposition bound to a grid.
#[derive(Debug, Clone)]
pub struct LittlewoodPaley {
    grid: TorusGrid,
    covering: RangeInclusive<i32>,
    resolvable: Option<RangeInclusive<i32>>,
}

impl LittlewoodPaley {
    pub fn new(grid: &TorusGrid) -> Self {
        let lo_freq = grid.freq_spacing();
        let hi_freq = grid.max_frequency();
        // blocks whose open annulus (2^{j-1}, 2^{j+1}) meets [lo_freq, hi_freq]
        let j_lo = (lo_freq.log2() - 1.0).floor() as i32 + 1;
        let j_hi = (hi_freq.log2() + 1.0).ceil() as i32 - 1;
        // blocks whose closed annulus sits inside [2π/L, Nyquist]
        let j_min = (lo_freq.log2() + 1.0 - 1e-12).ceil() as i32;
        let j_max = (grid.nyquist().log2() - 1.0 + 1e-12).floor() as i32;
        let resolvable = (j_min <= j_max).then_some(j_min..=j_max);
        Self {
            grid: grid.clone(),
            covering: j_lo..=j_hi,
            resolvable,
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    /// Every block index with nonzero weight somewhere on the lattice.
    pub fn covering_range(&self) -> RangeInclusive<i32> {
        self.covering.clone()
    }

    pub fn resolvable_range(&self) -> Option<RangeInclusive<i32>> {
        self.resolvable.clone()
    }

    pub fn status(&self, j: i32) -> BlockStatus {
        if self.resolvable.as_ref().is_some_and(|r| r.contains(&j)) {
            BlockStatus::Resolved
        } else if self.covering.contains(&j) {
            BlockStatus::Truncated
        } else {
            BlockStatus::OutOfRange
        }
    }

    /// `η_j(ξ)` in storage order.
    pub fn weights(&self, j: i32) -> Vec<f64> {
        let g = &self.grid;
        (0..g.len()).map(|i| block_weight(j, g.frequency_abs(i))).collect()
    }

    /// `f_j` with `f̂_j = η_j f̂`.
    pub fn project(&self, field: &SpectralField, j: i32) -> Projection {
        let status = self.status(j);
        if status == BlockStatus::OutOfRange {
            return Projection {
                j,
                field: SpectralField::zeros(field.grid()),
                status,
            };
        }
        let coeffs: Vec<Complex64> = field
            .coefficients()
            .iter()
            .zip(self.weights(j))
            .map(|(c, w)| c * w)
            .collect();
        Projection {
            j,
            field: SpectralField::from_coefficients(field.grid(), coeffs).expect("coefficient length matches grid"),
            status,
        }
    }

    /// All covering blocks in increasing `j`.
    pub fn decompose(&self, field: &SpectralField) -> Vec<Projection> {
        self.covering.clone().map(|j| self.project(field, j)).collect()
    }
}

/// Free-function form of [`LittlewoodPaley::project`].
pub fn lp_project(field: &SpectralField, j: i32) -> Projection {
    LittlewoodPaley::new(field.grid()).project(field, j)
}
