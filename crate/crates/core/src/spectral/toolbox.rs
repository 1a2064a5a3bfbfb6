//! Randomised checks of the discrete toolbox: Parseval, the partition of
//! unity, Bernstein constants and Besov monotonicity.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::{
    bernstein_ratio, besov_norm_with, frequency_l2_norm, lebesgue_norm, sobolev_norm, LittlewoodPaley, SpectralField,
    TorusGrid,
};
use crate::Result;

/// Complex Gaussian coefficients with variance `⟨ξ⟩^{-2σ}`, zero mean mode.
pub fn random_field<R: Rng>(grid: &TorusGrid, rng: &mut R, sigma: f64) -> SpectralField {
    let coeffs: Vec<Complex64> = grid
        .frequency_sq()
        .iter()
        .enumerate()
        .map(|(i, k2)| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            if i == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(re, im) * (1.0 + k2).powf(-0.5 * sigma) * grid.volume().sqrt()
            }
        })
        .collect();
    SpectralField::from_coefficients(grid, coeffs).expect("length matches")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToolboxReport {
    pub seed: u64,
    /// `max |‖f‖_{L²} - ‖f̂‖| / ‖f‖` over the sampled fields.
    pub parseval_max_rel: f64,
    /// `max |Σ_j η_j(ξ) - 1|` over nonzero lattice frequencies.
    pub partition_max_err: f64,
    /// `(j, ratio)` for `a = ∞, b = 2`.
    pub bernstein: Vec<(i32, f64)>,
    pub bernstein_spread: f64,
    pub besov_trials: usize,
    pub besov_violations: usize,
    /// Range of `‖f‖_{H^s} / ‖f‖_{B_2^{0,s}}` over the sampled fields.
    pub sobolev_besov_ratio: (f64, f64),
}

/// Max of `|Σ_j η_j - 1|` over nonzero lattice points.
pub fn partition_error(grid: &TorusGrid) -> f64 {
    let lp = LittlewoodPaley::new(grid);
    let mut sum = vec![0.0; grid.len()];
    for j in lp.covering_range() {
        for (s, w) in sum.iter_mut().zip(lp.weights(j)) {
            *s += w;
        }
    }
    sum.iter().skip(1).map(|s| (s - 1.0).abs()).fold(0.0, f64::max)
}

pub fn parseval_rel_error(field: &SpectralField) -> f64 {
    let a = lebesgue_norm(field, 2.0);
    let b = frequency_l2_norm(field);
    if a == 0.0 {
        b
    } else {
        (a - b).abs() / a
    }
}

/// Runs the suite: `trials` random fields on `grid` for Parseval and Besov,
/// and a `d = 1` grid resolving blocks `-3..=3` for Bernstein.
pub fn run_toolbox(grid: &TorusGrid, trials: usize, seed: u64) -> Result<ToolboxReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lp = LittlewoodPaley::new(grid);
    let mut parseval = 0.0f64;
    let mut violations = 0usize;
    let mut ratio = (f64::INFINITY, 0.0f64);
    for _ in 0..trials {
        let sigma = rng.gen_range(0.0..2.0);
        let f = random_field(grid, &mut rng, sigma);
        parseval = parseval.max(parseval_rel_error(&f));
        let p = if rng.gen_bool(0.1) {
            f64::INFINITY
        } else {
            rng.gen_range(1.0..8.0)
        };
        let s1 = rng.gen_range(-2.0..2.0);
        let s2 = s1 + rng.gen_range(0.0..2.0);
        let t2 = rng.gen_range(-1.0..1.0);
        let t1 = t2 + rng.gen_range(0.0..2.0);
        let comp = [f.clone()];
        let lo = besov_norm_with(&lp, &comp, p, s2, t2).value;
        let hi = besov_norm_with(&lp, &comp, p, s1, t1).value;
        if lo > hi * (1.0 + 1e-12) {
            violations += 1;
        }
        let s = rng.gen_range(0.0..2.0);
        let r = sobolev_norm(&f, s, 2.0) / besov_norm_with(&lp, &comp, 2.0, 0.0, s).value;
        ratio = (ratio.0.min(r), ratio.1.max(r));
    }

    let line = TorusGrid::new(1, 32.0 * std::f64::consts::PI, 1024)?;
    let line_lp = LittlewoodPaley::new(&line);
    let mut bernstein = Vec::new();
    for j in -3..=3 {
        for _ in 0..4 {
            let f = line_lp.project(&random_field(&line, &mut rng, 0.0), j).field;
            bernstein.push((j, bernstein_ratio(&f, j, f64::INFINITY, 2.0)?));
        }
    }
    let max = bernstein.iter().map(|b| b.1).fold(0.0, f64::max);
    let min = bernstein.iter().map(|b| b.1).fold(f64::INFINITY, f64::min);

    Ok(ToolboxReport {
        seed,
        parseval_max_rel: parseval,
        partition_max_err: partition_error(grid),
        bernstein,
        bernstein_spread: max / min,
        besov_trials: trials,
        besov_violations: violations,
        sobolev_besov_ratio: ratio,
    })
}
