//! Linearisation around two counter-propagating plane waves
//! `√m e^{-i(|ξ|²+m)t}(g_1 e^{iξ·x} + g_2 e^{-iξ·x})`.
//!
//! Writing the two projected perturbations as `ε_1 = u_1 + iu_2`,
//! `ε_2 = u_3 + iu_4`, the linear system is `∂_t u = A u` with
//!
//! ```text
//!     ( -2ξ·∇      -Δ     0        0    )
//! A = ( Δ - mw*   -2ξ·∇  -mw*      0    )
//!     (   0         0     2ξ·∇    -Δ    )
//!     ( -mw*        0     Δ - mw*  2ξ·∇ )
//! ```
//!
//! whose symbol at frequency `k` follows from `∇ → ik`, `Δ → -|k|²`, `w* → ŵ(k)`.

use nalgebra::Matrix4;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::equilibria::Potential;
use crate::response::linear_fit;
use crate::spectral::TorusGrid;
use crate::{Error, Result};

const SCHUR_EPS: f64 = 1e-15;
const SCHUR_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone)]
pub struct TwoWaveParams {
    dim: usize,
    xi: Vec<f64>,
    mass: f64,
    potential: Potential,
}

impl TwoWaveParams {
    pub fn new(xi: &[f64], mass: f64, potential: Potential) -> Result<Self> {
        if !(1..=4).contains(&xi.len()) {
            return Err(Error::InvalidParameter(format!(
                "carrier dimension {} outside 1..=4",
                xi.len()
            )));
        }
        if !(mass >= 0.0 && mass.is_finite()) {
            return Err(Error::InvalidParameter(format!("mass must be >= 0, got {mass}")));
        }
        if xi.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("carrier frequency not finite".into()));
        }
        Ok(Self {
            dim: xi.len(),
            xi: xi.to_vec(),
            mass,
            potential,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn xi_abs(&self) -> f64 {
        self.xi.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// The symbol `m_A(k)` with the shorthands `a² = -4(ξ·k)²`, `b = |k|²`, `c = mŵ(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolMatrix {
    pub k: Vec<f64>,
    pub matrix: Matrix4<Complex64>,
    pub a2: f64,
    pub b: f64,
    pub c: f64,
}

impl SymbolMatrix {
    /// Coefficients `(p, q)` of `P(X) = X⁴ + 2pX² + q`.
    pub fn poly_coefficients(&self) -> (f64, f64) {
        let (a2, b, c) = (self.a2, self.b, self.c);
        let p = (b + c) * b - a2;
        // ((b+c)b + a²)² - b²c², factored to keep the sign exact on the ray
        let q = (b * b + a2) * (b * b + 2.0 * b * c + a2);
        (p, q)
    }

    /// `|P(λ)|` relative to the size of its terms.
    pub fn poly_residual(&self, lambda: Complex64) -> f64 {
        let (p, q) = self.poly_coefficients();
        let l2 = lambda * lambda;
        let val = l2 * l2 + l2 * (2.0 * p) + q;
        let scale = (l2.norm_sqr()).max(2.0 * p.abs() * l2.norm()).max(q.abs()).max(1.0);
        val.norm() / scale
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn build_symbol(params: &TwoWaveParams, k: &[f64]) -> Result<SymbolMatrix> {
    if k.len() != params.dim {
        return Err(Error::InvalidParameter(format!(
            "probe frequency has dimension {}, carrier has {}",
            k.len(),
            params.dim
        )));
    }
    let xk = dot(&params.xi, k);
    let b = dot(k, k);
    let c = params.mass * params.potential.hat(b.sqrt());
    let alpha = Complex64::new(0.0, 2.0 * xk);
    let z = Complex64::new(0.0, 0.0);
    let re = |v: f64| Complex64::new(v, 0.0);
    #[rustfmt::skip]
    let matrix = Matrix4::new(
        -alpha,        re(b),  z,             z,
        re(-b - c),    -alpha, re(-c),        z,
        z,             z,      alpha,         re(b),
        re(-c),        z,      re(-b - c),    alpha,
    );
    Ok(SymbolMatrix {
        k: k.to_vec(),
        matrix,
        a2: -4.0 * xk * xk,
        b,
        c,
    })
}

/// Principal square root, exact on the real axis.
fn principal_sqrt(y: Complex64) -> Complex64 {
    if y.im == 0.0 {
        if y.re >= 0.0 {
            Complex64::new(y.re.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, (-y.re).sqrt())
        }
    } else {
        y.sqrt()
    }
}

/// The roots `±√𝒴_±` of `X⁴ + 2pX² + q`, ordered `[√𝒴_1, -√𝒴_1, √𝒴_2, -√𝒴_2]`.
///
/// `𝒴_1 = -p - sgn(p)√D²` and `𝒴_2 = q/𝒴_1` avoid cancellation between `p`
/// and `√D²`, where `D² = p² - q = b(bc² - 4(b+c)a²)`.
pub fn closed_form_spectrum(params: &TwoWaveParams, k: &[f64]) -> Result<[Complex64; 4]> {
    Ok(spectrum_of(&build_symbol(params, k)?))
}

pub fn spectrum_of(sym: &SymbolMatrix) -> [Complex64; 4] {
    let (p, q) = sym.poly_coefficients();
    let (a2, b, c) = (sym.a2, sym.b, sym.c);
    let d2 = b * (b * c * c - 4.0 * (b + c) * a2);
    let root_d = principal_sqrt(Complex64::new(d2, 0.0));
    let sign = if p >= 0.0 { 1.0 } else { -1.0 };
    let y1 = Complex64::new(-p, 0.0) - root_d * sign;
    let y2 = if y1.norm() == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        Complex64::new(q, 0.0) / y1
    };
    let x1 = principal_sqrt(y1);
    let x2 = principal_sqrt(y2);
    [x1, -x1, x2, -x2]
}

/// Spectrum of the explicit matrix by complex Schur decomposition.
pub fn eigensolver_spectrum(params: &TwoWaveParams, k: &[f64]) -> Result<[Complex64; 4]> {
    matrix_spectrum(&build_symbol(params, k)?.matrix)
}

pub fn matrix_spectrum(m: &Matrix4<Complex64>) -> Result<[Complex64; 4]> {
    let schur = m.try_schur(SCHUR_EPS, SCHUR_MAX_ITER).ok_or(Error::Eigensolver)?;
    let ev = schur.eigenvalues().ok_or(Error::Eigensolver)?;
    if ev.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::Eigensolver);
    }
    Ok([ev[0], ev[1], ev[2], ev[3]])
}

/// Smallest over pairings of the largest pairwise distance.
pub fn multiset_distance(a: &[Complex64; 4], b: &[Complex64; 4]) -> f64 {
    const PERMS: [[usize; 4]; 24] = [
        [0, 1, 2, 3],
        [0, 1, 3, 2],
        [0, 2, 1, 3],
        [0, 2, 3, 1],
        [0, 3, 1, 2],
        [0, 3, 2, 1],
        [1, 0, 2, 3],
        [1, 0, 3, 2],
        [1, 2, 0, 3],
        [1, 2, 3, 0],
        [1, 3, 0, 2],
        [1, 3, 2, 0],
        [2, 0, 1, 3],
        [2, 0, 3, 1],
        [2, 1, 0, 3],
        [2, 1, 3, 0],
        [2, 3, 0, 1],
        [2, 3, 1, 0],
        [3, 0, 1, 2],
        [3, 0, 2, 1],
        [3, 1, 0, 2],
        [3, 1, 2, 0],
        [3, 2, 0, 1],
        [3, 2, 1, 0],
    ];
    PERMS
        .iter()
        .map(|p| (0..4).map(|i| (a[i] - b[p[i]]).norm()).fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min)
}

pub fn max_real_part(s: &[Complex64; 4]) -> f64 {
    s.iter().map(|v| v.re).fold(f64::NEG_INFINITY, f64::max)
}

/// One probe point on the ray `k = rξ̂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandSample {
    pub r: f64,
    pub k_abs: f64,
    pub max_re: f64,
    /// `(r² - 4)(r² - 4 + 2m/|ξ|²)`, only meaningful for `ŵ ≡ 1`.
    pub sign_poly: f64,
    pub im: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandReport {
    /// `r ∈ (√max(0, 4 - 2m/|ξ|²), 2)` when `ŵ ≡ 1` and the band is non-empty.
    pub predicted: Option<(f64, f64)>,
    /// Maximal runs of grid points with `max Re λ > 0`, as `(first r, last r)`.
    pub detected: Vec<(f64, f64)>,
    pub max_growth: f64,
    pub argmax_r: f64,
    pub samples: Vec<BandSample>,
}

impl BandReport {
    pub fn is_empty(&self) -> bool {
        self.detected.is_empty()
    }
}

/// Scans `k = r|ξ| ξ̂_dir` over `r_grid`, where `direction` need not be normalised.
///
/// On the ray `k ∥ ξ` the scan coordinate `r` is the paper's `k = rξ`.
pub fn unstable_band(params: &TwoWaveParams, direction: &[f64], r_grid: &[f64]) -> Result<BandReport> {
    let norm = dot(direction, direction).sqrt();
    if direction.len() != params.dim || norm == 0.0 {
        return Err(Error::InvalidParameter(
            "scan direction must be a nonzero vector of the carrier dimension".into(),
        ));
    }
    let xi_abs = params.xi_abs();
    let unit: Vec<f64> = direction.iter().map(|v| v / norm).collect();
    let scale = if xi_abs > 0.0 { xi_abs } else { 1.0 };
    let samples = r_grid
        .par_iter()
        .map(|&r| {
            let k: Vec<f64> = unit.iter().map(|u| u * r * scale).collect();
            let s = closed_form_spectrum(params, &k)?;
            let mut im = [0.0; 4];
            for (o, v) in im.iter_mut().zip(&s) {
                *o = v.im;
            }
            let mr = if xi_abs > 0.0 {
                params.mass / (xi_abs * xi_abs)
            } else {
                0.0
            };
            Ok(BandSample {
                r,
                k_abs: r * scale,
                max_re: max_real_part(&s),
                sign_poly: (r * r - 4.0) * (r * r - 4.0 + 2.0 * mr),
                im,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut detected = Vec::new();
    let mut run: Option<(f64, f64)> = None;
    let mut max_growth = f64::NEG_INFINITY;
    let mut argmax_r = f64::NAN;
    for s in &samples {
        if s.max_re > max_growth {
            max_growth = s.max_re;
            argmax_r = s.r;
        }
        if s.max_re > 0.0 {
            run = Some(match run {
                Some((a, _)) => (a, s.r),
                None => (s.r, s.r),
            });
        } else if let Some(r) = run.take() {
            detected.push(r);
        }
    }
    detected.extend(run);
    let predicted = if params.potential.is_unit_delta() && params.mass > 0.0 && xi_abs > 0.0 {
        let lo2 = 4.0 - 2.0 * params.mass / (xi_abs * xi_abs);
        Some((lo2.max(0.0).sqrt(), 2.0))
    } else {
        None
    };
    Ok(BandReport {
        predicted,
        detected,
        max_growth,
        argmax_r,
        samples,
    })
}

/// Growth rate measured from the linear PDE.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthFit {
    pub lattice_k: Vec<f64>,
    pub k_abs: f64,
    /// Fitted exponential rate of the total L² norm.
    pub rate: f64,
    pub residual: f64,
    /// Fit window `(t_start, t_end)`; `None` when the long-horizon estimate was used.
    pub window: Option<(f64, f64)>,
    /// `max Re λ` of the symbol at the seeded lattice frequency.
    pub predicted: f64,
    /// Set when the symbol predicts growth that the simulation did not show.
    pub discrepancy: bool,
}

/// Settings for [`simulate_linearized`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationSettings {
    pub dt: f64,
    pub t_max: f64,
    pub noise: f64,
    pub seed: u64,
    /// Squarings used for the long-horizon rate when no growth window is found.
    pub horizon_doublings: u32,
}

impl Default for SimulationSettings {
    fn default() -> Self {
        Self {
            dt: 0.01,
            t_max: 60.0,
            noise: 1e-10,
            seed: 0,
            horizon_doublings: 40,
        }
    }
}

/// Evolves the four-component system on `grid` with the exact propagator
/// `exp(dt m_A(k))` per lattice frequency, starting from a unit Fourier mode at
/// the lattice point nearest `k_seed` in every component plus seeded noise.
///
/// The rate is the log-slope of the total norm between the times it first
/// exceeds 10× and 10³× its initial value. If it never reaches 10³×, the rate
/// is `ln(‖P^n u_0‖/‖u_0‖)/(n dt)` with `n = 2^horizon_doublings`, computed by
/// repeated squaring.
pub fn simulate_linearized(
    params: &TwoWaveParams,
    grid: &TorusGrid,
    k_seed: &[f64],
    settings: &SimulationSettings,
) -> Result<GrowthFit> {
    if grid.dim() != params.dim {
        return Err(Error::GridMismatch);
    }
    if !(settings.dt > 0.0 && settings.t_max > settings.dt) {
        return Err(Error::InvalidParameter("need 0 < dt < t_max".into()));
    }
    let d = grid.dim();
    let seed_idx = grid.nearest_frequency(k_seed);
    let lattice_k = grid.frequency(seed_idx)[..d].to_vec();
    let propagators = (0..grid.len())
        .into_par_iter()
        .map(|i| Ok((build_symbol(params, &grid.frequency(i)[..d])?.matrix * Complex64::new(settings.dt, 0.0)).exp()))
        .collect::<Result<Vec<Matrix4<Complex64>>>>()?;
    let u0 = seed_state(grid.len(), seed_idx, settings);
    let mut state = u0.clone();
    let norm = |s: &[nalgebra::Vector4<Complex64>]| s.iter().map(|v| v.norm_squared()).sum::<f64>().sqrt();
    let n0 = norm(&state);
    let steps = (settings.t_max / settings.dt).round() as usize;
    let mut samples = Vec::new();
    let mut start = None;
    for n in 1..=steps {
        for (v, p) in state.iter_mut().zip(&propagators) {
            *v = p * *v;
        }
        let a = norm(&state);
        if !a.is_finite() {
            return Err(Error::NonFiniteState {
                time: n as f64 * settings.dt,
                mode: seed_idx,
            });
        }
        let t = n as f64 * settings.dt;
        if start.is_none() && a >= 10.0 * n0 {
            start = Some(t);
        }
        if start.is_some() {
            samples.push((t, a.ln()));
            if a >= 1e3 * n0 {
                break;
            }
        }
    }
    let predicted = max_real_part(&closed_form_spectrum(params, &lattice_k)?);
    let reached = samples.last().is_some_and(|&(_, l)| l >= (1e3 * n0).ln());
    let (rate, residual, window) = if reached && samples.len() >= 3 {
        let (slope, res) = linear_fit(&samples);
        (slope, res, Some((samples[0].0, samples[samples.len() - 1].0)))
    } else {
        (long_horizon_rate(&propagators, &u0, settings), 0.0, None)
    };
    let discrepancy = predicted > 0.0 && (rate - predicted).abs() > 0.5 * predicted;
    Ok(GrowthFit {
        k_abs: dot(&lattice_k, &lattice_k).sqrt(),
        lattice_k,
        rate,
        residual,
        window,
        predicted,
        discrepancy,
    })
}

fn seed_state(len: usize, seed_idx: usize, settings: &SimulationSettings) -> Vec<nalgebra::Vector4<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut state: Vec<nalgebra::Vector4<Complex64>> = (0..len)
        .map(|_| {
            nalgebra::Vector4::from_fn(|_, _| {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * settings.noise
            })
        })
        .collect();
    for c in state[seed_idx].iter_mut() {
        *c += Complex64::new(1.0, 0.0);
    }
    state
}

fn long_horizon_rate(
    propagators: &[Matrix4<Complex64>],
    u0: &[nalgebra::Vector4<Complex64>],
    settings: &SimulationSettings,
) -> f64 {
    let n0: f64 = u0.iter().map(|v| v.norm_squared()).sum::<f64>().sqrt();
    let end: f64 = propagators
        .par_iter()
        .zip(u0)
        .map(|(p, v)| {
            let mut m = *p;
            for _ in 0..settings.horizon_doublings {
                m = m * m;
            }
            (m * v).norm_squared()
        })
        .sum::<f64>()
        .sqrt();
    let horizon = settings.dt * 2f64.powi(settings.horizon_doublings as i32);
    (end / n0).ln() / horizon
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn params(xi: &[f64], m: f64) -> TwoWaveParams {
        TwoWaveParams::new(xi, m, Potential::delta(1.0).unwrap()).unwrap()
    }

    #[test]
    fn zero_mass_is_block_diagonal() {
        let s = build_symbol(&params(&[1.0, 0.5], 0.0), &[0.3, -0.7]).unwrap();
        for i in 0..2 {
            for j in 2..4 {
                assert_eq!(s.matrix[(i, j)], c(0.0, 0.0));
                assert_eq!(s.matrix[(j, i)], c(0.0, 0.0));
            }
        }
    }

    #[test]
    fn zero_carrier_matches_displayed_symbol() {
        let s = build_symbol(&params(&[0.0], 2.0), &[1.5]).unwrap();
        let (b, cc) = (2.25, 2.0);
        #[rustfmt::skip]
        let expect = Matrix4::new(
            c(0.0, 0.0), c(b, 0.0), c(0.0, 0.0), c(0.0, 0.0),
            c(-b - cc, 0.0), c(0.0, 0.0), c(-cc, 0.0), c(0.0, 0.0),
            c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(b, 0.0),
            c(-cc, 0.0), c(0.0, 0.0), c(-b - cc, 0.0), c(0.0, 0.0),
        );
        assert_eq!(s.matrix, expect);
    }

    #[test]
    fn zero_probe_with_zero_mass_is_zero_matrix() {
        let s = build_symbol(&params(&[1.0], 0.0), &[0.0]).unwrap();
        assert_eq!(s.matrix, Matrix4::zeros());
    }

    #[test]
    fn moving_frame_spectrum() {
        let s = closed_form_spectrum(&params(&[1.0], 0.0), &[1.0]).unwrap();
        let expect = [c(0.0, 1.0), c(0.0, -1.0), c(0.0, 3.0), c(0.0, -3.0)];
        assert!(multiset_distance(&s, &expect) < 1e-14);
        assert!(s.iter().all(|v| v.re == 0.0));
    }

    #[test]
    fn gross_pitaevskii_spectrum() {
        let s = closed_form_spectrum(&params(&[0.0], 1.0), &[1.0]).unwrap();
        let r3 = 3f64.sqrt();
        let expect = [c(0.0, 1.0), c(0.0, -1.0), c(0.0, r3), c(0.0, -r3)];
        assert!(multiset_distance(&s, &expect) < 1e-14);
    }

    #[test]
    fn unstable_pair_at_root_three() {
        let p = params(&[1.0], 1.0);
        let k = [3f64.sqrt()];
        let s = closed_form_spectrum(&p, &k).unwrap();
        let yp = (-24.0 + 585f64.sqrt()).sqrt();
        let ym = (24.0 + 585f64.sqrt()).sqrt();
        let expect = [c(yp, 0.0), c(-yp, 0.0), c(0.0, ym), c(0.0, -ym)];
        assert!(multiset_distance(&s, &expect) < 1e-12);
        assert!((yp - 0.4325).abs() < 1e-3 && (ym - 6.94).abs() < 1e-2);
        let e = eigensolver_spectrum(&p, &k).unwrap();
        assert!(multiset_distance(&s, &e) < 1e-10);
        let sym = build_symbol(&p, &k).unwrap();
        assert!(s.iter().all(|l| sym.poly_residual(*l) < 1e-14));
    }

    #[test]
    fn solver_on_scaled_identity() {
        let m = Matrix4::<Complex64>::identity() * c(2.0, -1.0);
        let s = matrix_spectrum(&m).unwrap();
        assert!(s.iter().all(|v| (v - c(2.0, -1.0)).norm() < 1e-15));
    }

    #[test]
    fn band_for_unit_mass() {
        let p = params(&[1.0], 1.0);
        let r: Vec<f64> = (1..400).map(|i| i as f64 * 0.01).collect();
        let band = unstable_band(&p, &[1.0], &r).unwrap();
        assert_eq!(band.detected.len(), 1, "{:?}", band.detected);
        let (lo, hi) = band.detected[0];
        assert!(
            (lo - 2f64.sqrt()).abs() <= 0.01 + 1e-12 && (hi - 2.0).abs() <= 0.01 + 1e-12,
            "{lo} {hi}"
        );
        assert_eq!(band.predicted, Some((2f64.sqrt(), 2.0)));
        for s in &band.samples {
            assert_eq!(s.max_re > 0.0, s.sign_poly < 0.0, "r={}", s.r);
        }
    }

    #[test]
    fn band_empty_without_mass_and_wide_for_large_mass() {
        let r: Vec<f64> = (1..400).map(|i| i as f64 * 0.01).collect();
        assert!(unstable_band(&params(&[1.0], 0.0), &[1.0], &r).unwrap().is_empty());
        let band = unstable_band(&params(&[1.0], 10.0), &[1.0], &r).unwrap();
        assert_eq!(band.detected, vec![(0.01, 1.99)]);
    }
}
