//! Finite Gaussian-mode ensembles `X = Σ_j u_j g_j` with orthonormal `g_j`,
//! so that `E|X|² = Σ_j |u_j|²` exactly, and their Hartree dynamics
//!
//! ```text
//! i ∂t u_j = -Δu_j + (w * Σ_k |u_k|²) u_j
//! ```
//!
//! by Strang splitting. Equilibria are plane-wave ensembles
//! `u_j = a_j e^{iξ_j·x - i(m + |ξ_j|²)t}` with `m = ŵ(0) Σ a_j²`.

mod norms;
mod perturbation;
mod picard;
mod scattering;

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::equilibria::{CovarianceProfile, Distribution, Potential};
use crate::spectral::{SpectralField, TorusGrid, MAX_DIM};
use crate::{Error, Result};

pub use norms::{norm_table, NormTable, ThetaExponents, ThetaNorms};
pub use perturbation::{add_perturbation, Bump, PerturbationSpec, PerturbationState, Placement};
pub use picard::{picard_iterate, PicardIterate, PicardReport, PicardSettings};
pub use scattering::{scattering_probe, ScatteringReport, ScatteringSettings};

/// One Gaussian mode: lattice carrier `ξ_j`, equilibrium weight `a_j` and
/// the current field `u_j` (physical values).
#[derive(Debug, Clone)]
pub struct Mode {
    pub index: usize,
    pub xi: [f64; MAX_DIM],
    pub weight: f64,
    pub field: Vec<Complex64>,
}

/// What was kept and dropped when discretising an equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelectionInfo {
    pub threshold: f64,
    pub modes: usize,
    /// `Σ a_j²` over retained modes.
    pub retained_mass: f64,
    /// `Σ |f(ξ)|²Δξ` over lattice frequencies below the threshold.
    pub truncated_mass: f64,
    /// `h(0) = ∫|f|²` by radial quadrature.
    pub h0: f64,
}

#[derive(Debug, Clone)]
pub struct ModeEnsemble {
    grid: TorusGrid,
    potential: Potential,
    w_hat: Arc<Vec<f64>>,
    modes: Vec<Mode>,
    time: f64,
    mass: f64,
    selection: Option<SelectionInfo>,
}

/// One observation along a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryRecord {
    pub time: f64,
    pub mode_masses: Vec<f64>,
    pub energy: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norms: Option<NormTable>,
    #[serde(skip)]
    pub density: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub dt: f64,
    pub steps: usize,
    pub records: Vec<TrajectoryRecord>,
}

impl Trajectory {
    /// Largest change of any per-mode mass relative to the first record.
    pub fn max_mass_drift(&self) -> f64 {
        let Some(first) = self.records.first() else {
            return 0.0;
        };
        self.records
            .iter()
            .flat_map(|r| r.mode_masses.iter().zip(&first.mode_masses).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max)
    }

    /// Largest `|E(t) - E(0)|`.
    pub fn max_energy_drift(&self) -> f64 {
        let Some(first) = self.records.first() else {
            return 0.0;
        };
        self.records
            .iter()
            .map(|r| (r.energy - first.energy).abs())
            .fold(0.0, f64::max)
    }
}

fn lattice_w_hat(grid: &TorusGrid, w: &Potential) -> Vec<f64> {
    (0..grid.len()).map(|i| w.hat(grid.frequency_abs(i))).collect()
}

impl ModeEnsemble {
    /// Plane-wave equilibrium on all lattice frequencies with
    /// `|f(ξ)|²Δξ ≥ threshold`, `a_j = |f(ξ_j)| Δξ^{1/2}` (`Δξ` the frequency cell).
    ///
    /// `f ≡ 0` gives the empty ensemble; otherwise an empty selection is an error.
    pub fn init_equilibrium(grid: &TorusGrid, f: &Distribution, w: &Potential, threshold: f64) -> Result<Self> {
        if !(threshold >= 0.0 && threshold.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "threshold must be >= 0, got {threshold}"
            )));
        }
        let cell = grid.freq_cell();
        let d = grid.dim();
        let mut modes = Vec::new();
        let mut truncated = 0.0;
        for i in 0..grid.len() {
            let a2 = f.eval_f2(grid.frequency_abs(i)) * cell;
            if a2 > 0.0 && a2 >= threshold {
                modes.push((i, a2.sqrt()));
            } else {
                truncated += a2;
            }
        }
        if modes.is_empty() && !f.is_zero() {
            return Err(Error::EmptySelection { threshold });
        }
        let mut ens = Self::from_plane_waves(grid, w, &modes)?;
        let h0 = if d <= 4 {
            CovarianceProfile::with_cap(f, d, 0.0)?.h0()
        } else {
            f64::NAN
        };
        ens.selection = Some(SelectionInfo {
            threshold,
            modes: ens.modes.len(),
            retained_mass: ens.modes.iter().map(|m| m.weight * m.weight).sum(),
            truncated_mass: truncated,
            h0,
        });
        Ok(ens)
    }

    /// Plane waves `a e^{iξ·x}` at the given lattice positions, with the
    /// equilibrium mass `ŵ(0) Σ a²`.
    pub fn from_plane_waves(grid: &TorusGrid, w: &Potential, waves: &[(usize, f64)]) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        let mut modes = Vec::with_capacity(waves.len());
        for &(index, weight) in waves {
            if index >= grid.len() {
                return Err(Error::InvalidParameter(format!("lattice index {index} out of range")));
            }
            if !seen.insert(index) {
                return Err(Error::InvalidParameter(format!("carrier {index} used twice")));
            }
            let field = SpectralField::plane_wave(grid, index)
                .into_values()
                .into_iter()
                .map(|v| v * weight)
                .collect();
            modes.push(Mode {
                index,
                xi: grid.frequency(index),
                weight,
                field,
            });
        }
        let mass = w.hat_at_zero() * modes.iter().map(|m| m.weight * m.weight).sum::<f64>();
        Ok(Self {
            grid: grid.clone(),
            w_hat: Arc::new(lattice_w_hat(grid, w)),
            potential: w.clone(),
            modes,
            time: 0.0,
            mass,
            selection: None,
        })
    }

    /// Arbitrary mode fields; `modes` are `(lattice index, weight, field)`.
    pub fn from_fields(
        grid: &TorusGrid,
        w: &Potential,
        mass: f64,
        modes: Vec<(usize, f64, SpectralField)>,
    ) -> Result<Self> {
        let modes = modes
            .into_iter()
            .map(|(index, weight, f)| {
                if f.grid() != grid {
                    return Err(Error::GridMismatch);
                }
                Ok(Mode {
                    index,
                    xi: grid.frequency(index),
                    weight,
                    field: f.into_values(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            grid: grid.clone(),
            w_hat: Arc::new(lattice_w_hat(grid, w)),
            potential: w.clone(),
            modes,
            time: 0.0,
            mass,
            selection: None,
        })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub(crate) fn modes_mut(&mut self) -> &mut [Mode] {
        &mut self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn selection(&self) -> Option<&SelectionInfo> {
        self.selection.as_ref()
    }

    pub fn mode_field(&self, j: usize) -> SpectralField {
        SpectralField::from_values_unchecked(&self.grid, self.modes[j].field.clone())
    }

    /// `a_j e^{iξ_j·x - i(m + |ξ_j|²)t}`.
    pub fn equilibrium_field(&self, j: usize, t: f64) -> Vec<Complex64> {
        let mode = &self.modes[j];
        let d = self.grid.dim();
        let k2: f64 = mode.xi[..d].iter().map(|v| v * v).sum();
        let phase = -(self.mass + k2) * t;
        (0..self.grid.len())
            .map(|i| {
                let x = self.grid.position(i);
                let arg: f64 = (0..d).map(|a| mode.xi[a] * x[a]).sum::<f64>() + phase;
                Complex64::from_polar(mode.weight, arg)
            })
            .collect()
    }

    /// `Σ_j |u_j(x)|²`, summed in mode order at every point.
    pub fn density_values(&self) -> Vec<f64> {
        let modes = &self.modes;
        (0..self.grid.len())
            .into_par_iter()
            .map(|i| modes.iter().map(|m| m.field[i].norm_sqr()).sum())
            .collect()
    }

    pub fn density(&self) -> SpectralField {
        let rho = self.density_values();
        SpectralField::from_real(&self.grid, &rho).expect("density has grid length")
    }

    /// `‖u_j‖²_{L²}` per mode.
    pub fn mode_masses(&self) -> Vec<f64> {
        let dv = self.grid.cell_volume();
        self.modes
            .par_iter()
            .map(|m| m.field.iter().map(|v| v.norm_sqr()).sum::<f64>() * dv)
            .collect()
    }

    /// `(w * ρ)(x)` for a real density.
    pub(crate) fn convolve(&self, rho: &[f64]) -> Vec<f64> {
        if self.potential.is_zero() {
            return vec![0.0; rho.len()];
        }
        let mut buf: Vec<Complex64> = rho.iter().map(|&r| Complex64::new(r, 0.0)).collect();
        self.grid.fft_in_place(&mut buf, true);
        let scale = 1.0 / self.grid.len() as f64;
        for (b, w) in buf.iter_mut().zip(self.w_hat.iter()) {
            *b *= w * scale;
        }
        self.grid.fft_in_place(&mut buf, false);
        buf.into_iter().map(|c| c.re).collect()
    }

    fn kinetic(&mut self, tau: f64) {
        let scale = 1.0 / self.grid.len() as f64;
        let mass = self.mass;
        let phases: Vec<Complex64> = self
            .grid
            .frequency_sq()
            .iter()
            .map(|k2| Complex64::from_polar(scale, -tau * (mass + k2)))
            .collect();
        let grid = &self.grid;
        self.modes.par_iter_mut().for_each(|m| {
            grid.fft_in_place(&mut m.field, true);
            for (v, p) in m.field.iter_mut().zip(&phases) {
                *v *= p;
            }
            grid.fft_in_place(&mut m.field, false);
        });
    }

    fn locate_non_finite(&self) -> Error {
        let mode = self
            .modes
            .iter()
            .position(|m| m.field.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())))
            .unwrap_or(0);
        Error::NonFiniteState { time: self.time, mode }
    }

    /// One Strang step: half free flow `e^{-i(dt/2)(m + |ξ|²)}`, potential
    /// phase `e^{-i dt ((w*ρ)(x) - m)}`, half free flow.
    ///
    /// The constant `m` moved into the free flow is removed from the
    /// potential phase, so the step solves the Hartree equation itself and
    /// equilibria rotate at exactly `m + |ξ_j|²`.
    pub fn step(&mut self, dt: f64) -> Result<()> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("time step must be positive, got {dt}")));
        }
        self.kinetic(0.5 * dt);
        let rho = self.density_values();
        if rho.iter().any(|r| !r.is_finite()) {
            return Err(self.locate_non_finite());
        }
        let v = self.convolve(&rho);
        let mass = self.mass;
        let phase: Vec<Complex64> = v
            .iter()
            .map(|vx| Complex64::from_polar(1.0, -dt * (vx - mass)))
            .collect();
        self.modes.par_iter_mut().for_each(|m| {
            for (u, p) in m.field.iter_mut().zip(&phase) {
                *u *= p;
            }
        });
        self.kinetic(0.5 * dt);
        self.time += dt;
        Ok(())
    }

    /// `Σ_j ∫|∇u_j|² + ½∫(w*ρ)ρ`.
    pub fn conserved_energy(&self) -> f64 {
        let g = &self.grid;
        let inv_v = 1.0 / g.volume();
        let kinetic: f64 = self
            .modes
            .par_iter()
            .map(|m| {
                let mut c = m.field.clone();
                g.forward(&mut c);
                c.iter()
                    .zip(g.frequency_sq())
                    .map(|(c, k2)| k2 * c.norm_sqr())
                    .sum::<f64>()
                    * inv_v
            })
            .collect::<Vec<f64>>()
            .iter()
            .sum();
        let rho = self.density_values();
        let v = self.convolve(&rho);
        let potential: f64 = 0.5 * v.iter().zip(&rho).map(|(a, b)| a * b).sum::<f64>() * g.cell_volume();
        kinetic + potential
    }

    fn record(&self) -> TrajectoryRecord {
        TrajectoryRecord {
            time: self.time,
            mode_masses: self.mode_masses(),
            energy: self.conserved_energy(),
            norms: None,
            density: None,
        }
    }

    /// Runs `⌈T/dt⌉` steps of equal size `T/n`, recording at `t = 0`, every
    /// `stride` steps and at the end. The observer may decorate each record.
    pub fn evolve<F>(&mut self, t_total: f64, dt: f64, stride: usize, mut observer: F) -> Result<Trajectory>
    where
        F: FnMut(&ModeEnsemble, &mut TrajectoryRecord) -> Result<()>,
    {
        if !(t_total > 0.0 && dt > 0.0) {
            return Err(Error::InvalidParameter("need T > 0 and dt > 0".into()));
        }
        let steps = ((t_total / dt) - 1e-9).ceil().max(1.0) as usize;
        let h = t_total / steps as f64;
        let stride = stride.max(1);
        let t0 = self.time;
        let mut records = Vec::new();
        let mut rec = self.record();
        observer(self, &mut rec)?;
        records.push(rec);
        for n in 1..=steps {
            self.step(h)?;
            if n % stride == 0 || n == steps {
                // pin the clock to the lattice to avoid summation drift
                self.time = t0 + n as f64 * h;
                let mut rec = self.record();
                if rec.mode_masses.iter().any(|m| !m.is_finite()) || !rec.energy.is_finite() {
                    return Err(self.locate_non_finite());
                }
                observer(self, &mut rec)?;
                records.push(rec);
            }
        }
        self.time = t0 + t_total;
        Ok(Trajectory { dt: h, steps, records })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid1() -> TorusGrid {
        TorusGrid::new(1, 2.0 * PI, 32).unwrap()
    }

    #[test]
    fn zero_distribution_gives_empty_ensemble() {
        let e = ModeEnsemble::init_equilibrium(&grid1(), &Distribution::zero(), &Potential::delta(1.0).unwrap(), 1e-8)
            .unwrap();
        assert!(e.is_empty());
        assert!(e.density_values().iter().all(|&r| r == 0.0));
        let err = ModeEnsemble::init_equilibrium(
            &grid1(),
            &Distribution::gaussian(0.1).unwrap(),
            &Potential::zero(),
            10.0,
        );
        assert!(matches!(err, Err(Error::EmptySelection { .. })));
    }

    #[test]
    fn single_constant_mode() {
        let g = grid1();
        let w = Potential::delta(2.5).unwrap();
        let e = ModeEnsemble::from_plane_waves(&g, &w, &[(0, 1.0)]).unwrap();
        assert!(e.density_values().iter().all(|&r| (r - 1.0).abs() < 1e-15));
        assert_eq!(e.mass(), 2.5);
        assert_eq!(e.conserved_energy() - 0.5 * 2.5 * 2.0 * PI, 0.0);
    }

    #[test]
    fn counter_propagating_pair_has_flat_density() {
        let g = grid1();
        let e = ModeEnsemble::from_plane_waves(
            &g,
            &Potential::zero(),
            &[(g.flat_index(&[1]), 1.0), (g.flat_index(&[-1]), 1.0)],
        )
        .unwrap();
        assert!(e.density_values().iter().all(|&r| (r - 2.0).abs() < 1e-14));
    }

    #[test]
    fn free_plane_wave_picks_up_exact_phase() {
        let g = grid1();
        let idx = g.flat_index(&[3]);
        let mut e = ModeEnsemble::from_plane_waves(&g, &Potential::zero(), &[(idx, 1.0)]).unwrap();
        e.step(0.1).unwrap();
        let expect = e.equilibrium_field(0, 0.1);
        let err = e.modes()[0]
            .field
            .iter()
            .zip(&expect)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err <= 1e-14, "{err}");
        // kinetic energy of a plane wave is |ξ|² V
        assert!((e.conserved_energy() - 9.0 * 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn equilibrium_keeps_amplitudes() {
        let g = grid1();
        let f = Distribution::fermi(1.0, 0.0).unwrap();
        let mut e = ModeEnsemble::init_equilibrium(&g, &f, &Potential::delta(1.0).unwrap(), 1e-8).unwrap();
        for _ in 0..50 {
            e.step(0.01).unwrap();
        }
        for (j, m) in e.modes().iter().enumerate() {
            let expect = e.equilibrium_field(j, e.time());
            for (u, y) in m.field.iter().zip(&expect) {
                assert!((u.norm() - m.weight).abs() < 1e-13);
                assert!((u - y).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn density_is_thread_count_independent() {
        let g = TorusGrid::new(2, 2.0 * PI, 16).unwrap();
        let f = Distribution::fermi(1.0, 0.5).unwrap();
        let mut e = ModeEnsemble::init_equilibrium(&g, &f, &Potential::delta(1.0).unwrap(), 1e-6).unwrap();
        for m in e.modes_mut().iter_mut() {
            m.field[3] += Complex64::new(0.01, 0.02);
        }
        let run = |threads: usize| {
            let mut e = e.clone();
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| {
                    for _ in 0..5 {
                        e.step(0.01).unwrap();
                    }
                    e.density_values()
                })
        };
        assert_eq!(run(1), run(4));
    }
}
