use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::norms::{norm_table, NormTable};
use super::{ModeEnsemble, Trajectory};
use crate::spectral::{LittlewoodPaley, SpectralField, TorusGrid};
use crate::{Error, Result};

/// `ε exp(-|x - c|²/(2σ²)) e^{iκ·x}`, with `|x - c|` the periodic distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: Vec<f64>,
    pub width: f64,
    pub carrier: Vec<f64>,
    pub amplitude: f64,
}

impl Bump {
    /// Centred in the box, no carrier.
    pub fn centered(grid: &TorusGrid, width: f64, amplitude: f64) -> Self {
        Self {
            center: vec![0.5 * grid.length(); grid.dim()],
            width,
            carrier: vec![0.0; grid.dim()],
            amplitude,
        }
    }

    fn validate(&self, grid: &TorusGrid) -> Result<()> {
        let d = grid.dim();
        if self.center.len() != d || self.carrier.len() != d {
            return Err(Error::InvalidParameter(format!(
                "bump center and carrier need {d} components"
            )));
        }
        if !(self.width > 0.0 && self.width.is_finite()) || !self.amplitude.is_finite() {
            return Err(Error::InvalidParameter(
                "bump width must be positive and amplitude finite".into(),
            ));
        }
        Ok(())
    }

    pub fn values(&self, grid: &TorusGrid) -> Vec<Complex64> {
        let d = grid.dim();
        let l = grid.length();
        (0..grid.len())
            .map(|i| {
                let x = grid.position(i);
                let mut r2 = 0.0;
                let mut phase = 0.0;
                for a in 0..d {
                    let mut dx = (x[a] - self.center[a]).rem_euclid(l);
                    if dx > 0.5 * l {
                        dx -= l;
                    }
                    r2 += dx * dx;
                    phase += self.carrier[a] * x[a];
                }
                Complex64::from_polar(self.amplitude * (-0.5 * r2 / (self.width * self.width)).exp(), phase)
            })
            .collect()
    }
}

/// How the bump is distributed over the modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    /// `Z_j = δ_{jk} bump`
    SingleMode(usize),
    /// `Z_j = c_j bump`
    Spread(Vec<Complex64>),
    /// `Z_j = bump · u_j^{eq}(0) / (Σ a²)^{1/2}`: a modulation of the
    /// whole equilibrium, so `E|Z|² = |bump|²`.
    Modulated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    pub bump: Bump,
    pub placement: Placement,
}

/// Perturbed ensemble with the equilibrium it deviates from.
#[derive(Debug, Clone)]
pub struct PerturbationState {
    ensemble: ModeEnsemble,
    lp: LittlewoodPaley,
}

/// Adds the perturbation to a copy of an equilibrium ensemble at its current time.
pub fn add_perturbation(ensemble: &ModeEnsemble, spec: &PerturbationSpec) -> Result<PerturbationState> {
    let grid = ensemble.grid();
    spec.bump.validate(grid)?;
    let n = ensemble.len();
    let bump = spec.bump.values(grid);
    let mut out = ensemble.clone();
    let t = out.time();
    match &spec.placement {
        Placement::SingleMode(k) => {
            if *k >= n {
                return Err(Error::InvalidParameter(format!(
                    "mode {k} out of range (ensemble has {n})"
                )));
            }
            for (u, b) in out.modes_mut()[*k].field.iter_mut().zip(&bump) {
                *u += b;
            }
        }
        Placement::Spread(c) => {
            if c.len() != n {
                return Err(Error::InvalidParameter(format!(
                    "{} coefficients for {n} modes",
                    c.len()
                )));
            }
            for (m, cj) in out.modes_mut().iter_mut().zip(c) {
                for (u, b) in m.field.iter_mut().zip(&bump) {
                    *u += cj * b;
                }
            }
        }
        Placement::Modulated => {
            let total: f64 = ensemble.modes().iter().map(|m| m.weight * m.weight).sum();
            if total > 0.0 {
                let norm = 1.0 / total.sqrt();
                for j in 0..n {
                    let y = ensemble.equilibrium_field(j, t);
                    for ((u, b), y) in out.modes_mut()[j].field.iter_mut().zip(&bump).zip(&y) {
                        *u += b * y * norm;
                    }
                }
            }
        }
    }
    Ok(PerturbationState {
        lp: LittlewoodPaley::new(grid),
        ensemble: out,
    })
}

impl PerturbationState {
    /// Wraps an ensemble whose modes carry equilibrium carriers and weights.
    pub fn from_ensemble(ensemble: ModeEnsemble) -> Self {
        Self {
            lp: LittlewoodPaley::new(ensemble.grid()),
            ensemble,
        }
    }

    pub fn ensemble(&self) -> &ModeEnsemble {
        &self.ensemble
    }

    pub fn ensemble_mut(&mut self) -> &mut ModeEnsemble {
        &mut self.ensemble
    }

    pub fn into_ensemble(self) -> ModeEnsemble {
        self.ensemble
    }

    pub fn littlewood_paley(&self) -> &LittlewoodPaley {
        &self.lp
    }

    /// `Z_j = u_j - u_j^{eq}` at the current time.
    pub fn deviations(&self) -> Vec<SpectralField> {
        let e = &self.ensemble;
        let t = e.time();
        (0..e.len())
            .map(|j| {
                let y = e.equilibrium_field(j, t);
                let z = e.modes()[j].field.iter().zip(&y).map(|(u, y)| u - y).collect();
                SpectralField::from_values_unchecked(e.grid(), z)
            })
            .collect()
    }

    /// `V = Σ_j (|u_j|² - a_j²)`.
    pub fn induced_potential(&self) -> Vec<f64> {
        let e = &self.ensemble;
        let eq: f64 = e.modes().iter().map(|m| m.weight * m.weight).sum();
        e.density_values().into_iter().map(|r| r - eq).collect()
    }

    /// `E|Z|² + 2 Re E(Ȳ Z)` from the deviations.
    pub fn induced_potential_from_modes(&self) -> Vec<f64> {
        let e = &self.ensemble;
        let t = e.time();
        let z = self.deviations();
        let mut v = vec![0.0; e.grid().len()];
        for (j, zj) in z.iter().enumerate() {
            let y = e.equilibrium_field(j, t);
            for ((acc, zx), yx) in v.iter_mut().zip(zj.values()).zip(&y) {
                *acc += zx.norm_sqr() + 2.0 * (yx.conj() * zx).re;
            }
        }
        v
    }

    pub fn norm_table(&self) -> NormTable {
        norm_table(
            &self.lp,
            &self.deviations(),
            &self.induced_potential(),
            self.ensemble.time(),
        )
    }

    /// `evolve` with the perturbation norms attached to every record.
    pub fn evolve(&mut self, t_total: f64, dt: f64, stride: usize) -> Result<Trajectory> {
        let lp = self.lp.clone();
        self.ensemble.evolve(t_total, dt, stride, |e, rec| {
            let s = PerturbationState {
                ensemble: e.clone(),
                lp: lp.clone(),
            };
            rec.norms = Some(norm_table(&lp, &s.deviations(), &s.induced_potential(), e.time()));
            Ok(())
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::{Distribution, Potential};
    use std::f64::consts::PI;

    fn eq() -> ModeEnsemble {
        let g = TorusGrid::new(1, 2.0 * PI, 32).unwrap();
        ModeEnsemble::init_equilibrium(
            &g,
            &Distribution::fermi(1.0, 0.0).unwrap(),
            &Potential::delta(1.0).unwrap(),
            1e-6,
        )
        .unwrap()
    }

    #[test]
    fn null_perturbation() {
        let e = eq();
        let s = add_perturbation(
            &e,
            &PerturbationSpec {
                bump: Bump::centered(e.grid(), 0.5, 0.0),
                placement: Placement::SingleMode(0),
            },
        )
        .unwrap();
        assert!(s.induced_potential().iter().all(|v| v.abs() < 1e-14));
        assert!(s.deviations().iter().all(|z| z.max_abs() == 0.0));
    }

    #[test]
    fn single_mode_identity() {
        let e = eq();
        let spec = PerturbationSpec {
            bump: Bump::centered(e.grid(), 0.5, 0.1),
            placement: Placement::SingleMode(2),
        };
        let s = add_perturbation(&e, &spec).unwrap();
        let b = spec.bump.values(e.grid());
        let y = e.equilibrium_field(2, 0.0);
        let v = s.induced_potential();
        for i in 0..b.len() {
            let expect = b[i].norm_sqr() + 2.0 * (y[i].conj() * b[i]).re;
            assert!((v[i] - expect).abs() < 1e-13);
        }
        let direct = s.induced_potential_from_modes();
        assert!(v.iter().zip(&direct).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn rejects_bad_placement() {
        let e = eq();
        let bump = Bump::centered(e.grid(), 0.5, 0.1);
        assert!(add_perturbation(
            &e,
            &PerturbationSpec {
                bump: bump.clone(),
                placement: Placement::SingleMode(999)
            }
        )
        .is_err());
        assert!(add_perturbation(
            &e,
            &PerturbationSpec {
                bump,
                placement: Placement::Spread(vec![])
            }
        )
        .is_err());
    }
}
