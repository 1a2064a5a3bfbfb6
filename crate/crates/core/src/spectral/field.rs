use std::sync::OnceLock;

use num_complex::Complex64;

use super::TorusGrid;
use crate::{Error, Result};

/// A complex field on a [`TorusGrid`], stored by physical values with the
/// Fourier coefficients computed on first use.
#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: TorusGrid,
    values: Vec<Complex64>,
    coeffs: OnceLock<Vec<Complex64>>,
}

impl SpectralField {
    pub fn zeros(grid: &TorusGrid) -> Self {
        Self::from_values_unchecked(grid, vec![Complex64::new(0.0, 0.0); grid.len()])
    }

    pub fn from_values(grid: &TorusGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(Self::from_values_unchecked(grid, values))
    }

    pub(crate) fn from_values_unchecked(grid: &TorusGrid, values: Vec<Complex64>) -> Self {
        Self {
            grid: grid.clone(),
            values,
            coeffs: OnceLock::new(),
        }
    }

    pub fn from_real(grid: &TorusGrid, values: &[f64]) -> Result<Self> {
        Self::from_values(grid, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Samples `f` at every lattice position.
    pub fn from_fn(grid: &TorusGrid, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let d = grid.dim();
        let values = (0..grid.len()).map(|i| f(&grid.position(i)[..d])).collect();
        Self::from_values_unchecked(grid, values)
    }

    /// Builds a field from continuum-normalised Fourier coefficients.
    pub fn from_coefficients(grid: &TorusGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: coeffs.len(),
            });
        }
        let mut values = coeffs.clone();
        grid.inverse(&mut values);
        let field = Self::from_values_unchecked(grid, values);
        let _ = field.coeffs.set(coeffs);
        Ok(field)
    }

    /// The plane wave `e^{iξ·x}` at lattice frequency index `flat`.
    pub fn plane_wave(grid: &TorusGrid, flat: usize) -> Self {
        let xi = grid.frequency(flat);
        let d = grid.dim();
        Self::from_fn(grid, |x| {
            let phase: f64 = (0..d).map(|a| xi[a] * x[a]).sum();
            Complex64::from_polar(1.0, phase)
        })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Mutable access to physical values; drops the cached coefficients.
    pub fn values_mut(&mut self) -> &mut [Complex64] {
        self.coeffs = OnceLock::new();
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Continuum-normalised Fourier coefficients `f̂(ξ) = ∫ f e^{-iξ·x} dx`.
    pub fn coefficients(&self) -> &[Complex64] {
        self.coeffs.get_or_init(|| {
            let mut c = self.values.clone();
            self.grid.forward(&mut c);
            c
        })
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self::from_values_unchecked(&self.grid, self.values.iter().map(|v| v * s).collect())
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: Complex64, other: &Self, b: Complex64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Ok(Self::from_values_unchecked(&self.grid, values))
    }

    /// Translates by an integer number of lattice cells along each axis:
    /// `out(x) = self(x - shift·h)`.
    pub fn shifted(&self, shift: &[i64]) -> Self {
        let g = &self.grid;
        let d = g.dim();
        let n = g.points() as i64;
        let mut out = vec![Complex64::new(0.0, 0.0); g.len()];
        for (flat, v) in self.values.iter().enumerate() {
            let mut rem = flat;
            let mut dst = 0usize;
            let mut mult = 1usize;
            for a in (0..d).rev() {
                let i = (rem % g.points()) as i64;
                rem /= g.points();
                let s = shift.get(a).copied().unwrap_or(0);
                dst += ((i + s).rem_euclid(n) as usize) * mult;
                mult *= g.points();
            }
            out[dst] = *v;
        }
        Self::from_values_unchecked(g, out)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Continuum-normalised Fourier coefficients of `field`.
pub fn forward_transform(field: &SpectralField) -> Vec<Complex64> {
    field.coefficients().to_vec()
}

pub fn inverse_transform(grid: &TorusGrid, coeffs: Vec<Complex64>) -> Result<SpectralField> {
    SpectralField::from_coefficients(grid, coeffs)
}

/// Multiplies the Fourier coefficients of `field` by `symbol(ξ)`.
///
/// Rejects symbols that are not finite on the lattice.
pub fn apply_multiplier(field: &SpectralField, symbol: impl Fn(&[f64]) -> Complex64) -> Result<SpectralField> {
    let g = field.grid();
    let d = g.dim();
    let table = (0..g.len())
        .map(|i| {
            let s = symbol(&g.frequency(i)[..d]);
            if s.re.is_finite() && s.im.is_finite() {
                Ok(s)
            } else {
                Err(Error::NonFiniteSymbol { index: i })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    apply_multiplier_table(field, &table)
}

/// As [`apply_multiplier`] with the symbol pre-sampled in storage order.
pub fn apply_multiplier_table(field: &SpectralField, table: &[Complex64]) -> Result<SpectralField> {
    let g = field.grid();
    if table.len() != g.len() {
        return Err(Error::LengthMismatch {
            expected: g.len(),
            got: table.len(),
        });
    }
    if let Some(i) = table.iter().position(|s| !(s.re.is_finite() && s.im.is_finite())) {
        return Err(Error::NonFiniteSymbol { index: i });
    }
    let coeffs: Vec<Complex64> = field.coefficients().iter().zip(table).map(|(c, s)| c * s).collect();
    SpectralField::from_coefficients(g, coeffs)
}

/// The free propagator symbol `e^{-it(m + |ξ|²)}`.
pub fn free_propagator(t: f64, mass: f64) -> impl Fn(&[f64]) -> Complex64 {
    move |xi: &[f64]| {
        let k2: f64 = xi.iter().map(|v| v * v).sum();
        Complex64::from_polar(1.0, -t * (mass + k2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn constant_field_has_single_zero_coefficient() {
        let g = TorusGrid::new(1, 2.0 * PI, 8).unwrap();
        let v = c(1.5);
        let f = SpectralField::from_values(&g, vec![v; 8]).unwrap();
        let co = forward_transform(&f);
        // f̂(0) = ∫ c dx = c·L
        assert!((co[0] - v * g.length()).norm() < 1e-13);
        for x in &co[1..] {
            assert!(x.norm() < 1e-13);
        }
    }

    #[test]
    fn plane_wave_is_single_coefficient() {
        let g = TorusGrid::new(2, 2.0 * PI, 8).unwrap();
        let idx = g.flat_index(&[1, -2]);
        let f = SpectralField::plane_wave(&g, idx);
        let co = f.coefficients();
        for (i, x) in co.iter().enumerate() {
            if i == idx {
                assert!((x - c(g.volume())).norm() < 1e-12);
            } else {
                assert!(x.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn identity_symbol_leaves_field_unchanged() {
        let g = TorusGrid::new(1, 3.0, 16).unwrap();
        let f = SpectralField::from_fn(&g, |x| Complex64::new(x[0].sin(), x[0].cos() * 0.3));
        let out = apply_multiplier(&f, |_| c(1.0)).unwrap();
        assert!(out.max_abs_diff(&f) < 1e-14);
    }

    #[test]
    fn free_propagator_on_plane_wave() {
        let g = TorusGrid::new(1, 2.0 * PI, 16).unwrap();
        let idx = g.flat_index(&[3]);
        let f = SpectralField::plane_wave(&g, idx);
        let out = apply_multiplier(&f, free_propagator(1.0, 0.0)).unwrap();
        let expected = f.scaled(Complex64::from_polar(1.0, -9.0));
        assert!(out.max_abs_diff(&expected) < 1e-13);
    }

    #[test]
    fn non_finite_symbol_rejected() {
        let g = TorusGrid::new(1, 1.0, 8).unwrap();
        let f = SpectralField::zeros(&g);
        let err = apply_multiplier(&f, |xi| c(1.0 / xi[0])).unwrap_err();
        assert_eq!(err, Error::NonFiniteSymbol { index: 0 });
    }

    #[test]
    fn shift_is_lattice_translation() {
        let g = TorusGrid::new(1, 1.0, 8).unwrap();
        let f = SpectralField::from_real(&g, &[0., 1., 2., 3., 4., 5., 6., 7.]).unwrap();
        let s = f.shifted(&[2]);
        assert_eq!(s.values()[2].re, 0.0);
        assert_eq!(s.values()[0].re, 6.0);
    }
}
