use std::fmt;
use std::sync::Arc;

use crate::{Error, Result};

/// User-supplied radial profile `r ↦ |f(r)|²`.
#[derive(Clone)]
pub struct RadialProfile {
    name: String,
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    cutoff: f64,
    breakpoints: Vec<f64>,
}

impl RadialProfile {
    /// `cutoff` is a radius beyond which the profile is negligible.
    pub fn new(
        name: impl Into<String>,
        cutoff: f64,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(cutoff.is_finite() && cutoff > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "profile cutoff {cutoff} must be positive"
            )));
        }
        Ok(Self {
            name: name.into(),
            eval: Arc::new(eval),
            cutoff,
            breakpoints: Vec::new(),
        })
    }

    /// Radii where the profile is not smooth (jumps or kinks).
    pub fn with_breakpoints(mut self, mut bps: Vec<f64>) -> Self {
        bps.retain(|b| *b > 0.0 && *b < self.cutoff);
        bps.sort_by(f64::total_cmp);
        self.breakpoints = bps;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialProfile")
            .field("name", &self.name)
            .field("cutoff", &self.cutoff)
            .finish()
    }
}

/// Radial distribution function, stored through `|f|²`.
#[derive(Clone, Debug)]
pub enum Distribution {
    /// `1/(e^{(r²-μ)/T} - 1)`, `T > 0`, `μ < 0`.
    Bose {
        temperature: f64,
        mu: f64,
    },
    /// `1/(e^{(r²-μ)/T} + 1)`, `T > 0`.
    Fermi {
        temperature: f64,
        mu: f64,
    },
    /// `1_{r² ≤ μ}`, `μ > 0`.
    ZeroTempFermi {
        mu: f64,
    },
    Custom(RadialProfile),
}

// e^{-45} ≈ 3e-20: thermal tails are cut where the exponent reaches this.
const THERMAL_TAIL_EXPONENT: f64 = 45.0;

impl Distribution {
    pub fn bose(temperature: f64, mu: f64) -> Result<Self> {
        check_temperature(temperature)?;
        if !(mu < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Bose distribution needs mu < 0 (got {mu}); mu >= 0 puts a pole on the support"
            )));
        }
        Ok(Self::Bose { temperature, mu })
    }

    pub fn fermi(temperature: f64, mu: f64) -> Result<Self> {
        check_temperature(temperature)?;
        if !mu.is_finite() {
            return Err(Error::InvalidParameter(format!("mu must be finite, got {mu}")));
        }
        Ok(Self::Fermi { temperature, mu })
    }

    pub fn zero_temp_fermi(mu: f64) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "zero-temperature Fermi sea needs mu > 0, got {mu}"
            )));
        }
        Ok(Self::ZeroTempFermi { mu })
    }

    /// `|f|² = e^{-r²/width²}`.
    pub fn gaussian(width: f64) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gaussian width must be positive, got {width}"
            )));
        }
        let cutoff = width * THERMAL_TAIL_EXPONENT.sqrt();
        Ok(Self::Custom(RadialProfile::new("gaussian", cutoff, move |r| {
            (-(r / width).powi(2)).exp()
        })?))
    }

    /// `f ≡ 0`.
    pub fn zero() -> Self {
        Self::Custom(RadialProfile::new("zero", 1.0, |_| 0.0).expect("valid cutoff"))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Self::Custom(p) if p.name == "zero")
    }

    pub fn name(&self) -> &str {
        match self {
            Self::Bose { .. } => "bose",
            Self::Fermi { .. } => "fermi",
            Self::ZeroTempFermi { .. } => "zero-temp-fermi",
            Self::Custom(p) => &p.name,
        }
    }

    /// `|f(r)|²`.
    pub fn eval_f2(&self, r: f64) -> f64 {
        let r = r.abs();
        match *self {
            Self::Bose { temperature, mu } => 1.0 / ((r * r - mu) / temperature).exp_m1(),
            Self::Fermi { temperature, mu } => {
                let x = (r * r - mu) / temperature;
                if x > 700.0 {
                    0.0
                } else {
                    1.0 / (x.exp() + 1.0)
                }
            }
            Self::ZeroTempFermi { mu } => {
                if r * r <= mu {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Custom(ref p) => (p.eval)(r),
        }
    }

    /// `∂_r |f|²`, analytic for the thermal kinds and a central difference otherwise.
    /// At the jump of the zero-temperature profile this is `-∞`.
    pub fn d_f2(&self, r: f64) -> f64 {
        match *self {
            Self::Bose { temperature, .. } => {
                let g = self.eval_f2(r);
                -2.0 * r / temperature * g * (1.0 + g)
            }
            Self::Fermi { temperature, .. } => {
                let g = self.eval_f2(r);
                -2.0 * r / temperature * g * (1.0 - g)
            }
            Self::ZeroTempFermi { mu } => {
                if (r - mu.sqrt()).abs() < 1e-15 {
                    f64::NEG_INFINITY
                } else {
                    0.0
                }
            }
            Self::Custom(_) => {
                let h = 1e-6 * r.max(1e-3);
                (self.eval_f2(r + h) - self.eval_f2((r - h).max(0.0))) / (r + h - (r - h).max(0.0))
            }
        }
    }

    /// Radius beyond which `|f|²` is negligible.
    pub fn cutoff(&self) -> f64 {
        match *self {
            Self::Bose { temperature, .. } => (THERMAL_TAIL_EXPONENT * temperature).sqrt(),
            Self::Fermi { temperature, mu } => (mu.max(0.0) + THERMAL_TAIL_EXPONENT * temperature).sqrt(),
            Self::ZeroTempFermi { mu } => mu.sqrt(),
            Self::Custom(ref p) => p.cutoff,
        }
    }

    /// Radii inside `(0, cutoff)` where the profile is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Self::Custom(p) => p.breakpoints.clone(),
            _ => Vec::new(),
        }
    }
}

fn check_temperature(t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "temperature must be positive, got {t}"
        )))
    }
}

/// `|f(r)|²` for any distribution kind.
pub fn eval_f2(f: &Distribution, r: f64) -> f64 {
    f.eval_f2(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thermal_values_at_origin() {
        let fermi = Distribution::fermi(1.0, 0.0).unwrap();
        assert_eq!(fermi.eval_f2(0.0), 0.5);
        let bose = Distribution::bose(1.0, -1.0).unwrap();
        let expect = 1.0 / (1f64.exp() - 1.0);
        assert!((bose.eval_f2(0.0) - expect).abs() < 1e-15);
        assert!((expect - 0.58198).abs() < 1e-5);
    }

    #[test]
    fn zero_temperature_indicator() {
        let f = Distribution::zero_temp_fermi(1.0).unwrap();
        assert_eq!(f.eval_f2(0.5), 1.0);
        assert_eq!(f.eval_f2(1.5), 0.0);
        assert_eq!(f.eval_f2(1.0), 1.0);
    }

    #[test]
    fn bose_rejects_nonnegative_mu() {
        assert!(Distribution::bose(1.0, 0.0).is_err());
        assert!(Distribution::bose(1.0, 0.3).is_err());
        assert!(Distribution::bose(0.0, -1.0).is_err());
        assert!(Distribution::zero_temp_fermi(0.0).is_err());
    }

    #[test]
    fn thermal_kinds_are_monotone() {
        let kinds = [
            Distribution::fermi(1.0, 0.0).unwrap(),
            Distribution::fermi(0.3, 2.0).unwrap(),
            Distribution::bose(2.0, -0.5).unwrap(),
        ];
        for f in &kinds {
            let mut prev = f.eval_f2(0.0);
            for i in 1..4000 {
                let r = i as f64 * f.cutoff() / 4000.0;
                let v = f.eval_f2(r);
                assert!(v <= prev, "{} at r={r}", f.name());
                assert!(v >= 0.0 && v.is_finite());
                prev = v;
            }
        }
    }

    #[test]
    fn analytic_derivative_matches_difference() {
        let f = Distribution::fermi(0.7, 0.4).unwrap();
        for &r in &[0.1, 0.5, 1.0, 2.0] {
            let h = 1e-6;
            let fd = (f.eval_f2(r + h) - f.eval_f2(r - h)) / (2.0 * h);
            assert!((f.d_f2(r) - fd).abs() < 1e-8);
        }
    }
}
