use std::fmt;
use std::sync::Arc;

use crate::{Error, Result};

/// Pair interaction given through its (real, even, radial) Fourier transform `ŵ`.
#[derive(Clone)]
pub enum Potential {
    /// `ŵ ≡ amplitude`.
    Delta { amplitude: f64 },
    /// `ŵ(k) = amplitude · e^{-width² |k|² / 2}`.
    Gaussian { amplitude: f64, width: f64 },
    Custom {
        name: String,
        hat: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Delta { amplitude } => write!(f, "Delta({amplitude})"),
            Self::Gaussian { amplitude, width } => write!(f, "Gaussian({amplitude}, {width})"),
            Self::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

impl Potential {
    pub fn zero() -> Self {
        Self::Delta { amplitude: 0.0 }
    }

    pub fn delta(amplitude: f64) -> Result<Self> {
        if !amplitude.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "potential amplitude must be finite, got {amplitude}"
            )));
        }
        Ok(Self::Delta { amplitude })
    }

    pub fn gaussian(amplitude: f64, width: f64) -> Result<Self> {
        if !amplitude.is_finite() || !(width.is_finite() && width > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gaussian potential needs finite amplitude and positive width, got ({amplitude}, {width})"
            )));
        }
        Ok(Self::Gaussian { amplitude, width })
    }

    pub fn custom(name: impl Into<String>, hat: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::Custom {
            name: name.into(),
            hat: Arc::new(hat),
        }
    }

    /// `ŵ(k)` at `|k| = k_abs`.
    pub fn hat(&self, k_abs: f64) -> f64 {
        match self {
            Self::Delta { amplitude } => *amplitude,
            Self::Gaussian { amplitude, width } => amplitude * (-0.5 * (width * k_abs).powi(2)).exp(),
            Self::Custom { hat, .. } => hat(k_abs.abs()),
        }
    }

    pub fn hat_at_zero(&self) -> f64 {
        self.hat(0.0)
    }

    /// `ŵ ≡ 0`.
    pub fn is_zero(&self) -> bool {
        matches!(self, Self::Delta { amplitude } | Self::Gaussian { amplitude, .. } if *amplitude == 0.0)
    }

    /// `ŵ ≡ 1`, the case with a closed-form unstable band.
    pub fn is_unit_delta(&self) -> bool {
        matches!(self, Self::Delta { amplitude } if *amplitude == 1.0)
    }

    /// Same shape, amplitude multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        match self {
            Self::Delta { amplitude } => Self::Delta {
                amplitude: amplitude * s,
            },
            Self::Gaussian { amplitude, width } => Self::Gaussian {
                amplitude: amplitude * s,
                width: *width,
            },
            Self::Custom { name, hat } => {
                let hat = hat.clone();
                Self::Custom {
                    name: format!("{name}*{s}"),
                    hat: Arc::new(move |k| s * hat(k)),
                }
            }
        }
    }

    /// `sup (ŵ)_-` over `|k| ∈ [0, k_max]`, sampled.
    pub fn negative_part_sup(&self, k_max: f64) -> f64 {
        (0..=4096)
            .map(|i| (-self.hat(k_max * i as f64 / 4096.0)).max(0.0))
            .fold(0.0, f64::max)
    }
}
