//! Field amplitudes and global model parameters.

use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::ConfigError;

/// One complex field amplitude.
pub type ComplexAmp = Complex64;

/// Horizontal and vertical amplitudes of one spatial mode.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct JonesVector {
    pub h: ComplexAmp,
    pub v: ComplexAmp,
}

impl JonesVector {
    pub const ZERO: JonesVector = JonesVector {
        h: Complex64::new(0.0, 0.0),
        v: Complex64::new(0.0, 0.0),
    };

    pub fn new(h: ComplexAmp, v: ComplexAmp) -> Self {
        Self { h, v }
    }

    pub fn real(h: f64, v: f64) -> Self {
        Self::new(Complex64::new(h, 0.0), Complex64::new(v, 0.0))
    }

    /// Total intensity `|h|^2 + |v|^2`.
    pub fn norm_sqr(&self) -> f64 {
        self.h.norm_sqr() + self.v.norm_sqr()
    }

    pub fn scale(self, k: ComplexAmp) -> Self {
        Self::new(self.h * k, self.v * k)
    }

    pub fn is_finite(&self) -> bool {
        self.h.is_finite() && self.v.is_finite()
    }
}

impl Add for JonesVector {
    type Output = JonesVector;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.h + rhs.h, self.v + rhs.v)
    }
}

impl Sub for JonesVector {
    type Output = JonesVector;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.h - rhs.h, self.v - rhs.v)
    }
}

impl Neg for JonesVector {
    type Output = JonesVector;
    fn neg(self) -> Self {
        Self::new(-self.h, -self.v)
    }
}

impl Mul<f64> for JonesVector {
    type Output = JonesVector;
    fn mul(self, k: f64) -> Self {
        Self::new(self.h * k, self.v * k)
    }
}

/// Components of `v` along the rotated basis `(cos ψ, sin ψ)`, `(-sin ψ, cos ψ)`.
///
/// The first output component is the projection onto the axis at angle ψ, the
/// second onto the orthogonal axis.
pub fn jones_in_basis(v: JonesVector, angle: f64) -> JonesVector {
    let (s, c) = angle.sin_cos();
    JonesVector::new(v.h * c + v.v * s, -v.h * s + v.v * c)
}

/// Inverse of [`jones_in_basis`].
pub fn jones_from_basis(components: JonesVector, angle: f64) -> JonesVector {
    let (s, c) = angle.sin_cos();
    JonesVector::new(
        components.h * c - components.v * s,
        components.h * s + components.v * c,
    )
}

/// Zero-point field scale and detector threshold shared by an experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlobalConfig {
    pub sigma0: f64,
    pub gamma: f64,
}

impl GlobalConfig {
    /// Detector threshold giving a dark-count probability close to 0.001.
    pub const DEFAULT_GAMMA: f64 = 1.95;

    pub fn new(sigma0: f64, gamma: f64) -> Result<Self, ConfigError> {
        let config = Self { sigma0, gamma };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.sigma0.is_finite() && self.sigma0 > 0.0) {
            return Err(ConfigError::Sigma0(self.sigma0));
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(ConfigError::Gamma(self.gamma));
        }
        Ok(())
    }
}

impl Default for GlobalConfig {
    fn default() -> Self {
        Self {
            sigma0: FRAC_1_SQRT_2,
            gamma: Self::DEFAULT_GAMMA,
        }
    }
}
