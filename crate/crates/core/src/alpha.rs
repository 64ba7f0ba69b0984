use std::f64::consts::TAU;
use std::fmt;

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The common pairwise inner product of an equi-separated family, held in
/// polar form.
///
/// The phase is always normalized to `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InnerProduct {
    modulus: f64,
    phase: f64,
}

impl InnerProduct {
    pub const ZERO: InnerProduct = InnerProduct {
        modulus: 0.0,
        phase: 0.0,
    };

    pub fn new(modulus: f64, phase: f64) -> Result<Self> {
        if !modulus.is_finite() || !(0.0..=1.0).contains(&modulus) {
            return Err(Error::InvalidArgument(format!(
                "alpha modulus must lie in [0, 1], got {modulus}"
            )));
        }
        if !phase.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "alpha phase must be finite, got {phase}"
            )));
        }
        Ok(InnerProduct {
            modulus,
            phase: wrap_phase(phase),
        })
    }

    /// Builds from a complex number. A zero value gets phase 0.
    pub fn from_complex(z: Complex<f64>) -> Result<Self> {
        Self::new(z.norm(), z.im.atan2(z.re))
    }

    /// Real inner product `x`; negative values carry phase π.
    pub fn real(x: f64) -> Result<Self> {
        if x < 0.0 {
            Self::new(-x, std::f64::consts::PI)
        } else {
            Self::new(x, 0.0)
        }
    }

    pub fn modulus(&self) -> f64 {
        self.modulus
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn to_complex(&self) -> Complex<f64> {
        Complex::from_polar(self.modulus, self.phase)
    }

    pub fn with_modulus(&self, modulus: f64) -> Result<Self> {
        Self::new(modulus, self.phase)
    }
}

impl fmt::Display for InnerProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·e^(i·{})", self.modulus, self.phase)
    }
}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_phase(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if t >= TAU {
        0.0
    } else {
        t
    }
}
