//! One-dimensional probability curves.

use std::f64::consts::TAU;

use equisep::{boundary_modulus, complete_probabilities, is_allowed, uniform_priors};
use equisep::{InnerProduct, Result};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModulusRow {
    pub alpha_mod: f64,
    pub p_success: f64,
}

/// A phase sample; both probabilities are absent where the modulus lies
/// outside the petal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseRow {
    pub theta: f64,
    pub p_success: Option<f64>,
    pub p_total: Option<f64>,
}

impl PhaseRow {
    pub fn is_gap(&self) -> bool {
        self.p_success.is_none()
    }
}

/// `points` moduli from 0 up to and including the boundary at `theta`.
pub fn modulus_sweep(n: usize, theta: f64, points: usize) -> Result<Vec<ModulusRow>> {
    let b = boundary_modulus(n, theta)?;
    (0..points)
        .into_par_iter()
        .map(|i| {
            let m = if i + 1 == points {
                b
            } else {
                b * i as f64 / (points - 1) as f64
            };
            let p = equisep::p_success(n, InnerProduct::new(m, theta)?)?;
            Ok(ModulusRow {
                alpha_mod: m,
                p_success: p,
            })
        })
        .collect()
}

/// `points` phases evenly spaced over `[0, 2π]` at fixed modulus.
pub fn phase_sweep(n: usize, modulus: f64, points: usize) -> Result<Vec<PhaseRow>> {
    let priors = uniform_priors(n);
    (0..points)
        .into_par_iter()
        .map(|i| {
            let theta = TAU * i as f64 / (points - 1) as f64;
            let alpha = InnerProduct::new(modulus, theta)?;
            if !is_allowed(n, alpha)? {
                return Ok(PhaseRow {
                    theta,
                    p_success: None,
                    p_total: None,
                });
            }
            let spec = complete_probabilities(n, alpha, &priors)?;
            Ok(PhaseRow {
                theta,
                p_success: Some(spec.p_success),
                p_total: Some(spec.p_total),
            })
        })
        .collect()
}
