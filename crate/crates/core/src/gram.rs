//! Gram matrices of equi-separated families and their determinant.
//!
//! The Gram matrix of `n` unit vectors whose pairwise inner products all
//! equal `α` has ones on the diagonal, `α` above it and `ᾱ` below. The family
//! is linearly independent exactly when the determinant is nonzero, and it
//! exists at all only when the matrix is positive semidefinite.

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::alpha::InnerProduct;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, HermitianEigen};
use crate::petal::boundary_modulus;

/// Default tolerance for deciding linear dependence.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Below this `|sin θ|` the determinant switches to the real-axis form.
const REAL_AXIS_SIN: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    n: usize,
    alpha: InnerProduct,
    entries: CMatrix,
}

impl GramMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> InnerProduct {
        self.alpha
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn eigen(&self) -> HermitianEigen {
        HermitianEigen::new(&self.entries)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyKind {
    LinearlyIndependent,
    LinearlyDependent,
    Forbidden,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub kind: FamilyKind,
    pub determinant: f64,
    pub boundary_modulus: f64,
}

pub(crate) fn check_n(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::InvalidArgument(format!(
            "n must be at least {min}, got {n}"
        )));
    }
    Ok(())
}

pub fn build_gram(n: usize, alpha: InnerProduct) -> Result<GramMatrix> {
    check_n(n, 2)?;
    let a = alpha.to_complex();
    let entries = CMatrix::from_fn(n, n, |j, k| match j.cmp(&k) {
        std::cmp::Ordering::Less => a,
        std::cmp::Ordering::Equal => Complex::new(1.0, 0.0),
        std::cmp::Ordering::Greater => a.conj(),
    });
    Ok(GramMatrix { n, alpha, entries })
}

/// Closed-form determinant of the `n × n` equi-separated Gram matrix.
///
/// Off the real axis this is `(ᾱ(1−α)^n − α(1−ᾱ)^n) / (ᾱ − α)`, which reduces
/// to `−Im(ᾱ(1−α)^n) / Im(α)`. Near the real axis the denominator vanishes and
/// the real form `[1 + (n−1)x](1−x)^(n−1)` with `x = ±|α|` is used instead.
pub fn det_closed_form(n: usize, alpha: InnerProduct) -> Result<f64> {
    check_n(n, 2)?;
    let m = alpha.modulus();
    let theta = alpha.phase();
    if m == 0.0 {
        return Ok(1.0);
    }
    if theta.sin().abs() < REAL_AXIS_SIN {
        let x = if theta.cos() > 0.0 { m } else { -m };
        return Ok(real_axis_det(n, x));
    }
    let a = alpha.to_complex();
    let w = a.conj() * (Complex::new(1.0, 0.0) - a).powi(n as i32);
    Ok(-w.im / a.im)
}

fn real_axis_det(n: usize, x: f64) -> f64 {
    (1.0 + (n as f64 - 1.0) * x) * (1.0 - x).powi(n as i32 - 1)
}

/// Determinant through a dense LU factorization; the reference against which
/// [`det_closed_form`] is checked.
pub fn det_numeric(gram: &GramMatrix) -> f64 {
    let det = gram.entries.clone().lu().determinant();
    debug_assert!(
        det.im.abs() <= 1e-9 * det.re.abs().max(1.0),
        "Hermitian determinant has imaginary part {}",
        det.im
    );
    det.re
}

pub fn classify(n: usize, alpha: InnerProduct, tolerance: f64) -> Result<Classification> {
    check_n(n, 2)?;
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tolerance}"
        )));
    }
    let boundary = boundary_modulus(n, alpha.phase())?;
    let determinant = det_closed_form(n, alpha)?;
    let gap = alpha.modulus() - boundary;
    let kind = if gap > tolerance {
        FamilyKind::Forbidden
    } else if gap.abs() <= tolerance {
        FamilyKind::LinearlyDependent
    } else {
        FamilyKind::LinearlyIndependent
    };
    Ok(Classification {
        kind,
        determinant,
        boundary_modulus: boundary,
    })
}

/// Nonzero coefficients `A_k` with `Σ A_k |α_k⟩ = 0`, if the family is
/// dependent: a unit null vector of the Gram matrix.
pub fn null_coefficients(gram: &GramMatrix, tolerance: f64) -> Option<CVector> {
    let eig = gram.eigen();
    if eig.min_value() < tolerance {
        Some(eig.vectors.column(gram.n - 1).into_owned())
    } else {
        None
    }
}
