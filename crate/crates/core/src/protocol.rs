//! The two-stage discrimination scheme.
//!
//! Stage one maps each input `|α_k⟩` isometrically to
//! `√(1−|s|²)·|k⟩ ⊕ s·|α_k^LD⟩`: a conclusive block spanned by an orthonormal
//! basis and an ambiguous block holding the dependent family at the same
//! phase. Preserving inner products fixes `|s|² = |α| / b(n, θ)`.
//!
//! Stage two runs a minimum-error measurement on the ambiguous block. Two
//! figures are provided for it: the closed form
//! `P_ci = 1 / (1 + (n−1)·b(n, θ)²)` ([`p_correct_id`]) and the Born-rule
//! success of the actual square-root measurement ([`srm_correct_probability`]).
//! They coincide only where the dependent family is a tight frame (θ = π);
//! elsewhere the closed form is smaller.

use std::ops::Range;

use nalgebra::Complex;
use serde::Serialize;

use crate::alpha::{wrap_phase, InnerProduct};
use crate::error::{Error, Result};
use crate::gram::{check_n, classify, FamilyKind, DEFAULT_TOLERANCE};
use crate::linalg::{expectation, max_abs_diff, projector, CMatrix, CVector, HermitianEigen};
use crate::petal::{boundary_modulus, is_allowed};
use crate::states::{embed, synthesize_family, synthesize_ld_family, StateFamily};

/// Slack allowed on the sum of a prior vector.
pub const PRIOR_SUM_TOLERANCE: f64 = 1e-12;

/// Support cut for `S^{-1/2}`, relative to the largest eigenvalue of `S`.
const SRM_SUPPORT_CUT: f64 = 1e-10;

/// Largest tolerated deviation of `M†M` from the identity.
const ISOMETRY_TOLERANCE: f64 = 1e-9;

fn forbidden(n: usize, alpha: InnerProduct) -> Result<Error> {
    Ok(Error::Forbidden {
        n,
        modulus: alpha.modulus(),
        theta: alpha.phase(),
        boundary: boundary_modulus(n, alpha.phase())?,
    })
}

fn require_allowed(n: usize, alpha: InnerProduct) -> Result<()> {
    check_n(n, 2)?;
    if is_allowed(n, alpha)? {
        Ok(())
    } else {
        Err(forbidden(n, alpha)?)
    }
}

fn require_nonzero_phase(n: usize, theta: f64) -> Result<f64> {
    check_n(n, 3)?;
    if !theta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "theta must be finite, got {theta}"
        )));
    }
    let theta = wrap_phase(theta);
    if theta == 0.0 {
        return Err(Error::SingularPhase);
    }
    Ok(theta)
}

/// `|s|²`, the probability that stage one fails.
pub fn split_amplitude(n: usize, alpha: InnerProduct) -> Result<f64> {
    require_allowed(n, alpha)?;
    let b = boundary_modulus(n, alpha.phase())?;
    Ok((alpha.modulus() / b).min(1.0))
}

/// Probability that stage one identifies the state unambiguously. Does not
/// depend on the priors.
pub fn p_success(n: usize, alpha: InnerProduct) -> Result<f64> {
    Ok(1.0 - split_amplitude(n, alpha)?)
}

/// `|a|² = 1 / (1 + (n−1)·b(n, θ)²)`.
pub fn min_err_amplitude(n: usize, theta: f64) -> Result<f64> {
    let theta = require_nonzero_phase(n, theta)?;
    let b = boundary_modulus(n, theta)?;
    Ok(1.0 / (1.0 + (n as f64 - 1.0) * b * b))
}

/// Closed-form probability of correctly identifying a dependent state in
/// stage two; equal to [`min_err_amplitude`] for any priors.
pub fn p_correct_id(n: usize, theta: f64) -> Result<f64> {
    min_err_amplitude(n, theta)
}

/// First-order large-`n` expansion `1 − (θ−π)² / (n·sin²θ)` of
/// [`p_correct_id`].
pub fn p_ci_large_n(n: usize, theta: f64) -> Result<f64> {
    let theta = require_nonzero_phase(n, theta)?;
    let d = theta - std::f64::consts::PI;
    if d.abs() < 1e-12 {
        return Ok(1.0);
    }
    let s = theta.sin();
    Ok(1.0 - d * d / (n as f64 * s * s))
}

/// Stage-one map restricted to the span of the inputs.
///
/// Output coordinates `0..n` are the conclusive block, `n..2n−1` the
/// ambiguous block.
#[derive(Debug, Clone)]
pub struct Isometry {
    pub input_dim: usize,
    pub output_dim: usize,
    pub matrix: CMatrix,
    pub s_squared: f64,
    /// The synthesized inputs the map was solved against.
    pub inputs: StateFamily,
    /// Dependent family carried by the ambiguous block, before scaling by `s`.
    pub ambiguous_states: StateFamily,
}

impl Isometry {
    pub fn conclusive_block(&self) -> Range<usize> {
        0..self.input_dim
    }

    pub fn ambiguous_block(&self) -> Range<usize> {
        self.input_dim..self.output_dim
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        &self.matrix * v
    }

    /// Born probability that the ancilla reports the conclusive block.
    pub fn conclusive_probability(&self, v: &CVector) -> f64 {
        let out = self.apply(v);
        out.rows_range(self.conclusive_block()).norm_squared()
    }

    /// `max |M†M − I|`.
    pub fn defect(&self) -> f64 {
        max_abs_diff(
            &(self.matrix.adjoint() * &self.matrix),
            &CMatrix::identity(self.input_dim, self.input_dim),
        )
    }

    /// The image `√(1−|s|²)·e_k ⊕ s·|α_k^LD⟩` that input `k` must reach.
    pub fn target_image(&self, k: usize) -> CVector {
        let mut w = self.ambiguous_states.vectors[k].scale(self.s_squared.sqrt());
        w = embed(&w, self.output_dim, self.input_dim);
        w[k] += Complex::new((1.0 - self.s_squared).sqrt(), 0.0);
        w
    }
}

/// The dependent family sharing `alpha`'s phase: rank `n−1` for `θ ≠ 0`, a
/// single repeated state for `θ = 0`.
fn ambiguous_family(n: usize, theta: f64) -> Result<StateFamily> {
    let b = boundary_modulus(n, theta)?;
    synthesize_family(n, InnerProduct::new(b, theta)?)
}

pub fn build_isometry(n: usize, alpha: InnerProduct) -> Result<Isometry> {
    check_n(n, 2)?;
    let class = classify(n, alpha, DEFAULT_TOLERANCE)?;
    match class.kind {
        FamilyKind::Forbidden => return Err(forbidden(n, alpha)?),
        FamilyKind::LinearlyDependent => {
            return Err(Error::OnBoundary {
                n,
                modulus: alpha.modulus(),
                boundary: class.boundary_modulus,
            })
        }
        FamilyKind::LinearlyIndependent => {}
    }
    let inputs = synthesize_family(n, alpha)?;
    if inputs.rank != n {
        return Err(Error::OnBoundary {
            n,
            modulus: alpha.modulus(),
            boundary: class.boundary_modulus,
        });
    }
    let ambiguous_states = ambiguous_family(n, alpha.phase())?;
    let s_squared = split_amplitude(n, alpha)?;
    let output_dim = 2 * n - 1;

    let mut iso = Isometry {
        input_dim: n,
        output_dim,
        matrix: CMatrix::zeros(output_dim, n),
        s_squared,
        inputs,
        ambiguous_states,
    };
    let targets = CMatrix::from_columns(&(0..n).map(|k| iso.target_image(k)).collect::<Vec<_>>());
    let basis_inv = iso
        .inputs
        .as_columns()
        .try_inverse()
        .ok_or_else(|| Error::Numerical("input family is singular".into()))?;
    iso.matrix = targets * basis_inv;

    let defect = iso.defect();
    if defect > ISOMETRY_TOLERANCE {
        return Err(Error::Numerical(format!(
            "stage-one map deviates from an isometry by {defect:e}"
        )));
    }
    Ok(iso)
}

/// Square-root measurement on the dependent family at phase `theta`.
#[derive(Debug, Clone)]
pub struct MinErrMeasurement {
    pub n: usize,
    pub theta: f64,
    /// The measured family, living in `n − 1` dimensions.
    pub states: StateFamily,
    /// `E_k = S^{-1/2}|α_k⟩⟨α_k|S^{-1/2}`, `S = Σ_j |α_j⟩⟨α_j|`.
    pub povm_elements: Vec<CMatrix>,
    /// Orthonormal `ω_k` in `n` dimensions whose projections onto the first
    /// `n − 1` coordinates are the SRM vectors `S^{-1/2}|α_k⟩`.
    pub dilated_states: Option<Vec<CVector>>,
}

impl MinErrMeasurement {
    pub fn dim(&self) -> usize {
        self.states.rank
    }

    /// `⟨α_k|E_m|α_k⟩`.
    pub fn born_probability(&self, prepared: usize, outcome: usize) -> f64 {
        expectation(&self.povm_elements[outcome], &self.states.vectors[prepared])
    }

    /// Row `k` holds the outcome distribution for prepared state `k`.
    pub fn born_matrix(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|k| (0..self.n).map(|m| self.born_probability(k, m)).collect())
            .collect()
    }

    /// Average probability of a correct outcome under uniform priors.
    pub fn correct_probability(&self) -> f64 {
        (0..self.n)
            .map(|k| self.born_probability(k, k))
            .sum::<f64>()
            / self.n as f64
    }

    /// `max |Σ E_k − I|`.
    pub fn completeness_defect(&self) -> f64 {
        let d = self.dim();
        let total = self
            .povm_elements
            .iter()
            .fold(CMatrix::zeros(d, d), |acc, e| acc + e);
        max_abs_diff(&total, &CMatrix::identity(d, d))
    }

    /// Smallest eigenvalue over all POVM elements.
    pub fn min_eigenvalue(&self) -> f64 {
        self.povm_elements
            .iter()
            .map(|e| HermitianEigen::new(e).min_value())
            .fold(f64::INFINITY, f64::min)
    }

    /// `max |⟨ω_j|ω_k⟩ − δ_jk|`, if a dilation exists.
    pub fn dilation_defect(&self) -> Option<f64> {
        let omegas = self.dilated_states.as_ref()?;
        let w = CMatrix::from_columns(omegas);
        Some(max_abs_diff(
            &(w.adjoint() * w),
            &CMatrix::identity(self.n, self.n),
        ))
    }

    /// `max_k ‖P ω_k − a·|α_k⟩‖` with `P` the projection onto the measured
    /// subspace and `a = √a_squared`: how far the dilation is from the form
    /// `ω_k = √(1−|a|²)|Λ_k⟩ + a|α_k⟩`.
    pub fn projection_defect(&self, a_squared: f64) -> Option<f64> {
        let omegas = self.dilated_states.as_ref()?;
        let a = a_squared.sqrt();
        let d = self.dim();
        Some(
            omegas
                .iter()
                .zip(&self.states.vectors)
                .map(|(w, v)| (w.rows(0, d) - v.scale(a)).norm())
                .fold(0.0, f64::max),
        )
    }
}

pub fn build_srm(n: usize, theta: f64) -> Result<MinErrMeasurement> {
    let theta = require_nonzero_phase(n, theta)?;
    let states = synthesize_ld_family(n, theta)?;
    let d = states.rank;

    let frame = CMatrix::zeros(d, d);
    let frame = states
        .vectors
        .iter()
        .fold(frame, |acc, v| acc + projector(v));
    let eig = HermitianEigen::new(&frame);
    let cut = SRM_SUPPORT_CUT * eig.max_value();
    let mut inv_sqrt = CMatrix::zeros(d, d);
    let mut support = 0;
    for (j, &lambda) in eig.values.iter().enumerate() {
        if lambda > cut {
            let u = eig.vectors.column(j).into_owned();
            inv_sqrt += projector(&u).scale(1.0 / lambda.sqrt());
            support += 1;
        }
    }

    let srm_vectors: Vec<CVector> = states.vectors.iter().map(|v| &inv_sqrt * v).collect();
    let povm_elements = srm_vectors.iter().map(projector).collect();
    let dilated_states = if support == d && d + 1 == n {
        Some(dilate(&srm_vectors))
    } else {
        None
    };

    Ok(MinErrMeasurement {
        n,
        theta,
        states,
        povm_elements,
        dilated_states,
    })
}

/// Extends a Parseval frame of `n` vectors in `n − 1` dimensions to an
/// orthonormal basis of `n` dimensions by appending one coordinate.
fn dilate(frame: &[CVector]) -> Vec<CVector> {
    let n = frame.len();
    let d = frame[0].len();
    let synthesis = CMatrix::from_columns(frame);
    // I − F†F is the rank-one projector onto the kernel of F.
    let residual = CMatrix::identity(n, n) - synthesis.adjoint() * &synthesis;
    let pivot = (0..n)
        .max_by(|&a, &b| {
            residual
                .column(a)
                .norm()
                .total_cmp(&residual.column(b).norm())
        })
        .expect("nonempty frame");
    let kernel = residual.column(pivot).normalize();

    frame
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let mut w = embed(v, d + 1, 0);
            w[d] = kernel[k].conj();
            w
        })
        .collect()
}

/// Born-rule success probability of the square-root measurement on the
/// dependent family at `theta`.
pub fn srm_correct_probability(n: usize, theta: f64) -> Result<f64> {
    Ok(build_srm(n, theta)?.correct_probability())
}

pub fn uniform_priors(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

pub fn validate_priors(n: usize, priors: &[f64]) -> Result<()> {
    if priors.len() != n {
        return Err(Error::InvalidArgument(format!(
            "expected {n} priors, got {}",
            priors.len()
        )));
    }
    if let Some(p) = priors.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(Error::InvalidArgument(format!(
            "priors must be finite and nonnegative, got {p}"
        )));
    }
    let sum: f64 = priors.iter().sum();
    if (sum - 1.0).abs() > PRIOR_SUM_TOLERANCE {
        return Err(Error::InvalidArgument(format!(
            "priors must sum to 1, got {sum}"
        )));
    }
    Ok(())
}

/// All derived quantities of the scheme at one inner product.
///
/// `a_squared` and `p_correct_id` are absent when the second stage carries no
/// information: at `θ = 0`, where every dependent state coincides, and for
/// `n = 2`, where the dependent pair is a single ray.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(into = "ProtocolRecord")]
pub struct ProtocolSpec {
    pub n: usize,
    pub alpha: InnerProduct,
    pub s_squared: f64,
    pub a_squared: Option<f64>,
    pub p_success: f64,
    pub p_correct_id: Option<f64>,
    pub p_total: f64,
    pub p_err: f64,
    pub p_no_info: f64,
}

/// Flat serialized form of [`ProtocolSpec`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolRecord {
    pub n: usize,
    pub alpha_mod: f64,
    pub alpha_phase: f64,
    pub s_squared: f64,
    pub a_squared: Option<f64>,
    pub p_success: f64,
    pub p_correct_id: Option<f64>,
    pub p_total: f64,
    pub p_err: f64,
    pub p_no_info: f64,
}

impl From<ProtocolSpec> for ProtocolRecord {
    fn from(p: ProtocolSpec) -> Self {
        ProtocolRecord {
            n: p.n,
            alpha_mod: p.alpha.modulus(),
            alpha_phase: p.alpha.phase(),
            s_squared: p.s_squared,
            a_squared: p.a_squared,
            p_success: p.p_success,
            p_correct_id: p.p_correct_id,
            p_total: p.p_total,
            p_err: p.p_err,
            p_no_info: p.p_no_info,
        }
    }
}

pub fn complete_probabilities(
    n: usize,
    alpha: InnerProduct,
    priors: &[f64],
) -> Result<ProtocolSpec> {
    check_n(n, 2)?;
    validate_priors(n, priors)?;
    let s_squared = split_amplitude(n, alpha)?;
    let p_success = 1.0 - s_squared;
    let p_correct_id = if n >= 3 && alpha.phase() != 0.0 {
        Some(p_correct_id(n, alpha.phase())?)
    } else {
        None
    };
    let (p_total, p_err) = match p_correct_id {
        Some(pci) => (
            p_success + (1.0 - p_success) * pci,
            (1.0 - p_success) * (1.0 - pci),
        ),
        None => (p_success, 1.0 - p_success),
    };
    Ok(ProtocolSpec {
        n,
        alpha,
        s_squared,
        a_squared: p_correct_id,
        p_success,
        p_correct_id,
        p_total,
        p_err,
        p_no_info: 1.0 - p_total,
    })
}
