//! Explicit state vectors realizing an equi-separated Gram matrix.

use nalgebra::Complex;

use crate::alpha::{wrap_phase, InnerProduct};
use crate::error::{Error, Result};
use crate::gram::{build_gram, check_n, GramMatrix};
use crate::linalg::{braket, CMatrix, CVector};
use crate::petal::{boundary_modulus, is_allowed};

/// Eigenvalues below this fraction of the largest are treated as zero.
pub const RANK_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct StateFamily {
    pub n: usize,
    pub alpha: InnerProduct,
    /// `n` unit vectors of dimension `rank`.
    pub vectors: Vec<CVector>,
    pub rank: usize,
}

impl StateFamily {
    pub fn dim(&self) -> usize {
        self.rank
    }

    /// The vectors as the columns of a `rank × n` matrix.
    pub fn as_columns(&self) -> CMatrix {
        CMatrix::from_columns(&self.vectors)
    }

    /// Pairwise inner products `⟨v_j|v_k⟩`.
    pub fn gram(&self) -> CMatrix {
        let v = self.as_columns();
        v.adjoint() * v
    }

    /// `‖Σ_k c_k v_k‖`.
    pub fn combination_norm(&self, coefficients: &CVector) -> f64 {
        (self.as_columns() * coefficients).norm()
    }
}

/// Factorizes `G = V†V` with `V = diag(√λ) U†` over the numerically nonzero
/// part of the spectrum; the columns of `V` are the states.
pub fn synthesize_family(n: usize, alpha: InnerProduct) -> Result<StateFamily> {
    check_n(n, 2)?;
    if !is_allowed(n, alpha)? {
        return Err(Error::Forbidden {
            n,
            modulus: alpha.modulus(),
            theta: alpha.phase(),
            boundary: boundary_modulus(n, alpha.phase())?,
        });
    }
    let gram = build_gram(n, alpha)?;
    Ok(factorize(&gram))
}

fn factorize(gram: &GramMatrix) -> StateFamily {
    let eig = gram.eigen();
    let rank = eig.rank(RANK_THRESHOLD);
    let n = gram.n();
    let mut factor = CMatrix::zeros(rank, n);
    for r in 0..rank {
        let scale = eig.values[r].sqrt();
        for k in 0..n {
            factor[(r, k)] = eig.vectors[(k, r)].conj() * scale;
        }
    }
    let vectors = (0..n).map(|k| factor.column(k).into_owned()).collect();
    StateFamily {
        n,
        alpha: gram.alpha(),
        vectors,
        rank,
    }
}

/// The unique (up to a global unitary) dependent family at phase `theta`,
/// spanning `n − 1` dimensions.
pub fn synthesize_ld_family(n: usize, theta: f64) -> Result<StateFamily> {
    check_n(n, 3)?;
    if !theta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "theta must be finite, got {theta}"
        )));
    }
    if wrap_phase(theta) == 0.0 {
        return Err(Error::SingularPhase);
    }
    let modulus = boundary_modulus(n, theta)?;
    synthesize_family(n, InnerProduct::new(modulus, theta)?)
}

/// Largest deviation `|⟨v_j|v_k⟩ − G_jk|`, diagonal included.
pub fn verify_gram(family: &StateFamily) -> Result<f64> {
    let target = build_gram(family.n, family.alpha)?;
    let mut worst: f64 = 0.0;
    for j in 0..family.n {
        for k in 0..family.n {
            let got = braket(&family.vectors[j], &family.vectors[k]);
            worst = worst.max((got - target.entries()[(j, k)]).norm());
        }
    }
    Ok(worst)
}

/// Embeds `v` into a longer zero-padded vector starting at `offset`.
pub(crate) fn embed(v: &CVector, dim: usize, offset: usize) -> CVector {
    let mut out = CVector::from_element(dim, Complex::new(0.0, 0.0));
    out.rows_mut(offset, v.len()).copy_from(v);
    out
}
