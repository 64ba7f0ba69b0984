//! Small dense complex linear-algebra helpers on top of nalgebra.

use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Eigen-decomposition of a Hermitian matrix with a canonical ordering.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues, descending.
    pub values: Vec<f64>,
    /// Column `j` is the unit eigenvector for `values[j]`, phase-fixed so its
    /// largest-magnitude entry is real and positive.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn new(m: &CMatrix) -> Self {
        assert!(m.is_square(), "eigendecomposition needs a square matrix");
        let sym = (m + m.adjoint()).scale(0.5);
        let eig = sym.symmetric_eigen();

        let n = m.nrows();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

        let values = order.iter().map(|&j| eig.eigenvalues[j]).collect();
        let mut vectors = CMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            let mut col = eig.eigenvectors.column(src).into_owned();
            fix_phase(&mut col);
            vectors.set_column(dst, &col);
        }
        HermitianEigen { values, vectors }
    }

    pub fn min_value(&self) -> f64 {
        *self.values.last().expect("empty spectrum")
    }

    pub fn max_value(&self) -> f64 {
        self.values[0]
    }

    /// Number of eigenvalues above `rel_tol * max(λ_max, 0)`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let cut = rel_tol * self.max_value().max(0.0);
        self.values.iter().filter(|&&v| v > cut).count()
    }
}

/// Rotates `v` by a global phase so its largest-magnitude entry is real
/// positive. Ties go to the lowest index.
pub fn fix_phase(v: &mut CVector) {
    let mut best = 0;
    let mut best_norm = -1.0;
    for (i, z) in v.iter().enumerate() {
        let r = z.norm();
        if r > best_norm {
            best_norm = r;
            best = i;
        }
    }
    if best_norm > 0.0 {
        let phase = v[best].conj() / best_norm;
        *v *= phase;
        v[best] = Complex::new(v[best].re, 0.0);
    }
}

/// `⟨u|v⟩`, antilinear in the first argument.
pub fn braket(u: &CVector, v: &CVector) -> C64 {
    u.dotc(v)
}

/// Outer product `|u⟩⟨u|`.
pub fn projector(u: &CVector) -> CMatrix {
    u * u.adjoint()
}

/// `⟨u|m|u⟩`, real part.
pub fn expectation(m: &CMatrix, u: &CVector) -> f64 {
    braket(u, &(m * u)).re
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
