use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The inner product lies outside the petal region for this `n`.
    #[error(
        "alpha modulus {modulus} exceeds the petal boundary {boundary} for n={n} at theta={theta}"
    )]
    Forbidden {
        n: usize,
        modulus: f64,
        theta: f64,
        boundary: f64,
    },

    /// The family is linearly dependent where an independent one is required.
    #[error("alpha modulus {modulus} lies on the petal boundary {boundary} for n={n}; the family is linearly dependent")]
    OnBoundary {
        n: usize,
        modulus: f64,
        boundary: f64,
    },

    /// theta = 0: every boundary state coincides.
    #[error("theta = 0 is singular: the linearly dependent states all coincide")]
    SingularPhase,

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// True for errors that come from an out-of-domain inner product rather
    /// than from malformed arguments.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::Forbidden { .. } | Error::OnBoundary { .. } | Error::SingularPhase
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
