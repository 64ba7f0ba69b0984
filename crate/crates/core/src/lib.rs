//! # equisep
//!
//! Families of `n` unit vectors whose pairwise inner products all equal one
//! complex number `α`, and a two-stage scheme for telling them apart.
//!
//! - [`gram`]: the Gram matrix, its closed-form and numeric determinants, and
//!   independent / dependent / forbidden classification.
//! - [`petal`]: the boundary `b(n, θ)` of the allowed region in the unit disk
//!   and sampled grids over it.
//! - [`states`]: explicit vectors realizing a given `(n, α)`.
//! - [`protocol`]: the unambiguous stage (an isometry onto conclusive and
//!   ambiguous blocks), the minimum-error stage (square-root measurement), and
//!   the composite probabilities.
//! - [`montecarlo`]: seeded simulation of the whole scheme.

#![forbid(unsafe_code)]

pub mod alpha;
pub mod error;
pub mod gram;
pub mod linalg;
pub mod montecarlo;
pub mod petal;
pub mod protocol;
pub mod states;

pub use alpha::InnerProduct;
pub use error::{Error, Result};
pub use gram::{
    build_gram, classify, det_closed_form, det_numeric, null_coefficients, Classification,
    FamilyKind, GramMatrix, DEFAULT_TOLERANCE,
};
pub use montecarlo::{
    compare, run_trials, run_trials_with, DeviationSummary, SimulationOptions, SimulationReport,
};
pub use petal::{
    boundary_modulus, imag_axis_range, is_allowed, petal_grid, real_axis_range, CellStatus,
    GridCell, PetalBoundary, PetalGrid,
};
pub use protocol::{
    build_isometry, build_srm, complete_probabilities, min_err_amplitude, p_ci_large_n,
    p_correct_id, p_success, split_amplitude, srm_correct_probability, uniform_priors, Isometry,
    MinErrMeasurement, ProtocolSpec,
};
pub use states::{synthesize_family, synthesize_ld_family, verify_gram, StateFamily};
