//! Seeded self-consistency suite run by `equisep check`.

use std::f64::consts::TAU;

use equisep::linalg::braket;
use equisep::{
    boundary_modulus, build_gram, build_isometry, build_srm, det_closed_form, det_numeric,
    synthesize_family, verify_gram, InnerProduct, Result,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub const CHECK_TOLERANCE: f64 = 1e-9;

const ORACLE_CASES: usize = 500;
const LOCUS_CASES: usize = 1000;
const CONSTRUCTION_CASES: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyResult {
    pub property: &'static str,
    pub passed: bool,
    pub cases: usize,
    /// Largest violation seen; compared against `tolerance`.
    pub worst: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl PropertyResult {
    fn measured(property: &'static str, cases: usize, worst: f64) -> Self {
        PropertyResult {
            property,
            passed: worst <= CHECK_TOLERANCE,
            cases,
            worst,
            tolerance: CHECK_TOLERANCE,
            note: None,
        }
    }
}

fn disk_point(rng: &mut ChaCha8Rng) -> Result<InnerProduct> {
    let r: f64 = rng.random();
    InnerProduct::new(r.sqrt(), rng.random_range(0.0..TAU))
}

fn interior_point(n: usize, rng: &mut ChaCha8Rng) -> Result<InnerProduct> {
    let theta = rng.random_range(0.0..TAU);
    let f = rng.random_range(0.0..0.95);
    InnerProduct::new(f * boundary_modulus(n, theta)?, theta)
}

pub fn run_checks(n: usize, seed: u64) -> Result<Vec<PropertyResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(vec![
        determinant_oracle(n, &mut rng)?,
        boundary_root_locus(n)?,
        interior_positive(n)?,
        factorization(n, &mut rng)?,
        isometry(n, &mut rng)?,
        povm_completeness(n, &mut rng)?,
    ])
}

fn determinant_oracle(n: usize, rng: &mut ChaCha8Rng) -> Result<PropertyResult> {
    let mut worst: f64 = 0.0;
    for _ in 0..ORACLE_CASES {
        let a = disk_point(rng)?;
        let diff = det_closed_form(n, a)? - det_numeric(&build_gram(n, a)?);
        worst = worst.max(diff.abs());
    }
    Ok(PropertyResult::measured(
        "determinant_oracle",
        ORACLE_CASES,
        worst,
    ))
}

fn locus_phase(i: usize) -> f64 {
    TAU * i as f64 / LOCUS_CASES as f64
}

fn boundary_root_locus(n: usize) -> Result<PropertyResult> {
    let mut worst: f64 = 0.0;
    for i in 0..LOCUS_CASES {
        let t = locus_phase(i);
        let det = det_closed_form(n, InnerProduct::new(boundary_modulus(n, t)?, t)?)?;
        worst = worst.max(det.abs());
    }
    Ok(PropertyResult::measured(
        "boundary_root_locus",
        LOCUS_CASES,
        worst,
    ))
}

/// Counts phases where the determinant just inside the curve is not positive.
fn interior_positive(n: usize) -> Result<PropertyResult> {
    let mut bad = 0usize;
    for i in 0..LOCUS_CASES {
        let t = locus_phase(i);
        let a = InnerProduct::new(0.999 * boundary_modulus(n, t)?, t)?;
        if det_closed_form(n, a)? <= 0.0 {
            bad += 1;
        }
    }
    Ok(PropertyResult {
        property: "interior_positive",
        passed: bad == 0,
        cases: LOCUS_CASES,
        worst: bad as f64,
        tolerance: 0.0,
        note: None,
    })
}

fn factorization(n: usize, rng: &mut ChaCha8Rng) -> Result<PropertyResult> {
    let mut worst: f64 = 0.0;
    for _ in 0..CONSTRUCTION_CASES {
        worst = worst.max(verify_gram(&synthesize_family(
            n,
            interior_point(n, rng)?,
        )?)?);
    }
    Ok(PropertyResult::measured(
        "factorization",
        CONSTRUCTION_CASES,
        worst,
    ))
}

/// Unitarity defect, inner-product preservation and the per-input Born rule
/// of the stage-one isometry.
fn isometry(n: usize, rng: &mut ChaCha8Rng) -> Result<PropertyResult> {
    let mut worst: f64 = 0.0;
    for _ in 0..CONSTRUCTION_CASES {
        let a = interior_point(n, rng)?;
        let iso = build_isometry(n, a)?;
        worst = worst.max(iso.defect());
        let images: Vec<_> = iso.inputs.vectors.iter().map(|v| iso.apply(v)).collect();
        for j in 0..n {
            for k in 0..n {
                let before = braket(&iso.inputs.vectors[j], &iso.inputs.vectors[k]);
                worst = worst.max((braket(&images[j], &images[k]) - before).norm());
            }
        }
        let ps = equisep::p_success(n, a)?;
        for v in &iso.inputs.vectors {
            worst = worst.max((iso.conclusive_probability(v) - ps).abs());
        }
    }
    Ok(PropertyResult::measured(
        "isometry",
        CONSTRUCTION_CASES,
        worst,
    ))
}

/// Completeness and positivity of the stage-two measurement.
fn povm_completeness(n: usize, rng: &mut ChaCha8Rng) -> Result<PropertyResult> {
    if n < 3 {
        return Ok(PropertyResult {
            note: Some("n = 2 has no second stage".into()),
            ..PropertyResult::measured("povm_completeness", 0, 0.0)
        });
    }
    let mut worst: f64 = 0.0;
    for _ in 0..CONSTRUCTION_CASES {
        let t = rng.random_range(1e-3..TAU - 1e-3);
        let srm = build_srm(n, t)?;
        worst = worst
            .max(srm.completeness_defect())
            .max(-srm.min_eigenvalue());
    }
    Ok(PropertyResult::measured(
        "povm_completeness",
        CONSTRUCTION_CASES,
        worst,
    ))
}
