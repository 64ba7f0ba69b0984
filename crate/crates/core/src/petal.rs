//! The petal-shaped region of allowed inner products.
//!
//! For a phase `θ`, `n` equi-separated states exist iff `|α| ≤ b(n, θ)` with
//!
//! ```text
//! b(n, θ) = sin((π−θ)/n) / sin(θ + (π−θ)/n)
//! ```
//!
//! and they are linearly dependent exactly on the curve `|α| = b(n, θ)`.

use std::f64::consts::{PI, SQRT_2};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alpha::{wrap_phase, InnerProduct};
use crate::error::Result;
use crate::gram::check_n;
use crate::protocol;

/// Slack on the membership test.
pub const MEMBERSHIP_SLACK: f64 = 1e-12;

const LIMIT_WINDOW: f64 = 1e-10;
const SERIES_WINDOW: f64 = 1e-6;

/// Largest allowed modulus of `α` at phase `theta`.
pub fn boundary_modulus(n: usize, theta: f64) -> Result<f64> {
    check_n(n, 2)?;
    let theta = wrap_phase(theta);
    if theta == 0.0 {
        return Ok(1.0);
    }
    let nf = n as f64;
    // sin(θ + (π−θ)/n) = sin((π−θ)(n−1)/n), so b = sin(ε/n)/sin(ε(n−1)/n)
    // with ε = π − θ; the ratio is 0/0 at θ = π.
    let eps = PI - theta;
    if eps.abs() < LIMIT_WINDOW {
        return Ok(1.0 / (nf - 1.0));
    }
    if eps.abs() < SERIES_WINDOW {
        let k = ((nf - 1.0).powi(2) - 1.0) / (6.0 * nf * nf);
        return Ok((1.0 + k * eps * eps) / (nf - 1.0));
    }
    Ok((eps / nf).sin() / (eps * (nf - 1.0) / nf).sin())
}

pub fn is_allowed(n: usize, alpha: InnerProduct) -> Result<bool> {
    Ok(alpha.modulus() <= boundary_modulus(n, alpha.phase())? + MEMBERSHIP_SLACK)
}

/// Open interval of real `x` for which the family is independent.
pub fn real_axis_range(n: usize) -> Result<(f64, f64)> {
    check_n(n, 2)?;
    Ok((-1.0 / (n as f64 - 1.0), 1.0))
}

/// Open interval of `y` for which `α = iy` gives an independent family.
pub fn imag_axis_range(n: usize) -> Result<(f64, f64)> {
    check_n(n, 2)?;
    let t = (PI / (2.0 * n as f64)).tan();
    Ok((-t, t))
}

/// Sampled boundary curve `(θ, b(n, θ))` at `count` equally spaced phases in
/// `[0, 2π)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PetalBoundary {
    pub n: usize,
    pub samples: Vec<(f64, f64)>,
}

impl PetalBoundary {
    pub fn sample(n: usize, count: usize) -> Result<Self> {
        check_n(n, 2)?;
        let samples = (0..count)
            .map(|i| {
                let theta = 2.0 * PI * i as f64 / count as f64;
                boundary_modulus(n, theta).map(|b| (theta, b))
            })
            .collect::<Result<_>>()?;
        Ok(PetalBoundary { n, samples })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellStatus {
    Inside,
    Boundary,
    Forbidden,
}

impl CellStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            CellStatus::Inside => "inside",
            CellStatus::Boundary => "boundary",
            CellStatus::Forbidden => "forbidden",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub re: f64,
    pub im: f64,
    pub status: CellStatus,
    pub p_success: Option<f64>,
}

/// Success probabilities sampled over `[−1, 1]²`.
///
/// Samples sit at `−1 + 2i/resolution` for `i in 0..resolution` on both axes,
/// so an even resolution hits the origin exactly. Rows are ordered by
/// imaginary part, then real part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PetalGrid {
    pub n: usize,
    pub resolution: usize,
    pub cells: Vec<GridCell>,
}

impl PetalGrid {
    pub fn spacing(&self) -> f64 {
        grid_spacing(self.resolution)
    }

    /// Half-width of the band around the curve whose cells are `Boundary`.
    pub fn boundary_thickness(&self) -> f64 {
        1.5 * self.spacing() * SQRT_2
    }

    /// Upper bound on `p_success` for a boundary cell at phase `theta`.
    pub fn boundary_tolerance(&self, theta: f64) -> Result<f64> {
        Ok(self.boundary_thickness() / boundary_modulus(self.n, theta)?)
    }

    pub fn count(&self, status: CellStatus) -> usize {
        self.cells.iter().filter(|c| c.status == status).count()
    }
}

fn grid_spacing(resolution: usize) -> f64 {
    2.0 / resolution as f64
}

pub const MIN_GRID_RESOLUTION: usize = 16;

pub fn petal_grid(n: usize, resolution: usize) -> Result<PetalGrid> {
    check_n(n, 2)?;
    if resolution < MIN_GRID_RESOLUTION {
        return Err(crate::Error::InvalidArgument(format!(
            "resolution must be at least {MIN_GRID_RESOLUTION}, got {resolution}"
        )));
    }
    let h = grid_spacing(resolution);
    let thickness = 1.5 * h * SQRT_2;
    let coord = |i: usize| -1.0 + h * i as f64;

    let rows: Vec<Vec<GridCell>> = (0..resolution)
        .into_par_iter()
        .map(|j| {
            (0..resolution)
                .map(|i| grid_cell(n, coord(i), coord(j), thickness))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    Ok(PetalGrid {
        n,
        resolution,
        cells: rows.into_iter().flatten().collect(),
    })
}

fn grid_cell(n: usize, re: f64, im: f64, thickness: f64) -> Result<GridCell> {
    let modulus = re.hypot(im);
    let forbidden = GridCell {
        re,
        im,
        status: CellStatus::Forbidden,
        p_success: None,
    };
    if modulus > 1.0 {
        return Ok(forbidden);
    }
    let theta = wrap_phase(im.atan2(re));
    let boundary = boundary_modulus(n, theta)?;
    let gap = modulus - boundary;
    let status = if gap.abs() < thickness {
        CellStatus::Boundary
    } else if gap < 0.0 {
        CellStatus::Inside
    } else {
        return Ok(forbidden);
    };
    let alpha = InnerProduct::new(modulus, theta)?;
    let p_success = if is_allowed(n, alpha)? {
        protocol::p_success(n, alpha)?
    } else {
        0.0
    };
    Ok(GridCell {
        re,
        im,
        status,
        p_success: Some(p_success),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn boundary_examples() {
        let b = boundary_modulus(3, FRAC_PI_2).unwrap();
        assert!((b - (PI / 6.0).tan()).abs() < 1e-15);
        for n in 2..40 {
            assert_eq!(boundary_modulus(n, 0.0).unwrap(), 1.0);
        }
        assert!((boundary_modulus(7, PI).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        // direct double-precision evaluation of the sine ratio
        let b = boundary_modulus(7, PI / 5.0).unwrap();
        assert!((b - 0.421_023_346_380_425_4).abs() < 1e-14);
    }

    #[test]
    fn boundary_is_continuous_through_pi() {
        for n in [3usize, 7, 31] {
            let limit = 1.0 / (n as f64 - 1.0);
            for d in [1e-11, 5e-10, 1e-8, 5e-7, 2e-6, 1e-4] {
                for t in [PI - d, PI + d] {
                    let b = boundary_modulus(n, t).unwrap();
                    assert!((b - limit).abs() <= d * d + 1e-15, "n={n} d={d} b={b}");
                }
            }
        }
    }

    #[test]
    fn two_states_fill_the_disk() {
        for i in 0..100 {
            let t = 2.0 * PI * i as f64 / 100.0;
            assert!((boundary_modulus(2, t).unwrap() - 1.0).abs() < 1e-12);
            assert!(is_allowed(2, InnerProduct::new(1.0, t).unwrap()).unwrap());
        }
    }

    #[test]
    fn membership_examples() {
        assert!(is_allowed(3, InnerProduct::new(0.5, FRAC_PI_2).unwrap()).unwrap());
        assert!(!is_allowed(3, InnerProduct::new(0.7, FRAC_PI_2).unwrap()).unwrap());
    }

    #[test]
    fn axis_ranges() {
        assert_eq!(real_axis_range(3).unwrap(), (-0.5, 1.0));
        let (lo, hi) = real_axis_range(4).unwrap();
        assert!((lo + 1.0 / 3.0).abs() < 1e-15 && hi == 1.0);
        assert_eq!(real_axis_range(2).unwrap(), (-1.0, 1.0));

        let (lo, hi) = imag_axis_range(3).unwrap();
        assert!((hi - 0.577_350_269_189_625_8).abs() < 1e-15 && lo == -hi);
        let (_, hi) = imag_axis_range(2).unwrap();
        assert!((hi - 1.0).abs() < 1e-15);
        let (_, hi) = imag_axis_range(7).unwrap();
        assert!((hi - 0.228_243_474_390_149_94).abs() < 1e-15);
        assert!(real_axis_range(1).is_err());
    }

    #[test]
    fn grid_origin_and_forbidden_axis() {
        let g = petal_grid(3, 64).unwrap();
        assert_eq!(g.cells.len(), 64 * 64);
        let origin = g.cells.iter().find(|c| c.re == 0.0 && c.im == 0.0).unwrap();
        assert_eq!(origin.p_success, Some(1.0));

        let g = petal_grid(7, 64).unwrap();
        for c in &g.cells {
            if c.im == 0.0 && c.re < -1.0 / 6.0 - g.boundary_thickness() {
                assert_eq!(c.status, CellStatus::Forbidden, "{c:?}");
            }
        }
    }

    #[test]
    fn grid_for_two_states_has_no_forbidden_cells_in_disk() {
        let g = petal_grid(2, 32).unwrap();
        for c in &g.cells {
            if c.re.hypot(c.im) <= 1.0 {
                assert_ne!(c.status, CellStatus::Forbidden);
            }
        }
    }

    #[test]
    fn grid_cells_are_consistent() {
        let g = petal_grid(5, 48).unwrap();
        for c in &g.cells {
            match c.status {
                CellStatus::Forbidden => assert!(c.p_success.is_none()),
                CellStatus::Inside => {
                    let p = c.p_success.unwrap();
                    assert!((0.0..=1.0).contains(&p));
                }
                CellStatus::Boundary => {
                    let p = c.p_success.unwrap();
                    let theta = c.im.atan2(c.re);
                    assert!(p >= 0.0 && p <= g.boundary_tolerance(theta).unwrap());
                }
            }
        }
    }

    #[test]
    fn grid_rejects_bad_arguments() {
        assert!(petal_grid(1, 64).is_err());
        assert!(petal_grid(3, 15).is_err());
    }

    #[test]
    fn sampled_boundary_invariants() {
        let pb = PetalBoundary::sample(6, 360).unwrap();
        assert_eq!(pb.samples[0], (0.0, 1.0));
        for &(_, m) in &pb.samples {
            assert!(m > 0.0 && m <= 1.0);
        }
        assert!((pb.samples[180].1 - 0.2).abs() < 1e-9);
    }
}
