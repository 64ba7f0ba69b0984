//! Outcome-by-outcome simulation of the two-stage scheme.
//!
//! Trials are grouped in fixed blocks of [`BLOCK_TRIALS`]. Block `b` draws
//! from a ChaCha8 stream `b` keyed by the seed, so the counts do not depend on
//! how blocks are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::alpha::InnerProduct;
use crate::error::{Error, Result};
use crate::gram::check_n;
use crate::linalg::expectation;
use crate::protocol::{
    build_isometry, build_srm, complete_probabilities, validate_priors, Isometry,
    MinErrMeasurement, ProtocolSpec,
};

pub const BLOCK_TRIALS: u64 = 1 << 14;

/// Deviations beyond this many standard errors are flagged.
pub const Z_FLAG: f64 = 4.0;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct OutcomeCounts {
    pub conclusive_correct: u64,
    pub ambiguous_correct: u64,
    pub ambiguous_wrong: u64,
}

impl OutcomeCounts {
    pub fn total(&self) -> u64 {
        self.conclusive_correct + self.ambiguous_correct + self.ambiguous_wrong
    }

    fn merge(self, other: Self) -> Self {
        OutcomeCounts {
            conclusive_correct: self.conclusive_correct + other.conclusive_correct,
            ambiguous_correct: self.ambiguous_correct + other.ambiguous_correct,
            ambiguous_wrong: self.ambiguous_wrong + other.ambiguous_wrong,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimates {
    pub p_success: f64,
    /// Correct fraction among trials that reached stage two; 0 if none did.
    pub p_correct_id_given_fail: f64,
    pub p_total: f64,
    pub p_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Deviation {
    pub quantity: String,
    pub estimate: f64,
    pub analytic: f64,
    pub difference: f64,
    pub std_error: f64,
    pub z: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationSummary {
    pub deviations: Vec<Deviation>,
}

impl DeviationSummary {
    pub fn all_within(&self) -> bool {
        self.deviations.iter().all(|d| !d.flagged)
    }

    pub fn get(&self, quantity: &str) -> Option<&Deviation> {
        self.deviations.iter().find(|d| d.quantity == quantity)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub n: usize,
    pub alpha_mod: f64,
    pub alpha_phase: f64,
    pub priors: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub counts: OutcomeCounts,
    pub estimates: Estimates,
    pub deviations: DeviationSummary,
}

impl SimulationReport {
    pub fn alpha(&self) -> InnerProduct {
        InnerProduct::new(self.alpha_mod, self.alpha_phase)
            .expect("report holds a validated inner product")
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SimulationOptions {
    /// Sample stage one from the Born rule on the explicit isometry image of
    /// each input state instead of a Bernoulli(|s|²) draw. Needs an interior
    /// inner product.
    pub exact_isometry: bool,
}

pub fn run_trials(
    n: usize,
    alpha: InnerProduct,
    priors: &[f64],
    trials: u64,
    seed: u64,
) -> Result<SimulationReport> {
    run_trials_with(n, alpha, priors, trials, seed, SimulationOptions::default())
}

pub fn run_trials_with(
    n: usize,
    alpha: InnerProduct,
    priors: &[f64],
    trials: u64,
    seed: u64,
    options: SimulationOptions,
) -> Result<SimulationReport> {
    check_n(n, 2)?;
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    validate_priors(n, priors)?;
    let spec = complete_probabilities(n, alpha, priors)?;
    let sampler = Sampler::new(n, alpha, priors, &spec, options)?;

    let blocks = trials.div_ceil(BLOCK_TRIALS);
    let counts = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let len = BLOCK_TRIALS.min(trials - b * BLOCK_TRIALS);
            sampler.run_block(seed, b, len)
        })
        .reduce(OutcomeCounts::default, OutcomeCounts::merge);

    let estimates = estimate(&counts);
    let mut report = SimulationReport {
        n,
        alpha_mod: alpha.modulus(),
        alpha_phase: alpha.phase(),
        priors: priors.to_vec(),
        trials,
        seed,
        counts,
        estimates,
        deviations: DeviationSummary {
            deviations: Vec::new(),
        },
    };
    report.deviations = compare(&report, &spec)?;
    Ok(report)
}

fn estimate(c: &OutcomeCounts) -> Estimates {
    let t = c.total() as f64;
    let fails = c.ambiguous_correct + c.ambiguous_wrong;
    Estimates {
        p_success: c.conclusive_correct as f64 / t,
        p_correct_id_given_fail: if fails == 0 {
            0.0
        } else {
            c.ambiguous_correct as f64 / fails as f64
        },
        p_total: (c.conclusive_correct + c.ambiguous_correct) as f64 / t,
        p_err: c.ambiguous_wrong as f64 / t,
    }
}

struct Sampler {
    prior_cdf: Vec<f64>,
    stage_one: StageOne,
    /// Per prepared state, cumulative outcome distribution of the SRM.
    stage_two: Option<Vec<Vec<f64>>>,
}

enum StageOne {
    /// Probability of failure, shared by every input.
    Bernoulli(f64),
    /// Per-input failure probability and stage-two distributions computed from
    /// the explicit isometry image.
    Exact(Vec<f64>),
}

fn cumulative(weights: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    weights
        .into_iter()
        .map(|w| {
            acc += w.max(0.0);
            acc
        })
        .collect()
}

/// First index whose cumulative weight exceeds `u · total`.
fn draw(cdf: &[f64], u: f64) -> usize {
    let target = u * cdf.last().copied().unwrap_or(0.0);
    cdf.iter()
        .position(|&c| target < c)
        .unwrap_or(cdf.len() - 1)
}

impl Sampler {
    fn new(
        n: usize,
        alpha: InnerProduct,
        priors: &[f64],
        spec: &ProtocolSpec,
        options: SimulationOptions,
    ) -> Result<Self> {
        let srm = match spec.p_correct_id {
            Some(_) => Some(build_srm(n, alpha.phase())?),
            None => None,
        };
        let (stage_one, stage_two) = if options.exact_isometry {
            let iso = build_isometry(n, alpha)?;
            let (fail, dists) = exact_distributions(&iso, srm.as_ref());
            (StageOne::Exact(fail), dists)
        } else {
            let dists = srm.map(|m| {
                m.born_matrix()
                    .into_iter()
                    .map(cumulative)
                    .collect::<Vec<_>>()
            });
            (StageOne::Bernoulli(spec.s_squared), dists)
        };
        Ok(Sampler {
            prior_cdf: cumulative(priors.iter().copied()),
            stage_one,
            stage_two,
        })
    }

    fn run_block(&self, seed: u64, block: u64, len: u64) -> OutcomeCounts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(block);
        let mut counts = OutcomeCounts::default();
        for _ in 0..len {
            let k = draw(&self.prior_cdf, rng.random::<f64>());
            let fail = match &self.stage_one {
                StageOne::Bernoulli(p) => *p,
                StageOne::Exact(p) => p[k],
            };
            if rng.random::<f64>() >= fail {
                counts.conclusive_correct += 1;
                continue;
            }
            match &self.stage_two {
                Some(dists) => {
                    if draw(&dists[k], rng.random::<f64>()) == k {
                        counts.ambiguous_correct += 1;
                    } else {
                        counts.ambiguous_wrong += 1;
                    }
                }
                None => counts.ambiguous_wrong += 1,
            }
        }
        counts
    }
}

/// Stage-one failure probability and stage-two outcome distribution of each
/// input, read off the normalized ambiguous part of its isometry image.
fn exact_distributions(
    iso: &Isometry,
    srm: Option<&MinErrMeasurement>,
) -> (Vec<f64>, Option<Vec<Vec<f64>>>) {
    let mut fail = Vec::with_capacity(iso.input_dim);
    let mut dists = Vec::with_capacity(iso.input_dim);
    for v in &iso.inputs.vectors {
        let image = iso.apply(v);
        let amb = image.rows_range(iso.ambiguous_block()).into_owned();
        let p = amb.norm_squared();
        fail.push(p);
        if let Some(m) = srm {
            let post = if p > 0.0 { amb.unscale(p.sqrt()) } else { amb };
            let post = post.rows(0, m.dim()).into_owned();
            dists.push(cumulative(
                m.povm_elements.iter().map(|e| expectation(e, &post)),
            ));
        }
    }
    (fail, srm.map(|_| dists))
}

/// Standard error of a binomial proportion `p` over `count` draws, with `p`
/// held at least half a count away from 0 and 1.
fn binomial_std_error(p: f64, count: u64) -> f64 {
    let t = count.max(1) as f64;
    let floor = 0.5 / t;
    let p = p.clamp(floor, (1.0 - floor).max(floor));
    (p * (1.0 - p) / t).sqrt()
}

fn deviation(quantity: &str, estimate: f64, analytic: f64, count: u64) -> Deviation {
    let std_error = binomial_std_error(analytic, count);
    let difference = estimate - analytic;
    let z = if count == 0 {
        0.0
    } else {
        difference / std_error
    };
    Deviation {
        quantity: quantity.to_string(),
        estimate,
        analytic,
        difference,
        std_error,
        z,
        flagged: z.abs() > Z_FLAG,
    }
}

/// z-scores of every estimate against the analytic values in `spec`.
pub fn compare(report: &SimulationReport, spec: &ProtocolSpec) -> Result<DeviationSummary> {
    let same_alpha = (report.alpha_mod - spec.alpha.modulus()).abs() <= 1e-12
        && (report.alpha_phase - spec.alpha.phase()).abs() <= 1e-12;
    if report.n != spec.n || !same_alpha {
        return Err(Error::InvalidArgument(format!(
            "report (n={}, |α|={}, θ={}) does not match spec (n={}, |α|={}, θ={})",
            report.n,
            report.alpha_mod,
            report.alpha_phase,
            spec.n,
            spec.alpha.modulus(),
            spec.alpha.phase()
        )));
    }
    let c = &report.counts;
    let e = &report.estimates;
    let t = report.trials;
    let mut deviations = vec![deviation("p_success", e.p_success, spec.p_success, t)];
    if let Some(pci) = spec.p_correct_id {
        let fails = c.ambiguous_correct + c.ambiguous_wrong;
        deviations.push(deviation(
            "p_correct_id_given_fail",
            e.p_correct_id_given_fail,
            pci,
            fails,
        ));
    }
    deviations.push(deviation("p_total", e.p_total, spec.p_total, t));
    deviations.push(deviation("p_err", e.p_err, spec.p_err, t));
    Ok(DeviationSummary { deviations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{srm_correct_probability, uniform_priors};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn ip(m: f64, t: f64) -> InnerProduct {
        InnerProduct::new(m, t).unwrap()
    }

    #[test]
    fn orthogonal_states_always_conclusive() {
        let r = run_trials(4, InnerProduct::ZERO, &[0.1, 0.2, 0.3, 0.4], 1000, 9).unwrap();
        assert_eq!(r.counts.conclusive_correct, 1000);
        assert_eq!(r.estimates.p_total, 1.0);
    }

    #[test]
    fn boundary_never_succeeds_in_stage_one() {
        let r = run_trials(7, ip(1.0 / 6.0, PI), &uniform_priors(7), 100_000, 3).unwrap();
        assert_eq!(r.counts.conclusive_correct, 0);
        assert_eq!(r.estimates.p_success, 0.0);
        assert!(r.deviations.all_within(), "{:?}", r.deviations);
    }

    #[test]
    fn counts_sum_and_consistency() {
        let r = run_trials(5, ip(0.2, 1.3), &uniform_priors(5), 50_000, 11).unwrap();
        assert_eq!(r.counts.total(), 50_000);
        let e = r.estimates;
        let recomposed = e.p_success + (1.0 - e.p_success) * e.p_correct_id_given_fail;
        assert!((recomposed - e.p_total).abs() < 1e-12);
        assert!((e.p_total + e.p_err - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reproducible_for_fixed_seed() {
        let a = ip(0.3, FRAC_PI_2);
        let r1 = run_trials(3, a, &uniform_priors(3), 70_000, 42).unwrap();
        let r2 = run_trials(3, a, &uniform_priors(3), 70_000, 42).unwrap();
        assert_eq!(r1, r2);
        let r3 = run_trials(3, a, &uniform_priors(3), 70_000, 43).unwrap();
        assert_ne!(r1.counts, r3.counts);
    }

    #[test]
    fn thread_count_does_not_change_counts() {
        let a = ip(0.2, 2.0);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| run_trials(6, a, &uniform_priors(6), 100_000, 5).unwrap())
        };
        assert_eq!(run(1).counts, run(4).counts);
    }

    #[test]
    fn stage_two_matches_srm() {
        // the simulator measures with the SRM, so stage two tracks its Born
        // probability
        let a = ip(0.3, FRAC_PI_2);
        let r = run_trials(3, a, &uniform_priors(3), 200_000, 1).unwrap();
        let srm = srm_correct_probability(3, FRAC_PI_2).unwrap();
        let fails = r.counts.ambiguous_correct + r.counts.ambiguous_wrong;
        let se = binomial_std_error(srm, fails);
        assert!((r.estimates.p_correct_id_given_fail - srm).abs() < 4.0 * se);
    }

    #[test]
    fn zero_phase_failures_carry_no_information() {
        let r = run_trials(3, ip(0.5, 0.0), &uniform_priors(3), 20_000, 2).unwrap();
        assert_eq!(r.counts.ambiguous_correct, 0);
        assert!(r.deviations.all_within());
    }

    #[test]
    fn exact_isometry_path_agrees_with_bernoulli_path() {
        let a = ip(0.3, FRAC_PI_2);
        let opts = SimulationOptions {
            exact_isometry: true,
        };
        let exact = run_trials_with(3, a, &uniform_priors(3), 200_000, 8, opts).unwrap();
        let fast = run_trials(3, a, &uniform_priors(3), 200_000, 8).unwrap();
        let se = binomial_std_error(fast.estimates.p_success, 200_000);
        assert!((exact.estimates.p_success - fast.estimates.p_success).abs() < 6.0 * se);
        let se = binomial_std_error(fast.estimates.p_total, 200_000);
        assert!((exact.estimates.p_total - fast.estimates.p_total).abs() < 6.0 * se);
    }

    #[test]
    fn argument_errors() {
        let u = uniform_priors(3);
        assert!(run_trials(3, ip(0.1, 1.0), &u, 0, 1).is_err());
        assert!(run_trials(3, ip(0.9, PI), &u, 10, 1)
            .unwrap_err()
            .is_domain());
        assert!(run_trials(3, ip(0.1, 1.0), &[1.0, 0.0], 10, 1).is_err());
    }

    #[test]
    fn single_trial_has_finite_z_scores() {
        let r = run_trials(3, ip(0.3, FRAC_PI_2), &uniform_priors(3), 1, 4).unwrap();
        for d in &r.deviations.deviations {
            assert!(d.z.is_finite() && d.std_error > 0.0, "{d:?}");
        }
    }

    #[test]
    fn compare_rejects_mismatched_parameters() {
        let r = run_trials(3, ip(0.3, 1.0), &uniform_priors(3), 100, 4).unwrap();
        let other = complete_probabilities(3, ip(0.2, 1.0), &uniform_priors(3)).unwrap();
        assert!(compare(&r, &other).is_err());
        let other = complete_probabilities(4, ip(0.3, 1.0), &uniform_priors(4)).unwrap();
        assert!(compare(&r, &other).is_err());
    }

    #[test]
    fn draw_picks_lowest_index_on_ties() {
        let cdf = cumulative([0.5, 0.0, 0.5]);
        assert_eq!(draw(&cdf, 0.0), 0);
        assert_eq!(draw(&cdf, 0.5), 2);
        assert_eq!(draw(&cdf, 0.999_999), 2);
    }
}
