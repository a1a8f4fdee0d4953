//! Reproducible Monte Carlo estimation of zero-count statistics.
//!
//! Every experiment is the same pipeline over independent samples: draw a
//! field from the spectral measure, restrict it to a segment, count zeros.
//! Sample i always reads its own stream `stream_rng(seed, i)`, so thread
//! scheduling cannot leak into the draw, and workers only ever produce the
//! integer count (plus a tangency flag) per sample.  All reported statistics
//! are derived from the merged integer histogram in one deterministic pass,
//! which makes estimates bit-identical on 1, 4, or 16 workers.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::{FRAC_PI_4, TAU};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::field::{FrequencyConvention, PlanarField};
use crate::lattice::enumerate_lattice_points;
use crate::measure::{Direction, SpectralMeasure};
use crate::rng::stream_rng;
use crate::zeros::{count_zeros, default_grid_step, CountDistribution};

/// Bisection tolerance handed to the zero counter.
const REFINE_TOL: f64 = 1e-10;

/// An atom counts as sitting on a direction within this angular distance.
const ATOM_TOL: f64 = 1e-9;

/// When a segment direction carries an atom, the dominance mechanism keeps
/// −log P(Z=0) below this multiple of the number of lattice points, uniformly
/// in the segment length.
const POINT_MASS_RATE_BOUND: f64 = 0.5;

/// Significance level of the distribution goodness-of-fit test.
const GOODNESS_SIGNIFICANCE: f64 = 0.001;

/// One experiment: which ensemble to sample and how much of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Builtin measure name (`cilleruelo`, `lattice:25`, ...) or a path to a
    /// measure JSON file.
    pub measure: String,
    pub convention: FrequencyConvention,
    /// Segment direction, radians.
    pub u: f64,
    /// Segment lengths: one entry for a single estimate, several for a sweep.
    pub lengths: Vec<f64>,
    pub n_samples: u64,
    pub seed: u64,
    /// Optional override of the counting grid step (default: a fortieth of a
    /// wavelength).
    pub grid_step: Option<f64>,
}

impl ExperimentConfig {
    /// Config with a single segment length and the default counting grid.
    pub fn new(
        measure: &str,
        convention: FrequencyConvention,
        u: f64,
        length: f64,
        n_samples: u64,
        seed: u64,
    ) -> Self {
        ExperimentConfig {
            measure: measure.to_owned(),
            convention,
            u,
            lengths: vec![length],
            n_samples,
            seed,
            grid_step: None,
        }
    }

    /// Check the numeric fields (the measure spec is resolved separately).
    pub fn validate(&self) -> Result<()> {
        let fail = |detail: String| Err(Error::InvalidConfig { detail });
        if self.n_samples == 0 {
            return fail("n_samples must be at least 1".into());
        }
        if self.lengths.is_empty() {
            return fail("the sweep list of segment lengths is empty".into());
        }
        if let Some(bad) = self.lengths.iter().find(|l| !l.is_finite() || **l <= 0.0) {
            return fail(format!("segment length {bad} is not a positive real"));
        }
        if !self.u.is_finite() {
            return fail(format!("direction u = {} is not finite", self.u));
        }
        if let Some(step) = self.grid_step {
            let cap = TAU / self.convention.omega() / 10.0;
            if !(step > 0.0 && step <= cap) {
                return fail(format!(
                    "grid step {step} outside (0, {cap}] (at most a tenth of a wavelength)"
                ));
            }
        }
        Ok(())
    }

    /// Resolve the measure spec: builtin names first, then a JSON file path.
    pub fn resolve_measure(&self) -> Result<SpectralMeasure> {
        resolve_measure_spec(&self.measure)
    }

    fn resolved_grid_step(&self) -> f64 {
        self.grid_step
            .unwrap_or_else(|| default_grid_step(self.convention))
    }
}

/// Resolve a measure spec string: a builtin name, or a path to a JSON file.
pub fn resolve_measure_spec(spec: &str) -> Result<SpectralMeasure> {
    match SpectralMeasure::by_name(spec) {
        Ok(mu) => Ok(mu),
        Err(unknown) => {
            let path = Path::new(spec);
            if path.is_file() {
                SpectralMeasure::from_json(&std::fs::read_to_string(path)?)
            } else {
                Err(unknown)
            }
        }
    }
}

/// A point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValueWithSe {
    pub value: f64,
    pub se: f64,
}

/// Zero-count statistics for one (measure, direction, length) cell.
///
/// With a single sample every spread estimate is reported as zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimates {
    pub mean: ValueWithSe,
    /// Mean of k(k−1) over sampled counts k.
    pub second_factorial: ValueWithSe,
    /// Unbiased sample variance of the count.
    pub variance: ValueWithSe,
    /// Fraction of samples with no zero at all; the se is binomial.
    pub persistence: ValueWithSe,
    /// Rule-of-three bound 3/n, present exactly when no sample persisted, so
    /// a vanishing estimate reads "0 (≤ 3/n)" rather than a point value.
    pub persistence_upper_bound: Option<f64>,
    /// count → number of samples with that many zeros; sums to `n_samples`.
    pub histogram: BTreeMap<u64, u64>,
    /// Samples whose counter raised the near-tangency flag.
    pub suspicious_samples: u64,
    pub n_samples: u64,
    pub seed: u64,
}

/// One row of a persistence sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersistenceRow {
    /// The swept segment length.
    pub parameter: f64,
    pub persistence: f64,
    pub se: f64,
    /// Rule-of-three bound, present exactly when no sample persisted.
    pub upper_bound: Option<f64>,
}

/// Persistence summary for one lattice measure with an atom on the segment
/// direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointMassReport {
    pub m: u64,
    pub r2: u64,
    /// Smallest persistence across the length grid, with its standard error.
    pub min_persistence: f64,
    pub min_persistence_se: f64,
    /// Largest −log(persistence)/r₂(m) across the grid.  Rows with no
    /// persisting sample fall back to the rule-of-three bound, which can only
    /// overstate the rate.
    pub max_rate: f64,
    pub rate_bound: f64,
    /// True when every row persisted and the rate stays under the bound.
    pub within_bound: bool,
    pub rows: Vec<PersistenceRow>,
}

/// Goodness-of-fit of an empirical count distribution against an exact law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoodnessReport {
    /// Total-variation distance between empirical and exact distributions.
    pub tv_distance: f64,
    /// Pearson statistic over the exact law's support.
    pub chi_square: f64,
    pub degrees_of_freedom: u64,
    /// 0.999 quantile of χ²(dof): the pass threshold at significance 0.001.
    pub critical_value: f64,
    /// Samples whose count lies outside the exact support (any such sample
    /// fails the test outright).
    pub outside_support: u64,
    pub pass: bool,
    pub estimates: MomentEstimates,
}

/// Run the sampling pipeline for every sample index and collect
/// (count, suspicious) pairs in sample order.
fn sample_counts(
    measure: &SpectralMeasure,
    config: &ExperimentConfig,
    length: f64,
) -> Result<Vec<(u64, bool)>> {
    let grid_step = config.resolved_grid_step();
    let u = Direction::new(config.u);
    (0..config.n_samples)
        .into_par_iter()
        .map(|index| {
            let mut rng = stream_rng(config.seed, index);
            let field = PlanarField::sample_wave(measure, config.convention, &mut rng)
                .map_err(|source| Error::Sample {
                    index,
                    source: Box::new(source),
                })?;
            let counted = count_zeros(&field.restrict(u, length), grid_step, REFINE_TOL);
            Ok((counted.count as u64, counted.suspicious))
        })
        .collect()
}

/// Fold per-sample counts into a histogram and derive every statistic from it.
fn estimates_from_counts(counts: &[(u64, bool)], seed: u64) -> MomentEstimates {
    let n = counts.len() as u64;
    let nf = n as f64;
    let mut histogram: BTreeMap<u64, u64> = BTreeMap::new();
    let mut suspicious_samples = 0u64;
    for &(count, suspicious) in counts {
        *histogram.entry(count).or_insert(0) += 1;
        suspicious_samples += u64::from(suspicious);
    }
    debug_assert_eq!(histogram.values().sum::<u64>(), n);

    let mean = histogram
        .iter()
        .map(|(&k, &c)| k as f64 * c as f64)
        .sum::<f64>()
        / nf;
    let central = |p: i32| {
        histogram
            .iter()
            .map(|(&k, &c)| (k as f64 - mean).powi(p) * c as f64)
            .sum::<f64>()
            / nf
    };
    let m2 = central(2);
    let m4 = central(4);
    let sample_var = if n > 1 { m2 * nf / (nf - 1.0) } else { 0.0 };

    // Second factorial moment: statistics of v = k(k−1) per sample.
    let v_mean = histogram
        .iter()
        .map(|(&k, &c)| k as f64 * (k as f64 - 1.0) * c as f64)
        .sum::<f64>()
        / nf;
    let v_m2 = histogram
        .iter()
        .map(|(&k, &c)| {
            let v = k as f64 * (k as f64 - 1.0);
            (v - v_mean).powi(2) * c as f64
        })
        .sum::<f64>()
        / nf;
    let v_var = if n > 1 { v_m2 * nf / (nf - 1.0) } else { 0.0 };

    let zeros = histogram.get(&0).copied().unwrap_or(0) as f64;
    let p = zeros / nf;

    MomentEstimates {
        mean: ValueWithSe {
            value: mean,
            se: (sample_var / nf).sqrt(),
        },
        second_factorial: ValueWithSe {
            value: v_mean,
            se: (v_var / nf).sqrt(),
        },
        variance: ValueWithSe {
            value: sample_var,
            // Asymptotic spread of a sample variance: Var(s²) ≈ (μ₄ − μ₂²)/n.
            se: ((m4 - m2 * m2).max(0.0) / nf).sqrt(),
        },
        persistence: ValueWithSe {
            value: p,
            se: (p * (1.0 - p) / nf).sqrt(),
        },
        persistence_upper_bound: (zeros == 0.0).then_some(3.0 / nf),
        histogram,
        suspicious_samples,
        n_samples: n,
        seed,
    }
}

/// Estimate all zero-count moments for a single-length config.
pub fn estimate(config: &ExperimentConfig) -> Result<MomentEstimates> {
    config.validate()?;
    let &[length] = config.lengths.as_slice() else {
        return Err(Error::InvalidConfig {
            detail: format!(
                "estimate expects exactly one segment length, got a sweep of {}",
                config.lengths.len()
            ),
        });
    };
    let measure = config.resolve_measure()?;
    let counts = sample_counts(&measure, config, length)?;
    Ok(estimates_from_counts(&counts, config.seed))
}

/// Estimate persistence along the config's length sweep.  A direction sweep
/// is expressed as separate configs.
pub fn persistence_sweep(config: &ExperimentConfig) -> Result<Vec<PersistenceRow>> {
    config.validate()?;
    let measure = config.resolve_measure()?;
    config
        .lengths
        .iter()
        .map(|&length| {
            let counts = sample_counts(&measure, config, length)?;
            let est = estimates_from_counts(&counts, config.seed);
            Ok(PersistenceRow {
                parameter: length,
                persistence: est.persistence.value,
                se: est.persistence.se,
                upper_bound: est.persistence_upper_bound,
            })
        })
        .collect()
}

/// For lattice measures carrying an atom at the segment direction, estimate
/// persistence over a length grid and compare −log(persistence)/r₂(m) with
/// the uniform-in-L dominance bound.
pub fn point_mass_persistence_check(
    m_list: &[u64],
    u: f64,
    convention: FrequencyConvention,
    lengths: &[f64],
    n_samples: u64,
    seed: u64,
) -> Result<Vec<PointMassReport>> {
    let target = u.rem_euclid(TAU);
    m_list
        .iter()
        .map(|&m| {
            let measure = SpectralMeasure::from_lattice(m)?;
            let on_direction = measure.atoms().iter().any(|atom| {
                let gap = (atom.angle - target).rem_euclid(TAU);
                gap < ATOM_TOL || gap > TAU - ATOM_TOL
            });
            if !on_direction {
                return Err(Error::NoAtom { angle: u });
            }
            let r2 = enumerate_lattice_points(m)?.r2() as u64;
            let config = ExperimentConfig {
                measure: format!("lattice:{m}"),
                convention,
                u,
                lengths: lengths.to_vec(),
                n_samples,
                seed,
                grid_step: None,
            };
            let rows = persistence_sweep(&config)?;
            let worst = rows
                .iter()
                .min_by(|a, b| a.persistence.total_cmp(&b.persistence))
                .expect("sweep list is nonempty");
            let max_rate = rows
                .iter()
                .map(|row| {
                    let p = if row.persistence > 0.0 {
                        row.persistence
                    } else {
                        row.upper_bound.expect("zero rows carry the 3/n bound")
                    };
                    -p.ln() / r2 as f64
                })
                .fold(0.0, f64::max);
            let all_persisted = rows.iter().all(|row| row.persistence > 0.0);
            Ok(PointMassReport {
                m,
                r2,
                min_persistence: worst.persistence,
                min_persistence_se: worst.se,
                max_rate,
                rate_bound: POINT_MASS_RATE_BOUND,
                within_bound: all_persisted && max_rate < POINT_MASS_RATE_BOUND,
                rows,
            })
        })
        .collect()
}

/// Compare the empirical count distribution against an exact law, with a
/// total-variation summary and a Pearson χ² pass/fail at significance 0.001.
pub fn distribution_compare(
    config: &ExperimentConfig,
    exact: &CountDistribution,
) -> Result<GoodnessReport> {
    let near = |a: f64, b: f64| (a - b).abs() < 1e-12;
    if !near(config.u, 0.0) && !near(config.u, FRAC_PI_4) {
        return Err(Error::UnsupportedDirection { u: config.u });
    }
    let estimates = estimate(config)?;
    let n = estimates.n_samples as f64;

    let support: BTreeMap<u64, f64> = exact.support().iter().copied().collect();
    let keys: BTreeSet<u64> = support
        .keys()
        .chain(estimates.histogram.keys())
        .copied()
        .collect();
    let tv_distance = keys
        .iter()
        .map(|k| {
            let empirical = estimates.histogram.get(k).copied().unwrap_or(0) as f64 / n;
            (empirical - support.get(k).copied().unwrap_or(0.0)).abs()
        })
        .sum::<f64>()
        / 2.0;

    let chi_square = support
        .iter()
        .map(|(k, &p)| {
            let observed = estimates.histogram.get(k).copied().unwrap_or(0) as f64;
            (observed - n * p).powi(2) / (n * p)
        })
        .sum::<f64>();
    let outside_support: u64 = estimates
        .histogram
        .iter()
        .filter(|(k, _)| !support.contains_key(k))
        .map(|(_, &c)| c)
        .sum();

    let degrees_of_freedom = support.len().saturating_sub(1) as u64;
    let critical_value = if degrees_of_freedom == 0 {
        0.0
    } else {
        ChiSquared::new(degrees_of_freedom as f64)
            .expect("positive degrees of freedom")
            .inverse_cdf(1.0 - GOODNESS_SIGNIFICANCE)
    };
    Ok(GoodnessReport {
        tv_distance,
        chi_square,
        degrees_of_freedom,
        critical_value,
        outside_support,
        pass: outside_support == 0 && chi_square <= critical_value,
        estimates,
    })
}
