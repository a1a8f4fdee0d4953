//! Robust zero counting for sampled line processes, the exact zero-count
//! laws of the axis/diagonal restrictions of the four-term field, and the
//! crossing-line construction.
//!
//! Counting strategy: walk a uniform grid (default 40 points per nominal
//! wavelength 2π/ω), refine every sign change by bisection, and treat grid
//! values below a small multiple of the amplitude scale as potential
//! tangencies — those cells are subdivided 16-fold and flagged `suspicious`.
//! Pathologies are reported through the flag, never as errors.

use std::f64::consts::{FRAC_PI_4, PI, SQRT_2, TAU};

use crate::error::{Error, Result};
use crate::field::{FrequencyConvention, LineProcess};

/// |value| below this multiple of the amplitude scale marks a near-tangency.
const TANGENCY_FACTOR: f64 = 1e-6;

/// Endpoint grazes below this multiple of the amplitude scale count as
/// endpoint zeros (ties resolved toward inclusion).
const ENDPOINT_FACTOR: f64 = 1e-12;

/// Zeros found on one segment.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroCountResult {
    pub count: usize,
    /// Strictly increasing positions in [0, L].
    pub locations: Vec<f64>,
    /// A near-tangency was detected somewhere on the segment.
    pub suspicious: bool,
}

/// A discrete zero-count law: (k, P(Z = k)) with positive probabilities.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CountDistribution {
    support: Vec<(u64, f64)>,
}

impl CountDistribution {
    fn new(entries: Vec<(u64, f64)>) -> Self {
        let total: f64 = entries.iter().map(|&(_, p)| p).sum();
        debug_assert!(
            (total - 1.0).abs() < 1e-12,
            "probabilities sum to {total}"
        );
        let mut support: Vec<(u64, f64)> = entries
            .into_iter()
            .filter(|&(_, p)| {
                debug_assert!(p > -1e-12, "negative probability {p}");
                p >= 1e-15
            })
            .collect();
        support.sort_by_key(|&(k, _)| k);
        CountDistribution { support }
    }

    /// The atoms (k, P(Z=k)), sorted by k.
    pub fn support(&self) -> &[(u64, f64)] {
        &self.support
    }

    /// P(Z = k), zero off the support.
    pub fn probability(&self, k: u64) -> f64 {
        self.support
            .iter()
            .find(|&&(key, _)| key == k)
            .map_or(0.0, |&(_, p)| p)
    }

    /// Σ k·p_k.
    pub fn mean(&self) -> f64 {
        self.support.iter().map(|&(k, p)| k as f64 * p).sum()
    }

    /// Σ k(k−1)·p_k.
    pub fn second_factorial(&self) -> f64 {
        self.support
            .iter()
            .map(|&(k, p)| (k * k.saturating_sub(1)) as f64 * p)
            .sum()
    }
}

/// The default counting grid: 40 points per nominal wavelength 2π/ω.
pub fn default_grid_step(convention: FrequencyConvention) -> f64 {
    TAU / convention.omega() / 40.0
}

/// Count the zeros of a sampled process on [0, L].
///
/// Sign changes between grid points are refined by bisection to `refine_tol`;
/// grid values within 1e−6 of zero relative to the amplitude scale, without a
/// sign change, trigger a 16-fold subdivision of the adjacent cell and set
/// `suspicious`. Duplicate candidates within `refine_tol` collapse to one.
pub fn count_zeros(process: &LineProcess, grid_step: f64, refine_tol: f64) -> ZeroCountResult {
    assert!(grid_step > 0.0 && refine_tol > 0.0);
    assert!(
        grid_step <= TAU / process.convention().omega() / 10.0,
        "grid step must resolve at least 10 points per wavelength"
    );
    let length = process.length();
    let threshold = TANGENCY_FACTOR * process.amplitude_scale();
    let graze = ENDPOINT_FACTOR * process.amplitude_scale();
    let cells = (length / grid_step).ceil().max(1.0) as usize;
    let step = length / cells as f64;

    let mut times = Vec::with_capacity(cells + 1);
    let mut values = Vec::with_capacity(cells + 1);
    let mut walker = process.walker(step);
    times.push(0.0);
    values.push(walker.current());
    for i in 1..=cells {
        times.push(if i == cells { length } else { i as f64 * step });
        values.push(walker.advance());
    }
    let crossing: Vec<bool> = (0..cells).map(|i| values[i] * values[i + 1] < 0.0).collect();

    let mut zeros: Vec<f64> = Vec::new();
    let mut suspicious = false;
    // A grid value near zero whose neighborhood shows no sign change may hide
    // a tangency; a small value next to a crossing is just a zero that the
    // bisection below will pin down.
    let mut subdivide_cell = vec![false; cells];
    for j in 0..=cells {
        if values[j] == 0.0 {
            zeros.push(times[j]);
            continue;
        }
        if values[j].abs() >= threshold
            || (j > 0 && crossing[j - 1])
            || (j < cells && crossing[j])
        {
            continue;
        }
        suspicious = true;
        if j > 0 {
            subdivide_cell[j - 1] = true;
        }
        if j < cells {
            subdivide_cell[j] = true;
        }
    }
    for i in 0..cells {
        let left = (times[i], values[i]);
        let right = (times[i + 1], values[i + 1]);
        if crossing[i] {
            zeros.push(bisect(process, left, right, refine_tol));
        } else if subdivide_cell[i] {
            subdivide(process, left, right, refine_tol, graze, &mut zeros);
        }
    }

    zeros.sort_by(f64::total_cmp);
    zeros.dedup_by(|next, kept| *next - *kept <= refine_tol);
    ZeroCountResult {
        count: zeros.len(),
        locations: zeros,
        suspicious,
    }
}

/// Bisection on a bracketing cell; values re-evaluated exactly.
fn bisect(process: &LineProcess, mut left: (f64, f64), mut right: (f64, f64), tol: f64) -> f64 {
    while right.0 - left.0 > tol {
        let mid = 0.5 * (left.0 + right.0);
        let value = process.value(mid);
        if value == 0.0 {
            return mid;
        }
        if left.1 * value < 0.0 {
            right = (mid, value);
        } else {
            left = (mid, value);
        }
    }
    0.5 * (left.0 + right.0)
}

/// Scan a near-tangent cell at 16× resolution for crossings the coarse grid
/// cannot see; endpoint grazes at 0 or L count as zeros.
fn subdivide(
    process: &LineProcess,
    left: (f64, f64),
    right: (f64, f64),
    tol: f64,
    graze: f64,
    zeros: &mut Vec<f64>,
) {
    let h = (right.0 - left.0) / 16.0;
    let mut prev = left;
    let mut found = false;
    for j in 1..=16 {
        let t = if j == 16 { right.0 } else { left.0 + j as f64 * h };
        let value = process.value(t);
        if value == 0.0 {
            zeros.push(t);
            found = true;
        } else if prev.1 * value < 0.0 {
            zeros.push(bisect(process, prev, (t, value), tol));
            found = true;
        }
        prev = (t, value);
    }
    if !found {
        // a graze exactly at a segment endpoint is a boundary zero pushed an
        // ulp outside by round-off; resolve toward inclusion
        for (t, v) in [left, right] {
            if (t == 0.0 || t == process.length()) && v.abs() < graze {
                zeros.push(t);
            }
        }
    }
}

/// Exact law of the zero count of the axis restriction (frequency set
/// {0, 1}, covariance cos²(t/2)) on [0, L], with n = ⌊L/2π⌋.
pub fn exact_distribution_u0(length: f64) -> CountDistribution {
    assert!(length > 0.0);
    let arc = (length / 2.0).cos().powi(2).asin();
    if length <= TAU {
        CountDistribution::new(vec![
            (0, 0.25 * (3.0 - SQRT_2 * length / PI) + arc / TAU),
            (1, 0.5 - arc / PI),
            (2, 0.25 * (SQRT_2 * length / PI - 1.0) + arc / TAU),
        ])
    } else {
        let n = (length / TAU).floor();
        let k = n as u64;
        CountDistribution::new(vec![
            (0, 1.0 - SQRT_2 / 2.0),
            (
                2 * k,
                -length / (TAU * SQRT_2) + (n + 1.0) / SQRT_2 - 0.25 + arc / TAU,
            ),
            (2 * k + 1, 0.5 - arc / PI),
            (
                2 * k + 2,
                length / (TAU * SQRT_2) - n / SQRT_2 - 0.25 + arc / TAU,
            ),
        ])
    }
}

/// Exact law of the zero count of the diagonal restriction (single frequency,
/// covariance cos(t/√2)): supported on {n′, n′+1} with n′ = ⌊L/(π√2)⌋.
pub fn exact_distribution_u_pi4(length: f64) -> CountDistribution {
    assert!(length > 0.0);
    let ratio = length / (PI * SQRT_2);
    let frac = ratio.fract();
    let n = ratio.trunc() as u64;
    CountDistribution::new(vec![(n, 1.0 - frac), (n + 1, frac)])
}

/// Exact persistence P(Z = 0) for the axis (u = 0) and diagonal (u = π/4)
/// restrictions; no other direction has a closed form.
pub fn exact_persistence(u: f64, length: f64) -> Result<f64> {
    assert!(length > 0.0);
    if u.abs() < 1e-12 {
        Ok(if length >= TAU {
            1.0 - SQRT_2 / 2.0
        } else {
            0.25 * (3.0 - SQRT_2 * length / PI) + (length / 2.0).cos().powi(2).asin() / TAU
        })
    } else if (u - FRAC_PI_4).abs() < 1e-12 {
        Ok((1.0 - length / (PI * SQRT_2)).max(0.0))
    } else {
        Err(Error::UnsupportedDirection { u })
    }
}

/// Exact E[Z(Z−1)] for the axis and diagonal restrictions.
pub fn exact_second_factorial(u: f64, length: f64) -> Result<f64> {
    assert!(length > 0.0);
    if u.abs() < 1e-12 {
        let n = (length / TAU).floor();
        Ok((4.0 * n + 1.0) * length / (PI * SQRT_2) - 2.0 * SQRT_2 * n * (n + 1.0) - 0.5
            + (length / 2.0).cos().powi(2).asin() / PI)
    } else if (u - FRAC_PI_4).abs() < 1e-12 {
        let ratio = length / (PI * SQRT_2);
        let n = ratio.trunc();
        Ok(n * (n - 1.0 + 2.0 * ratio.fract()))
    } else {
        Err(Error::UnsupportedDirection { u })
    }
}

/// Which coordinate the crossing nodal lines are constant in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Orientation {
    Vertical,
    Horizontal,
}

/// A pair of straight nodal-separating lines of the four-term field: the
/// field is positive on the line at `alpha1` and negative at `alpha2`.
#[derive(Debug, Clone, Copy)]
pub struct CrossingLines {
    pub orientation: Orientation,
    pub alpha1: f64,
    pub alpha2: f64,
}

/// Locate the crossing lines of √½(b₁cos x₁ + c₁sin x₁ + b₂cos x₂ + c₂sin x₂)
/// from the dominant coordinate's coefficient pair: the dominant part equals
/// +A at x = α₁ and −A at α₂ = α₁ + π, and |A| exceeds the other part's
/// amplitude everywhere, so the field has a fixed sign on each line.
///
/// α₁ = atan2(c, b) mod 2π is the half-angle form 2·arctan((A−b)/c) extended
/// to all signs of c (reflection c ↦ −c, t ↦ −t) and to c = 0.
pub fn crossing_lines(b1: f64, c1: f64, b2: f64, c2: f64) -> Result<CrossingLines> {
    let first = b1 * b1 + c1 * c1;
    let second = b2 * b2 + c2 * c2;
    if first == second {
        return Err(Error::Tie);
    }
    let (orientation, b, c) = if first > second {
        (Orientation::Vertical, b1, c1)
    } else {
        (Orientation::Horizontal, b2, c2)
    };
    let alpha1 = c.atan2(b).rem_euclid(TAU);
    let alpha2 = (alpha1 + PI).rem_euclid(TAU);
    Ok(CrossingLines {
        orientation,
        alpha1,
        alpha2,
    })
}
