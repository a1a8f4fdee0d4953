//! One-dimensional covariance kernels of restricted fields.
//!
//! The restriction of the field of a measure μ to a line of direction
//! α = (cos u, sin u) is stationary with covariance
//!
//!   κ(t) = Σ_j p_j cos(ω ξ_j t),    ξ_j = ⟨y_j, α⟩ = cos(θ_j − u),
//!
//! one term per antipodal pair (weights folded). Everything downstream is a
//! function of the even spectral moments μ_k = Σ_j p_j (ω ξ_j)^{2k}: the
//! second moment M = μ₁ = −κ″(0) drives the expected zero count, and the
//! quadruple (μ₁,…,μ₄) drives the small-t expansion of the two-point zero
//! intensity. For arithmetic measures in the 2π convention, M = 2π² for every
//! m and u.

use crate::field::FrequencyConvention;
use crate::measure::{Direction, ProjectedMeasure, SpectralMeasure};

/// Covariance kernel κ(t) = Σ p_j cos(w_j t) with w_j ≥ 0 canonical.
#[derive(Debug, Clone)]
pub struct CovarianceKernel1D {
    // (frequency w_j = ω|ξ_j|, weight p_j), sorted by frequency, duplicates merged
    terms: Vec<(f64, f64)>,
}

impl CovarianceKernel1D {
    /// Kernel of the μ-field restricted to direction u under a convention.
    pub fn from_measure(
        mu: &SpectralMeasure,
        u: Direction,
        convention: FrequencyConvention,
    ) -> Self {
        Self::from_projection(&mu.project(u), convention)
    }

    /// Kernel read off a projected measure: atom at position x ↦ frequency ω|x|.
    pub fn from_projection(rho: &ProjectedMeasure, convention: FrequencyConvention) -> Self {
        let omega = convention.omega();
        let mut terms: Vec<(f64, f64)> = Vec::new();
        let mut sorted: Vec<(f64, f64)> = rho
            .atoms()
            .iter()
            .map(|&(x, w)| (omega * x.abs(), w))
            .collect();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (w, p) in sorted {
            match terms.last_mut() {
                Some(last) if (w - last.0).abs() <= 1e-12 => last.1 += p,
                _ => terms.push((w, p)),
            }
        }
        CovarianceKernel1D { terms }
    }

    /// (frequency, weight) pairs, sorted by frequency.
    pub fn terms(&self) -> &[(f64, f64)] {
        &self.terms
    }

    /// κ(t).
    pub fn value(&self, t: f64) -> f64 {
        self.terms.iter().map(|&(w, p)| p * (w * t).cos()).sum()
    }

    /// n-th derivative κ⁽ⁿ⁾(t), exact for any order.
    pub fn derivative(&self, t: f64, order: u32) -> f64 {
        self.terms
            .iter()
            .map(|&(w, p)| {
                let scale = p * w.powi(order as i32);
                let (s, c) = (w * t).sin_cos();
                scale
                    * match order % 4 {
                        0 => c,
                        1 => -s,
                        2 => -c,
                        _ => s,
                    }
            })
            .sum()
    }

    /// Even spectral moment μ_k = Σ p_j w_j^{2k}.
    pub fn spectral_moment(&self, k: u32) -> f64 {
        self.terms
            .iter()
            .map(|&(w, p)| p * w.powi(2 * k as i32))
            .sum()
    }

    /// M = μ₁ = −κ″(0), the variance of the process derivative.
    pub fn second_moment(&self) -> f64 {
        self.spectral_moment(1)
    }

    /// Largest frequency (sets the series radius for small-t expansions).
    pub fn max_frequency(&self) -> f64 {
        self.terms.last().map_or(0.0, |&(w, _)| w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{enumerate_lattice_points, MomentMode};
    use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

    #[test]
    fn cilleruelo_axis_kernel_is_cos_squared() {
        let mu = SpectralMeasure::cilleruelo();
        let k = CovarianceKernel1D::from_measure(
            &mu,
            Direction::new(0.0),
            FrequencyConvention::Angular,
        );
        // κ₀(t) = ½ + ½cos t = cos²(t/2)
        assert_eq!(k.terms().len(), 2);
        for t in [0.0, 0.3, 1.7, PI, 5.2] {
            assert!((k.value(t) - (t / 2.0).cos().powi(2)).abs() < 1e-15);
        }
    }

    #[test]
    fn cilleruelo_diagonal_kernel_is_plain_cosine() {
        let mu = SpectralMeasure::cilleruelo();
        let k = CovarianceKernel1D::from_measure(
            &mu,
            Direction::new(FRAC_PI_4),
            FrequencyConvention::Angular,
        );
        assert_eq!(k.terms().len(), 1);
        for t in [0.0, 0.4, 2.9] {
            assert!((k.value(t) - (t / SQRT_2).cos()).abs() < 1e-15);
        }
    }

    #[test]
    fn arithmetic_second_moment_is_two_pi_squared() {
        for (m, u) in [(1u64, 0.0), (5, 0.3), (25, 0.11), (1105, 0.7), (2917, 1.2)] {
            let mu = SpectralMeasure::from_lattice(m).unwrap();
            let k = CovarianceKernel1D::from_measure(
                &mu,
                Direction::new(u),
                FrequencyConvention::TwoPi,
            );
            let want = 2.0 * PI * PI;
            assert!(
                (k.second_moment() - want).abs() < 1e-10 * want,
                "m={m} u={u}: {}",
                k.second_moment()
            );
            assert!((k.derivative(0.0, 2) + want).abs() < 1e-10 * want);
        }
    }

    #[test]
    fn spectral_moments_match_directional_moments() {
        // μ_k = (2π)^{2k} m^{−k} · avg⟨λ,α⟩^{2k} for arithmetic measures
        let m = 65u64;
        let u = 0.27;
        let circle = enumerate_lattice_points(m).unwrap();
        let mu = SpectralMeasure::from_lattice(m).unwrap();
        let k =
            CovarianceKernel1D::from_measure(&mu, Direction::new(u), FrequencyConvention::TwoPi);
        for (order, lattice_k) in [(1u32, 2u32), (2, 4), (3, 6)] {
            let brute = circle
                .directional_moment(u, lattice_k, MomentMode::Brute)
                .unwrap();
            let expected =
                (2.0 * PI).powi(2 * order as i32) * brute / (m as f64).powi(order as i32);
            let got = k.spectral_moment(order);
            assert!(
                (got - expected).abs() < 1e-10 * expected.abs(),
                "order {order}: {got} vs {expected}"
            );
        }
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let mu = SpectralMeasure::from_lattice(25).unwrap();
        let k =
            CovarianceKernel1D::from_measure(&mu, Direction::new(0.2), FrequencyConvention::TwoPi);
        let h = 1e-6;
        for t in [0.13, 0.77, 2.4] {
            let fd1 = (k.value(t + h) - k.value(t - h)) / (2.0 * h);
            assert!((k.derivative(t, 1) - fd1).abs() < 1e-6 * k.second_moment());
            let fd2 = (k.value(t + h) - 2.0 * k.value(t) + k.value(t - h)) / (h * h);
            assert!((k.derivative(t, 2) - fd2).abs() < 1e-4 * k.second_moment());
        }
    }

    #[test]
    fn restriction_covariance_equals_kernel() {
        // E[f(s)f(t)] computed from the term structure equals κ(s−t)
        use crate::field::{FrequencyConvention, PlanarField};
        use crate::rng::stream_rng;
        let mu = SpectralMeasure::from_lattice(5).unwrap();
        let u = Direction::new(0.31);
        let f = PlanarField::sample_wave(&mu, FrequencyConvention::TwoPi, &mut stream_rng(20, 0))
            .unwrap();
        let p = f.restrict(u, 4.0);
        let k = CovarianceKernel1D::from_measure(&mu, u, FrequencyConvention::TwoPi);
        for (s, t) in [(0.0, 0.0), (0.5, 0.1), (1.9, 3.3)] {
            // per-pair covariance contribution: p_j cos(w_j (s−t))
            let analytic: f64 = p
                .terms()
                .iter()
                .zip(f.terms())
                .map(|(lt, ft)| ft.pair_weight * (lt.w * (s - t)).cos())
                .sum();
            assert!((analytic - k.value(s - t)).abs() < 1e-12);
        }
    }

    proptest::proptest! {
        #[test]
        fn kernel_bounds_and_symmetry(
            u in 0.0f64..FRAC_PI_4,
            t in -20.0f64..20.0,
            m in 1u64..300,
        ) {
            if let Ok(mu) = SpectralMeasure::from_lattice(m) {
                let k = CovarianceKernel1D::from_measure(
                    &mu,
                    Direction::new(u),
                    FrequencyConvention::TwoPi,
                );
                proptest::prop_assert!((k.value(0.0) - 1.0).abs() < 1e-12);
                proptest::prop_assert!(k.value(t).abs() <= 1.0 + 1e-12);
                proptest::prop_assert!((k.value(t) - k.value(-t)).abs() < 1e-12);
                proptest::prop_assert!(k.derivative(0.0, 1).abs() < 1e-12);
            }
        }
    }
}
