//! Kac-Rice zero intensities: expected counts, two-point correlations,
//! second factorial moments and the parity law.
//!
//! For a unit-variance stationary Gaussian process with covariance κ and
//! M = −κ″(0), the zero count Z on [0, L] satisfies
//!
//!   E[Z] = (√M/π)·L,
//!   E[Z(Z−1)] = 2 ∫₀^L (L−t)·K2(t) dt,
//!
//! where the two-point intensity is
//!
//!   K2(t) = [M(1−κ²)−κ′²] / [π²(1−κ²)^{3/2}] · (√(1−ρ²) + ρ·arcsin ρ),
//!   ρ(t) = [κ″(1−κ²) + κκ′²] / [M(1−κ²) − κ′²].
//!
//! Near t = 0 the explicit K2 is a 0/0 of order t⁴/t⁴ and is evaluated by its
//! small-t series instead. With normalized spectral moments a = μ₂/M²,
//! b = μ₃/M³, c = μ₄/M⁴ (μ_k = Σ p_j w_j^{2k}):
//!
//!   K2(t) = c₁t + c₃t³ + c₄t⁴ + c₅t⁵ + O(t⁶),
//!   c₁ = M^{3/2}(a−1)/(8π),
//!   c₃ = M^{5/2}(5a² + 30a − 8b − 27)/(576π),
//!   c₄ = M³ √((b−a²)/(a−1)) (b−a²)/(324π²),
//!   c₅ = M^{7/2}(35a³ − 105a² − 56ab + 945a − 168b + 24c − 675)/(46080π).
//!
//! For arithmetic kernels (M = 2π², a = (3+g)/2, b = (5+3g)/2 with
//! g = ν̂₄cos4u) the linear coefficient reduces to (√2π²/8)(1+g), which drives
//! the small-L asymptotic E[Z(Z−1)] ≈ L³(√2π²/24)(1+g).
//!
//! Degenerate family (g = −1, equivalently a = 1): the process is a single
//! sinusoid, the explicit K2 collapses to 0/0 everywhere, and the family limit
//! of the series machinery yields K2 = (M^{5/2}/(180π))t³ + …, whose weighted
//! integral is E[Z(Z−1)] = M^{5/2}L⁵/(1800π) — for M = 2π² exactly
//! L⁵·√2π⁴/450. That family-limit value is what the numeric routine returns in
//! the degenerate branch; the pointwise `k2_two_point` stays strict and
//! reports the degenerate derivative structure as an error.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::kernel::CovarianceKernel1D;
use crate::lattice::LatticeCircle;
use crate::measure::Direction;

/// Degeneracy threshold on |a−1| = |μ₂/M² − 1| = |1+ν̂₄cos4u|/2 for
/// arithmetic kernels; 5e−10 corresponds to |1+ν̂₄cos4u| < 1e−9, wide enough
/// to absorb decimal-truncated inputs like u = 0.7853981634.
const DEGENERACY_TOL: f64 = 5e-10;

/// |κ| this close to 1 makes a pair of process values (anti-)fully correlated.
const COVARIANCE_TOL: f64 = 1e-12;

/// Kac-Rice evaluation context: a kernel together with M = −κ″(0).
#[derive(Debug, Clone)]
pub struct KacRiceContext {
    kernel: CovarianceKernel1D,
    m: f64,
}

/// Coefficients of the small-t expansion of K2.
#[derive(Debug, Clone, Copy)]
pub struct K2Series {
    pub c1: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
    /// True for single-frequency (pure tone) kernels, where the explicit K2
    /// is identically 0/0 and only the family-limit cubic survives.
    pub degenerate: bool,
}

/// Inputs of the closed small-L asymptotics: ν̂₄ and the direction.
#[derive(Debug, Clone, Copy)]
pub struct AsymptoticInputs {
    pub nu4: f64,
    pub u: Direction,
}

impl AsymptoticInputs {
    /// g = ν̂₄·cos 4u, the only combination the asymptotics depend on.
    pub fn g(&self) -> f64 {
        self.nu4 * (4.0 * self.u.u()).cos()
    }
}

impl KacRiceContext {
    /// Build a context from a kernel; M is read off the kernel's moments.
    pub fn new(kernel: CovarianceKernel1D) -> Self {
        let m = kernel.second_moment();
        KacRiceContext { kernel, m }
    }

    /// The kernel.
    pub fn kernel(&self) -> &CovarianceKernel1D {
        &self.kernel
    }

    /// M = −κ″(0).
    pub fn second_moment(&self) -> f64 {
        self.m
    }

    /// True iff the kernel carries a single frequency (ν̂₄cos4u = −1 family).
    pub fn is_degenerate(&self) -> bool {
        let a = self.kernel.spectral_moment(2) / (self.m * self.m);
        (a - 1.0).abs() < DEGENERACY_TOL
    }

    /// E[Z] = (√M/π)·L.
    pub fn expected_zero_count(&self, length: f64) -> f64 {
        assert!(length >= 0.0, "segment length must be nonnegative");
        self.m.sqrt() / PI * length
    }

    /// The explicit two-point intensity K2(t).
    pub fn k2_two_point(&self, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Err(Error::SingularAtZero);
        }
        let kappa = self.kernel.value(t);
        if kappa.abs() >= 1.0 - COVARIANCE_TOL {
            return Err(Error::DegenerateCovariance { t });
        }
        let d1 = self.kernel.derivative(t, 1);
        let d2 = self.kernel.derivative(t, 2);
        let one_minus = (1.0 - kappa) * (1.0 + kappa);
        let n1 = self.m * one_minus - d1 * d1;
        // Pure-tone kernels have N1 ≡ 0: the conditional derivative variance
        // vanishes and the density is genuinely undefined.
        if n1 <= 1e-10 * self.m * one_minus {
            return Err(Error::DegenerateCovariance { t });
        }
        let mut rho = (d2 * one_minus + kappa * d1 * d1) / n1;
        if rho.abs() > 1.0 {
            // ρ is a 0/0 ratio: its round-off noise scales with the
            // conditioning factor M(1−κ²)/N1, which diverges as t → 0 and is
            // infinite for kernels with exact linear prediction (the axis
            // kernel ½+½cos has ρ ≡ 1 identically). Widen the clamp window
            // accordingly; anything beyond it is genuinely out of range.
            let window = 1e-12 + 2e-11 * (self.m * one_minus / n1).max(1.0);
            if rho.abs() > 1.0 + window {
                return Err(Error::DegenerateCovariance { t });
            }
            rho = rho.signum();
        }
        let bracket = (1.0 - rho * rho).sqrt() + rho * rho.asin();
        Ok(n1 / (PI * PI * one_minus.powf(1.5)) * bracket)
    }

    /// Coefficients of the small-t series of K2.
    pub fn k2_series(&self) -> K2Series {
        let m = self.m;
        let a = self.kernel.spectral_moment(2) / m.powi(2);
        let b = self.kernel.spectral_moment(3) / m.powi(3);
        let c = self.kernel.spectral_moment(4) / m.powi(4);
        if (a - 1.0).abs() < DEGENERACY_TOL {
            return K2Series {
                c1: 0.0,
                c3: m.powf(2.5) / (180.0 * PI),
                c4: 0.0,
                c5: 0.0,
                degenerate: true,
            };
        }
        K2Series {
            degenerate: false,
            c1: m.powf(1.5) * (a - 1.0) / (8.0 * PI),
            c3: m.powf(2.5) * (5.0 * a * a + 30.0 * a - 8.0 * b - 27.0) / (576.0 * PI),
            c4: m.powi(3) * ((b - a * a) / (a - 1.0)).max(0.0).sqrt() * (b - a * a)
                / (324.0 * PI * PI),
            c5: m.powf(3.5)
                * (35.0 * a.powi(3) - 105.0 * a * a - 56.0 * a * b + 945.0 * a - 168.0 * b
                    + 24.0 * c
                    - 675.0)
                / (46080.0 * PI),
        }
    }

    /// Series value c₁t + c₃t³ + c₄t⁴ + c₅t⁵.
    pub fn k2_series_value(&self, t: f64) -> f64 {
        let s = self.k2_series();
        ((s.c5 * t + s.c4) * t + s.c3) * t * t * t + s.c1 * t
    }

    /// Crossover point between the series and the explicit formula: √M·t = 0.1
    /// balances the ~(√Mt)⁶ series truncation against the ~t⁻⁴ cancellation
    /// noise of the explicit 0/0 form.
    pub fn series_crossover(&self) -> f64 {
        0.1 / self.m.sqrt()
    }

    /// E[Z(Z−1)] on [0, L]: closed-form series integral on (0, t₀], adaptive
    /// quadrature of the explicit K2 on [t₀, L] (absolute tolerance 1e−10,
    /// relative 1e−8). Degenerate kernels take the family-limit value
    /// M^{5/2}L⁵/(1800π) instead of touching the explicit formula.
    pub fn second_factorial_moment_numeric(&self, length: f64) -> Result<f64> {
        assert!(length > 0.0, "segment length must be positive");
        let series = self.k2_series();
        if series.degenerate {
            return Ok(series.c3 * length.powi(5) / 10.0);
        }
        let t0 = self.series_crossover().min(length);
        // 2∫₀^{t0} (L−t)(c₁t + c₃t³ + c₄t⁴ + c₅t⁵) dt
        let weighted = |p: u32, c: f64| {
            let k = p as f64;
            2.0 * c
                * (length * t0.powi(p as i32 + 1) / (k + 1.0) - t0.powi(p as i32 + 2) / (k + 2.0))
        };
        let series_part = weighted(1, series.c1)
            + weighted(3, series.c3)
            + weighted(4, series.c4)
            + weighted(5, series.c5);
        if t0 >= length {
            return Ok(series_part);
        }
        self.check_nondegenerate_on(t0, length)?;
        let f = |t: f64| -> Result<f64> { Ok(2.0 * (length - t) * self.k2_two_point(t)?) };
        // rough magnitude for the relative part of the tolerance
        let mut rough = 0.0;
        let panels = 256;
        let h = (length - t0) / panels as f64;
        for i in 0..panels {
            let (l, r) = (t0 + i as f64 * h, t0 + (i + 1) as f64 * h);
            rough += h / 6.0 * (f(l)? + 4.0 * f(0.5 * (l + r))? + f(r)?);
        }
        let tol = (1e-8 * (series_part + rough).abs()).max(1e-10);
        let tail = adaptive_simpson(&f, t0, length, tol)?;
        Ok(series_part + tail)
    }

    /// Reject kernels whose covariance returns to ±1 inside [t0, L] (periodic
    /// or anti-phase recurrences make the pair density undefined there).
    fn check_nondegenerate_on(&self, t0: f64, length: f64) -> Result<()> {
        let wavelength = TAU / self.kernel.max_frequency().max(1e-300);
        let step = (wavelength / 64.0).min((length - t0) / 8.0);
        let n = ((length - t0) / step).ceil() as usize;
        let mut previous = (t0, self.kernel.value(t0).abs());
        let mut rising = false;
        let check_peak = |left: f64, right: f64| -> Result<()> {
            // golden-section maximization of |κ| on [left, right]
            let inv = (5.0f64.sqrt() - 1.0) / 2.0;
            let (mut a, mut b) = (left, right);
            let mut x1 = b - inv * (b - a);
            let mut x2 = a + inv * (b - a);
            let (mut f1, mut f2) = (self.kernel.value(x1).abs(), self.kernel.value(x2).abs());
            for _ in 0..80 {
                if f1 < f2 {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + inv * (b - a);
                    f2 = self.kernel.value(x2).abs();
                } else {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - inv * (b - a);
                    f1 = self.kernel.value(x1).abs();
                }
            }
            let peak = 0.5 * (a + b);
            if self.kernel.value(peak).abs() >= 1.0 - COVARIANCE_TOL {
                return Err(Error::DegenerateCovariance { t: peak });
            }
            Ok(())
        };
        for i in 1..=n {
            let t = (t0 + i as f64 * step).min(length);
            let v = self.kernel.value(t).abs();
            if v >= 1.0 - COVARIANCE_TOL {
                return Err(Error::DegenerateCovariance { t });
            }
            if v < previous.1 && rising && previous.1 > 1.0 - 1e-4 {
                // local max of |κ| close to 1: pin it down precisely
                check_peak((previous.0 - step).max(t0), t)?;
            }
            rising = v > previous.1;
            previous = (t, v);
        }
        if rising && previous.1 > 1.0 - 1e-4 {
            check_peak(previous.0 - step, length)?;
        }
        Ok(())
    }

    /// P(Z even on [0, T]) = ½ + arcsin(κ(T))/π.
    pub fn parity_even_probability(&self, t: f64) -> f64 {
        let kappa = self.kernel.value(t).clamp(-1.0, 1.0);
        0.5 + kappa.asin() / PI
    }
}

/// Small-L asymptotic E[Z(Z−1)] ≈ L³·(√2π²/24)(1 + ν̂₄cos4u) for rescaled
/// arithmetic waves.
pub fn second_factorial_moment_asymptotic(inputs: &AsymptoticInputs, length: f64) -> f64 {
    2.0f64.sqrt() * PI * PI / 24.0 * (1.0 + inputs.g()) * length.powi(3)
}

/// Degenerate-family asymptotic E[Z(Z−1)] ≈ L⁵·√2π⁴/450, valid only when
/// ν̂₄cos4u = −1 (the cubic coefficient vanishes).
pub fn degenerate_asymptotic(inputs: &AsymptoticInputs, length: f64) -> Result<f64> {
    let value = 1.0 + inputs.g();
    if value.abs() > 1e-9 {
        return Err(Error::NotDegenerate { value });
    }
    Ok(2.0f64.sqrt() * PI.powi(4) / 450.0 * length.powi(5))
}

/// Taylor coefficients [1, 0, −M/2, 0, M²(3+g)/48, 0, −M³(5+3g)/1440] of the
/// arithmetic kernel (TwoPi convention, M = 2π²) up to t^order, order ∈ {2,4,6}.
pub fn taylor_kernel(circle: &LatticeCircle, u: Direction, order: u32) -> Result<Vec<f64>> {
    if !matches!(order, 2 | 4 | 6) {
        return Err(Error::UnsupportedOrder { k: order });
    }
    let m = 2.0 * PI * PI;
    let g = circle.nu4_hat() * (4.0 * u.u()).cos();
    let mut coeffs = vec![1.0, 0.0, -m / 2.0];
    if order >= 4 {
        coeffs.extend_from_slice(&[0.0, m * m * (3.0 + g) / 48.0]);
    }
    if order >= 6 {
        coeffs.extend_from_slice(&[0.0, -m.powi(3) * (5.0 + 3.0 * g) / 1440.0]);
    }
    Ok(coeffs)
}

/// Adaptive Simpson quadrature with Richardson acceptance |ΔS| ≤ 15·tol.
fn adaptive_simpson<F>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let fa = f(a)?;
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    let fb = f(b)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut evals = 0usize;
    adaptive_step(f, a, fa, m, fm, b, fb, whole, tol, 0, &mut evals)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_step<F>(
    f: &F,
    a: f64,
    fa: f64,
    m: f64,
    fm: f64,
    b: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    evals: &mut usize,
) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    *evals += 2;
    if *evals > 4_000_000 {
        return Err(Error::QuadratureFailure {
            detail: "evaluation budget exhausted".into(),
        });
    }
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth >= 60 {
        return Err(Error::QuadratureFailure {
            detail: format!("no convergence near t = {m} (interval error {delta:e})"),
        });
    }
    let half = 0.5 * tol;
    Ok(
        adaptive_step(f, a, fa, lm, flm, m, fm, left, half, depth + 1, evals)?
            + adaptive_step(f, m, fm, rm, frm, b, fb, right, half, depth + 1, evals)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate_lattice_points;
    use crate::field::FrequencyConvention;
    use crate::measure::SpectralMeasure;
    use std::f64::consts::FRAC_PI_4;

    const SQRT_2: f64 = std::f64::consts::SQRT_2;

    fn arithmetic_ctx(m: u64, u: f64) -> KacRiceContext {
        let mu = SpectralMeasure::from_lattice(m).unwrap();
        KacRiceContext::new(CovarianceKernel1D::from_measure(
            &mu,
            Direction::new(u),
            FrequencyConvention::TwoPi,
        ))
    }

    fn cilleruelo_ctx(u: f64) -> KacRiceContext {
        KacRiceContext::new(CovarianceKernel1D::from_measure(
            &SpectralMeasure::cilleruelo(),
            Direction::new(u),
            FrequencyConvention::Angular,
        ))
    }

    #[test]
    fn expected_count_examples() {
        let cil = cilleruelo_ctx(0.0);
        assert!((cil.second_moment() - 0.5).abs() < 1e-14);
        for length in [0.5, 3.0, 12.0] {
            assert!((cil.expected_zero_count(length) - length / (PI * SQRT_2)).abs() < 1e-13);
        }
        let wave = arithmetic_ctx(25, 0.4);
        assert!((wave.expected_zero_count(1.0) - SQRT_2).abs() < 1e-12);
        assert_eq!(wave.expected_zero_count(0.0), 0.0);
    }

    #[test]
    fn k2_is_singular_at_zero_and_at_full_correlation() {
        let ctx = cilleruelo_ctx(0.0);
        assert!(matches!(ctx.k2_two_point(0.0), Err(Error::SingularAtZero)));
        // κ₀(2π) = 1 by periodicity
        assert!(matches!(
            ctx.k2_two_point(TAU),
            Err(Error::DegenerateCovariance { .. })
        ));
        // pure tone: N1 ≡ 0 at every t
        let diag = cilleruelo_ctx(FRAC_PI_4);
        assert!(matches!(
            diag.k2_two_point(1.0),
            Err(Error::DegenerateCovariance { .. })
        ));
    }

    #[test]
    fn k2_small_t_slope_matches_arithmetic_coefficient() {
        for (m, u) in [(1u64, 0.0), (25, 0.3), (1105, 0.2), (5, 0.1)] {
            let ctx = arithmetic_ctx(m, u);
            let g = SpectralMeasure::from_lattice(m).unwrap().nu4_hat() * (4.0 * u).cos();
            let c1 = SQRT_2 * PI * PI / 8.0 * (1.0 + g);
            let t = 2e-2;
            let ratio = ctx.k2_two_point(t).unwrap() / t;
            assert!(
                (ratio - c1).abs() < 0.02 * c1.abs().max(1.0),
                "m={m} u={u}: ratio {ratio} vs c1 {c1}"
            );
            // series c1 is exact
            assert!((ctx.k2_series().c1 - c1).abs() < 1e-10 * c1.abs().max(1.0));
        }
    }

    #[test]
    fn k2_is_even_and_nonnegative() {
        let ctx = arithmetic_ctx(25, 0.27);
        for i in 1..100 {
            let t = 0.013 * i as f64;
            let v = ctx.k2_two_point(t).unwrap();
            assert!(v >= 0.0, "K2({t}) = {v}");
            assert_eq!(v, ctx.k2_two_point(-t).unwrap());
        }
    }

    #[test]
    fn series_meets_explicit_at_crossover() {
        for (m, u) in [(1u64, 0.0), (1, 0.3), (25, 0.13), (65, 0.4), (1105, 0.05)] {
            let ctx = arithmetic_ctx(m, u);
            let t0 = ctx.series_crossover();
            let explicit = ctx.k2_two_point(t0).unwrap();
            let series = ctx.k2_series_value(t0);
            assert!(
                (explicit - series).abs() <= 3e-8 * explicit.abs().max(1e-8),
                "m={m} u={u}: explicit {explicit:e} vs series {series:e}"
            );
        }
    }

    #[test]
    fn numeric_moment_matches_cubic_asymptotic() {
        let ctx = arithmetic_ctx(1, 0.0);
        let length = 0.05;
        let numeric = ctx.second_factorial_moment_numeric(length).unwrap();
        let asymptotic = SQRT_2 * PI * PI / 24.0 * 2.0 * length.powi(3);
        assert!(
            (numeric - asymptotic).abs() < 0.01 * asymptotic,
            "numeric {numeric} vs asymptotic {asymptotic}"
        );
    }

    #[test]
    fn numeric_moment_degenerate_family_value() {
        let ctx = arithmetic_ctx(1, FRAC_PI_4);
        assert!(ctx.is_degenerate());
        let length = 0.05;
        let numeric = ctx.second_factorial_moment_numeric(length).unwrap();
        let expected = SQRT_2 * PI.powi(4) / 450.0 * length.powi(5);
        assert!(
            (numeric - expected).abs() < 0.02 * expected,
            "numeric {numeric} vs degenerate asymptotic {expected}"
        );
        // truncated-decimal π/4 is still recognized
        assert!(arithmetic_ctx(1, 0.7853981634).is_degenerate());
        assert!(!arithmetic_ctx(1, 0.78).is_degenerate());
    }

    #[test]
    fn numeric_moment_shrinks_monotonically() {
        let ctx = arithmetic_ctx(25, 0.3);
        let values: Vec<f64> = [0.4, 0.2, 0.1, 0.05]
            .iter()
            .map(|&l| ctx.second_factorial_moment_numeric(l).unwrap())
            .collect();
        assert!(values.windows(2).all(|w| w[1] < w[0] && w[1] > 0.0), "{values:?}");
    }

    #[test]
    fn numeric_moment_rejects_periodic_covariance() {
        // κ₀ has period 2π: pairs at lag 2π are fully correlated
        let ctx = cilleruelo_ctx(0.0);
        assert!(matches!(
            ctx.second_factorial_moment_numeric(7.0),
            Err(Error::DegenerateCovariance { .. })
        ));
        // below the period everything is fine
        assert!(ctx.second_factorial_moment_numeric(3.0).is_ok());
    }

    #[test]
    fn ratio_to_asymptotic_improves_quadratically() {
        let ctx = arithmetic_ctx(25, 0.3);
        let inputs = AsymptoticInputs {
            nu4: SpectralMeasure::from_lattice(25).unwrap().nu4_hat(),
            u: Direction::new(0.3),
        };
        let lengths = [0.2, 0.1, 0.05, 0.025];
        let errors: Vec<f64> = lengths
            .iter()
            .map(|&l| {
                let numeric = ctx.second_factorial_moment_numeric(l).unwrap();
                let asym = second_factorial_moment_asymptotic(&inputs, l);
                (numeric / asym - 1.0).abs()
            })
            .collect();
        // log-log slope of error vs L should be ≈ 2
        let slope = (errors[0] / errors[3]).ln() / (lengths[0] / lengths[3]).ln();
        assert!(slope > 1.8, "errors {errors:?}, slope {slope}");
    }

    #[test]
    fn asymptotic_examples_and_bounds() {
        let uniform = AsymptoticInputs {
            nu4: 0.0,
            u: Direction::new(0.9),
        };
        let length: f64 = 1.7;
        let expected = SQRT_2 * PI * PI / 24.0 * length.powi(3);
        assert!((second_factorial_moment_asymptotic(&uniform, length) - expected).abs() < 1e-12);

        let degenerate = AsymptoticInputs {
            nu4: 1.0,
            u: Direction::new(FRAC_PI_4),
        };
        assert!(second_factorial_moment_asymptotic(&degenerate, length).abs() < 1e-9);
        assert!(degenerate_asymptotic(&degenerate, 0.05).is_ok());
        assert!(matches!(
            degenerate_asymptotic(&uniform, 0.05),
            Err(Error::NotDegenerate { .. })
        ));

        // coefficient stays within [0, √2π²/12] over a (ν̂₄, u) grid
        for i in 0..=10 {
            for j in 0..=10 {
                let inputs = AsymptoticInputs {
                    nu4: -1.0 + 0.2 * i as f64,
                    u: Direction::new(FRAC_PI_4 * j as f64 / 10.0),
                };
                let c = second_factorial_moment_asymptotic(&inputs, 1.0);
                assert!((-1e-12..=SQRT_2 * PI * PI / 12.0 + 1e-12).contains(&c));
            }
        }
    }

    #[test]
    fn taylor_kernel_matches_spectral_moments() {
        let circle = enumerate_lattice_points(25).unwrap();
        let u = Direction::new(0.2);
        let coeffs = taylor_kernel(&circle, u, 6).unwrap();
        assert_eq!(coeffs.len(), 7);
        assert_eq!(coeffs[0], 1.0);
        assert!((coeffs[2] + PI * PI).abs() < 1e-12);
        // against the direct series of Σ p_j cos(w_j t): coefficient of t^{2k}
        // is (−1)^k μ_k/(2k)!
        let kernel = CovarianceKernel1D::from_measure(
            &SpectralMeasure::from_lattice(25).unwrap(),
            u,
            FrequencyConvention::TwoPi,
        );
        let factorials = [1.0, 2.0, 24.0, 720.0];
        for k in 1..=3u32 {
            let direct = (-1.0f64).powi(k as i32) * kernel.spectral_moment(k)
                / factorials[k as usize];
            assert!(
                (coeffs[2 * k as usize] - direct).abs() < 1e-9 * direct.abs(),
                "k={k}: {} vs {direct}",
                coeffs[2 * k as usize]
            );
        }
        assert!(matches!(
            taylor_kernel(&circle, u, 8),
            Err(Error::UnsupportedOrder { k: 8 })
        ));
    }

    #[test]
    fn parity_examples() {
        let ctx = cilleruelo_ctx(0.0);
        // κ₀(π) = 0 → ½; κ₀(2π) = 1 → 1
        assert!((ctx.parity_even_probability(PI) - 0.5).abs() < 1e-12);
        assert!((ctx.parity_even_probability(TAU) - 1.0).abs() < 1e-12);
    }

    proptest::proptest! {
        #[test]
        fn k2_nonnegative_where_defined(
            m in 1u64..500,
            u in 0.0f64..FRAC_PI_4,
            t in 1e-4f64..3.0,
        ) {
            if SpectralMeasure::from_lattice(m).is_ok() {
                let ctx = arithmetic_ctx(m, u);
                if let Ok(v) = ctx.k2_two_point(t) {
                    proptest::prop_assert!(v >= 0.0);
                }
            }
        }
    }
}
