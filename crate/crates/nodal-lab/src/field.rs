//! Gaussian trigonometric fields and their restrictions to lines.
//!
//! A field attached to a symmetric atomic measure μ = Σ w_j δ_{θ_j} is the
//! real stationary Gaussian sum
//!
//!   field(x) = Σ_pairs √p_j (b_j cos(ω⟨y_j, x⟩) + c_j sin(ω⟨y_j, x⟩)),
//!
//! with one term per antipodal atom pair {y_j, −y_j}, combined pair weight
//! p_j, independent standard normal b_j, c_j, and ω fixed by the frequency
//! convention (2π for rescaled arithmetic waves, 1 for the angular form of
//! the Cilleruelo field). Pointwise variance is Σ p_j = 1.
//!
//! Restricting to the line t ↦ t·(cos u, sin u) gives a stationary process on
//! [0, L] whose covariance is the one-dimensional kernel built from the
//! projected measure; both directions of that correspondence are exercised by
//! the tests.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{Direction, SpectralMeasure};

/// Frequency convention: ω = 2π (rescaled waves, unit wavelength scale) or
/// ω = 1 (angular form, wavelength 2π).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrequencyConvention {
    TwoPi,
    Angular,
}

impl FrequencyConvention {
    /// The frequency multiplier ω.
    pub fn omega(&self) -> f64 {
        match self {
            FrequencyConvention::TwoPi => TAU,
            FrequencyConvention::Angular => 1.0,
        }
    }
}

/// One antipodal pair: unit direction, combined weight, realized coefficients.
#[derive(Debug, Clone, Copy)]
pub struct FieldTerm {
    pub direction: [f64; 2],
    pub pair_weight: f64,
    pub b: f64,
    pub c: f64,
}

/// A realized planar Gaussian field.
#[derive(Debug, Clone)]
pub struct PlanarField {
    terms: Vec<FieldTerm>,
    convention: FrequencyConvention,
}

/// Serialized form of a field: one record per term, directions as angles.
#[derive(Serialize, Deserialize)]
struct FieldDoc {
    convention: FrequencyConvention,
    terms: Vec<TermDoc>,
}

#[derive(Serialize, Deserialize)]
struct TermDoc {
    angle: f64,
    p: f64,
    b: f64,
    c: f64,
}

impl PlanarField {
    /// Draw a field with the law of the wave attached to μ: one (b, c) pair of
    /// standard normals per antipodal atom pair, consumed in increasing order
    /// of the representative angle (the one in [0, π)).
    ///
    /// Only reflection through the origin is required of μ here, so
    /// deliberately asymmetric test measures can be sampled too.
    pub fn sample_wave<R: Rng + ?Sized>(
        mu: &SpectralMeasure,
        convention: FrequencyConvention,
        rng: &mut R,
    ) -> Result<Self> {
        let atoms = mu.atoms();
        let mut terms = Vec::with_capacity(atoms.len() / 2);
        for a in atoms {
            if a.angle >= PI {
                continue;
            }
            let antipode = (a.angle + PI) % TAU;
            let partner = atoms
                .iter()
                .find(|b| {
                    let mut d = (b.angle - antipode).abs();
                    d = d.min(TAU - d);
                    d <= 1e-9
                })
                .ok_or_else(|| Error::AsymmetricMeasure {
                    detail: format!("atom at angle {} has no antipode", a.angle),
                })?;
            terms.push(FieldTerm {
                direction: [a.angle.cos(), a.angle.sin()],
                pair_weight: a.weight + partner.weight,
                b: rng.sample(StandardNormal),
                c: rng.sample(StandardNormal),
            });
        }
        if terms.is_empty() {
            return Err(Error::AsymmetricMeasure {
                detail: "no antipodal pairs found".into(),
            });
        }
        Ok(PlanarField { terms, convention })
    }

    /// Draw a Cilleruelo-type comparison field: 2M terms at directions
    /// (cos φ_j, sin φ_j) and (−sin φ_j, cos φ_j), pair weight 1/(2M) each,
    /// unit total variance, angular convention.
    pub fn cilleruelo_type<R: Rng + ?Sized>(
        phis: &[f64],
        eps: f64,
        rng: &mut R,
    ) -> Result<Self> {
        if phis.is_empty() {
            return Err(Error::InvalidConfig {
                detail: "need at least one perturbation angle".into(),
            });
        }
        if let Some(&bad) = phis.iter().find(|p| p.abs() > eps) {
            return Err(Error::AngleOutOfBand { angle: bad });
        }
        let p = 1.0 / (2 * phis.len()) as f64;
        let mut terms = Vec::with_capacity(2 * phis.len());
        for &phi in phis {
            let (s, c) = phi.sin_cos();
            for direction in [[c, s], [-s, c]] {
                terms.push(FieldTerm {
                    direction,
                    pair_weight: p,
                    b: rng.sample(StandardNormal),
                    c: rng.sample(StandardNormal),
                });
            }
        }
        Ok(PlanarField {
            terms,
            convention: FrequencyConvention::Angular,
        })
    }

    /// Build a field from explicit terms (coefficients chosen by the caller).
    pub fn from_terms(terms: Vec<FieldTerm>, convention: FrequencyConvention) -> Result<Self> {
        let total: f64 = terms.iter().map(|t| t.pair_weight).sum();
        if terms.is_empty() || (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig {
                detail: format!("pair weights sum to {total}, expected 1"),
            });
        }
        for t in &terms {
            let norm = t.direction[0].hypot(t.direction[1]);
            if (norm - 1.0).abs() > 1e-9 || t.pair_weight <= 0.0 {
                return Err(Error::InvalidConfig {
                    detail: "directions must be unit vectors with positive weights".into(),
                });
            }
        }
        Ok(PlanarField { terms, convention })
    }

    /// The realized terms.
    pub fn terms(&self) -> &[FieldTerm] {
        &self.terms
    }

    /// The frequency convention.
    pub fn convention(&self) -> FrequencyConvention {
        self.convention
    }

    /// Exact field value at x.
    pub fn evaluate(&self, x: [f64; 2]) -> f64 {
        let omega = self.convention.omega();
        self.terms
            .iter()
            .map(|t| {
                let phase = omega * (t.direction[0] * x[0] + t.direction[1] * x[1]);
                let (s, c) = phase.sin_cos();
                t.pair_weight.sqrt() * (t.b * c + t.c * s)
            })
            .sum()
    }

    /// Exact analytic gradient at x.
    pub fn gradient(&self, x: [f64; 2]) -> [f64; 2] {
        let omega = self.convention.omega();
        let mut g = [0.0, 0.0];
        for t in &self.terms {
            let phase = omega * (t.direction[0] * x[0] + t.direction[1] * x[1]);
            let (s, c) = phase.sin_cos();
            let radial = t.pair_weight.sqrt() * omega * (-t.b * s + t.c * c);
            g[0] += radial * t.direction[0];
            g[1] += radial * t.direction[1];
        }
        g
    }

    /// Restrict to the segment t ↦ t(cos u, sin u), t ∈ [0, L].
    pub fn restrict(&self, u: Direction, length: f64) -> LineProcess {
        assert!(length > 0.0, "segment length must be positive");
        let omega = self.convention.omega();
        let (su, cu) = u.u().sin_cos();
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let root = t.pair_weight.sqrt();
                LineTerm {
                    w: omega * (t.direction[0] * cu + t.direction[1] * su),
                    a: root * t.b,
                    s: root * t.c,
                }
            })
            .collect();
        LineProcess {
            terms,
            u,
            length,
            convention: self.convention,
        }
    }

    /// Serialize to the replay document `{"convention":…,"terms":[…]}`.
    pub fn to_json(&self) -> String {
        let doc = FieldDoc {
            convention: self.convention,
            terms: self
                .terms
                .iter()
                .map(|t| TermDoc {
                    angle: t.direction[1].atan2(t.direction[0]),
                    p: t.pair_weight,
                    b: t.b,
                    c: t.c,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("field serialization cannot fail")
    }

    /// Rebuild a field from its replay document.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: FieldDoc = serde_json::from_str(text)?;
        let terms = doc
            .terms
            .iter()
            .map(|t| FieldTerm {
                direction: [t.angle.cos(), t.angle.sin()],
                pair_weight: t.p,
                b: t.b,
                c: t.c,
            })
            .collect();
        Self::from_terms(terms, doc.convention)
    }
}

/// One sinusoid of the restricted process: a·cos(w t) + s·sin(w t).
#[derive(Debug, Clone, Copy)]
pub struct LineTerm {
    pub w: f64,
    pub a: f64,
    pub s: f64,
}

/// A planar field restricted to a segment of direction u and length L.
#[derive(Debug, Clone)]
pub struct LineProcess {
    terms: Vec<LineTerm>,
    u: Direction,
    length: f64,
    convention: FrequencyConvention,
}

impl LineProcess {
    /// The sinusoid terms.
    pub fn terms(&self) -> &[LineTerm] {
        &self.terms
    }

    /// Convention of the parent field (sets the nominal wavelength 2π/ω).
    pub fn convention(&self) -> FrequencyConvention {
        self.convention
    }

    /// Segment length L.
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Direction of the underlying line.
    pub fn direction(&self) -> Direction {
        self.u
    }

    /// Exact process value at t.
    pub fn value(&self, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|term| {
                let (s, c) = (term.w * t).sin_cos();
                term.a * c + term.s * s
            })
            .sum()
    }

    /// Exact n-th derivative at t (any order; d/dt cos(wt) = −w sin(wt), …).
    pub fn derivative(&self, t: f64, order: u32) -> f64 {
        self.terms
            .iter()
            .map(|term| {
                let scale = term.w.powi(order as i32);
                let (s, c) = (term.w * t).sin_cos();
                let (dc, ds) = match order % 4 {
                    0 => (c, s),
                    1 => (-s, c),
                    2 => (-c, -s),
                    _ => (s, -c),
                };
                scale * (term.a * dc + term.s * ds)
            })
            .sum()
    }

    /// Realization amplitude scale A = Σ_j √(p_j(b_j² + c_j²)) bounding
    /// |process| and appearing in tangency thresholds.
    pub fn amplitude_scale(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.a.hypot(t.s))
            .sum()
    }

    /// Largest absolute term frequency (sets the minimal wavelength).
    pub fn max_frequency(&self) -> f64 {
        self.terms.iter().map(|t| t.w.abs()).fold(0.0, f64::max)
    }

    /// Incremental evaluation over the uniform grid t_k = k·step via per-term
    /// phase rotation; O(1) trigonometry per step regardless of grid size.
    pub fn walker(&self, step: f64) -> GridWalker<'_> {
        GridWalker::new(self, step)
    }
}

/// Streaming grid evaluator: after construction, `current` holds f(0); each
/// `advance` rotates every term's phase by w·step and returns the next value.
///
/// Rotation drift accumulates like n·ε per term, ~1e−12 after a million
/// steps — far below any decision threshold used by the zero counter (which
/// re-evaluates candidate cells exactly anyway).
pub struct GridWalker<'a> {
    terms: &'a [LineTerm],
    // (cos(w t_k), sin(w t_k)) per term
    states: Vec<(f64, f64)>,
    // (cos(w step), sin(w step)) per term
    rotations: Vec<(f64, f64)>,
    t: f64,
    step: f64,
    index: u64,
    current: f64,
}

impl<'a> GridWalker<'a> {
    fn new(process: &'a LineProcess, step: f64) -> Self {
        let states: Vec<(f64, f64)> = process.terms.iter().map(|_| (1.0, 0.0)).collect();
        let rotations = process
            .terms
            .iter()
            .map(|term| {
                let (s, c) = (term.w * step).sin_cos();
                (c, s)
            })
            .collect();
        let current = process.terms.iter().map(|t| t.a).sum();
        GridWalker {
            terms: &process.terms,
            states,
            rotations,
            t: 0.0,
            step,
            index: 0,
            current,
        }
    }

    /// Grid position t_k of the current value.
    pub fn t(&self) -> f64 {
        self.t
    }

    /// f(t_k).
    pub fn current(&self) -> f64 {
        self.current
    }

    /// Step to t_{k+1} and return f(t_{k+1}).
    pub fn advance(&mut self) -> f64 {
        let mut value = 0.0;
        for ((state, rot), term) in self
            .states
            .iter_mut()
            .zip(&self.rotations)
            .zip(self.terms)
        {
            let (c, s) = *state;
            let (cr, sr) = *rot;
            let next = (c * cr - s * sr, s * cr + c * sr);
            *state = next;
            value += term.a * next.0 + term.s * next.1;
        }
        self.index += 1;
        self.t = self.index as f64 * self.step;
        self.current = value;
        value
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Atom;
    use crate::rng::stream_rng;
    use std::f64::consts::FRAC_PI_2;

    const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

    /// Cilleruelo field with hand-picked coefficients (b₁,c₁ on e₁; b₂,c₂ on e₂).
    fn cilleruelo_with(b1: f64, c1: f64, b2: f64, c2: f64) -> PlanarField {
        PlanarField::from_terms(
            vec![
                FieldTerm {
                    direction: [1.0, 0.0],
                    pair_weight: 0.5,
                    b: b1,
                    c: c1,
                },
                FieldTerm {
                    direction: [0.0, 1.0],
                    pair_weight: 0.5,
                    b: b2,
                    c: c2,
                },
            ],
            FrequencyConvention::Angular,
        )
        .unwrap()
    }

    #[test]
    fn cilleruelo_sample_has_two_half_weight_pairs() {
        let mu = SpectralMeasure::cilleruelo();
        let f = PlanarField::sample_wave(&mu, FrequencyConvention::Angular, &mut stream_rng(1, 0))
            .unwrap();
        assert_eq!(f.terms().len(), 2);
        for t in f.terms() {
            assert!((t.pair_weight - 0.5).abs() < 1e-15);
        }
        // representatives in [0, π): e₁ then e₂
        assert!((f.terms()[0].direction[0] - 1.0).abs() < 1e-15);
        assert!((f.terms()[1].direction[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn evaluate_matches_closed_form() {
        let f = cilleruelo_with(1.0, 0.0, 0.0, 0.0);
        for x in [[0.0, 0.0], [0.3, 1.1], [-2.0, 0.5]] {
            assert!((f.evaluate(x) - SQRT_HALF * x[0].cos()).abs() < 1e-15);
        }
        let zero = cilleruelo_with(0.0, 0.0, 0.0, 0.0);
        // all-zero coefficients give the zero field (weights still valid)
        assert_eq!(zero.evaluate([0.4, -0.7]), 0.0);
    }

    #[test]
    fn single_pair_measure_gives_one_sinusoid() {
        let mu = SpectralMeasure::new_unchecked(vec![
            Atom { angle: 0.0, weight: 0.5 },
            Atom { angle: PI, weight: 0.5 },
        ])
        .unwrap();
        let f = PlanarField::sample_wave(&mu, FrequencyConvention::Angular, &mut stream_rng(2, 0))
            .unwrap();
        assert_eq!(f.terms().len(), 1);
        assert!((f.terms()[0].pair_weight - 1.0).abs() < 1e-15);
        // f(x) = b cos x₁ + c sin x₁: a shifted sine of deterministic amplitude
        let t = f.terms()[0];
        let amp = t.b.hypot(t.c);
        let max = (0..1000)
            .map(|i| f.evaluate([i as f64 * 0.01, 0.0]).abs())
            .fold(0.0, f64::max);
        assert!((max - amp).abs() < 1e-3);
    }

    #[test]
    fn pointwise_variance_is_one() {
        let mu = SpectralMeasure::from_lattice(5).unwrap();
        let x = [0.37, -0.81];
        let n = 100_000;
        let mean_sq: f64 = (0..n)
            .map(|i| {
                let f = PlanarField::sample_wave(
                    &mu,
                    FrequencyConvention::TwoPi,
                    &mut stream_rng(11, i),
                )
                .unwrap();
                f.evaluate(x).powi(2)
            })
            .sum::<f64>()
            / n as f64;
        // field(x)² is χ²₁-like with variance 2
        let tol = 3.0 * (2.0f64 / n as f64).sqrt();
        assert!((mean_sq - 1.0).abs() < tol, "mean square {mean_sq}");
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mu = SpectralMeasure::from_lattice(25).unwrap();
        let f = PlanarField::sample_wave(&mu, FrequencyConvention::TwoPi, &mut stream_rng(3, 0))
            .unwrap();
        let mut rng = stream_rng(3, 1);
        let h = 1e-5;
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let x: [f64; 2] = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
            let g = f.gradient(x);
            let fd = [
                (f.evaluate([x[0] + h, x[1]]) - f.evaluate([x[0] - h, x[1]])) / (2.0 * h),
                (f.evaluate([x[0], x[1] + h]) - f.evaluate([x[0], x[1] - h])) / (2.0 * h),
            ];
            worst = worst.max((g[0] - fd[0]).abs()).max((g[1] - fd[1]).abs());
        }
        assert!(worst < 1e-6, "max gradient error {worst}");
    }

    #[test]
    fn restriction_matches_axis_formula() {
        let f = cilleruelo_with(0.9, -0.4, 1.7, 0.3);
        let p = f.restrict(Direction::new(0.0), 10.0);
        for k in 0..50 {
            let t = 0.2 * k as f64;
            let expected = SQRT_HALF * (0.9 * t.cos() - 0.4 * t.sin() + 1.7);
            assert!((p.value(t) - expected).abs() < 1e-12);
        }
        // restrict-then-evaluate at 0 equals the planar value at the origin
        assert_eq!(p.value(0.0), f.evaluate([0.0, 0.0]));
    }

    #[test]
    fn diagonal_restriction_is_single_sinusoid() {
        let f = cilleruelo_with(0.2, 1.3, -0.8, 0.5);
        let p = f.restrict(Direction::new(std::f64::consts::FRAC_PI_4), 10.0);
        // all terms share frequency 1/√2, so f² + 2(f′)² must be constant
        let inv = |t: f64| p.value(t).powi(2) + 2.0 * p.derivative(t, 1).powi(2);
        let base = inv(0.0);
        for k in 1..100 {
            assert!((inv(0.1 * k as f64) - base).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let mu = SpectralMeasure::from_lattice(65).unwrap();
        let f = PlanarField::sample_wave(&mu, FrequencyConvention::TwoPi, &mut stream_rng(4, 2))
            .unwrap();
        let p = f.restrict(Direction::new(0.4), 5.0);
        let h = 1e-5;
        for k in 0..20 {
            let t = 0.25 * k as f64 + 0.1;
            let fd1 = (p.value(t + h) - p.value(t - h)) / (2.0 * h);
            assert!((p.derivative(t, 1) - fd1).abs() < 1e-4);
            let fd2 = (p.value(t + h) - 2.0 * p.value(t) + p.value(t - h)) / (h * h);
            assert!((p.derivative(t, 2) - fd2).abs() < 1e-2);
        }
    }

    #[test]
    fn cilleruelo_restriction_satisfies_derivative_relation() {
        // sin²u cos²u·f + f″ + f⁗ = 0 for any restriction of the Cilleruelo field
        let mu = SpectralMeasure::cilleruelo();
        for i in 0..5 {
            let f =
                PlanarField::sample_wave(&mu, FrequencyConvention::Angular, &mut stream_rng(5, i))
                    .unwrap();
            let u = 0.15 * (i as f64 + 0.3);
            let p = f.restrict(Direction::new(u), 10.0);
            let (su, cu) = u.sin_cos();
            let factor = su * su * cu * cu;
            for k in 0..100 {
                let t = 0.1 * k as f64;
                let residual = factor * p.value(t) + p.derivative(t, 2) + p.derivative(t, 4);
                assert!(residual.abs() < 1e-8, "u={u} t={t}: {residual}");
            }
        }
    }

    #[test]
    fn stationarity_of_empirical_covariance() {
        let mu = SpectralMeasure::from_lattice(5).unwrap();
        let h = [0.21, -0.13];
        let n = 10_000;
        let mut covs = Vec::new();
        for base in [[0.0, 0.0], [0.9, 0.4], [-1.3, 2.2]] {
            let shifted = [base[0] + h[0], base[1] + h[1]];
            let mut acc = 0.0;
            for i in 0..n {
                let f = PlanarField::sample_wave(
                    &mu,
                    FrequencyConvention::Angular,
                    &mut stream_rng(6, i),
                )
                .unwrap();
                acc += f.evaluate(base) * f.evaluate(shifted);
            }
            covs.push(acc / n as f64);
        }
        // Var of a product of correlated standard normals ≤ 2; 3 SE window
        let tol = 3.0 * (2.0f64 / n as f64).sqrt();
        assert!((covs[0] - covs[1]).abs() < 2.0 * tol, "{covs:?}");
        assert!((covs[0] - covs[2]).abs() < 2.0 * tol, "{covs:?}");
    }

    #[test]
    fn cilleruelo_type_construction() {
        let mut rng = stream_rng(8, 0);
        let g = PlanarField::cilleruelo_type(&[0.0], 0.01, &mut rng).unwrap();
        assert_eq!(g.terms().len(), 2);
        assert_eq!(g.convention(), FrequencyConvention::Angular);
        for t in g.terms() {
            assert!((t.pair_weight - 0.5).abs() < 1e-15);
        }

        let g = PlanarField::cilleruelo_type(&[0.03, -0.03], 0.05, &mut rng).unwrap();
        assert_eq!(g.terms().len(), 4);
        let total: f64 = g.terms().iter().map(|t| t.pair_weight).sum();
        assert!((total - 1.0).abs() < 1e-15);

        assert!(matches!(
            PlanarField::cilleruelo_type(&[0.2], 0.1, &mut rng),
            Err(Error::AngleOutOfBand { .. })
        ));
    }

    #[test]
    fn cilleruelo_type_empirical_covariance() {
        let phis = [0.02, -0.05];
        let x = [1.1, -0.6];
        let n = 10_000;
        let mut acc = 0.0;
        let mut expected = 0.0;
        for i in 0..n {
            let g = PlanarField::cilleruelo_type(&phis, 0.05, &mut stream_rng(9, i)).unwrap();
            acc += g.evaluate([0.0, 0.0]) * g.evaluate(x);
            if i == 0 {
                expected = g
                    .terms()
                    .iter()
                    .map(|t| {
                        t.pair_weight * (t.direction[0] * x[0] + t.direction[1] * x[1]).cos()
                    })
                    .sum();
            }
        }
        let got = acc / n as f64;
        let tol = 3.0 * (2.0f64 / n as f64).sqrt();
        assert!((got - expected).abs() < tol, "got {got}, expected {expected}");
    }

    #[test]
    fn json_replay_roundtrip() {
        let mu = SpectralMeasure::from_lattice(25).unwrap();
        let f = PlanarField::sample_wave(&mu, FrequencyConvention::TwoPi, &mut stream_rng(10, 4))
            .unwrap();
        let back = PlanarField::from_json(&f.to_json()).unwrap();
        assert_eq!(back.terms().len(), f.terms().len());
        for x in [[0.0, 0.0], [0.7, -0.2], [3.1, 1.9]] {
            assert!((f.evaluate(x) - back.evaluate(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn walker_agrees_with_direct_evaluation() {
        let mu = SpectralMeasure::from_lattice(1105).unwrap();
        let f = PlanarField::sample_wave(&mu, FrequencyConvention::TwoPi, &mut stream_rng(12, 0))
            .unwrap();
        let p = f.restrict(Direction::new(0.12), 50.0);
        let step = 0.025;
        let mut walker = p.walker(step);
        assert_eq!(walker.current(), p.terms().iter().map(|t| t.a).sum::<f64>());
        let mut worst = 0.0f64;
        for k in 1..=2000 {
            let v = walker.advance();
            worst = worst.max((v - p.value(k as f64 * step)).abs());
        }
        assert!(worst < 1e-11, "walker drift {worst}");
    }

    #[test]
    fn quarter_turn_and_reflection_leave_restriction_law_invariant() {
        // law of the restricted process depends on u only through the reduced angle
        let mu = SpectralMeasure::from_lattice(25).unwrap();
        let f = PlanarField::sample_wave(&mu, FrequencyConvention::TwoPi, &mut stream_rng(13, 7))
            .unwrap();
        let freq = |u: f64| {
            let p = f.restrict(Direction::new(u), 1.0);
            let mut ws: Vec<f64> = p.terms().iter().map(|t| t.w.abs()).collect();
            ws.sort_by(f64::total_cmp);
            ws
        };
        let base = freq(0.3);
        for equivalent in [FRAC_PI_2 - 0.3, FRAC_PI_2 + 0.3, -0.3, PI + 0.3] {
            for (a, b) in freq(equivalent).iter().zip(&base) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
