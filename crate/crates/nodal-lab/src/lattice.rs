//! Lattice points on circles and their exact moment identities.
//!
//! For m representable as a sum of two squares, the circle of radius √m
//! carries the point set Λ_m = {λ ∈ ℤ² : |λ|² = m} with |Λ_m| = r₂(m), closed
//! under negation and quarter turns. All fourth- and sixth-moment structure of
//! Λ_m projected on a direction α = (cos u, sin u) is governed by the single
//! quantity
//!
//!   ν̂₄ = (1/r₂) Σ_λ ((λ₁+iλ₂)/√m)⁴ = (1/(r₂ m²)) Σ_λ (λ₁⁴ − 6λ₁²λ₂² + λ₂⁴),
//!
//! a real number in [−1, 1]. The averaged directional moments admit closed
//! forms:
//!
//!   avg ⟨λ,α⟩² = m/2,
//!   avg ⟨λ,α⟩⁴ = (m²/8)(3 + ν̂₄ cos 4u),
//!   avg ⟨λ,α⟩⁶ = (m³/16)(5 + 3 ν̂₄ cos 4u),
//!
//! equivalent to two integer identities on the coordinates (checked here in
//! exact arithmetic): 2(Σλ₁⁴ + Σλ₁²λ₂²) = r₂ m² and 2(Σλ₁⁶ + 3Σλ₁⁴λ₂²) = r₂ m³.

use crate::error::{Error, Result};

/// One lattice point λ = (λ₁, λ₂) with λ₁² + λ₂² = m.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticePoint {
    pub lambda1: i64,
    pub lambda2: i64,
}

impl LatticePoint {
    /// Angle of λ as a point of S¹, canonicalized to [0, 2π).
    pub fn angle(&self) -> f64 {
        let a = (self.lambda2 as f64).atan2(self.lambda1 as f64);
        if a < 0.0 {
            a + std::f64::consts::TAU
        } else {
            a
        }
    }
}

/// The full point set Λ_m, ordered by angle.
#[derive(Debug, Clone)]
pub struct LatticeCircle {
    m: u64,
    points: Vec<LatticePoint>,
}

/// Whether a directional moment is evaluated by direct summation or via the
/// ν̂₄-driven closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentMode {
    Brute,
    Closed,
}

/// Outcome of the exact integer identity checks on a circle.
#[derive(Debug, Clone, Copy)]
pub struct MomentIdentityReport {
    /// 2(Σλ₁⁴ + Σλ₁²λ₂²) = r₂(m)·m²
    pub quartic: bool,
    /// 2(Σλ₁⁶ + 3Σλ₁⁴λ₂²) = r₂(m)·m³
    pub sextic: bool,
    /// Σλ₁⁴ = Σλ₂⁴ (quarter-turn symmetry of the point set)
    pub coordinate_exchange: bool,
}

impl MomentIdentityReport {
    /// True iff every identity holds.
    pub fn all_hold(&self) -> bool {
        self.quartic && self.sextic && self.coordinate_exchange
    }
}

/// Enumerate Λ_m by scanning λ₁ ∈ [−⌊√m⌋, ⌊√m⌋] with an integer square-root
/// test for λ₂; points come back sorted by angle in [0, 2π).
pub fn enumerate_lattice_points(m: u64) -> Result<LatticeCircle> {
    let bound = m.isqrt() as i64;
    let mut points = Vec::new();
    for lambda1 in -bound..=bound {
        let rest = m - (lambda1 * lambda1) as u64;
        let lambda2 = rest.isqrt() as i64;
        if (lambda2 * lambda2) as u64 == rest {
            points.push(LatticePoint { lambda1, lambda2 });
            if lambda2 != 0 {
                points.push(LatticePoint {
                    lambda1,
                    lambda2: -lambda2,
                });
            }
        }
    }
    if points.is_empty() {
        return Err(Error::NotRepresentable { m });
    }
    points.sort_by(|a, b| a.angle().total_cmp(&b.angle()));
    Ok(LatticeCircle { m, points })
}

impl LatticeCircle {
    /// The squared radius m.
    pub fn m(&self) -> u64 {
        self.m
    }

    /// The points of Λ_m, ordered by angle.
    pub fn points(&self) -> &[LatticePoint] {
        &self.points
    }

    /// r₂(m) = |Λ_m|, always a positive multiple of 4.
    pub fn r2(&self) -> usize {
        self.points.len()
    }

    /// ν̂₄ as an exact integer ratio Σ(λ₁⁴ − 6λ₁²λ₂² + λ₂⁴) / (r₂ m²),
    /// evaluated without any trigonometry.
    pub fn nu4_hat(&self) -> f64 {
        let mut num: i128 = 0;
        for p in &self.points {
            let (x, y) = (p.lambda1 as i128, p.lambda2 as i128);
            let (x2, y2) = (x * x, y * y);
            num += x2 * x2 - 6 * x2 * y2 + y2 * y2;
        }
        let den = self.points.len() as i128 * (self.m as i128) * (self.m as i128);
        num as f64 / den as f64
    }

    /// Averaged directional moment (1/r₂) Σ ⟨λ, α⟩^k for α = (cos u, sin u).
    ///
    /// Brute mode sums directly; closed mode uses the ν̂₄ formulas and exists
    /// only for k ∈ {2, 4, 6}.
    pub fn directional_moment(&self, u: f64, k: u32, mode: MomentMode) -> Result<f64> {
        match mode {
            MomentMode::Brute => {
                let (cu, su) = (u.cos(), u.sin());
                let sum: f64 = self
                    .points
                    .iter()
                    .map(|p| (p.lambda1 as f64 * cu + p.lambda2 as f64 * su).powi(k as i32))
                    .sum();
                Ok(sum / self.points.len() as f64)
            }
            MomentMode::Closed => {
                let m = self.m as f64;
                let g = self.nu4_hat() * (4.0 * u).cos();
                match k {
                    2 => Ok(m / 2.0),
                    4 => Ok(m * m / 8.0 * (3.0 + g)),
                    6 => Ok(m * m * m / 16.0 * (5.0 + 3.0 * g)),
                    _ => Err(Error::UnsupportedOrder { k }),
                }
            }
        }
    }

    /// Check the integer moment identities in exact i128 arithmetic.
    pub fn integer_moment_identities(&self) -> MomentIdentityReport {
        let (mut s14, mut s24, mut s22, mut s16, mut s42) = (0i128, 0i128, 0i128, 0i128, 0i128);
        for p in &self.points {
            let (x, y) = (p.lambda1 as i128, p.lambda2 as i128);
            let (x2, y2) = (x * x, y * y);
            s14 += x2 * x2;
            s24 += y2 * y2;
            s22 += x2 * y2;
            s16 += x2 * x2 * x2;
            s42 += x2 * x2 * y2;
        }
        let r2 = self.points.len() as i128;
        let m = self.m as i128;
        MomentIdentityReport {
            quartic: 2 * (s14 + s22) == r2 * m * m,
            sextic: 2 * (s16 + 3 * s42) == r2 * m * m * m,
            coordinate_exchange: s14 == s24,
        }
    }
}
