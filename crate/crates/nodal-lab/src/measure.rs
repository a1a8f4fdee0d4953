//! Atomic spectral measures on the unit circle and their projections.
//!
//! Every field in this crate is driven by a probability measure μ on S¹ that
//! is invariant under the quarter turn θ ↦ θ + π/2 and the reflection
//! θ ↦ −θ. Lattice circles induce ν_m (one atom of mass 1/r₂ per point of
//! Λ_m); the two extreme cases are the Cilleruelo measure (atoms on the axes,
//! ν̂₄ = 1) and its tilt by π/4 (ν̂₄ = −1). Band measures σ_θ — uniform on the
//! four arcs of half-width θ around the axes — are represented by midpoint
//! discretizations.
//!
//! Projecting μ on a direction α = (cos u, sin u) yields the measure of atom
//! positions cos(θ_j − u) ∈ [−1, 1] that controls every one-dimensional
//! quantity downstream: covariance kernels, spectral gaps, zero statistics.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::enumerate_lattice_points;

/// Tolerance for recognizing coincident atoms and validating weights.
const MERGE_TOL: f64 = 1e-12;

/// One atom of a spectral measure: an angle in [0, 2π) and a positive weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub angle: f64,
    pub weight: f64,
}

/// A symmetric atomic probability measure on S¹.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "MeasureDoc", into = "MeasureDoc")]
pub struct SpectralMeasure {
    atoms: Vec<Atom>,
}

/// Serialized form: `{"atoms":[{"angle":…,"weight":…},…]}`.
#[derive(Serialize, Deserialize)]
struct MeasureDoc {
    atoms: Vec<Atom>,
}

impl TryFrom<MeasureDoc> for SpectralMeasure {
    type Error = Error;
    fn try_from(doc: MeasureDoc) -> Result<Self> {
        SpectralMeasure::new(doc.atoms)
    }
}

impl From<SpectralMeasure> for MeasureDoc {
    fn from(mu: SpectralMeasure) -> Self {
        MeasureDoc { atoms: mu.atoms }
    }
}

/// A direction angle reduced to the fundamental band [0, π/4].
///
/// Admissible measures are invariant under the dihedral group generated by
/// quarter turns and reflection, so every direction is equivalent to one in
/// [0, π/4]. `Direction::new` performs that reduction; `Direction::unreduced`
/// keeps the raw angle for experiments with deliberately asymmetric measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    u: f64,
}

impl Direction {
    /// Reduce an arbitrary angle to [0, π/4] using the measure symmetries.
    pub fn new(u: f64) -> Self {
        let mut v = u.rem_euclid(FRAC_PI_2);
        if v > FRAC_PI_4 {
            v = FRAC_PI_2 - v;
        }
        Direction { u: v }
    }

    /// Keep the angle as given (for measures lacking the full symmetry).
    pub fn unreduced(u: f64) -> Self {
        Direction { u }
    }

    /// The angle in radians.
    pub fn u(&self) -> f64 {
        self.u
    }
}

fn canonical_angle(a: f64) -> f64 {
    let mut a = a.rem_euclid(TAU);
    if a >= TAU {
        a -= TAU;
    }
    a
}

/// Angular distance from the nearest multiple of π/2.
fn distance_to_axes(angle: f64) -> f64 {
    let d = angle.rem_euclid(FRAC_PI_2);
    d.min(FRAC_PI_2 - d)
}

impl SpectralMeasure {
    /// Build a measure from atoms, validating weights, distinctness and the
    /// quarter-turn / reflection symmetry of the atom multiset.
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        let mu = Self::new_unchecked(atoms)?;
        mu.check_symmetry()?;
        Ok(mu)
    }

    /// Build a measure without the symmetry check (angles are still
    /// canonicalized and weights validated). Intended for experiments with
    /// deliberately asymmetric inputs; everything downstream that relies on
    /// direction reduction assumes symmetry.
    pub fn new_unchecked(mut atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure {
                detail: "measure has no atoms".into(),
            });
        }
        for a in &mut atoms {
            if !a.weight.is_finite() || a.weight < 0.0 {
                return Err(Error::InvalidMeasure {
                    detail: format!("weight {} is not a finite nonnegative real", a.weight),
                });
            }
            if !a.angle.is_finite() {
                return Err(Error::InvalidMeasure {
                    detail: "atom angle is not finite".into(),
                });
            }
            a.angle = canonical_angle(a.angle);
        }
        let total: f64 = atoms.iter().map(|a| a.weight).sum();
        if (total - 1.0).abs() > MERGE_TOL {
            return Err(Error::InvalidMeasure {
                detail: format!("weights sum to {total}, expected 1"),
            });
        }
        atoms.sort_by(|a, b| a.angle.total_cmp(&b.angle));
        for w in atoms.windows(2) {
            if (w[1].angle - w[0].angle).abs() <= MERGE_TOL {
                return Err(Error::InvalidMeasure {
                    detail: format!("duplicate atoms at angle {}", w[0].angle),
                });
            }
        }
        Ok(SpectralMeasure { atoms })
    }

    fn check_symmetry(&self) -> Result<()> {
        // Atom lookup under a map angle ↦ image must succeed with equal weight.
        for &map in &[|a: f64| a + FRAC_PI_2, |a: f64| -a] {
            for atom in &self.atoms {
                let image = canonical_angle(map(atom.angle));
                let found = self.atoms.iter().any(|b| {
                    let mut d = (b.angle - image).abs();
                    d = d.min(TAU - d);
                    d <= 1e-9 && (b.weight - atom.weight).abs() <= 1e-9
                });
                if !found {
                    return Err(Error::AsymmetricMeasure {
                        detail: format!(
                            "atom at angle {} has no partner at {}",
                            atom.angle, image
                        ),
                    });
                }
            }
        }
        Ok(())
    }

    /// The atoms, sorted by angle.
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Atoms at 0, π/2, π, 3π/2 with weight ¼ each.
    pub fn cilleruelo() -> Self {
        let atoms = (0..4)
            .map(|j| Atom {
                angle: j as f64 * FRAC_PI_2,
                weight: 0.25,
            })
            .collect();
        SpectralMeasure { atoms }
    }

    /// The Cilleruelo measure rotated by π/4 (atoms on the diagonals).
    pub fn tilted() -> Self {
        let atoms = (0..4)
            .map(|j| Atom {
                angle: FRAC_PI_4 + j as f64 * FRAC_PI_2,
                weight: 0.25,
            })
            .collect();
        SpectralMeasure { atoms }
    }

    /// ν_m: one atom of weight 1/r₂(m) at the angle of each point of Λ_m.
    pub fn from_lattice(m: u64) -> Result<Self> {
        let circle = enumerate_lattice_points(m)?;
        let w = 1.0 / circle.r2() as f64;
        let atoms = circle
            .points()
            .iter()
            .map(|p| Atom {
                angle: p.angle(),
                weight: w,
            })
            .collect();
        Ok(SpectralMeasure { atoms })
    }

    /// Midpoint discretization of the uniform measure on the four arcs
    /// [jπ/2 − θ, jπ/2 + θ]: n atoms per arc, 4n in total, weight 1/(4n) each.
    pub fn sigma_theta(theta: f64, n_per_arc: u32) -> Result<Self> {
        if !(theta > 0.0 && theta <= FRAC_PI_4) {
            return Err(Error::InvalidTheta { theta });
        }
        if n_per_arc == 0 {
            return Err(Error::InvalidMeasure {
                detail: "n_atoms_per_arc must be positive".into(),
            });
        }
        let n = n_per_arc as usize;
        let w = 1.0 / (4 * n) as f64;
        let sub = 2.0 * theta / n as f64;
        let mut atoms = Vec::with_capacity(4 * n);
        for j in 0..4 {
            let left = j as f64 * FRAC_PI_2 - theta;
            for i in 0..n {
                atoms.push(Atom {
                    angle: canonical_angle(left + (i as f64 + 0.5) * sub),
                    weight: w,
                });
            }
        }
        atoms.sort_by(|a, b| a.angle.total_cmp(&b.angle));
        Ok(SpectralMeasure { atoms })
    }

    /// n equally spaced atoms (n a positive multiple of 4) discretizing the
    /// uniform measure on S¹; equals σ_{π/4} with n/4 atoms per arc.
    pub fn uniform(n: u32) -> Result<Self> {
        if n == 0 || n % 4 != 0 {
            return Err(Error::InvalidMeasure {
                detail: format!("uniform measure needs a positive multiple of 4 atoms, got {n}"),
            });
        }
        Self::sigma_theta(FRAC_PI_4, n / 4)
    }

    /// Resolve a builtin name: `cilleruelo`, `tilted`, `uniform:<n>`,
    /// `sigma:<theta>:<n>`, `lattice:<m>`.
    pub fn by_name(name: &str) -> Result<Self> {
        let unknown = || Error::UnknownMeasure { name: name.into() };
        match name {
            "cilleruelo" => Ok(Self::cilleruelo()),
            "tilted" => Ok(Self::tilted()),
            _ => {
                let mut parts = name.split(':');
                match parts.next() {
                    Some("uniform") => {
                        let n: u32 = parts
                            .next()
                            .filter(|_| parts.next().is_none())
                            .and_then(|s| s.parse().ok())
                            .ok_or_else(unknown)?;
                        Self::uniform(n)
                    }
                    Some("sigma") => {
                        let theta: f64 = parts.next().and_then(|s| s.parse().ok()).ok_or_else(unknown)?;
                        let n: u32 = parts
                            .next()
                            .filter(|_| parts.next().is_none())
                            .and_then(|s| s.parse().ok())
                            .ok_or_else(unknown)?;
                        Self::sigma_theta(theta, n)
                    }
                    Some("lattice") => {
                        let m: u64 = parts
                            .next()
                            .filter(|_| parts.next().is_none())
                            .and_then(|s| s.parse().ok())
                            .ok_or_else(unknown)?;
                        Self::from_lattice(m)
                    }
                    _ => Err(unknown()),
                }
            }
        }
    }

    /// Serialize to the JSON document `{"atoms":[…]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("measure serialization cannot fail")
    }

    /// Parse and validate a measure from its JSON document.
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// k-th Fourier coefficient Σ_j w_j cos(kθ_j). The sine part must vanish
    /// by reflection symmetry and is asserted to 1e−12.
    pub fn fourier_coefficient(&self, k: i32) -> f64 {
        let (mut re, mut im) = (0.0, 0.0);
        for a in &self.atoms {
            let (s, c) = (k as f64 * a.angle).sin_cos();
            re += a.weight * c;
            im += a.weight * s;
        }
        assert!(
            im.abs() <= 1e-12,
            "imaginary part {im:e} of Fourier coefficient {k} did not cancel"
        );
        re
    }

    /// ν̂₄ — the Fourier coefficient that controls all fourth-moment structure.
    pub fn nu4_hat(&self) -> f64 {
        self.fourier_coefficient(4)
    }

    /// Project on the direction α = (cos u, sin u): atoms at cos(θ_j − u),
    /// merging positions that coincide within 1e−12 (exact symmetry
    /// collisions) and snapping to the special values 0 and ±1.
    pub fn project(&self, u: Direction) -> ProjectedMeasure {
        let mut positions: Vec<(f64, f64)> = self
            .atoms
            .iter()
            .map(|a| {
                let mut p = (a.angle - u.u).cos();
                if p.abs() <= MERGE_TOL {
                    p = 0.0;
                } else if (p.abs() - 1.0).abs() <= MERGE_TOL {
                    p = p.signum();
                }
                (p, a.weight)
            })
            .collect();
        positions.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut atoms: Vec<(f64, f64)> = Vec::with_capacity(positions.len());
        for (p, w) in positions {
            match atoms.last_mut() {
                Some(last) if (p - last.0).abs() <= MERGE_TOL => last.1 += w,
                _ => atoms.push((p, w)),
            }
        }
        ProjectedMeasure { atoms }
    }

    /// True iff every atom lies within eps of a multiple of π/2.
    pub fn is_cilleruelo_type(&self, eps: f64) -> bool {
        self.atoms.iter().all(|a| distance_to_axes(a.angle) <= eps)
    }

    /// Largest angular distance of any atom from the axes (0 for Cilleruelo).
    pub fn max_axis_deviation(&self) -> f64 {
        self.atoms
            .iter()
            .map(|a| distance_to_axes(a.angle))
            .fold(0.0, f64::max)
    }
}

/// Projection of a spectral measure on a direction: atoms on [−1, 1].
#[derive(Debug, Clone)]
pub struct ProjectedMeasure {
    atoms: Vec<(f64, f64)>,
}

impl ProjectedMeasure {
    /// (position, weight) pairs sorted by position.
    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// Spectral gap: min |position| over atoms of positive weight; exactly 0
    /// when an atom sits at the origin.
    pub fn spectral_gap(&self) -> f64 {
        self.atoms
            .iter()
            .filter(|&&(_, w)| w > 0.0)
            .map(|&(p, _)| p.abs())
            .fold(f64::INFINITY, f64::min)
    }
}
