//! Crate-wide error type.
//!
//! Every fallible operation returns [`Error`]; validation failures carry the
//! offending value so callers (and the CLI) can print actionable messages.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes of the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// m is not a sum of two squares: the circle of radius √m carries no lattice points.
    #[error("m = {m} is not representable as a sum of two squares (r2(m) = 0)")]
    NotRepresentable { m: u64 },

    /// Closed-form directional moments exist only for orders 2, 4, 6.
    #[error("no closed form for directional moment of order {k} (supported: 2, 4, 6)")]
    UnsupportedOrder { k: u32 },

    /// σ_θ arcs must have positive half-width and must not overlap.
    #[error("invalid arc half-width theta = {theta} (must lie in (0, pi/4])")]
    InvalidTheta { theta: f64 },

    /// A spectral measure failed the quarter-turn / reflection symmetry check.
    #[error("asymmetric spectral measure: {detail}")]
    AsymmetricMeasure { detail: String },

    /// A measure definition is structurally invalid (weights, duplicates, ...).
    #[error("invalid spectral measure: {detail}")]
    InvalidMeasure { detail: String },

    /// A builtin measure name did not parse.
    #[error("unknown measure name {name:?} (expected cilleruelo, tilted, uniform:<n>, sigma:<theta>:<n>, or lattice:<m>)")]
    UnknownMeasure { name: String },

    /// Two-point intensity is undefined where the field at distance t is (anti-)fully correlated.
    #[error("degenerate covariance at t = {t}: |kappa| within 1e-12 of 1")]
    DegenerateCovariance { t: f64 },

    /// The two-point intensity has a removable 0/0 singularity at t = 0; evaluate the series instead.
    #[error("two-point intensity is singular (0/0) at t = 0; use the small-t series")]
    SingularAtZero,

    /// Adaptive quadrature failed to reach the requested tolerance.
    #[error("quadrature failure: {detail}")]
    QuadratureFailure { detail: String },

    /// Degenerate-family asymptotics requested for a kernel that is not degenerate.
    #[error("kernel is not degenerate: 1 + nu4*cos(4u) = {value:e} (need |.| < tolerance)")]
    NotDegenerate { value: f64 },

    /// Exact Cilleruelo laws exist only along the axis (u = 0) and diagonal (u = pi/4).
    #[error("no exact law for direction u = {u} (supported: 0 and pi/4)")]
    UnsupportedDirection { u: f64 },

    /// Cilleruelo-type perturbation angles must stay within the eps band.
    #[error("perturbation angle {angle} exceeds the eps band")]
    AngleOutOfBand { angle: f64 },

    /// Crossing-line extraction is ill-posed when the two amplitude pairs tie exactly.
    #[error("amplitude tie: the two wave pairs have exactly equal magnitude")]
    Tie,

    /// The spectral measure has no atom in the required location.
    #[error("measure has no atom at the required angle {angle}")]
    NoAtom { angle: f64 },

    /// Coupling requires every atom to hug a quarter-turn axis.
    #[error("measure is not Cilleruelo-type: atom at angle {angle} is more than eps from every axis")]
    NotCillerueloType { angle: f64 },

    /// A probabilistic transfer argument was invoked outside its validity regime.
    #[error("regime violation: {detail}")]
    RegimeViolation { detail: String },

    /// Experiment configuration is inconsistent.
    #[error("invalid configuration: {detail}")]
    InvalidConfig { detail: String },

    /// A Monte Carlo worker failed while generating or counting one sample.
    #[error("sample {index} failed: {source}")]
    Sample {
        index: u64,
        #[source]
        source: Box<Error>,
    },

    /// File access failure, surfaced with the path that caused it.
    #[error("{}: {source}", path.display())]
    FileAccess {
        path: std::path::PathBuf,
        source: std::io::Error,
    },

    /// An artifact's embedded hash does not match its recomputed value.
    #[error("verification failed: {detail}")]
    VerificationFailed { detail: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// CLI exit code: 1 for validation problems, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DegenerateCovariance { .. }
            | Error::SingularAtZero
            | Error::QuadratureFailure { .. }
            | Error::VerificationFailed { .. } => 2,
            Error::Sample { source, .. } => source.exit_code(),
            _ => 1,
        }
    }
}
