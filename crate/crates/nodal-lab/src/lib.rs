//! Nodal intersections of random toral eigenfunctions with straight lines.
//!
//! The objects of study are Gaussian trigonometric fields attached to an
//! atomic spectral measure on S¹ — arithmetic random waves Ψ_m and their band
//! and uniform relatives — restricted to a straight segment of direction
//! (cos u, sin u). The crate provides:
//!
//! * exact lattice-point enumeration and the integer moment identities behind
//!   the closed directional moments ([`lattice`]),
//! * spectral measures, projections and spectral gaps ([`measure`]),
//! * reproducible sampling of the fields and restriction to lines ([`field`]),
//! * covariance kernels and their derivatives ([`kernel`]),
//! * expected zero counts, two-point intensities and small-length asymptotics
//!   ([`kac_rice`]),
//! * robust zero counting along segments and the exact Cilleruelo count laws
//!   ([`zeros`]),
//! * seeded Monte Carlo experiments with worker-count-independent results
//!   ([`monte_carlo`]),
//! * the coupling of near-Cilleruelo fields to exact Cilleruelo fields and
//!   the persistence-probability transfer built on it ([`coupling`]).

pub mod cli;
pub mod coupling;
pub mod error;
pub mod field;
pub mod io;
pub mod kac_rice;
pub mod kernel;
pub mod lattice;
pub mod measure;
pub mod monte_carlo;
pub mod rng;
pub mod zeros;

pub use cli::cli_main;
pub use coupling::{
    anderson_darling_normal, couple, coupled_coefficient_normality, coupling_tail_experiment,
    difference_sup_norm, kernel_gap_check, persistence_transfer_experiment, sample_coupled,
    CoefficientLawReport, CoupledPair, DifferenceReport, KernelGapReport, TailRow, TransferReport,
};
pub use io::{config_hash, verify_artifact, write_csv, write_json};
pub use error::{Error, Result};
pub use field::{FieldTerm, FrequencyConvention, LineProcess, PlanarField};
pub use kac_rice::{
    degenerate_asymptotic, second_factorial_moment_asymptotic, taylor_kernel, AsymptoticInputs,
    K2Series, KacRiceContext,
};
pub use kernel::CovarianceKernel1D;
pub use lattice::{enumerate_lattice_points, LatticeCircle, LatticePoint, MomentMode};
pub use measure::{Atom, Direction, ProjectedMeasure, SpectralMeasure};
pub use monte_carlo::{
    distribution_compare, estimate, persistence_sweep, point_mass_persistence_check,
    resolve_measure_spec, ExperimentConfig, GoodnessReport, MomentEstimates, PersistenceRow,
    PointMassReport, ValueWithSe,
};
pub use zeros::{
    count_zeros, crossing_lines, default_grid_step, exact_distribution_u0,
    exact_distribution_u_pi4, exact_persistence, exact_second_factorial, CountDistribution,
    CrossingLines, Orientation, ZeroCountResult,
};
