//! Command-line front end.
//!
//! Each subcommand resolves its inputs, delegates to the library, optionally
//! writes hash-stamped artifacts (see [`crate::io`]), and prints a single
//! summary line on stdout.  Exit codes: 0 on success, 1 on flag or
//! configuration errors, 2 on numerical failures and verification mismatches.
//!
//! Identical invocations (including `--seed`) produce byte-identical stdout
//! and files; `--workers` only caps the thread pool and never enters the
//! config hash.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::coupling::{
    coupled_coefficient_normality, coupling_tail_experiment, persistence_transfer_experiment,
    sample_coupled,
};
use crate::error::{Error, Result};
use crate::field::{FrequencyConvention, PlanarField};
use crate::io;
use crate::kac_rice::{
    degenerate_asymptotic, second_factorial_moment_asymptotic, AsymptoticInputs, KacRiceContext,
};
use crate::kernel::CovarianceKernel1D;
use crate::lattice::enumerate_lattice_points;
use crate::measure::Direction;
use crate::monte_carlo::{estimate, persistence_sweep, resolve_measure_spec, ExperimentConfig};
use crate::rng::stream_rng;

/// Entry point of the `nodal-lab` binary; returns the process exit code.
pub fn cli_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version arrive here too; only real parse
            // failures are validation errors.
            let code = i32::from(e.use_stderr());
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "nodal-lab",
    version,
    about = "Zero counts of random toral eigenfunctions along straight segments",
    after_help = "Angles are radians; lengths are unprefixed reals in the chosen convention.\n\
                  Defaults: --seed 0, --convention angular (kacrice is fixed to the rescaled\n\
                  convention), --workers from NODAL_LAB_WORKERS when unset."
)]
struct Cli {
    /// Re-derive the hashes embedded in an artifact (JSON report, CSV table,
    /// or .meta.json sidecar) and compare; exits 2 on mismatch.
    #[arg(long, value_name = "FILE")]
    verify: Option<PathBuf>,

    /// Worker threads for the sampling pools (fallback: NODAL_LAB_WORKERS).
    /// Results do not depend on this.
    #[arg(long, value_name = "N")]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate lattice points on the circle of radius √m; prints r₂(m) and ν̂₄.
    Lattice(LatticeArgs),
    /// Sample one field realization on a square window and write an (x, y, value) grid.
    Sample(SampleArgs),
    /// Monte Carlo moments of the zero count on one segment.
    Moments(MomentsArgs),
    /// Empirical persistence probability P(Z = 0) across segment lengths.
    Persistence(PersistenceArgs),
    /// Kac–Rice predictions (expected count, second factorial moment) for one segment.
    Kacrice(KacriceArgs),
    /// Coupling experiments: sup-norm tails, persistence transfer, coefficient law.
    Coupling(CouplingArgs),
}

/// Frequency convention flag: `angular` (ω = 1, wavelength 2π) or `twopi`
/// (rescaled waves, ω = 2π).
#[derive(ValueEnum, Clone, Copy, Debug)]
enum ConventionArg {
    Angular,
    Twopi,
}

impl From<ConventionArg> for FrequencyConvention {
    fn from(value: ConventionArg) -> Self {
        match value {
            ConventionArg::Angular => FrequencyConvention::Angular,
            ConventionArg::Twopi => FrequencyConvention::TwoPi,
        }
    }
}

impl ConventionArg {
    fn name(self) -> &'static str {
        match self {
            ConventionArg::Angular => "angular",
            ConventionArg::Twopi => "twopi",
        }
    }
}

#[derive(Args, Debug)]
struct LatticeArgs {
    /// Radius squared of the circle (must be a sum of two squares).
    #[arg(long)]
    m: u64,
    /// Write the point list and moments as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SampleArgs {
    /// Builtin measure name (cilleruelo, tilted, uniform:<n>, sigma:<theta>:<n>,
    /// lattice:<m>) or a path to a measure JSON file.
    #[arg(long, required_unless_present = "coupled", conflicts_with = "coupled")]
    measure: Option<String>,
    #[arg(long, value_enum, default_value_t = ConventionArg::Angular)]
    convention: ConventionArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Grid points per side (≥ 32).
    #[arg(long, default_value_t = 256)]
    resolution: u32,
    /// Side of the sampled square [0, window]².
    #[arg(long, default_value_t = 2.0 * std::f64::consts::TAU)]
    window: f64,
    /// Sample a coupled pair instead: columns x, y, g, f (requires --eps, --m-pairs).
    #[arg(long, requires = "eps", requires = "m_pairs")]
    coupled: bool,
    /// Angular band half-width for --coupled.
    #[arg(long, requires = "coupled")]
    eps: Option<f64>,
    /// Antipodal pairs per axis class for --coupled.
    #[arg(long, requires = "coupled")]
    m_pairs: Option<usize>,
    /// CSV destination (a .meta.json sidecar is written next to it).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct MomentsArgs {
    #[arg(long)]
    measure: String,
    #[arg(long, value_enum, default_value_t = ConventionArg::Angular)]
    convention: ConventionArg,
    /// Segment direction, radians.
    #[arg(long)]
    u: f64,
    /// Segment length.
    #[arg(long = "L")]
    length: f64,
    #[arg(long)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Override the counting grid step (default: a fortieth of a wavelength).
    #[arg(long)]
    grid_step: Option<f64>,
    /// Write the full estimate (including the count histogram) as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PersistenceArgs {
    #[arg(long)]
    measure: String,
    #[arg(long, value_enum, default_value_t = ConventionArg::Angular)]
    convention: ConventionArg,
    #[arg(long)]
    u: f64,
    /// Segment lengths, comma-separated (e.g. --L 5,10,20).
    #[arg(long = "L", value_delimiter = ',', num_args = 1..)]
    lengths: Vec<f64>,
    #[arg(long)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write one CSV row per length.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct KacriceArgs {
    /// Measure spec; predictions use the rescaled convention (ω = 2π, M = 2π²).
    #[arg(long)]
    measure: String,
    #[arg(long)]
    u: f64,
    #[arg(long = "L")]
    length: f64,
    /// Write the comparison row as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CouplingArgs {
    #[command(subcommand)]
    experiment: CouplingCommand,
}

#[derive(Subcommand, Debug)]
enum CouplingCommand {
    /// How often sup|G−F| over B_R crosses the 2εR·log R and 2εR² thresholds.
    Tail(TailArgs),
    /// Persistence-transfer events along one segment; `violations` must be 0.
    Transfer(TransferArgs),
    /// Variance and Anderson–Darling checks on the aggregated coefficients.
    Normality(NormalityArgs),
}

#[derive(Args, Debug)]
struct TailArgs {
    /// Angular band half-width ε (must be positive).
    #[arg(long)]
    eps: f64,
    /// Antipodal pairs per axis class.
    #[arg(long)]
    m_pairs: usize,
    /// Disc radii, comma-separated, each ≥ 4.
    #[arg(long, value_delimiter = ',', default_values_t = [5.0, 10.0, 20.0])]
    radii: Vec<f64>,
    #[arg(long)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write one CSV row per radius.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TransferArgs {
    #[arg(long)]
    eps: f64,
    #[arg(long)]
    m_pairs: usize,
    /// Segment direction, radians (0 selects the axis branch).
    #[arg(long)]
    u: f64,
    /// Segment length (axis: L ≥ 2π; off-axis: L·sin u ≥ 2π).
    #[arg(long = "L")]
    length: f64,
    #[arg(long)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the full event frequencies as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct NormalityArgs {
    #[arg(long)]
    eps: f64,
    #[arg(long)]
    m_pairs: usize,
    #[arg(long)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<()> {
    configure_workers(cli.workers)?;
    if let Some(path) = cli.verify {
        println!("{}", io::verify_artifact(&path)?);
        return Ok(());
    }
    match cli.command {
        None => Err(Error::InvalidConfig {
            detail: "nothing to do: pass a subcommand or --verify <file> (see --help)".into(),
        }),
        Some(Command::Lattice(args)) => run_lattice(args),
        Some(Command::Sample(args)) => run_sample(args),
        Some(Command::Moments(args)) => run_moments(args),
        Some(Command::Persistence(args)) => run_persistence(args),
        Some(Command::Kacrice(args)) => run_kacrice(args),
        Some(Command::Coupling(args)) => match args.experiment {
            CouplingCommand::Tail(args) => run_coupling_tail(args),
            CouplingCommand::Transfer(args) => run_coupling_transfer(args),
            CouplingCommand::Normality(args) => run_coupling_normality(args),
        },
    }
}

/// Cap the global worker pool from --workers or NODAL_LAB_WORKERS.
fn configure_workers(flag: Option<usize>) -> Result<()> {
    let requested = match flag {
        Some(n) => Some(n),
        None => match std::env::var("NODAL_LAB_WORKERS") {
            Err(_) => None,
            Ok(raw) => Some(raw.parse::<usize>().map_err(|_| Error::InvalidConfig {
                detail: format!("NODAL_LAB_WORKERS must be a positive integer, got {raw:?}"),
            })?),
        },
    };
    match requested {
        None | Some(1..) => {}
        Some(0) => {
            return Err(Error::InvalidConfig {
                detail: "--workers must be at least 1".into(),
            })
        }
    }
    if let Some(n) = requested {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidConfig {
                detail: format!("worker pool: {e}"),
            })?;
    }
    Ok(())
}

fn fmt(v: f64) -> String {
    format!("{v}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt).unwrap_or_default()
}

fn run_lattice(args: LatticeArgs) -> Result<()> {
    let circle = enumerate_lattice_points(args.m)?;
    if let Some(out) = &args.out {
        let config = json!({"command": "lattice", "m": args.m});
        let points: Vec<[i64; 2]> = circle
            .points()
            .iter()
            .map(|p| [p.lambda1, p.lambda2])
            .collect();
        io::write_json(
            out,
            &config,
            json!({
                "r2": circle.r2(),
                "nu4_hat": circle.nu4_hat(),
                "points": points,
            }),
        )?;
    }
    println!(
        "lattice m={}: r2={} nu4_hat={}",
        args.m,
        circle.r2(),
        fmt(circle.nu4_hat())
    );
    Ok(())
}

fn run_sample(args: SampleArgs) -> Result<()> {
    if args.resolution < 32 {
        return Err(Error::InvalidConfig {
            detail: format!("--resolution must be at least 32, got {}", args.resolution),
        });
    }
    if !(args.window.is_finite() && args.window > 0.0) {
        return Err(Error::InvalidConfig {
            detail: format!("--window must be positive, got {}", args.window),
        });
    }
    let convention: FrequencyConvention = args.convention.into();
    let mut rng = stream_rng(args.seed, 0);
    // (field, coupled partner), plus the measure label for the summary line.
    let (g, f, label) = if args.coupled {
        let (eps, m_pairs) = (args.eps.unwrap(), args.m_pairs.unwrap());
        if convention != FrequencyConvention::Angular {
            return Err(Error::InvalidConfig {
                detail: "--coupled fields are defined in the angular convention".into(),
            });
        }
        let pair = sample_coupled(eps, m_pairs, &mut rng)?;
        let label = format!("coupled eps={} m_pairs={m_pairs}", fmt(eps));
        (pair.g().clone(), Some(pair.f().clone()), label)
    } else {
        let spec = args.measure.as_deref().unwrap();
        let mu = resolve_measure_spec(spec)?;
        let g = PlanarField::sample_wave(&mu, convention, &mut rng)?;
        (g, None, format!("measure={spec}"))
    };

    let n = args.resolution as usize;
    let coordinate = |i: usize| args.window * i as f64 / (n - 1) as f64;
    let mut rows = Vec::with_capacity(n * n);
    let mut max_value = f64::NEG_INFINITY;
    let mut min_value = f64::INFINITY;
    for iy in 0..n {
        let y = coordinate(iy);
        for ix in 0..n {
            let x = coordinate(ix);
            let value = g.evaluate([x, y]);
            max_value = max_value.max(value);
            min_value = min_value.min(value);
            let mut row = vec![fmt(x), fmt(y), fmt(value)];
            if let Some(f) = &f {
                row.push(fmt(f.evaluate([x, y])));
            }
            rows.push(row);
        }
    }

    let config = json!({
        "command": "sample",
        "measure": args.measure,
        "coupled": args.coupled,
        "eps": args.eps,
        "m_pairs": args.m_pairs,
        "convention": args.convention.name(),
        "seed": args.seed,
        "resolution": args.resolution,
        "window": args.window,
    });
    let header: &[&str] = if args.coupled {
        &["x", "y", "g", "f"]
    } else {
        &["x", "y", "value"]
    };
    io::write_csv(&args.out, &config, header, &rows)?;
    println!(
        "sample {label} seed={} resolution={}: wrote {} ({} points, value range [{}, {}])",
        args.seed,
        args.resolution,
        args.out.display(),
        rows.len(),
        fmt(min_value),
        fmt(max_value),
    );
    Ok(())
}

fn run_moments(args: MomentsArgs) -> Result<()> {
    let config = ExperimentConfig {
        measure: args.measure.clone(),
        convention: args.convention.into(),
        u: args.u,
        lengths: vec![args.length],
        n_samples: args.samples,
        seed: args.seed,
        grid_step: args.grid_step,
    };
    let estimates = estimate(&config)?;
    if let Some(out) = &args.out {
        let config_json = json!({
            "command": "moments",
            "measure": args.measure,
            "convention": args.convention.name(),
            "u": args.u,
            "length": args.length,
            "samples": args.samples,
            "seed": args.seed,
            "grid_step": args.grid_step,
        });
        io::write_json(out, &config_json, serde_json::to_value(&estimates)?)?;
    }
    println!(
        "moments measure={} convention={} u={} L={} samples={}: mean={} (se {}) second_factorial={} variance={} persistence={} suspicious={}",
        args.measure,
        args.convention.name(),
        fmt(args.u),
        fmt(args.length),
        args.samples,
        fmt(estimates.mean.value),
        fmt(estimates.mean.se),
        fmt(estimates.second_factorial.value),
        fmt(estimates.variance.value),
        fmt(estimates.persistence.value),
        estimates.suspicious_samples,
    );
    Ok(())
}

fn run_persistence(args: PersistenceArgs) -> Result<()> {
    let config = ExperimentConfig {
        measure: args.measure.clone(),
        convention: args.convention.into(),
        u: args.u,
        lengths: args.lengths.clone(),
        n_samples: args.samples,
        seed: args.seed,
        grid_step: None,
    };
    let rows = persistence_sweep(&config)?;
    if let Some(out) = &args.out {
        let config_json = json!({
            "command": "persistence",
            "measure": args.measure,
            "convention": args.convention.name(),
            "u": args.u,
            "lengths": args.lengths,
            "samples": args.samples,
            "seed": args.seed,
        });
        let records: Vec<Vec<String>> = rows
            .iter()
            .map(|r| {
                vec![
                    fmt(r.parameter),
                    fmt(r.persistence),
                    fmt(r.se),
                    fmt_opt(r.upper_bound),
                ]
            })
            .collect();
        io::write_csv(
            out,
            &config_json,
            &["L", "persistence", "se", "upper_bound"],
            &records,
        )?;
    }
    let last = rows.last().expect("sweep returns one row per length");
    println!(
        "persistence measure={} u={} samples={} rows={}: L={} p={} (se {})",
        args.measure,
        fmt(args.u),
        args.samples,
        rows.len(),
        fmt(last.parameter),
        fmt(last.persistence),
        fmt(last.se),
    );
    Ok(())
}

fn run_kacrice(args: KacriceArgs) -> Result<()> {
    let mu = resolve_measure_spec(&args.measure)?;
    let direction = Direction::new(args.u);
    let kernel = CovarianceKernel1D::from_measure(&mu, direction, FrequencyConvention::TwoPi);
    let context = KacRiceContext::new(kernel);
    let expected = context.expected_zero_count(args.length);
    let numeric = context.second_factorial_moment_numeric(args.length)?;
    let inputs = AsymptoticInputs {
        nu4: mu.nu4_hat(),
        u: direction,
    };
    let (kind, asymptotic) = match degenerate_asymptotic(&inputs, args.length) {
        Ok(v) => ("degenerate", v),
        Err(_) => (
            "cubic",
            second_factorial_moment_asymptotic(&inputs, args.length),
        ),
    };
    if let Some(out) = &args.out {
        let config_json = json!({
            "command": "kacrice",
            "measure": args.measure,
            "u": args.u,
            "length": args.length,
            "convention": "twopi",
        });
        io::write_json(
            out,
            &config_json,
            json!({
                "expected_zero_count": expected,
                "second_factorial_numeric": numeric,
                "second_factorial_asymptotic": asymptotic,
                "asymptotic_kind": kind,
                "ratio": numeric / asymptotic,
            }),
        )?;
    }
    println!(
        "kacrice measure={} u={} L={}: E[Z]={} E[Z(Z-1)] numeric={} {}={} ratio={}",
        args.measure,
        fmt(args.u),
        fmt(args.length),
        fmt(expected),
        fmt(numeric),
        kind,
        fmt(asymptotic),
        fmt(numeric / asymptotic),
    );
    Ok(())
}

fn run_coupling_tail(args: TailArgs) -> Result<()> {
    let rows = coupling_tail_experiment(args.eps, args.m_pairs, &args.radii, args.samples, args.seed)?;
    if let Some(out) = &args.out {
        let config_json = json!({
            "command": "coupling-tail",
            "eps": args.eps,
            "m_pairs": args.m_pairs,
            "radii": args.radii,
            "samples": args.samples,
            "seed": args.seed,
        });
        let records: Vec<Vec<String>> = rows
            .iter()
            .map(|r| {
                vec![
                    fmt(r.radius),
                    fmt(r.threshold_log),
                    fmt(r.threshold_square),
                    fmt(r.exceed_log.value),
                    fmt(r.exceed_log.se),
                    fmt_opt(r.exceed_log_bound),
                    fmt(r.exceed_square.value),
                    fmt(r.exceed_square.se),
                    fmt_opt(r.exceed_square_bound),
                    fmt(r.mean_sup),
                    fmt(r.mean_sup_ratio),
                ]
            })
            .collect();
        io::write_csv(
            out,
            &config_json,
            &[
                "radius",
                "threshold_log",
                "threshold_square",
                "exceed_log",
                "exceed_log_se",
                "exceed_log_bound",
                "exceed_square",
                "exceed_square_se",
                "exceed_square_bound",
                "mean_sup",
                "mean_sup_ratio",
            ],
            &records,
        )?;
    }
    let last = rows.last().expect("tail experiment returns one row per radius");
    println!(
        "coupling tail eps={} m_pairs={} samples={} radii={}: R={} exceed_log={} exceed_square={} mean_sup_ratio={}",
        fmt(args.eps),
        args.m_pairs,
        args.samples,
        rows.len(),
        fmt(last.radius),
        fmt(last.exceed_log.value),
        fmt(last.exceed_square.value),
        fmt(last.mean_sup_ratio),
    );
    Ok(())
}

fn run_coupling_transfer(args: TransferArgs) -> Result<()> {
    let report = persistence_transfer_experiment(
        args.eps,
        args.m_pairs,
        args.u,
        args.length,
        args.samples,
        args.seed,
    )?;
    if let Some(out) = &args.out {
        let config_json = json!({
            "command": "coupling-transfer",
            "eps": args.eps,
            "m_pairs": args.m_pairs,
            "u": args.u,
            "length": args.length,
            "samples": args.samples,
            "seed": args.seed,
        });
        io::write_json(out, &config_json, serde_json::to_value(&report)?)?;
    }
    println!(
        "coupling transfer u={} L={} eps={} samples={}: p_zero={} (exact {}) p_tie={} p_exceed={} violations={}",
        fmt(report.u),
        fmt(report.length),
        fmt(report.eps),
        report.n_samples,
        fmt(report.p_zero.value),
        fmt(report.exact_reference),
        fmt(report.p_tie.value),
        fmt(report.p_exceed.value),
        report.violations,
    );
    Ok(())
}

fn run_coupling_normality(args: NormalityArgs) -> Result<()> {
    let report = coupled_coefficient_normality(args.eps, args.m_pairs, args.samples, args.seed)?;
    if let Some(out) = &args.out {
        let config_json = json!({
            "command": "coupling-normality",
            "eps": args.eps,
            "m_pairs": args.m_pairs,
            "samples": args.samples,
            "seed": args.seed,
        });
        io::write_json(out, &config_json, serde_json::to_value(&report)?)?;
    }
    let worst_variance = report
        .variances
        .iter()
        .map(|v| (v.value - 1.0).abs())
        .fold(0.0f64, f64::max);
    let worst_ad = report
        .anderson_darling
        .iter()
        .copied()
        .fold(0.0f64, f64::max);
    println!(
        "coupling normality eps={} m_pairs={} samples={}: max|var-1|={} max_AD={} (critical {}) pass={}",
        fmt(args.eps),
        args.m_pairs,
        args.samples,
        fmt(worst_variance),
        fmt(worst_ad),
        fmt(report.critical_value),
        report.pass,
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_parse_into_the_expected_commands() {
        let cli = Cli::try_parse_from([
            "nodal-lab",
            "persistence",
            "--measure",
            "cilleruelo",
            "--u",
            "0",
            "--L",
            "5,10,20",
            "--samples",
            "100",
        ])
        .unwrap();
        let Some(Command::Persistence(args)) = cli.command else {
            panic!("wrong command: {cli:?}");
        };
        assert_eq!(args.lengths, vec![5.0, 10.0, 20.0]);
        assert_eq!(args.seed, 0, "seed defaults to 0");

        assert!(Cli::try_parse_from(["nodal-lab", "moments", "--measure", "x"]).is_err());
        assert!(Cli::try_parse_from(["nodal-lab", "sample", "--out", "g.csv"]).is_err());
        assert!(Cli::try_parse_from([
            "nodal-lab", "sample", "--coupled", "--eps", "0.1", "--out", "g.csv"
        ])
        .is_err(), "--coupled needs --m-pairs");
    }

    #[test]
    fn worker_env_values_must_be_positive_integers() {
        // configure_workers reads the flag before the environment.
        assert!(configure_workers(Some(0)).is_err());
    }
}
