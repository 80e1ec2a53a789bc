//! Command-line front end for the Dicke-dimer toolkit.
//!
//! Every invocation is a reproducible run: defaults, then an optional TOML
//! config file, then flags resolve into one effective configuration, which
//! is echoed next to the artifacts as `effective-config.toml`. Re-running a
//! subcommand with `--config effective-config.toml` and no other flags
//! rebuilds the same artifacts byte for byte.
//!
//! Exit codes: 0 for completed runs including negative physical findings,
//! 1 for computations that fail underway, 2 for configurations the run
//! cannot start from (clap reports usage errors with 2 as well).

mod commands;
mod config;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use commands::{Failure, RunResult};
use config::{OutputFormat, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "dicke-dimer",
    version,
    about = "Mean-field runs for two Dicke cavities coupled by photon hopping",
    long_about = "Mean-field runs for two Dicke cavities coupled by photon hopping: steady-state \
                  branch tables, linear stability, quenches, adiabatic ramps, phase-diagram \
                  sweeps, and boundary extraction. Artifacts land in --out as CSV/JSON with \
                  17-significant-digit floats plus an effective-config.toml echo."
)]
struct Cli {
    /// TOML run configuration; flags override file values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate the steady branches (NP, SSRP+/-, ASRP+/-) with residuals and
    /// stability verdicts; asymmetric dimers get Newton roots from relaxed seeds.
    Steady(SteadyArgs),
    /// Full linear-stability report: eigenvalues, symmetric/antisymmetric
    /// block spectra, and the analytic boundary values.
    Stability(StabilityArgs),
    /// Sudden hopping change: prepare a start pattern at Ji, relax at Jf,
    /// classify the endpoint.
    Quench(QuenchArgs),
    /// Slow atan-shaped hopping ramp with per-sample branch-tracking error.
    Ramp(RampArgs),
    /// Classify a 1-3 axis parameter grid into a phase diagram.
    Sweep(SweepArgs),
    /// Extract a phase-boundary polyline (closed-form curves or bisection).
    Boundary(BoundaryArgs),
}

/// Flags shared by every subcommand, mirroring [params], [output] and
/// [tolerances] in the config file.
#[derive(Debug, Args)]
struct CommonArgs {
    /// Cavity frequency omega_c (both cavities).
    #[arg(long, value_name = "W")]
    omega_c: Option<f64>,
    /// Atomic splitting omega_a (both cavities).
    #[arg(long, value_name = "W")]
    omega_a: Option<f64>,
    /// Light-matter coupling for both cavities.
    #[arg(long, value_name = "L")]
    lambda: Option<f64>,
    /// Coupling of cavity 1 alone.
    #[arg(long, value_name = "L")]
    lambda1: Option<f64>,
    /// Coupling of cavity 2 alone.
    #[arg(long, value_name = "L")]
    lambda2: Option<f64>,
    /// Photon loss rate for both cavities.
    #[arg(long, value_name = "K")]
    kappa: Option<f64>,
    #[arg(long, value_name = "K")]
    kappa1: Option<f64>,
    #[arg(long, value_name = "K")]
    kappa2: Option<f64>,
    /// Kerr nonlinearity for both cavities.
    #[arg(long, value_name = "X")]
    chi: Option<f64>,
    #[arg(long, value_name = "X")]
    chi1: Option<f64>,
    #[arg(long, value_name = "X")]
    chi2: Option<f64>,
    /// Photon hopping strength.
    #[arg(long = "J", value_name = "J")]
    hopping: Option<f64>,
    /// Output directory for artifacts.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Artifact format where a command offers one (the sweep diagram).
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Relative integration tolerance.
    #[arg(long, value_name = "TOL")]
    tol_rel: Option<f64>,
    /// Absolute integration tolerance.
    #[arg(long, value_name = "TOL")]
    tol_abs: Option<f64>,
    /// Right-hand-side norm under which a state counts as steady.
    #[arg(long, value_name = "TOL")]
    tol_steady: Option<f64>,
    /// Newton residual target for root polishing.
    #[arg(long, value_name = "TOL")]
    tol_newton: Option<f64>,
    /// Neutral eigenvalue band of stability verdicts.
    #[arg(long, value_name = "TOL")]
    tol_margin: Option<f64>,
}

impl CommonArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        let p = &mut cfg.params;
        if let Some(v) = self.omega_c {
            p.omega_c = v;
        }
        if let Some(v) = self.omega_a {
            p.omega_a = v;
        }
        if let Some(v) = self.lambda {
            p.lambda1 = v;
            p.lambda2 = v;
        }
        if let Some(v) = self.kappa {
            p.kappa1 = v;
            p.kappa2 = v;
        }
        if let Some(v) = self.chi {
            p.chi1 = v;
            p.chi2 = v;
        }
        // Per-cavity flags land after the shorthands so the specific wins.
        if let Some(v) = self.lambda1 {
            p.lambda1 = v;
        }
        if let Some(v) = self.lambda2 {
            p.lambda2 = v;
        }
        if let Some(v) = self.kappa1 {
            p.kappa1 = v;
        }
        if let Some(v) = self.kappa2 {
            p.kappa2 = v;
        }
        if let Some(v) = self.chi1 {
            p.chi1 = v;
        }
        if let Some(v) = self.chi2 {
            p.chi2 = v;
        }
        if let Some(v) = self.hopping {
            p.hopping = v;
        }
        if let Some(ref v) = self.out {
            cfg.output.dir = v.to_string_lossy().into_owned();
        }
        if let Some(v) = self.format {
            cfg.output.format = v;
        }
        let t = &mut cfg.tolerances;
        if let Some(v) = self.tol_rel {
            t.rel = v;
        }
        if let Some(v) = self.tol_abs {
            t.abs = v;
        }
        if let Some(v) = self.tol_steady {
            t.steady = v;
        }
        if let Some(v) = self.tol_newton {
            t.newton = v;
        }
        if let Some(v) = self.tol_margin {
            t.margin = v;
        }
    }
}

#[derive(Debug, Args)]
struct SteadyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Relaxation horizon for the seeded root hunt (asymmetric dimers).
    #[arg(long, value_name = "T")]
    t_max: Option<f64>,
}

#[derive(Debug, Args)]
struct StabilityArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Branch to analyze: all, np, ssrp+, ssrp-, asrp+ or asrp-.
    #[arg(long)]
    branch: Option<String>,
}

#[derive(Debug, Args)]
struct QuenchArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Hopping the start pattern is prepared at.
    #[arg(long = "Ji", value_name = "J")]
    j_initial: Option<f64>,
    /// Hopping the system relaxes at; defaults to --J.
    #[arg(long = "Jf", value_name = "J")]
    j_final: Option<f64>,
    /// Start pattern: np, ssrp+/-, asrp+/- or per-cavity like "np,srp+".
    #[arg(long)]
    start: Option<String>,
    /// Symmetry-breaking seed pattern, e.g. +- or ++.
    #[arg(long, value_name = "SS", allow_hyphen_values = true)]
    seed_signs: Option<String>,
    /// Seed amplitude.
    #[arg(long, value_name = "EPS")]
    seed_eps: Option<f64>,
    /// Horizon after which an unsettled run reports Undetermined.
    #[arg(long, value_name = "T")]
    t_max: Option<f64>,
    /// Trajectory sampling interval.
    #[arg(long, value_name = "DT")]
    sample_dt: Option<f64>,
}

#[derive(Debug, Args)]
struct RampArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Hopping the ramp starts from.
    #[arg(long = "Ji", value_name = "J")]
    j_initial: Option<f64>,
    /// Hopping the ramp ends at.
    #[arg(long = "Jf", value_name = "J")]
    j_final: Option<f64>,
    /// Ramp steepness of the atan profile.
    #[arg(long = "ramp-k", value_name = "K")]
    ramp_k: Option<f64>,
    /// Ramp duration.
    #[arg(long = "ramp-tf", value_name = "T")]
    ramp_t_f: Option<f64>,
    /// Start pattern prepared at J(0).
    #[arg(long)]
    start: Option<String>,
    /// Symmetry-breaking seed pattern, e.g. +- or ++.
    #[arg(long, value_name = "SS", allow_hyphen_values = true)]
    seed_signs: Option<String>,
    /// Seed amplitude.
    #[arg(long, value_name = "EPS")]
    seed_eps: Option<f64>,
    /// Branch the tracking error compares against: auto, symmetric, antisymmetric.
    #[arg(long)]
    track: Option<String>,
    /// Trajectory sampling interval.
    #[arg(long, value_name = "DT")]
    sample_dt: Option<f64>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Sweep axis as name:lo:hi:n (repeatable, 1-3 axes); overrides the file.
    #[arg(long = "axis", value_name = "SPEC")]
    axes: Vec<String>,
    /// Classification strategy: analytic or basin.
    #[arg(long)]
    strategy: Option<String>,
    /// Worker threads for the grid; 0 keeps the default pool.
    #[arg(long, value_name = "N")]
    workers: Option<usize>,
    /// Relaxation horizon per basin seed.
    #[arg(long, value_name = "T")]
    basin_t_max: Option<f64>,
}

#[derive(Debug, Args)]
struct BoundaryArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Boundary kind: np-asrp, ssrp or multistable.
    #[arg(long)]
    kind: Option<String>,
    /// Parameter swept along the curve.
    #[arg(long, value_name = "AXIS")]
    scan: Option<String>,
    /// Scan range start.
    #[arg(long, value_name = "V")]
    lo: Option<f64>,
    /// Scan range end.
    #[arg(long, value_name = "V")]
    hi: Option<f64>,
    /// Number of scan points.
    #[arg(long, value_name = "N")]
    points: Option<usize>,
    /// Axis bisected at each scan value (multistable kind).
    #[arg(long, value_name = "AXIS")]
    bisect: Option<String>,
    /// Bisection bracket start.
    #[arg(long, value_name = "V")]
    bisect_lo: Option<f64>,
    /// Bisection bracket end.
    #[arg(long, value_name = "V")]
    bisect_hi: Option<f64>,
    /// Bisection resolution.
    #[arg(long, value_name = "R")]
    resolution: Option<f64>,
    /// Strategy behind the multistable kind: analytic or basin.
    #[arg(long)]
    strategy: Option<String>,
}

fn load_config(path: Option<&std::path::Path>) -> Result<RunConfig, Failure> {
    match path {
        Some(p) => RunConfig::load(p).map_err(Failure::config),
        None => Ok(RunConfig::default()),
    }
}

fn run(cli: Cli) -> RunResult {
    let mut cfg = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Steady(args) => {
            args.common.apply(&mut cfg);
            if let Some(v) = args.t_max {
                cfg.steady.t_max = v;
            }
            commands::cmd_steady(&cfg)
        }
        Command::Stability(args) => {
            args.common.apply(&mut cfg);
            if let Some(v) = args.branch {
                cfg.stability.branch = v;
            }
            commands::cmd_stability(&cfg)
        }
        Command::Quench(args) => {
            args.common.apply(&mut cfg);
            let q = &mut cfg.quench;
            if let Some(v) = args.j_initial {
                q.j_initial = v;
            }
            if let Some(v) = args.j_final {
                q.j_final = Some(v);
            }
            if let Some(v) = args.start {
                q.start = v;
            }
            if let Some(v) = args.seed_signs {
                q.seed_signs = v;
            }
            if let Some(v) = args.seed_eps {
                q.seed_eps = v;
            }
            if let Some(v) = args.t_max {
                q.t_max = v;
            }
            if let Some(v) = args.sample_dt {
                q.sample_dt = v;
            }
            // Pin the relaxation hopping before the echo so the recorded
            // config replays the same run even if [params] later changes.
            if q.j_final.is_none() {
                q.j_final = Some(cfg.params.hopping);
            }
            commands::cmd_quench(&cfg)
        }
        Command::Ramp(args) => {
            args.common.apply(&mut cfg);
            let r = &mut cfg.ramp;
            if let Some(v) = args.j_initial {
                r.j_initial = v;
            }
            if let Some(v) = args.j_final {
                r.j_final = v;
            }
            if let Some(v) = args.ramp_k {
                r.k = v;
            }
            if let Some(v) = args.ramp_t_f {
                r.t_f = v;
            }
            if let Some(v) = args.start {
                r.start = v;
            }
            if let Some(v) = args.seed_signs {
                r.seed_signs = v;
            }
            if let Some(v) = args.seed_eps {
                r.seed_eps = v;
            }
            if let Some(v) = args.track {
                r.track = v;
            }
            if let Some(v) = args.sample_dt {
                r.sample_dt = v;
            }
            commands::cmd_ramp(&cfg)
        }
        Command::Sweep(args) => {
            args.common.apply(&mut cfg);
            if !args.axes.is_empty() {
                let parsed: Result<Vec<_>, _> = args
                    .axes
                    .iter()
                    .map(|s| config::parse_axis_flag(s))
                    .collect();
                cfg.sweep.axis = parsed.map_err(Failure::config)?;
            }
            if let Some(v) = args.strategy {
                cfg.sweep.strategy = v;
            }
            if let Some(v) = args.workers {
                cfg.sweep.workers = v;
            }
            if let Some(v) = args.basin_t_max {
                cfg.sweep.basin_t_max = v;
            }
            commands::cmd_sweep(&cfg)
        }
        Command::Boundary(args) => {
            args.common.apply(&mut cfg);
            let b = &mut cfg.boundary;
            if let Some(v) = args.kind {
                b.kind = v;
            }
            if let Some(v) = args.scan {
                b.scan = v;
            }
            if let Some(v) = args.lo {
                b.lo = v;
            }
            if let Some(v) = args.hi {
                b.hi = v;
            }
            if let Some(v) = args.points {
                b.points = v;
            }
            if let Some(v) = args.bisect {
                b.bisect = v;
            }
            if let Some(v) = args.bisect_lo {
                b.bisect_lo = v;
            }
            if let Some(v) = args.bisect_hi {
                b.bisect_hi = v;
            }
            if let Some(v) = args.resolution {
                b.resolution = v;
            }
            if let Some(v) = args.strategy {
                b.strategy = v;
            }
            commands::cmd_boundary(&cfg)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(failure) => {
            eprintln!("error: {:#}", failure.error);
            std::process::exit(failure.exit_code);
        }
    }
}
