//! Command-line driver: build extensions from config files, export value
//! grids to CSV, run the verification suites and demonstrate the dyadic
//! two-pointed rejection.
//!
//! Exit codes: 0 success, 1 failed checks, 2 config error,
//! 3 precondition violation, 4 numerical failure.

mod config;

use clap::{Parser, Subcommand};
use config::{describe_set, BuildConfig, FunctionSource, SetDescription};
use sepcont::domains::graph_from_onepointed;
use sepcont::domains::{ClosedLineSet, GraphRecoveryError, GraphSet, Homeomorphism1D};
use sepcont::engine::EngineError;
use sepcont::gallery::{self, GalleryEntry};
use sepcont::harness::{
    check_evaluability, check_partition, check_restriction, joint_discontinuity_probe,
    section_oscillation, check_pair_identity, ProbeReport, SectionAxis,
};
use sepcont::{OnePointedViolation, SepExtension};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "sepcont",
    about = "Separately continuous extensions with a prescribed restriction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the extension described by a config file and print a summary.
    Extend {
        #[arg(long)]
        config: PathBuf,
    },
    /// Sample the extension on a uniform grid and write CSV rows `x,y,value`.
    Grid {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 17)]
        resolution: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run all applicable verification suites for a configured build.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Override the sampling seed from the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Also print machine-readable key-value blocks.
        #[arg(long)]
        kv: bool,
    },
    /// Print the truncated dyadic family, the one-pointedness verdict and
    /// the projection-net diagnostic.
    Counterexample {
        #[arg(long)]
        depth: u32,
    },
}

enum CliError {
    Config(String),
    Violation(OnePointedViolation),
    Numerical(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Violation(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }

    fn report(&self) {
        match self {
            CliError::Config(msg) => eprintln!("error: {msg}"),
            CliError::Violation(v) => {
                println!(
                    "violation: axis={} coordinate={} witness1=({}, {}) witness2=({}, {})",
                    v.axis,
                    v.coordinate,
                    v.witnesses.0.x,
                    v.witnesses.0.y,
                    v.witnesses.1.x,
                    v.witnesses.1.y
                );
                eprintln!("error: the set is not horizontally and vertically one-pointed");
            }
            CliError::Numerical(msg) => eprintln!("error: {msg}"),
        }
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        CliError::Numerical(e.to_string())
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            e.report();
            ExitCode::from(e.code())
        }
    }
}

fn run() -> Result<ExitCode, CliError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Extend { config } => cmd_extend(&config),
        Command::Grid {
            config,
            resolution,
            out,
        } => cmd_grid(&config, resolution, &out),
        Command::Verify { config, seed, kv } => cmd_verify(&config, seed, kv),
        Command::Counterexample { depth } => cmd_counterexample(depth),
    }
}

fn load_config(path: &Path) -> Result<BuildConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    config::parse_config(&text).map_err(|e| CliError::Config(e.to_string()))
}

fn resolve_entry(cfg: &BuildConfig) -> Result<GalleryEntry, CliError> {
    match &cfg.function {
        FunctionSource::Gallery { name, arg } => {
            gallery::by_name(name, *arg).map_err(|e| CliError::Config(e.to_string()))
        }
        FunctionSource::Const(c) => Ok(gallery::constant_entry(*c)),
        FunctionSource::Piecewise(bps) => {
            gallery::piecewise_entry(bps.clone()).map_err(|e| CliError::Config(e.to_string()))
        }
    }
}

fn resolve_graph(cfg: &BuildConfig) -> Result<GraphSet, CliError> {
    match &cfg.set {
        SetDescription::Diagonal => GraphSet::diagonal_on(cfg.domain.0, cfg.domain.1)
            .map_err(|e| CliError::Config(e.to_string())),
        SetDescription::Graph(bps) => {
            let map =
                Homeomorphism1D::new(bps.clone()).map_err(|e| CliError::Config(e.to_string()))?;
            let (lo, hi) = map.span();
            let base =
                ClosedLineSet::interval(lo, hi).map_err(|e| CliError::Config(e.to_string()))?;
            GraphSet::new(base, map).map_err(|e| CliError::Config(e.to_string()))
        }
        SetDescription::Dyadic(depth) => {
            let data = gallery::dyadic_counterexample(*depth)
                .map_err(|e| CliError::Config(e.to_string()))?;
            match graph_from_onepointed(&data.set) {
                Err(GraphRecoveryError::NotOnePointed(v)) => Err(CliError::Violation(v)),
                Err(other) => Err(CliError::Config(other.to_string())),
                Ok((base, map)) => {
                    GraphSet::new(base, map).map_err(|e| CliError::Config(e.to_string()))
                }
            }
        }
    }
}

fn build_from_config(cfg: &BuildConfig) -> Result<(SepExtension, GalleryEntry), CliError> {
    let graph = resolve_graph(cfg)?;
    let entry = resolve_entry(cfg)?;
    let ext = sepcont::engine::build(graph, entry.sequence.clone(), cfg.case, cfg.policy)?;
    Ok((ext, entry))
}

fn cmd_extend(path: &Path) -> Result<ExitCode, CliError> {
    let cfg = load_config(path)?;
    let (ext, entry) = build_from_config(&cfg)?;
    println!("case: {}", ext.case());
    println!("set: {}", describe_set(&cfg));
    println!("function: {}", entry.name);
    println!(
        "policy: initial_terms={} max_terms={} n0_cap={} cauchy_max_stages={}",
        cfg.policy.initial_terms,
        cfg.policy.max_terms,
        cfg.policy.n0_cap,
        cfg.policy.cauchy_max_stages
    );
    println!("tol: {}", cfg.tol);
    println!("seed: {}", cfg.seed);
    println!("status: built");
    Ok(ExitCode::SUCCESS)
}

fn grid_coords(lo: f64, hi: f64, resolution: u32) -> Vec<f64> {
    let step = (hi - lo) / (resolution - 1) as f64;
    let mut out: Vec<f64> = (0..resolution).map(|i| lo + i as f64 * step).collect();
    *out.last_mut().unwrap() = hi;
    out
}

fn cmd_grid(path: &Path, resolution: u32, out: &Path) -> Result<ExitCode, CliError> {
    if resolution < 2 {
        return Err(CliError::Config(format!(
            "grid resolution must be at least 2, got {resolution}"
        )));
    }
    let cfg = load_config(path)?;
    let (ext, _) = build_from_config(&cfg)?;
    let coords = grid_coords(cfg.domain.0, cfg.domain.1, resolution);
    let mut rows = String::from("x,y,value\n");
    for &x in &coords {
        for &y in &coords {
            let v = ext.evaluate(sepcont::Point2D::new(x, y), cfg.tol)?;
            rows.push_str(&format!("{x:.16e},{y:.16e},{v:.16e}\n"));
        }
    }
    std::fs::write(out, rows)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", out.display())))?;
    println!(
        "wrote {} rows to {}",
        resolution as usize * resolution as usize,
        out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn max_increase(oscillations: &[f64]) -> f64 {
    oscillations
        .windows(2)
        .map(|w| (w[1] - w[0]).max(0.0))
        .fold(0.0, f64::max)
}

fn cmd_verify(path: &Path, seed_override: Option<u64>, kv: bool) -> Result<ExitCode, CliError> {
    let cfg = load_config(path)?;
    let seed = seed_override.unwrap_or(cfg.seed);
    let (ext, entry) = build_from_config(&cfg)?;
    let graph = ext.graph().clone();
    let mut reports: Vec<ProbeReport> = Vec::new();

    match &entry.limit {
        Some(limit) => {
            let limit = limit.clone();
            reports.push(check_restriction(
                &ext,
                &graph,
                &move |t| limit(t),
                1000,
                cfg.tol,
                seed,
            )?);
        }
        None => reports.push(check_evaluability(&ext, &graph, 1000, cfg.tol, seed)?),
    }

    reports.push(check_pair_identity(&ext.pair(1)?, 1000, 1e-15, seed));
    reports.push(check_partition(&ext, 500, 1e-12, seed)?);

    let f = ext.as_function(cfg.tol);
    let (lo, hi) = cfg.domain;
    let width = ((hi - lo) / 4.0).min(2f64.powi(-6));
    let window = (hi - width, hi);
    let depths = [10, 11, 12, 13];
    let osc_x = section_oscillation(&f, SectionAxis::Horizontal, hi, window, &depths);
    reports.push(ProbeReport::from_worst(
        "section-oscillation-x",
        osc_x.len(),
        max_increase(&osc_x),
        1e-12,
        None,
        seed,
    ));
    let osc_y = section_oscillation(&f, SectionAxis::Vertical, hi, window, &depths);
    reports.push(ProbeReport::from_worst(
        "section-oscillation-y",
        osc_y.len(),
        max_increase(&osc_y),
        1e-12,
        None,
        seed,
    ));

    if let Some(hint) = entry.discontinuity {
        let radii = [0.1, 0.01, 0.001];
        let osc = joint_discontinuity_probe(&f, hint.at, &radii);
        let shortfall = osc
            .iter()
            .map(|o| (hint.min_oscillation - o).max(0.0))
            .fold(0.0, f64::max);
        reports.push(ProbeReport::from_worst(
            "joint-discontinuity",
            radii.len(),
            shortfall,
            0.0,
            Some(hint.at),
            seed,
        ));
    }

    let mut all_pass = true;
    for report in &reports {
        println!("{}", report.line());
        if kv {
            println!("{}", report.kv_block());
        }
        all_pass &= report.pass;
    }
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn projection_net_spacing(xs: &mut [f64]) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut spacing = xs[0].max(1.0 - xs[xs.len() - 1]);
    for w in xs.windows(2) {
        spacing = spacing.max(w[1] - w[0]);
    }
    spacing
}

fn cmd_counterexample(depth: u32) -> Result<ExitCode, CliError> {
    let data = gallery::dyadic_counterexample(depth)
        .map_err(|e| CliError::Config(e.to_string()))?;
    println!("counterexample depth={depth}");
    println!("E1 points ({}):", data.e1.len());
    for p in data.e1.points() {
        println!("  ({}, {})", p.x, p.y);
    }
    println!("E2: diagonal on [0, 1]");
    let verdict = sepcont::validate_onepointed(&data.set);
    let mut xs: Vec<f64> = data.e1.points().iter().map(|p| p.x).collect();
    let spacing = projection_net_spacing(&mut xs);
    match verdict {
        Ok(()) => {
            println!("verdict: one-pointed");
            println!("projection net spacing = {spacing}");
            Ok(ExitCode::SUCCESS)
        }
        Err(v) => {
            println!(
                "verdict: VIOLATION axis={} coordinate={} witness1=({}, {}) witness2=({}, {})",
                v.axis,
                v.coordinate,
                v.witnesses.0.x,
                v.witnesses.0.y,
                v.witnesses.1.x,
                v.witnesses.1.y
            );
            println!("projection net spacing = {spacing}");
            println!("the discontinuity projections cover a {spacing}-net of [0, 1]");
            Ok(ExitCode::from(3))
        }
    }
}
