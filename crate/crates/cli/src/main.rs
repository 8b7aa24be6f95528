//! `cantorcert` — certify explicit intervals inside images f(C, C) of the
//! middle-third Cantor set and validate each certificate against a
//! brute-force oracle.
//!
//! Exit codes: 0 success, 2 no certificate found, 1 error.

mod commands;
mod report;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use cantorcert::interval::{Box2, Interval};
use cantorcert::oracle::OracleLimits;
use cantorcert::triadic::{RankCap, DEFAULT_RANK_CAP};

use commands::{cmd_certify, cmd_cover, cmd_reproduce, OutputFormat, RunConfig, EXIT_ERROR};

#[derive(Parser)]
#[command(
    name = "cantorcert",
    version,
    about = "Certified subintervals of Cantor-set images f(C, C)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a certifiable basic square and validate the certificate
    /// against the brute-force oracle.
    Certify(CertifyArgs),
    /// Compute the cover-measure series and export the deepest cover.
    Cover(CoverArgs),
    /// Run a canned reproduction suite: steinhaus-sum, steinhaus-diff,
    /// product, or corollary.
    Reproduce(ReproduceArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Expression in x and y, e.g. "x*y" or "sin(x)*cos(y)".
    #[arg(long)]
    expr: String,

    /// Search region as four decimals: x0 x1 y0 y1.
    #[arg(
        long,
        num_args = 4,
        allow_negative_numbers = true,
        value_names = ["X0", "X1", "Y0", "Y1"],
        default_values_t = [0.0, 1.0, 0.0, 1.0]
    )]
    region: Vec<f64>,

    /// Deepest square rank the search may refine to.
    #[arg(long, default_value_t = 12)]
    max_rank: u32,

    /// Maximum number of search nodes to process.
    #[arg(long, default_value_t = 100_000)]
    budget: u64,

    /// Depth of the oracle covers used for validation.
    #[arg(long, default_value_t = 10, alias = "depth")]
    oracle_depth: u32,

    /// Output format.
    #[arg(long, value_parser = parse_format)]
    format: Option<OutputFormat>,

    /// Worker threads; affects speed only, never results.
    #[arg(long, default_value_t = 1)]
    workers: usize,

    /// Write the report to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Witness point as two exact rationals, e.g. --seed 8/9 1/3; both
    /// coordinates must lie in the Cantor set.
    #[arg(long, num_args = 2, value_names = ["X", "Y"])]
    seed: Option<Vec<String>>,
}

#[derive(Args)]
struct CoverArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct ReproduceArgs {
    /// Suite name: steinhaus-sum, steinhaus-diff, product, or corollary.
    suite: String,

    /// Output format (default: human-readable pass/fail lines).
    #[arg(long, value_parser = parse_format)]
    format: Option<OutputFormat>,

    /// Worker threads; affects speed only, never results.
    #[arg(long, default_value_t = 1)]
    workers: usize,

    /// Write the report to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_format(text: &str) -> Result<OutputFormat, String> {
    match text {
        "json" => Ok(OutputFormat::Json),
        "csv" => Ok(OutputFormat::Csv),
        other => Err(format!("unknown format {other:?}; expected json or csv")),
    }
}

fn rank_cap_from_env() -> Result<RankCap> {
    match std::env::var("CANTOR_RANK_CAP") {
        Ok(text) => {
            let cap: u32 = text
                .parse()
                .with_context(|| format!("CANTOR_RANK_CAP={text:?} is not an integer"))?;
            Ok(RankCap(cap))
        }
        Err(_) => Ok(RankCap(DEFAULT_RANK_CAP)),
    }
}

fn build_config(common: &CommonArgs, seed: Option<&[String]>) -> Result<RunConfig> {
    let cap = rank_cap_from_env()?;
    if common.max_rank > cap.0 {
        bail!("--max-rank {} exceeds the rank cap {}", common.max_rank, cap.0);
    }
    if common.oracle_depth > cap.0 {
        bail!(
            "--oracle-depth {} exceeds the rank cap {}",
            common.oracle_depth,
            cap.0
        );
    }
    let r = &common.region;
    let region = Box2::new(
        Interval::try_new(r[0], r[1]).context("invalid x region")?,
        Interval::try_new(r[2], r[3]).context("invalid y region")?,
    );
    let seed = match seed {
        Some(parts) => Some((
            commands::parse_seed_coordinate(&parts[0])?,
            commands::parse_seed_coordinate(&parts[1])?,
        )),
        None => None,
    };
    Ok(RunConfig {
        expression: common.expr.clone(),
        region,
        max_rank: common.max_rank,
        budget: common.budget,
        oracle_depth: common.oracle_depth,
        seed,
        format: common.format,
        workers: common.workers,
        limits: OracleLimits {
            rank_cap: cap,
            ..OracleLimits::default()
        },
    })
}

fn deliver(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {path:?}"))
        }
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn run() -> Result<i32> {
    let cli = Cli::parse();
    match cli.command {
        Command::Certify(args) => {
            let cfg = build_config(&args.common, args.seed.as_deref())?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(cfg.workers.max(1))
                .build()
                .context("cannot build worker pool")?;
            let (code, output) = pool.install(|| cmd_certify(&cfg))?;
            deliver(args.common.out.as_ref(), &output)?;
            Ok(code)
        }
        Command::Cover(args) => {
            let cfg = build_config(&args.common, None)?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(cfg.workers.max(1))
                .build()
                .context("cannot build worker pool")?;
            let (code, output) = pool.install(|| cmd_cover(&cfg))?;
            deliver(args.common.out.as_ref(), &output)?;
            Ok(code)
        }
        Command::Reproduce(args) => {
            let common = CommonArgs {
                expr: String::new(),
                region: vec![0.0, 1.0, 0.0, 1.0],
                max_rank: 12,
                budget: 100_000,
                oracle_depth: 10,
                format: args.format,
                workers: args.workers,
                out: args.out.clone(),
            };
            let cfg = build_config(&common, None)?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(cfg.workers.max(1))
                .build()
                .context("cannot build worker pool")?;
            let (code, output) = pool.install(|| cmd_reproduce(&cfg, &args.suite))?;
            deliver(args.out.as_ref(), &output)?;
            Ok(code)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
