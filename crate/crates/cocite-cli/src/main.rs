//! Command-line front end for the co-citation analysis pipeline.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cocite::error::Error;
use config::{ConfigOverrides, RunConfig};

#[derive(Parser)]
#[command(
    name = "cocite",
    version,
    about = "Combinatorial novelty and anticipation indexes over co-citation data",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CountArgs {
    #[command(flatten)]
    overrides: ConfigOverrides,
}

#[derive(Args)]
struct ScoreArgs {
    #[command(flatten)]
    overrides: ConfigOverrides,
    /// Counts cache to score against (default: <output_dir>/counts.ccl).
    #[arg(long, value_name = "FILE")]
    cache: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    overrides: ConfigOverrides,
    /// Score table to analyze (default: <output_dir>/scores.csv).
    #[arg(long, value_name = "FILE")]
    scores: Option<PathBuf>,
}

#[derive(Args)]
struct GraphArgs {
    #[command(flatten)]
    overrides: ConfigOverrides,
    /// Score table for node attributes (default: <output_dir>/scores.csv).
    #[arg(long, value_name = "FILE")]
    scores: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// Generator configuration (TOML, or JSON by extension).
    #[arg(long, value_name = "FILE")]
    synth_config: PathBuf,
    /// Where to write corpus.jsonl and catalog.csv.
    #[arg(long, value_name = "DIR", default_value = "out")]
    output_dir: PathBuf,
}

#[derive(Args)]
struct PipelineArgs {
    #[command(flatten)]
    overrides: ConfigOverrides,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    overrides: ConfigOverrides,
}

#[derive(Subcommand)]
enum Command {
    /// Count co-citation pairs and element citations into a binary cache.
    Count(CountArgs),
    /// Compute per-paper score vectors from a counts cache.
    Score(ScoreArgs),
    /// Hit curves, logistic fits, and mutual information from scores.
    Analyze(AnalyzeArgs),
    /// Export the journal citation network and per-journal index table.
    Graph(GraphArgs),
    /// Generate a synthetic corpus and catalog.
    Synth(SynthArgs),
    /// Run count, score, analyze, and graph in sequence.
    Pipeline(PipelineArgs),
    /// Re-score a small corpus with the brute-force oracle and compare.
    Verify(VerifyArgs),
}

/// Exit codes: 0 success, 2 validation error, 3 data error, 4 degenerate
/// statistics.
fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidConfig(_) | Error::InfeasibleSynthConfig(_) => 2,
        Error::DegenerateStatistics(_) => 4,
        _ => 3,
    }
}

fn run(cli: Cli) -> cocite::Result<()> {
    match cli.command {
        Command::Count(args) => {
            let config = RunConfig::resolve(&args.overrides)?;
            let path = commands::cmd_count(&config)?;
            println!("wrote {}", path.display());
        }
        Command::Score(args) => {
            let config = RunConfig::resolve(&args.overrides)?;
            let path = commands::cmd_score(&config, args.cache.as_deref())?;
            println!("wrote {}", path.display());
        }
        Command::Analyze(args) => {
            let config = RunConfig::resolve(&args.overrides)?;
            let (curves, report) = commands::cmd_analyze(&config, args.scores.as_deref())?;
            println!("wrote {}", curves.display());
            println!("wrote {}", report.display());
        }
        Command::Graph(args) => {
            let config = RunConfig::resolve(&args.overrides)?;
            for path in commands::cmd_graph(&config, args.scores.as_deref())? {
                println!("wrote {}", path.display());
            }
        }
        Command::Synth(args) => {
            let (corpus, catalog) = commands::cmd_synth(&args.synth_config, &args.output_dir)?;
            println!("wrote {}", corpus.display());
            println!("wrote {}", catalog.display());
        }
        Command::Pipeline(args) => {
            let config = RunConfig::resolve(&args.overrides)?;
            for path in commands::cmd_pipeline(&config)? {
                println!("wrote {}", path.display());
            }
        }
        Command::Verify(args) => {
            let config = RunConfig::resolve(&args.overrides)?;
            commands::cmd_verify(&config)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
