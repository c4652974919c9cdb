//! Command-line front end. All logic lives in the library; this binary
//! parses arguments, loads the config, dispatches one stage, and maps the
//! outcome to an exit code (0 pass, 2 config, 3 construction, 4 geometry,
//! 10 strip branch).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use semicvx::config::PipelineConfig;
use semicvx::pipeline::{self, ErrorReport};
use semicvx::report;

#[derive(Parser)]
#[command(name = "semicvx", version, about = "Semiconvexity moduli toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct StageArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (defaults to the config's output_dir, then "out").
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the configured sampling seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Partition modulus with its two-sided certificate (CSV + summary).
    OmegaEta(StageArgs),
    /// Concave envelope of the partition modulus and its growth checks.
    Envelope(StageArgs),
    /// Build the counterexample on a configured funnel and verify it.
    Construct(StageArgs),
    /// Recession-cone reduction of a polyhedron to a planar funnel/strip.
    Reduce(StageArgs),
    /// Full run: reduce, then construct and verify on the polyhedron.
    Pipeline(StageArgs),
}

fn stage_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::OmegaEta(_) => "omega-eta",
        Command::Envelope(_) => "envelope",
        Command::Construct(_) => "construct",
        Command::Reduce(_) => "reduce",
        Command::Pipeline(_) => "pipeline",
    }
}

fn load(args: &StageArgs) -> semicvx::Result<(PipelineConfig, PathBuf)> {
    let mut cfg = PipelineConfig::from_path(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.verification.seed = seed;
    }
    let out = args
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    Ok((cfg, out))
}

fn dispatch(cmd: &Command) -> semicvx::Result<i32> {
    match cmd {
        Command::OmegaEta(args) => {
            let (cfg, out) = load(args)?;
            let run = pipeline::run_omega_eta(&cfg)?;
            pipeline::write_omega_eta(&run, &out)?;
            // the sandwich is asserted node-by-node during the computation
            Ok(0)
        }
        Command::Envelope(args) => {
            let (cfg, out) = load(args)?;
            let run = pipeline::run_envelope(&cfg)?;
            let pass = pipeline::write_envelope(&run, &out)?;
            Ok(if pass { 0 } else { 1 })
        }
        Command::Construct(args) => {
            let (cfg, out) = load(args)?;
            let run = pipeline::run_construct(&cfg)?;
            if run.condition_warning {
                eprintln!("warning: the scaling condition does not hold on the window");
            }
            let pass = pipeline::write_construct(&run, &out)?;
            Ok(if pass { 0 } else { 1 })
        }
        Command::Reduce(args) => {
            let (cfg, out) = load(args)?;
            let run = pipeline::run_reduce(&cfg)?;
            pipeline::write_reduce(&run, &out)
        }
        Command::Pipeline(args) => {
            let (cfg, out) = load(args)?;
            let run = pipeline::run_pipeline(&cfg)?;
            pipeline::write_pipeline(&run, &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli.command) {
        Ok(code) => ExitCode::from(u8::try_from(code).unwrap_or(1)),
        Err(e) => {
            let code = pipeline::exit_code_for(&e);
            let doc = ErrorReport {
                error: e.to_string(),
                stage: stage_name(&cli.command).to_string(),
                exit_code: code,
            };
            match report::to_json_string(&doc) {
                Ok(text) => print!("{text}"),
                Err(_) => eprintln!("{e}"),
            }
            ExitCode::from(u8::try_from(code).unwrap_or(1))
        }
    }
}
