//! `qsep`: generate hard instances, run detectors against them, run
//! experiment batteries and verify ground truth. Every command is a pure
//! function of its flags and seed; results go to files under `--out-dir`.

mod adversary;
mod bench;
mod exit;
mod gen;
mod report;
mod run;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

pub use exit::{Failure, Outcome};

#[derive(Debug, Parser)]
#[command(name = "qsep", version, about = "Query-complexity laboratory for substructure detection")]
struct Cli {
    /// Directory all input and output paths are resolved against.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Worker threads (default: logical cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Master seed.
    #[arg(long, global = true, env = "QSEP_SEED", default_value_t = 1)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate an instance, its certificate and its ground-truth sidecar.
    Gen(gen::GenArgs),
    /// Run one detector once against an instance file.
    Run(run::RunArgs),
    /// Run a separation, slope or trial battery from a JSON file.
    Bench(bench::BenchArgs),
    /// Check an instance against its ground-truth sidecar.
    Verify(verify::VerifyArgs),
    /// Compare the online claw adversary with the offline generator.
    AdversaryTest(adversary::AdversaryArgs),
    /// Recompute summary statistics from a results CSV.
    Report(report::ReportArgs),
}

/// Shared context for every command.
pub struct Ctx {
    pub out_dir: PathBuf,
    pub seed: u64,
}

impl Ctx {
    pub fn path(&self, p: &std::path::Path) -> PathBuf {
        self.out_dir.join(p)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            log::warn!("could not size the worker pool: {e}");
        }
    }
    if let Err(e) = std::fs::create_dir_all(&cli.out_dir) {
        eprintln!("error: {}: {e}", cli.out_dir.display());
        return ExitCode::from(Failure::Io(String::new()).code());
    }
    let ctx = Ctx {
        out_dir: cli.out_dir,
        seed: cli.seed,
    };
    let result = match cli.command {
        Command::Gen(a) => gen::run(&ctx, a),
        Command::Run(a) => run::run(&ctx, a),
        Command::Bench(a) => bench::run(&ctx, a),
        Command::Verify(a) => verify::run(&ctx, a),
        Command::AdversaryTest(a) => adversary::run(&ctx, a),
        Command::Report(a) => report::run(&ctx, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            if let Some(h) = f.hint() {
                eprintln!("hint: {h}");
            }
            ExitCode::from(f.code())
        }
    }
}
