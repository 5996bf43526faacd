use std::io::stdout;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sifrk::cli::{cmd_bench, cmd_certify, cmd_run, BenchArgs, RunOverrides};
use sifrk::config::parse_snapshot_times;

#[derive(Parser)]
#[command(name = "sifrk", version, about = "Stabilized integrating-factor Runge-Kutta solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the problem described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated snapshot times.
        #[arg(long)]
        snapshots: Option<String>,
        /// Exit with status 2 (and stop) once the maximum bound is exceeded.
        #[arg(long)]
        expect_mbp: bool,
    },
    /// Check a built-in scheme or tableau file for unconditional MBP.
    Certify { scheme: String },
    /// Run a benchmark suite: temporal, spatial, mbp, bubble, violation, threed.
    Bench {
        suite: String,
        #[arg(long)]
        desk: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        scheme: Option<String>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Some(n) = std::env::var("SIFRK_THREADS").ok().and_then(|v| v.parse().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let cli = Cli::parse();
    let mut out = stdout();
    let code = match cli.command {
        Command::Run {
            config,
            out: dir,
            seed,
            snapshots,
            expect_mbp,
        } => {
            let snapshots = match snapshots.as_deref().map(parse_snapshot_times).transpose() {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            };
            let ov = RunOverrides {
                out: dir,
                seed,
                snapshots,
                expect_mbp,
            };
            cmd_run(&config, &ov, &mut out)
        }
        Command::Certify { scheme } => cmd_certify(&scheme, &mut out),
        Command::Bench {
            suite,
            desk,
            out: dir,
            seed,
            scheme,
        } => cmd_bench(
            &suite,
            &BenchArgs {
                desk,
                out: dir,
                seed,
                scheme,
            },
            &mut out,
        ),
    };
    ExitCode::from(code as u8)
}
