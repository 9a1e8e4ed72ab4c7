use clap::{Parser, Subcommand};
use revgeo::cli::{exit_code, run, Command, EXIT_OK};
use revgeo::config::RunConfig;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "revgeo",
    version,
    about = "Closed geodesics and systolic ratios of spheres of revolution with rotational wind"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Full report (JSON) plus generating and Finsler tables (CSV)
    Analyze(Args),
    /// Integrate one geodesic and write its trajectory
    Geodesic(Args),
    /// Generating and Finsler tables only
    Gentable(Args),
    /// Build a Zoll profile from a prescribed upper cap and certify it
    ZollBuild(Args),
    /// Systolic ratios for every wind in the config
    Sweep(Args),
}

#[derive(clap::Args)]
struct Args {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("TOOL_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // Only fails if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let (cmd, args) = match cli.command {
        Cmd::Analyze(a) => (Command::Analyze, a),
        Cmd::Geodesic(a) => (Command::Geodesic, a),
        Cmd::Gentable(a) => (Command::Gentable, a),
        Cmd::ZollBuild(a) => (Command::ZollBuild, a),
        Cmd::Sweep(a) => (Command::Sweep, a),
    };
    let result = RunConfig::load(&args.config).and_then(|cfg| run(cmd, &cfg, args.out.as_deref()));
    match result {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::from(EXIT_OK as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
