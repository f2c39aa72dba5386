use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use chemotaxis_core::config::{parse_config, preset, RunConfig, PRESETS};
use chemotaxis_core::run::{execute, RunStatus};
use chemotaxis_core::sweep::{parse_sweep, run_sweep, SUMMARY_FILE};
use chemotaxis_core::{plot, validate_params, Error};

/// Attraction-repulsion chemotaxis simulator.
#[derive(Parser)]
#[command(name = "chemotaxis", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one configuration and write its run directory.
    Run {
        config: PathBuf,
        /// Output directory (default: output.dir, else $CHEMOTAXIS_OUT/<stem>).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the parameter validation report and, in regime, the exponent witness.
    Check { config: PathBuf },
    /// Run the cartesian product of the sweep axes.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write an SVG of max u, min v and y from a run directory.
    Plot { rundir: PathBuf },
    /// Print a named preset configuration.
    Preset { name: String },
}

const EXIT_CONFIG: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_MONITOR: u8 = 3;

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_CONFIG })
}

fn read_text(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn load(path: &Path) -> Result<RunConfig, Error> {
    parse_config(&read_text(path)?)
}

fn output_dir(cfg: &RunConfig, config_path: &Path, out: Option<PathBuf>) -> PathBuf {
    if let Some(o) = out {
        return o;
    }
    if !cfg.output_dir.as_os_str().is_empty() {
        return cfg.output_dir.clone();
    }
    let stem = config_path.file_stem().map_or_else(|| "run".into(), |s| s.to_os_string());
    cfg.resolved_output_dir().join(stem)
}

fn cmd_run(config: &Path, out: Option<PathBuf>) -> ExitCode {
    let cfg = match load(config) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    let dir = output_dir(&cfg, config, out);
    match execute(&cfg, Some(&dir)) {
        Ok(outcome) => {
            print!("{outcome}");
            println!("output = {}", dir.display());
            match outcome.status {
                RunStatus::Ok => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_MONITOR),
            }
        }
        Err(e) => fail(&e),
    }
}

fn cmd_check(config: &Path) -> ExitCode {
    let cfg = match load(config) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    print!("{}", validate_params(&cfg.model_params()));
    match cfg.witness() {
        Ok(Some(w)) => print!("{w}"),
        Ok(None) => println!("witness = none"),
        Err(e) => return fail(&e),
    }
    ExitCode::SUCCESS
}

fn cmd_sweep(config: &Path, out: Option<PathBuf>) -> ExitCode {
    let spec = match read_text(config).and_then(|t| parse_sweep(&t)) {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    let root = output_dir(&spec.base, config, out);
    match run_sweep(&spec, &root) {
        Ok(points) => {
            let failed = points.iter().filter(|p| p.status == RunStatus::Error).count();
            for p in points.iter().filter_map(|p| p.error.as_ref().map(|e| (p.index, e))) {
                eprintln!("point {}: {}", p.0, p.1);
            }
            println!("points = {}", points.len());
            println!("failed = {failed}");
            println!("summary = {}", root.join(SUMMARY_FILE).display());
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.cmd {
        Command::Run { config, out } => cmd_run(&config, out),
        Command::Check { config } => cmd_check(&config),
        Command::Sweep { config, out } => cmd_sweep(&config, out),
        Command::Plot { rundir } => match plot::plot_run(&rundir) {
            Ok(p) => {
                println!("{}", p.display());
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
        Command::Preset { name } => match preset(&name) {
            Some(c) => {
                print!("{}", c.to_text());
                ExitCode::SUCCESS
            }
            None => {
                eprintln!("error: unknown preset '{name}' (available: {})", PRESETS.join(", "));
                ExitCode::from(EXIT_CONFIG)
            }
        },
    }
}
