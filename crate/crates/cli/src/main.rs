mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use config::RunConfig;

#[derive(Parser)]
#[command(name = "adl", version, about = "A1 Lamb-wave acoustic delay line modelling, synthesis and extraction")]
struct Cli {
    /// TOML run configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rayleigh-Lamb branches and decoupled A1 curves as CSV.
    Dispersion,
    /// Center frequency, series resistance, bandwidth and delay per design.
    Design,
    /// Touchstone files and sidecars for every design in the sweep.
    Synth,
    /// Band metrics per file and a propagation fit over the family.
    Extract {
        /// Touchstone files.
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Gap lengths in µm, one per file, for files without a sidecar.
        #[arg(long, value_delimiter = ',')]
        gaps: Option<Vec<f64>>,
        /// Smoothing window in samples.
        #[arg(long)]
        window: Option<usize>,
        /// Fit frequency in GHz.
        #[arg(long = "f-eval")]
        f_eval: Option<f64>,
        /// Conjugately match each file before computing metrics.
        #[arg(long = "match")]
        do_match: bool,
    },
    /// Conjugate matching impedances for each file.
    Match {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<usize> {
    let cfg = RunConfig::load(cli.config.as_deref())?;
    std::fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
    match cli.command {
        Command::Dispersion => commands::dispersion(&cfg, &cli.out),
        Command::Design => commands::design(&cfg, &cli.out),
        Command::Synth => commands::synth(&cfg, &cli.out),
        Command::Extract {
            files,
            gaps,
            window,
            f_eval,
            do_match,
        } => commands::extract(
            &cfg,
            &commands::ExtractArgs {
                files,
                gaps_um: gaps,
                window,
                f_eval_ghz: f_eval,
                do_match,
            },
            &cli.out,
        ),
        Command::Match { files } => commands::match_files(&files, &cli.out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(if cli.verbose { log::LevelFilter::Debug } else { log::LevelFilter::Warn })
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(n) => {
            log::error!("{n} failure(s)");
            ExitCode::FAILURE
        }
        Err(e) => {
            log::error!("{e:#}");
            ExitCode::from(2)
        }
    }
}
