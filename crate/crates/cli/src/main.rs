use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use tripod_eit::Backend;
use tripod_eit_cli::config::{OutputFormat, RunConfig};
use tripod_eit_cli::run;

const THREADS_ENV: &str = "TRIPOD_EIT_THREADS";

/// Compute tripod EIT spectra and their lineshape analyses from a run file.
#[derive(Debug, Parser)]
#[command(name = "tripod-eit", version)]
struct Cli {
    /// Run configuration (key = value lines).
    #[arg(short, long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir`.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Susceptibility backend; overrides `model`.
    #[arg(long, value_parser = ["analytic", "numeric"])]
    model: Option<String>,
    /// Spectrum file format; overrides `format`.
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
    /// Suppress progress messages.
    #[arg(short, long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut cfg = match RunConfig::load(&cli.config) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {}: {e}", cli.config.display());
            return ExitCode::from(2);
        }
    };
    if let Some(m) = &cli.model {
        cfg.sweep.backend = m.parse::<Backend>().expect("clap restricts the value");
    }
    if let Some(f) = &cli.format {
        cfg.format = f.parse::<OutputFormat>().expect("clap restricts the value");
    }
    if let Some(dir) = cli.output {
        cfg.output_dir = dir;
    }

    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) => n,
            Err(_) => {
                eprintln!("error: {THREADS_ENV} must be a non-negative integer, got '{v}'");
                return ExitCode::from(2);
            }
        },
        Err(_) => 0,
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
        eprintln!("error: thread pool: {e}");
        return ExitCode::from(1);
    }

    let started = Instant::now();
    if !cli.quiet {
        eprintln!(
            "{} sweep ({} model): {} power(s) x {} field(s) x {} points",
            cfg.sweep.configuration,
            cfg.sweep.backend,
            cfg.sweep.powers_mw.len(),
            cfg.sweep.b_fields_mg.len(),
            cfg.sweep.points
        );
    }
    let artifacts = match run::execute(&cfg) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };

    if let Err(e) = std::fs::create_dir_all(&cfg.output_dir) {
        eprintln!("error: cannot create {}: {e}", cfg.output_dir.display());
        return ExitCode::from(1);
    }
    for (name, contents) in &artifacts.files {
        let path = cfg.output_dir.join(name);
        if let Err(e) = std::fs::write(&path, contents) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(1);
        }
    }
    if !cli.quiet {
        eprintln!(
            "wrote {} file(s) to {} in {:.2} s",
            artifacts.files.len(),
            cfg.output_dir.display(),
            started.elapsed().as_secs_f64()
        );
    }
    ExitCode::SUCCESS
}
