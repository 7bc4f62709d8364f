use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use log::info;

use infolat_core::io::{
    config_to_text, fits_file, lattice_csv, load_config, profile_csv, refit, write_run, Format, Manifest,
    OutputDir,
};
use infolat_core::protocols::run;
use infolat_core::validation::run_validation;
use infolat_core::{local_information, Error};

/// Information-lattice analysis of free-fermion quenches.
#[derive(Parser, Debug)]
#[command(name = "infolat", version)]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "INFOLAT_WORKERS")]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a quench and write its tables.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated times for full lattices; replaces the config value.
        #[arg(long, value_delimiter = ',')]
        snapshot_times: Option<Vec<f64>>,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutFormat,
    },
    /// Lattice of the pre-quench state of a config.
    Lattice {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutFormat,
    },
    /// Re-fit decay and power laws from the tables in a run directory and
    /// print them as JSON.
    Fit {
        dir: PathBuf,
        /// `lo,hi` time window for the decay fit.
        #[arg(long, value_delimiter = ',')]
        decay_window: Option<Vec<f64>>,
        /// `lo,hi` scale window for the power-law fit.
        #[arg(long, value_delimiter = ',')]
        power_window: Option<Vec<f64>>,
    },
    /// Compare the Gaussian pipeline with exact diagonalization on small chains.
    Validate {
        #[arg(long, default_value_t = 50)]
        cases: usize,
        #[arg(long, default_value_t = 0xC0FFEE)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
    },
}

/// Exit 1 for bad input, 2 for numerical failures.
enum Failure {
    Config(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numeric() {
            Failure::Numeric(e.to_string())
        } else {
            Failure::Config(e.to_string())
        }
    }
}

fn format_of(f: OutFormat) -> Format {
    match f {
        OutFormat::Csv => Format::Csv,
        OutFormat::Json => Format::Json,
    }
}

fn manifest(command: &str, workers: usize) -> Manifest {
    Manifest {
        tool: "infolat".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: command.into(),
        config: None,
        config_text: None,
        wall_time_s: 0.0,
        workers,
        lattice_times_s: Vec::new(),
        files: Vec::new(),
    }
}

fn window(flag: &str, v: Option<Vec<f64>>) -> Result<Option<(f64, f64)>, Failure> {
    match v.as_deref() {
        None => Ok(None),
        Some(&[lo, hi]) if lo < hi => Ok(Some((lo, hi))),
        Some(w) => Err(Failure::Config(format!("--{flag} needs `lo,hi` with lo < hi, got {w:?}"))),
    }
}

fn cmd_run(config: &Path, out: &Path, snapshots: Option<Vec<f64>>, format: OutFormat, workers: usize) -> Result<(), Failure> {
    let clock = Instant::now();
    let mut cfg = load_config(config)?;
    if let Some(times) = snapshots {
        cfg.snapshot_times = times;
    }
    let result = run(&cfg)?;
    let mut dir = OutputDir::create(out)?;
    write_run(&mut dir, &result, format_of(format))?;
    let mut m = manifest("run", workers);
    m.config_text = Some(config_to_text(&cfg));
    m.config = Some(cfg);
    m.lattice_times_s = result.timings.lattices.clone();
    m.wall_time_s = clock.elapsed().as_secs_f64();
    let m = dir.finish(m)?;
    info!("wrote {} files to {}", m.files.len(), out.display());
    let asym = fits_file(&result).asymptotes;
    for (label, v) in asym {
        println!("late-time Γ {label:>4}: {v:+.4} bits");
    }
    Ok(())
}

fn cmd_lattice(config: &Path, out: &Path, format: OutFormat, workers: usize) -> Result<(), Failure> {
    let clock = Instant::now();
    let cfg = load_config(config)?;
    let resolved = cfg.resolve()?;
    let state = resolved.initial_state()?;
    let lattice_clock = Instant::now();
    let lattice = local_information(&state)?;
    let lattice_time = lattice_clock.elapsed().as_secs_f64();
    let mut dir = OutputDir::create(out)?;
    match format {
        OutFormat::Csv => {
            dir.write("lattice.csv", &lattice_csv(&lattice))?;
            dir.write("profile.csv", &profile_csv(&lattice, resolved.regions.l_q))?;
        }
        OutFormat::Json => {
            let text = serde_json::to_string_pretty(&lattice).map_err(Error::from)?;
            dir.write("lattice.json", &(text + "\n"))?;
        }
    }
    let mut m = manifest("lattice", workers);
    m.config_text = Some(config_to_text(&cfg));
    m.config = Some(cfg);
    m.lattice_times_s = vec![lattice_time];
    m.wall_time_s = clock.elapsed().as_secs_f64();
    dir.finish(m)?;
    println!(
        "N={} total information {:.10} bits, lattice in {:.2} s",
        lattice.n_sites(),
        lattice.total_info(),
        lattice_time
    );
    Ok(())
}

fn cmd_fit(dir: &Path, decay: Option<Vec<f64>>, power: Option<Vec<f64>>) -> Result<(), Failure> {
    let fits = refit(dir, window("decay-window", decay)?, window("power-window", power)?)?;
    println!("{}", serde_json::to_string_pretty(&fits).map_err(Error::from)?);
    if fits.fits.is_empty() {
        let msg = fits
            .fit_errors
            .iter()
            .map(|(k, v)| format!("{k}: {v}"))
            .collect::<Vec<_>>()
            .join("; ");
        return Err(Failure::Numeric(msg));
    }
    Ok(())
}

fn cmd_validate(cases: usize, seed: u64, tolerance: f64) -> Result<(), Failure> {
    let report = run_validation(cases, seed)?;
    for c in &report.cases {
        info!("{:>24} N={} max deviation {:.3e}", c.name, c.n_sites, c.max());
    }
    println!(
        "{} cases, max oracle deviation {:.3e} (tolerance {:.0e})",
        report.cases.len(),
        report.max_deviation,
        tolerance
    );
    if report.max_deviation < tolerance {
        Ok(())
    } else {
        Err(Failure::Numeric(format!("oracle deviation {:.3e} above tolerance", report.max_deviation)))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let workers = cli
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .max(1);
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global() {
        eprintln!("error: cannot start {workers} workers: {e}");
        return ExitCode::from(1);
    }

    let outcome = match cli.command {
        Command::Run {
            config,
            out,
            snapshot_times,
            format,
        } => cmd_run(&config, &out, snapshot_times, format, workers),
        Command::Lattice { config, out, format } => cmd_lattice(&config, &out, format, workers),
        Command::Fit {
            dir,
            decay_window,
            power_window,
        } => cmd_fit(&dir, decay_window, power_window),
        Command::Validate {
            cases,
            seed,
            tolerance,
        } => cmd_validate(cases, seed, tolerance),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(2)
        }
    }
}
