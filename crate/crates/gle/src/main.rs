//! Command-line front end: kernel inspection, single-trajectory runs, the convergence
//! studies, the displacement-scaling study, the force-autocovariance check, and config
//! validation. Exit codes: 0 success, 2 config or validation failure, 3 numerical
//! blow-up, 64 usage errors.

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use gle::kernel::{KernelParams, Regime};
use gle::runner::report::{self, Metadata, SlopeMeta};
use gle::runner::{self, Config, RunError};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "gle", version, about = "Langevin dynamics with power-law memory")]
struct Cli {
    /// Worker threads for ensemble runs (0 keeps the library default).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment description in TOML.
    #[arg(long)]
    config: PathBuf,
    /// Directory receiving the CSV table and its metadata sidecar.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the seed from the config file.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the memory kernel and its power-law compensation on a log-time grid.
    Kernel {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        /// Mode count; omit to pick the smallest count meeting --tail-tol.
        #[arg(long)]
        n_modes: Option<usize>,
        #[arg(long, default_value_t = 1e-8)]
        tail_tol: f64,
        #[arg(long, default_value_t = 10_000)]
        max_modes: usize,
        #[arg(long, default_value_t = 1e-2)]
        t_min: f64,
        #[arg(long, default_value_t = 1e4)]
        t_max: f64,
        #[arg(long, default_value_t = 61)]
        points: usize,
        /// Write the table here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one trajectory of the configured system and write it as CSV.
    Simulate(RunArgs),
    /// Couple the inertial system to its zero-mass limit across the configured masses.
    SmallMass(RunArgs),
    /// Couple the accelerated-kernel system to its white-noise limit across epsilons.
    WhiteNoise(RunArgs),
    /// Mean-square displacement of the potential-free dynamics, with a slope fit.
    Msd(RunArgs),
    /// Compare the random-force autocovariance against the kernel.
    FdtCheck(RunArgs),
    /// Check the config against the modelling conditions and report the regime.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    #[cfg(feature = "parallel")]
    if cli.threads > 0 {
        // Ignore the error from calling twice; the pool is already in place then.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = cli.threads;

    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &RunError) -> u8 {
    match err {
        RunError::ExcessiveAborts { .. } => 3,
        RunError::Sim(gle::dynamics::SimError::BlowUp { .. }) => 3,
        _ => 2,
    }
}

fn io_err(err: std::io::Error) -> RunError {
    RunError::Config(format!("io: {err}"))
}

fn load_config(args: &RunArgs) -> Result<Config, RunError> {
    let mut cfg = Config::from_path(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn dispatch(command: Command) -> Result<(), RunError> {
    match command {
        Command::Kernel {
            alpha,
            beta,
            n_modes,
            tail_tol,
            max_modes,
            t_min,
            t_max,
            points,
            out,
        } => {
            let params = match n_modes {
                None => KernelParams::with_auto_modes(alpha, beta, tail_tol, max_modes)?,
                Some(0) => KernelParams::markovian(alpha, beta)?,
                Some(n) => KernelParams::new(alpha, beta, n)?,
            };
            if !(t_min > 0.0 && t_min <= t_max) {
                return Err(RunError::Config(format!(
                    "time grid needs 0 < t_min <= t_max (got {t_min}, {t_max})"
                )));
            }
            let grid = runner::log_grid(t_min, t_max, points);
            let table = runner::kernel_table(&params, &grid)?;
            let csv = report::kernel_csv(&table);
            match out {
                Some(path) => {
                    std::fs::write(&path, csv).map_err(io_err)?;
                    eprintln!("wrote {} ({} modes)", path.display(), params.n_modes());
                }
                None => print!("{csv}"),
            }
            Ok(())
        }
        Command::Simulate(args) => {
            let started = Instant::now();
            let cfg = load_config(&args)?;
            let result = runner::run_single(&cfg)?;
            let csv = report::trajectory_csv(&result);
            let meta = Metadata {
                experiment: "simulate",
                seed: cfg.seed,
                n_modes: result.n_modes,
                aborted_total: 0,
                wall_time_seconds: started.elapsed().as_secs_f64(),
                notes: &result.notes,
                slope: None,
                config_echo: &cfg,
            };
            let (csv_path, _) =
                report::write_outputs(&args.out, "trajectory", &csv, &report::metadata_toml(&meta))
                    .map_err(io_err)?;
            println!("wrote {} ({} rows)", csv_path.display(), result.rows.len());
            Ok(())
        }
        Command::SmallMass(args) => {
            let started = Instant::now();
            let cfg = load_config(&args)?;
            let table = runner::run_small_mass_study(&cfg)?;
            finish_convergence(&args, &cfg, "small-mass", "mass", table, started)
        }
        Command::WhiteNoise(args) => {
            let started = Instant::now();
            let cfg = load_config(&args)?;
            let table = runner::run_white_noise_study(&cfg)?;
            finish_convergence(&args, &cfg, "white-noise", "epsilon", table, started)
        }
        Command::Msd(args) => {
            let started = Instant::now();
            let cfg = load_config(&args)?;
            let result = runner::run_msd_study(&cfg)?;
            let csv = report::msd_csv(&result.points);
            let meta = Metadata {
                experiment: "msd",
                seed: cfg.seed,
                n_modes: result.n_modes,
                aborted_total: result.aborted,
                wall_time_seconds: started.elapsed().as_secs_f64(),
                notes: &result.notes,
                slope: Some(SlopeMeta::from(&result)),
                config_echo: &cfg,
            };
            let (csv_path, meta_path) =
                report::write_outputs(&args.out, "msd", &csv, &report::metadata_toml(&meta))
                    .map_err(io_err)?;
            println!(
                "slope {:.4} +- {:.4} over [{}, {}] ({} points)",
                result.fit.slope,
                result.fit.std_error,
                result.window[0],
                result.window[1],
                result.fit.n_points
            );
            println!("wrote {} and {}", csv_path.display(), meta_path.display());
            Ok(())
        }
        Command::FdtCheck(args) => {
            let started = Instant::now();
            let cfg = load_config(&args)?;
            let result = runner::run_fdt_check(&cfg)?;
            let csv = report::fdt_csv(&result.rows);
            let meta = Metadata {
                experiment: "fdt-check",
                seed: cfg.seed,
                n_modes: result.n_modes,
                aborted_total: result.aborted,
                wall_time_seconds: started.elapsed().as_secs_f64(),
                notes: &result.notes,
                slope: None,
                config_echo: &cfg,
            };
            let (csv_path, _) =
                report::write_outputs(&args.out, "fdt", &csv, &report::metadata_toml(&meta))
                    .map_err(io_err)?;
            let worst =
                result.rows.iter().map(|r| r.z_score.abs()).fold(0.0f64, f64::max);
            println!("max |z| = {worst:.3} over {} lags", result.rows.len());
            println!("wrote {}", csv_path.display());
            Ok(())
        }
        Command::Validate { config } => {
            let cfg = Config::from_path(&config)?;
            let report = cfg.regime_report();
            println!("regime: {}", report.regime);
            println!("strong_summability: {}", report.strong_summability);
            if report.violations.is_empty() {
                println!("violations: (none)");
            } else {
                for v in &report.violations {
                    println!("violation: {v}");
                }
            }
            let params = cfg.kernel_params()?;
            println!("n_modes: {}", params.n_modes());
            if report.regime == Regime::Invalid {
                return Err(RunError::Config(format!(
                    "regime conditions violated: {}",
                    report.violations.join("; ")
                )));
            }
            Ok(())
        }
    }
}

fn finish_convergence(
    args: &RunArgs,
    cfg: &Config,
    experiment: &str,
    parameter: &str,
    table: runner::ConvergenceTable,
    started: Instant,
) -> Result<(), RunError> {
    let csv = report::convergence_csv(parameter, &table);
    let stem = experiment.replace('-', "_");
    let meta = Metadata {
        experiment,
        seed: cfg.seed,
        n_modes: table.n_modes,
        aborted_total: table.aborted_total,
        wall_time_seconds: started.elapsed().as_secs_f64(),
        notes: &table.notes,
        slope: None,
        config_echo: cfg,
    };
    let (csv_path, _) = report::write_outputs(&args.out, &stem, &csv, &report::metadata_toml(&meta))
        .map_err(io_err)?;
    for row in &table.rows {
        println!(
            "{parameter} = {:>9.3e}: median sup error {:.6e} (n = {}, aborted = {})",
            row.parameter, row.stats.median, row.stats.n, row.stats.aborted
        );
    }
    println!("wrote {}", csv_path.display());
    Ok(())
}
