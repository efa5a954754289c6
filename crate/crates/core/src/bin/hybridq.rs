use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hybridq::check::run_checks;
use hybridq::config::{Experiment, RunConfig};
use hybridq::output::{metadata_path, write_metadata, write_series, Series};
use hybridq::protocols::{run_cooling, run_ensemble};
use hybridq::Error;

const EXIT_VALIDATION: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_CHECK: u8 = 3;

/// Two q-bits coupled to a classical harmonic oscillator.
#[derive(Debug, Parser)]
#[command(name = "hybridq", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Override a configuration key, e.g. --set model.beta=0.16 (repeatable).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    /// Output CSV path; metadata goes next to it as <stem>.meta.toml.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// RNG seed for ensembles.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for ensembles (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Integrate a single trajectory.
    Simulate,
    /// Average many trajectories with Gaussian classical initial conditions.
    Ensemble,
    /// Run with a Gaussian coupling pulse and report the quantum energy change.
    Cool,
    /// Integrate a single trajectory with the configured perturbation.
    Perturb,
    /// Measure the conserved quantities and bracket identities.
    Check,
}

impl Command {
    fn experiment(self) -> Experiment {
        match self {
            Command::Simulate => Experiment::Simulate,
            Command::Ensemble => Experiment::Ensemble,
            Command::Cool => Experiment::Cool,
            Command::Perturb => Experiment::Perturb,
            Command::Check => Experiment::Check,
        }
    }
}

fn resolve(cli: &Cli) -> hybridq::Result<RunConfig> {
    let mut config = RunConfig::load(cli.config.as_deref(), &cli.overrides)?.with_experiment(cli.command.experiment())?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.out = Some(out.clone());
    }
    if config.out.is_none() && config.experiment != Experiment::Check {
        config.out = Some(PathBuf::from(format!("{}.csv", config.experiment)));
    }
    Ok(config)
}

fn run(cli: &Cli) -> hybridq::Result<bool> {
    let config = resolve(cli)?;
    for w in &config.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Config("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("cannot set up {n} threads: {e}")))?;
    }

    let c = config.controls;
    let out = config.out.clone();
    let mut notes = Vec::new();
    match config.experiment {
        Experiment::Check => {
            let report = run_checks(&config)?;
            println!("{report}");
            return Ok(report.passed());
        }
        Experiment::Simulate | Experiment::Perturb => {
            let traj = config.system().integrate(&config.initial_state(), c.t_max, c.dt, c.stride)?;
            let path = out.expect("resolved output path");
            write_series(Series::Trajectory(&traj), &path)?;
            println!("wrote {} samples to {}", traj.len(), path.display());
        }
        Experiment::Cool => {
            let run = run_cooling(&config.initial_state(), &config.params, &config.schedule, c.t_max, c.dt, c.stride)?;
            let path = out.expect("resolved output path");
            write_series(Series::Trajectory(&run.trajectory), &path)?;
            notes.push(format!("pulse window = [{}, {}]", run.window.0, run.window.1));
            match run.delta_e_qm {
                Some(d) => {
                    notes.push(format!("delta_e_qm = {d:.16e}"));
                    println!("delta e_qm across the pulse window: {d:.6e}");
                }
                None => println!("run does not bracket the pulse window; delta e_qm not reported"),
            }
            println!("wrote {} samples to {}", run.trajectory.len(), path.display());
        }
        Experiment::Ensemble => {
            let result = run_ensemble(&config.ensemble_spec()?)?;
            let path = out.expect("resolved output path");
            write_series(Series::Ensemble(&result), &path)?;
            notes.push("trajectory i draws (x0, p0) from ChaCha8 stream i keyed by seed".into());
            println!(
                "wrote {} samples of a {}-trajectory ensemble to {}",
                result.len(),
                result.initial_conditions.len(),
                path.display()
            );
        }
    }
    let path = config.out.as_ref().expect("resolved output path");
    write_metadata(&config, &metadata_path(path), &notes)?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CHECK),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_VALIDATION })
        }
    }
}
