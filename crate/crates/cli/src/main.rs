//! `hotqubit`: coherence models, trace fitting and design sweeps from the
//! command line.

mod commands;
mod config;
mod error;
mod io;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::{JunctionArgs, PopulationInput};
use crate::config::RunConfig;
use crate::error::CliError;

/// Environment variable holding the worker thread count.
const THREADS_ENV: &str = "HOTQUBIT_THREADS";

#[derive(Parser, Debug)]
#[command(name = "hotqubit", version, about)]
struct Cli {
    /// TOML configuration file.
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set device.chi_2pi_hz=3e6`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(short, long, global = true)]
    output_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit a trace CSV and write fit.json and fit_curve.csv.
    Fit {
        trace: PathBuf,
        /// decay, ramsey, echo or rabi_amplitude; overrides the file header.
        #[arg(long)]
        kind: Option<String>,
    },
    /// Tabulate T1, T2, Γφ and n_th over temperature.
    Thermal {
        /// Comma-separated temperatures in K.
        #[arg(long, value_delimiter = ',')]
        temps: Option<Vec<f64>>,
        /// Use a fixed T1 (s) in the T2 composition.
        #[arg(long)]
        t1_fixed: Option<f64>,
        /// Measured (T, T1, T2) CSV to compare against the model.
        #[arg(long)]
        overlay: Option<PathBuf>,
        /// Refine T1,0 and T2,0 against the overlay data.
        #[arg(long, requires = "overlay")]
        refine: bool,
    },
    /// Rabi chevron matrix and π-pulse contours.
    Chevron {
        #[arg(long)]
        n_trunc: Option<f64>,
    },
    /// Best-case T2 over a frequency × temperature grid.
    Sweep {
        /// T2 threshold (s) for the maximum operating temperature per column.
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Junction design estimate and optional Jc fits.
    Junction(JunctionCmd),
    /// Excited-state population to effective temperature.
    Population(PopulationCmd),
    /// Write a synthetic trace CSV.
    Synth {
        #[arg(short = 'O', long)]
        out: PathBuf,
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        noise: Option<f64>,
    },
}

#[derive(Args, Debug)]
struct JunctionCmd {
    /// CSV of (area_um2, rn_ohm).
    #[arg(long)]
    resistance: Option<PathBuf>,
    /// CSV of (exposure, jc_a_per_cm2).
    #[arg(long)]
    exposure: Option<PathBuf>,
    /// Hold |exponent| fixed in the exposure fit.
    #[arg(long, requires = "exposure")]
    fixed_exponent: Option<f64>,
    /// Measured T1 (s) for the quality factor 2π·f_ge·T1.
    #[arg(long)]
    t1: Option<f64>,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = true)]
struct PopulationCmd {
    #[arg(long, conflicts_with_all = ["a_idle", "a_swapped"])]
    pe: Option<f64>,
    #[arg(long, requires = "a_swapped")]
    a_idle: Option<f64>,
    #[arg(long, requires = "a_idle")]
    a_swapped: Option<f64>,
    /// Qubit frequency, Hz; defaults to device.f_ge_hz.
    #[arg(long)]
    f_q: Option<f64>,
}

fn flag<T: std::fmt::Display>(out: &mut Vec<String>, key: &str, v: &Option<T>) {
    if let Some(v) = v {
        out.push(format!("{key}={v}"));
    }
}

fn toml_str(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

fn run(cli: Cli) -> Result<PathBuf, CliError> {
    let mut overrides = cli.overrides.clone();
    flag(&mut overrides, "seed", &cli.seed);
    if let Some(d) = &cli.output_dir {
        overrides.push(format!("output_dir={}", toml_str(&d.to_string_lossy())));
    }
    match &cli.command {
        Command::Fit { kind, .. } => {
            flag(&mut overrides, "fit.kind", &kind.as_deref().map(toml_str))
        }
        Command::Thermal {
            temps, t1_fixed, ..
        } => {
            if let Some(t) = temps {
                let list: Vec<String> = t.iter().map(|v| format!("{v:?}")).collect();
                overrides.push(format!("thermal.temperatures_k=[{}]", list.join(",")));
            }
            flag(
                &mut overrides,
                "thermal.t1_fixed_s",
                &t1_fixed.map(|v| format!("{v:?}")),
            );
        }
        Command::Chevron { n_trunc } => flag(
            &mut overrides,
            "pulse.n_trunc",
            &n_trunc.map(|v| format!("{v:?}")),
        ),
        Command::Sweep { threshold } => flag(
            &mut overrides,
            "sweep.threshold_s",
            &threshold.map(|v| format!("{v:?}")),
        ),
        Command::Synth {
            kind,
            points,
            noise,
            ..
        } => {
            flag(&mut overrides, "synth.kind", &kind.as_deref().map(toml_str));
            flag(&mut overrides, "synth.points", points);
            flag(
                &mut overrides,
                "synth.noise",
                &noise.map(|v| format!("{v:?}")),
            );
        }
        Command::Junction(_) | Command::Population(_) => {}
    }
    let cfg = RunConfig::load(cli.config.as_deref(), &overrides)?;

    match &cli.command {
        Command::Fit { trace, .. } => commands::fit(&cfg, trace),
        Command::Thermal {
            overlay, refine, ..
        } => commands::thermal(&cfg, overlay.as_deref(), *refine),
        Command::Chevron { .. } => commands::chevron(&cfg),
        Command::Sweep { .. } => commands::sweep(&cfg),
        Command::Junction(j) => commands::junction(
            &cfg,
            &JunctionArgs {
                resistance: j.resistance.as_deref(),
                exposure: j.exposure.as_deref(),
                fixed_exponent: j.fixed_exponent,
                t1_s: j.t1,
            },
        ),
        Command::Population(p) => {
            let input = match (p.pe, p.a_idle, p.a_swapped) {
                (Some(pe), _, _) => PopulationInput::Direct(pe),
                (None, Some(idle), Some(swapped)) => PopulationInput::Amplitudes { idle, swapped },
                _ => return Err(CliError::input("population: pass --pe or both amplitudes")),
            };
            commands::population(&cfg, input, p.f_q)
        }
        Command::Synth { out, .. } => commands::synth(&cfg, out),
    }
}

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::input(format!("{THREADS_ENV}={raw:?} is not a thread count")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::input(format!("{THREADS_ENV}: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match init_threads().and_then(|()| run(cli)) {
        Ok(path) => {
            println!("{}", path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("hotqubit: {e}");
            ExitCode::from(e.code() as u8)
        }
    }
}
