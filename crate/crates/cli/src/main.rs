//! `nrloop`: scenario runs, parameter sweeps and single-shot reports for the
//! three-mode nonreciprocal loop and its two-mode squeezer baseline.

mod commands;
mod config;
mod metrics;
mod output;
mod sweep;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nrloop::gaussian::LogBase;

use config::{parse_angle, parse_list, Format};
use metrics::Metric;

/// Failure with the process exit code it maps to: 1 at runtime, 2 for bad usage.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<nrloop::Error> for CliError {
    fn from(e: nrloop::Error) -> Self {
        match e {
            nrloop::Error::InvalidParameter { .. } | nrloop::Error::Domain(_) => Self::usage(e.to_string()),
            _ => Self::runtime(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "nrloop", version, about = "Nonreciprocal three-mode loop: entanglement, purity, nonreciprocity and stability")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Parameter overrides; anything left unset keeps the config (or default) value.
#[derive(Args, Debug, Clone, Default)]
struct ParamArgs {
    /// Cooperativity C12 (default: C13 * C23)
    #[arg(long)]
    c12: Option<f64>,
    #[arg(long)]
    c13: Option<f64>,
    #[arg(long)]
    c23: Option<f64>,
    /// Loop phase in radians; accepts forms like `pi/2` or `-3pi/4`
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    phi: Option<f64>,
    /// Loop phase in degrees
    #[arg(long, conflicts_with = "phi", allow_hyphen_values = true)]
    phi_deg: Option<f64>,
    /// Detuning from resonance, in units of kappa_1
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<f64>,
    /// Total linewidths k1,k2,k3
    #[arg(long, value_parser = parse_list::<3>)]
    kappa: Option<[f64; 3]>,
    /// Internal-loss ratios kint_j/k_j
    #[arg(long, value_parser = parse_list::<3>)]
    loss: Option<[f64; 3]>,
    /// Bath occupations n1,n2,n3
    #[arg(long, value_parser = parse_list::<3>)]
    n_th: Option<[f64; 3]>,
    /// Internal-bath occupations (default: same as --n-th)
    #[arg(long, value_parser = parse_list::<3>)]
    n_th_int: Option<[f64; 3]>,
}

#[derive(Args, Debug, Clone, Default)]
struct OutputArgs {
    /// Scenario config (JSON); flags override its fields. `-` reads stdin.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated metric names
    #[arg(long, value_delimiter = ',', value_parser = Metric::parse)]
    metrics: Option<Vec<Metric>>,
    #[arg(long, value_parser = ["e", "2"])]
    log_base: Option<String>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args, Debug, Clone, Default)]
struct RangeArgs {
    #[arg(long, allow_hyphen_values = true)]
    from: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    to: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the scenario in a config file, including any sweeps it declares
    Run {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Sweep the loop phase (default -pi..pi, 73 points)
    SweepPhase {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        out: OutputArgs,
        #[command(flatten)]
        range: RangeArgs,
    },
    /// Sweep one bath occupation (default n1 over 0..20, 21 points), with the TMS baseline
    SweepThermal {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        out: OutputArgs,
        #[command(flatten)]
        range: RangeArgs,
        /// Which mode's bath to heat
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
        mode: u8,
    },
    /// Grid over the internal-loss ratios of modes 1 and 3 (default 0..0.5, 6 points each)
    SweepLoss {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        out: OutputArgs,
        #[command(flatten)]
        range: RangeArgs,
    },
    /// Sweep the detuning (default -3..3, 61 points)
    SweepFreq {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        out: OutputArgs,
        #[command(flatten)]
        range: RangeArgs,
    },
    /// Polar-decompose the resonant scattering matrix and compare with the predicted circuit
    Decompose {
        #[command(flatten)]
        params: ParamArgs,
        /// left, right, both, or auto (the sides a factorisation is predicted for)
        #[arg(long, default_value = "auto")]
        side: String,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Routh-Hurwitz conditions and the drift spectrum
    Stability {
        #[command(flatten)]
        params: ParamArgs,
        /// Instead, cross-check the conditions against the spectrum on N random points
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Pump frequencies, spurious-process margin, RWA check and pump amplitudes
    PlanPumps {
        /// Mode frequencies w1,w2,w3
        #[arg(long, value_parser = parse_list::<3>)]
        modes: [f64; 3],
        /// Couplings g12,g13,g23 for the RWA check, same units as --modes
        #[arg(long, value_parser = parse_list::<3>)]
        couplings: Option<[f64; 3]>,
        #[arg(long, default_value_t = nrloop::pumpplan::DEFAULT_RWA_RATIO)]
        rwa_ratio: f64,
        /// Three-wave mixing strength; enables the pump-amplitude rows
        #[arg(long)]
        c123: Option<f64>,
        /// Pump phases p1,p2,p3 in radians
        #[arg(long, value_parser = parse_list::<3>, allow_hyphen_values = true)]
        pump_phases: Option<[f64; 3]>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Entanglement produced by swapping between two matched loops
    Swap {
        #[arg(long)]
        ca: f64,
        #[arg(long)]
        cb: f64,
        #[arg(long, value_parser = ["e", "2"], default_value = "e")]
        log_base: String,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

fn log_base(s: &str) -> LogBase {
    s.parse().expect("restricted by clap")
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("NRLOOP_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::usage(format!("NRLOOP_THREADS={raw:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::runtime(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| commands::dispatch(cli.command)) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("nrloop: error: {e}");
            ExitCode::from(e.code)
        }
    }
}
