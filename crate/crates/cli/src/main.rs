//! `finsler`: curvature tables, geodesic traces, projective parameters,
//! oscillation reports, pseudo-distance estimates and the invariant suite.

mod commands;
mod config;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::CliError;

#[derive(Parser, Debug)]
#[command(name = "finsler", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct Common {
    /// Built-in metric name, inline JSON descriptor or path to a JSON file
    #[arg(long, default_value = "euclidean")]
    pub metric: String,
    /// Dimension used with a bare metric name
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Output file; stdout when absent
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct Trace {
    /// Start point, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub point: Option<Vec<f64>>,
    /// Initial direction, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub direction: Option<Vec<f64>>,
    /// Arc length forward of the start point
    #[arg(long, default_value_t = 5.0)]
    pub s_max: f64,
    /// Arc length backward of the start point
    #[arg(long, default_value_t = 0.0)]
    pub s_back: f64,
    #[arg(long, default_value_t = finsler_core::geodesic::DEFAULT_STEP)]
    pub step: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ricci curvature and Berwald defects at tangent samples
    Curvature {
        #[command(flatten)]
        common: Common,
        /// Number of random samples when no point is given
        #[arg(long, default_value_t = 10)]
        points: usize,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        point: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        direction: Option<Vec<f64>>,
        /// Compare the spray of sqrt(-Ric) with the spray of the metric
        #[arg(long)]
        theorem3: bool,
    },
    /// Unit-speed geodesic with Q samples
    Geodesic {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        trace: Trace,
    },
    /// Projective parameter, its Schwarzian and poles along a geodesic
    Projparam {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        trace: Trace,
        /// Arc length where the canonical pair is anchored
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        anchor: f64,
    },
    /// Oscillation verdicts and interval cover along a geodesic
    Oscillation {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        trace: Trace,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        anchor: f64,
        /// Classification window `a,b`; chosen automatically when absent
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        window: Option<Vec<f64>>,
    },
    /// Upper bounds for the pseudo-distance in both directions
    Pseudodist {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        from: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        to: Vec<f64>,
        #[command(flatten)]
        budget: Budget,
    },
    /// Invariant suite on one metric or the whole zoo
    Verify {
        #[command(flatten)]
        common: Common,
        /// Run on the built-in zoo instead of --metric
        #[arg(long)]
        zoo: bool,
    },
}

#[derive(Args, Debug)]
pub struct Budget {
    #[arg(long)]
    pub extension: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub n_max: Option<u64>,
    /// Midpoint offsets per side for two-piece chains
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub split_depth: Option<u32>,
    /// Funk normalisation constant
    #[arg(long)]
    pub k: Option<f64>,
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Curvature { common, points, point, direction, theorem3 } => {
            commands::curvature(&common, points, point, direction, theorem3)
        }
        Command::Geodesic { common, trace } => commands::geodesic(&common, &trace),
        Command::Projparam { common, trace, anchor } => commands::projparam(&common, &trace, anchor),
        Command::Oscillation { common, trace, anchor, window } => commands::oscillation(&common, &trace, anchor, window),
        Command::Pseudodist { common, from, to, budget } => commands::pseudodist(&common, &from, &to, &budget),
        Command::Verify { common, zoo } => commands::verify(&common, zoo),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
