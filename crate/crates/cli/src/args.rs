use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "qfc", version, about = "QFI-based quantum correlations of bipartite states")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Base seed for optimizer restarts.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Optimizer restarts per quantity.
    #[arg(long, global = true, default_value_t = 16)]
    pub restarts: usize,

    /// Nelder–Mead iteration cap per restart.
    #[arg(long = "max-iterations", global = true, default_value_t = 2000)]
    pub max_iterations: usize,

    /// Optimizer objective tolerance.
    #[arg(long = "tol", global = true, default_value_t = 1e-6)]
    pub tolerance: f64,

    /// Output format; `sweep` defaults to csv, everything else to table.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Logarithm base for displayed entropic quantities.
    #[arg(long = "log-base", global = true, value_enum, default_value_t = LogBase::E)]
    pub log_base: LogBase,

    /// Lift the M·N ≤ 36 dimension guard.
    #[arg(long = "allow-large", global = true)]
    pub allow_large: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LogBase {
    #[value(name = "e")]
    E,
    #[value(name = "2")]
    Two,
}

impl LogBase {
    pub fn scale(self) -> f64 {
        match self {
            LogBase::E => 1.0,
            LogBase::Two => 1.0 / std::f64::consts::LN_2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LogBase::E => "e",
            LogBase::Two => "2",
        }
    }
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct StateArgs {
    /// JSON state specification file.
    #[arg(long)]
    pub state: Option<PathBuf>,

    /// Inline JSON state specification.
    #[arg(long = "state-json")]
    pub state_json: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// QFI, variance and SLD residual of one observable.
    Qfi {
        #[command(flatten)]
        state: StateArgs,
        /// Observable as inline JSON or a path to a JSON file.
        #[arg(long)]
        observable: String,
    },
    /// Minimal local-projector QFI sum on party a.
    Qah {
        #[command(flatten)]
        state: StateArgs,
    },
    /// Total local QFI on b minus the best measurement-induced Fisher information.
    Qapi {
        #[command(flatten)]
        state: StateArgs,
    },
    /// Entropic and geometric discord.
    Discord {
        #[command(flatten)]
        state: StateArgs,
    },
    /// Evaluate all quantifiers over a grid of one state parameter.
    Sweep {
        #[command(flatten)]
        state: StateArgs,
        /// Parameter to vary: s (two-term Schmidt weight), w (Werner weight) or noise.
        #[arg(long, value_parser = ["s", "w", "noise"])]
        param: String,
        #[arg(long, requires_all = ["to", "step"], conflicts_with = "values", allow_hyphen_values = true)]
        from: Option<f64>,
        #[arg(long, requires = "from", allow_hyphen_values = true)]
        to: Option<f64>,
        #[arg(long, requires = "from")]
        step: Option<f64>,
        /// Explicit comma-separated grid.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        values: Option<Vec<f64>>,
    },
    /// Run the acceptance suite.
    Verify {
        /// Run only these criteria (repeatable).
        #[arg(long = "criterion")]
        criteria: Vec<u8>,
    },
}
