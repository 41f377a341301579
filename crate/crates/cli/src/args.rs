use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, Parser)]
#[command(name = "shp", version, about = "Relativistic spin, covariant Dirac algebra and unequal-time interference")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Seed for randomized suites (overrides the config).
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Sample count: random draws for `verify`, grid points for `interference`, steps for `evolve`.
    #[arg(long, global = true, value_name = "N")]
    pub samples: Option<usize>,
    /// Write the primary output here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Run the identity suites; exit 1 if any identity fails.
    Verify {
        /// Replace every identity tolerance.
        #[arg(long)]
        tolerance: Option<f64>,
        /// Run a single suite.
        #[arg(long)]
        suite: Option<String>,
    },
    /// Wigner rotation `D(B1 B2, n)` of a product of two boosts.
    Wigner {
        #[arg(long, allow_hyphen_values = true)]
        boost1: Option<f64>,
        /// Axis of the first boost, `x,y,z`.
        #[arg(long, allow_hyphen_values = true)]
        axis1: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        boost2: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        axis2: Option<String>,
        /// Foliation vector `t,x,y,z`.
        #[arg(long, allow_hyphen_values = true)]
        n: Option<String>,
    },
    /// Coincidence probability scan over the detection-time difference.
    Interference,
    /// Classical trajectory or free packet evolution.
    Evolve {
        #[arg(long, value_enum)]
        mode: Option<EvolveMode>,
    },
    /// Physical constants and unit conversions.
    Constants,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvolveMode {
    Classical,
    Quantum,
}

impl std::str::FromStr for EvolveMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Self as ValueEnum>::from_str(s, false)
    }
}
