//! Library half of the `otterlab` command: argument definitions, command
//! implementations, output rendering and the table cache.

pub mod cache;
pub mod commands;
pub mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::{run, CliError};
pub use output::Format;

#[derive(Debug, Parser)]
#[command(name = "otterlab", version, about = "Exact and asymptotic statistics of Otter trees")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,

    /// Prefix output with the generation time (off by default so output is
    /// reproducible).
    #[arg(long, global = true)]
    pub timestamp: bool,

    /// Neither read nor write the table cache.
    #[arg(long, global = true)]
    pub no_cache: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact counts for n = 1..N, one per line.
    Seq {
        #[arg(value_enum)]
        family: Family,
        #[arg(long)]
        n_max: usize,
        #[arg(long)]
        allow_large: bool,
    },
    /// Exact distribution of the height of a uniform rooted tree of size N.
    HeightDist(DistArgs),
    /// Exact distribution of the diameter of a uniform unrooted tree of size N.
    DiameterDist(DistArgs),
    /// Certified values of rho and lambda.
    Constants {
        #[arg(long, default_value_t = 10)]
        digits: usize,
    },
    /// Large-deviation rate I(x) on a grid a:b:step.
    RateFunction {
        #[arg(long)]
        x_grid: String,
    },
    /// Compare exact values with their approximations on the real axis.
    Validate {
        #[command(subcommand)]
        which: ValidateCmd,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Rooted,
    Unrooted,
    OddDiameter,
    EvenDiameter,
}

#[derive(Debug, Args)]
pub struct DistArgs {
    #[arg(long)]
    pub n: usize,
    /// Print the r-th exact moment against its limit instead of the table.
    #[arg(long)]
    pub moment: Option<u32>,
    /// Add limit-law columns next to the exact ones.
    #[arg(long)]
    pub compare_limit: bool,
    /// Lift the size limit on exact tables.
    #[arg(long)]
    pub allow_large: bool,
}

#[derive(Debug, Subcommand)]
pub enum ValidateCmd {
    /// e_h against 2(1-y)y^h/(1-y^h). Grid like "rho:50,100,200;0.3:5,10".
    Eh {
        #[arg(long)]
        grid: String,
    },
    /// u_d against 2(1-y)^4 y^d/(1-y^{d/2})^4. Grid like "0.4:10,20,30".
    Ud {
        #[arg(long)]
        grid: String,
        /// Truncation order of the exact diameter series.
        #[arg(long, default_value_t = 400)]
        n_max: usize,
        #[arg(long)]
        allow_large: bool,
    },
}
