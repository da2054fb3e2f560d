use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ztransform::{BigUint, DEFAULT_BUDGET};

#[derive(Debug, Parser)]
#[command(
    name = "ztransform",
    version,
    about = "Trajectories, limit cycles and sweeps of the k-adic Z transformation"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Plain)]
    pub format: Format,

    /// Maximum number of Z applications per start value.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: u64,

    /// Worker threads for range and grid commands (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,

    /// Append completed chunks here and skip chunks already recorded.
    #[arg(long, global = true)]
    pub checkpoint: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the orbit of one start value.
    Trajectory {
        /// Start value, any number of decimal digits.
        #[arg(long)]
        n: BigUint,
        #[command(flatten)]
        kp: KpArgs,
    },
    /// Evaluate the parameter assumptions; exit status 0 when they hold.
    CheckParams {
        #[command(flatten)]
        kp: KpArgs,
    },
    /// Check that every start in a range ends on the cycle [1, 2].
    Verify {
        #[command(flatten)]
        kp: KpArgs,
        #[arg(long = "from")]
        from: u128,
        #[arg(long = "to")]
        to: u128,
    },
    /// List the limit cycles reached from 1..=n-max.
    Limits {
        #[command(flatten)]
        kp: KpArgs,
        #[arg(long = "n-max", value_parser = clap::value_parser!(u128))]
        n_max: u128,
    },
    /// Sweep a grid of (k, p) pairs over starts 1..=n-max.
    Sweep {
        /// Radix range, inclusive: `a..b` or a single value.
        #[arg(long)]
        k: SpanArg,
        /// Modulus range, inclusive: `a..b` or a single value.
        #[arg(long)]
        p: SpanArg,
        #[arg(long = "n-max")]
        n_max: u128,
    },
}

#[derive(Debug, Clone, Copy, Args)]
pub struct KpArgs {
    /// Radix.
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    pub k: u32,
    /// Modulus of the digit map.
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    pub p: u32,
}

/// Inclusive `a..b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpanArg {
    pub lo: u32,
    pub hi: u32,
}

impl SpanArg {
    pub fn range(self) -> RangeInclusive<u32> {
        self.lo..=self.hi
    }
}

impl FromStr for SpanArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| format!("`{t}` is not a nonnegative integer"))
        };
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.strip_prefix('=').unwrap_or(b))?),
            None => {
                let v = parse(s)?;
                (v, v)
            }
        };
        if lo > hi {
            return Err(format!("empty range {s}"));
        }
        if lo < 2 {
            return Err(format!("range {s} starts below 2"));
        }
        Ok(Self { lo, hi })
    }
}
