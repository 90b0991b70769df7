use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::format::Format;

#[derive(Debug, Parser)]
#[command(name = "lommel", version, about = "Lommel functions, their zeros and Turan-type inequalities")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output format; defaults to the extension of --out, else pretty.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Output file; relative paths are placed under $LOMMEL_OUT_DIR when set.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads for grid evaluation.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,

    #[arg(long, global = true, value_enum)]
    pub precision: Option<PrecisionArg>,

    /// key=value file supplying defaults for these flags and the grid flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PrecisionArg {
    Working,
    Extended,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Series,
    Quadrature,
    ClosedForm,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate s_{mu,nu}(z), or phi_k(z) when --k is given.
    Eval(EvalArgs),
    /// Tabulate the positive zeros of phi_k.
    Zeros(ZerosArgs),
    /// Check an inequality or identity over a (mu, z) grid.
    Verify(VerifyArgs),
    /// Exploratory scans.
    #[command(subcommand)]
    Scan(ScanCommand),
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub mu: f64,
    /// Ignored for phi_k.
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.5)]
    pub nu: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub z: f64,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long, default_value_t = 0)]
    pub derivative: u8,
    #[arg(long, value_enum, default_value_t = MethodArg::Series)]
    pub method: MethodArg,
}

#[derive(Debug, Args)]
pub struct ZerosArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub mu: f64,
    #[arg(long, default_value_t = 0)]
    pub k: u32,
    #[arg(long, allow_negative_numbers = true)]
    pub zmax: f64,
    #[arg(long)]
    pub max_zeros: Option<usize>,
    #[arg(long)]
    pub scan_step: Option<f64>,
    /// Also tabulate phi_j for this j and check that the zeros interlace.
    #[arg(long)]
    pub interlace_with: Option<u32>,
}

#[derive(Debug, Args, Default)]
pub struct GridArgs {
    /// lo:hi
    #[arg(long, allow_hyphen_values = true)]
    pub mu_range: Option<String>,
    #[arg(long)]
    pub mu_step: Option<f64>,
    /// lo:hi
    #[arg(long, allow_hyphen_values = true)]
    pub z_range: Option<String>,
    #[arg(long)]
    pub z_step: Option<f64>,
    #[arg(long)]
    pub refine_depth: Option<u32>,
    /// Smallest tolerance used to certify a sign.
    #[arg(long)]
    pub sign_tolerance: Option<f64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// turan1, turan-delta, ineq-varphi0, ineq-varphi1, eq5, eq7, laguerre,
    /// ratio-monotone, steinig, eta-identity, wronskian-identity,
    /// wronskian-identity-12
    pub tag: String,
    /// Index of phi_k for laguerre.
    #[arg(long, default_value_t = 0)]
    pub k: u32,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Subcommand)]
pub enum ScanCommand {
    /// Sign of the Turan margin for mu above -1/2.
    Conjecture {
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Bracket the sign changes of one function of z.
    SignChanges {
        #[arg(long, value_enum, default_value_t = TargetArg::Eta)]
        target: TargetArg,
        #[arg(long, allow_negative_numbers = true)]
        mu: Option<f64>,
        #[arg(long, default_value_t = 0)]
        k: u32,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Sign of the Turan margin before the first zero of the window function.
    Reversed {
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
        /// Compute the window zero.
        #[arg(long, conflicts_with = "zeros")]
        auto_window: bool,
        /// JSON zero table written by `lommel zeros --format json`.
        #[arg(long)]
        zeros: Option<PathBuf>,
        #[command(flatten)]
        grid: GridArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    Eta,
    /// Delta_mu, mu defaults to 3/2.
    Delta,
    Lommel,
    Phi,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_values_parse() {
        let c = Cli::try_parse_from(["lommel", "eval", "--mu", "-1.5", "--z", "1"]).unwrap();
        match c.command {
            Command::Eval(a) => assert_eq!(a.mu, -1.5),
            _ => panic!(),
        }
        let c = Cli::try_parse_from(["lommel", "verify", "turan1", "--mu-range", "-2.4:-0.6", "--threads", "2"]).unwrap();
        assert_eq!(c.common.threads, Some(2));
        match c.command {
            Command::Verify(v) => assert_eq!(v.grid.mu_range.as_deref(), Some("-2.4:-0.6")),
            _ => panic!(),
        }
    }

    #[test]
    fn rejects_zero_threads() {
        assert!(Cli::try_parse_from(["lommel", "--threads", "0", "verify", "turan1"]).is_err());
    }

    #[test]
    fn definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
