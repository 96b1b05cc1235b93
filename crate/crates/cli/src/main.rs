//! `hypercut`: every verification of the toolkit as a subcommand.
//!
//! Exit status: 0 when all requested checks pass, 1 when a check fails,
//! 2 on invalid input or any other error.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use output::{error_envelope, Format};

#[derive(Debug, Parser)]
#[command(name = "hypercut", version, about = "Exact checks of balanced cut properties of hypergraphs")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seed for every random choice (sampling, random cuts and sets).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Allowed deviation in standard deviations for the statistical checks.
    #[arg(long, global = true, default_value = "3")]
    pub tolerance: String,
    /// Worker thread cap (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact rank of the partition-intersection matrix A(t,k,v).
    Rank {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        k: usize,
        /// Block sizes, comma separated, summing to t.
        #[arg(long, value_delimiter = ',', required = true)]
        v: Vec<usize>,
    },
    /// Eigenvalues and multiplicities of the balanced Gram matrix.
    Spectrum {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        k: usize,
    },
    /// Closed-form count of good functions Z_j -> Z_k, optionally brute forced.
    Goodfn {
        #[arg(long)]
        j: usize,
        #[arg(long)]
        k: usize,
        /// Also enumerate all k^j functions (at most 10^7).
        #[arg(long)]
        brute: bool,
    },
    /// Sample a random hypergraph into a file.
    #[command(subcommand)]
    Sample(SampleCommand),
    /// Run a verification suite.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Solve the balanced cut system exactly and dump its solution space.
    Solve {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        p: String,
        /// Write the particular solution here (vector format).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also test whether this vector file solves the system.
        #[arg(long)]
        check: Option<PathBuf>,
    },
    /// Cut distance between two weighted graphs on the same vertex set.
    Cutnorm {
        #[arg(long)]
        g1: PathBuf,
        #[arg(long)]
        g2: PathBuf,
        /// Use the randomised lower bound even when exhaustive search fits.
        #[arg(long)]
        heuristic: bool,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
    },
    /// Quotient (blow-up of part densities) of a graph over an equipartition.
    Quotient {
        #[arg(long)]
        graph: PathBuf,
        /// Number of consecutive equal parts.
        #[arg(long)]
        parts: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Crossing densities of a hypergraph over a consecutive equipartition.
    Density {
        #[arg(long = "in")]
        input: PathBuf,
        /// Number of consecutive equal parts.
        #[arg(long)]
        t: usize,
        /// Density parameter for the vector header and the balanced-system check.
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum SampleCommand {
    /// Every k-set is an edge independently with probability p.
    Gnp(SampleArgs),
    /// Planted halves A, B: a k-set with j vertices in A is an edge with
    /// probability 2pj/k.
    Ckp {
        #[command(flatten)]
        args: SampleArgs,
        /// Choose A by a seeded random permutation instead of {1..n/2}.
        #[arg(long)]
        shuffle: bool,
    },
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub p: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VarianceChoice {
    /// Planted model when the file records A, uniform otherwise.
    Auto,
    Uniform,
    Planted,
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// Type-z crossing density equals p for random type vectors.
    Identity {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value = "1/4")]
        p: String,
    },
    /// Solutions of the balanced system are the affine hull of u and the v(A).
    Structure {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        p: String,
    },
    /// Random cuts of shape alpha carry weight p e_k(alpha n) within tolerance.
    Cuts {
        #[arg(long = "in")]
        input: PathBuf,
        /// Class proportions, comma separated; alpha_i n is rounded by largest remainder.
        #[arg(long, value_delimiter = ',', required = true)]
        alpha: Vec<String>,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Edge probability (default: the `# p:` line of the file).
        #[arg(long)]
        p: Option<String>,
        #[arg(long, value_enum, default_value_t = VarianceChoice::Auto)]
        variance: VarianceChoice,
    },
    /// Vertex sets U carry weight p C(|U|,k) within tolerance.
    D1 {
        #[arg(long = "in")]
        input: PathBuf,
        /// An explicit vertex set (1-based, comma separated).
        #[arg(long, value_delimiter = ',')]
        set: Vec<usize>,
        /// Sizes of random vertex sets to test.
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        /// Random sets per size.
        #[arg(long, default_value_t = 10)]
        trials: usize,
        /// Edge probability (default: the `# p:` line of the file).
        #[arg(long)]
        p: Option<String>,
        #[arg(long, value_enum, default_value_t = VarianceChoice::Auto)]
        variance: VarianceChoice,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: cannot set thread count: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli) {
        Ok(envelope) => {
            print!("{}", envelope.render(cli.format));
            if envelope.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            let name = commands::name(&cli.command);
            if cli.format == Format::Json {
                eprintln!("{}", error_envelope(&name, &format!("{e:#}")));
            } else {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(2)
        }
    }
}
