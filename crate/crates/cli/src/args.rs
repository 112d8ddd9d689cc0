use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "permstat", version, about = "Permutation statistics, their shuffle algebras and bicompatibility search")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Build, save and evaluate statistic tables
    #[command(subcommand)]
    Stat(StatCmd),
    /// Shuffle and substring compatibility checks
    #[command(subcommand)]
    Check(CheckCmd),
    /// Products, coproducts and antipodes of statistic classes
    #[command(subcommand)]
    Algebra(AlgebraCmd),
    /// Quasisymmetric polynomial model of the Des algebra
    #[command(subcommand)]
    Qsym(QsymCmd),
    /// Extension search, viability filtering and CNF export
    #[command(subcommand)]
    Search(SearchCmd),
    /// Fixed recipes for the computational results
    #[command(subcommand)]
    Reproduce(ReproduceCmd),
}

#[derive(Subcommand)]
pub enum StatCmd {
    /// Write a statistic table to a JSON file
    Build {
        #[arg(long)]
        stat: String,
        /// Largest permutation length in the table
        #[arg(long)]
        max: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Class of each permutation under a statistic
    Eval {
        #[arg(long)]
        stat: String,
        /// Permutations, comma-separated or as digit strings
        #[arg(required = true)]
        perms: Vec<String>,
    },
}

#[derive(Subcommand)]
pub enum CheckCmd {
    Shuffle {
        #[arg(long)]
        stat: String,
        #[arg(long, default_value = "strong")]
        mode: String,
        #[arg(long, default_value_t = 6)]
        upto: usize,
    },
    Substring {
        #[arg(long)]
        stat: String,
        #[arg(long, default_value_t = 6)]
        upto: usize,
    },
    /// Shuffle compatibility in the given mode together with substring compatibility
    Bicompat {
        #[arg(long)]
        stat: String,
        #[arg(long, default_value = "strong")]
        mode: String,
        #[arg(long, default_value_t = 6)]
        upto: usize,
    },
}

#[derive(Subcommand)]
pub enum AlgebraCmd {
    Product {
        #[arg(long)]
        stat: String,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    Coproduct {
        #[arg(long)]
        stat: String,
        #[arg(long)]
        a: String,
    },
    Antipode {
        #[arg(long)]
        stat: String,
        #[arg(long)]
        a: String,
    },
    /// Bialgebra, counit and coassociativity identities
    Bialgebra {
        #[arg(long)]
        stat: String,
        #[arg(long, default_value_t = 5)]
        upto: usize,
    },
    /// Whether collapsing fine classes onto coarse ones is a Hopf morphism
    Quotient {
        #[arg(long)]
        fine: String,
        #[arg(long)]
        coarse: String,
        #[arg(long, default_value_t = 5)]
        upto: usize,
    },
}

#[derive(Subcommand)]
pub enum QsymCmd {
    /// Compare the Des algebra with fundamental quasisymmetric polynomials
    Verify {
        #[arg(long, default_value_t = 5)]
        upto: usize,
    },
    /// Expand F_alpha in finitely many variables
    Expand {
        /// Composition such as (2,1)
        #[arg(long)]
        comp: String,
        /// Number of variables; defaults to the weight
        #[arg(long)]
        vars: Option<usize>,
        /// Print sorted `exponents: coefficient` lines instead of JSON
        #[arg(long)]
        text: bool,
    },
}

#[derive(Args, Clone)]
pub struct InstanceArgs {
    /// Base statistic (built-in name or table file), used below length n
    #[arg(long, default_value = "triv")]
    pub base: String,
    /// Length of the new level
    #[arg(long)]
    pub n: usize,
    /// Class limit; defaults to the bound for trivial bases and n! otherwise
    #[arg(long)]
    pub max_classes: Option<usize>,
    /// Require refinement of the lift of level n-1
    #[arg(long)]
    pub substring: bool,
    /// Only partitions refining this statistic at length n
    #[arg(long)]
    pub within: Option<String>,
}

#[derive(Args, Clone)]
pub struct RunArgs {
    /// Worker threads
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Append-only progress log for resuming
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Decisions per subproblem prefix
    #[arg(long, default_value_t = 4)]
    pub split_depth: usize,
}

#[derive(Subcommand)]
pub enum SearchCmd {
    /// Enumerate all extensions of the base by one level
    Enumerate {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Write one solution per line to this file
        #[arg(long)]
        log: Option<PathBuf>,
        /// Viability factor lengths as a,b (repeatable); defaults to 2,n
        #[arg(long)]
        lengths: Vec<String>,
        /// Allow n >= 5
        #[arg(long)]
        heavy: bool,
    },
    /// Apply the viability filter to a solution log
    Filter {
        #[arg(long, default_value = "triv")]
        base: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        solutions: PathBuf,
        /// Viability factor lengths as a,b (repeatable); defaults to 2,n
        #[arg(long)]
        lengths: Vec<String>,
    },
    /// Write the search as DIMACS CNF
    Dimacs {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Class count bound and class size divisor
    Bound {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Subcommand)]
pub enum ReproduceCmd {
    /// Counts and viability for trivial bases through the given length
    TheoremProgress {
        #[arg(long, default_value_t = 4)]
        upto: usize,
        #[command(flatten)]
        run: RunArgs,
    },
    /// The length-3 case in detail
    LemmaN3,
    /// Extensions of Pk at length 4
    PkCase,
}
