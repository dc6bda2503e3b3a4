//! `holant`: evaluate, classify, synthesize and reduce from the command line.
//!
//! Output is JSON unless `--pretty` is given. Exit codes: 0 success,
//! 1 invalid input, 2 budget or cap exceeded, 3 numeric failure, 4 a suite
//! reported failures.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use holant::evaluation::Order;
use holant::HolantError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    Greedy,
    Exhaustive,
}

impl From<OrderArg> for Order {
    fn from(o: OrderArg) -> Order {
        match o {
            OrderArg::Greedy => Order::Greedy,
            OrderArg::Exhaustive => Order::Exhaustive,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "holant", version, about = "Boolean holant evaluation, classification and gadget synthesis")]
pub struct Cli {
    /// Arithmetic used for evaluation.
    #[arg(long, value_enum, default_value = "exact", global = true)]
    pub backend: Backend,
    /// Tolerance for approximate comparisons.
    #[arg(long, default_value_t = 1e-9, global = true)]
    pub tol: f64,
    /// Contraction ordering heuristic.
    #[arg(long, value_enum, default_value = "greedy", global = true)]
    pub order: OrderArg,
    /// Seed for randomized suites.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    /// Largest edge count for brute-force summation.
    #[arg(long, default_value_t = holant::evaluation::DEFAULT_EDGE_BUDGET, global = true)]
    pub budget_edges: usize,
    /// Largest intermediate tensor arity during contraction.
    #[arg(long, default_value_t = holant::evaluation::DEFAULT_CONTRACTION_CAP, global = true)]
    pub cap: usize,
    /// Evaluator to use instead of automatic selection: auto, brute,
    /// contract, T, E, KM.
    #[arg(long, global = true)]
    pub force: Option<String>,
    /// Human-readable output.
    #[arg(long, global = true)]
    pub pretty: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SynthKind {
    BinaryFromGhz,
    BinaryFromPair,
    GhzFromW,
    ExpressE,
    ExpressM,
    Pldu,
    Triangularize,
    UnitaryCompletion,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    Subdivide,
    Unsubdivide,
    Bipartify,
    Forget,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KArg {
    K1,
    K2,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Holant value of a closed grid file.
    Eval { grid: PathBuf },
    /// Function realized by a gadget grid or a formula file.
    Realize { file: PathBuf },
    /// Dichotomy report for a JSON list of function literals.
    Classify { functions: PathBuf },
    /// Build a gadget recipe or a matrix factorization. Function and matrix
    /// arguments are JSON literals, or `@path` to read one from a file.
    Synth {
        #[arg(value_enum)]
        kind: SynthKind,
        #[arg(long)]
        f: Option<String>,
        #[arg(long)]
        g: Option<String>,
        #[arg(long)]
        target: Option<String>,
        #[arg(long)]
        s1: Option<String>,
        #[arg(long)]
        s2: Option<String>,
        #[arg(long)]
        matrix: Option<String>,
        /// Triangular side for `triangularize`: upper or lower.
        #[arg(long, default_value = "upper")]
        side: String,
        /// JSON list of scalars for `unitary-completion`.
        #[arg(long)]
        vector: Option<String>,
    },
    /// Independent-set polynomial grid for a graph file.
    ReduceIs {
        graph: PathBuf,
        #[arg(long)]
        lambda: String,
        /// Largest vertex arity allowed in the output grid.
        #[arg(long, default_value_t = 12)]
        arity_cap: usize,
        /// Also evaluate the grid and the enumeration oracle.
        #[arg(long)]
        evaluate: bool,
    },
    /// Holant grid for a counting CSP file.
    Csp2holant {
        csp: PathBuf,
        #[arg(long)]
        evaluate: bool,
    },
    /// Holographic transformation, K-stripping or a structural rewrite of a
    /// grid.
    Transform {
        grid: PathBuf,
        /// Apply `M` on the left side and `(M⁻¹)ᵀ` on the right.
        #[arg(long)]
        matrix: Option<String>,
        #[arg(long, value_enum)]
        strip_k: Option<KArg>,
        #[arg(long, value_enum)]
        rewrite: Option<RuleArg>,
    },
    /// Replay the algebraic identities behind the gadget constructions.
    VerifyIdentities {
        #[arg(long, default_value_t = 50)]
        draws: usize,
    },
    /// Run a named self-check: verify-identities, oracle-equivalence or
    /// closure-laws.
    Suite { name: String },
}

/// A failure with its exit code.
pub struct Failure {
    pub code: u8,
    pub body: serde_json::Value,
}

impl From<HolantError> for Failure {
    fn from(e: HolantError) -> Self {
        use HolantError::*;
        let code = match &e {
            BudgetExceeded(_) | CapExceeded { .. } | ArityTooLarge { .. } | DegreeTooLarge { .. } => 2,
            DivisionByZero | NumericOverflow | ParameterDegenerate(_) => 3,
            _ => 1,
        };
        Failure { code, body: serde_json::json!({"error": format!("{e:?}").split(['(', ' ', '{']).next().unwrap_or("error"), "message": e.to_string()}) }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            if f.code == 4 {
                println!("{}", f.body.as_str().map(str::to_string).unwrap_or_else(|| f.body.to_string()));
            } else {
                eprintln!("{}", f.body);
            }
            ExitCode::from(f.code)
        }
    }
}
