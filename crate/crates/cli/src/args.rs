use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "monotone",
    version,
    about = "Checks and constructions for monotone operators and convex functions"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    Float,
    Exact,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Scalar backend; `exact` runs in rational arithmetic with zero tolerance.
    #[arg(long, global = true, value_enum, default_value_t = Backend::Float)]
    pub backend: Backend,
    #[arg(long, global = true)]
    pub tol_abs: Option<f64>,
    #[arg(long, global = true)]
    pub tol_rel: Option<f64>,
    /// Seed for generated sample sets.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Input JSON document; `-` or absent reads stdin.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, conflicts_with = "table")]
    pub json: bool,
    #[arg(long, global = true)]
    pub table: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pairwise monotonicity of a graph.
    CheckMonotone,
    /// n-cyclic (or full cyclic) monotonicity.
    CheckCyclic {
        /// Cycle length, or `full`.
        #[arg(long, default_value = "full")]
        n: String,
    },
    /// Relatedness of {"pair", "graph"}, optionally restricted to a covector "window".
    Related,
    Invert,
    /// Pointwise sum of {"s", "t"} on common points.
    Sum,
    Coercivity {
        #[arg(long, value_delimiter = ',', required = true)]
        radii: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        thresholds: Option<Vec<f64>>,
        #[arg(long, default_value = "euclidean")]
        norm: String,
    },
    /// Separation witness for a violating pair {"z", "zstar", "y", "ystar"}.
    #[command(name = "witness-4-7")]
    Witness47 {
        #[arg(long)]
        lambda: String,
    },
    /// Value of {"function"} at {"x"}.
    Eval,
    /// Conjugate of {"function"} at {"at"} or on {"dual_grid"}.
    Conjugate,
    SubgradTest,
    EpsSubgrad {
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Right directional derivative of {"function"} at {"x"} along {"y"}.
    DPlus,
    /// Sum rule for {"f", "g", "x", "xstar"}.
    SumRule {
        #[arg(long, default_value_t = 1e-3)]
        resolution: f64,
        #[arg(long)]
        radius: Option<f64>,
    },
    BrSearch {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
    },
    DescentWitness,
    /// Convex potential of a cyclically monotone graph.
    Reconstruct {
        #[arg(long, default_value_t = 0)]
        base: usize,
    },
    /// Solves y* ∈ ∂f(x) + x for each sample.
    MintyProbe {
        /// Number of generated samples when the input has none.
        #[arg(long, default_value_t = 16)]
        samples: usize,
    },
    Dualmap {
        #[arg(long, default_value = "euclidean")]
        norm: String,
    },
    Project,
    /// Variational inequality of the projection at {"x"} over {"probes"}.
    ViCheck {
        #[arg(long, default_value_t = 32)]
        samples: usize,
    },
    /// Resolvent of a step operator {"step"} or a subdifferential {"function"} at {"ystar"}.
    Resolvent {
        #[arg(long)]
        lambda: String,
    },
    PositiveCheck {
        #[arg(long, default_value_t = 64)]
        samples: usize,
    },
    /// Monotone extension of {"graph"} into covectors from {"region"}.
    DfExtend {
        /// Constant map value x0, comma separated.
        #[arg(long, conflicts_with = "phi", allow_hyphen_values = true)]
        constant: Option<String>,
        /// Built-in map: identity or negate.
        #[arg(long)]
        phi: Option<String>,
    },
    Browder {
        #[arg(long)]
        r: f64,
        #[arg(long, default_value = "euclidean")]
        norm: String,
    },
    /// Fixed point u ∈ R(u) for {"k", "map"}.
    Kakutani {
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Exact gallery report.
    Gallery {
        name: String,
        /// Size parameter (truncation dimension or table length).
        #[arg(long)]
        n: Option<usize>,
    },
}

impl Command {
    pub fn needs_input(&self) -> bool {
        !matches!(self, Command::Gallery { .. })
    }
}
