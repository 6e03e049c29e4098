use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "sl2x", version, about = "Expansion, random walks and growth in SL2(Z/q1) x SL2(Z/q2) x SL2(Z/q3)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Directory for result.json and CSV files; JSON goes to stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand)]
pub enum Command {
    /// Group orders and reached subgroups.
    #[command(subcommand)]
    Group(GroupCmd),
    /// Cayley graph construction.
    #[command(subcommand)]
    Cayley(CayleyCmd),
    /// Spectral gap of the walk operator.
    #[command(subcommand)]
    Spectral(SpectralCmd),
    /// Cheeger constant, exact or from spectral bounds.
    #[command(subcommand)]
    Cheeger(CheegerCmd),
    /// Exact random-walk measures.
    #[command(subcommand)]
    Walk(WalkCmd),
    /// Product-set growth and covering searches.
    #[command(subcommand)]
    Growth(GrowthCmd),
    /// Approximate homomorphisms and the commutator covering check.
    #[command(subcommand)]
    Glue(GlueCmd),
    /// Run an acceptance suite (or `all`).
    Verify {
        suite: String,
    },
    /// Run an experiment described by a JSON config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args, Serialize, Clone, Debug)]
pub struct GraphArgs {
    /// `q` for (q,q,q) or `q1,q2,q3`.
    #[arg(long, default_value = "2")]
    pub moduli: String,
    /// Preset name (diagonal, twisted, dense-random[:seed]) or a JSON file of generators.
    #[arg(long, default_value = "twisted")]
    pub genset: String,
}

#[derive(Subcommand)]
pub enum GroupCmd {
    Info {
        #[arg(long, default_value = "2")]
        moduli: String,
        /// Report the subgroup generated by this set as well.
        #[arg(long)]
        genset: Option<String>,
    },
}

#[derive(Subcommand)]
pub enum CayleyCmd {
    Build(GraphArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Auto,
    Dense,
    Iterative,
}

#[derive(Subcommand)]
pub enum SpectralCmd {
    Gap {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, value_enum, default_value = "auto")]
        mode: ModeArg,
    },
}

#[derive(Subcommand)]
pub enum CheegerCmd {
    Exact(GraphArgs),
    Bounds(GraphArgs),
}

#[derive(Args, Serialize, Clone, Debug)]
pub struct WalkArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Walk length (maximum length for tables).
    #[arg(long, default_value_t = 10)]
    pub l: u32,
}

#[derive(Subcommand)]
pub enum WalkCmd {
    /// χ_S^(l) as exact masses.
    Power(WalkArgs),
    /// Distance to uniform against λ_*^l for l = 1..L.
    Decay(WalkArgs),
    NonconcLinear(NonconcArgs),
    NonconcTrace {
        #[command(flatten)]
        walk: WalkArgs,
        /// JSON file with `xi`, `eta` (three 2x2 integer matrices each) and `q`.
        #[arg(long)]
        trace: PathBuf,
    },
}

#[derive(Args, Serialize, Clone, Debug)]
pub struct NonconcArgs {
    /// Defaults to (Q,Q,Q).
    #[arg(long)]
    pub moduli: Option<String>,
    #[arg(long, default_value = "twisted")]
    pub genset: String,
    #[arg(long, default_value_t = 10)]
    pub l: u32,
    #[arg(long = "Q")]
    pub q: u64,
    /// Twelve comma-separated coefficients; repeatable. Five built-in forms when absent.
    #[arg(long = "form", allow_hyphen_values = true)]
    pub forms: Vec<String>,
}

#[derive(Args, Serialize, Clone, Debug)]
pub struct SubsetArgs {
    #[arg(long, default_value = "2")]
    pub moduli: String,
    /// CSV of group indices (column `index`).
    #[arg(long)]
    pub subset: Option<PathBuf>,
    /// Size of a seeded random symmetric subset.
    #[arg(long)]
    pub size: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Subcommand)]
pub enum GrowthCmd {
    Exponent {
        #[command(flatten)]
        subset: SubsetArgs,
        /// Enables the hypothesis flags.
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 1)]
        l: u32,
        #[arg(long, default_value = "twisted")]
        genset: String,
    },
    BoundedGen {
        #[command(flatten)]
        subset: SubsetArgs,
        #[arg(long, default_value_t = 6)]
        kmax: u32,
    },
    SumsetCover {
        /// Residue moduli `q` or `q1,q2,q3`.
        #[arg(long, default_value = "5")]
        moduli: String,
        /// CSVs with columns `x1,x2,x3`; seeded random halves when absent.
        #[arg(long)]
        a: Option<PathBuf>,
        #[arg(long)]
        b: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 6)]
        kmax: u32,
    },
}

#[derive(Args, Serialize, Clone, Debug)]
pub struct MapArgs {
    /// `cyclic:n` or `lambda:q`.
    #[arg(long, default_value = "lambda:2")]
    pub source: String,
    #[arg(long, default_value = "lambda:2")]
    pub target: String,
    /// CSV with `source_index,target_index`; a seeded random map when absent.
    #[arg(long)]
    pub map: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Subcommand)]
pub enum GlueCmd {
    Failures(MapArgs),
    Dichotomy {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, default_value_t = 1e-4)]
        epsilon: f64,
    },
    CommutatorCover {
        /// `x,y,z` for [[x,y],[z,-x]].
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[arg(long, allow_hyphen_values = true)]
        w: String,
        #[arg(long)]
        q: u64,
    },
}
