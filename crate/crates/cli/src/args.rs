use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "chainlab", version, about = "Chain models, chain EF and borrowing games, Chu transforms")]
pub struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
    /// JSON file with default bounds and budgets; flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Check documents, catalogs, formula files, logic instances or transforms.
    Validate(ValidateArgs),
    /// Evaluate every sentence of a formula file.
    Eval(EvalArgs),
    /// Solve the chain EF game.
    Ef(EfArgs),
    /// Solve the borrowing game.
    Bg(BgArgs),
    /// Borrowing-game equivalence classes of a catalog.
    Equiv(EquivArgs),
    /// Chu transforms between finite logic instances.
    #[command(subcommand)]
    Chu(ChuCmd),
    /// Print generated sentences in surface syntax.
    #[command(subcommand)]
    Emit(EmitCmd),
    /// Chain independence of sentences over a decomposition catalog.
    Indep(IndepArgs),
    /// Union of a ⊆-chain of level families, with the union harness.
    Union(UnionArgs),
    /// Cross-check sentence rows against the EF game.
    Adequacy(AdequacyArgs),
    /// Play a game against the solver.
    #[command(subcommand)]
    Play(PlayCmd),
}

#[derive(Args, Debug, Clone, Default)]
pub struct BoundsArgs {
    /// Blocks searched by chain evaluation.
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Largest stride of ω-witness schemes.
    #[arg(long)]
    pub period: Option<usize>,
    /// Never certify falsity from an exhausted window.
    #[arg(long)]
    pub no_heuristic: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileKind {
    Auto,
    Document,
    Catalog,
    Formulas,
    Instance,
    Transform,
    Families,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    #[arg(long = "as", value_enum, default_value = "auto")]
    pub kind: FileKind,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("model").required(true).args(["classical", "chain", "filtered"])))]
pub struct EvalArgs {
    #[arg(long)]
    pub formula: PathBuf,
    /// A finite structure, with classical semantics.
    #[arg(long)]
    pub classical: Option<PathBuf>,
    /// A chain model (presentation plus levels).
    #[arg(long)]
    pub chain: Option<PathBuf>,
    /// A filtered finite model, with weak chain semantics.
    #[arg(long)]
    pub filtered: Option<PathBuf>,
    #[command(flatten)]
    pub bounds: BoundsArgs,
}

#[derive(Args, Debug)]
pub struct EfArgs {
    #[arg(long)]
    pub left: PathBuf,
    #[arg(long)]
    pub right: PathBuf,
    #[arg(long, required_unless_present = "infty")]
    pub rounds: Option<usize>,
    /// Largest tuple I may play.
    #[arg(long)]
    pub cap: usize,
    /// The unbounded game, decided by the greatest back-and-forth family.
    #[arg(long, conflicts_with_all = ["rounds", "truncated"])]
    pub infty: bool,
    /// Chain models cut to finite windows.
    #[arg(long, requires_all = ["horizon_i", "horizon_ii"])]
    pub truncated: bool,
    #[arg(long)]
    pub horizon_i: Option<usize>,
    #[arg(long)]
    pub horizon_ii: Option<usize>,
    /// Include the winner's strategy table.
    #[arg(long)]
    pub table: bool,
}

#[derive(Args, Debug)]
pub struct BgArgs {
    #[arg(long)]
    pub left: PathBuf,
    #[arg(long)]
    pub right: PathBuf,
    #[arg(long)]
    pub beta: usize,
    #[arg(long)]
    pub theta: usize,
    #[arg(long)]
    pub table: bool,
}

#[derive(Args, Debug)]
pub struct EquivArgs {
    #[arg(long)]
    pub catalog: PathBuf,
    #[arg(long)]
    pub beta: usize,
    #[arg(long)]
    pub theta: usize,
}

#[derive(Subcommand, Debug)]
pub enum ChuCmd {
    /// Adjointness and density of a given transform.
    Verify {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        transform: PathBuf,
    },
    /// Search for a transform; CHAINLAB_BUDGET overrides the default budget.
    Search {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Compose two transforms and verify the composite.
    Compose {
        #[arg(long)]
        first: PathBuf,
        #[arg(long)]
        second: PathBuf,
        #[arg(long)]
        l1: PathBuf,
        #[arg(long)]
        l2: PathBuf,
        #[arg(long)]
        l3: PathBuf,
    },
    /// Look for a (λ, θ) compactness counterexample.
    Compact {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        theta: usize,
        #[arg(long)]
        lambda: usize,
    },
    /// Build and verify the predicate-coding transform.
    Pc {
        #[arg(long)]
        m: usize,
        /// Comma-separated level sizes; restricts the classical side to σ₁.
        #[arg(long, value_delimiter = ',')]
        caps: Option<Vec<usize>>,
        #[arg(long)]
        battery: PathBuf,
        /// Filtered models to use; defaults to every filtration of every
        /// `<`-structure up to `--size` elements.
        #[arg(long)]
        catalog: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        size: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum EmitCmd {
    /// Characteristic sentence of a finite structure.
    Hintikka {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        beta: usize,
        #[arg(long)]
        width: usize,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// E_0..E_{n-1} and θ_n.
    Wellorder {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "<")]
        order: String,
    },
    /// σ₀, σ₁ and ψ for level predicates.
    Sigma {
        #[arg(long)]
        m: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        caps: Vec<usize>,
    },
    /// The incompactness witness Γ_n.
    Gamma {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "<")]
        order: String,
    },
    /// No k-clique.
    Clique {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "E")]
        symbol: String,
    },
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("source").required(true).args(["catalog", "presentation", "structure"])))]
pub struct IndepArgs {
    #[arg(long)]
    pub formula: PathBuf,
    /// Catalog file of chain models or filtered models over one base.
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    /// Enumerate level families of this presentation.
    #[arg(long)]
    pub presentation: Option<PathBuf>,
    /// Enumerate filtrations of this finite structure.
    #[arg(long)]
    pub structure: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub max_selectors: usize,
    #[arg(long, default_value_t = 2)]
    pub max_slope: usize,
    #[arg(long, default_value_t = 2)]
    pub max_offset: usize,
    #[arg(long, default_value_t = 3)]
    pub max_levels: usize,
    #[command(flatten)]
    pub bounds: BoundsArgs,
}

#[derive(Args, Debug)]
pub struct UnionArgs {
    #[arg(long)]
    pub presentation: PathBuf,
    /// JSON list of level families, in chain order.
    #[arg(long)]
    pub families: PathBuf,
    /// Formula file for the union harness.
    #[arg(long)]
    pub battery: Option<PathBuf>,
    #[command(flatten)]
    pub bounds: BoundsArgs,
}

#[derive(Args, Debug)]
pub struct AdequacyArgs {
    #[arg(long, default_value = "<")]
    pub rel: String,
    #[arg(long, default_value_t = 3)]
    pub size: usize,
    #[arg(long, default_value_t = 2)]
    pub beta: usize,
    #[arg(long, default_value_t = 2)]
    pub width: usize,
    /// Raise the size ceiling.
    #[arg(long)]
    pub max_size: Option<usize>,
    #[arg(long)]
    pub max_beta: Option<usize>,
    #[arg(long)]
    pub max_width: Option<usize>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    #[value(name = "I")]
    I,
    #[value(name = "II")]
    Ii,
}

#[derive(Subcommand, Debug)]
pub enum PlayCmd {
    /// The finite chain EF game.
    Ef {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        rounds: usize,
        #[arg(long)]
        cap: usize,
        /// The side the human plays.
        #[arg(long = "as", value_enum)]
        role: Role,
        #[arg(long, default_value = "chainlab-transcript.txt")]
        transcript: PathBuf,
    },
    /// The borrowing game.
    Bg {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        beta: usize,
        #[arg(long)]
        theta: usize,
        #[arg(long = "as", value_enum)]
        role: Role,
        #[arg(long, default_value = "chainlab-transcript.txt")]
        transcript: PathBuf,
    },
}
