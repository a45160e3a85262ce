use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "catgraph", version, about = "Graph-based two-sample tests for sparse categorical data")]
pub struct Cli {
    /// Worker threads for permutations and replicates (default: all cores).
    #[arg(long, global = true, env = "CATGRAPH_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a two-sample test and print the result as JSON.
    Test(TestArgs),
    /// Export a category graph as an edge list or DOT.
    Graph(GraphArgs),
    /// Print the closed-form null moments of R and T on a category graph.
    Moments(MomentsArgs),
    /// Power and p-value accuracy studies.
    #[command(subcommand)]
    Simulate(SimulateCommand),
}

/// Where category distances or the category graph come from.
#[derive(Args, Debug, Clone)]
pub struct Similarity {
    /// Distance CSV: header of category ids, then one row per category.
    #[arg(long, group = "source")]
    pub dist: Option<PathBuf>,
    /// Built-in metric on the category ids (kendall, spearman, footrule,
    /// hamming, rank_diff).
    #[arg(long, group = "source")]
    pub metric: Option<String>,
    /// Custom category graph: lines `u,v` of category ids.
    #[arg(long)]
    pub edges: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum GraphKind {
    Mst,
    Umst,
    #[value(name = "c-unng")]
    CUnng,
    Custom,
}

#[derive(Args, Debug)]
pub struct TestArgs {
    /// Contingency CSV with header `category,group_a,group_b`.
    #[arg(long)]
    pub table: PathBuf,
    #[command(flatten)]
    pub similarity: Similarity,
    /// aMST, uMST, C-uMST, C-uNNG, C0, T-C0, aMDP, uNNG, pearson or deviance.
    #[arg(long)]
    pub stat: String,
    /// Category graph for C0 and T-C0.
    #[arg(long, value_enum)]
    pub graph: Option<GraphKind>,
    /// perm:B, normal, exact, both or both:B.
    #[arg(long, default_value = "both:1000")]
    pub pvalue: String,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Largest number of MSTs or minimum matchings to enumerate.
    #[arg(long, default_value_t = catgraph::graph::DEFAULT_MST_CAP)]
    pub cap: u64,
    /// Replace aMST by C-uMST, and aMDP by uNNG, when a cap is hit.
    #[arg(long)]
    pub fallback: bool,
    /// Level above which a diagnostic ratio is flagged.
    #[arg(long, default_value_t = catgraph::inference::DEFAULT_THRESHOLD)]
    pub threshold: f64,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum GraphFormat {
    Csv,
    Dot,
}

#[derive(Args, Debug)]
pub struct GraphArgs {
    /// Contingency CSV; required for DOT output and for --metric.
    #[arg(long)]
    pub table: Option<PathBuf>,
    #[command(flatten)]
    pub similarity: Similarity,
    #[arg(long, value_enum, default_value = "umst")]
    pub kind: GraphKind,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: GraphFormat,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct MomentsArgs {
    #[arg(long)]
    pub table: PathBuf,
    #[command(flatten)]
    pub similarity: Similarity,
    #[arg(long, value_enum, default_value = "umst")]
    pub graph: GraphKind,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum SimulateCommand {
    /// Power of permutation tests over simulated replicates.
    Power(PowerArgs),
    /// Normal-approximation minus permutation p-values on null haplotypes.
    PvalueAccuracy(AccuracyArgs),
}

#[derive(Args, Debug)]
pub struct StudyArgs {
    #[arg(long, default_value_t = 1000)]
    pub runs: usize,
    /// Permutations per run.
    #[arg(long, default_value_t = 1000)]
    pub perms: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = catgraph::graph::DEFAULT_MST_CAP)]
    pub cap: u64,
    /// Comma-separated statistic names.
    #[arg(long, value_delimiter = ',')]
    pub stats: Vec<String>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PowerArgs {
    /// normal-shift, normal-scale, normal-shift-scale, uniform-shift,
    /// normal-null, mallows, mallows-null, haplotype or haplotype-null.
    #[arg(long)]
    pub scenario: String,
    #[arg(long, value_delimiter = ',', default_value = "0.01,0.05")]
    pub alphas: Vec<f64>,
    /// Subjects per group (binned, mallows) or in total (haplotype).
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of bins for the binned scenarios.
    #[arg(long)]
    pub bins: Option<usize>,
    /// Mallows concentration.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Metric of the Mallows generating model.
    #[arg(long)]
    pub generate_metric: Option<String>,
    /// Metric used to build graphs on the Mallows rankings.
    #[arg(long)]
    pub graph_metric: Option<String>,
    /// Haplotype length.
    #[arg(long)]
    pub length: Option<usize>,
    #[command(flatten)]
    pub study: StudyArgs,
}

#[derive(Args, Debug)]
pub struct AccuracyArgs {
    #[arg(long, value_delimiter = ',', default_value = "6,8,10")]
    pub lengths: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "100,500,1000")]
    pub sizes: Vec<usize>,
    /// Also write per-cell quartiles to this CSV.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    #[command(flatten)]
    pub study: StudyArgs,
}
