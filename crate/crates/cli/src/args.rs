use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "extk", version, about = "Random-matrix experiments for the k-extendibility criterion")]
pub struct Cli {
    /// Worker threads for Monte Carlo repetitions (defaults to available parallelism).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output format. CSV is available for experiment reports only.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<std::path::PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact moment polynomials.
    Moments(MomentsArgs),
    /// Pooled eigenvalue histogram of a modified ensemble against its limit law.
    Spectrum(SpectrumArgs),
    /// Witness values and detection rate for random induced states.
    Witness(WitnessArgs),
    /// Detection rate over a grid of environment ratios c.
    Threshold(ThresholdArgs),
    /// Monte Carlo mean width of the k-extendible set.
    Meanwidth(MeanWidthArgs),
    /// Exhaustive combinatorial checks.
    Comb {
        #[command(subcommand)]
        command: CombCommand,
    },
    /// Smallest k from which k-extendibility beats PPT and realignment.
    Table,
}

#[derive(Subcommand, Debug)]
pub enum CombCommand {
    /// Lift formula, Catalan/Narayana counts and defect bounds.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentEnsemble {
    Gue,
    Wishart,
    GuePtLeading,
    SecondMoment,
    Word,
}

#[derive(Args, Debug, Serialize)]
pub struct MomentsArgs {
    #[arg(long, value_enum)]
    pub ensemble: MomentEnsemble,
    /// Moment index (GUE: order 2p).
    #[arg(long, default_value_t = 1)]
    pub p: usize,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Level function for `word`, 1-based, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub word: Option<Vec<usize>>,
    /// For `word`: the coefficient of the leading power instead of the polynomial.
    #[arg(long)]
    pub normalized_limit: bool,
    /// For `gue`: separate variables dA, dB.
    #[arg(long)]
    pub unbalanced: bool,
    /// Override the enumeration cap on p (or word length).
    #[arg(long)]
    pub cap_p: Option<usize>,
    /// Override the enumeration cap on k.
    #[arg(long)]
    pub cap_k: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumEnsemble {
    GueMod,
    WishartMod,
    GueModPt,
}

#[derive(Args, Debug, Serialize)]
pub struct SpectrumArgs {
    #[arg(long, value_enum)]
    pub ensemble: SpectrumEnsemble,
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub k: usize,
    /// Environment ratio s/d² (Wishart only).
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, default_value_t = 100)]
    pub reps: u64,
    /// 0 selects the Freedman-Diaconis rule.
    #[arg(long, default_value_t = 0)]
    pub bins: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub seed: SeedArg,
}

#[derive(Args, Debug, Serialize)]
pub struct SeedArg {
    #[arg(long, env = "EXTK_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct WitnessArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub c: f64,
    #[arg(long, default_value_t = 100)]
    pub reps: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub seed: SeedArg,
}

#[derive(Args, Debug, Serialize)]
pub struct ThresholdArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub k: usize,
    /// Comma-separated values of c.
    #[arg(long, value_delimiter = ',', required = true)]
    pub c_grid: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    pub reps: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub seed: SeedArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WidthMode {
    Plain,
    PptExtension,
    Unbalanced,
}

#[derive(Args, Debug, Serialize)]
pub struct MeanWidthArgs {
    #[arg(long, value_enum, default_value_t = WidthMode::Plain)]
    pub mode: WidthMode,
    /// Local dimension (plain and ppt-extension).
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub da: Option<usize>,
    #[arg(long)]
    pub db: Option<usize>,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 50)]
    pub reps: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub seed: SeedArg,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 4)]
    pub max_p: usize,
    #[arg(long, default_value_t = 3)]
    pub max_k: usize,
}
