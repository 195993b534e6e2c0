use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "robcert", version, about = "Exact robust-learning and certification experiments")]
pub struct Cli {
    /// Task file (JSON).
    #[arg(long, global = true)]
    pub task: Option<PathBuf>,
    /// Master seed; trial i uses stream i of this seed.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 100)]
    pub trials: usize,
    /// Output file. Reports go to stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// With csv and --out, per-trial rows go next to the JSON report (same
    /// path, .csv extension); without --out only the rows are printed.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Clone, Debug, Serialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum Command {
    /// Estimate the robust loss of the task's hidden hypothesis from label queries.
    Certify(CertifyArgs),
    /// Run an adversary against the hidden hypothesis on sampled points.
    Attack(AttackArgs),
    /// Train a robust learner and score it exactly.
    Learn(LearnArgs),
    /// Play an answering game against a certifier strategy.
    Game(GameArgs),
    /// Check the counterexample constructions with exact arithmetic.
    VerifyConstructions(VerifyArgs),
    /// Convert a JSON report into CSV rows.
    Report(ReportArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CertifyMode {
    Witness,
    L1,
    Tolerant,
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct CertifyArgs {
    #[arg(long, value_enum)]
    pub mode: CertifyMode,
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    /// Tolerance of the outer ball, as a rational or decimal.
    #[arg(long)]
    pub gamma: Option<String>,
    /// Sample size; defaults to the Hoeffding size for (eps, delta).
    #[arg(long)]
    pub m: Option<usize>,
    /// Class member to use as the hidden hypothesis instead of the task's.
    #[arg(long)]
    pub hidden: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AdversaryName {
    Threshold,
    Exhaustive,
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct AttackArgs {
    #[arg(long, value_enum)]
    pub adversary: AdversaryName,
    /// Points drawn per trial.
    #[arg(long, default_value_t = 50)]
    pub sample: usize,
    /// Class member to use as the hidden hypothesis instead of the task's.
    #[arg(long)]
    pub hidden: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algo {
    Erm,
    SslMargin,
    SslUnlabeled,
    ExtOracle,
    Cluster,
    Compress,
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct LearnArgs {
    #[arg(long, value_enum)]
    pub algo: Algo,
    /// Labeled sample size; defaults to the algorithm's ε-net size.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub m_unlabeled: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GameKindArg {
    L2,
    Tolerant,
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct GameArgs {
    #[arg(long, value_enum)]
    pub kind: GameKindArg,
    /// `random`, or a JSON script `{"queries": [...], "verdict": "lossy"}`.
    #[arg(long, default_value = "random")]
    pub strategy: String,
    #[arg(long, default_value_t = 50)]
    pub max_queries: usize,
    /// Inner radius of the tolerant game.
    #[arg(long, default_value = "1")]
    pub r: String,
    #[arg(long, default_value = "1/10")]
    pub gamma: String,
    /// Point mass of the tolerant game, `x,y`.
    #[arg(long, default_value = "0,0")]
    pub x0: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    Thm32,
    Thm36,
    All,
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Which::All)]
    pub which: Which,
    /// Directory receiving one task file per construction distribution.
    #[arg(long)]
    pub export: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct ReportArgs {
    /// JSON report written by another subcommand.
    #[arg(long)]
    pub input: PathBuf,
}
