use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "alw",
    version,
    about = "Build Löwner and anti-Löwner matrices, verify their positivity identities, classify functions and solve A X + X A = g(A) B + B g(A)"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a matrix on a grid and report its spectrum and PSD verdict.
    Build(BuildArgs),
    /// Randomized search for a counterexample to a positivity property of fixed order.
    Classify(ClassifyArgs),
    /// Run a verification suite on random instances.
    Verify(VerifyArgs),
    /// Solve and certify the Lyapunov-type equation from a problem file.
    Lyapunov(LyapunovArgs),
    /// Re-check the witness stored in a classification report.
    Recheck(RecheckArgs),
    /// Every suite plus a handful of classifications at modest trial counts.
    Battery(BatteryArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Relative PSD tolerance [default: $ALW_DEFAULT_TOL or 1e-9].
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BuildKind {
    Loewner,
    Antiloewner,
    Signed,
    Thm2,
}

impl BuildKind {
    pub fn name(self) -> &'static str {
        match self {
            BuildKind::Loewner => "loewner",
            BuildKind::Antiloewner => "antiloewner",
            BuildKind::Signed => "signed",
            BuildKind::Thm2 => "thm2",
        }
    }
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    pub kind: BuildKind,
    /// Function: JSON text, a JSON file, or shorthand such as `power:0.5`.
    #[arg(long = "fn")]
    pub function: String,
    /// Points: inline `1,2,3`, or a CSV / JSON file.
    #[arg(long)]
    pub grid: String,
    /// Sign vector for `signed`, e.g. `+,-,+`.
    #[arg(long, allow_hyphen_values = true)]
    pub signs: Option<String>,
    /// Shift for `thm2` [default: min(gap / 4, (b - max point) / 2)].
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Grid interval `a,b` (`b` may be `inf`) [default: the function's domain].
    #[arg(long)]
    pub interval: Option<String>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PropertyArg {
    AntiLoewner,
    MatrixMonotone,
    MatrixMonotoneDecreasing,
    /// Matrix monotonicity tested directly on random pairs `A <= B`.
    Probe,
}

impl PropertyArg {
    pub fn name(self) -> &'static str {
        match self {
            PropertyArg::AntiLoewner => "anti-loewner",
            PropertyArg::MatrixMonotone => "matrix-monotone",
            PropertyArg::MatrixMonotoneDecreasing => "matrix-monotone-decreasing",
            PropertyArg::Probe => "probe",
        }
    }
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long = "fn")]
    pub function: String,
    #[arg(long, value_enum, default_value_t = PropertyArg::AntiLoewner)]
    pub property: PropertyArg,
    #[arg(long, visible_alias = "n")]
    pub order: usize,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sampling interval `a,b`, intersected with the function's domain [default: 0,10].
    #[arg(long)]
    pub interval: Option<String>,
    /// Where to write the witness of a refutation [default: next to --out, else ./witness.json].
    #[arg(long)]
    pub witness: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Prop1,
    Prop1Factor,
    Thm1,
    Thm2,
    Continuity,
}

impl SuiteArg {
    pub fn name(self) -> &'static str {
        match self {
            SuiteArg::Prop1 => "prop1",
            SuiteArg::Prop1Factor => "prop1-factor",
            SuiteArg::Thm1 => "thm1",
            SuiteArg::Thm2 => "thm2",
            SuiteArg::Continuity => "continuity",
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub suite: SuiteArg,
    /// Functions under test (repeatable) [default: the built-in catalog for the suite].
    #[arg(long = "fn")]
    pub functions: Vec<String>,
    /// Instance size (`prop1`) or largest size drawn.
    #[arg(long, visible_alias = "order")]
    pub n: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sample sign vectors instead of enumerating all of them.
    #[arg(long)]
    pub sampled: bool,
    #[arg(long)]
    pub interval: Option<String>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct LyapunovArgs {
    /// JSON file `{"A": matrix, "B": matrix, "g": function}`.
    pub file: PathBuf,
    /// Include the spectrum and determinant sign of the solution.
    #[arg(long)]
    pub certify: bool,
    /// Require the solution to be positive definite, not just semidefinite.
    #[arg(long)]
    pub strict_pd: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct RecheckArgs {
    /// A classification report or witness file.
    pub file: PathBuf,
}

#[derive(Debug, Args)]
pub struct BatteryArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}
