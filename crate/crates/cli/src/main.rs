//! `kclab`: instance generation, validation, measurement and seeded
//! experiments over the `kclab` core library.
//!
//! Exit status: 0 when every checked inequality holds, 1 when a check fails
//! (the report is still written), 2 on usage or input errors.

mod commands;
mod experiment;
mod report;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use report::{Format, Report};

#[derive(Debug, Parser)]
#[command(
    name = "kclab",
    version,
    about = "Knowledge compilation lower-bound laboratory"
)]
struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for trial loops; defaults to all cores. Results do not
    /// depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Seeded uniform random m x n matrix over GF(2), in matrix text format.
    GenMatrix(GenMatrixArgs),
    /// Exact goodness of a matrix file, or the Monte-Carlo s-good rate.
    Goodness(GoodnessArgs),
    /// Seeded random parity-check matrix, or its characteristic function.
    GenCode(GenCodeArgs),
    /// Seeded random n x n bilinear form, or its truth table.
    GenBilinear(GenBilinearArgs),
    /// Model count of a truth table or a d-DNNF.
    Count(CountArgs),
    /// Decomposability and determinism of an NNF file.
    Validate(ValidateArgs),
    /// Weak and strong approximation error of g against f.
    Approx(ApproxArgs),
    /// Discrepancy of a rectangle against a function.
    Disc(DiscArgs),
    /// Iterative core extraction for a code and a rectangle.
    CoreTrace(CoreTraceArgs),
    /// Balanced disjoint rectangle cover from a d-DNNF.
    CoverExtract(CoverExtractArgs),
    /// Check a rectangle cover against a function.
    CoverVerify(CoverVerifyArgs),
    /// Evaluate a cover-size or size-threshold bound exactly.
    Bound(BoundArgs),
    /// Run a seeded experiment suite.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct GenMatrixArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct GoodnessArgs {
    /// Matrix file; without it the Monte-Carlo rate over random m x n
    /// matrices is measured.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Column-subset size; defaults to ceil(n/3).
    #[arg(long)]
    pub threshold: Option<usize>,
    /// Largest n enumerated exhaustively.
    #[arg(long, default_value_t = kclab::gf2::DEFAULT_GOODNESS_CAP)]
    pub cap: usize,
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub s: usize,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct GenCodeArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Emit the characteristic function's truth table instead of H.
    #[arg(long)]
    pub table: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct GenBilinearArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Emit the truth table over x_1..x_n, y_1..y_n instead of A.
    #[arg(long)]
    pub table: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct CountArgs {
    /// Truth-table file.
    #[arg(long, conflicts_with = "nnf", required_unless_present = "nnf")]
    pub f: Option<PathBuf>,
    /// NNF file in c2d format.
    #[arg(long)]
    pub nnf: Option<PathBuf>,
    /// Skip d-DNNF certification of the circuit.
    #[arg(long)]
    pub assume_valid: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct ValidateArgs {
    #[arg(long)]
    pub nnf: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ApproxMode {
    Weak,
    Strong,
    Both,
}

#[derive(Debug, Args, Serialize)]
pub struct ApproxArgs {
    #[arg(long)]
    pub f: PathBuf,
    #[arg(long)]
    pub g: PathBuf,
    #[arg(long, value_enum, default_value_t = ApproxMode::Both)]
    pub mode: ApproxMode,
    /// Product distribution: comma-separated Pr[x_i = 1]; uniform otherwise.
    #[arg(long, value_delimiter = ',')]
    pub product: Option<Vec<String>>,
    /// Check the measured error against this tolerance.
    #[arg(long)]
    pub eps: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct DiscArgs {
    #[arg(long)]
    pub f: PathBuf,
    /// Rectangle JSON file.
    #[arg(long)]
    pub rect: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct CoreTraceArgs {
    /// Parity-check matrix file.
    #[arg(long)]
    pub code: PathBuf,
    /// Rectangle JSON file; its partition drives the extraction.
    #[arg(long)]
    pub rect: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct CoverExtractArgs {
    #[arg(long)]
    pub nnf: PathBuf,
    #[arg(long)]
    pub assume_valid: bool,
    /// Also write the cover as JSON here.
    #[arg(long)]
    pub cover_out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CoverVerifyArgs {
    #[arg(long)]
    pub f: PathBuf,
    /// Cover JSON file.
    #[arg(long)]
    pub cover: PathBuf,
    /// Do not require pairwise disjoint rectangles.
    #[arg(long)]
    pub allow_overlap: bool,
    /// Do not require balanced partitions.
    #[arg(long)]
    pub allow_unbalanced: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    /// (|f^-1(1)| - eps 2^n) / Delta
    Weak,
    /// (1 - eps) |f^-1(1)| / Delta
    Strong,
    /// (1 - eps) 2^(2m-n) |f^-1(1)| / 4
    Pipeline,
    /// Smallest n beyond which the trivial weak approximation fails.
    Trivial,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundArgs {
    #[arg(long, value_enum)]
    pub kind: BoundKind,
    /// |f^-1(1)| as a decimal integer.
    #[arg(long)]
    pub model_count: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value = "0")]
    pub eps: String,
    /// Largest rectangle size Delta, as a decimal integer.
    #[arg(long)]
    pub delta: Option<String>,
    #[arg(long)]
    pub alpha: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// s-good rate of random m x n matrices, against exact enumeration when small.
    GoodMatrices,
    /// Largest balanced rectangle inside a random code versus 2^(n-2s).
    MaxRectangle,
    /// Invariants of iterative core extraction on random rectangles.
    CoreClaims,
    /// Discrepancy against core size on rectangles with tp >= fp.
    DiscCore,
    /// Bilinear model counts against the rank formula.
    BilinearCount,
    /// Rank bound on block rectangles and the averaging argument on balanced ones.
    BilinearDisc,
    /// Rectangle covers extracted from d-DNNFs.
    CoverTheorem,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CircuitSource {
    /// Shannon decision trees compiled from random truth tables.
    Tree,
    /// Random d-DNNFs with non-smooth branches and wide ANDs.
    Random,
}

#[derive(Debug, Args, Serialize)]
pub struct ExperimentArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    /// Variable or column count; suite default when absent.
    #[arg(long)]
    pub n: Option<usize>,
    /// Parity-check rows; suite default when absent.
    #[arg(long)]
    pub m: Option<usize>,
    /// Selection fraction for the bilinear averaging checks.
    #[arg(long)]
    pub delta: Option<String>,
    /// Tolerance for the cover-theorem counting bound; defaults to 0.
    #[arg(long)]
    pub eps: Option<String>,
    #[arg(long, value_enum, default_value_t = CircuitSource::Tree)]
    pub circuits: CircuitSource,
}

/// What a subcommand produced.
pub enum Output {
    /// A raw artifact (matrix, truth table) written verbatim.
    Text(String),
    Report(Report),
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn dispatch(cmd: Command) -> Result<Output> {
    match cmd {
        Command::GenMatrix(a) => commands::gen_matrix(&a),
        Command::Goodness(a) => commands::goodness(&a),
        Command::GenCode(a) => commands::gen_code(&a),
        Command::GenBilinear(a) => commands::gen_bilinear(&a),
        Command::Count(a) => commands::count(&a),
        Command::Validate(a) => commands::validate(&a),
        Command::Approx(a) => commands::approx(&a),
        Command::Disc(a) => commands::disc(&a),
        Command::CoreTrace(a) => commands::core_trace(&a),
        Command::CoverExtract(a) => commands::cover_extract(&a),
        Command::CoverVerify(a) => commands::cover_verify(&a),
        Command::Bound(a) => commands::bound(&a),
        Command::Experiment(a) => experiment::run(&a).map(Output::Report),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    if let Some(j) = cli.jobs {
        anyhow::ensure!(j > 0, "--jobs must be positive");
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .context("cannot configure worker pool")?;
    }
    match dispatch(cli.command)? {
        Output::Text(t) => {
            emit(&t, cli.out.as_deref())?;
            Ok(true)
        }
        Output::Report(mut r) => {
            r.config
                .insert("format".into(), serde_json::to_value(cli.format)?);
            r.config
                .insert("out".into(), serde_json::to_value(&cli.out)?);
            let text = r.render(cli.format);
            emit(&text, cli.out.as_deref())?;
            Ok(r.all_hold())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
