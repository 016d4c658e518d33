//! The `lesion` command-line tool. Every subcommand reads and writes plain
//! files; `--out` artifacts get a `<out>.provenance` sidecar.

mod commands;
mod config;
mod infer;
mod plot;
mod provenance;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::datamodel::{Category, Split};

pub use config::{Config, LoadedConfig};
pub use infer::{infer, inference_records, run_backend, Backend};
pub use plot::roc_svg;
pub use provenance::Provenance;

#[derive(Debug, Parser)]
#[command(name = "lesion", version, about = "Skin-lesion classification pipeline tools")]
pub struct Cli {
    /// Run seed for every random choice.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Primary output file (stdout when omitted, where supported).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Remove black borders and rescale images.
    Preprocess(PreprocessArgs),
    /// Build a manifest from an image directory and a ground-truth CSV.
    Manifest(ManifestArgs),
    /// Stratified train/validation split.
    Split(SplitArgs),
    /// Oversample minority classes of the training records.
    Oversample(OversampleArgs),
    /// Class weights from training counts.
    Weights(WeightsArgs),
    /// Divide predictions by class priors and renormalize.
    Rescale(RescaleArgs),
    /// Blend regular and test-time-augmented predictions.
    TtaMerge(TtaMergeArgs),
    /// Average the predictions of several models.
    Ensemble(EnsembleArgs),
    /// Score predictions against ground truth.
    Score(ScoreArgs),
    /// One-vs-rest ROC curves as CSV and optionally SVG.
    Roc(RocArgs),
    /// Contact sheet of random augmentations of one image.
    AugmentPreview(AugmentPreviewArgs),
    /// Predict with an external backend process.
    Infer(InferArgs),
    /// Write the synthetic fixture dataset.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct PreprocessArgs {
    /// Manifest whose images are processed; the updated manifest goes to --out.
    #[arg(long, conflicts_with = "images", required_unless_present = "images")]
    pub manifest: Option<PathBuf>,
    /// Process every PNG/JPEG in a directory instead.
    #[arg(long)]
    pub images: Option<PathBuf>,
    /// Source dataset name used for --images (selects the bottom crop).
    #[arg(long, default_value = "unknown")]
    pub source: String,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Shorter side after rescaling.
    #[arg(long)]
    pub target: Option<u32>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub min_keep: Option<f64>,
    /// Box log path (default `<out-dir>/boxes.csv`).
    #[arg(long)]
    pub boxes: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ManifestArgs {
    #[arg(long)]
    pub images: PathBuf,
    #[arg(long)]
    pub truth: PathBuf,
    #[arg(long)]
    pub source: String,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Validation fraction per class.
    #[arg(long)]
    pub fraction: Option<f64>,
    /// Also write the ground truth of the validation records here.
    #[arg(long)]
    pub valid_truth: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OversampleArgs {
    #[arg(long)]
    pub manifest: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WeightMethod {
    Effective,
    Inverse,
}

#[derive(Debug, Args)]
pub struct WeightsArgs {
    /// Counts are taken from the non-validation records.
    #[arg(long, conflicts_with = "counts", required_unless_present = "counts")]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub counts: Option<PathBuf>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, value_enum, default_value_t = WeightMethod::Effective)]
    pub method: WeightMethod,
    /// Write the class counts used.
    #[arg(long)]
    pub counts_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RescaleArgs {
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub counts: PathBuf,
}

#[derive(Debug, Args)]
pub struct TtaMergeArgs {
    #[arg(long)]
    pub regular: PathBuf,
    #[arg(long, num_args = 1.., required = true)]
    pub augmented: Vec<PathBuf>,
    /// Weight of the regular prediction.
    #[arg(long)]
    pub beta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EnsembleArgs {
    #[arg(required = true)]
    pub members: Vec<PathBuf>,
    /// Comma-separated member weights.
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub truth: PathBuf,
    /// Training class counts, reported alongside the metrics.
    #[arg(long)]
    pub counts: Option<PathBuf>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub min_tpr: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RocArgs {
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub truth: PathBuf,
    /// Restrict to one category.
    #[arg(long)]
    pub category: Option<Category>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AugmentPreviewArgs {
    #[arg(long)]
    pub image: PathBuf,
    #[arg(long, default_value_t = 8)]
    pub count: u32,
    #[arg(long, default_value_t = 4)]
    pub columns: u32,
    /// Output side; overrides `augment.crop_pad_size`.
    #[arg(long)]
    pub size: Option<u32>,
    /// Show the eight test-time views instead of random samples.
    #[arg(long)]
    pub tta: bool,
    #[arg(long)]
    pub crop: Option<u32>,
}

#[derive(Debug, Args)]
pub struct InferArgs {
    /// Backend executable.
    #[arg(long)]
    pub backend: String,
    /// Argument passed to the backend (repeatable).
    #[arg(long = "backend-arg", allow_hyphen_values = true)]
    pub backend_args: Vec<String>,
    #[arg(long)]
    pub manifest: PathBuf,
    /// Only records of this split.
    #[arg(long, value_parser = parse_split)]
    pub split: Option<Split>,
    /// Seconds to wait for each response.
    #[arg(long)]
    pub timeout: Option<f64>,
    /// Also predict the eight test-time views, written to --tta-dir.
    #[arg(long, requires = "tta_dir")]
    pub tta: bool,
    #[arg(long)]
    pub tta_dir: Option<PathBuf>,
    /// Side of the TTA corner crops (default: shorter image side).
    #[arg(long)]
    pub crop: Option<u32>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub per_class: usize,
}

fn parse_split(s: &str) -> Result<Split, String> {
    s.parse().map_err(|e: crate::Error| e.to_string())
}

/// Parse `args` (program name first), run, and return the exit code:
/// 0 on success, 1 when the operation fails, 2 on usage errors.
pub fn main_with_args(args: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match commands::run(&cli, &args[1..]) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
