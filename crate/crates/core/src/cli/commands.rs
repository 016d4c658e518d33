use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use rayon::prelude::*;

use super::config::{Config, LoadedConfig};
use super::infer::{infer, inference_records, run_backend, Backend};
use super::plot::roc_svg;
use super::provenance::Provenance;
use super::*;
use crate::aggregate::{ensemble_mean, ensemble_weighted_mean, tta_merge};
use crate::augment::{apply_transform, contact_sheet, sample_transform, tta_variants, AugmentationPolicy, TTA_VARIANTS};
use crate::datamodel::{
    align, parse_counts, parse_ground_truth, parse_manifest, parse_predictions, write_counts,
    write_ground_truth, write_manifest_to, write_predictions, write_predictions_to, ClassCounts, GroundTruthSet,
    Manifest, ManifestRecord, PredictionSet, NUM_CLASSES,
};
use crate::error::{Error, Result};
use crate::imbalance::{effective_weights, inverse_frequency_weights, oversample_manifest, prior_rescale, split_manifest};
use crate::metrics::{full_report, roc_curve, ReportConfig};
use crate::preprocess::{preprocess_batch, write_box_log, write_failure_log, PreprocessConfig};
use crate::tensor::ImageTensor;

struct Ctx<'a> {
    out: Option<&'a Path>,
    config: Config,
    provenance: Provenance,
    seed: u64,
}

impl Ctx<'_> {
    /// Write the primary artifact to `--out` (plus sidecar) or stdout.
    fn emit(&self, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
        match self.out {
            Some(path) => {
                let file = File::create(path).map_err(|e| Error::io(path, e))?;
                let mut w = BufWriter::new(file);
                f(&mut w)?;
                w.flush().map_err(|e| Error::io(path, e))?;
                self.provenance.write_beside(path)
            }
            None => {
                let mut lock = io::stdout().lock();
                f(&mut lock)?;
                lock.flush().map_err(|e| Error::io("<stdout>", e))
            }
        }
    }

    fn require_out(&self) -> Result<&Path> {
        self.out
            .ok_or_else(|| Error::InvalidArgument("this command needs --out".into()))
    }

    fn provenance_in(&self, dir: &Path) -> Result<()> {
        let path = dir.join("provenance");
        fs::write(&path, self.provenance.render()).map_err(|e| Error::io(path, e))
    }
}

fn stdout_io(e: io::Error) -> Error {
    Error::io("<stdout>", e)
}

pub(super) fn run(cli: &Cli, args: &[String]) -> Result<()> {
    let loaded = LoadedConfig::load(cli.config.as_deref())?;
    let seed = cli.seed.or(loaded.config.seed).unwrap_or(0);
    let ctx = Ctx {
        out: cli.out.as_deref(),
        provenance: Provenance::new(args, seed, loaded.digest),
        config: loaded.config,
        seed,
    };
    match &cli.command {
        Command::Preprocess(a) => preprocess(&ctx, a),
        Command::Manifest(a) => manifest(&ctx, a),
        Command::Split(a) => split(&ctx, a),
        Command::Oversample(a) => {
            let m = oversample_manifest(&parse_manifest(&a.manifest)?, ctx.seed)?;
            ctx.emit(|w| write_manifest_to(&m, w))
        }
        Command::Weights(a) => weights(&ctx, a),
        Command::Rescale(a) => {
            let p = prior_rescale(&parse_predictions(&a.pred)?, &parse_counts(&a.counts)?)?;
            ctx.emit(|w| write_predictions_to(&p, w))
        }
        Command::TtaMerge(a) => {
            let regular = parse_predictions(&a.regular)?;
            let augmented = a.augmented.iter().map(parse_predictions).collect::<Result<Vec<_>>>()?;
            let merged = tta_merge(&regular, &augmented, a.beta.unwrap_or(ctx.config.tta.beta))?;
            ctx.emit(|w| write_predictions_to(&merged, w))
        }
        Command::Ensemble(a) => {
            let members = a.members.iter().map(parse_predictions).collect::<Result<Vec<_>>>()?;
            let merged = match &a.weights {
                Some(weights) => ensemble_weighted_mean(&members, weights)?,
                None => ensemble_mean(&members)?,
            };
            ctx.emit(|w| write_predictions_to(&merged, w))
        }
        Command::Score(a) => score(&ctx, a),
        Command::Roc(a) => roc(&ctx, a),
        Command::AugmentPreview(a) => augment_preview(&ctx, a),
        Command::Infer(a) => infer_cmd(&ctx, a),
        Command::Synth(a) => {
            crate::synthetic::write_dataset(&a.out_dir, ctx.seed, a.per_class)?;
            ctx.provenance_in(&a.out_dir)
        }
    }
}

/// PNG and JPEG files directly inside `dir`, sorted by name.
fn list_images(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
        if path.is_file() && matches!(ext.as_deref(), Some("png" | "jpg" | "jpeg")) {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

fn path_string(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

fn preprocess(ctx: &Ctx, a: &PreprocessArgs) -> Result<()> {
    let section = &ctx.config.preprocess;
    let target = a.target.or(section.target_short_side).ok_or_else(|| {
        Error::Config("target short side is required (--target or preprocess.target_short_side)".into())
    })?;
    let config = PreprocessConfig {
        threshold: a.threshold.unwrap_or(section.threshold),
        min_keep: a.min_keep.unwrap_or(section.min_keep),
        target_short_side: target,
        bottom_crop: section.bottom_crop.clone(),
    };
    if !(0.0..=255.0).contains(&config.threshold) || !(config.min_keep > 0.0 && config.min_keep <= 1.0) {
        return Err(Error::InvalidArgument("threshold must lie in [0, 255] and min_keep in (0, 1]".into()));
    }
    let input = match (&a.manifest, &a.images) {
        (Some(m), _) => parse_manifest(m)?,
        (None, Some(dir)) => {
            // labels are unknown here and the manifest is not written out
            let records = list_images(dir)?
                .iter()
                .map(|p| ManifestRecord::new(path_string(p), a.source.clone(), crate::Category::Unk))
                .collect();
            Manifest::new(records)?
        }
        (None, None) => unreachable!("clap requires --manifest or --images"),
    };
    let outcome = preprocess_batch(&input, &a.out_dir, &config)?;
    let boxes = a.boxes.clone().unwrap_or_else(|| a.out_dir.join("boxes.csv"));
    write_box_log(&outcome.boxes, &boxes)?;
    write_failure_log(&outcome.failures, &a.out_dir.join("failures.csv"))?;
    if a.manifest.is_some() {
        ctx.emit(|w| write_manifest_to(&outcome.manifest, w))?;
    }
    ctx.provenance_in(&a.out_dir)?;
    if !outcome.failures.is_empty() {
        return Err(Error::Incomplete(format!(
            "{} of {} images failed; see {}",
            outcome.failures.len(),
            outcome.failures.len() + outcome.boxes.len(),
            a.out_dir.join("failures.csv").display()
        )));
    }
    Ok(())
}

fn manifest(ctx: &Ctx, a: &ManifestArgs) -> Result<()> {
    let truth = parse_ground_truth(&a.truth)?;
    let mut records = Vec::new();
    let mut unlabeled = Vec::new();
    for path in list_images(&a.images)? {
        let id = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        match truth.label_of(&id) {
            Some(label) => records.push(ManifestRecord::new(path_string(&path), a.source.clone(), label)),
            None => unlabeled.push(id),
        }
    }
    if !unlabeled.is_empty() {
        return Err(Error::InvalidArgument(format!("no ground truth for [{}]", unlabeled.join(", "))));
    }
    let m = Manifest::new(records)?;
    ctx.emit(|w| write_manifest_to(&m, w))
}

fn split(ctx: &Ctx, a: &SplitArgs) -> Result<()> {
    let fraction = a.fraction.unwrap_or(ctx.config.imbalance.valid_fraction);
    let m = split_manifest(&parse_manifest(&a.manifest)?, fraction, ctx.seed)?;
    ctx.emit(|w| write_manifest_to(&m, w))?;
    if let Some(path) = &a.valid_truth {
        let valid: Vec<&ManifestRecord> = m.records().iter().filter(|r| r.split == Split::Valid).collect();
        let truth = GroundTruthSet::new(
            valid.iter().map(|r| r.image_id().to_string()).collect(),
            valid.iter().map(|r| r.label).collect(),
        )?;
        write_ground_truth(&truth, path)?;
    }
    Ok(())
}

/// Class counts over the records not held out for validation.
fn training_counts(m: &Manifest) -> ClassCounts {
    let mut counts = [0u64; NUM_CLASSES];
    for r in m.records().iter().filter(|r| r.split != Split::Valid) {
        counts[r.label.index()] += 1;
    }
    ClassCounts::new(counts)
}

fn weights(ctx: &Ctx, a: &WeightsArgs) -> Result<()> {
    let counts = match (&a.manifest, &a.counts) {
        (Some(m), _) => training_counts(&parse_manifest(m)?),
        (None, Some(c)) => parse_counts(c)?,
        (None, None) => unreachable!("clap requires --manifest or --counts"),
    };
    let beta = a.beta.unwrap_or(ctx.config.imbalance.beta);
    let w = match a.method {
        WeightMethod::Effective => effective_weights(&counts, beta)?,
        WeightMethod::Inverse => inverse_frequency_weights(&counts)?,
    };
    if let Some(path) = &a.counts_out {
        write_counts(&counts, path)?;
    }
    if ctx.out.is_some() {
        ctx.emit(|out| {
            writeln!(out, "category,weight").map_err(stdout_io)?;
            for c in crate::Category::ALL {
                writeln!(out, "{c},{}", w.get(c)).map_err(stdout_io)?;
            }
            Ok(())
        })?;
    }
    let mut block = String::new();
    match a.method {
        WeightMethod::Effective => block.push_str(&format!("method=effective\nbeta={beta}\n")),
        WeightMethod::Inverse => block.push_str("method=inverse\n"),
    }
    for c in crate::Category::ALL {
        block.push_str(&format!("count.{c}={}\n", counts.get(c)));
    }
    for c in crate::Category::ALL {
        block.push_str(&format!("weight.{c}={}\n", w.get(c)));
    }
    io::stdout().write_all(block.as_bytes()).map_err(stdout_io)
}

fn score(ctx: &Ctx, a: &ScoreArgs) -> Result<()> {
    let (preds, truth) = align(&parse_predictions(&a.pred)?, &parse_ground_truth(&a.truth)?)?;
    let counts = a.counts.as_ref().map(parse_counts).transpose()?;
    let config = ReportConfig {
        threshold: a.threshold.unwrap_or(ctx.config.metrics.threshold),
        min_tpr: a.min_tpr.unwrap_or(ctx.config.metrics.min_tpr),
    };
    let report = full_report(&preds, &truth, counts.as_ref(), config)?;
    ctx.emit(|w| w.write_all(report.to_key_values().as_bytes()).map_err(stdout_io))?;
    let mut stdout = io::stdout().lock();
    if ctx.out.is_none() {
        writeln!(stdout).map_err(stdout_io)?;
    }
    stdout.write_all(report.to_table().as_bytes()).map_err(stdout_io)
}

fn roc(ctx: &Ctx, a: &RocArgs) -> Result<()> {
    let (preds, truth) = align(&parse_predictions(&a.pred)?, &parse_ground_truth(&a.truth)?)?;
    let categories: Vec<crate::Category> = match a.category {
        Some(c) => vec![c],
        None => crate::Category::ALL.to_vec(),
    };
    let mut curves = Vec::new();
    for c in categories {
        match roc_curve(&preds.column(c), &truth.binary_labels(c)) {
            Ok(curve) => curves.push((c, curve)),
            Err(e) => eprintln!("skipping {c}: {e}"),
        }
    }
    ctx.emit(|w| {
        writeln!(w, "category,threshold,fpr,tpr").map_err(stdout_io)?;
        for (c, curve) in &curves {
            for p in curve.points() {
                writeln!(w, "{c},{},{},{}", p.threshold, p.fpr, p.tpr).map_err(stdout_io)?;
            }
        }
        Ok(())
    })?;
    if let Some(path) = &a.svg {
        fs::write(path, roc_svg(&curves)).map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

fn augment_preview(ctx: &Ctx, a: &AugmentPreviewArgs) -> Result<()> {
    let out = ctx.require_out()?;
    let img = ImageTensor::load(&a.image)?;
    let images = if a.tta {
        let crop = a.crop.or(ctx.config.tta.crop_size).unwrap_or(img.width().min(img.height()));
        tta_variants(&img, ctx.config.tta.scale, crop)?
    } else {
        let size = a
            .size
            .or(ctx.config.augment.as_ref().map(|p| p.crop_pad_size))
            .ok_or_else(|| Error::Config("output size is required (--size or augment.crop_pad_size)".into()))?;
        let policy = AugmentationPolicy {
            crop_pad_size: size,
            ..ctx.config.augment.clone().unwrap_or_else(|| AugmentationPolicy::new(size))
        };
        policy.validate()?;
        let stem = a.image.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        (0..a.count)
            .into_par_iter()
            .map(|i| apply_transform(&img, &sample_transform(&policy, ctx.seed, &format!("{stem}/{i}"))))
            .collect::<Result<Vec<_>>>()?
    };
    contact_sheet(&images, a.columns)?.save_png(out)?;
    ctx.provenance.write_beside(out)
}

fn infer_cmd(ctx: &Ctx, a: &InferArgs) -> Result<()> {
    let secs = a.timeout.unwrap_or(ctx.config.infer.timeout_secs);
    if !(secs > 0.0 && secs.is_finite()) {
        return Err(Error::InvalidArgument(format!("timeout must be positive, got {secs}")));
    }
    let backend = Backend::new(a.backend.clone(), a.backend_args.clone(), Duration::from_secs_f64(secs));
    let manifest = parse_manifest(&a.manifest)?;
    let preds = infer(&backend, &manifest, a.split)?;
    ctx.emit(|w| write_predictions_to(&preds, w))?;

    if a.tta {
        let dir = a.tta_dir.as_ref().expect("clap enforces --tta-dir");
        let records = inference_records(&manifest, a.split);
        let image_dir = dir.join("images");
        fs::create_dir_all(&image_dir).map_err(|e| Error::io(&image_dir, e))?;
        let crop = a.crop.or(ctx.config.tta.crop_size);
        let scale = ctx.config.tta.scale;
        // variant_paths[i][k]: view k of record i
        let variant_paths: Vec<Vec<String>> = records
            .par_iter()
            .map(|(id, path)| {
                let img = ImageTensor::load(path)?;
                let side = crop.unwrap_or(img.width().min(img.height()));
                tta_variants(&img, scale, side)?
                    .iter()
                    .enumerate()
                    .map(|(k, v)| {
                        let p = image_dir.join(format!("{id}_tta{k}.png"));
                        v.save_png(&p)?;
                        Ok(path_string(&p))
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        let requests: Vec<String> = (0..TTA_VARIANTS)
            .flat_map(|k| variant_paths.iter().map(move |v| v[k].clone()))
            .collect();
        let rows = run_backend(&backend, &requests)?;
        let ids: Vec<String> = records.iter().map(|(id, _)| id.clone()).collect();
        for (k, chunk) in rows.chunks(ids.len().max(1)).enumerate().take(TTA_VARIANTS) {
            let set = PredictionSet::new(ids.clone(), chunk.to_vec())?;
            write_predictions(&set, dir.join(format!("tta_{k}.csv")))?;
        }
        if ids.is_empty() {
            for k in 0..TTA_VARIANTS {
                write_predictions(&PredictionSet::empty(), dir.join(format!("tta_{k}.csv")))?;
            }
        }
        ctx.provenance_in(dir)?;
    }
    Ok(())
}
