//! `pbrkit detect`: extract observations (synthetic study or image
//! manifest), compute signed differences for all ten measures, fit the
//! 10 x 3 quality matrix, persist the best model, and evaluate the alert.

use std::path::{Path, PathBuf};

use serde::Serialize;

use pbrkit_core::config::ToolkitConfig;
use pbrkit_core::regression::{check_alert, fit, select_model, AlertDecision, RegressionModel};
use pbrkit_core::similarity::{signed_difference, MeasureKind, ALL_MEASURES};
use pbrkit_core::vision::{
    extract_observation, load_png, synthetic_aging_study, ColorObservation,
};

use crate::errors::CliError;
use crate::files::{
    read_manifest, write_differences, write_fits, write_json, write_observations,
    DifferenceRow, FitRow, ObservationRow,
};
use crate::Ctx;

/// Gains cycled across synthetic frames; a modest spread keeps the aging
/// signal dominant over lighting (and the pure-green control unsaturated
/// at the top gain).
pub const SYNTHETIC_GAINS: [f64; 3] = [0.9, 1.0, 1.1];
pub const SYNTHETIC_FRAMES_PER_DAY: usize = 3;

/// The ten measures with parameters taken from the detection config.
fn configured_measures(config: &ToolkitConfig) -> Vec<MeasureKind> {
    ALL_MEASURES
        .iter()
        .map(|kind| match kind {
            MeasureKind::Hamming { .. } => MeasureKind::Hamming {
                quantization: config.detection.hamming_quantization,
            },
            MeasureKind::Minkowski { .. } => MeasureKind::Minkowski {
                p: config.detection.minkowski_p,
            },
            MeasureKind::Kulczynski { .. } => MeasureKind::Kulczynski {
                epsilon: config.detection.kulczynski_epsilon,
            },
            other => *other,
        })
        .collect()
}

fn synthetic_observations(ctx: &Ctx, days: usize) -> Result<Vec<ColorObservation>, CliError> {
    if days < 2 {
        return Err(CliError::usage("--synthetic needs at least 2 days"));
    }
    let spec = ctx.config.detection.sampling.with_seed(ctx.seed);
    Ok(synthetic_aging_study(
        days,
        SYNTHETIC_FRAMES_PER_DAY,
        &SYNTHETIC_GAINS,
        ctx.seed,
        &spec,
    )?)
}

/// Load and sample every manifest image, fanning the per-image work out
/// across worker threads. Results keep manifest order; failures are
/// reported after the join, in manifest order, so output and diagnostics
/// are independent of scheduling.
fn manifest_observations(ctx: &Ctx, manifest: &Path) -> Result<Vec<ColorObservation>, CliError> {
    let rows = read_manifest(manifest)?;
    if rows.is_empty() {
        return Err(CliError::usage(format!(
            "manifest {} lists no images",
            manifest.display()
        )));
    }
    let base = manifest.parent().unwrap_or_else(|| Path::new("."));
    let regions = ctx.config.detection.regions();
    let spec = ctx.config.detection.sampling.with_seed(ctx.seed);

    let workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(rows.len());
    let mut results: Vec<Option<Result<ColorObservation, CliError>>> = Vec::new();
    results.resize_with(rows.len(), || None);
    let results_slots: Vec<std::sync::Mutex<Option<Result<ColorObservation, CliError>>>> =
        results.into_iter().map(std::sync::Mutex::new).collect();

    std::thread::scope(|scope| {
        for w in 0..workers {
            let rows = &rows;
            let slots = &results_slots;
            let regions = &regions;
            let spec = &spec;
            scope.spawn(move || {
                let mut i = w;
                while i < rows.len() {
                    let row = &rows[i];
                    let path: PathBuf = if Path::new(&row.path).is_absolute() {
                        PathBuf::from(&row.path)
                    } else {
                        base.join(&row.path)
                    };
                    let result = load_png(&path)
                        .map_err(CliError::from)
                        .and_then(|img| {
                            if row.day < 0.0 {
                                return Err(CliError::domain(
                                    "vision",
                                    format!("negative day {} for {}", row.day, row.path),
                                ));
                            }
                            extract_observation(&img, regions, row.day, spec)
                                .map_err(CliError::from)
                        });
                    *slots[i].lock().expect("no poisoned slots") = Some(result);
                    i += workers;
                }
            });
        }
    });

    let mut observations = Vec::new();
    let mut failures = 0usize;
    for (slot, row) in results_slots.into_iter().zip(&rows) {
        let result = slot
            .into_inner()
            .expect("no poisoned slots")
            .expect("every index visited");
        match result {
            Ok(obs) => observations.push(obs),
            Err(e) => {
                failures += 1;
                eprintln!(
                    "{}",
                    serde_json::json!({
                        "warning": "image_skipped",
                        "path": row.path,
                        "message": e.message,
                    })
                );
            }
        }
    }
    if failures * 2 > rows.len() {
        return Err(CliError::domain(
            "vision",
            format!("{failures} of {} images failed", rows.len()),
        ));
    }
    Ok(observations)
}

#[derive(Serialize)]
struct AlertReport {
    day: f64,
    difference: f64,
    decision: AlertDecision,
}

pub fn run(
    ctx: &Ctx,
    synthetic: Option<usize>,
    manifest: Option<&Path>,
    measure_flag: Option<&str>,
) -> Result<(), CliError> {
    let observations = match (synthetic, manifest) {
        (Some(days), None) => synthetic_observations(ctx, days)?,
        (None, Some(path)) => manifest_observations(ctx, path)?,
        _ => {
            return Err(CliError::usage(
                "exactly one of --synthetic or --manifest is required",
            ))
        }
    };

    let selected_name = measure_flag.unwrap_or(&ctx.config.detection.measure);
    let mut detection = ctx.config.detection.clone();
    detection.measure = selected_name.to_string();
    let selected = detection.measure_kind()?;

    let kinds = configured_measures(&ctx.config);
    let mut diff_rows: Vec<DifferenceRow> = Vec::new();
    let mut skipped: Vec<(String, usize)> = Vec::new();
    for kind in &kinds {
        let mut misses = 0usize;
        for obs in &observations {
            match signed_difference(&obs.test_rgb, &obs.control_rgb, *kind) {
                Ok(d) => diff_rows.push(DifferenceRow {
                    measure: kind.name().to_string(),
                    day: obs.day,
                    value: d.value,
                }),
                Err(_) => misses += 1,
            }
        }
        if misses > 0 {
            skipped.push((kind.name().to_string(), misses));
        }
    }
    for (name, misses) in &skipped {
        eprintln!(
            "{}",
            serde_json::json!({
                "warning": "measure_undefined",
                "measure": name,
                "observations": misses,
            })
        );
    }

    let mut fit_rows: Vec<FitRow> = Vec::new();
    let mut selected_models: Vec<RegressionModel> = Vec::new();
    for kind in &kinds {
        let pairs: Vec<(f64, f64)> = diff_rows
            .iter()
            .filter(|r| r.measure == kind.name())
            .map(|r| (r.day, r.value))
            .collect();
        for degree in 1..=3 {
            match fit(&pairs, degree, *kind) {
                Ok(model) => {
                    fit_rows.push(FitRow {
                        measure: kind.name().to_string(),
                        degree,
                        rho: model.pearson_rho,
                        r2: model.r_squared,
                    });
                    if *kind == selected {
                        selected_models.push(model);
                    }
                }
                Err(e) => eprintln!(
                    "{}",
                    serde_json::json!({
                        "warning": "fit_failed",
                        "measure": kind.name(),
                        "degree": degree,
                        "message": e.to_string(),
                    })
                ),
            }
        }
    }

    let best = select_model(&selected_models).ok_or_else(|| {
        CliError::domain(
            "regression",
            format!("no usable fit for measure {selected_name}"),
        )
    })?;

    // Newest frame: the last observation of the maximum day.
    let newest = observations
        .iter()
        .max_by(|a, b| a.day.total_cmp(&b.day))
        .expect("non-empty observations");
    let newest_diff = signed_difference(&newest.test_rgb, &newest.control_rgb, selected)?;
    let decision = check_alert(&ctx.config.detection.alert, best, newest_diff.value)?;

    let obs_rows: Vec<ObservationRow> = observations.iter().map(ObservationRow::from).collect();
    let out = &ctx.out_dir;
    write_observations(&out.join("observations.csv"), &obs_rows)?;
    write_differences(&out.join("differences.csv"), &diff_rows)?;
    write_fits(&out.join("fits.csv"), &fit_rows)?;
    write_json(&out.join("model.json"), best)?;
    let report = AlertReport {
        day: newest.day,
        difference: newest_diff.value,
        decision: decision.clone(),
    };
    write_json(&out.join("alert.json"), &report)?;

    println!("observations: {}", observations.len());
    println!("fits: {} rows", fit_rows.len());
    println!(
        "best model: {} degree {} r2={:.4} rho={:.4}",
        selected_name, best.degree, best.r_squared, best.pearson_rho
    );
    println!("alert: {} ({})", decision.alert, decision.message);
    Ok(())
}

pub fn estimate(ctx: &Ctx, model_path: &Path, image_path: &Path) -> Result<(), CliError> {
    let text = std::fs::read_to_string(model_path)
        .map_err(|e| CliError::usage(format!("{}: {e}", model_path.display())))?;
    let model: RegressionModel = serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("{}: {e}", model_path.display())))?;

    let image = load_png(image_path)?;
    let regions = ctx.config.detection.regions();
    let spec = ctx.config.detection.sampling.with_seed(ctx.seed);
    // Capture day is what we are estimating; the observation slot is a
    // placeholder.
    let obs = extract_observation(&image, &regions, 0.0, &spec)?;
    let diff = signed_difference(&obs.test_rgb, &obs.control_rgb, model.measure)?;
    let estimate = pbrkit_core::regression::estimate_age(&model, diff.value)?;
    let decision = check_alert(&ctx.config.detection.alert, &model, diff.value)?;
    println!(
        "estimated_day={:.3} alert={} multiple_roots={} difference={:.3}",
        estimate.day, decision.alert, estimate.multiple_roots, diff.value
    );
    Ok(())
}
