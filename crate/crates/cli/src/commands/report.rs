//! `pbrkit report`: render difference-vs-day scatter plots with fitted
//! curves, one SVG per (measure, degree), plus a text summary table.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use pbrkit_core::regression::fit;
use pbrkit_core::similarity::MeasureKind;

use crate::errors::CliError;
use crate::files::{read_differences, write_atomic};
use crate::svg::scatter_curve;
use crate::Ctx;

const CURVE_SAMPLES: usize = 128;

pub struct ReportArgs {
    pub run_dir: Option<std::path::PathBuf>,
    pub measures: Option<String>,
    pub degrees: Option<String>,
}

fn parse_degrees(arg: Option<&str>) -> Result<Vec<usize>, CliError> {
    let Some(text) = arg else {
        return Ok(vec![1, 2, 3]);
    };
    let mut out = Vec::new();
    for part in text.split(',') {
        let d: usize = part
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("bad degree {part:?}")))?;
        if !(1..=3).contains(&d) {
            return Err(CliError::usage(format!("degree {d} outside 1..=3")));
        }
        if !out.contains(&d) {
            out.push(d);
        }
    }
    if out.is_empty() {
        return Err(CliError::usage("no degrees requested"));
    }
    Ok(out)
}

pub fn run(ctx: &Ctx, args: &ReportArgs) -> Result<(), CliError> {
    let run_dir: &Path = args.run_dir.as_deref().unwrap_or(&ctx.out_dir);
    let diff_path = run_dir.join("differences.csv");
    if !diff_path.exists() {
        return Err(CliError::domain(
            "report",
            format!("no data: {} does not exist", diff_path.display()),
        ));
    }
    let rows = read_differences(&diff_path)?;
    if rows.is_empty() {
        return Err(CliError::domain(
            "report",
            format!("no data: {} has no rows", diff_path.display()),
        ));
    }

    let present: BTreeSet<String> = rows.iter().map(|r| r.measure.clone()).collect();
    let measures: Vec<String> = match &args.measures {
        None => present.iter().cloned().collect(),
        Some(list) => {
            let mut out = Vec::new();
            for name in list.split(',').map(str::trim) {
                if MeasureKind::from_name(name).is_none() {
                    return Err(CliError::usage(format!("unknown measure {name:?}")));
                }
                if !present.contains(name) {
                    return Err(CliError::domain(
                        "report",
                        format!("measure {name:?} not present in {}", diff_path.display()),
                    ));
                }
                if !out.contains(&name.to_string()) {
                    out.push(name.to_string());
                }
            }
            out
        }
    };
    let degrees = parse_degrees(args.degrees.as_deref())?;

    let mut written = 0usize;
    let mut table = String::from("measure      degree  rho       r2\n");
    for name in &measures {
        let kind = MeasureKind::from_name(name).expect("validated above");
        let points: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| &r.measure == name)
            .map(|r| (r.day, r.value))
            .collect();
        for &degree in &degrees {
            let model = match fit(&points, degree, kind) {
                Ok(m) => m,
                Err(e) => {
                    eprintln!(
                        "{}",
                        serde_json::json!({
                            "warning": "fit_failed",
                            "measure": name,
                            "degree": degree,
                            "message": e.to_string(),
                        })
                    );
                    continue;
                }
            };
            let [lo, hi] = model.day_domain;
            let curve: Vec<(f64, f64)> = (0..=CURVE_SAMPLES)
                .map(|i| {
                    let d = lo + (hi - lo) * i as f64 / CURVE_SAMPLES as f64;
                    (d, model.predict(d))
                })
                .collect();
            let title = format!(
                "{name} degree {degree}  rho={:.4} r2={:.4}",
                model.pearson_rho, model.r_squared
            );
            let svg = scatter_curve(&title, &points, &curve);
            let file = ctx.out_dir.join(format!("report_{name}_deg{degree}.svg"));
            write_atomic(&file, svg.as_bytes())?;
            written += 1;
            let _ = writeln!(
                table,
                "{name:<12} {degree:>6}  {:>8.4}  {:>8.4}",
                model.pearson_rho, model.r_squared
            );
        }
    }
    if written == 0 {
        return Err(CliError::domain(
            "report",
            "no plot could be produced from the available data",
        ));
    }
    write_atomic(&ctx.out_dir.join("report.txt"), table.as_bytes())?;
    println!("wrote {written} plots and report.txt to {}", ctx.out_dir.display());
    Ok(())
}
