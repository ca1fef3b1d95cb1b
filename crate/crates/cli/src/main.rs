//! `pbrkit`: command-line toolkit for modular photobioreactor facade
//! walls. Subcommands cover cell geometry, wall planning with pipe
//! routing, algae status detection, and plot reporting.
//!
//! Configuration comes from `--config` (or `./pbrkit.json` when present,
//! else built-in defaults), with CLI flags overriding individual fields
//! and `PBRKIT_SEED` as the seed fallback. Exit codes: 0 success, 1 domain
//! failure, 2 usage or configuration error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pbrkit_cli::errors::CliError;
use pbrkit_cli::{commands, Ctx};

#[derive(Parser)]
#[command(name = "pbrkit", version, about = "Photobioreactor facade wall toolkit")]
struct Cli {
    /// Config file; defaults to ./pbrkit.json when present.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// RNG seed; overrides PBRKIT_SEED and the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory; overrides the config io.output_dir.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Polyhedron properties, parametric cells, symmetry sweep.
    Geometry {
        #[command(subcommand)]
        action: GeometryAction,
    },
    /// Wall planning: tessellation, stacking, pipe routing, BOM.
    Wall {
        #[command(subcommand)]
        action: WallAction,
    },
    /// Algae status detection from synthetic frames or an image manifest.
    Detect {
        #[command(subcommand)]
        action: DetectAction,
    },
    /// SVG scatter/curve plots and a text summary from a detect run.
    Report {
        /// Directory holding differences.csv; defaults to the output dir.
        #[arg(long)]
        run_dir: Option<PathBuf>,
        /// Comma-separated measure names; default: all present.
        #[arg(long)]
        measures: Option<String>,
        /// Comma-separated polynomial degrees; default: 1,2,3.
        #[arg(long)]
        degrees: Option<String>,
    },
}

#[derive(Subcommand)]
enum GeometryAction {
    /// Print reference properties of the four regular polyhedra.
    Properties {
        /// tetrahedron, hexahedron, octahedron, or dodecahedron.
        #[arg(long)]
        shape: Option<String>,
    },
    /// Generate a parametric cell and the canonical family as OBJ.
    Generate {
        /// Twist angle in degrees, 0 to 45.
        #[arg(long)]
        angle: Option<f64>,
        /// Top-over-bottom side ratio.
        #[arg(long)]
        ratio: Option<f64>,
        /// Bottom square side length.
        #[arg(long, default_value_t = 1.0)]
        side: f64,
    },
    /// Emit the angle-by-ratio symmetry grid as CSV.
    Sweep,
}

#[derive(Subcommand)]
enum WallAction {
    /// Plan rows, stack them, and solve pipe rotations.
    Plan {
        /// Built-in scenario name (paper-demo).
        #[arg(long)]
        scenario: Option<String>,
        /// Row width target in model units.
        #[arg(long)]
        width: Option<f64>,
        /// Number of rows.
        #[arg(long)]
        rows: Option<usize>,
        /// Per-row horizontal offset (diagonal stacking only).
        #[arg(long)]
        offset: Option<f64>,
        /// vertical or diagonal.
        #[arg(long)]
        stacking: Option<String>,
    },
}

#[derive(Subcommand)]
enum DetectAction {
    /// Run the detection pipeline and persist observations, fits, model,
    /// and alert.
    Run {
        /// Generate a synthetic aging study over this many days.
        #[arg(long, conflicts_with = "manifest")]
        synthetic: Option<usize>,
        /// CSV manifest of image path and capture day.
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Measure for the persisted model (default from config).
        #[arg(long)]
        measure: Option<String>,
    },
    /// Estimate culture age for one image under a fitted model.
    Estimate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        image: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let ctx = Ctx::resolve(cli.config.as_deref(), cli.seed, cli.out.clone())?;
    match &cli.command {
        Command::Geometry { action } => match action {
            GeometryAction::Properties { shape } => {
                commands::geometry::properties(shape.as_deref())
            }
            GeometryAction::Generate { angle, ratio, side } => {
                commands::geometry::generate(&ctx, *angle, *ratio, *side)
            }
            GeometryAction::Sweep => commands::geometry::sweep(&ctx),
        },
        Command::Wall { action } => match action {
            WallAction::Plan {
                scenario,
                width,
                rows,
                offset,
                stacking,
            } => commands::wall::plan(
                &ctx,
                &commands::wall::PlanArgs {
                    scenario: scenario.clone(),
                    width: *width,
                    rows: *rows,
                    offset: *offset,
                    stacking: stacking.clone(),
                },
            ),
        },
        Command::Detect { action } => match action {
            DetectAction::Run {
                synthetic,
                manifest,
                measure,
            } => commands::detect::run(&ctx, *synthetic, manifest.as_deref(), measure.as_deref()),
            DetectAction::Estimate { model, image } => {
                commands::detect::estimate(&ctx, model, image)
            }
        },
        Command::Report {
            run_dir,
            measures,
            degrees,
        } => commands::report::run(
            &ctx,
            &commands::report::ReportArgs {
                run_dir: run_dir.clone(),
                measures: measures.clone(),
                degrees: degrees.clone(),
            },
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.machine_line());
            ExitCode::from(e.exit_code)
        }
    }
}
