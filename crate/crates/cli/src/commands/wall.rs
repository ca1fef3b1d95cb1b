//! `pbrkit wall plan`: tessellate rows, stack, solve pipe rotations, emit
//! bill of materials, rotation solution, and a schematic rendering.

use std::collections::BTreeMap;

use serde::Serialize;

use pbrkit_core::assembly::{bill_of_materials, plan_wall, StackingMode, WallLayout};
use pbrkit_core::config::ToolkitConfig;
use pbrkit_core::geom::{canonical_cells, CellClass, CellGeometry, ALL_CLASSES};
use pbrkit_core::piping::{
    render_ascii, solve_configurations, CouplingAxes, Face, PipeType, PipingScenario,
    PortTemplate, PumpPosition,
};

use crate::errors::CliError;
use crate::files::{write_atomic, write_bom, write_json, write_solution, BomRow, SolutionRow};
use crate::Ctx;

pub struct PlanArgs {
    pub scenario: Option<String>,
    pub width: Option<f64>,
    pub rows: Option<usize>,
    pub offset: Option<f64>,
    pub stacking: Option<String>,
}

#[derive(Serialize)]
struct WallSummary {
    rows: usize,
    total_cells: usize,
    physical_width: f64,
    physical_height: f64,
    interface_ok: bool,
    solutions_found: usize,
    stacking: StackingMode,
}

/// Pipe templates for the demo wall: the bottom row is a pump trunk
/// (tee/straight alternation closed by an elbow that turns upward), upper
/// rows are crosses. The canonical orientations already connect, so the
/// all-zeros rotation assignment is a solution and the solver exits on its
/// first descent.
fn demo_pipe_templates(layout: &WallLayout) -> Vec<PortTemplate> {
    let mut out = Vec::with_capacity(layout.cell_instances.len());
    let bottom = layout
        .cell_instances
        .iter()
        .filter(|c| c.row_index == 0)
        .count();
    for (i, inst) in layout.cell_instances.iter().enumerate() {
        let t = if inst.row_index > 0 {
            PipeType::Cross
        } else if i + 1 == bottom && bottom > 1 {
            PipeType::Elbow
        } else if i % 2 == 0 {
            PipeType::Tee
        } else {
            PipeType::Straight
        };
        out.push(PortTemplate::canonical(t));
    }
    out
}

fn parse_pipe_names(names: &[String], count: usize) -> Result<Vec<PortTemplate>, CliError> {
    if names.is_empty() {
        return Err(CliError::config("piping.pipes must not be empty"));
    }
    let mut types = Vec::with_capacity(names.len());
    for n in names {
        let t = PipeType::from_name(n)
            .ok_or_else(|| CliError::config(format!("unknown pipe type {n:?}")))?;
        types.push(t);
    }
    Ok((0..count)
        .map(|i| PortTemplate::canonical(types[i % types.len()]))
        .collect())
}

pub fn plan(ctx: &Ctx, args: &PlanArgs) -> Result<(), CliError> {
    let demo = match args.scenario.as_deref() {
        Some("paper-demo") => true,
        Some(other) => {
            return Err(CliError::usage(format!(
                "unknown scenario {other:?}; the only built-in scenario is paper-demo"
            )))
        }
        None => false,
    };
    if demo && (args.width.is_some() || args.rows.is_some()) {
        return Err(CliError::usage(
            "--scenario paper-demo fixes width and rows; drop the conflicting flags",
        ));
    }
    let config = if demo {
        ToolkitConfig::paper_demo()
    } else {
        ctx.config.clone()
    };

    let target = args.width.unwrap_or(config.wall.target_width);
    let rows = args.rows.unwrap_or(config.wall.rows);
    let offset = args.offset.unwrap_or(config.wall.row_offset);
    let stacking = match args.stacking.as_deref() {
        None => config.wall.stacking,
        Some("vertical") => StackingMode::Vertical,
        Some("diagonal") => StackingMode::Diagonal,
        Some(other) => {
            return Err(CliError::usage(format!(
                "unknown stacking {other:?}; expected vertical or diagonal"
            )))
        }
    };

    let family = canonical_cells(&config.geometry.family())?;
    let widths: BTreeMap<CellClass, f64> = ALL_CLASSES
        .iter()
        .zip(config.geometry.widths)
        .map(|(c, w)| (*c, w))
        .collect();
    let geometries: BTreeMap<CellClass, CellGeometry> = family
        .iter()
        .map(|g| (g.cell_class.expect("tagged"), g.clone()))
        .collect();

    let layout = plan_wall(
        target,
        rows,
        &widths,
        config.wall.tolerance,
        stacking,
        offset,
        ctx.seed,
    )?;
    let interface_ok = pbrkit_core::assembly::interface_check(&layout, &geometries);

    let pipes = if demo {
        demo_pipe_templates(&layout)
    } else {
        parse_pipe_names(&config.piping.pipes, layout.cell_instances.len())?
    };
    let pump = PumpPosition {
        instance: config.piping.pump_instance,
        face: Face::from_name(&config.piping.pump_face).ok_or_else(|| {
            CliError::config(format!(
                "unknown pump face {:?}; expected left, top, right, or bottom",
                config.piping.pump_face
            ))
        })?,
    };
    if pump.instance >= layout.cell_instances.len() {
        return Err(CliError::config(format!(
            "pump instance {} out of range for {} cells",
            pump.instance,
            layout.cell_instances.len()
        )));
    }
    let scenario = PipingScenario {
        layout: &layout,
        widths: &widths,
        pipes: &pipes,
        pump,
        coupling: CouplingAxes {
            horizontal: config.piping.coupling_horizontal,
            vertical: config.piping.coupling_vertical,
        },
    };
    let solutions = solve_configurations(&scenario, config.piping.solutions_limit.max(1));
    let Some(first) = solutions.first() else {
        return Err(CliError::domain(
            "piping",
            "no rotation assignment connects every cell to the pump; \
             check pipe types, pump placement, and coupling axes",
        ));
    };

    let pipe_names: Vec<String> = pipes
        .iter()
        .map(|p| p.pipe_type().name().to_string())
        .collect();
    let bom = bill_of_materials(&layout, config.geometry.height, config.wall.unit_scale, &pipe_names);

    let mut bom_rows = Vec::new();
    for (class, count) in &bom.class_counts {
        bom_rows.push(BomRow {
            kind: "cell".into(),
            item: class.name().into(),
            count: *count,
        });
    }
    for (name, count) in &bom.pipe_type_counts {
        bom_rows.push(BomRow {
            kind: "pipe".into(),
            item: name.clone(),
            count: *count,
        });
    }
    bom_rows.push(BomRow {
        kind: "total".into(),
        item: "cells".into(),
        count: bom.total_cells,
    });

    let solution_rows: Vec<SolutionRow> = first
        .steps
        .iter()
        .enumerate()
        .map(|(instance, &rotation_step)| SolutionRow {
            instance,
            rotation_step,
        })
        .collect();

    let summary = WallSummary {
        rows: layout.rows.len(),
        total_cells: bom.total_cells,
        physical_width: bom.physical_width,
        physical_height: bom.physical_height,
        interface_ok,
        solutions_found: solutions.len(),
        stacking,
    };

    let out = &ctx.out_dir;
    write_bom(&out.join("bom.csv"), &bom_rows)?;
    write_solution(&out.join("solution.csv"), &solution_rows)?;
    write_atomic(
        &out.join("wall.txt"),
        render_ascii(&scenario, first).as_bytes(),
    )?;
    write_json(&out.join("wall.json"), &summary)?;

    println!(
        "planned {} cells in {} rows, {:.3} x {:.3} physical units",
        bom.total_cells,
        layout.rows.len(),
        bom.physical_width,
        bom.physical_height
    );
    println!(
        "interface_ok={} piping_solutions={}",
        interface_ok,
        solutions.len()
    );
    Ok(())
}
