//! `pbrkit geometry`: reference polyhedron properties, parametric cell
//! generation with OBJ export, and the angle/ratio symmetry sweep.

use std::fmt::Write as _;

use serde::Serialize;

use pbrkit_core::geom::{
    canonical_cells, generate_cell, mesh_to_obj, polyhedron_properties, symmetry_check,
    BasePolygon, CellParams, PropertyRecord, ShapeName, ALL_SHAPES,
};

use crate::errors::CliError;
use crate::files::write_atomic;
use crate::Ctx;

fn base_polygon_name(b: BasePolygon) -> &'static str {
    match b {
        BasePolygon::EquilateralTriangle => "equilateral_triangle",
        BasePolygon::Square => "square",
        BasePolygon::RegularPentagon => "regular_pentagon",
    }
}

fn property_line(rec: &PropertyRecord) -> String {
    format!(
        "{} V={} E={} F={} base={} angle={:.0} ratio={:.5} parallel={}",
        rec.shape_name.name(),
        rec.vertex_count,
        rec.side_count,
        rec.surface_count,
        base_polygon_name(rec.base_polygon),
        rec.interior_angle_deg,
        rec.height_side_ratio,
        if rec.surfaces_parallel { "Y" } else { "N" },
    )
}

pub fn properties(shape: Option<&str>) -> Result<(), CliError> {
    let shapes: Vec<ShapeName> = match shape {
        Some(name) => vec![ShapeName::from_name(name).ok_or_else(|| {
            CliError::usage(format!(
                "unknown shape {name:?}; expected one of tetrahedron, hexahedron, octahedron, dodecahedron"
            ))
        })?],
        None => ALL_SHAPES.to_vec(),
    };
    for s in shapes {
        println!("{}", property_line(&polyhedron_properties(s)));
    }
    Ok(())
}

pub fn generate(
    ctx: &Ctx,
    angle: Option<f64>,
    ratio: Option<f64>,
    side: f64,
) -> Result<(), CliError> {
    let g = &ctx.config.geometry;
    let params = CellParams {
        angle_difference_deg: angle.unwrap_or(g.angle),
        side_ratio: ratio.unwrap_or(g.ratio),
        height: g.height,
        bottom_side: side,
    };
    let cell = generate_cell(&params)?;
    let family = canonical_cells(&g.family())?;

    let out = &ctx.out_dir;
    write_atomic(&out.join("cell.obj"), mesh_to_obj(&cell.mesh)?.as_bytes())?;
    for geo in &family {
        let class = geo.cell_class.expect("canonical cells are tagged");
        let name = format!("family_{}.obj", class.name().to_lowercase());
        write_atomic(&out.join(name), mesh_to_obj(&geo.mesh)?.as_bytes())?;
    }

    let sym = symmetry_check(&cell.mesh);
    let mut report = String::new();
    for s in ALL_SHAPES {
        let _ = writeln!(report, "{}", property_line(&polyhedron_properties(s)));
    }
    let _ = writeln!(report);
    let _ = writeln!(
        report,
        "cell angle={:.3} ratio={:.5} side={:.3} height={:.3}",
        params.angle_difference_deg, params.side_ratio, params.bottom_side, params.height
    );
    let _ = writeln!(
        report,
        "cell width={:.6} vertices={} faces={} edges={}",
        cell.width,
        cell.mesh.vertices.len(),
        cell.mesh.faces.len(),
        cell.mesh.edge_count()
    );
    let _ = writeln!(
        report,
        "cell axisymmetric={} centrosymmetric={}",
        sym.axisymmetric, sym.centrosymmetric
    );
    write_atomic(&out.join("properties.txt"), report.as_bytes())?;

    println!(
        "wrote cell.obj, family_a.obj, family_b.obj, family_c.obj, properties.txt to {}",
        out.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct SweepRow {
    angle: f64,
    ratio: f64,
    vertices: usize,
    faces: usize,
    width: f64,
    axisymmetric: bool,
    centrosymmetric: bool,
}

/// The 4 x 2 angle/ratio grid: twists 0/15/30/45 degrees against side
/// ratios 1 and sqrt 2.
pub fn sweep(ctx: &Ctx) -> Result<(), CliError> {
    let g = &ctx.config.geometry;
    let mut rows = Vec::with_capacity(8);
    for angle in [0.0, 15.0, 30.0, 45.0] {
        for ratio in [1.0, 2.0_f64.sqrt()] {
            let params = CellParams {
                angle_difference_deg: angle,
                side_ratio: ratio,
                height: g.height,
                bottom_side: 1.0,
            };
            let cell = generate_cell(&params)?;
            let sym = symmetry_check(&cell.mesh);
            rows.push(SweepRow {
                angle,
                ratio,
                vertices: cell.mesh.vertices.len(),
                faces: cell.mesh.faces.len(),
                width: cell.width,
                axisymmetric: sym.axisymmetric,
                centrosymmetric: sym.centrosymmetric,
            });
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in &rows {
        w.serialize(row)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::domain("csv", e.to_string()))?;
    let path = ctx.out_dir.join("sweep.csv");
    write_atomic(&path, &bytes)?;
    println!("wrote {} rows to {}", rows.len(), path.display());
    Ok(())
}
