//! Row tessellation, wall stacking, bills of materials, and the magnetic
//! connection feasibility model.
//!
//! A row is an ordered composition of cell classes whose widths sum to a
//! target within tolerance. Randomized rows come from seeded backtracking;
//! the exhaustive enumerator doubles as its oracle.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{CellClass, CellGeometry};

#[derive(Debug, Error, PartialEq)]
pub enum AssemblyError {
    #[error("no composition of cell widths reaches {target} within {tolerance}")]
    NoComposition { target: f64, tolerance: f64 },
    #[error("vertical stacking cannot carry a row offset (got {0})")]
    OffsetInVerticalMode(f64),
    #[error("vertical stacking requires rows of a common target width")]
    MismatchedRows,
    #[error("invalid magnet spec: {0}")]
    InvalidMagnetSpec(String),
}

/// One wall row: an ordered cell-class sequence hitting `target_width`
/// within `tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowPlan {
    pub sequence: Vec<CellClass>,
    pub total_width: f64,
    pub target_width: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StackingMode {
    Vertical,
    Diagonal,
}

/// A placed cell: class, row, left-edge x, and the pipe rotation step the
/// connectivity solver assigns later (0 until then).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellInstance {
    pub cell_class: CellClass,
    pub row_index: usize,
    pub x_position: f64,
    pub rotation_step: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WallLayout {
    pub rows: Vec<RowPlan>,
    pub stacking_mode: StackingMode,
    pub row_offset: f64,
    pub cell_instances: Vec<CellInstance>,
}

pub const DEFAULT_ROW_TOLERANCE: f64 = 1e-6;

fn class_width(widths: &BTreeMap<CellClass, f64>, class: CellClass) -> f64 {
    widths[&class]
}

fn validate_widths(widths: &BTreeMap<CellClass, f64>) {
    assert!(!widths.is_empty(), "at least one cell class width required");
    for (class, w) in widths {
        assert!(*w > 0.0, "width of class {} must be positive", class.name());
    }
}

/// Seeded-random row composition. The class order is reshuffled at every
/// backtracking depth, so distinct seeds explore distinct compositions while
/// a fixed seed always reproduces the same row.
pub fn tessellate_row(
    target_width: f64,
    widths: &BTreeMap<CellClass, f64>,
    tolerance: f64,
    seed: u64,
) -> Result<RowPlan, AssemblyError> {
    assert!(target_width > 0.0, "target width must be positive");
    validate_widths(widths);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let classes: Vec<CellClass> = widths.keys().copied().collect();
    let mut sequence = Vec::new();

    fn descend(
        remaining: f64,
        tolerance: f64,
        widths: &BTreeMap<CellClass, f64>,
        classes: &[CellClass],
        rng: &mut ChaCha8Rng,
        sequence: &mut Vec<CellClass>,
    ) -> bool {
        if remaining.abs() <= tolerance && !sequence.is_empty() {
            return true;
        }
        let mut order = classes.to_vec();
        order.shuffle(rng);
        for class in order {
            let w = class_width(widths, class);
            if w > remaining + tolerance {
                continue;
            }
            sequence.push(class);
            if descend(remaining - w, tolerance, widths, classes, rng, sequence) {
                return true;
            }
            sequence.pop();
        }
        false
    }

    if descend(
        target_width,
        tolerance,
        widths,
        &classes,
        &mut rng,
        &mut sequence,
    ) {
        let total_width = sequence.iter().map(|&c| class_width(widths, c)).sum();
        Ok(RowPlan {
            sequence,
            total_width,
            target_width,
            tolerance,
        })
    } else {
        Err(AssemblyError::NoComposition {
            target: target_width,
            tolerance,
        })
    }
}

/// All order-sensitive compositions within tolerance, in lexicographic
/// class order, truncated at `limit`.
pub fn enumerate_row_compositions(
    target_width: f64,
    widths: &BTreeMap<CellClass, f64>,
    tolerance: f64,
    limit: usize,
) -> Vec<RowPlan> {
    assert!(target_width > 0.0, "target width must be positive");
    validate_widths(widths);
    let classes: Vec<CellClass> = widths.keys().copied().collect();
    let mut out: Vec<RowPlan> = Vec::new();
    let mut sequence: Vec<CellClass> = Vec::new();

    #[allow(clippy::too_many_arguments)]
    fn descend(
        remaining: f64,
        target: f64,
        tolerance: f64,
        widths: &BTreeMap<CellClass, f64>,
        classes: &[CellClass],
        sequence: &mut Vec<CellClass>,
        out: &mut Vec<RowPlan>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        if remaining.abs() <= tolerance && !sequence.is_empty() {
            let total_width = sequence.iter().map(|&c| widths[&c]).sum();
            out.push(RowPlan {
                sequence: sequence.clone(),
                total_width,
                target_width: target,
                tolerance,
            });
            // A completed row may still extend under a loose tolerance;
            // keep descending.
        }
        for &class in classes {
            let w = widths[&class];
            if w > remaining + tolerance {
                continue;
            }
            sequence.push(class);
            descend(
                remaining - w,
                target,
                tolerance,
                widths,
                classes,
                sequence,
                out,
                limit,
            );
            sequence.pop();
            if out.len() >= limit {
                return;
            }
        }
    }

    descend(
        target_width,
        target_width,
        tolerance,
        widths,
        &classes,
        &mut sequence,
        &mut out,
        limit,
    );
    out
}

/// Stack rows into a wall. Diagonal mode shifts row k by `k * row_offset`;
/// an offset stands in for curvature (offset o over cell height H bends the
/// wall onto an arc of radius roughly H * W / o for row width W).
pub fn stack_rows(
    row_plans: &[RowPlan],
    widths: &BTreeMap<CellClass, f64>,
    mode: StackingMode,
    row_offset: f64,
) -> Result<WallLayout, AssemblyError> {
    if mode == StackingMode::Vertical && row_offset != 0.0 {
        return Err(AssemblyError::OffsetInVerticalMode(row_offset));
    }
    if mode == StackingMode::Vertical
        && row_plans
            .windows(2)
            .any(|w| w[0].target_width != w[1].target_width)
    {
        return Err(AssemblyError::MismatchedRows);
    }
    let mut cell_instances = Vec::new();
    for (row_index, row) in row_plans.iter().enumerate() {
        let mut x = row_offset * row_index as f64;
        for &class in &row.sequence {
            cell_instances.push(CellInstance {
                cell_class: class,
                row_index,
                x_position: x,
                rotation_step: 0,
            });
            x += class_width(widths, class);
        }
    }
    Ok(WallLayout {
        rows: row_plans.to_vec(),
        stacking_mode: mode,
        row_offset,
        cell_instances,
    })
}

fn has_axis_normal_face_at(geometry: &CellGeometry, x_target: f64, tol: f64) -> bool {
    let mesh = &geometry.mesh;
    mesh.faces.iter().any(|face| {
        face.iter()
            .all(|&i| (mesh.vertices[i].x - x_target).abs() <= tol)
            && face.len() >= 3
    })
}

/// True iff every interface between horizontally adjacent cells is a planar
/// vertical wall perpendicular to the row axis (within 1e-6), so bricks can
/// slide straight out.
pub fn interface_check(
    layout: &WallLayout,
    geometries: &BTreeMap<CellClass, CellGeometry>,
) -> bool {
    let tol = 1e-6;
    let mut by_row: BTreeMap<usize, Vec<&CellInstance>> = BTreeMap::new();
    for inst in &layout.cell_instances {
        by_row.entry(inst.row_index).or_default().push(inst);
    }
    for cells in by_row.values() {
        for pair in cells.windows(2) {
            let (left, right) = (pair[0], pair[1]);
            let (Some(lg), Some(rg)) = (
                geometries.get(&left.cell_class),
                geometries.get(&right.cell_class),
            ) else {
                return false;
            };
            // Right boundary of the left cell in local mesh coordinates.
            let l_max = lg.mesh.vertices.iter().map(|v| v.x).fold(f64::NEG_INFINITY, f64::max);
            let r_min = rg.mesh.vertices.iter().map(|v| v.x).fold(f64::INFINITY, f64::min);
            if !has_axis_normal_face_at(lg, l_max, tol) || !has_axis_normal_face_at(rg, r_min, tol)
            {
                return false;
            }
            // The cells must actually abut.
            let seam_gap = (left.x_position + lg.width) - right.x_position;
            if seam_gap.abs() > tol {
                return false;
            }
        }
    }
    true
}

/// Per-class cell counts, pipe-type counts, and the wall's physical
/// footprint (width, height) under `unit_scale` physical units per model
/// unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BillOfMaterials {
    pub class_counts: BTreeMap<CellClass, usize>,
    pub total_cells: usize,
    pub pipe_type_counts: BTreeMap<String, usize>,
    pub physical_width: f64,
    pub physical_height: f64,
}

pub fn bill_of_materials(
    layout: &WallLayout,
    cell_height: f64,
    unit_scale: f64,
    pipe_types: &[String],
) -> BillOfMaterials {
    let mut class_counts: BTreeMap<CellClass, usize> = BTreeMap::new();
    for inst in &layout.cell_instances {
        *class_counts.entry(inst.cell_class).or_insert(0) += 1;
    }
    let mut pipe_type_counts: BTreeMap<String, usize> = BTreeMap::new();
    for name in pipe_types {
        *pipe_type_counts.entry(name.clone()).or_insert(0) += 1;
    }
    let width = layout
        .rows
        .iter()
        .map(|r| r.total_width)
        .fold(0.0_f64, f64::max);
    BillOfMaterials {
        class_counts,
        total_cells: layout.cell_instances.len(),
        pipe_type_counts,
        physical_width: width * unit_scale,
        physical_height: layout.rows.len() as f64 * cell_height * unit_scale,
    }
}

/// Magnet forces per interface. Magnitudes are always user-supplied; only
/// the qualitative premise (sliding is easier than pulling) is enforced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MagnetSpecRaw")]
pub struct MagnetSpec {
    pub normal_hold_force: f64,
    pub tangential_slide_force: f64,
    pub magnets_per_interface: usize,
    pub cell_weight: f64,
}

#[derive(Deserialize)]
struct MagnetSpecRaw {
    normal_hold_force: f64,
    tangential_slide_force: f64,
    magnets_per_interface: usize,
    cell_weight: f64,
}

impl TryFrom<MagnetSpecRaw> for MagnetSpec {
    type Error = AssemblyError;

    fn try_from(raw: MagnetSpecRaw) -> Result<Self, Self::Error> {
        MagnetSpec::new(
            raw.normal_hold_force,
            raw.tangential_slide_force,
            raw.magnets_per_interface,
            raw.cell_weight,
        )
    }
}

impl MagnetSpec {
    pub fn new(
        normal_hold_force: f64,
        tangential_slide_force: f64,
        magnets_per_interface: usize,
        cell_weight: f64,
    ) -> Result<Self, AssemblyError> {
        if normal_hold_force < 0.0 || tangential_slide_force < 0.0 || cell_weight < 0.0 {
            return Err(AssemblyError::InvalidMagnetSpec(
                "forces and weight must be non-negative".into(),
            ));
        }
        if tangential_slide_force >= normal_hold_force {
            return Err(AssemblyError::InvalidMagnetSpec(format!(
                "tangential force {tangential_slide_force} must be below normal force {normal_hold_force}"
            )));
        }
        Ok(MagnetSpec {
            normal_hold_force,
            tangential_slide_force,
            magnets_per_interface,
            cell_weight,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemovalReport {
    /// Combined magnet holding force carries the cell weight.
    pub holds_structurally: bool,
    /// The user's tangential push overcomes the combined slide resistance.
    pub removable_by_slide: bool,
}

pub fn removal_feasibility(spec: &MagnetSpec, user_slide_force: f64) -> RemovalReport {
    let n = spec.magnets_per_interface as f64;
    RemovalReport {
        holds_structurally: n * spec.normal_hold_force >= spec.cell_weight,
        removable_by_slide: user_slide_force >= n * spec.tangential_slide_force,
    }
}

/// Convenience: run `tessellate_row` per row with per-row seeds
/// `seed, seed+1, ...` and stack the result.
pub fn plan_wall(
    target_width: f64,
    rows: usize,
    widths: &BTreeMap<CellClass, f64>,
    tolerance: f64,
    mode: StackingMode,
    row_offset: f64,
    seed: u64,
) -> Result<WallLayout, AssemblyError> {
    let row_plans: Vec<RowPlan> = (0..rows)
        .map(|k| tessellate_row(target_width, widths, tolerance, seed.wrapping_add(k as u64)))
        .collect::<Result<_, _>>()?;
    stack_rows(&row_plans, widths, mode, row_offset)
}
