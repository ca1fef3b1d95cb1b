//! Embedded pipe ports, rotation couplings, and single-pump reachability.
//!
//! Each cell exposes up to four ports on its side faces. Rotating a cell in
//! 90-degree steps permutes the open faces; adjacent cells couple when both
//! facing ports are open. The wall is viable when air from one pump inlet
//! reaches every cell, and the solver enumerates the rotation assignments
//! that achieve this.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assembly::{CellInstance, RowPlan, StackingMode, WallLayout};
use crate::geom::CellClass;

#[derive(Debug, Error, PartialEq)]
pub enum PipingError {
    #[error("invalid port template: {0}")]
    InvalidTemplate(String),
    #[error("expected {expected} pipe templates, got {got}")]
    MismatchedPipeCount { expected: usize, got: usize },
    #[error("pump face {face:?} of instance {instance} is not on the layout boundary")]
    PumpNotOnBoundary { instance: usize, face: Face },
    #[error("pump face {face:?} of instance {instance} is closed under rotation step {step}")]
    PumpNotOnOpenPort { instance: usize, face: Face, step: u8 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Face {
    Left,
    Top,
    Right,
    Bottom,
}

pub const ALL_FACES: [Face; 4] = [Face::Left, Face::Top, Face::Right, Face::Bottom];

impl Face {
    /// One 90-degree step: left -> top -> right -> bottom -> left.
    pub fn rotated(self, step: u8) -> Face {
        let order = [Face::Left, Face::Top, Face::Right, Face::Bottom];
        let idx = order.iter().position(|&f| f == self).unwrap();
        order[(idx + step as usize % 4) % 4]
    }

    pub fn opposite(self) -> Face {
        match self {
            Face::Left => Face::Right,
            Face::Right => Face::Left,
            Face::Top => Face::Bottom,
            Face::Bottom => Face::Top,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Face::Left => "left",
            Face::Top => "top",
            Face::Right => "right",
            Face::Bottom => "bottom",
        }
    }

    pub fn from_name(name: &str) -> Option<Face> {
        ALL_FACES.iter().copied().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PipeType {
    Straight,
    Elbow,
    Tee,
    Cross,
}

impl PipeType {
    pub fn name(self) -> &'static str {
        match self {
            PipeType::Straight => "straight",
            PipeType::Elbow => "elbow",
            PipeType::Tee => "tee",
            PipeType::Cross => "cross",
        }
    }

    pub fn from_name(name: &str) -> Option<PipeType> {
        [
            PipeType::Straight,
            PipeType::Elbow,
            PipeType::Tee,
            PipeType::Cross,
        ]
        .iter()
        .copied()
        .find(|t| t.name() == name)
    }
}

/// A pipe segment's open faces before rotation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PortTemplateRaw")]
pub struct PortTemplate {
    pipe_type: PipeType,
    open_faces: BTreeSet<Face>,
}

#[derive(Deserialize)]
struct PortTemplateRaw {
    pipe_type: PipeType,
    open_faces: BTreeSet<Face>,
}

impl TryFrom<PortTemplateRaw> for PortTemplate {
    type Error = PipingError;

    fn try_from(raw: PortTemplateRaw) -> Result<Self, Self::Error> {
        PortTemplate::new(raw.pipe_type, raw.open_faces)
    }
}

impl PortTemplate {
    pub fn new(pipe_type: PipeType, open_faces: BTreeSet<Face>) -> Result<Self, PipingError> {
        let ok = match pipe_type {
            PipeType::Straight => {
                open_faces.len() == 2 && {
                    let v: Vec<Face> = open_faces.iter().copied().collect();
                    v[0].opposite() == v[1]
                }
            }
            PipeType::Elbow => {
                open_faces.len() == 2 && {
                    let v: Vec<Face> = open_faces.iter().copied().collect();
                    v[0].opposite() != v[1]
                }
            }
            PipeType::Tee => open_faces.len() == 3,
            PipeType::Cross => open_faces.len() == 4,
        };
        if ok {
            Ok(PortTemplate {
                pipe_type,
                open_faces,
            })
        } else {
            Err(PipingError::InvalidTemplate(format!(
                "{} cannot open {:?}",
                pipe_type.name(),
                open_faces
            )))
        }
    }

    /// Canonical orientation per type: straight left-right, elbow left-top,
    /// tee all but bottom, cross all.
    pub fn canonical(pipe_type: PipeType) -> PortTemplate {
        use Face::*;
        let faces: &[Face] = match pipe_type {
            PipeType::Straight => &[Left, Right],
            PipeType::Elbow => &[Left, Top],
            PipeType::Tee => &[Left, Top, Right],
            PipeType::Cross => &[Left, Top, Right, Bottom],
        };
        PortTemplate::new(pipe_type, faces.iter().copied().collect()).expect("canonical templates")
    }

    pub fn pipe_type(&self) -> PipeType {
        self.pipe_type
    }

    pub fn open_faces(&self) -> &BTreeSet<Face> {
        &self.open_faces
    }
}

/// Open faces after rotating the whole segment by `rotation_step` 90-degree
/// increments.
pub fn rotate_ports(template: &PortTemplate, rotation_step: u8) -> BTreeSet<Face> {
    assert!(rotation_step < 4, "rotation step must be 0..3");
    template
        .open_faces
        .iter()
        .map(|f| f.rotated(rotation_step))
        .collect()
}

/// One rotation step per cell instance, indexed like
/// `WallLayout::cell_instances`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RotationAssignment {
    pub steps: Vec<u8>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PumpPosition {
    pub instance: usize,
    pub face: Face,
}

/// Which neighbor axes couple pneumatically. The demonstrator couples both;
/// a single-row pipeline can disable the vertical axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CouplingAxes {
    pub horizontal: bool,
    pub vertical: bool,
}

impl Default for CouplingAxes {
    fn default() -> Self {
        CouplingAxes {
            horizontal: true,
            vertical: true,
        }
    }
}

/// A piping problem: the wall, its class widths (for adjacency geometry),
/// one pipe template per instance, the pump attachment, and coupling axes.
#[derive(Debug, Clone)]
pub struct PipingScenario<'a> {
    pub layout: &'a WallLayout,
    pub widths: &'a BTreeMap<CellClass, f64>,
    pub pipes: &'a [PortTemplate],
    pub pump: PumpPosition,
    pub coupling: CouplingAxes,
}

const SEAM_TOLERANCE: f64 = 1e-6;

/// Per-instance neighbors on each face. Horizontal neighbors abut within a
/// seam tolerance; vertical neighbors are in the adjacent row with
/// overlapping x-intervals (a wide cell may couple to several).
fn neighbor_map(
    layout: &WallLayout,
    widths: &BTreeMap<CellClass, f64>,
    coupling: CouplingAxes,
) -> Vec<BTreeMap<Face, Vec<usize>>> {
    let n = layout.cell_instances.len();
    let interval = |inst: &CellInstance| {
        let w = widths[&inst.cell_class];
        (inst.x_position, inst.x_position + w)
    };
    let mut map: Vec<BTreeMap<Face, Vec<usize>>> = vec![BTreeMap::new(); n];
    for (i, faces) in map.iter_mut().enumerate() {
        for j in 0..n {
            if i == j {
                continue;
            }
            let (a, b) = (&layout.cell_instances[i], &layout.cell_instances[j]);
            let (a0, a1) = interval(a);
            let (b0, b1) = interval(b);
            if coupling.horizontal && a.row_index == b.row_index {
                if (a1 - b0).abs() <= SEAM_TOLERANCE {
                    faces.entry(Face::Right).or_default().push(j);
                } else if (b1 - a0).abs() <= SEAM_TOLERANCE {
                    faces.entry(Face::Left).or_default().push(j);
                }
            }
            if coupling.vertical && a1.min(b1) - a0.max(b0) > SEAM_TOLERANCE {
                if b.row_index == a.row_index + 1 {
                    faces.entry(Face::Top).or_default().push(j);
                } else if a.row_index == b.row_index + 1 {
                    faces.entry(Face::Bottom).or_default().push(j);
                }
            }
        }
    }
    map
}

/// Cells plus one pump node (`pump_node = instance count`), with coupling
/// edges stored as ordered index pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipeGraph {
    pub instance_count: usize,
    pub pump_node: usize,
    pub edges: BTreeSet<(usize, usize)>,
}

impl PipeGraph {
    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.instance_count + 1];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }
}

pub fn build_pipe_graph(
    scenario: &PipingScenario,
    rotations: &RotationAssignment,
) -> Result<PipeGraph, PipingError> {
    let n = scenario.layout.cell_instances.len();
    if scenario.pipes.len() != n {
        return Err(PipingError::MismatchedPipeCount {
            expected: n,
            got: scenario.pipes.len(),
        });
    }
    assert_eq!(rotations.steps.len(), n, "one rotation step per instance");
    let neighbors = neighbor_map(scenario.layout, scenario.widths, scenario.coupling);
    let open: Vec<BTreeSet<Face>> = (0..n)
        .map(|i| rotate_ports(&scenario.pipes[i], rotations.steps[i]))
        .collect();

    let pump = scenario.pump;
    if neighbors[pump.instance].contains_key(&pump.face) {
        return Err(PipingError::PumpNotOnBoundary {
            instance: pump.instance,
            face: pump.face,
        });
    }
    if !open[pump.instance].contains(&pump.face) {
        return Err(PipingError::PumpNotOnOpenPort {
            instance: pump.instance,
            face: pump.face,
            step: rotations.steps[pump.instance],
        });
    }

    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (i, faces) in neighbors.iter().enumerate() {
        for (&face, js) in faces {
            if !open[i].contains(&face) {
                continue;
            }
            for &j in js {
                if open[j].contains(&face.opposite()) {
                    edges.insert((i.min(j), i.max(j)));
                }
            }
        }
    }
    edges.insert((pump.instance, n));
    Ok(PipeGraph {
        instance_count: n,
        pump_node: n,
        edges,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReachabilityReport {
    /// Cell instances air can reach from the pump inlet.
    pub reachable: BTreeSet<usize>,
    pub all_reached: bool,
}

pub fn pump_reachability(graph: &PipeGraph) -> ReachabilityReport {
    let adj = graph.adjacency();
    let mut seen = vec![false; graph.instance_count + 1];
    let mut queue = VecDeque::from([graph.pump_node]);
    seen[graph.pump_node] = true;
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    let reachable: BTreeSet<usize> = (0..graph.instance_count).filter(|&i| seen[i]).collect();
    let all_reached = reachable.len() == graph.instance_count;
    ReachabilityReport {
        reachable,
        all_reached,
    }
}

/// Enumerate rotation assignments that reach every cell from the pump.
///
/// Depth-first in (instance index, rotation step) order, so output is
/// lexicographic and, when `limit` exceeds the solution count, complete.
/// Pruning treats unassigned cells as all-open wildcards; that relaxation
/// only ever adds edges, so no valid completion is discarded.
pub fn solve_configurations(scenario: &PipingScenario, limit: usize) -> Vec<RotationAssignment> {
    assert!(limit >= 1, "limit must be at least 1");
    let n = scenario.layout.cell_instances.len();
    if scenario.pipes.len() != n || n == 0 {
        return Vec::new();
    }
    let neighbors = neighbor_map(scenario.layout, scenario.widths, scenario.coupling);
    if neighbors[scenario.pump.instance].contains_key(&scenario.pump.face) {
        return Vec::new();
    }
    let all_faces: BTreeSet<Face> = ALL_FACES.into_iter().collect();
    let rotated: Vec<[BTreeSet<Face>; 4]> = scenario
        .pipes
        .iter()
        .map(|t| [0, 1, 2, 3].map(|s| rotate_ports(t, s)))
        .collect();

    let reaches_all = |open: &[&BTreeSet<Face>]| -> bool {
        if !open[scenario.pump.instance].contains(&scenario.pump.face) {
            return false;
        }
        let mut adj = vec![Vec::new(); n];
        for (i, faces) in neighbors.iter().enumerate() {
            for (&face, js) in faces {
                if !open[i].contains(&face) {
                    continue;
                }
                for &j in js {
                    if open[j].contains(&face.opposite()) {
                        adj[i].push(j);
                    }
                }
            }
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([scenario.pump.instance]);
        seen[scenario.pump.instance] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == n
    };

    let mut solutions = Vec::new();
    let mut steps: Vec<u8> = Vec::with_capacity(n);
    let mut stack_open: Vec<&BTreeSet<Face>> = vec![&all_faces; n];

    #[allow(clippy::too_many_arguments)]
    fn descend<'a>(
        depth: usize,
        n: usize,
        rotated: &'a [[BTreeSet<Face>; 4]],
        stack_open: &mut Vec<&'a BTreeSet<Face>>,
        steps: &mut Vec<u8>,
        reaches_all: &dyn Fn(&[&BTreeSet<Face>]) -> bool,
        solutions: &mut Vec<RotationAssignment>,
        limit: usize,
        all_faces: &'a BTreeSet<Face>,
    ) {
        if solutions.len() >= limit {
            return;
        }
        if depth == n {
            solutions.push(RotationAssignment {
                steps: steps.clone(),
            });
            return;
        }
        for step in 0..4u8 {
            stack_open[depth] = &rotated[depth][step as usize];
            steps.push(step);
            // Wildcard relaxation on the still-unassigned suffix.
            if reaches_all(stack_open) {
                descend(
                    depth + 1,
                    n,
                    rotated,
                    stack_open,
                    steps,
                    reaches_all,
                    solutions,
                    limit,
                    all_faces,
                );
            }
            steps.pop();
            stack_open[depth] = all_faces;
            if solutions.len() >= limit {
                return;
            }
        }
    }

    descend(
        0,
        n,
        &rotated,
        &mut stack_open,
        &mut steps,
        &reaches_all,
        &mut solutions,
        limit,
        &all_faces,
    );
    solutions
}

/// Copy the layout with the solved rotation steps stamped onto each
/// instance.
pub fn apply_assignment(layout: &WallLayout, assignment: &RotationAssignment) -> WallLayout {
    let mut out = layout.clone();
    for (inst, &step) in out.cell_instances.iter_mut().zip(&assignment.steps) {
        inst.rotation_step = step;
    }
    out
}

/// Uniform grid of unit-width class-A cells, `rows` by `cols`, for piping
/// studies detached from the tessellated wall.
pub fn uniform_grid(rows: usize, cols: usize) -> (WallLayout, BTreeMap<CellClass, f64>) {
    let widths = BTreeMap::from([(CellClass::A, 1.0)]);
    let row = RowPlan {
        sequence: vec![CellClass::A; cols],
        total_width: cols as f64,
        target_width: cols as f64,
        tolerance: 0.0,
    };
    let layout = crate::assembly::stack_rows(
        &vec![row; rows],
        &widths,
        StackingMode::Vertical,
        0.0,
    )
    .expect("uniform grid is a valid vertical stack");
    (layout, widths)
}

/// Schematic connectivity rendering: one block per cell showing its open
/// ports after rotation, rows printed top row last-built first. Purely
/// topological; mixed cell widths are drawn uniformly.
pub fn render_ascii(scenario: &PipingScenario, rotations: &RotationAssignment) -> String {
    let layout = scenario.layout;
    let n = layout.cell_instances.len();
    let open: Vec<BTreeSet<Face>> = (0..n)
        .map(|i| rotate_ports(&scenario.pipes[i], rotations.steps[i]))
        .collect();
    let mut by_row: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, inst) in layout.cell_instances.iter().enumerate() {
        by_row.entry(inst.row_index).or_default().push(i);
    }
    for members in by_row.values_mut() {
        members.sort_by(|&a, &b| {
            layout.cell_instances[a]
                .x_position
                .total_cmp(&layout.cell_instances[b].x_position)
        });
    }
    let mut out = String::new();
    for (&row, members) in by_row.iter().rev() {
        let mut lines = [String::new(), String::new(), String::new()];
        for &i in members {
            let o = &open[i];
            let center = if i == scenario.pump.instance { 'P' } else { '+' };
            let _ = write!(
                lines[0],
                "  {}  ",
                if o.contains(&Face::Top) { '|' } else { ' ' }
            );
            let _ = write!(
                lines[1],
                " {}{}{} ",
                if o.contains(&Face::Left) { '-' } else { ' ' },
                center,
                if o.contains(&Face::Right) { '-' } else { ' ' }
            );
            let _ = write!(
                lines[2],
                "  {}  ",
                if o.contains(&Face::Bottom) { '|' } else { ' ' }
            );
        }
        let _ = writeln!(out, "row {row}:");
        for l in lines {
            let _ = writeln!(out, "{}", l.trim_end());
        }
    }
    let _ = writeln!(
        out,
        "pump: instance {} ({} face)",
        scenario.pump.instance,
        scenario.pump.face.name()
    );
    out
}
