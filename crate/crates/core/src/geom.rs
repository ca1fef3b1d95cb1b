//! Geometry kernel: regular-polyhedron reference data, convex hulls, duals,
//! the twist-cell family, symmetry predicates, and Wavefront OBJ exchange.
//!
//! A cell is the convex hull of two horizontal squares centered on the z
//! axis: the bottom square of side `bottom_side` at z = 0 and a top square
//! of side `bottom_side * side_ratio` at z = `height`, twisted by
//! `angle_difference_deg`. Twist 0 with ratio 1 reproduces the hexahedron;
//! twist 45 gives the antiprism-like hull whose symmetry drives the cell
//! family.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Point = Vector3<f64>;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("fewer than 4 non-degenerate points, hull undefined")]
    DegenerateHull,
    #[error("non-convex input: {0}")]
    NonConvexInput(String),
    #[error("degenerate cell: {0}")]
    DegenerateCell(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("widths must be strictly increasing, got {0:?}")]
    InvalidWidths([f64; 3]),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("obj parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// The four Table-topology shapes underlying the cell study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeName {
    Tetrahedron,
    Hexahedron,
    Octahedron,
    Dodecahedron,
}

pub const ALL_SHAPES: [ShapeName; 4] = [
    ShapeName::Tetrahedron,
    ShapeName::Hexahedron,
    ShapeName::Octahedron,
    ShapeName::Dodecahedron,
];

impl ShapeName {
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "tetrahedron" => Some(Self::Tetrahedron),
            "hexahedron" => Some(Self::Hexahedron),
            "octahedron" => Some(Self::Octahedron),
            "dodecahedron" => Some(Self::Dodecahedron),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Tetrahedron => "tetrahedron",
            Self::Hexahedron => "hexahedron",
            Self::Octahedron => "octahedron",
            Self::Dodecahedron => "dodecahedron",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasePolygon {
    EquilateralTriangle,
    Square,
    RegularPentagon,
}

/// Reference row for one regular polyhedron: counts, base polygon, interior
/// angle, height-to-side ratio, and whether opposite faces come in parallel
/// pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyRecord {
    pub shape_name: ShapeName,
    pub vertex_count: usize,
    pub side_count: usize,
    pub surface_count: usize,
    pub base_polygon: BasePolygon,
    pub interior_angle_deg: f64,
    pub height_side_ratio: f64,
    pub surfaces_parallel: bool,
}

pub fn golden_ratio() -> f64 {
    (1.0 + 5.0_f64.sqrt()) / 2.0
}

/// Exact reference properties for the four shapes.
///
/// The dodecahedron ratio is read as phi^2 / (2 sqrt(3 - phi)) with
/// phi = (1 + sqrt 5) / 2; the printed source formula is typographically
/// ambiguous about the phi grouping.
pub fn polyhedron_properties(shape: ShapeName) -> PropertyRecord {
    let phi = golden_ratio();
    match shape {
        ShapeName::Tetrahedron => PropertyRecord {
            shape_name: shape,
            vertex_count: 4,
            side_count: 6,
            surface_count: 4,
            base_polygon: BasePolygon::EquilateralTriangle,
            interior_angle_deg: 60.0,
            height_side_ratio: 6.0_f64.sqrt() / 3.0,
            surfaces_parallel: false,
        },
        ShapeName::Hexahedron => PropertyRecord {
            shape_name: shape,
            vertex_count: 8,
            side_count: 12,
            surface_count: 6,
            base_polygon: BasePolygon::Square,
            interior_angle_deg: 90.0,
            height_side_ratio: 1.0,
            surfaces_parallel: true,
        },
        ShapeName::Octahedron => PropertyRecord {
            shape_name: shape,
            vertex_count: 6,
            side_count: 12,
            surface_count: 8,
            base_polygon: BasePolygon::EquilateralTriangle,
            interior_angle_deg: 60.0,
            height_side_ratio: 2.0_f64.sqrt(),
            surfaces_parallel: true,
        },
        ShapeName::Dodecahedron => PropertyRecord {
            shape_name: shape,
            vertex_count: 20,
            side_count: 30,
            surface_count: 12,
            base_polygon: BasePolygon::RegularPentagon,
            interior_angle_deg: 108.0,
            height_side_ratio: phi * phi / (2.0 * (3.0 - phi).sqrt()),
            surfaces_parallel: true,
        },
    }
}

/// Closed convex polyhedral surface. Face loops are counter-clockwise when
/// viewed from outside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub vertices: Vec<Point>,
    pub faces: Vec<Vec<usize>>,
}

impl Mesh {
    pub fn centroid(&self) -> Point {
        let sum: Point = self.vertices.iter().sum();
        sum / self.vertices.len() as f64
    }

    pub fn face_centroid(&self, face: &[usize]) -> Point {
        let sum: Point = face.iter().map(|&i| self.vertices[i]).sum();
        sum / face.len() as f64
    }

    /// Largest vertex-to-vertex distance.
    pub fn diameter(&self) -> f64 {
        let mut best = 0.0_f64;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                best = best.max((a - b).norm());
            }
        }
        best
    }

    /// Unique undirected edges, each as an ordered index pair.
    pub fn edges(&self) -> BTreeSet<(usize, usize)> {
        let mut set = BTreeSet::new();
        for face in &self.faces {
            for (k, &a) in face.iter().enumerate() {
                let b = face[(k + 1) % face.len()];
                set.insert((a.min(b), a.max(b)));
            }
        }
        set
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    pub fn edge_lengths(&self) -> Vec<f64> {
        self.edges()
            .iter()
            .map(|&(a, b)| (self.vertices[a] - self.vertices[b]).norm())
            .collect()
    }

    pub fn euler_characteristic(&self) -> isize {
        self.vertices.len() as isize - self.edge_count() as isize + self.faces.len() as isize
    }

    pub fn translated(&self, offset: Point) -> Mesh {
        Mesh {
            vertices: self.vertices.iter().map(|v| v + offset).collect(),
            faces: self.faces.clone(),
        }
    }

    /// Face planarity (1e-9 model units), closedness (each edge in exactly
    /// two faces), and convexity (all vertices behind every face plane).
    pub fn validate(&self) -> Result<(), GeomError> {
        if self.vertices.len() < 4 || self.faces.is_empty() {
            return Err(GeomError::DegenerateHull);
        }
        let scale = self.diameter().max(1.0);
        for face in &self.faces {
            let n = newell_normal(self, face);
            let c = self.face_centroid(face);
            for &i in face {
                if (self.vertices[i] - c).dot(&n).abs() > 1e-9 {
                    return Err(GeomError::NonConvexInput(format!(
                        "face {face:?} not planar within 1e-9"
                    )));
                }
            }
            for v in &self.vertices {
                if (v - c).dot(&n) > 1e-9 * scale {
                    return Err(GeomError::NonConvexInput(
                        "vertex outside a face plane".into(),
                    ));
                }
            }
        }
        let mut edge_faces: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for face in &self.faces {
            for (k, &a) in face.iter().enumerate() {
                let b = face[(k + 1) % face.len()];
                *edge_faces.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        if edge_faces.values().any(|&c| c != 2) {
            return Err(GeomError::NonConvexInput(
                "mesh not closed: edge not shared by exactly two faces".into(),
            ));
        }
        Ok(())
    }
}

fn newell_normal(mesh: &Mesh, face: &[usize]) -> Point {
    let mut n = Point::zeros();
    for (k, &a) in face.iter().enumerate() {
        let pa = mesh.vertices[a];
        let pb = mesh.vertices[face[(k + 1) % face.len()]];
        n.x += (pa.y - pb.y) * (pa.z + pb.z);
        n.y += (pa.z - pb.z) * (pa.x + pb.x);
        n.z += (pa.x - pb.x) * (pa.y + pb.y);
    }
    n.normalize()
}

/// Convex hull by supporting-plane enumeration over vertex triples.
///
/// Quartic in point count, exact in face structure for the small inputs the
/// toolkit handles (at most a few dozen points); coplanar points collapse
/// into polygonal faces rather than triangle fans. Interior points are
/// dropped. Output ordering is deterministic: vertices keep ascending input
/// order, faces sort by their vertex-index sets.
pub fn convex_hull(points: &[Point]) -> Result<Mesh, GeomError> {
    let mut pts: Vec<Point> = Vec::new();
    for p in points {
        if !pts.iter().any(|q| (p - q).norm() == 0.0) {
            pts.push(*p);
        }
    }
    if pts.len() < 4 {
        return Err(GeomError::DegenerateHull);
    }
    let scale = pts
        .iter()
        .flat_map(|p| p.iter().copied())
        .fold(0.0_f64, |m, c| m.max(c.abs()))
        .max(1e-12);
    let tol = 1e-9 * scale;

    let n = pts.len();
    let interior: Point = pts.iter().sum::<Point>() / n as f64;
    let mut faces: BTreeMap<Vec<usize>, Point> = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let normal = (pts[j] - pts[i]).cross(&(pts[k] - pts[i]));
                if normal.norm() <= tol * scale {
                    continue;
                }
                let normal = normal.normalize();
                let mut above = false;
                let mut below = false;
                let mut on_plane: Vec<usize> = Vec::new();
                for (m, p) in pts.iter().enumerate() {
                    let d = (p - pts[i]).dot(&normal);
                    if d > tol {
                        above = true;
                    } else if d < -tol {
                        below = true;
                    } else {
                        on_plane.push(m);
                    }
                    if above && below {
                        break;
                    }
                }
                if above && below {
                    continue;
                }
                let outward = if (interior - pts[i]).dot(&normal) > 0.0 {
                    -normal
                } else {
                    normal
                };
                faces.entry(on_plane).or_insert(outward);
            }
        }
    }
    if faces.len() < 4 {
        return Err(GeomError::DegenerateHull);
    }

    let mut used: BTreeSet<usize> = BTreeSet::new();
    for key in faces.keys() {
        used.extend(key.iter().copied());
    }
    let remap: BTreeMap<usize, usize> = used.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    let vertices: Vec<Point> = used.iter().map(|&i| pts[i]).collect();

    let mut out_faces: Vec<Vec<usize>> = Vec::new();
    for (key, outward) in &faces {
        let centroid: Point =
            key.iter().map(|&i| pts[i]).sum::<Point>() / key.len() as f64;
        // In-plane basis for angular ordering around the outward normal.
        let u = (pts[key[0]] - centroid).normalize();
        let v = outward.cross(&u);
        let mut ordered: Vec<usize> = key.clone();
        ordered.sort_by(|&a, &b| {
            let angle = |i: usize| {
                let d = pts[i] - centroid;
                d.dot(&v).atan2(d.dot(&u))
            };
            angle(a).total_cmp(&angle(b))
        });
        // Rotate so the smallest index leads; orientation is preserved.
        let start = ordered
            .iter()
            .position(|&i| i == *ordered.iter().min().unwrap())
            .unwrap();
        ordered.rotate_left(start);
        out_faces.push(ordered.iter().map(|&i| remap[&i]).collect());
    }
    out_faces.sort_by_key(|f| {
        let mut k = f.clone();
        k.sort_unstable();
        k
    });
    Ok(Mesh {
        vertices,
        faces: out_faces,
    })
}

/// Reference mesh for one of the four shapes, scaled to the given edge
/// length and centered at the origin.
pub fn platonic_mesh(shape: ShapeName, edge: f64) -> Mesh {
    assert!(edge > 0.0, "edge length must be positive");
    let pts: Vec<Point> = match shape {
        ShapeName::Tetrahedron => {
            let s = edge / (2.0 * 2.0_f64.sqrt());
            [
                [1.0, 1.0, 1.0],
                [1.0, -1.0, -1.0],
                [-1.0, 1.0, -1.0],
                [-1.0, -1.0, 1.0],
            ]
            .iter()
            .map(|c| Point::new(c[0], c[1], c[2]) * s)
            .collect()
        }
        ShapeName::Hexahedron => {
            let s = edge / 2.0;
            let mut v = Vec::new();
            for &x in &[-s, s] {
                for &y in &[-s, s] {
                    for &z in &[-s, s] {
                        v.push(Point::new(x, y, z));
                    }
                }
            }
            v
        }
        ShapeName::Octahedron => {
            let s = edge / 2.0_f64.sqrt();
            vec![
                Point::new(s, 0.0, 0.0),
                Point::new(-s, 0.0, 0.0),
                Point::new(0.0, s, 0.0),
                Point::new(0.0, -s, 0.0),
                Point::new(0.0, 0.0, s),
                Point::new(0.0, 0.0, -s),
            ]
        }
        ShapeName::Dodecahedron => {
            let phi = golden_ratio();
            let s = edge * phi / 2.0;
            let mut v = Vec::new();
            for &x in &[-1.0, 1.0] {
                for &y in &[-1.0, 1.0] {
                    for &z in &[-1.0, 1.0] {
                        v.push(Point::new(x, y, z) * s);
                    }
                }
            }
            for &a in &[-1.0, 1.0] {
                for &b in &[-1.0, 1.0] {
                    v.push(Point::new(0.0, a / phi, b * phi) * s);
                    v.push(Point::new(a / phi, b * phi, 0.0) * s);
                    v.push(Point::new(a * phi, 0.0, b / phi) * s);
                }
            }
            v
        }
    };
    convex_hull(&pts).expect("reference solids are non-degenerate")
}

/// Convex hull of the face centroids.
pub fn dual_polyhedron(mesh: &Mesh) -> Result<Mesh, GeomError> {
    mesh.validate()
        .map_err(|e| GeomError::NonConvexInput(e.to_string()))?;
    let centroids: Vec<Point> = mesh.faces.iter().map(|f| mesh.face_centroid(f)).collect();
    convex_hull(&centroids)
}

/// Similarity up to uniform scale and translation (no rotation): centroids
/// aligned, diameters normalized, then every vertex must find a partner
/// within `tol`.
pub fn similar(a: &Mesh, b: &Mesh, tol: f64) -> bool {
    if a.vertices.len() != b.vertices.len() {
        return false;
    }
    let normalize = |m: &Mesh| -> Vec<Point> {
        let c = m.centroid();
        let d = m.diameter();
        m.vertices.iter().map(|v| (v - c) / d).collect()
    };
    let (va, vb) = (normalize(a), normalize(b));
    va.iter()
        .all(|p| vb.iter().any(|q| (p - q).norm() <= tol))
        && vb
            .iter()
            .all(|q| va.iter().any(|p| (p - q).norm() <= tol))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellParams {
    /// Twist between bottom and top squares, degrees in [0, 45].
    pub angle_difference_deg: f64,
    /// Top-square side over bottom-square side.
    pub side_ratio: f64,
    pub height: f64,
    pub bottom_side: f64,
}

impl Default for CellParams {
    fn default() -> Self {
        CellParams {
            angle_difference_deg: 0.0,
            side_ratio: 1.0,
            height: 1.0,
            bottom_side: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CellClass {
    A,
    B,
    C,
}

pub const ALL_CLASSES: [CellClass; 3] = [CellClass::A, CellClass::B, CellClass::C];

impl CellClass {
    pub fn name(&self) -> &'static str {
        match self {
            CellClass::A => "A",
            CellClass::B => "B",
            CellClass::C => "C",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "A" | "a" => Some(CellClass::A),
            "B" | "b" => Some(CellClass::B),
            "C" | "c" => Some(CellClass::C),
            _ => None,
        }
    }
}

/// A generated brick geometry. `cell_class` is set only for members of the
/// canonical A/B/C family; free parametric cells carry `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellGeometry {
    pub mesh: Mesh,
    pub cell_class: Option<CellClass>,
    pub height: f64,
    /// Horizontal extent along x.
    pub width: f64,
    pub params: CellParams,
}

/// Corner positions of a horizontal square of side `side`, centered on the
/// z axis at height `z`, rotated by `twist_deg`. The untwisted square is
/// axis aligned with corners at (+-side/2, +-side/2); rotating exact base
/// corners keeps untwisted widths exact.
fn square_corners(side: f64, z: f64, twist_deg: f64) -> [Point; 4] {
    let h = side / 2.0;
    let base = [(h, h), (-h, h), (-h, -h), (h, -h)];
    let (sin, cos) = twist_deg.to_radians().sin_cos();
    base.map(|(x, y)| Point::new(x * cos - y * sin, x * sin + y * cos, z))
}

/// Hull of the bottom square (side `bottom_side`, z = 0) and the twisted,
/// scaled top square (side `bottom_side * side_ratio`, z = `height`).
pub fn generate_cell(params: &CellParams) -> Result<CellGeometry, GeomError> {
    if params.height <= 0.0 || params.bottom_side <= 0.0 || params.side_ratio <= 0.0 {
        return Err(GeomError::DegenerateCell(format!(
            "height, bottom_side, side_ratio must be positive, got {params:?}"
        )));
    }
    if !(0.0..=45.0).contains(&params.angle_difference_deg) {
        return Err(GeomError::DegenerateCell(format!(
            "angle difference must lie in [0, 45] degrees, got {}",
            params.angle_difference_deg
        )));
    }
    let mut pts = square_corners(params.bottom_side, 0.0, 0.0).to_vec();
    pts.extend(square_corners(
        params.bottom_side * params.side_ratio,
        params.height,
        params.angle_difference_deg,
    ));
    let mesh = convex_hull(&pts)?;
    let (mut min_x, mut max_x) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut min_z, mut max_z) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in &mesh.vertices {
        min_x = min_x.min(v.x);
        max_x = max_x.max(v.x);
        min_z = min_z.min(v.z);
        max_z = max_z.max(v.z);
    }
    Ok(CellGeometry {
        mesh,
        cell_class: None,
        height: max_z - min_z,
        width: max_x - min_x,
        params: *params,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub axisymmetric: bool,
    pub centrosymmetric: bool,
}

/// Mirror and inversion symmetry of the vertex set, within 1e-6 of the
/// mesh diameter. Both predicates are evaluated relative to the vertex
/// centroid, so the report is translation invariant.
///
/// Axisymmetry looks for a vertical mirror plane (horizontal normal) through
/// the centroid; any such mirror either fixes a vertex or swaps a pair, so
/// candidate normals are the horizontal vertex-pair differences.
/// Centrosymmetry inverts through the centroid, the only fixed point an
/// inversion of a bounded vertex set can have.
pub fn symmetry_check(mesh: &Mesh) -> SymmetryReport {
    let c = mesh.centroid();
    let scale = mesh.diameter().max(1e-12);
    let tol = 1e-6 * scale;
    let rel: Vec<Point> = mesh.vertices.iter().map(|v| v - c).collect();

    let matches_set = |q: &Point| rel.iter().any(|r| (r - q).norm() <= tol);

    let centrosymmetric = rel.iter().all(|r| matches_set(&(-r)));

    let mut axisymmetric = false;
    let mut candidates: Vec<Point> = Vec::new();
    for (i, a) in rel.iter().enumerate() {
        for b in &rel[i + 1..] {
            let d = a - b;
            if d.z.abs() <= tol && d.xy().norm() > tol {
                candidates.push(Point::new(d.x, d.y, 0.0).normalize());
            }
        }
    }
    'outer: for n in &candidates {
        for r in &rel {
            let reflected = r - 2.0 * r.dot(n) * n;
            if !matches_set(&reflected) {
                continue 'outer;
            }
        }
        axisymmetric = true;
        break;
    }
    SymmetryReport {
        axisymmetric,
        centrosymmetric,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveFor {
    Height,
    SideRatio,
}

/// Chord lengths of the twist-cell hull, analytically: bottom edges, top
/// edges, and the two lateral-edge classes at angular offsets `theta` and
/// `90 - theta`.
fn cell_edge_classes(params: &CellParams) -> [f64; 4] {
    let a = params.bottom_side;
    let b = a * params.side_ratio;
    let (rb, rt) = (a / 2.0_f64.sqrt(), b / 2.0_f64.sqrt());
    let h = params.height;
    let lateral = |delta_deg: f64| {
        let d = delta_deg.to_radians();
        (rb * rb + rt * rt - 2.0 * rb * rt * d.cos() + h * h).sqrt()
    };
    [
        a,
        b,
        lateral(params.angle_difference_deg),
        lateral(90.0 - params.angle_difference_deg),
    ]
}

/// Adjust one free parameter (height by default) so every hull edge has the
/// same length, the equilateral form the twisted cells admit.
///
/// The twist must be positive: an untwisted prism has no triangular faces
/// and its lateral edges are simply vertical, so the adjustment problem
/// degenerates and is refused.
pub fn equilateral_adjust(
    params: &CellParams,
    solve_for: SolveFor,
) -> Result<CellParams, GeomError> {
    if params.angle_difference_deg <= 0.0 {
        return Err(GeomError::NoSolution(
            "zero twist: prism lateral edges are vertical and no triangular faces exist".into(),
        ));
    }
    let spread = |candidate: &CellParams| {
        let e = cell_edge_classes(candidate);
        let max = e.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = e.iter().copied().fold(f64::INFINITY, f64::min);
        max - min
    };
    let with_value = |x: f64| {
        let mut p = *params;
        match solve_for {
            SolveFor::Height => p.height = x,
            SolveFor::SideRatio => p.side_ratio = x,
        }
        p
    };
    // The edge-length spread is zero exactly at an equilateral form but the
    // minimum is a kink, not a sign change, so minimize instead of
    // root-finding: a dense scan brackets the argmin, golden-section refines.
    let (lo, hi) = (1e-6, 10.0 * params.bottom_side);
    const N: usize = 4096;
    let at = |i: usize| lo + (hi - lo) * i as f64 / N as f64;
    let mut best = (f64::INFINITY, 0usize);
    for i in 0..=N {
        let s = spread(&with_value(at(i)));
        if s < best.0 {
            best = (s, i);
        }
    }
    let (mut a, mut b) = (at(best.1.saturating_sub(1)), at((best.1 + 1).min(N)));
    const INVPHI: f64 = 0.618_033_988_749_894_9;
    for _ in 0..200 {
        let c = b - (b - a) * INVPHI;
        let d = a + (b - a) * INVPHI;
        if spread(&with_value(c)) < spread(&with_value(d)) {
            b = d;
        } else {
            a = c;
        }
    }
    let solved = with_value(0.5 * (a + b));
    // The root only equalizes the extreme edge classes; verify on the hull
    // that every edge joined in.
    let lengths = generate_cell(&solved)?.mesh.edge_lengths();
    let min = lengths.iter().copied().fold(f64::INFINITY, f64::min);
    let max = lengths.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max - min >= 1e-6 {
        return Err(GeomError::NoSolution(format!(
            "edge spread {:.3e} after adjustment: two unequal lateral classes remain",
            max - min
        )));
    }
    Ok(solved)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellFamilyConfig {
    pub height: f64,
    /// Strictly increasing widths for classes A, B, C.
    pub widths: [f64; 3],
}

impl Default for CellFamilyConfig {
    fn default() -> Self {
        CellFamilyConfig {
            height: 1.0,
            widths: [1.0, 1.5, 2.0],
        }
    }
}

/// The three canonical cells: untwisted unit-ratio prisms sharing one
/// height, with the configured strictly increasing widths.
pub fn canonical_cells(config: &CellFamilyConfig) -> Result<[CellGeometry; 3], GeomError> {
    let w = config.widths;
    if !(w[0] < w[1] && w[1] < w[2]) {
        return Err(GeomError::InvalidWidths(w));
    }
    if config.height <= 0.0 {
        return Err(GeomError::DegenerateCell(format!(
            "family height must be positive, got {}",
            config.height
        )));
    }
    let mut out = Vec::with_capacity(3);
    for (i, class) in ALL_CLASSES.iter().enumerate() {
        let params = CellParams {
            angle_difference_deg: 0.0,
            side_ratio: 1.0,
            height: config.height,
            bottom_side: w[i],
        };
        let mut cell = generate_cell(&params)?;
        cell.cell_class = Some(*class);
        out.push(cell);
    }
    Ok(out.try_into().expect("exactly three cells"))
}

/// Serialize to Wavefront OBJ text: `v x y z` lines then `f` lines with
/// 1-based indices. Nine fixed decimals, so export -> import -> export is
/// byte-identical.
pub fn mesh_to_obj(mesh: &Mesh) -> Result<String, GeomError> {
    if mesh.vertices.is_empty() || mesh.faces.is_empty() {
        return Err(GeomError::Io(std::io::Error::new(
            std::io::ErrorKind::InvalidInput,
            "refusing to export an empty mesh",
        )));
    }
    let mut out = String::new();
    for v in &mesh.vertices {
        writeln!(out, "v {:.9} {:.9} {:.9}", v.x, v.y, v.z).expect("string write");
    }
    for face in &mesh.faces {
        out.push('f');
        for &i in face {
            write!(out, " {}", i + 1).expect("string write");
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn export_mesh(mesh: &Mesh, path: &Path) -> Result<(), GeomError> {
    let text = mesh_to_obj(mesh)?;
    std::fs::write(path, text)?;
    Ok(())
}

pub fn mesh_from_obj(text: &str) -> Result<Mesh, GeomError> {
    let mut vertices: Vec<Point> = Vec::new();
    let mut faces: Vec<Vec<usize>> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        match parts.next() {
            Some("v") => {
                let coords: Vec<f64> = parts
                    .map(|t| {
                        t.parse::<f64>().map_err(|e| GeomError::Parse {
                            line,
                            message: format!("bad coordinate {t:?}: {e}"),
                        })
                    })
                    .collect::<Result<_, _>>()?;
                if coords.len() != 3 {
                    return Err(GeomError::Parse {
                        line,
                        message: format!("expected 3 coordinates, got {}", coords.len()),
                    });
                }
                vertices.push(Point::new(coords[0], coords[1], coords[2]));
            }
            Some("f") => {
                let idx: Vec<usize> = parts
                    .map(|t| {
                        // Tolerate v/vt/vn references; only the vertex index is kept.
                        let head = t.split('/').next().unwrap_or(t);
                        head.parse::<usize>().map_err(|e| GeomError::Parse {
                            line,
                            message: format!("bad face index {t:?}: {e}"),
                        })
                    })
                    .collect::<Result<_, _>>()?;
                if idx.len() < 3 {
                    return Err(GeomError::Parse {
                        line,
                        message: "face needs at least 3 vertices".into(),
                    });
                }
                let mut face = Vec::with_capacity(idx.len());
                for i in idx {
                    if i == 0 || i > vertices.len() {
                        return Err(GeomError::Parse {
                            line,
                            message: format!("face index {i} out of range"),
                        });
                    }
                    face.push(i - 1);
                }
                faces.push(face);
            }
            Some(other) => {
                return Err(GeomError::Parse {
                    line,
                    message: format!("unsupported directive {other:?}"),
                })
            }
            None => {}
        }
    }
    if vertices.is_empty() || faces.is_empty() {
        return Err(GeomError::Parse {
            line: 0,
            message: "no vertices or faces found".into(),
        });
    }
    Ok(Mesh { vertices, faces })
}

pub fn import_mesh(path: &Path) -> Result<Mesh, GeomError> {
    mesh_from_obj(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_counts(shape: ShapeName) {
        let rec = polyhedron_properties(shape);
        let mesh = platonic_mesh(shape, 1.0);
        assert_eq!(mesh.vertices.len(), rec.vertex_count, "{shape:?} vertices");
        assert_eq!(mesh.edge_count(), rec.side_count, "{shape:?} edges");
        assert_eq!(mesh.faces.len(), rec.surface_count, "{shape:?} faces");
        assert_eq!(mesh.euler_characteristic(), 2, "{shape:?} euler");
        mesh.validate().unwrap();
        let lengths = mesh.edge_lengths();
        for l in &lengths {
            assert!((l - 1.0).abs() < 1e-9, "{shape:?} edge {l}");
        }
    }

    #[test]
    fn reference_solids_match_records() {
        for shape in ALL_SHAPES {
            assert_counts(shape);
        }
    }

    #[test]
    fn property_constants() {
        let hexa = polyhedron_properties(ShapeName::Hexahedron);
        assert_eq!(
            (hexa.vertex_count, hexa.side_count, hexa.surface_count),
            (8, 12, 6)
        );
        assert_eq!(hexa.interior_angle_deg, 90.0);
        assert_eq!(hexa.height_side_ratio, 1.0);
        assert!(hexa.surfaces_parallel);

        let octa = polyhedron_properties(ShapeName::Octahedron);
        assert_eq!(
            (octa.vertex_count, octa.side_count, octa.surface_count),
            (6, 12, 8)
        );
        assert!((octa.height_side_ratio - std::f64::consts::SQRT_2).abs() < 1e-8);
        assert!(octa.surfaces_parallel);

        let tetra = polyhedron_properties(ShapeName::Tetrahedron);
        assert_eq!(
            (tetra.vertex_count, tetra.side_count, tetra.surface_count),
            (4, 6, 4)
        );
        assert!((tetra.height_side_ratio - 0.81649658).abs() < 1e-8);
        assert!(!tetra.surfaces_parallel);

        let phi = golden_ratio();
        let dodeca = polyhedron_properties(ShapeName::Dodecahedron);
        assert_eq!(
            dodeca.height_side_ratio,
            phi * phi / (2.0 * (3.0 - phi).sqrt())
        );
        for shape in ALL_SHAPES {
            let r = polyhedron_properties(shape);
            assert_eq!(
                r.vertex_count as isize - r.side_count as isize + r.surface_count as isize,
                2
            );
            assert!(r.height_side_ratio > 0.0);
        }
    }

    #[test]
    fn cube_dual_is_octahedron() {
        let cube = platonic_mesh(ShapeName::Hexahedron, 1.0);
        let dual = dual_polyhedron(&cube).unwrap();
        assert_eq!(dual.vertices.len(), 6);
        assert_eq!(dual.faces.len(), 8);
        // Face centers of the unit cube: one per axis direction at 0.5.
        for v in &dual.vertices {
            assert!((v.norm() - 0.5).abs() < 1e-12);
            let nonzero = v.iter().filter(|c| c.abs() > 1e-12).count();
            assert_eq!(nonzero, 1);
        }
        for l in dual.edge_lengths() {
            assert!((l - 0.5_f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn octahedron_dual_is_third_scale_cube() {
        let cube = platonic_mesh(ShapeName::Hexahedron, 1.0);
        let octa = dual_polyhedron(&cube).unwrap();
        let back = dual_polyhedron(&octa).unwrap();
        assert_eq!(back.vertices.len(), 8);
        assert_eq!(back.faces.len(), 6);
        // Triangle centroid oracle: face {(.5,0,0),(0,.5,0),(0,0,.5)} has
        // centroid (1/6,1/6,1/6), so the dual cube has side 1/3.
        for v in &back.vertices {
            for c in v.iter() {
                assert!((c.abs() - 1.0 / 6.0).abs() < 1e-12);
            }
        }
        for l in back.edge_lengths() {
            assert!((l - 1.0 / 3.0).abs() < 1e-12);
        }
        assert!(similar(&back, &cube, 1e-9));
    }

    #[test]
    fn double_dual_similar_for_all_shapes() {
        for shape in ALL_SHAPES {
            let m = platonic_mesh(shape, 1.0);
            let dd = dual_polyhedron(&dual_polyhedron(&m).unwrap()).unwrap();
            assert!(similar(&m, &dd, 1e-9), "{shape:?} double dual not similar");
        }
    }

    #[test]
    fn dual_rejects_point_with_interior_vertex() {
        let mut cube = platonic_mesh(ShapeName::Hexahedron, 1.0);
        cube.vertices.push(Point::new(0.0, 0.0, 0.0));
        cube.faces.push(vec![0, 1, 2]);
        assert!(matches!(
            dual_polyhedron(&cube),
            Err(GeomError::NonConvexInput(_))
        ));
    }

    #[test]
    fn untwisted_cell_is_cube() {
        let cell = generate_cell(&CellParams::default()).unwrap();
        assert_eq!(cell.mesh.vertices.len(), 8);
        assert_eq!(cell.mesh.faces.len(), 6);
        assert_eq!(cell.width, 1.0);
        assert!((cell.height - 1.0).abs() < 1e-12);
        assert!(similar(
            &cell.mesh,
            &platonic_mesh(ShapeName::Hexahedron, 1.0),
            1e-9
        ));
    }

    #[test]
    fn twisted_cell_is_antiprism_like() {
        let cell = generate_cell(&CellParams {
            angle_difference_deg: 45.0,
            ..CellParams::default()
        })
        .unwrap();
        assert_eq!(cell.mesh.vertices.len(), 8);
        assert_eq!(cell.mesh.faces.len(), 10);
        let quads = cell.mesh.faces.iter().filter(|f| f.len() == 4).count();
        let tris = cell.mesh.faces.iter().filter(|f| f.len() == 3).count();
        assert_eq!((quads, tris), (2, 8));
        assert_eq!(cell.mesh.euler_characteristic(), 2);
    }

    #[test]
    fn sqrt2_ratio_aligns_top_side_with_bottom_diagonal() {
        let cell = generate_cell(&CellParams {
            angle_difference_deg: 45.0,
            side_ratio: 2.0_f64.sqrt(),
            ..CellParams::default()
        })
        .unwrap();
        let top_z = cell.height;
        let top_edges: Vec<f64> = cell
            .mesh
            .edges()
            .iter()
            .filter(|&&(a, b)| {
                cell.mesh.vertices[a].z > top_z / 2.0 && cell.mesh.vertices[b].z > top_z / 2.0
            })
            .map(|&(a, b)| (cell.mesh.vertices[a] - cell.mesh.vertices[b]).norm())
            .collect();
        assert_eq!(top_edges.len(), 4);
        let bottom_diagonal = 2.0_f64.sqrt();
        for e in top_edges {
            assert!((e - bottom_diagonal).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_cells_rejected() {
        for bad in [
            CellParams {
                height: 0.0,
                ..CellParams::default()
            },
            CellParams {
                bottom_side: -1.0,
                ..CellParams::default()
            },
            CellParams {
                side_ratio: 0.0,
                ..CellParams::default()
            },
            CellParams {
                angle_difference_deg: 60.0,
                ..CellParams::default()
            },
        ] {
            assert!(matches!(
                generate_cell(&bad),
                Err(GeomError::DegenerateCell(_))
            ));
        }
    }

    #[test]
    fn cube_symmetry() {
        let cube = platonic_mesh(ShapeName::Hexahedron, 1.0);
        let rep = symmetry_check(&cube);
        assert!(rep.axisymmetric);
        assert!(rep.centrosymmetric);
    }

    #[test]
    fn twist_breaks_centrosymmetry() {
        for angle in [15.0, 30.0] {
            let cell = generate_cell(&CellParams {
                angle_difference_deg: angle,
                ..CellParams::default()
            })
            .unwrap();
            let rep = symmetry_check(&cell.mesh);
            assert!(!rep.centrosymmetric, "angle {angle}");
            assert!(!rep.axisymmetric, "angle {angle}");
        }
        let cell45 = generate_cell(&CellParams {
            angle_difference_deg: 45.0,
            ..CellParams::default()
        })
        .unwrap();
        assert!(symmetry_check(&cell45.mesh).axisymmetric);
    }

    #[test]
    fn symmetry_is_translation_invariant() {
        let cell = generate_cell(&CellParams {
            angle_difference_deg: 30.0,
            side_ratio: 2.0_f64.sqrt(),
            ..CellParams::default()
        })
        .unwrap();
        let a = symmetry_check(&cell.mesh);
        let b = symmetry_check(&cell.mesh.translated(Point::new(13.0, -4.5, 7.25)));
        assert_eq!(a, b);
    }

    #[test]
    fn equilateral_height_solution_at_45() {
        let solved = equilateral_adjust(
            &CellParams {
                angle_difference_deg: 45.0,
                ..CellParams::default()
            },
            SolveFor::Height,
        )
        .unwrap();
        // Chord algebra gives h^2 = sqrt(2)/2 for unit sides.
        let expected = 2.0_f64.powf(-0.25);
        assert!(
            (solved.height - expected).abs() < 1e-9,
            "height {}",
            solved.height
        );
        let lengths = generate_cell(&solved).unwrap().mesh.edge_lengths();
        assert_eq!(lengths.len(), 16);
        let min = lengths.iter().copied().fold(f64::INFINITY, f64::min);
        let max = lengths.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!(max - min < 1e-6);
    }

    #[test]
    fn equilateral_ratio_solution_at_45() {
        let solved = equilateral_adjust(
            &CellParams {
                angle_difference_deg: 45.0,
                height: 2.0_f64.powf(-0.25),
                ..CellParams::default()
            },
            SolveFor::SideRatio,
        )
        .unwrap();
        assert!((solved.side_ratio - 1.0).abs() < 1e-9);
    }

    #[test]
    fn equilateral_no_solution_cases() {
        for params in [
            CellParams::default(),
            CellParams {
                angle_difference_deg: 15.0,
                ..CellParams::default()
            },
            CellParams {
                angle_difference_deg: 30.0,
                ..CellParams::default()
            },
        ] {
            assert!(matches!(
                equilateral_adjust(&params, SolveFor::Height),
                Err(GeomError::NoSolution(_))
            ));
        }
    }

    #[test]
    fn canonical_family() {
        let cells = canonical_cells(&CellFamilyConfig::default()).unwrap();
        assert_eq!(cells[0].width, 1.0);
        assert_eq!(cells[1].width, 1.5);
        assert_eq!(cells[2].width, 2.0);
        for c in &cells {
            assert!((c.height - cells[0].height).abs() < 1e-9);
            assert_eq!(c.mesh.euler_characteristic(), 2);
        }
        assert_eq!(
            cells.iter().map(|c| c.cell_class).collect::<Vec<_>>(),
            vec![
                Some(CellClass::A),
                Some(CellClass::B),
                Some(CellClass::C)
            ]
        );
        assert!(matches!(
            canonical_cells(&CellFamilyConfig {
                height: 1.0,
                widths: [1.0, 1.0, 2.0],
            }),
            Err(GeomError::InvalidWidths(_))
        ));
    }

    #[test]
    fn obj_round_trip() {
        let cube = platonic_mesh(ShapeName::Hexahedron, 1.0);
        let text = mesh_to_obj(&cube).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 8);
        assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 6);
        let parsed = mesh_from_obj(&text).unwrap();
        for (a, b) in cube.vertices.iter().zip(&parsed.vertices) {
            assert!((a - b).norm() < 1e-6);
        }
        assert_eq!(parsed.faces, cube.faces);
        let second = mesh_to_obj(&parsed).unwrap();
        assert_eq!(text, second, "second export must be byte-identical");
    }

    #[test]
    fn obj_rejects_empty_and_malformed() {
        let empty = Mesh {
            vertices: vec![],
            faces: vec![],
        };
        assert!(matches!(mesh_to_obj(&empty), Err(GeomError::Io(_))));
        assert!(matches!(
            mesh_from_obj("v 0 0\n"),
            Err(GeomError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            mesh_from_obj("v 0 0 0\nf 1 2 9\n"),
            Err(GeomError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            mesh_from_obj("vt 0 0\n"),
            Err(GeomError::Parse { .. })
        ));
    }

    #[test]
    fn hull_drops_interior_points_and_stays_deterministic() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let n = rng.random_range(4..=30);
            let pts: Vec<Point> = (0..n)
                .map(|_| {
                    Point::new(
                        rng.random_range(-1.0..1.0),
                        rng.random_range(-1.0..1.0),
                        rng.random_range(-1.0..1.0),
                    )
                })
                .collect();
            let hull = match convex_hull(&pts) {
                Ok(h) => h,
                // Nearly coplanar draws may be degenerate; skip them.
                Err(GeomError::DegenerateHull) => continue,
                Err(e) => panic!("{e}"),
            };
            hull.validate().unwrap();
            assert_eq!(hull.euler_characteristic(), 2);
            // Every input point lies inside or on the hull.
            let c = hull.centroid();
            for face in &hull.faces {
                let n = newell_normal(&hull, face);
                let fc = hull.face_centroid(face);
                let outward = if (fc - c).dot(&n) < 0.0 { -n } else { n };
                for p in &pts {
                    assert!((p - fc).dot(&outward) <= 1e-7);
                }
            }
            let again = convex_hull(&pts).unwrap();
            assert_eq!(hull, again);
        }
    }
}
