//! Structured triangulations of the disk and annulus benchmark domains.
//!
//! Both generators build polar grids: deterministic, seed-free, with node
//! counts driven by a target spacing `target_h`. Boundary edges carry a region
//! tag so downstream assembly knows where displacements are prescribed, where
//! tractions act, and where contact with the foundation may occur.

use nalgebra::{Point2, Vector2};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::{self, Write};

/// Boundary region tags.
///
/// `Dirichlet` carries prescribed zero displacement, `Traction` carries the
/// applied surface load, `Contact` is the candidate contact boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryRegion {
    Dirichlet,
    Traction,
    Contact,
}

/// One boundary edge: a node pair plus its region tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub nodes: [usize; 2],
    pub region: BoundaryRegion,
}

/// Linear-triangle mesh with tagged boundary.
///
/// Invariants (checked by [`validate`]):
/// - every triangle has strictly positive signed area (counterclockwise order)
/// - boundary edges form closed loops covering exactly the topological boundary
/// - all node indices are in range and no node is orphaned
/// - `contact_nodes` lists exactly the nodes incident to a `Contact` edge,
///   ascending
#[derive(Clone, Debug)]
pub struct Mesh2D {
    pub nodes: Vec<Point2<f64>>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
    pub contact_nodes: Vec<usize>,
}

/// Lumped boundary measure attached to one contact node: half the summed
/// length of its incident contact edges.
#[derive(Clone, Copy, Debug)]
pub struct BoundaryWeight {
    pub node: usize,
    pub weight: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum MeshError {
    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("target spacing must be positive, got {0}")]
    NonPositiveSpacing(f64),
    #[error("target spacing {target_h} must be smaller than the radius {radius}")]
    SpacingTooCoarse { target_h: f64, radius: f64 },
    #[error("annulus radii must satisfy 0 < inner < outer, got inner {inner}, outer {outer}")]
    InvalidAnnulusRadii { inner: f64, outer: f64 },
}

/// One invariant violation found by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MeshViolation {
    /// Triangle references a node index outside `nodes`.
    TriangleNodeOutOfRange { triangle: usize, node: usize },
    /// Boundary edge references a node index outside `nodes`.
    EdgeNodeOutOfRange { edge: usize, node: usize },
    /// Triangle with non-positive signed area (degenerate or inverted).
    NonPositiveArea { triangle: usize },
    /// Node referenced by no triangle.
    OrphanNode { node: usize },
    /// Tagged edge that is not an edge of the topological boundary.
    EdgeNotOnBoundary { edge: usize },
    /// Topological boundary edge missing from `boundary_edges`.
    UntaggedBoundaryEdge { nodes: [usize; 2] },
    /// Boundary node whose tagged-edge degree is not 2 (loops broken).
    BoundaryNodeDegree { node: usize, degree: usize },
    /// `contact_nodes` differs from the nodes incident to Contact edges.
    ContactNodesMismatch,
}

impl std::fmt::Display for MeshViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::TriangleNodeOutOfRange { triangle, node } => {
                write!(f, "triangle {triangle} references missing node {node}")
            }
            Self::EdgeNodeOutOfRange { edge, node } => {
                write!(f, "boundary edge {edge} references missing node {node}")
            }
            Self::NonPositiveArea { triangle } => {
                write!(f, "triangle {triangle} has non-positive area")
            }
            Self::OrphanNode { node } => write!(f, "node {node} belongs to no triangle"),
            Self::EdgeNotOnBoundary { edge } => {
                write!(f, "tagged edge {edge} is not on the topological boundary")
            }
            Self::UntaggedBoundaryEdge { nodes } => {
                write!(f, "boundary edge ({}, {}) carries no tag", nodes[0], nodes[1])
            }
            Self::BoundaryNodeDegree { node, degree } => {
                write!(f, "boundary node {node} has {degree} tagged edges (expected 2)")
            }
            Self::ContactNodesMismatch => {
                write!(f, "contact_nodes does not match the nodes on Contact edges")
            }
        }
    }
}

/// Validation findings; empty means the mesh satisfies all invariants.
#[derive(Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<MeshViolation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl Mesh2D {
    /// Signed area of triangle `t` (positive for counterclockwise node order).
    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let ab = self.nodes[b] - self.nodes[a];
        let ac = self.nodes[c] - self.nodes[a];
        0.5 * (ab.x * ac.y - ab.y * ac.x)
    }

    /// Sum of signed triangle areas.
    pub fn area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    /// Rigid translation of the reference configuration.
    pub fn translate(&mut self, shift: Vector2<f64>) {
        for p in &mut self.nodes {
            *p += shift;
        }
    }

    fn edge_length(&self, e: &BoundaryEdge) -> f64 {
        (self.nodes[e.nodes[1]] - self.nodes[e.nodes[0]]).norm()
    }
}

/// Disk of given radius, entire boundary tagged `Contact`.
///
/// The grid is polar: ring `j` of `nr` lies at radius `radius*j/nr` and holds
/// `6j` nodes, so tangential and radial spacings stay close to `target_h`
/// everywhere. A center node closes the innermost fan. Refining `target_h` by
/// half roughly quadruples the triangle count (`6*nr^2` triangles).
pub fn build_disk_mesh(
    center: Point2<f64>,
    radius: f64,
    target_h: f64,
) -> Result<Mesh2D, MeshError> {
    if radius <= 0.0 {
        return Err(MeshError::NonPositiveRadius(radius));
    }
    if target_h <= 0.0 {
        return Err(MeshError::NonPositiveSpacing(target_h));
    }
    if target_h >= radius {
        return Err(MeshError::SpacingTooCoarse { target_h, radius });
    }

    let nr = ((radius / target_h).round() as usize).max(2);
    // Ring j starts at node 1 + 3 j (j-1); ring 0 is the center node.
    let ring_start = |j: usize| 1 + 3 * j * (j - 1);
    let mut nodes = vec![center];
    for j in 1..=nr {
        let r = radius * j as f64 / nr as f64;
        let n = 6 * j;
        for i in 0..n {
            let th = 2.0 * PI * i as f64 / n as f64;
            nodes.push(center + r * Vector2::new(th.cos(), th.sin()));
        }
    }

    let mut triangles = Vec::with_capacity(6 * nr * nr);
    for i in 0..6 {
        triangles.push([0, ring_start(1) + i, ring_start(1) + (i + 1) % 6]);
    }
    for j in 1..nr {
        let (n_in, n_out) = (6 * j, 6 * (j + 1));
        let (s_in, s_out) = (ring_start(j), ring_start(j + 1));
        let inner = |t: usize| s_in + t % n_in;
        let outer = |t: usize| s_out + t % n_out;
        // Per sector: j inner segments face j+1 outer segments; the fan
        // alternates outer-edge and inner-edge triangles.
        for s in 0..6 {
            for t in 0..=j {
                triangles.push([
                    outer(s * (j + 1) + t),
                    outer(s * (j + 1) + t + 1),
                    inner(s * j + t),
                ]);
            }
            for t in 0..j {
                triangles.push([inner(s * j + t), outer(s * (j + 1) + t + 1), inner(s * j + t + 1)]);
            }
        }
    }

    let n_bnd = 6 * nr;
    let s_bnd = ring_start(nr);
    let boundary_edges = (0..n_bnd)
        .map(|i| BoundaryEdge {
            nodes: [s_bnd + i, s_bnd + (i + 1) % n_bnd],
            region: BoundaryRegion::Contact,
        })
        .collect();

    let mut mesh = Mesh2D { nodes, triangles, boundary_edges, contact_nodes: Vec::new() };
    mesh.contact_nodes = contact_nodes_from_edges(&mesh);
    Ok(mesh)
}

/// Annulus between `r_inner` and `r_outer`; outer circle tagged `Contact`,
/// inner circle tagged `Traction`.
///
/// All rings carry the same angular node count (sized for the outer circle),
/// which keeps the grid a stack of structured quad bands split into triangles.
pub fn build_annulus_mesh(
    center: Point2<f64>,
    r_inner: f64,
    r_outer: f64,
    target_h: f64,
) -> Result<Mesh2D, MeshError> {
    if r_inner <= 0.0 || r_inner >= r_outer {
        return Err(MeshError::InvalidAnnulusRadii { inner: r_inner, outer: r_outer });
    }
    if target_h <= 0.0 {
        return Err(MeshError::NonPositiveSpacing(target_h));
    }

    let n_rad = (((r_outer - r_inner) / target_h).round() as usize).max(1);
    let n_th = ((2.0 * PI * r_outer / target_h).round() as usize).max(8);

    let mut nodes = Vec::with_capacity((n_rad + 1) * n_th);
    for l in 0..=n_rad {
        let r = r_inner + (r_outer - r_inner) * l as f64 / n_rad as f64;
        for i in 0..n_th {
            let th = 2.0 * PI * i as f64 / n_th as f64;
            nodes.push(center + r * Vector2::new(th.cos(), th.sin()));
        }
    }

    let at = |l: usize, i: usize| l * n_th + i % n_th;
    let mut triangles = Vec::with_capacity(2 * n_rad * n_th);
    for l in 0..n_rad {
        for i in 0..n_th {
            triangles.push([at(l, i), at(l + 1, i), at(l + 1, i + 1)]);
            triangles.push([at(l, i), at(l + 1, i + 1), at(l, i + 1)]);
        }
    }

    let mut boundary_edges: Vec<BoundaryEdge> = (0..n_th)
        .map(|i| BoundaryEdge {
            nodes: [at(n_rad, i), at(n_rad, i + 1)],
            region: BoundaryRegion::Contact,
        })
        .collect();
    // Inner circle reversed so the body interior stays on the edge's left.
    boundary_edges.extend((0..n_th).map(|i| BoundaryEdge {
        nodes: [at(0, i + 1), at(0, i)],
        region: BoundaryRegion::Traction,
    }));

    let mut mesh = Mesh2D { nodes, triangles, boundary_edges, contact_nodes: Vec::new() };
    mesh.contact_nodes = contact_nodes_from_edges(&mesh);
    Ok(mesh)
}

fn contact_nodes_from_edges(mesh: &Mesh2D) -> Vec<usize> {
    let mut nodes: Vec<usize> = mesh
        .boundary_edges
        .iter()
        .filter(|e| e.region == BoundaryRegion::Contact)
        .flat_map(|e| e.nodes)
        .collect();
    nodes.sort_unstable();
    nodes.dedup();
    nodes
}

/// Check every `Mesh2D` invariant, collecting all violations.
pub fn validate(mesh: &Mesh2D) -> ValidationReport {
    let mut violations = Vec::new();
    let n = mesh.nodes.len();

    let mut indices_ok = true;
    for (t, tri) in mesh.triangles.iter().enumerate() {
        for &v in tri {
            if v >= n {
                violations.push(MeshViolation::TriangleNodeOutOfRange { triangle: t, node: v });
                indices_ok = false;
            }
        }
    }
    for (e, edge) in mesh.boundary_edges.iter().enumerate() {
        for &v in &edge.nodes {
            if v >= n {
                violations.push(MeshViolation::EdgeNodeOutOfRange { edge: e, node: v });
                indices_ok = false;
            }
        }
    }
    if !indices_ok {
        // Geometry checks below would index out of bounds.
        return ValidationReport { violations };
    }

    let mut referenced = vec![false; n];
    for (t, tri) in mesh.triangles.iter().enumerate() {
        if mesh.triangle_area(t) <= 0.0 {
            violations.push(MeshViolation::NonPositiveArea { triangle: t });
        }
        for &v in tri {
            referenced[v] = true;
        }
    }
    for (v, &seen) in referenced.iter().enumerate() {
        if !seen {
            violations.push(MeshViolation::OrphanNode { node: v });
        }
    }

    // Topological boundary: undirected triangle edges used exactly once.
    let mut edge_use: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for tri in &mesh.triangles {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            *edge_use.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }
    let boundary: Vec<(usize, usize)> = edge_use
        .iter()
        .filter_map(|(&e, &uses)| (uses == 1).then_some(e))
        .collect();

    let mut tagged: Vec<(usize, usize)> = Vec::with_capacity(mesh.boundary_edges.len());
    for (e, edge) in mesh.boundary_edges.iter().enumerate() {
        let key = (edge.nodes[0].min(edge.nodes[1]), edge.nodes[0].max(edge.nodes[1]));
        if boundary.binary_search(&key).is_err() {
            violations.push(MeshViolation::EdgeNotOnBoundary { edge: e });
        }
        tagged.push(key);
    }
    tagged.sort_unstable();
    for &key in &boundary {
        if tagged.binary_search(&key).is_err() {
            violations.push(MeshViolation::UntaggedBoundaryEdge { nodes: [key.0, key.1] });
        }
    }

    let mut degree: BTreeMap<usize, usize> = BTreeMap::new();
    for edge in &mesh.boundary_edges {
        for &v in &edge.nodes {
            *degree.entry(v).or_insert(0) += 1;
        }
    }
    for (&node, &deg) in &degree {
        if deg != 2 {
            violations.push(MeshViolation::BoundaryNodeDegree { node, degree: deg });
        }
    }

    if mesh.contact_nodes != contact_nodes_from_edges(mesh) {
        violations.push(MeshViolation::ContactNodesMismatch);
    }

    ValidationReport { violations }
}

/// Lumped contact-boundary measures, one per contact node.
///
/// Each Contact edge contributes half its length to both endpoints, so the
/// weights sum to the exact polygonal Contact-boundary length. Returns an
/// empty list when the mesh has no Contact edges.
pub fn boundary_weights(mesh: &Mesh2D) -> Vec<BoundaryWeight> {
    let mut weight: BTreeMap<usize, f64> = BTreeMap::new();
    for edge in &mesh.boundary_edges {
        if edge.region == BoundaryRegion::Contact {
            let half = 0.5 * mesh.edge_length(edge);
            for &v in &edge.nodes {
                *weight.entry(v).or_insert(0.0) += half;
            }
        }
    }
    mesh.contact_nodes
        .iter()
        .map(|&node| BoundaryWeight { node, weight: weight.get(&node).copied().unwrap_or(0.0) })
        .collect()
}

/// Write the mesh as a legacy ASCII VTK unstructured grid for inspection.
pub fn write_vtk<W: Write>(mesh: &Mesh2D, out: &mut W) -> io::Result<()> {
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "impact2d mesh")?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(out, "POINTS {} double", mesh.nodes.len())?;
    for p in &mesh.nodes {
        writeln!(out, "{:.16e} {:.16e} 0.0", p.x, p.y)?;
    }
    writeln!(out, "CELLS {} {}", mesh.triangles.len(), 4 * mesh.triangles.len())?;
    for tri in &mesh.triangles {
        writeln!(out, "3 {} {} {}", tri[0], tri[1], tri[2])?;
    }
    writeln!(out, "CELL_TYPES {}", mesh.triangles.len())?;
    for _ in &mesh.triangles {
        writeln!(out, "5")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn disk_mesh_is_valid_and_covers_area() {
        let mesh = build_disk_mesh(Point2::new(100.0, 100.0), 10.0, 1.0).unwrap();
        let report = validate(&mesh);
        assert!(report.is_valid(), "violations: {:?}", report.violations);
        // Polygonal boundary underestimates the circle; 2% at h = radius/10.
        let exact = PI * 100.0;
        assert!((mesh.area() - exact).abs() / exact < 0.02, "area {}", mesh.area());
    }

    #[test]
    fn disk_refinement_roughly_quadruples_triangles() {
        let coarse = build_disk_mesh(Point2::origin(), 10.0, 1.0).unwrap();
        let fine = build_disk_mesh(Point2::origin(), 10.0, 0.5).unwrap();
        let ratio = fine.triangles.len() as f64 / coarse.triangles.len() as f64;
        assert!((3.0..=5.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn disk_rejects_bad_parameters() {
        assert!(matches!(
            build_disk_mesh(Point2::origin(), 10.0, 10.0),
            Err(MeshError::SpacingTooCoarse { .. })
        ));
        assert!(matches!(
            build_disk_mesh(Point2::origin(), -1.0, 0.1),
            Err(MeshError::NonPositiveRadius(_))
        ));
        assert!(matches!(
            build_disk_mesh(Point2::origin(), 1.0, 0.0),
            Err(MeshError::NonPositiveSpacing(_))
        ));
    }

    #[test]
    fn annulus_mesh_is_valid_with_split_boundary() {
        let mesh = build_annulus_mesh(Point2::new(100.0, 100.0), 9.0, 10.0, 0.35).unwrap();
        let report = validate(&mesh);
        assert!(report.is_valid(), "violations: {:?}", report.violations);
        let exact = PI * (100.0 - 81.0);
        assert!((mesh.area() - exact).abs() / exact < 0.02);

        // Every node sits between the radii.
        let c = Point2::new(100.0, 100.0);
        for p in &mesh.nodes {
            let r = (p - c).norm();
            assert!(r > 9.0 - 1e-9 && r < 10.0 + 1e-9);
        }
        // Outer circle is Contact, inner is Traction.
        for e in &mesh.boundary_edges {
            let r = (mesh.nodes[e.nodes[0]] - c).norm();
            let expect = if r > 9.5 { BoundaryRegion::Contact } else { BoundaryRegion::Traction };
            assert_eq!(e.region, expect);
        }
    }

    #[test]
    fn annulus_rejects_swapped_radii() {
        assert!(matches!(
            build_annulus_mesh(Point2::origin(), 10.0, 9.0, 0.1),
            Err(MeshError::InvalidAnnulusRadii { .. })
        ));
        assert!(matches!(
            build_annulus_mesh(Point2::origin(), 9.0, 9.0, 0.1),
            Err(MeshError::InvalidAnnulusRadii { .. })
        ));
    }

    #[test]
    fn validate_flags_inverted_triangle() {
        let mut mesh = build_disk_mesh(Point2::origin(), 1.0, 0.3).unwrap();
        mesh.triangles[3].swap(0, 1);
        let report = validate(&mesh);
        assert!(report
            .violations
            .contains(&MeshViolation::NonPositiveArea { triangle: 3 }));
    }

    #[test]
    fn validate_flags_orphan_node() {
        let mut mesh = build_disk_mesh(Point2::origin(), 1.0, 0.3).unwrap();
        mesh.nodes.push(Point2::new(5.0, 5.0));
        let orphan = mesh.nodes.len() - 1;
        let report = validate(&mesh);
        assert!(report.violations.contains(&MeshViolation::OrphanNode { node: orphan }));
    }

    #[test]
    fn validate_flags_out_of_range_indices() {
        let mut mesh = build_disk_mesh(Point2::origin(), 1.0, 0.3).unwrap();
        let n = mesh.nodes.len();
        mesh.triangles[0][0] = n + 7;
        let report = validate(&mesh);
        assert!(report
            .violations
            .contains(&MeshViolation::TriangleNodeOutOfRange { triangle: 0, node: n + 7 }));
    }

    #[test]
    fn weights_sum_to_contact_perimeter() {
        let mesh = build_disk_mesh(Point2::new(100.0, 100.0), 10.0, 1.0).unwrap();
        let weights = boundary_weights(&mesh);
        assert_eq!(weights.len(), mesh.contact_nodes.len());
        assert!(weights.iter().all(|w| w.weight > 0.0));

        let perimeter: f64 = mesh
            .boundary_edges
            .iter()
            .filter(|e| e.region == BoundaryRegion::Contact)
            .map(|e| mesh.edge_length(e))
            .sum();
        let total: f64 = weights.iter().map(|w| w.weight).sum();
        assert_relative_eq!(total, perimeter, max_relative = 1e-12);

        // Uniform polygon: every weight equals perimeter / n segments.
        let n = mesh.boundary_edges.iter().filter(|e| e.region == BoundaryRegion::Contact).count();
        for w in &weights {
            assert_relative_eq!(w.weight, perimeter / n as f64, max_relative = 1e-12);
        }
    }

    #[test]
    fn no_contact_edges_gives_empty_weights() {
        let mut mesh = build_disk_mesh(Point2::origin(), 1.0, 0.3).unwrap();
        for e in &mut mesh.boundary_edges {
            e.region = BoundaryRegion::Dirichlet;
        }
        mesh.contact_nodes.clear();
        assert!(boundary_weights(&mesh).is_empty());
    }

    #[test]
    fn vtk_export_has_expected_counts() {
        let mesh = build_disk_mesh(Point2::origin(), 1.0, 0.3).unwrap();
        let mut buf = Vec::new();
        write_vtk(&mesh, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains(&format!("POINTS {} double", mesh.nodes.len())));
        assert!(text.contains(&format!("CELL_TYPES {}", mesh.triangles.len())));
    }
}
