//! Build the two body shapes, check mesh invariants, and write VTK files.
//!
//! Run with: cargo run --example mesh_generation [out_dir]

use impact2d::mesh::{build_annulus_mesh, build_disk_mesh, validate, write_vtk, BoundaryRegion};
use nalgebra::Point2;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out_dir = std::env::args().nth(1).unwrap_or_else(|| "out/meshes".to_string());
    std::fs::create_dir_all(&out_dir)?;

    let disk = build_disk_mesh(Point2::new(0.0, 0.0), 1.0, 0.1)?;
    let report = validate(&disk);
    println!(
        "disk: {} nodes, {} triangles, {} contact nodes, area {:.6} (circle: {:.6}), valid: {}",
        disk.nodes.len(),
        disk.triangles.len(),
        disk.contact_nodes.len(),
        disk.area(),
        std::f64::consts::PI,
        report.violations.is_empty(),
    );

    let ring = build_annulus_mesh(Point2::new(0.0, 0.0), 0.9, 1.0, 0.05)?;
    let traction_edges = ring
        .boundary_edges
        .iter()
        .filter(|e| e.region == BoundaryRegion::Traction)
        .count();
    println!(
        "ring: {} nodes, {} triangles, {} contact nodes (outer), {} traction edges (inner)",
        ring.nodes.len(),
        ring.triangles.len(),
        ring.contact_nodes.len(),
        traction_edges,
    );

    // The polygonal boundary matters for touchdown: the lowest NODE of a
    // coarse disk can sit well above the circle's lowest point.
    let coarse = build_disk_mesh(Point2::new(0.0, 0.0), 1.0, 0.3)?;
    let lowest = coarse
        .contact_nodes
        .iter()
        .map(|&n| coarse.nodes[n].y)
        .fold(f64::INFINITY, f64::min);
    println!(
        "coarse disk (18-gon boundary): lowest node at y = {lowest:.4}, circle reaches -1.0"
    );

    for (name, mesh) in [("disk", &disk), ("ring", &ring)] {
        let path = format!("{out_dir}/{name}.vtk");
        let mut file = std::fs::File::create(&path)?;
        write_vtk(mesh, &mut file)?;
        println!("wrote {path}");
    }
    Ok(())
}
