//! The frictional ring impact (desk-scale benchmark): an Ogden annulus
//! launched at 45 degrees bounces and slides on the foundation. Friction
//! only ever removes energy; the normal law returns what it stores.
//!
//! Run with: cargo run --release --example ring_friction [out_dir]

use std::path::PathBuf;

use impact2d::scenario::{build_problem, parse_config};
use impact2d::diagnostics::energy_history;
use impact2d::contact_law::ContactStatus;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let _ = PathBuf::from(
        std::env::args().nth(1).unwrap_or_else(|| "out/ring_friction".to_string()),
    );
    let config = parse_config(include_str!("../../../configs/ring_desk.cfg"))?;
    let (problem, initial) = build_problem(&config)?;
    println!(
        "ring: {} nodes, {} contact nodes, mu = {}",
        problem.mesh().nodes.len(),
        problem.mesh().contact_nodes.len(),
        config.friction.mu
    );

    let trajectory = problem.solve_transient(initial)?;
    let records = energy_history(&problem, &trajectory)?;

    let mut friction_work = 0.0;
    let mut contact_steps = 0usize;
    let mut slip_nodes = 0usize;
    for (state, record) in trajectory.states.iter().zip(&records).skip(1) {
        friction_work += record.friction_work_inc;
        let active = state
            .contact
            .iter()
            .filter(|c| c.status != ContactStatus::Gap)
            .count();
        if active > 0 {
            contact_steps += 1;
            slip_nodes += state
                .contact
                .iter()
                .filter(|c| c.status == ContactStatus::Slip)
                .count();
        }
    }

    let e0 = records[0].total;
    let e_final = records.last().unwrap().total;
    println!("steps: {} ({} with active contact)", trajectory.reports.len(), contact_steps);
    println!("slip node-steps: {slip_nodes}");
    println!("initial energy:          {e0:.6e}");
    println!("final energy:            {e_final:.6e}");
    println!("cumulative friction work: {friction_work:.6e} (nonnegative)");
    println!("energy lost to friction:  {:.2}%", 100.0 * (e0 - e_final) / e0);
    Ok(())
}
