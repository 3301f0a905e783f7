//! Parameter study machinery: sweep the normal compliance coefficient on a
//! shortened ball drop and watch the penetration shrink as the contact
//! stiffens. Each run lands in its own subdirectory with full artifacts;
//! the summary table goes to sweep.csv.
//!
//! Run with: cargo run --release --example parameter_sweep [out_dir]

use std::path::PathBuf;

use impact2d::scenario::{parse_config, sweep_scenario, SweepParam};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out_root = PathBuf::from(
        std::env::args().nth(1).unwrap_or_else(|| "out/c_nu_sweep".to_string()),
    );
    // Shorten the bundled drop so the sweep stays quick: the first bounce is
    // enough to measure max penetration. The softest run is still mid-bounce
    // at the cut, so its energy drift column shows energy parked in the
    // contact potential, not dissipation.
    let text = include_str!("../../../configs/ball_desk.cfg").replace("t_final = 2", "t_final = 1.3");
    let config = parse_config(&text)?;

    let values = [1e3, 1e4, 1e5];
    let rows = sweep_scenario(&config, SweepParam::CNu, &values, &out_root)?;

    println!("c_nu        max penetration   energy drift      outer iters");
    for row in &rows {
        println!(
            "{:<10}  {:<16.6e}  {:<16.6e}  {}",
            row.value, row.max_penetration, row.final_energy_drift, row.total_outer_iterations
        );
    }
    println!("table: {}", out_root.join("sweep.csv").display());

    assert!(
        rows.windows(2).all(|w| w[1].max_penetration < w[0].max_penetration),
        "stiffer contact must penetrate less"
    );
    Ok(())
}
