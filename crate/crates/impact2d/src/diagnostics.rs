//! Energy accounting, penetration metrics, and result serialization.
//!
//! The discrete energy is E_n = ½ v_nᵀ M v_n + Σ_elements area·W̃(C_n). For a
//! converged step the identity
//!
//!   E_n − E_{n−1} = f_ext·Δu − Σ_γ w_γ [λν Δδ + Δt λτ·δ̇τ]
//!
//! holds to solver precision: the left-over `balance_residual` equals the
//! final Newton residual dotted with the displacement increment. Contact work
//! uses the same nodal weights as force assembly, which is what makes the
//! residual vanish instead of merely being small.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::dynamics::{DynamicsError, SystemState};
use crate::mesh::{write_vtk, Mesh2D};
use crate::solver::{Problem, Trajectory};

#[derive(Debug, thiserror::Error)]
pub enum DiagnosticsError {
    #[error("energy evaluation failed: {0}")]
    Energy(#[from] DynamicsError),
    #[error("writing {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

/// Energy content of one state plus the work bookkeeping of the step that
/// produced it (all increments zero for the initial state).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyRecord {
    pub time: f64,
    pub kinetic: f64,
    pub strain: f64,
    pub total: f64,
    pub contact_normal_work_inc: f64,
    pub friction_work_inc: f64,
    pub balance_residual: f64,
}

/// Largest positive gap over the contact nodes at one time level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PenetrationRecord {
    pub time: f64,
    pub max_penetration: f64,
}

/// Kinetic, strain, and total energy of a state; the work increments are left
/// zero.
pub fn discrete_energy(problem: &Problem, state: &SystemState) -> Result<EnergyRecord, DiagnosticsError> {
    let kinetic = 0.5 * problem.mass().quadratic_form(&state.v, &state.v);
    let strain = problem.assembler.strain_energy(&problem.model, &state.u)?;
    Ok(EnergyRecord {
        time: state.time,
        kinetic,
        strain,
        total: kinetic + strain,
        contact_normal_work_inc: 0.0,
        friction_work_inc: 0.0,
        balance_residual: 0.0,
    })
}

/// Contact work of the step ending at `state`: normal part Σ w λν(δⁿ − δⁿ⁻¹),
/// friction part Δt Σ w λτ·δ̇τ with the stored half-step velocity.
pub fn contact_work_increments(weights: &[f64], state: &SystemState, dt: f64) -> (f64, f64) {
    let mut normal = 0.0;
    let mut friction = 0.0;
    for (c, &w) in state.contact.iter().zip(weights) {
        normal += w * c.pressure * (c.gap_curr - c.gap_prev);
        friction += dt * w * c.traction.dot(&c.tangential_velocity);
    }
    (normal, friction)
}

/// (E_n − E_{n−1}) − external_work_inc + contact work increments; zero to
/// solver precision for converged steps.
pub fn energy_balance_residual(
    total_prev: f64,
    total_curr: f64,
    normal_work_inc: f64,
    friction_work_inc: f64,
    external_work_inc: f64,
) -> f64 {
    (total_curr - total_prev) - external_work_inc + normal_work_inc + friction_work_inc
}

/// Full energy bookkeeping of a trajectory: one record per state, increments
/// and balance residuals attached to the step that produced each state.
pub fn energy_history(
    problem: &Problem,
    trajectory: &Trajectory,
) -> Result<Vec<EnergyRecord>, DiagnosticsError> {
    let weights = problem.assembler.contact_weights();
    let mut records: Vec<EnergyRecord> = Vec::with_capacity(trajectory.states.len());
    for (k, state) in trajectory.states.iter().enumerate() {
        let mut record = discrete_energy(problem, state)?;
        if k > 0 {
            let prev = &trajectory.states[k - 1];
            let dt = state.time - prev.time;
            let (normal, friction) = contact_work_increments(weights, state, dt);
            let f_ext = problem.assembler.external_force(&problem.loads, prev.time + 0.5 * dt);
            let external: f64 = f_ext
                .iter()
                .zip(state.u.iter().zip(&prev.u))
                .map(|(f, (uc, up))| f * (uc - up))
                .sum();
            record.contact_normal_work_inc = normal;
            record.friction_work_inc = friction;
            record.balance_residual = energy_balance_residual(
                records[k - 1].total,
                record.total,
                normal,
                friction,
                external,
            );
        }
        records.push(record);
    }
    Ok(records)
}

/// Per-state penetration series and its global maximum.
pub fn max_penetration(states: &[SystemState]) -> (Vec<PenetrationRecord>, f64) {
    let mut global = 0.0f64;
    let series = states
        .iter()
        .map(|s| {
            let max = s
                .contact
                .iter()
                .map(|c| c.gap_curr.max(0.0))
                .fold(0.0f64, f64::max);
            global = global.max(max);
            PenetrationRecord { time: s.time, max_penetration: max }
        })
        .collect();
    (series, global)
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> DiagnosticsError + '_ {
    move |source| DiagnosticsError::Io { path: path.to_path_buf(), source }
}

/// Write the energy/penetration table. One row per state, 17 significant
/// digits so values round-trip exactly; reruns produce byte-identical files.
pub fn write_energy_csv(
    records: &[EnergyRecord],
    penetrations: &[PenetrationRecord],
    path: &Path,
) -> Result<(), DiagnosticsError> {
    assert_eq!(records.len(), penetrations.len());
    let mut out = String::new();
    out.push_str(
        "time,kinetic,strain,total,contact_work,friction_work,balance_residual,max_penetration\n",
    );
    for (r, p) in records.iter().zip(penetrations) {
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            r.time,
            r.kinetic,
            r.strain,
            r.total,
            r.contact_normal_work_inc,
            r.friction_work_inc,
            r.balance_residual,
            p.max_penetration,
        ));
    }
    fs::write(path, out).map_err(io_err(path))
}

/// Write one legacy-ASCII VTK frame: reference geometry plus nodal
/// displacement vectors and the contact pressure field (zero away from the
/// contact boundary).
pub fn write_vtk_frame(mesh: &Mesh2D, state: &SystemState, path: &Path) -> Result<(), DiagnosticsError> {
    let mut buffer = Vec::new();
    write_vtk(mesh, &mut buffer).map_err(io_err(path))?;

    let n = mesh.nodes.len();
    let mut pressure = vec![0.0f64; n];
    for (c, &node) in state.contact.iter().zip(&mesh.contact_nodes) {
        pressure[node] = c.pressure;
    }

    let mut extra = String::new();
    extra.push_str(&format!("POINT_DATA {n}\n"));
    extra.push_str("VECTORS displacement double\n");
    for a in 0..n {
        extra.push_str(&format!("{:.16e} {:.16e} 0.0\n", state.u[2 * a], state.u[2 * a + 1]));
    }
    extra.push_str("SCALARS contact_pressure double 1\nLOOKUP_TABLE default\n");
    for p in &pressure {
        extra.push_str(&format!("{p:.16e}\n"));
    }
    buffer.extend_from_slice(extra.as_bytes());
    fs::write(path, buffer).map_err(io_err(path))
}

/// Write `frame_0000.vtk`, `frame_0001.vtk`, … into `dir`, one per state.
pub fn write_vtk_series(
    mesh: &Mesh2D,
    states: &[SystemState],
    dir: &Path,
) -> Result<Vec<PathBuf>, DiagnosticsError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut paths = Vec::with_capacity(states.len());
    for (k, state) in states.iter().enumerate() {
        let path = dir.join(format!("frame_{k:04}.vtk"));
        write_vtk_frame(mesh, state, &path)?;
        paths.push(path);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact_geom::RigidFoundation;
    use crate::contact_law::{FrictionParams, NormalLawParams};
    use crate::dynamics::{ExternalLoads, TimeStepConfig};
    use crate::material::{MaterialModel, SvkParams};
    use crate::mesh::build_disk_mesh;
    use crate::solver::SolverConfig;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use nalgebra::{Point2, Vector2};

    fn drop_problem(law: NormalLawParams, mu: f64, dt: f64, t_final: f64) -> Problem {
        let mesh = build_disk_mesh(Point2::new(0.0, 0.99), 1.0, 0.3).unwrap();
        Problem::new(
            mesh,
            MaterialModel::SaintVenantKirchhoff(
                SvkParams::from_young_poisson(1e4, 0.35).unwrap(),
            ),
            RigidFoundation::below_height(0.0),
            law,
            if mu > 0.0 {
                FrictionParams::new(mu, 1e3).unwrap()
            } else {
                FrictionParams::frictionless()
            },
            ExternalLoads::none(),
            TimeStepConfig::new(dt, t_final, 1.0).unwrap(),
            SolverConfig { tolerance: 1e-10, ..SolverConfig::default() },
            Vec::new(),
        )
        .unwrap()
    }

    #[test]
    fn rest_state_has_zero_energy() {
        let problem = drop_problem(NormalLawParams::snc(1e3, 2.0).unwrap(), 0.0, 1e-3, 1e-3);
        let state = problem.uniform_state(Vector2::zeros(), Vector2::zeros());
        let record = discrete_energy(&problem, &state).unwrap();
        assert_eq!(record.kinetic, 0.0);
        assert_eq!(record.strain, 0.0);
        assert_eq!(record.total, 0.0);
    }

    #[test]
    fn rigid_translation_kinetic_energy_matches_the_mass_integral() {
        let problem = drop_problem(NormalLawParams::snc(1e3, 2.0).unwrap(), 0.0, 1e-3, 1e-3);
        let speed = 3.0;
        let state = problem.uniform_state(Vector2::zeros(), Vector2::new(0.0, -speed));
        let record = discrete_energy(&problem, &state).unwrap();
        assert_eq!(record.strain, 0.0);
        let area = problem.mesh().area();
        assert_relative_eq!(record.kinetic, 0.5 * area * speed * speed, max_relative = 1e-12);
        // Polygonal area only approximates the circle; the 18-gon of
        // target_h = 0.3 sits 2.02 percent below pi.
        assert_relative_eq!(
            record.kinetic,
            0.5 * std::f64::consts::PI * speed * speed,
            max_relative = 0.03
        );
    }

    #[test]
    fn free_flight_balance_residual_is_tiny() {
        let problem = drop_problem(NormalLawParams::inc(1e3, 2.0).unwrap(), 0.0, 1e-2, 0.05);
        let initial = problem.uniform_state(Vector2::zeros(), Vector2::new(0.02, 0.01));
        let trajectory = problem.solve_transient(initial).unwrap();
        let records = energy_history(&problem, &trajectory).unwrap();
        let e0 = records[0].total;
        for r in &records[1..] {
            assert!(r.balance_residual.abs() <= 1e-10 * e0.max(1.0));
            assert_eq!(r.contact_normal_work_inc, 0.0);
        }
    }

    /// During a converged frictionless drop the balance residual stays at
    /// solver precision, the normal work telescopes into the penetration
    /// potential (c_ν/2)Δ[δ]₊², and the augmented energy
    /// E_n + (c_ν/2)Σ w [δⁿ]₊² is conserved.
    #[test]
    fn inc_drop_conserves_the_augmented_energy() {
        let c_nu = 1e3;
        let problem = drop_problem(NormalLawParams::inc(c_nu, 2.0).unwrap(), 0.0, 1e-3, 0.5);
        let initial = problem.uniform_state(Vector2::zeros(), Vector2::new(0.0, -0.05));
        let trajectory = problem.solve_transient(initial).unwrap();
        let records = energy_history(&problem, &trajectory).unwrap();
        let weights = problem.assembler.contact_weights();

        let augmented = |k: usize| -> f64 {
            let potential: f64 = trajectory.states[k]
                .contact
                .iter()
                .zip(weights)
                .map(|(c, &w)| 0.5 * c_nu * w * c.gap_curr.max(0.0).powi(2))
                .sum();
            records[k].total + potential
        };
        let e0 = augmented(0);
        assert!(e0 > 0.0);

        let mut saw_contact_work = false;
        for k in 1..records.len() {
            let r = &records[k];
            assert!(
                r.balance_residual.abs() <= 1e-8 * records[k - 1].total.max(1.0),
                "step {k} balance residual {}",
                r.balance_residual
            );
            // Normal work telescopes per node (exact identity of the law).
            let state = &trajectory.states[k];
            let telescoped: f64 = state
                .contact
                .iter()
                .zip(weights)
                .map(|(c, &w)| {
                    0.5 * c_nu * w * (c.gap_curr.max(0.0).powi(2) - c.gap_prev.max(0.0).powi(2))
                })
                .sum();
            assert_abs_diff_eq!(r.contact_normal_work_inc, telescoped, epsilon = 1e-10);
            if r.contact_normal_work_inc.abs() > 1e-12 {
                saw_contact_work = true;
            }
            assert!(
                (augmented(k) - e0).abs() <= 1e-6 * e0,
                "augmented energy drift at step {k}: {} vs {e0}",
                augmented(k)
            );
        }
        assert!(saw_contact_work, "the drop must exchange contact work");
    }

    /// With friction and tangential motion the cumulative friction work is
    /// nonnegative and the final energy does not exceed the initial one.
    #[test]
    fn frictional_drop_dissipates() {
        let problem = drop_problem(NormalLawParams::inc(1e3, 2.0).unwrap(), 0.2, 1e-3, 0.2);
        let initial = problem.uniform_state(Vector2::zeros(), Vector2::new(0.05, -0.05));
        let trajectory = problem.solve_transient(initial).unwrap();
        let records = energy_history(&problem, &trajectory).unwrap();

        let mut cumulative_friction = 0.0;
        for r in &records[1..] {
            cumulative_friction += r.friction_work_inc;
        }
        assert!(cumulative_friction >= 0.0, "friction work {cumulative_friction}");
        assert!(cumulative_friction > 0.0, "the slide must dissipate something");
        let e0 = records[0].total;
        let e_final = records.last().unwrap().total;
        assert!(
            e_final <= e0 + 1e-8 * e0,
            "energy must not grow: E_0 = {e0}, E_final = {e_final}"
        );
    }

    /// Known limitation of the fused active-set loop: when a persistent-
    /// contact slide decelerates until the per-step friction impulse exceeds
    /// the remaining tangential momentum, the frozen slip direction flips
    /// every iteration and the iterates 2-cycle. The sets stay stable but the
    /// increment norm stalls, and the tie rule (slip multipliers sit exactly
    /// on the cone) never hands the node back to stick. The solver must
    /// surface this as a non-converged step, not hang or panic.
    #[test]
    fn decelerating_slide_stall_is_reported() {
        let problem = drop_problem(NormalLawParams::inc(1e3, 2.0).unwrap(), 0.3, 1e-3, 0.4);
        let initial = problem.uniform_state(Vector2::zeros(), Vector2::new(0.05, -0.05));
        let err = problem.solve_transient(initial).unwrap_err();
        match err {
            crate::solver::SolverError::Step { time, ref source, .. } => {
                assert!(
                    matches!(**source, crate::solver::SolverError::NonConverged { .. }),
                    "expected a non-convergence report, got {source}"
                );
                // The impact and the fast part of the slide do converge.
                assert!(time > 0.15, "stall before the slide decelerates: t = {time}");
            }
            other => panic!("expected a step failure, got {other}"),
        }
    }

    #[test]
    fn penetration_metrics() {
        let problem = drop_problem(NormalLawParams::inc(1e3, 2.0).unwrap(), 0.0, 1e-3, 0.3);
        let initial = problem.uniform_state(Vector2::zeros(), Vector2::new(0.0, -0.05));
        let trajectory = problem.solve_transient(initial).unwrap();
        let (series, global) = max_penetration(&trajectory.states);
        assert_eq!(series.len(), trajectory.states.len());
        assert_eq!(series[0].max_penetration, 0.0);
        assert!(global > 0.0);
        assert!(series.iter().all(|p| p.max_penetration >= 0.0));
        assert_relative_eq!(
            global,
            series.iter().map(|p| p.max_penetration).fold(0.0f64, f64::max)
        );

        // A trajectory that never touches reports zero.
        let clear = drop_problem(NormalLawParams::inc(1e3, 2.0).unwrap(), 0.0, 1e-2, 0.05);
        let up = clear.uniform_state(Vector2::zeros(), Vector2::new(0.0, 0.05));
        let (_, none) = max_penetration(&clear.solve_transient(up).unwrap().states);
        assert_eq!(none, 0.0);
    }

    #[test]
    fn energy_csv_round_trips_and_is_deterministic() {
        let problem = drop_problem(NormalLawParams::inc(1e3, 2.0).unwrap(), 0.0, 1e-2, 0.05);
        let initial = problem.uniform_state(Vector2::zeros(), Vector2::new(0.0, -0.05));
        let trajectory = problem.solve_transient(initial).unwrap();
        let records = energy_history(&problem, &trajectory).unwrap();
        let (penetrations, _) = max_penetration(&trajectory.states);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("energy.csv");
        write_energy_csv(&records, &penetrations, &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();

        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "time,kinetic,strain,total,contact_work,friction_work,balance_residual,max_penetration"
        );
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), trajectory.states.len()); // N steps + initial row

        for (row, (r, p)) in rows.iter().zip(records.iter().zip(&penetrations)) {
            let fields: Vec<f64> = row.split(',').map(|f| f.parse().unwrap()).collect();
            assert_eq!(fields.len(), 8);
            assert_eq!(fields[0], r.time);
            assert_eq!(fields[1], r.kinetic);
            assert_eq!(fields[2], r.strain);
            assert_eq!(fields[3], r.total);
            assert_eq!(fields[4], r.contact_normal_work_inc);
            assert_eq!(fields[5], r.friction_work_inc);
            assert_eq!(fields[6], r.balance_residual);
            assert_eq!(fields[7], p.max_penetration);
        }

        let path2 = dir.path().join("energy2.csv");
        write_energy_csv(&records, &penetrations, &path2).unwrap();
        assert_eq!(fs::read(&path).unwrap(), fs::read(&path2).unwrap());
    }

    #[test]
    fn empty_history_writes_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        write_energy_csv(&[], &[], &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 1);
    }

    #[test]
    fn vtk_series_carries_displacement_and_pressure() {
        let problem = drop_problem(NormalLawParams::inc(1e3, 2.0).unwrap(), 0.0, 1e-2, 0.03);
        let initial = problem.uniform_state(Vector2::zeros(), Vector2::new(0.0, -0.05));
        let trajectory = problem.solve_transient(initial).unwrap();

        let dir = tempfile::tempdir().unwrap();
        let paths = write_vtk_series(problem.mesh(), &trajectory.states, dir.path()).unwrap();
        assert_eq!(paths.len(), trajectory.states.len());
        assert!(paths[0].file_name().unwrap().to_str().unwrap() == "frame_0000.vtk");

        let text = fs::read_to_string(&paths[1]).unwrap();
        assert!(text.contains("POINT_DATA"));
        assert!(text.contains("VECTORS displacement double"));
        assert!(text.contains("SCALARS contact_pressure double 1"));
        let n_nodes = problem.mesh().nodes.len();
        assert!(text.contains(&format!("POINT_DATA {n_nodes}")));
    }
}
