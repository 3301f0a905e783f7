//! Active-set solver for one implicit time step and the transient driver.
//!
//! Each outer iteration classifies every contact node (active/inactive in the
//! normal direction, stick/slip tangentially), imposes the corresponding
//! affine per-node conditions, and takes one Newton step of the resulting
//! linearized system. This is semi-smooth Newton on the complementarity
//! formulation: classification and linearization fused, one sparse solve per
//! outer iteration. Convergence requires both a small scaled increment and
//! identical sets across the last two classifications.
//!
//! The increment norm mixes units: displacement increments enter in meters,
//! multiplier increments are scaled by 1/c_ν. The iteration starts from a
//! free-flight predictor u⁰ = u_{n−1} + Δt v_{n−1} with multipliers warm
//! started from the previous step.

use nalgebra::{Point2, Vector2};

use crate::contact_geom::{self, RigidFoundation};
use crate::contact_law::{
    friction_complementarity, friction_newton_update, inc_effective_gap, inc_newton_update,
    normal_complementarity, snc_newton_update, ContactStatus, FrictionParams, NodalContactState,
    NormalLawParams, TangentialRule,
};
use crate::dynamics::{
    contact_contribution, midpoint_velocity_update, Assembler, ContactRuleSet, DynamicsError,
    ExternalLoads, SystemState, TimeStepConfig,
};
use crate::material::MaterialModel;
use crate::mesh::Mesh2D;
use crate::sparse::{eliminate_dofs, solve_sparse, CooMatrix, SparseError};

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error("invalid solver parameter: {0}")]
    InvalidParameter(String),
    #[error("assembly failed: {0}")]
    Assembly(#[from] DynamicsError),
    #[error("linear solve failed: {0}")]
    Linear(#[from] SparseError),
    #[error("non-finite iterate during the outer iteration")]
    NonFinite,
    #[error(
        "no convergence after {iterations} outer iterations (increment norm {increment_norm:e})"
    )]
    NonConverged { iterations: usize, increment_norm: f64 },
    #[error("time step {step} (t = {time}): {source}")]
    Step { step: usize, time: f64, source: Box<SolverError> },
}

/// Partition of the contact nodes: normal active/inactive, and stick/slip
/// among the active ones. `stick` is false on inactive nodes by convention.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActiveSetState {
    pub active_normal: Vec<bool>,
    pub stick: Vec<bool>,
}

impl ActiveSetState {
    /// Number of per-node flags that differ.
    pub fn differences(&self, other: &Self) -> usize {
        self.active_normal
            .iter()
            .zip(&other.active_normal)
            .filter(|(a, b)| a != b)
            .count()
            + self.stick.iter().zip(&other.stick).filter(|(a, b)| a != b).count()
    }

    pub fn active_count(&self) -> usize {
        self.active_normal.iter().filter(|&&a| a).count()
    }
}

fn classify_tangential(state: &NodalContactState, fp: &FrictionParams, active: bool) -> bool {
    // Stick iff −‖λτ‖ + μ λν > 0; the tie sits on the slip side.
    active && state.traction.norm() < fp.mu * state.pressure
}

/// Instantaneous-gap classification: active iff δ ≥ 0 (a grazing node counts
/// as active).
pub fn classify_sets_snc(states: &[NodalContactState], fp: &FrictionParams) -> ActiveSetState {
    let active_normal: Vec<bool> = states.iter().map(|s| s.gap_curr >= 0.0).collect();
    let stick = states
        .iter()
        .zip(&active_normal)
        .map(|(s, &a)| classify_tangential(s, fp, a))
        .collect();
    ActiveSetState { active_normal, stick }
}

/// Effective-gap classification. δ̃ is structurally nonnegative (it vanishes
/// when both gaps are nonpositive), so the literal test δ̃ ≥ 0 would mark
/// every node active; a node is classified active when δ̃ > 0, or when the
/// instantaneous gap is grazing (δ_curr ≥ 0, where δ̃ = 0 only if the gap
/// power vanishes anyway). Geometrically separated nodes with δ̃ > 0 remain
/// active: they still return stored contact energy.
pub fn classify_sets_inc(
    states: &[NodalContactState],
    alpha: f64,
    fp: &FrictionParams,
) -> ActiveSetState {
    let active_normal: Vec<bool> = states
        .iter()
        .map(|s| inc_effective_gap(alpha, s.gap_prev, s.gap_curr) > 0.0 || s.gap_curr >= 0.0)
        .collect();
    let stick = states
        .iter()
        .zip(&active_normal)
        .map(|(s, &a)| classify_tangential(s, fp, a))
        .collect();
    ActiveSetState { active_normal, stick }
}

/// Outer-iteration controls. The tolerance applies to the scaled increment
/// norm; `linear_tol` is the verified relative residual of each sparse solve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    pub tolerance: f64,
    pub max_outer_iters: usize,
    pub linear_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { tolerance: 1e-8, max_outer_iters: 50, linear_tol: 1e-10 }
    }
}

impl SolverConfig {
    pub fn new(tolerance: f64, max_outer_iters: usize, linear_tol: f64) -> Result<Self, SolverError> {
        if !(tolerance > 0.0) {
            return Err(SolverError::InvalidParameter(format!(
                "tolerance must be positive, got {tolerance}"
            )));
        }
        if max_outer_iters < 1 {
            return Err(SolverError::InvalidParameter("max_outer_iters must be at least 1".into()));
        }
        if !(linear_tol > 0.0) {
            return Err(SolverError::InvalidParameter(format!(
                "linear_tol must be positive, got {linear_tol}"
            )));
        }
        Ok(Self { tolerance, max_outer_iters, linear_tol })
    }
}

/// Outcome of one time step.
#[derive(Clone, Debug)]
pub struct SolverReport {
    pub outer_iterations: usize,
    pub converged: bool,
    pub final_increment_norm: f64,
    pub set_changes_per_iter: Vec<usize>,
}

/// A complete transient run: states[0] is the initial condition, reports[k]
/// produced states[k + 1].
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub states: Vec<SystemState>,
    pub reports: Vec<SolverReport>,
}

/// Everything fixed over a transient run: discretized body, material, contact
/// data, loads, and solver controls.
#[derive(Clone, Debug)]
pub struct Problem {
    pub assembler: Assembler,
    pub model: MaterialModel,
    pub foundation: RigidFoundation,
    pub law: NormalLawParams,
    pub friction: FrictionParams,
    pub loads: ExternalLoads,
    pub time: TimeStepConfig,
    pub solver: SolverConfig,
    dirichlet_dofs: Vec<usize>,
    mass: CooMatrix,
}

impl Problem {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        mesh: Mesh2D,
        model: MaterialModel,
        foundation: RigidFoundation,
        law: NormalLawParams,
        friction: FrictionParams,
        loads: ExternalLoads,
        time: TimeStepConfig,
        solver: SolverConfig,
        mut dirichlet_dofs: Vec<usize>,
    ) -> Result<Self, SolverError> {
        let assembler = Assembler::new(mesh)?;
        dirichlet_dofs.sort_unstable();
        dirichlet_dofs.dedup();
        if let Some(&d) = dirichlet_dofs.last() {
            if d >= assembler.n_dofs() {
                return Err(SolverError::InvalidParameter(format!(
                    "dirichlet dof {d} out of range for {} dofs",
                    assembler.n_dofs()
                )));
            }
        }
        let mass = assembler.assemble_mass(time.density);
        Ok(Self {
            assembler,
            model,
            foundation,
            law,
            friction,
            loads,
            time,
            solver,
            dirichlet_dofs,
            mass,
        })
    }

    pub fn mass(&self) -> &CooMatrix {
        &self.mass
    }

    pub fn mesh(&self) -> &Mesh2D {
        self.assembler.mesh()
    }

    pub fn dirichlet_dofs(&self) -> &[usize] {
        &self.dirichlet_dofs
    }

    /// State with per-node displacement and velocity given by `f(node, X)`.
    pub fn initial_state_with(
        &self,
        f: impl Fn(usize, Point2<f64>) -> (Vector2<f64>, Vector2<f64>),
    ) -> SystemState {
        let mesh = self.mesh();
        let n = mesh.nodes.len();
        let mut u = vec![0.0; 2 * n];
        let mut v = vec![0.0; 2 * n];
        for (a, &x) in mesh.nodes.iter().enumerate() {
            let (ua, va) = f(a, x);
            u[2 * a] = ua.x;
            u[2 * a + 1] = ua.y;
            v[2 * a] = va.x;
            v[2 * a + 1] = va.y;
        }
        let nu = self.foundation.normal();
        let contact = mesh
            .contact_nodes
            .iter()
            .map(|&node| {
                let phi = mesh.nodes[node] + Vector2::new(u[2 * node], u[2 * node + 1]);
                let gap = contact_geom::gap(&self.foundation, phi);
                let v_node = Vector2::new(v[2 * node], v[2 * node + 1]);
                NodalContactState {
                    gap_prev: gap,
                    gap_curr: gap,
                    tangential_velocity: contact_geom::tangential_velocity(v_node, nu),
                    pressure: 0.0,
                    traction: Vector2::zeros(),
                    status: ContactStatus::Gap,
                }
            })
            .collect();
        SystemState { time: 0.0, u, v, contact }
    }

    /// State with uniform initial displacement and velocity.
    pub fn uniform_state(&self, u0: Vector2<f64>, v0: Vector2<f64>) -> SystemState {
        self.initial_state_with(|_, _| (u0, v0))
    }

    fn classify(&self, states: &[NodalContactState]) -> ActiveSetState {
        match self.law {
            NormalLawParams::Snc { .. } => classify_sets_snc(states, &self.friction),
            NormalLawParams::Inc { alpha, .. } => classify_sets_inc(states, alpha, &self.friction),
        }
    }

    /// Contact node states at the given iterate: geometry from u, multipliers
    /// as supplied, INC gap memory from the previous converged step.
    #[allow(clippy::too_many_arguments)]
    fn iterate_states(
        &self,
        u: &[f64],
        u_prev: &[f64],
        gap_memory: &[f64],
        pressures: &[f64],
        tractions: &[Vector2<f64>],
        statuses: Option<&ActiveSetState>,
        dt: f64,
    ) -> Vec<NodalContactState> {
        let mesh = self.mesh();
        let nu = self.foundation.normal();
        mesh.contact_nodes
            .iter()
            .enumerate()
            .map(|(i, &node)| {
                let u_node = Vector2::new(u[2 * node], u[2 * node + 1]);
                let u_prev_node = Vector2::new(u_prev[2 * node], u_prev[2 * node + 1]);
                let phi = mesh.nodes[node] + u_node;
                let status = match statuses {
                    None => ContactStatus::Gap,
                    Some(sets) => {
                        if !sets.active_normal[i] {
                            ContactStatus::Gap
                        } else if sets.stick[i] {
                            ContactStatus::Stick
                        } else {
                            ContactStatus::Slip
                        }
                    }
                };
                NodalContactState {
                    gap_prev: gap_memory[i],
                    gap_curr: contact_geom::gap(&self.foundation, phi),
                    tangential_velocity: contact_geom::tangential_velocity(
                        (u_node - u_prev_node) / dt,
                        nu,
                    ),
                    pressure: pressures[i],
                    traction: tractions[i],
                    status,
                }
            })
            .collect()
    }

    fn rules_for(
        &self,
        sets: &ActiveSetState,
        states: &[NodalContactState],
    ) -> Vec<ContactRuleSet> {
        states
            .iter()
            .enumerate()
            .map(|(i, s)| {
                if !sets.active_normal[i] {
                    return ContactRuleSet::inactive();
                }
                let normal = match self.law {
                    NormalLawParams::Snc { c_nu, alpha } => snc_newton_update(c_nu, alpha, s.gap_curr),
                    NormalLawParams::Inc { c_nu, alpha } => {
                        inc_newton_update(c_nu, alpha, s.gap_prev, s.gap_curr)
                    }
                };
                let tangential = friction_newton_update(
                    &self.friction,
                    s.pressure,
                    s.traction,
                    s.tangential_velocity,
                );
                ContactRuleSet { normal, tangential }
            })
            .collect()
    }

    /// Advance one implicit step of size `dt` from `state_prev`. A
    /// non-converged outcome is reported, not an error; hard failures
    /// (singular systems, non-finite values) are errors.
    pub fn solve_time_step(
        &self,
        state_prev: &SystemState,
        dt: f64,
    ) -> Result<(SystemState, SolverReport), SolverError> {
        let mesh = self.mesh();
        let n = self.assembler.n_dofs();
        let nc = mesh.contact_nodes.len();
        assert_eq!(state_prev.u.len(), n);
        assert_eq!(state_prev.v.len(), n);
        assert_eq!(state_prev.contact.len(), nc);

        // Free-flight predictor; fixed dofs stay at their previous values.
        let mut u: Vec<f64> = state_prev
            .u
            .iter()
            .zip(&state_prev.v)
            .map(|(u, v)| u + dt * v)
            .collect();
        for &d in &self.dirichlet_dofs {
            u[d] = state_prev.u[d];
        }

        // Warm start: multipliers from the previous step; the INC gap memory
        // is the previous step's converged gap.
        let mut pressures: Vec<f64> = state_prev.contact.iter().map(|c| c.pressure).collect();
        let mut tractions: Vec<Vector2<f64>> =
            state_prev.contact.iter().map(|c| c.traction).collect();
        let gap_memory: Vec<f64> = state_prev.contact.iter().map(|c| c.gap_curr).collect();

        let mut states =
            self.iterate_states(&u, &state_prev.u, &gap_memory, &pressures, &tractions, None, dt);
        let mut sets = self.classify(&states);

        let weights = self.assembler.contact_weights();
        let mut set_changes = Vec::new();
        let mut increment_norm = f64::INFINITY;
        let mut converged = false;
        let mut iterations = 0;

        while iterations < self.solver.max_outer_iters {
            iterations += 1;
            let rules = self.rules_for(&sets, &states);

            let mut forces = Vec::with_capacity(nc);
            let mut blocks = Vec::with_capacity(nc);
            for (i, &node) in mesh.contact_nodes.iter().enumerate() {
                let (f, k) = contact_contribution(
                    &self.foundation,
                    &self.friction,
                    dt,
                    weights[i],
                    mesh.nodes[node],
                    Vector2::new(u[2 * node], u[2 * node + 1]),
                    Vector2::new(state_prev.u[2 * node], state_prev.u[2 * node + 1]),
                    &rules[i],
                );
                forces.push(f);
                blocks.push(k);
            }

            let residual = self.assembler.assemble_residual(
                &self.mass,
                &self.model,
                state_prev,
                &u,
                &self.loads,
                &forces,
                dt,
            )?;
            let mut triplets = self.assembler.assemble_tangent(
                &self.mass,
                &self.model,
                &state_prev.u,
                &u,
                &blocks,
                dt,
            )?;
            let mut rhs: Vec<f64> = residual.iter().map(|r| -r).collect();
            eliminate_dofs(&mut triplets, &mut rhs, &self.dirichlet_dofs);
            let du = solve_sparse(n, &triplets, &rhs, self.solver.linear_tol)?;

            let mut norm_sq = 0.0;
            for i in 0..n {
                u[i] += du[i];
                norm_sq += du[i] * du[i];
            }

            // Multipliers follow their affine rules at the new iterate.
            let c_nu = self.law.c_nu();
            let nu = self.foundation.normal();
            for (i, &node) in mesh.contact_nodes.iter().enumerate() {
                let u_node = Vector2::new(u[2 * node], u[2 * node + 1]);
                let u_prev_node =
                    Vector2::new(state_prev.u[2 * node], state_prev.u[2 * node + 1]);
                let gap = contact_geom::gap(&self.foundation, mesh.nodes[node] + u_node);
                let v_tau =
                    contact_geom::tangential_velocity((u_node - u_prev_node) / dt, nu);
                let pressure = rules[i].normal.evaluate(gap);
                let traction = match rules[i].tangential {
                    TangentialRule::Free => Vector2::zeros(),
                    TangentialRule::Stick => self.friction.c_tau * v_tau,
                    TangentialRule::Slip { direction } => self.friction.mu * pressure * direction,
                };
                norm_sq += ((pressure - pressures[i]) / c_nu).powi(2)
                    + ((traction - tractions[i]).norm() / c_nu).powi(2);
                pressures[i] = pressure;
                tractions[i] = traction;
            }

            increment_norm = norm_sq.sqrt();
            if !increment_norm.is_finite() {
                return Err(SolverError::NonFinite);
            }

            states = self.iterate_states(
                &u,
                &state_prev.u,
                &gap_memory,
                &pressures,
                &tractions,
                Some(&sets),
                dt,
            );
            let new_sets = self.classify(&states);
            set_changes.push(sets.differences(&new_sets));
            let stable = new_sets == sets;
            sets = new_sets;

            if increment_norm <= self.solver.tolerance && stable {
                converged = true;
                break;
            }
        }

        // Final statuses from the final classification.
        let contact = self.iterate_states(
            &u,
            &state_prev.u,
            &gap_memory,
            &pressures,
            &tractions,
            Some(&sets),
            dt,
        );
        let v = midpoint_velocity_update(&state_prev.u, &state_prev.v, &u, dt);
        let state = SystemState { time: state_prev.time + dt, u, v, contact };
        let report = SolverReport {
            outer_iterations: iterations,
            converged,
            final_increment_norm: increment_norm,
            set_changes_per_iter: set_changes,
        };
        Ok((state, report))
    }

    /// March from `initial` to t_final. Any non-converged step aborts with
    /// its step index; the last step is truncated when Δt does not divide the
    /// horizon.
    pub fn solve_transient(&self, initial: SystemState) -> Result<Trajectory, SolverError> {
        let mut states = vec![initial];
        let mut reports = Vec::new();
        let t_end = self.time.t_final;
        let eps = 1e-12 * t_end.max(self.time.dt);
        loop {
            let t = states.last().expect("nonempty").time;
            if t + eps >= t_end {
                break;
            }
            let dt = self.time.dt.min(t_end - t);
            let step_index = reports.len();
            let (state, report) = self
                .solve_time_step(states.last().expect("nonempty"), dt)
                .map_err(|e| SolverError::Step { step: step_index, time: t, source: Box::new(e) })?;
            if !report.converged {
                return Err(SolverError::Step {
                    step: step_index,
                    time: t,
                    source: Box::new(SolverError::NonConverged {
                        iterations: report.outer_iterations,
                        increment_norm: report.final_increment_norm,
                    }),
                });
            }
            states.push(state);
            reports.push(report);
        }
        Ok(Trajectory { states, reports })
    }
}

/// Scaled complementarity residuals per contact node: the normal residual in
/// units of 1/c_ν, the friction residual normalized by c_ν·max(μλν, ‖c_τδ̇τ‖)
/// (zero when that scale vanishes, which forces a zero residual). Both are
/// comparable against the solver tolerance.
pub fn complementarity_residuals(
    law: &NormalLawParams,
    fp: &FrictionParams,
    states: &[NodalContactState],
) -> Vec<(f64, f64)> {
    states
        .iter()
        .map(|s| {
            let normal =
                normal_complementarity(law, s.gap_prev, s.gap_curr, s.pressure).abs() / law.c_nu();
            let residual =
                friction_complementarity(fp, s.pressure, s.tangential_velocity, s.traction);
            let scale = (fp.mu * s.pressure).max((fp.c_tau * s.tangential_velocity).norm());
            let tangential = if scale > 0.0 {
                residual.norm() / (law.c_nu() * scale)
            } else {
                debug_assert_eq!(residual, Vector2::zeros());
                0.0
            };
            (normal, tangential)
        })
        .collect()
}
