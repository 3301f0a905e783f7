//! Midpoint time discretization and P1 finite element assembly.
//!
//! One step advances (u_{n−1}, v_{n−1}) to (u_n, v_n) with the velocity tied
//! to the displacement by the midpoint rule
//! (u_n − u_{n−1})/Δt = (v_n + v_{n−1})/2. The step residual
//!
//!   R(u) = M (v(u) − v_{n−1}) / Δt + f_int(Π) + f_contact − f_ext(t_{n−1/2})
//!
//! uses the algorithmic stress Π of the discrete-gradient scheme for the
//! internal forces, so R(u_n)·Δu telescopes exactly into the discrete energy
//! balance. Contact enters as collocated nodal forces weight·(λν ν + λτ)
//! supplied by the active-set solver; this module stays agnostic of the
//! contact laws themselves apart from evaluating affine per-node rules.
//!
//! Elements are straight P1 triangles with one-point quadrature, exact for
//! the constant deformation gradients of this discretization. All loops run
//! in a fixed order, making assembly deterministic.

use nalgebra::{Matrix2, Point2, Vector2};

use crate::contact_geom::{self, RigidFoundation};
use crate::contact_law::{FrictionParams, NormalRule, TangentialRule};
use crate::material::{MaterialError, MaterialModel};
use crate::mesh::{boundary_weights, BoundaryRegion, Mesh2D};
use crate::sparse::CooMatrix;

#[derive(Debug, thiserror::Error)]
pub enum DynamicsError {
    #[error("invalid time-stepping parameter: {0}")]
    InvalidParameter(String),
    #[error("element {element} is degenerate (signed area {area:e})")]
    DegenerateElement { element: usize, area: f64 },
    #[error("material evaluation failed in element {element}: {source}")]
    Element { element: usize, source: MaterialError },
    #[error("non-finite force at element {element}")]
    NonFiniteElement { element: usize },
    #[error("non-finite contact force at contact node {node}")]
    NonFiniteContact { node: usize },
}

/// Time discretization parameters plus the (constant) mass density.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeStepConfig {
    pub dt: f64,
    pub t_final: f64,
    pub density: f64,
}

impl TimeStepConfig {
    pub fn new(dt: f64, t_final: f64, density: f64) -> Result<Self, DynamicsError> {
        if !(dt > 0.0) {
            return Err(DynamicsError::InvalidParameter(format!("dt must be positive, got {dt}")));
        }
        if !(t_final >= dt) {
            return Err(DynamicsError::InvalidParameter(format!(
                "t_final must be at least one step, got {t_final} with dt {dt}"
            )));
        }
        if !(density > 0.0) {
            return Err(DynamicsError::InvalidParameter(format!(
                "density must be positive, got {density}"
            )));
        }
        Ok(Self { dt, t_final, density })
    }
}

/// Nodal displacements and velocities at one time level, with the converged
/// contact quantities of the step that produced it. Dof `2a + i` is
/// coordinate `i` of node `a`.
#[derive(Clone, Debug)]
pub struct SystemState {
    pub time: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub contact: Vec<crate::contact_law::NodalContactState>,
}

impl SystemState {
    pub fn node_displacement(&self, node: usize) -> Vector2<f64> {
        Vector2::new(self.u[2 * node], self.u[2 * node + 1])
    }

    pub fn node_velocity(&self, node: usize) -> Vector2<f64> {
        Vector2::new(self.v[2 * node], self.v[2 * node + 1])
    }
}

/// Load magnitude as a function of time.
#[derive(Clone, Copy, Debug)]
pub enum TimeVaryingLoad {
    Zero,
    Constant(Vector2<f64>),
    /// `value` modulated by a time profile.
    Scaled { value: Vector2<f64>, profile: fn(f64) -> f64 },
}

impl TimeVaryingLoad {
    pub fn at(&self, t: f64) -> Vector2<f64> {
        match *self {
            Self::Zero => Vector2::zeros(),
            Self::Constant(v) => v,
            Self::Scaled { value, profile } => value * profile(t),
        }
    }
}

/// Body force density (N/m³) over the domain and traction (N/m²) over the
/// traction-tagged boundary, both spatially uniform.
#[derive(Clone, Copy, Debug)]
pub struct ExternalLoads {
    pub body_force: TimeVaryingLoad,
    pub traction: TimeVaryingLoad,
}

impl ExternalLoads {
    pub fn none() -> Self {
        Self { body_force: TimeVaryingLoad::Zero, traction: TimeVaryingLoad::Zero }
    }
}

/// v_n = 2 (u_n − u_{n−1})/Δt − v_{n−1}, the midpoint velocity closure.
pub fn midpoint_velocity_update(u_prev: &[f64], v_prev: &[f64], u_curr: &[f64], dt: f64) -> Vec<f64> {
    assert!(dt > 0.0);
    assert_eq!(u_prev.len(), v_prev.len());
    assert_eq!(u_prev.len(), u_curr.len());
    u_curr
        .iter()
        .zip(u_prev)
        .zip(v_prev)
        .map(|((uc, up), vp)| 2.0 * (uc - up) / dt - vp)
        .collect()
}

/// Affine contact conditions imposed at one node during one solver iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContactRuleSet {
    pub normal: NormalRule,
    pub tangential: TangentialRule,
}

impl ContactRuleSet {
    pub fn inactive() -> Self {
        Self { normal: NormalRule::zero(), tangential: TangentialRule::Free }
    }
}

/// Nodal contact force and its displacement derivative under the given rules,
/// both premultiplied by the boundary weight.
///
/// The tangential velocity entering the friction rules is the half-step
/// velocity (u − u_prev)/Δt projected tangentially; the discrete energy
/// balance measures friction work against exactly this velocity.
#[allow(clippy::too_many_arguments)]
pub fn contact_contribution(
    foundation: &RigidFoundation,
    fp: &FrictionParams,
    dt: f64,
    weight: f64,
    x_ref: Point2<f64>,
    u_node: Vector2<f64>,
    u_prev_node: Vector2<f64>,
    rules: &ContactRuleSet,
) -> (Vector2<f64>, Matrix2<f64>) {
    let nu = foundation.normal();
    let gap = contact_geom::gap(foundation, x_ref + u_node);
    let lambda_n = rules.normal.evaluate(gap);
    let v_tau = contact_geom::tangential_velocity((u_node - u_prev_node) / dt, nu);
    let tangential_projector = Matrix2::identity() - nu * nu.transpose();

    let (lambda_t, stiffness_t) = match rules.tangential {
        TangentialRule::Free => (Vector2::zeros(), Matrix2::zeros()),
        TangentialRule::Stick => (fp.c_tau * v_tau, (fp.c_tau / dt) * tangential_projector),
        TangentialRule::Slip { direction } => (
            fp.mu * lambda_n * direction,
            fp.mu * rules.normal.slope * direction * nu.transpose(),
        ),
    };

    let force = weight * (lambda_n * nu + lambda_t);
    let stiffness = weight * (rules.normal.slope * nu * nu.transpose() + stiffness_t);
    (force, stiffness)
}

/// Precomputed element geometry over a fixed mesh, with the assembly
/// operations of the midpoint scheme.
#[derive(Clone, Debug)]
pub struct Assembler {
    mesh: Mesh2D,
    grads: Vec<[Vector2<f64>; 3]>,
    areas: Vec<f64>,
    contact_weights: Vec<f64>,
    traction_edges: Vec<([usize; 2], f64)>,
}

impl Assembler {
    pub fn new(mesh: Mesh2D) -> Result<Self, DynamicsError> {
        let mut grads = Vec::with_capacity(mesh.triangles.len());
        let mut areas = Vec::with_capacity(mesh.triangles.len());
        for (e, tri) in mesh.triangles.iter().enumerate() {
            let area = mesh.triangle_area(e);
            if !(area > 0.0) {
                return Err(DynamicsError::DegenerateElement { element: e, area });
            }
            let x = [mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]];
            // ∇N_a = perp(x_b − x_c)/(2A) with perp(v) = (v_y, −v_x),
            // (a, b, c) cycling through the local indices.
            let grad = |b: Point2<f64>, c: Point2<f64>| {
                let d = b - c;
                Vector2::new(d.y, -d.x) / (2.0 * area)
            };
            grads.push([grad(x[1], x[2]), grad(x[2], x[0]), grad(x[0], x[1])]);
            areas.push(area);
        }

        let weights = boundary_weights(&mesh);
        let contact_weights: Vec<f64> = mesh
            .contact_nodes
            .iter()
            .map(|&node| {
                weights
                    .iter()
                    .find(|w| w.node == node)
                    .map(|w| w.weight)
                    .expect("contact node carries a boundary weight")
            })
            .collect();

        let traction_edges = mesh
            .boundary_edges
            .iter()
            .filter(|e| e.region == BoundaryRegion::Traction)
            .map(|e| {
                let d = mesh.nodes[e.nodes[1]] - mesh.nodes[e.nodes[0]];
                (e.nodes, d.norm())
            })
            .collect();

        Ok(Self { mesh, grads, areas, contact_weights, traction_edges })
    }

    pub fn mesh(&self) -> &Mesh2D {
        &self.mesh
    }

    pub fn n_dofs(&self) -> usize {
        2 * self.mesh.nodes.len()
    }

    /// Boundary weights aligned with `mesh.contact_nodes`.
    pub fn contact_weights(&self) -> &[f64] {
        &self.contact_weights
    }

    /// F = I + Σ_a u_a ⊗ ∇N_a on the element (constant over it).
    pub fn deformation_gradient(&self, element: usize, u: &[f64]) -> Matrix2<f64> {
        let tri = &self.mesh.triangles[element];
        let mut f = Matrix2::identity();
        for (local, &node) in tri.iter().enumerate() {
            let ua = Vector2::new(u[2 * node], u[2 * node + 1]);
            f += ua * self.grads[element][local].transpose();
        }
        f
    }

    /// Consistent P1 mass matrix: per element and coordinate,
    /// ρ·area/12 · [[2,1,1],[1,2,1],[1,1,2]]. Symmetric positive definite.
    pub fn assemble_mass(&self, density: f64) -> CooMatrix {
        let mut m = CooMatrix::new(self.n_dofs());
        for (e, tri) in self.mesh.triangles.iter().enumerate() {
            let scale = density * self.areas[e] / 12.0;
            for a in 0..3 {
                for b in 0..3 {
                    let value = scale * if a == b { 2.0 } else { 1.0 };
                    for i in 0..2 {
                        m.push(2 * tri[a] + i, 2 * tri[b] + i, value);
                    }
                }
            }
        }
        m
    }

    /// Internal force of the algorithmic stress between the two displacement
    /// states: f[a] += area · Π ∇N_a per element.
    pub fn internal_force(
        &self,
        model: &MaterialModel,
        u_prev: &[f64],
        u_curr: &[f64],
    ) -> Result<Vec<f64>, DynamicsError> {
        let mut f = vec![0.0; self.n_dofs()];
        for (e, tri) in self.mesh.triangles.iter().enumerate() {
            let f_prev = self.deformation_gradient(e, u_prev);
            let f_curr = self.deformation_gradient(e, u_curr);
            let pi = model
                .gonzalez_stress(&f_prev, &f_curr)
                .map_err(|source| DynamicsError::Element { element: e, source })?;
            for (local, &node) in tri.iter().enumerate() {
                let nodal = self.areas[e] * pi * self.grads[e][local];
                if !nodal.x.is_finite() || !nodal.y.is_finite() {
                    return Err(DynamicsError::NonFiniteElement { element: e });
                }
                f[2 * node] += nodal.x;
                f[2 * node + 1] += nodal.y;
            }
        }
        Ok(f)
    }

    /// External force vector at time t: body force lumped as area/3 per
    /// element node, boundary traction as length/2 per traction-edge node.
    pub fn external_force(&self, loads: &ExternalLoads, t: f64) -> Vec<f64> {
        let mut f = vec![0.0; self.n_dofs()];
        let body = loads.body_force.at(t);
        if body != Vector2::zeros() {
            for (e, tri) in self.mesh.triangles.iter().enumerate() {
                let nodal = body * (self.areas[e] / 3.0);
                for &node in tri {
                    f[2 * node] += nodal.x;
                    f[2 * node + 1] += nodal.y;
                }
            }
        }
        let traction = loads.traction.at(t);
        if traction != Vector2::zeros() {
            for &(nodes, length) in &self.traction_edges {
                let nodal = traction * (length / 2.0);
                for node in nodes {
                    f[2 * node] += nodal.x;
                    f[2 * node + 1] += nodal.y;
                }
            }
        }
        f
    }

    /// Σ_elements area · W̃(C(u)).
    pub fn strain_energy(&self, model: &MaterialModel, u: &[f64]) -> Result<f64, DynamicsError> {
        let mut total = 0.0;
        for e in 0..self.mesh.triangles.len() {
            let f = self.deformation_gradient(e, u);
            let c = f.transpose() * f;
            let w = model
                .energy_density(&c)
                .map_err(|source| DynamicsError::Element { element: e, source })?;
            total += self.areas[e] * w;
        }
        Ok(total)
    }

    /// Step residual at the trial displacement. `contact_forces` holds one
    /// weighted nodal force per entry of `mesh.contact_nodes`; external loads
    /// are evaluated at the half step t_{n−1/2}.
    #[allow(clippy::too_many_arguments)]
    pub fn assemble_residual(
        &self,
        mass: &CooMatrix,
        model: &MaterialModel,
        state_prev: &SystemState,
        u_trial: &[f64],
        loads: &ExternalLoads,
        contact_forces: &[Vector2<f64>],
        dt: f64,
    ) -> Result<Vec<f64>, DynamicsError> {
        assert_eq!(contact_forces.len(), self.mesh.contact_nodes.len());
        let v_trial = midpoint_velocity_update(&state_prev.u, &state_prev.v, u_trial, dt);
        let dv: Vec<f64> = v_trial.iter().zip(&state_prev.v).map(|(c, p)| c - p).collect();

        let mut r = mass.matvec(&dv);
        for entry in &mut r {
            *entry /= dt;
        }

        let f_int = self.internal_force(model, &state_prev.u, u_trial)?;
        let f_ext = self.external_force(loads, state_prev.time + 0.5 * dt);
        for i in 0..r.len() {
            r[i] += f_int[i] - f_ext[i];
        }

        for (i, &node) in self.mesh.contact_nodes.iter().enumerate() {
            let fc = contact_forces[i];
            if !fc.x.is_finite() || !fc.y.is_finite() {
                return Err(DynamicsError::NonFiniteContact { node });
            }
            r[2 * node] += fc.x;
            r[2 * node + 1] += fc.y;
        }
        Ok(r)
    }

    /// Newton tangent of the step residual: (2/Δt²) M + K_int + K_contact,
    /// as accumulating triplets. `contact_blocks` holds one weighted 2×2
    /// block per entry of `mesh.contact_nodes`.
    pub fn assemble_tangent(
        &self,
        mass: &CooMatrix,
        model: &MaterialModel,
        u_prev: &[f64],
        u_trial: &[f64],
        contact_blocks: &[Matrix2<f64>],
        dt: f64,
    ) -> Result<Vec<(usize, usize, f64)>, DynamicsError> {
        assert_eq!(contact_blocks.len(), self.mesh.contact_nodes.len());
        let mut triplets = Vec::with_capacity(mass.entries().len() + 36 * self.mesh.triangles.len());

        let mass_scale = 2.0 / (dt * dt);
        for &(r, c, v) in mass.entries() {
            triplets.push((r, c, v * mass_scale));
        }

        for (e, tri) in self.mesh.triangles.iter().enumerate() {
            let f_prev = self.deformation_gradient(e, u_prev);
            let f_curr = self.deformation_gradient(e, u_trial);
            let tangent = model
                .consistent_tangent(&f_prev, &f_curr)
                .map_err(|source| DynamicsError::Element { element: e, source })?;
            // K[a,b]_{ik} = area Σ_{j,l} T[2i+j, 2k+l] ∇N_a[j] ∇N_b[l]
            for a in 0..3 {
                for b in 0..3 {
                    for i in 0..2 {
                        for k in 0..2 {
                            let mut value = 0.0;
                            for j in 0..2 {
                                for l in 0..2 {
                                    value += tangent[(2 * i + j, 2 * k + l)]
                                        * self.grads[e][a][j]
                                        * self.grads[e][b][l];
                                }
                            }
                            triplets.push((2 * tri[a] + i, 2 * tri[b] + k, self.areas[e] * value));
                        }
                    }
                }
            }
        }

        for (i, &node) in self.mesh.contact_nodes.iter().enumerate() {
            let block = contact_blocks[i];
            for r in 0..2 {
                for c in 0..2 {
                    triplets.push((2 * node + r, 2 * node + c, block[(r, c)]));
                }
            }
        }
        Ok(triplets)
    }
}
