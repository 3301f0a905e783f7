//! Contact kinematics against a rigid foundation.
//!
//! The foundation is a half-plane; `inward_normal` points from the body side
//! into the foundation, so the signed gap `(φx − ȳ)·ν` is positive exactly
//! when the deformed point has penetrated. `δν ≤ 0` is the admissible region.

use nalgebra::{Point2, Vector2};

/// Rigid obstacle geometry. A closed variant set so future obstacle shapes
/// can be added without changing call sites.
#[derive(Clone, Copy, Debug)]
pub enum RigidFoundation {
    HalfPlane {
        /// Signed offset of the boundary line along the outward normal −ν.
        boundary_height: f64,
        /// Unit normal pointing into the foundation.
        inward_normal: Vector2<f64>,
    },
}

impl RigidFoundation {
    /// Half-plane `{x : x2 ≤ height}`, the benchmark foundation; the inward
    /// normal is (0, −1).
    pub fn below_height(height: f64) -> Self {
        Self::HalfPlane { boundary_height: height, inward_normal: Vector2::new(0.0, -1.0) }
    }

    /// General half-plane; `normal` (pointing into the foundation) is
    /// normalized, `boundary_height` is the boundary's offset along −normal.
    pub fn half_plane(boundary_height: f64, normal: Vector2<f64>) -> Self {
        Self::HalfPlane { boundary_height, inward_normal: normal.normalize() }
    }

    pub fn normal(&self) -> Vector2<f64> {
        match self {
            Self::HalfPlane { inward_normal, .. } => *inward_normal,
        }
    }
}

/// Gap, foundation point, and tangential velocity of one deformed point.
#[derive(Clone, Copy, Debug)]
pub struct ContactKinematics {
    /// Signed gap in meters, positive = penetration.
    pub gap: f64,
    /// Closest point on the foundation boundary.
    pub closest_point: Point2<f64>,
    /// Velocity component orthogonal to the foundation normal.
    pub tangential_velocity: Vector2<f64>,
}

/// Point on the foundation boundary closest to `phi_x`.
pub fn closest_point(foundation: &RigidFoundation, phi_x: Point2<f64>) -> Point2<f64> {
    match foundation {
        RigidFoundation::HalfPlane { boundary_height, inward_normal } => {
            let outward = -inward_normal;
            let offset = phi_x.coords.dot(&outward) - boundary_height;
            phi_x - offset * outward
        }
    }
}

/// Signed gap `(φx − ȳ)·ν`; positive when `phi_x` penetrates the foundation.
pub fn gap(foundation: &RigidFoundation, phi_x: Point2<f64>) -> f64 {
    (phi_x - closest_point(foundation, phi_x)).dot(&foundation.normal())
}

/// Projection `(I − ν⊗ν) v` of a velocity onto the foundation boundary.
pub fn tangential_velocity(v: Vector2<f64>, normal: Vector2<f64>) -> Vector2<f64> {
    v - normal.dot(&v) * normal
}

/// Full kinematic state of one point: gap, closest point, tangential velocity.
pub fn kinematics(
    foundation: &RigidFoundation,
    phi_x: Point2<f64>,
    velocity: Vector2<f64>,
) -> ContactKinematics {
    ContactKinematics {
        gap: gap(foundation, phi_x),
        closest_point: closest_point(foundation, phi_x),
        tangential_velocity: tangential_velocity(velocity, foundation.normal()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    #[test]
    fn closest_point_projects_onto_boundary() {
        let plane = RigidFoundation::below_height(0.0);
        assert_relative_eq!(closest_point(&plane, Point2::new(3.0, 5.0)), Point2::new(3.0, 0.0));
        assert_relative_eq!(closest_point(&plane, Point2::new(3.0, -2.0)), Point2::new(3.0, 0.0));
        let on_boundary = Point2::new(7.0, 0.0);
        assert_relative_eq!(closest_point(&plane, on_boundary), on_boundary);
    }

    #[test]
    fn gap_sign_convention() {
        let plane = RigidFoundation::below_height(0.0);
        assert_relative_eq!(gap(&plane, Point2::new(0.0, 0.5)), -0.5);
        assert_abs_diff_eq!(gap(&plane, Point2::new(7.0, 0.0)), 0.0);
        assert_relative_eq!(gap(&plane, Point2::new(0.0, -0.1)), 0.1);
    }

    #[test]
    fn gap_respects_boundary_height() {
        let plane = RigidFoundation::below_height(2.0);
        assert_relative_eq!(gap(&plane, Point2::new(1.0, 3.0)), -1.0);
        assert_relative_eq!(gap(&plane, Point2::new(1.0, 1.5)), 0.5);
    }

    #[test]
    fn tangential_velocity_examples() {
        let nu = Vector2::new(0.0, -1.0);
        assert_relative_eq!(tangential_velocity(Vector2::new(0.0, -10.0), nu), Vector2::zeros());
        assert_relative_eq!(
            tangential_velocity(Vector2::new(10.0, -10.0), nu),
            Vector2::new(10.0, 0.0)
        );
    }

    #[test]
    fn tilted_half_plane_normalizes_its_normal() {
        let plane = RigidFoundation::half_plane(0.0, Vector2::new(-3.0, -4.0));
        assert_relative_eq!(plane.normal().norm(), 1.0, max_relative = 1e-15);
        // Point along the outward normal at distance 2 has gap -2.
        let p = Point2::origin() + 2.0 * -plane.normal();
        assert_relative_eq!(gap(&plane, p), -2.0, max_relative = 1e-14);
    }

    #[test]
    fn kinematics_bundles_the_pieces() {
        let plane = RigidFoundation::below_height(0.0);
        let k = kinematics(&plane, Point2::new(2.0, -0.25), Vector2::new(3.0, -1.0));
        assert_relative_eq!(k.gap, 0.25);
        assert_relative_eq!(k.closest_point, Point2::new(2.0, 0.0));
        assert_relative_eq!(k.tangential_velocity, Vector2::new(3.0, 0.0));
        assert_abs_diff_eq!(k.tangential_velocity.dot(&plane.normal()), 0.0);
    }

    proptest! {
        #[test]
        fn gap_is_one_lipschitz(
            ax in -100.0f64..100.0, ay in -100.0f64..100.0,
            bx in -100.0f64..100.0, by in -100.0f64..100.0,
        ) {
            let plane = RigidFoundation::half_plane(1.5, Vector2::new(-1.0, -2.0));
            let (a, b) = (Point2::new(ax, ay), Point2::new(bx, by));
            let lhs = (gap(&plane, a) - gap(&plane, b)).abs();
            prop_assert!(lhs <= (a - b).norm() + 1e-12);
        }

        #[test]
        fn gap_vanishes_at_the_closest_point(
            x in -100.0f64..100.0, y in -100.0f64..100.0,
        ) {
            let plane = RigidFoundation::half_plane(-0.75, Vector2::new(0.3, -1.0));
            let y_bar = closest_point(&plane, Point2::new(x, y));
            prop_assert!(gap(&plane, y_bar).abs() <= 1e-12 * (1.0 + y_bar.coords.norm()));
        }

        #[test]
        fn tangential_projection_is_idempotent_and_orthogonal(
            vx in -50.0f64..50.0, vy in -50.0f64..50.0,
            nx in -1.0f64..1.0, ny in -1.0f64..1.0,
        ) {
            prop_assume!(nx * nx + ny * ny > 1e-4);
            let nu = Vector2::new(nx, ny).normalize();
            let v = Vector2::new(vx, vy);
            let once = tangential_velocity(v, nu);
            let twice = tangential_velocity(once, nu);
            prop_assert!((once - twice).norm() <= 1e-12 * (1.0 + v.norm()));
            prop_assert!(once.dot(&nu).abs() <= 1e-12 * (1.0 + v.norm()));
        }
    }
}
