//! Normal compliance contact laws and regularized Coulomb friction.
//!
//! Pressures are per unit boundary length (Pa, premultiplied by nodal boundary
//! weights during assembly). Two normal laws:
//!
//! - SNC (standard normal compliance): λν = c_ν (α/2) [δν]₊^{α−1}, a function
//!   of the instantaneous gap. Time discretizations of SNC dissipate spurious
//!   energy during impact because the pressure is evaluated one-sided.
//! - INC (improved normal compliance): the gap power is replaced by the
//!   divided difference over the step,
//!   δ̃ = ([δ_curr]₊^α − [δ_prev]₊^α) / (α (δ_curr − δ_prev)),
//!   so λν (δ_curr − δ_prev) = (c_ν/2) Δ[δ]₊^α telescopes exactly: contact
//!   work stored during loading is returned in full on unloading.
//!
//! Friction is compliance-regularized Coulomb: stick enforces λτ = c_τ δ̇τ,
//! slip caps the traction at μ λν along the sliding direction.
//!
//! The `*_newton_update` functions emit the affine per-node conditions that a
//! semi-smooth Newton step imposes after active-set classification; their
//! fixed points satisfy the respective laws exactly.

use nalgebra::Vector2;

#[derive(Debug, thiserror::Error)]
pub enum ContactLawError {
    #[error("invalid contact parameter: {0}")]
    InvalidParameter(String),
}

/// Normal compliance law selection with stiffness c_ν > 0 (Pa/m^{α−1}) and
/// exponent α ≥ 2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormalLawParams {
    Snc { c_nu: f64, alpha: f64 },
    Inc { c_nu: f64, alpha: f64 },
}

impl NormalLawParams {
    pub fn snc(c_nu: f64, alpha: f64) -> Result<Self, ContactLawError> {
        check_law(c_nu, alpha)?;
        Ok(Self::Snc { c_nu, alpha })
    }

    pub fn inc(c_nu: f64, alpha: f64) -> Result<Self, ContactLawError> {
        check_law(c_nu, alpha)?;
        Ok(Self::Inc { c_nu, alpha })
    }

    pub fn c_nu(&self) -> f64 {
        match *self {
            Self::Snc { c_nu, .. } | Self::Inc { c_nu, .. } => c_nu,
        }
    }

    pub fn alpha(&self) -> f64 {
        match *self {
            Self::Snc { alpha, .. } | Self::Inc { alpha, .. } => alpha,
        }
    }

    /// Law pressure at the given gap history (SNC ignores `gap_prev`).
    pub fn pressure(&self, gap_prev: f64, gap_curr: f64) -> f64 {
        match *self {
            Self::Snc { c_nu, alpha } => snc_pressure(c_nu, alpha, gap_curr),
            Self::Inc { c_nu, alpha } => inc_pressure(c_nu, alpha, gap_prev, gap_curr),
        }
    }
}

fn check_law(c_nu: f64, alpha: f64) -> Result<(), ContactLawError> {
    if !(c_nu > 0.0) {
        return Err(ContactLawError::InvalidParameter(format!(
            "normal stiffness c_nu must be positive, got {c_nu}"
        )));
    }
    if !(alpha >= 2.0) {
        return Err(ContactLawError::InvalidParameter(format!(
            "compliance exponent alpha must be >= 2, got {alpha}"
        )));
    }
    Ok(())
}

/// Coulomb friction coefficient μ ≥ 0 and tangential compliance c_τ > 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrictionParams {
    pub mu: f64,
    pub c_tau: f64,
}

impl FrictionParams {
    pub fn new(mu: f64, c_tau: f64) -> Result<Self, ContactLawError> {
        if !(mu >= 0.0) {
            return Err(ContactLawError::InvalidParameter(format!(
                "friction coefficient must be >= 0, got {mu}"
            )));
        }
        if !(c_tau > 0.0) {
            return Err(ContactLawError::InvalidParameter(format!(
                "tangential compliance must be positive, got {c_tau}"
            )));
        }
        Ok(Self { mu, c_tau })
    }

    /// Frictionless contact; c_τ is irrelevant but kept positive.
    pub fn frictionless() -> Self {
        Self { mu: 0.0, c_tau: 1.0 }
    }
}

/// Per-node classification at a converged step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContactStatus {
    Gap,
    Stick,
    Slip,
}

/// Converged contact quantities of one node.
///
/// `gap_prev` is the gap at the end of the previous step (the INC memory),
/// `gap_curr` the converged gap of this step. Gap status implies zero
/// multipliers; contact implies λν ≥ 0.
#[derive(Clone, Copy, Debug)]
pub struct NodalContactState {
    pub gap_prev: f64,
    pub gap_curr: f64,
    pub tangential_velocity: Vector2<f64>,
    pub pressure: f64,
    pub traction: Vector2<f64>,
    pub status: ContactStatus,
}

impl NodalContactState {
    /// Out-of-contact state with the given gap history.
    pub fn open(gap_prev: f64, gap_curr: f64) -> Self {
        Self {
            gap_prev,
            gap_curr,
            tangential_velocity: Vector2::zeros(),
            pressure: 0.0,
            traction: Vector2::zeros(),
            status: ContactStatus::Gap,
        }
    }
}

/// [x]₊^p. The convention [0]₊⁰ = 1 keeps the α = 2 contact-case slope equal
/// to c_ν at a grazing gap, matching the λ = c_ν δ update rule.
fn pow_plus(x: f64, p: f64) -> f64 {
    if x > 0.0 {
        x.powf(p)
    } else if x == 0.0 && p == 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Threshold under which the divided difference of δ̃ switches to its limit.
fn degenerate_eps(gap_prev: f64, gap_curr: f64) -> f64 {
    1e-12 * gap_curr.abs().max(gap_prev.abs()).max(1.0)
}

/// Standard normal compliance pressure c_ν (α/2) [δν]₊^{α−1}.
pub fn snc_pressure(c_nu: f64, alpha: f64, gap: f64) -> f64 {
    c_nu * 0.5 * alpha * pow_plus(gap, alpha - 1.0)
}

/// dλν/dδν of the SNC law: c_ν (α/2)(α−1) [δν]₊^{α−2}.
pub fn snc_pressure_gap_derivative(c_nu: f64, alpha: f64, gap: f64) -> f64 {
    c_nu * 0.5 * alpha * (alpha - 1.0) * pow_plus(gap, alpha - 2.0)
}

/// Effective gap of the improved law: the divided difference of [δ]₊^α / α
/// over the step, with limit [δ_curr]₊^{α−1} at a vanishing increment. Always
/// nonnegative; zero when both gaps are nonpositive.
pub fn inc_effective_gap(alpha: f64, gap_prev: f64, gap_curr: f64) -> f64 {
    if (gap_curr - gap_prev).abs() <= degenerate_eps(gap_prev, gap_curr) {
        pow_plus(gap_curr, alpha - 1.0)
    } else {
        (pow_plus(gap_curr, alpha) - pow_plus(gap_prev, alpha)) / (alpha * (gap_curr - gap_prev))
    }
}

/// Improved normal compliance pressure c_ν (α/2) δ̃.
///
/// Away from the degenerate branch the identity
/// λν (δ_curr − δ_prev) = (c_ν/2)([δ_curr]₊^α − [δ_prev]₊^α)
/// holds exactly: the discrete contact work equals the change of the stored
/// contact potential.
pub fn inc_pressure(c_nu: f64, alpha: f64, gap_prev: f64, gap_curr: f64) -> f64 {
    c_nu * 0.5 * alpha * inc_effective_gap(alpha, gap_prev, gap_curr)
}

/// dλν/dδ_curr of the improved law, branch-consistent with [`inc_pressure`]:
/// the divided-difference form away from degeneracy, the derivative of the
/// limit expression c_ν (α/2) [δ_curr]₊^{α−1} on the degenerate branch.
pub fn inc_pressure_gap_derivative(
    c_nu: f64,
    alpha: f64,
    gap_prev: f64,
    gap_curr: f64,
) -> f64 {
    if (gap_curr - gap_prev).abs() <= degenerate_eps(gap_prev, gap_curr) {
        (alpha - 1.0) * 0.5 * alpha * c_nu * pow_plus(gap_curr, alpha - 2.0)
    } else {
        let eff = inc_effective_gap(alpha, gap_prev, gap_curr);
        c_nu * alpha * (pow_plus(gap_curr, alpha - 1.0) - eff)
            / (2.0 * (gap_curr - gap_prev))
    }
}

/// Complementarity residual of the normal law: λν − (law pressure). Zero
/// exactly at consistent states.
pub fn normal_complementarity(
    law: &NormalLawParams,
    gap_prev: f64,
    gap_curr: f64,
    pressure: f64,
) -> f64 {
    pressure - law.pressure(gap_prev, gap_curr)
}

/// Complementarity residual of the friction law:
/// max(μλν, ‖c_τ δ̇τ‖) λτ − μλν (c_τ δ̇τ).
/// Zero exactly at consistent stick (λτ = c_τ δ̇τ, ‖λτ‖ ≤ μλν) and consistent
/// slip (λτ = μλν δ̇τ/‖δ̇τ‖) states; for λν = 0 it vanishes iff λτ = 0.
pub fn friction_complementarity(
    fp: &FrictionParams,
    pressure: f64,
    v_tau: Vector2<f64>,
    traction: Vector2<f64>,
) -> Vector2<f64> {
    let bound = fp.mu * pressure;
    let reg = fp.c_tau * v_tau;
    bound.max(reg.norm()) * traction - bound * reg
}

/// Affine normal condition λν^{k+1} = base + slope·(δ^{k+1} − gap_ref)
/// imposed at one node for one semi-smooth Newton iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalRule {
    pub base: f64,
    pub slope: f64,
    pub gap_ref: f64,
}

impl NormalRule {
    /// The gap-case rule λν^{k+1} = 0.
    pub fn zero() -> Self {
        Self { base: 0.0, slope: 0.0, gap_ref: 0.0 }
    }

    pub fn evaluate(&self, gap: f64) -> f64 {
        self.base + self.slope * (gap - self.gap_ref)
    }
}

/// Tangential condition imposed at one node for one iteration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TangentialRule {
    /// λτ^{k+1} = 0 (inactive node, or slip at μ = 0).
    Free,
    /// λτ^{k+1} = c_τ δ̇τ^{k+1}.
    Stick,
    /// λτ^{k+1} = μ λν^{k+1} · direction, the 2D slip simplification with the
    /// direction frozen at δ̇τ^k/‖δ̇τ^k‖.
    Slip { direction: Vector2<f64> },
}

/// SNC update rule: zero below the gap threshold, otherwise the linearization
/// of the SNC law about δ^k. For α = 2 this is exactly λ^{k+1} = c_ν δ^{k+1}.
pub fn snc_newton_update(c_nu: f64, alpha: f64, gap_k: f64) -> NormalRule {
    if gap_k < 0.0 {
        NormalRule::zero()
    } else {
        NormalRule {
            base: snc_pressure(c_nu, alpha, gap_k),
            slope: snc_pressure_gap_derivative(c_nu, alpha, gap_k),
            gap_ref: gap_k,
        }
    }
}

/// INC update rule: zero when the effective gap δ̃^k ≤ 0, otherwise the
/// improved pressure at iterate k plus its gap derivative times the coming
/// increment.
pub fn inc_newton_update(c_nu: f64, alpha: f64, gap_prev: f64, gap_k: f64) -> NormalRule {
    if inc_effective_gap(alpha, gap_prev, gap_k) <= 0.0 {
        NormalRule::zero()
    } else {
        NormalRule {
            base: inc_pressure(c_nu, alpha, gap_prev, gap_k),
            slope: inc_pressure_gap_derivative(c_nu, alpha, gap_prev, gap_k),
            gap_ref: gap_k,
        }
    }
}

/// Friction update rule for an active normal node.
///
/// Stick when ‖λτ^k‖ < μ λν^k (strict; the tie goes to slip). The slip
/// direction is frozen at the current tangential velocity; a slip node with
/// exactly zero velocity is reclassified as stick since the direction is
/// undefined there. At μ = 0 stick is impossible and the slip traction bound
/// is zero, so the node is tangentially free.
pub fn friction_newton_update(
    fp: &FrictionParams,
    pressure_k: f64,
    traction_k: Vector2<f64>,
    v_tau_k: Vector2<f64>,
) -> TangentialRule {
    if fp.mu == 0.0 {
        return TangentialRule::Free;
    }
    if traction_k.norm() < fp.mu * pressure_k {
        return TangentialRule::Stick;
    }
    let speed = v_tau_k.norm();
    if speed == 0.0 {
        TangentialRule::Stick
    } else {
        TangentialRule::Slip { direction: v_tau_k / speed }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn snc_pressure_examples() {
        assert_relative_eq!(snc_pressure(1000.0, 2.0, 0.01), 10.0);
        assert_eq!(snc_pressure(1000.0, 2.0, -0.3), 0.0);
        assert_relative_eq!(snc_pressure(1000.0, 3.0, 0.02), 0.6, max_relative = 1e-14);
    }

    #[test]
    fn effective_gap_examples() {
        assert_relative_eq!(inc_effective_gap(2.0, 0.0, 0.02), 0.01, max_relative = 1e-14);
        assert_eq!(inc_effective_gap(2.0, -1.0, -0.5), 0.0);
        // Limit branch agrees with the formula evaluated just off-diagonal.
        let limit = inc_effective_gap(2.0, 0.03, 0.03);
        assert_relative_eq!(limit, 0.03, max_relative = 1e-14);
        for d in [0.03 - 1e-10, 0.03 + 1e-10] {
            assert_relative_eq!(inc_effective_gap(2.0, 0.03, d), limit, max_relative = 1e-7);
        }
    }

    #[test]
    fn inc_pressure_examples() {
        assert_relative_eq!(inc_pressure(1000.0, 2.0, 0.0, 0.02), 10.0, max_relative = 1e-14);
        assert_eq!(inc_pressure(1000.0, 2.0, -0.5, -0.1), 0.0);
    }

    #[test]
    fn inc_pressure_is_nonnegative_even_on_release() {
        // Geometrically separated but still releasing stored contact energy.
        let p = inc_pressure(1000.0, 2.0, 0.02, -0.005);
        assert!(p > 0.0, "release pressure {p}");
        assert_relative_eq!(p, 1000.0 * (0.02f64.powi(2)) / (2.0 * 0.025), max_relative = 1e-12);
    }

    #[test]
    fn telescoping_identity_holds_exactly() {
        let c_nu = 2.0;
        let grid: [f64; 8] = [-0.4, -0.1, -1e-3, 0.0, 1e-3, 0.07, 0.2, 0.5];
        for alpha in [2.0, 3.0, 4.0, 5.0] {
            for &dp in &grid {
                for &dc in &grid {
                    if (dc - dp).abs() <= degenerate_eps(dp, dc) {
                        continue;
                    }
                    let lhs = inc_pressure(c_nu, alpha, dp, dc) * (dc - dp);
                    let rhs = 0.5 * c_nu * (pow_plus(dc, alpha) - pow_plus(dp, alpha));
                    assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn effective_gap_limit_is_the_snc_gap_power() {
        for alpha in [2.0, 3.0, 3.5] {
            for d in [-0.2, 0.0, 0.1, 0.4] {
                assert_relative_eq!(
                    inc_effective_gap(alpha, d, d),
                    pow_plus(d, alpha - 1.0),
                    max_relative = 1e-14
                );
            }
        }
    }

    #[test]
    fn inc_derivative_example_and_fd_agreement() {
        assert_relative_eq!(
            inc_pressure_gap_derivative(1000.0, 2.0, 0.0, 0.02),
            500.0,
            max_relative = 1e-12
        );
        assert_eq!(inc_pressure_gap_derivative(1000.0, 2.0, -0.5, -0.2), 0.0);

        let c_nu = 1000.0;
        for alpha in [2.0, 3.0, 4.0] {
            for (dp, dc) in [(0.0, 0.02), (0.01, 0.05), (0.05, 0.01), (-0.02, 0.04), (0.04, -0.02)]
            {
                let h = 1e-8;
                let fd = (inc_pressure(c_nu, alpha, dp, dc + h)
                    - inc_pressure(c_nu, alpha, dp, dc - h))
                    / (2.0 * h);
                let analytic = inc_pressure_gap_derivative(c_nu, alpha, dp, dc);
                assert_relative_eq!(analytic, fd, max_relative = 1e-6, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn snc_derivative_matches_finite_differences() {
        let c_nu = 1000.0;
        for alpha in [2.0, 3.0, 4.0] {
            for gap in [0.005, 0.02, 0.3] {
                let h = 1e-8;
                let fd = (snc_pressure(c_nu, alpha, gap + h) - snc_pressure(c_nu, alpha, gap - h))
                    / (2.0 * h);
                assert_relative_eq!(
                    snc_pressure_gap_derivative(c_nu, alpha, gap),
                    fd,
                    max_relative = 1e-6
                );
            }
        }
    }

    #[test]
    fn friction_complementarity_examples() {
        let fp = FrictionParams::new(0.2, 1.0).unwrap();
        // Consistent stick: traction equals c_tau * velocity, inside the cone.
        let stick = friction_complementarity(&fp, 10.0, Vector2::new(1.0, 0.0), Vector2::new(1.0, 0.0));
        assert_abs_diff_eq!(stick.norm(), 0.0);
        // Consistent slip: traction on the cone along the velocity.
        let slip = friction_complementarity(&fp, 10.0, Vector2::new(5.0, 0.0), Vector2::new(2.0, 0.0));
        assert_abs_diff_eq!(slip.norm(), 0.0);
        // Gap case: residual is ||c_tau v|| * traction.
        let gap = friction_complementarity(&fp, 0.0, Vector2::new(2.0, 0.0), Vector2::new(0.3, 0.1));
        assert_relative_eq!(gap, 2.0 * Vector2::new(0.3, 0.1));
        assert_abs_diff_eq!(
            friction_complementarity(&fp, 0.0, Vector2::new(2.0, 0.0), Vector2::zeros()).norm(),
            0.0
        );
    }

    #[test]
    fn complementarity_zeros_are_exactly_the_consistent_states() {
        // Brute-force grid: the normal residual vanishes iff the pressure
        // matches the law; the friction residual vanishes iff the traction is
        // consistent stick or slip.
        let law = NormalLawParams::inc(1000.0, 2.0).unwrap();
        for dp in [-0.1, 0.0, 0.05] {
            for dc in [-0.2, 0.0, 0.03] {
                let exact = law.pressure(dp, dc);
                for offset in [-0.5, 0.0, 0.7] {
                    let res = normal_complementarity(&law, dp, dc, exact + offset);
                    if offset == 0.0 {
                        assert_abs_diff_eq!(res, 0.0);
                    } else {
                        assert!(res.abs() > 0.4, "res {res} at offset {offset}");
                    }
                }
            }
        }

        let fp = FrictionParams::new(0.3, 2.0).unwrap();
        let pressure = 5.0;
        let bound = fp.mu * pressure;
        for vx in [-1.0, 0.0, 0.4] {
            let v = Vector2::new(vx, 0.0);
            let reg = fp.c_tau * v;
            let consistent = if reg.norm() <= bound { reg } else { bound * reg / reg.norm() };
            assert_abs_diff_eq!(
                friction_complementarity(&fp, pressure, v, consistent).norm(),
                0.0,
                epsilon = 1e-14
            );
            let wrong = consistent + Vector2::new(0.2, -0.1);
            assert!(friction_complementarity(&fp, pressure, v, wrong).norm() > 1e-3);
        }
    }

    #[test]
    fn snc_update_rule_cases() {
        assert_eq!(snc_newton_update(1000.0, 2.0, -0.1), NormalRule::zero());
        // Contact case at alpha = 2 imposes lambda = c_nu * delta.
        let rule = snc_newton_update(1000.0, 2.0, 0.05);
        for gap in [0.0, 0.02, 0.08] {
            assert_relative_eq!(rule.evaluate(gap), 1000.0 * gap, max_relative = 1e-12);
        }
    }

    #[test]
    fn inc_update_rule_cases() {
        assert_eq!(inc_newton_update(1000.0, 2.0, -0.3, -0.1), NormalRule::zero());
        let rule = inc_newton_update(1000.0, 2.0, 0.0, 0.02);
        // At the reference gap the rule returns the improved pressure itself.
        assert_relative_eq!(rule.evaluate(0.02), 10.0, max_relative = 1e-12);
        assert_relative_eq!(rule.slope, 500.0, max_relative = 1e-12);
    }

    #[test]
    fn snc_fixed_point_satisfies_the_law() {
        // Scalar model: spring pushes the node to gap delta_free, the contact
        // pressure resists: k (delta - delta_free) + lambda(delta) = 0.
        let (c_nu, alpha, k, delta_free) = (1000.0, 3.0, 5000.0, 0.04);
        let mut gap = delta_free;
        for _ in 0..50 {
            let rule = snc_newton_update(c_nu, alpha, gap);
            gap = (k * delta_free + rule.slope * rule.gap_ref - rule.base) / (k + rule.slope);
        }
        let lambda = snc_newton_update(c_nu, alpha, gap).evaluate(gap);
        assert_relative_eq!(lambda, snc_pressure(c_nu, alpha, gap), max_relative = 1e-12);
        assert_relative_eq!(k * (gap - delta_free) + lambda, 0.0, epsilon = 1e-9);

        // Independent bisection on the same scalar equation.
        let f = |d: f64| k * (d - delta_free) + snc_pressure(c_nu, alpha, d);
        let (mut lo, mut hi) = (0.0, delta_free);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        assert_abs_diff_eq!(gap, 0.5 * (lo + hi), epsilon = 1e-10);
    }

    #[test]
    fn inc_fixed_point_converges_in_few_iterations() {
        let (c_nu, alpha, k, delta_free, gap_prev) = (1000.0, 3.0, 5000.0, 0.04, 0.01);
        let mut gap = delta_free;
        let mut iterations = 0;
        loop {
            let rule = inc_newton_update(c_nu, alpha, gap_prev, gap);
            let next = (k * delta_free + rule.slope * rule.gap_ref - rule.base) / (k + rule.slope);
            iterations += 1;
            let done = (next - gap).abs() <= 1e-14;
            gap = next;
            if done || iterations >= 20 {
                break;
            }
        }
        assert!(iterations < 20, "INC scalar Newton took {iterations} iterations");
        let lambda = inc_newton_update(c_nu, alpha, gap_prev, gap).evaluate(gap);
        assert_relative_eq!(
            lambda,
            inc_pressure(c_nu, alpha, gap_prev, gap),
            max_relative = 1e-10
        );
    }

    #[test]
    fn friction_update_rule_cases() {
        let fp = FrictionParams::new(0.2, 1.0).unwrap();
        // Inside the cone: stick.
        assert_eq!(
            friction_newton_update(&fp, 10.0, Vector2::new(1.0, 0.0), Vector2::new(3.0, 0.0)),
            TangentialRule::Stick
        );
        // On/outside the cone with sliding velocity: slip along it.
        let rule =
            friction_newton_update(&fp, 10.0, Vector2::new(2.0, 0.0), Vector2::new(3.0, 0.0));
        assert_eq!(rule, TangentialRule::Slip { direction: Vector2::new(1.0, 0.0) });
        // Outside the cone with zero velocity: reclassified stick.
        assert_eq!(
            friction_newton_update(&fp, 10.0, Vector2::new(5.0, 0.0), Vector2::zeros()),
            TangentialRule::Stick
        );
        // Frictionless: tangentially free regardless of state.
        let free = FrictionParams::frictionless();
        assert_eq!(
            friction_newton_update(&free, 10.0, Vector2::zeros(), Vector2::new(3.0, 0.0)),
            TangentialRule::Free
        );
    }

    #[test]
    fn friction_dissipation_is_nonnegative_at_consistent_states() {
        let fp = FrictionParams::new(0.25, 3.0).unwrap();
        for vx in [-2.0, -0.1, 0.0, 0.05, 1.5] {
            for vy in [-1.0, 0.0, 0.8] {
                let v = Vector2::new(vx, vy);
                let bound = fp.mu * 7.0;
                let reg = fp.c_tau * v;
                let traction =
                    if reg.norm() <= bound { reg } else { bound * reg / reg.norm() };
                assert!(traction.dot(&v) >= 0.0);
            }
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(NormalLawParams::snc(0.0, 2.0).is_err());
        assert!(NormalLawParams::inc(1000.0, 1.5).is_err());
        assert!(FrictionParams::new(-0.1, 1.0).is_err());
        assert!(FrictionParams::new(0.2, 0.0).is_err());
    }
}
