//! Hyperelastic stored-energy densities and their stress tensors.
//!
//! Both models are expressed through the right Cauchy-Green tensor C = FᵀF:
//!
//! - Saint Venant-Kirchhoff: W = λ*/2 (tr E)² + μ tr(E²) with the
//!   Green-Lagrange strain E = (C − I)/2, the large-deformation extension of
//!   the linear elastic ball model.
//! - Compressible Ogden (neo-Hooke class): W = c1(I1−3) + c2(I2−3) + d(I3−1)
//!   − (c1+2c2+d) ln I3, with the invariants of the plane-strain embedding
//!   F₃₃ = 1, so the reference configuration is stress-free.
//!
//! Besides the PK2 stress S = 2∂W̃/∂C, the module provides the algorithmic
//! first Piola-Kirchhoff tensor of the energy-conserving midpoint scheme
//! (Gonzalez's discrete gradient): the midpoint stress plus a rank-one
//! correction along ΔC = C_curr − C_prev sized so that
//!
//! ```text
//! Π_algo : (F_curr − F_prev) = W̃(C_curr) − W̃(C_prev)
//! ```
//!
//! holds exactly, the identity that makes the time integrator conserve energy.
//! For SVK the correction vanishes identically (W̃ quadratic in C, the
//! midpoint rule is exact); for Ogden it is essential.

use nalgebra::{Matrix2, SMatrix};

#[derive(Debug, thiserror::Error)]
pub enum MaterialError {
    #[error("invalid material parameter: {0}")]
    InvalidParameter(String),
    #[error("C must be symmetric positive definite")]
    NotSpd,
    #[error("deformation gradient has non-positive determinant {0}")]
    NonPositiveJacobian(f64),
}

/// Saint Venant-Kirchhoff moduli.
///
/// `lame_star` and `mu` are derived from the Young modulus and Poisson ratio
/// at construction and are the only values entering the energy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SvkParams {
    pub young: f64,
    pub poisson: f64,
    pub lame_star: f64,
    pub mu: f64,
}

impl SvkParams {
    /// Derives (λ*, μ) from (E, κ):
    /// μ = Eκ/(2(1+κ)), λ = Eκ/(2(1+κ)(1−2κ)), λ* = 2λμ/(λ+2μ).
    pub fn from_young_poisson(young: f64, poisson: f64) -> Result<Self, MaterialError> {
        if !(young > 0.0) {
            return Err(MaterialError::InvalidParameter(format!(
                "Young modulus must be positive, got {young}"
            )));
        }
        if !(0.0..0.5).contains(&poisson) {
            return Err(MaterialError::InvalidParameter(format!(
                "Poisson ratio must lie in [0, 0.5), got {poisson}"
            )));
        }
        let mu = young * poisson / (2.0 * (1.0 + poisson));
        let lambda = young * poisson / (2.0 * (1.0 + poisson) * (1.0 - 2.0 * poisson));
        // kappa = 0 degenerates to a zero-stiffness material; keep it finite.
        let lame_star = if lambda + 2.0 * mu > 0.0 {
            2.0 * lambda * mu / (lambda + 2.0 * mu)
        } else {
            0.0
        };
        Ok(Self { young, poisson, lame_star, mu })
    }
}

/// Compressible Ogden moduli (Pa).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OgdenParams {
    pub c1: f64,
    pub c2: f64,
    pub d: f64,
}

impl OgdenParams {
    pub fn new(c1: f64, c2: f64, d: f64) -> Result<Self, MaterialError> {
        if !(c1 > 0.0) || !(c2 >= 0.0) || !(d >= 0.0) {
            return Err(MaterialError::InvalidParameter(format!(
                "Ogden moduli need c1 > 0, c2 >= 0, d >= 0; got c1 {c1}, c2 {c2}, d {d}"
            )));
        }
        Ok(Self { c1, c2, d })
    }

    /// Log-term coefficient c1 + 2 c2 + d; makes the reference stress-free.
    fn log_coeff(&self) -> f64 {
        self.c1 + 2.0 * self.c2 + self.d
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MaterialModel {
    SaintVenantKirchhoff(SvkParams),
    OgdenCompressible(OgdenParams),
}

/// Relative threshold on ΔC:ΔC below which the discrete-gradient correction
/// is replaced by its limit (the plain midpoint stress).
const DEGENERATE_INCREMENT: f64 = 1e-14;

fn check_spd(c: &Matrix2<f64>) -> Result<(), MaterialError> {
    let sym_tol = 1e-12 * c.norm().max(1.0);
    if (c.m12 - c.m21).abs() > sym_tol || c.m11 <= 0.0 || c.determinant() <= 0.0 {
        return Err(MaterialError::NotSpd);
    }
    Ok(())
}

impl MaterialModel {
    /// Stored energy density W̃(C) in J/m³. Zero at C = I.
    pub fn energy_density(&self, c: &Matrix2<f64>) -> Result<f64, MaterialError> {
        check_spd(c)?;
        Ok(self.w(c))
    }

    /// Second Piola-Kirchhoff stress S = 2 ∂W̃/∂C. Zero at C = I.
    pub fn pk2_stress(&self, c: &Matrix2<f64>) -> Result<Matrix2<f64>, MaterialError> {
        check_spd(c)?;
        Ok(2.0 * self.g(c))
    }

    /// Algorithmic first Piola-Kirchhoff stress of the conserving midpoint
    /// scheme: Π = F_mid Σ with Σ the midpoint PK2 stress plus the
    /// discrete-gradient correction along ΔC.
    pub fn gonzalez_stress(
        &self,
        f_prev: &Matrix2<f64>,
        f_curr: &Matrix2<f64>,
    ) -> Result<Matrix2<f64>, MaterialError> {
        let (f_mid, sigma) = self.algorithmic_state(f_prev, f_curr)?;
        Ok(f_mid * sigma)
    }

    /// Π_algo : ΔF − ΔW̃, the scheme's conservation identity. Zero up to
    /// roundoff for every admissible state pair.
    pub fn conservation_residual(
        &self,
        f_prev: &Matrix2<f64>,
        f_curr: &Matrix2<f64>,
    ) -> Result<f64, MaterialError> {
        let pi = self.gonzalez_stress(f_prev, f_curr)?;
        let dw = self.w(&(f_curr.transpose() * f_curr)) - self.w(&(f_prev.transpose() * f_prev));
        Ok((pi.transpose() * (f_curr - f_prev)).trace() - dw)
    }

    /// d Π_algo / d F_curr as a 4×4 matrix; row = 2i+j indexes Π_ij, column
    /// = 2k+l indexes F_kl. Differentiates the correction term too, not just
    /// the midpoint stress.
    pub fn consistent_tangent(
        &self,
        f_prev: &Matrix2<f64>,
        f_curr: &Matrix2<f64>,
    ) -> Result<SMatrix<f64, 4, 4>, MaterialError> {
        let det_p = f_prev.determinant();
        let det_c = f_curr.determinant();
        if det_p <= 0.0 {
            return Err(MaterialError::NonPositiveJacobian(det_p));
        }
        if det_c <= 0.0 {
            return Err(MaterialError::NonPositiveJacobian(det_c));
        }

        let c_p = f_prev.transpose() * f_prev;
        let c_c = f_curr.transpose() * f_curr;
        let c_m = 0.5 * (c_p + c_c);
        let dc = c_c - c_p;
        let f_mid = 0.5 * (f_prev + f_curr);

        let g_m = self.g(&c_m);
        let g_c = self.g(&c_c);
        let den = frob(&dc, &dc);
        let degenerate = den <= DEGENERATE_INCREMENT * c_m.norm_squared();
        let num = if degenerate {
            0.0
        } else {
            self.w(&c_c) - self.w(&c_p) - frob(&g_m, &dc)
        };
        let mut sigma = 2.0 * g_m;
        if !degenerate {
            sigma += (2.0 * num / den) * dc;
        }

        let mut tangent = SMatrix::<f64, 4, 4>::zeros();
        for k in 0..2 {
            for l in 0..2 {
                let mut df = Matrix2::zeros();
                df[(k, l)] = 1.0;
                let dc_c = df.transpose() * f_curr + f_curr.transpose() * df;
                let dg_m = self.dg(&c_m, &(0.5 * dc_c));
                let mut dsigma = 2.0 * dg_m;
                if !degenerate {
                    let dnum = frob(&g_c, &dc_c) - frob(&dg_m, &dc) - frob(&g_m, &dc_c);
                    let dden = 2.0 * frob(&dc, &dc_c);
                    dsigma += 2.0 * ((dnum * den - num * dden) / (den * den)) * dc
                        + (2.0 * num / den) * dc_c;
                }
                let dpi = 0.5 * df * sigma + f_mid * dsigma;
                for i in 0..2 {
                    for j in 0..2 {
                        tangent[(2 * i + j, 2 * k + l)] = dpi[(i, j)];
                    }
                }
            }
        }
        Ok(tangent)
    }

    /// Midpoint kinematics plus the algorithmic PK2 stress Σ.
    fn algorithmic_state(
        &self,
        f_prev: &Matrix2<f64>,
        f_curr: &Matrix2<f64>,
    ) -> Result<(Matrix2<f64>, Matrix2<f64>), MaterialError> {
        let det_p = f_prev.determinant();
        let det_c = f_curr.determinant();
        if det_p <= 0.0 {
            return Err(MaterialError::NonPositiveJacobian(det_p));
        }
        if det_c <= 0.0 {
            return Err(MaterialError::NonPositiveJacobian(det_c));
        }
        let c_p = f_prev.transpose() * f_prev;
        let c_c = f_curr.transpose() * f_curr;
        let c_m = 0.5 * (c_p + c_c);
        let dc = c_c - c_p;

        let g_m = self.g(&c_m);
        let mut sigma = 2.0 * g_m;
        let den = frob(&dc, &dc);
        if den > DEGENERATE_INCREMENT * c_m.norm_squared() {
            let num = self.w(&c_c) - self.w(&c_p) - frob(&g_m, &dc);
            sigma += (2.0 * num / den) * dc;
        }
        Ok((0.5 * (f_prev + f_curr), sigma))
    }

    /// Energy density, SPD input assumed.
    fn w(&self, c: &Matrix2<f64>) -> f64 {
        match self {
            Self::SaintVenantKirchhoff(p) => {
                let e = 0.5 * (c - Matrix2::identity());
                let tr = e.trace();
                0.5 * p.lame_star * tr * tr + p.mu * (e * e).trace()
            }
            Self::OgdenCompressible(p) => {
                // Plane-strain invariants: I1 = trC + 1, I2 = trC + detC, I3 = detC.
                let t = c.trace();
                let det = c.determinant();
                p.c1 * (t - 2.0) + p.c2 * (t + det - 3.0) + p.d * (det - 1.0)
                    - p.log_coeff() * det.ln()
            }
        }
    }

    /// G = ∂W̃/∂C (symmetric-argument convention), SPD input assumed.
    fn g(&self, c: &Matrix2<f64>) -> Matrix2<f64> {
        match self {
            Self::SaintVenantKirchhoff(p) => {
                let e = 0.5 * (c - Matrix2::identity());
                0.5 * p.lame_star * e.trace() * Matrix2::identity() + p.mu * e
            }
            Self::OgdenCompressible(p) => {
                // ∂detC/∂C = adj C = (trC) I − C for 2×2.
                let adj = c.trace() * Matrix2::identity() - c;
                let inv = c.try_inverse().expect("SPD C is invertible");
                p.c1 * Matrix2::identity()
                    + p.c2 * (Matrix2::identity() + adj)
                    + p.d * adj
                    - p.log_coeff() * inv
            }
        }
    }

    /// Directional derivative of G at C along the symmetric increment dC.
    fn dg(&self, c: &Matrix2<f64>, dc: &Matrix2<f64>) -> Matrix2<f64> {
        match self {
            Self::SaintVenantKirchhoff(p) => {
                0.25 * p.lame_star * dc.trace() * Matrix2::identity() + 0.5 * p.mu * dc
            }
            Self::OgdenCompressible(p) => {
                let inv = c.try_inverse().expect("SPD C is invertible");
                (p.c2 + p.d) * (dc.trace() * Matrix2::identity() - dc)
                    + p.log_coeff() * inv * dc * inv
            }
        }
    }
}

/// Frobenius inner product A : B.
fn frob(a: &Matrix2<f64>, b: &Matrix2<f64>) -> f64 {
    (a.transpose() * b).trace()
}
