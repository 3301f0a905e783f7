//! Sparse matrix plumbing: triplet accumulation, homogeneous Dirichlet
//! elimination, and a deterministic sparse LU solve.
//!
//! The Newton tangent is nonsymmetric whenever a slip node couples the
//! tangential force to the normal pressure, so the factorization is a general
//! sparse LU. Parallelism is pinned to sequential once per process; together
//! with fixed assembly orders this makes solves bit-reproducible.

use std::sync::Once;

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};

#[derive(Debug, thiserror::Error)]
pub enum SparseError {
    #[error("invalid sparse structure: {0}")]
    Structure(String),
    #[error("sparse LU factorization failed (singular or structurally deficient matrix)")]
    Factorization,
    #[error("linear solve residual {achieved:e} exceeds tolerance {required:e}")]
    ResidualTooLarge { achieved: f64, required: f64 },
    #[error("non-finite value in linear system")]
    NonFinite,
}

/// Square coordinate-format matrix; duplicate entries accumulate.
///
/// Kept as the primary representation because assembly, matrix-vector
/// products, and quadratic forms all stream the entry list in a fixed order.
#[derive(Clone, Debug)]
pub struct CooMatrix {
    n: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl CooMatrix {
    pub fn new(n: usize) -> Self {
        Self { n, entries: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.n && col < self.n);
        self.entries.push((row, col, value));
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![0.0; self.n];
        for &(r, c, v) in &self.entries {
            y[r] += v * x[c];
        }
        y
    }

    /// xᵀ A y.
    pub fn quadratic_form(&self, x: &[f64], y: &[f64]) -> f64 {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        self.entries.iter().map(|&(r, c, v)| x[r] * v * y[c]).sum()
    }

    /// Dense copy, for small-problem spectral checks.
    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.n, self.n);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }
}

/// Restrict the system to the complement of `fixed` by zeroing their rows and
/// columns, placing a unit diagonal, and zeroing their right-hand side
/// entries. The solved increment is then exactly zero on the fixed dofs.
pub fn eliminate_dofs(triplets: &mut Vec<(usize, usize, f64)>, rhs: &mut [f64], fixed: &[usize]) {
    if fixed.is_empty() {
        return;
    }
    let mask: std::collections::BTreeSet<usize> = fixed.iter().copied().collect();
    triplets.retain(|&(r, c, _)| !mask.contains(&r) && !mask.contains(&c));
    for &d in &mask {
        triplets.push((d, d, 1.0));
        rhs[d] = 0.0;
    }
}

fn pin_sequential() {
    static ONCE: Once = Once::new();
    ONCE.call_once(|| faer::set_global_parallelism(faer::Par::Seq));
}

/// Solve A x = b for square A given as accumulating triplets, via sparse LU.
/// The residual ‖Ax − b‖∞ is verified against `linear_tol`·max(1, ‖b‖∞).
pub fn solve_sparse(
    n: usize,
    triplets: &[(usize, usize, f64)],
    rhs: &[f64],
    linear_tol: f64,
) -> Result<Vec<f64>, SparseError> {
    pin_sequential();
    if rhs.len() != n {
        return Err(SparseError::Structure(format!(
            "rhs length {} does not match dimension {n}",
            rhs.len()
        )));
    }
    if triplets.iter().any(|&(_, _, v)| !v.is_finite()) || rhs.iter().any(|v| !v.is_finite()) {
        return Err(SparseError::NonFinite);
    }

    let faer_triplets: Vec<Triplet<usize, usize, f64>> =
        triplets.iter().map(|&(r, c, v)| Triplet::new(r, c, v)).collect();
    let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &faer_triplets)
        .map_err(|e| SparseError::Structure(format!("{e:?}")))?;
    let lu = mat.as_ref().sp_lu().map_err(|_| SparseError::Factorization)?;

    let b = Mat::from_fn(n, 1, |i, _| rhs[i]);
    let x = lu.solve(&b);
    let x: Vec<f64> = (0..n).map(|i| x[(i, 0)]).collect();
    if x.iter().any(|v| !v.is_finite()) {
        return Err(SparseError::NonFinite);
    }

    let mut residual = rhs.to_vec();
    for &(r, c, v) in triplets {
        residual[r] -= v * x[c];
    }
    let achieved = residual.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = rhs.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let required = linear_tol * scale;
    if achieved > required {
        return Err(SparseError::ResidualTooLarge { achieved, required });
    }
    Ok(x)
}
