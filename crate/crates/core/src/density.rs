// Copyright 2026 The quditfid Authors
// SPDX-License-Identifier: Apache-2.0

use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector};

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const EIGEN_TOL: f64 = -1e-10;
/// Purity threshold above which a state is treated as pure.
pub const PURITY_TOL: f64 = 1e-10;

/// A density matrix: Hermitian, unit trace, positive semidefinite.
///
/// [`DensityMatrix::new`] enforces the invariants. Channel outputs are built
/// with [`DensityMatrix::from_matrix_unchecked`] so that trace drift stays
/// observable rather than being rejected or renormalized.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
}

impl DensityMatrix {
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() == 0 {
            return Err(Error::InvalidDensityMatrix(format!(
                "shape {}x{} is not square and non-empty",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let herm = linalg::hermiticity_error(&mat);
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (error {herm:e})"
            )));
        }
        let tr = linalg::trace(&mat);
        if (tr - c(1.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr} != 1")));
        }
        let min_eig = SymmetricEigen::new(linalg::hermitize(&mat))
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min_eig < EIGEN_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(Self { mat })
    }

    pub fn from_matrix_unchecked(mat: CMatrix) -> Self {
        Self { mat }
    }

    /// `|psi><psi|` for a normalized copy of `psi`.
    pub fn pure(psi: &CVector) -> Result<Self> {
        let norm = psi.norm();
        if psi.is_empty() || norm == 0.0 {
            return Err(Error::InvalidDensityMatrix("zero state vector".into()));
        }
        let v = psi.unscale(norm);
        Ok(Self {
            mat: &v * v.adjoint(),
        })
    }

    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::InvalidDimension(format!("basis index {k} >= {dim}")));
        }
        let mut v = CVector::zeros(dim);
        v[k] = c(1.0);
        Self::pure(&v)
    }

    /// Uniform superposition `|+> = sum_k |k> / sqrt(d)`.
    pub fn plus(dim: usize) -> Result<Self> {
        Self::pure(&CVector::from_element(dim, c(1.0)))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            mat: CMatrix::identity(dim, dim).unscale(dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn trace(&self) -> Complex64 {
        linalg::trace(&self.mat)
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        linalg::inner(&self.mat, &self.mat).re
    }

    pub fn is_pure(&self) -> bool {
        self.purity() >= 1.0 - PURITY_TOL
    }

    /// `U rho U^dag`.
    pub fn conjugate(&self, u: &CMatrix) -> Self {
        Self {
            mat: u * &self.mat * u.adjoint(),
        }
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        linalg::max_abs_diff(&self.mat, &other.mat)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_rejects_bad_states() {
        let mut m = CMatrix::identity(2, 2);
        assert!(DensityMatrix::new(m.clone()).is_err()); // trace 2
        m[(0, 0)] = c(1.5);
        m[(1, 1)] = c(-0.5);
        assert!(DensityMatrix::new(m).is_err()); // negative eigenvalue
        let mut nh = CMatrix::zeros(2, 2);
        nh[(0, 0)] = c(1.0);
        nh[(0, 1)] = c(0.1);
        assert!(DensityMatrix::new(nh).is_err());
        assert!(DensityMatrix::new(CMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn pure_and_mixed_states() {
        let p = DensityMatrix::plus(3).unwrap();
        assert!(p.is_pure());
        assert!(DensityMatrix::new(p.matrix().clone()).is_ok());
        let mm = DensityMatrix::maximally_mixed(4);
        assert!((mm.purity() - 0.25).abs() < 1e-15);
        assert!(!mm.is_pure());
        assert!(DensityMatrix::basis(2, 2).is_err());
    }
}
