// Copyright 2026 The quditfid Authors
// SPDX-License-Identifier: Apache-2.0

//! Operator algebra: spin operators for arbitrary dimension, site embedding
//! of single-site operators into a product space, and the noise model type.
//!
//! Conventions: hbar = 1, `J_z` is diagonal and descending from `(d-1)/2`, so
//! a qubit `S_z` has eigenvalues `+1/2, -1/2`.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, I, ONE};

/// Tolerance for Hermiticity of constructed operators.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Tolerance for derived algebraic identities (commutators, unitarity).
pub const DERIVED_TOL: f64 = 1e-10;

/// A dense square complex matrix acting on a Hilbert space of dimension `dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    mat: CMatrix,
}

impl Operator {
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::InvalidDimension(format!(
                "operator must be square, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        if mat.nrows() == 0 {
            return Err(Error::InvalidDimension("operator dimension is zero".into()));
        }
        Ok(Self { mat })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: CMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            mat: CMatrix::zeros(dim, dim),
        }
    }

    /// `|row><col|` in dimension `dim`.
    pub fn ket_bra(dim: usize, row: usize, col: usize) -> Self {
        let mut mat = CMatrix::zeros(dim, dim);
        mat[(row, col)] = ONE;
        Self { mat }
    }

    pub fn from_diagonal(values: &[Complex64]) -> Self {
        Self {
            mat: CMatrix::from_diagonal(&linalg::CVector::from_column_slice(values)),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn dagger(&self) -> Self {
        Self {
            mat: self.mat.adjoint(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        linalg::trace(&self.mat)
    }

    /// `L^dag L`.
    pub fn gram(&self) -> Self {
        Self {
            mat: self.mat.adjoint() * &self.mat,
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            mat: &self.mat * s,
        }
    }

    pub fn kron(&self, other: &Operator) -> Self {
        Self {
            mat: linalg::kron(&self.mat, &other.mat),
        }
    }

    pub fn commutator(&self, other: &Operator) -> Self {
        Self {
            mat: &self.mat * &other.mat - &other.mat * &self.mat,
        }
    }

    pub fn hermiticity_error(&self) -> f64 {
        linalg::hermiticity_error(&self.mat)
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_error() <= HERMITIAN_TOL
    }

    pub fn unitarity_error(&self) -> f64 {
        linalg::unitarity_error(&self.mat)
    }

    /// Fails unless `U^dag U = 1` within [`DERIVED_TOL`].
    pub fn require_unitary(&self) -> Result<()> {
        let err = self.unitarity_error();
        if err > DERIVED_TOL {
            return Err(Error::NotUnitary(err));
        }
        Ok(())
    }

    pub fn require_hermitian(&self) -> Result<()> {
        let err = self.hermiticity_error();
        if err > HERMITIAN_TOL {
            return Err(Error::NotHermitian(err));
        }
        Ok(())
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        linalg::max_abs_diff(&self.mat, &other.mat)
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        Operator {
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        Operator {
            mat: &self.mat - &rhs.mat,
        }
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        Operator {
            mat: &self.mat * &rhs.mat,
        }
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator { mat: -&self.mat }
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::InvalidDimension("spin dimension must be >= 1".into()));
    }
    Ok(())
}

/// `J_z` for spin `j = (d-1)/2`: `diag((d-1)/2, (d-3)/2, ..., -(d-1)/2)`.
pub fn spin_z(d: usize) -> Result<Operator> {
    check_dim(d)?;
    let diag: Vec<Complex64> = (0..d)
        .map(|k| c((d as f64 - 1.0 - 2.0 * k as f64) / 2.0))
        .collect();
    Ok(Operator::from_diagonal(&diag))
}

/// Raising operator `J_+`, with `<m+1|J_+|m> = sqrt(j(j+1) - m(m+1))`.
///
/// Basis index `k` carries `m = j - k`, so `J_+` fills the first
/// superdiagonal.
pub fn spin_plus(d: usize) -> Result<Operator> {
    check_dim(d)?;
    let j = (d as f64 - 1.0) / 2.0;
    let mut mat = CMatrix::zeros(d, d);
    for k in 1..d {
        let m = j - k as f64;
        mat[(k - 1, k)] = c((j * (j + 1.0) - m * (m + 1.0)).sqrt());
    }
    Ok(Operator { mat })
}

/// `(J_x, J_y)` built from the ladder operators.
pub fn spin_xy(d: usize) -> Result<(Operator, Operator)> {
    let jp = spin_plus(d)?;
    let jm = jp.dagger();
    let jx = (&jp + &jm).scale(c(0.5));
    let jy = (&jp - &jm).scale(-I * 0.5);
    Ok((jx, jy))
}

/// Embed a single-site operator at `site` (1-based) of `n_sites` identical
/// sites: `1 ⊗ ... ⊗ op ⊗ ... ⊗ 1`.
pub fn embed_site(op: &Operator, site: usize, n_sites: usize) -> Result<Operator> {
    if n_sites == 0 || site == 0 || site > n_sites {
        return Err(Error::SiteOutOfRange { site, n_sites });
    }
    let id = Operator::identity(op.dim());
    let mut out: Option<Operator> = None;
    for k in 1..=n_sites {
        let factor = if k == site { op } else { &id };
        out = Some(match out {
            None => factor.clone(),
            Some(acc) => acc.kron(factor),
        });
    }
    Ok(out.expect("n_sites >= 1"))
}

/// One collapse operator with its decay rate.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseTerm {
    pub rate: f64,
    pub op: Operator,
}

/// Set of `(gamma_k, L_k)` pairs defining a Lindblad dissipator.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NoiseModel {
    terms: Vec<NoiseTerm>,
}

impl NoiseModel {
    pub fn new(terms: Vec<NoiseTerm>) -> Result<Self> {
        let mut dim = None;
        for t in &terms {
            if !(t.rate >= 0.0) || !t.rate.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "decay rate must be finite and non-negative, got {}",
                    t.rate
                )));
            }
            match dim {
                None => dim = Some(t.op.dim()),
                Some(d) if d != t.op.dim() => {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: t.op.dim(),
                    })
                }
                _ => {}
            }
        }
        Ok(Self { terms })
    }

    pub fn empty() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn single(rate: f64, op: Operator) -> Result<Self> {
        Self::new(vec![NoiseTerm { rate, op }])
    }

    /// Identical `rate * op` on every one of `n_sites` sites.
    pub fn per_site(rate: f64, op: &Operator, n_sites: usize) -> Result<Self> {
        let terms = (1..=n_sites)
            .map(|k| {
                Ok(NoiseTerm {
                    rate,
                    op: embed_site(op, k, n_sites)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(terms)
    }

    pub fn terms(&self) -> &[NoiseTerm] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Common dimension of the collapse operators, `None` when empty.
    pub fn dim(&self) -> Option<usize> {
        self.terms.first().map(|t| t.op.dim())
    }

    /// Every rate multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.terms
                .iter()
                .map(|t| NoiseTerm {
                    rate: t.rate * factor,
                    op: t.op.clone(),
                })
                .collect(),
        )
    }
}
