// Copyright 2026 The quditfid Authors
// SPDX-License-Identifier: Apache-2.0

//! Exact propagation of the Lindblad master equation
//!
//! ```text
//! drho/dt = -i[H, rho] + sum_k gamma_k (L_k rho L_k^dag - {L_k^dag L_k, rho} / 2)
//! ```
//!
//! in superoperator form. Density matrices are vectorized by column stacking,
//! for which `vec(A X B) = (B^T ⊗ A) vec(X)`.

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{self, c, kron, CMatrix, I};
use crate::operators::{NoiseModel, Operator};

/// Linear map on vectorized `d x d` matrices, stored as a `d^2 x d^2` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOperator {
    mat: CMatrix,
    hilbert_dim: usize,
}

impl SuperOperator {
    pub fn new(mat: CMatrix, hilbert_dim: usize) -> Result<Self> {
        let n = hilbert_dim * hilbert_dim;
        if mat.nrows() != n || mat.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: mat.nrows(),
            });
        }
        Ok(Self { mat, hilbert_dim })
    }

    pub fn identity(hilbert_dim: usize) -> Self {
        let n = hilbert_dim * hilbert_dim;
        Self {
            mat: CMatrix::identity(n, n),
            hilbert_dim,
        }
    }

    pub fn zeros(hilbert_dim: usize) -> Self {
        let n = hilbert_dim * hilbert_dim;
        Self {
            mat: CMatrix::zeros(n, n),
            hilbert_dim,
        }
    }

    /// `rho -> A rho B`.
    pub fn sandwich(a: &CMatrix, b: &CMatrix) -> Self {
        Self {
            mat: kron(&b.transpose(), a),
            hilbert_dim: a.nrows(),
        }
    }

    /// `rho -> U rho U^dag`, i.e. `conj(U) ⊗ U`.
    pub fn from_unitary(u: &Operator) -> Self {
        Self::sandwich(u.matrix(), &u.matrix().adjoint())
    }

    /// `rho -> sum_k E_k rho E_k^dag`.
    pub fn from_kraus(ops: &[Operator]) -> Result<Self> {
        let d = ops
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty Kraus set".into()))?
            .dim();
        let mut out = Self::zeros(d);
        for e in ops {
            if e.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: e.dim(),
                });
            }
            out.mat += kron(&e.matrix().conjugate(), e.matrix());
        }
        Ok(out)
    }

    pub fn hilbert_dim(&self) -> usize {
        self.hilbert_dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn compose(&self, first: &SuperOperator) -> Result<Self> {
        if self.hilbert_dim != first.hilbert_dim {
            return Err(Error::DimensionMismatch {
                expected: self.hilbert_dim,
                found: first.hilbert_dim,
            });
        }
        Ok(Self {
            mat: &self.mat * &first.mat,
            hilbert_dim: self.hilbert_dim,
        })
    }

    pub fn adjoint(&self) -> Self {
        Self {
            mat: self.mat.adjoint(),
            hilbert_dim: self.hilbert_dim,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            mat: self.mat.scale(s),
            hilbert_dim: self.hilbert_dim,
        }
    }

    pub fn add(&self, other: &SuperOperator) -> Self {
        assert_eq!(self.hilbert_dim, other.hilbert_dim);
        Self {
            mat: &self.mat + &other.mat,
            hilbert_dim: self.hilbert_dim,
        }
    }

    /// Apply to an arbitrary (not necessarily physical) matrix.
    pub fn apply_matrix(&self, x: &CMatrix) -> CMatrix {
        let v = &self.mat * linalg::vectorize(x);
        linalg::unvectorize(&v, self.hilbert_dim)
    }

    /// Choi matrix `sum_ij |i><j| ⊗ E(|i><j|)`.
    pub fn choi(&self) -> CMatrix {
        let d = self.hilbert_dim;
        let mut out = CMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                let mut e = CMatrix::zeros(d, d);
                e[(i, j)] = c(1.0);
                let img = self.apply_matrix(&e);
                out.view_mut((i * d, j * d), (d, d)).copy_from(&img);
            }
        }
        out
    }

    /// Smallest eigenvalue of the (Hermitized) Choi matrix.
    pub fn min_choi_eigenvalue(&self) -> f64 {
        nalgebra::SymmetricEigen::new(linalg::hermitize(&self.choi()))
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest `|Tr E(|i><j|) - delta_ij|`, zero for trace-preserving maps.
    pub fn trace_preservation_error(&self) -> f64 {
        let d = self.hilbert_dim;
        let mut err: f64 = 0.0;
        for col in 0..d * d {
            let (i, j) = (col % d, col / d);
            let tr: num_complex::Complex64 = (0..d).map(|k| self.mat[(k + k * d, col)]).sum();
            let target = if i == j { c(1.0) } else { c(0.0) };
            err = err.max((tr - target).norm());
        }
        err
    }

    pub fn max_abs_diff(&self, other: &SuperOperator) -> f64 {
        linalg::max_abs_diff(&self.mat, &other.mat)
    }
}

/// Dissipator `sum_k gamma_k D[L_k]` as a superoperator.
fn dissipator(noise: &NoiseModel, d: usize) -> CMatrix {
    let id = CMatrix::identity(d, d);
    let mut out = CMatrix::zeros(d * d, d * d);
    for term in noise.terms() {
        let l = term.op.matrix();
        let ldl = l.adjoint() * l;
        let jump = kron(&l.conjugate(), l);
        let anti = kron(&id, &ldl) + kron(&ldl.transpose(), &id);
        out += (jump - anti.scale(0.5)).scale(term.rate);
    }
    out
}

/// Generator `L` with `vec(drho/dt) = L vec(rho)`.
pub fn liouvillian(h: &Operator, noise: &NoiseModel) -> Result<SuperOperator> {
    h.require_hermitian()?;
    let d = h.dim();
    if let Some(nd) = noise.dim() {
        if nd != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: nd,
            });
        }
    }
    let id = CMatrix::identity(d, d);
    let hm = h.matrix();
    let unitary = (kron(&id, hm) - kron(&hm.transpose(), &id)) * (-I);
    Ok(SuperOperator {
        mat: unitary + dissipator(noise, d),
        hilbert_dim: d,
    })
}

/// Dissipative part only, `gamma`-weighted as given by `noise`.
pub fn dissipator_superop(noise: &NoiseModel, d: usize) -> Result<SuperOperator> {
    liouvillian(&Operator::zeros(d), noise)
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "propagation time must be finite and >= 0, got {t}"
        )));
    }
    Ok(())
}

/// `exp(L t)`.
pub fn propagate(gen: &SuperOperator, t: f64) -> Result<SuperOperator> {
    check_time(t)?;
    Ok(SuperOperator {
        mat: linalg::expm(&gen.mat.scale(t)),
        hilbert_dim: gen.hilbert_dim,
    })
}

/// `exp(L t)` for each `t`, in input order.
pub fn propagate_grid(gen: &SuperOperator, times: &[f64]) -> Result<Vec<SuperOperator>> {
    use rayon::prelude::*;
    times.par_iter().map(|&t| propagate(gen, t)).collect()
}

/// Fixed-step RK4 integration of `dX/dt = L X`, `X(0) = 1`, with the step
/// chosen so that `||L||_1 h <= 0.01`. Cross-check for [`propagate`].
pub fn propagate_rk4(gen: &SuperOperator, t: f64) -> Result<SuperOperator> {
    check_time(t)?;
    let norm = linalg::norm_one(&gen.mat);
    let steps = ((norm * t / 0.01).ceil() as usize).max(1);
    let h = t / steps as f64;
    let n = gen.mat.nrows();
    let mut x = CMatrix::identity(n, n);
    let a = &gen.mat;
    for _ in 0..steps {
        let k1 = a * &x;
        let k2 = a * (&x + k1.scale(h / 2.0));
        let k3 = a * (&x + k2.scale(h / 2.0));
        let k4 = a * (&x + k3.scale(h));
        x += (k1 + k2.scale(2.0) + k3.scale(2.0) + k4).scale(h / 6.0);
    }
    Ok(SuperOperator {
        mat: x,
        hilbert_dim: gen.hilbert_dim,
    })
}

/// Apply a channel to a state. The result is Hermitized to absorb roundoff
/// but its trace is left untouched.
pub fn apply(channel: &SuperOperator, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if channel.hilbert_dim != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: channel.hilbert_dim,
            found: rho.dim(),
        });
    }
    let out = channel.apply_matrix(rho.matrix());
    Ok(DensityMatrix::from_matrix_unchecked(linalg::hermitize(&out)))
}
