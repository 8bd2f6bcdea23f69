// Copyright 2026 The quditfid Authors
// SPDX-License-Identifier: Apache-2.0

//! First-order Kraus channels and the perturbative series of the noisy state.
//!
//! The series writes the state at time `t` as
//! `rho(t) = rho* + sum_{l,k>=1} gamma^l t^k rho_lk`, where `rho*` is the
//! noiseless state at the same time. Each coefficient is linear in `rho*`,
//! so it is stored as a superoperator `S_lk` with `rho_lk = S_lk[rho*]`.
//! Matching powers of `gamma` and `t` in the master equation gives
//!
//! ```text
//! k S_lk = [Hc, S_l(k-1)] + D S_(l-1)(k-1),   S_00 = 1,   S_l0 = 0 (l >= 1)
//! ```
//!
//! with `Hc = -i[H, .]` and `D` the dissipator. The `- S Hc` half of the
//! commutator is the time derivative of `rho_l(k-1)` through `rho*`, whose own
//! derivative is `Hc[rho*]`.

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix};
use crate::lindblad::{dissipator_superop, liouvillian, SuperOperator};
use crate::operators::{NoiseModel, Operator};

/// A set of Kraus operators `{E_0, ..., E_K}` on a `hilbert_dim` space.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    ops: Vec<Operator>,
    hilbert_dim: usize,
}

impl KrausSet {
    pub fn new(ops: Vec<Operator>) -> Result<Self> {
        let hilbert_dim = ops
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty Kraus set".into()))?
            .dim();
        if let Some(bad) = ops.iter().find(|e| e.dim() != hilbert_dim) {
            return Err(Error::DimensionMismatch {
                expected: hilbert_dim,
                found: bad.dim(),
            });
        }
        Ok(Self { ops, hilbert_dim })
    }

    pub fn ops(&self) -> &[Operator] {
        &self.ops
    }

    pub fn hilbert_dim(&self) -> usize {
        self.hilbert_dim
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// `sum_k E_k^dag E_k - 1`.
    pub fn completeness_defect(&self) -> Operator {
        let d = self.hilbert_dim;
        let mut acc = CMatrix::zeros(d, d);
        for e in &self.ops {
            acc += e.matrix().adjoint() * e.matrix();
        }
        acc -= CMatrix::identity(d, d);
        Operator::new(acc).expect("square by construction")
    }

    pub fn to_superoperator(&self) -> SuperOperator {
        SuperOperator::from_kraus(&self.ops).expect("validated on construction")
    }

    /// `sum_k E_k rho E_k^dag`, Hermitized, trace untouched.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.hilbert_dim {
            return Err(Error::DimensionMismatch {
                expected: self.hilbert_dim,
                found: rho.dim(),
            });
        }
        let d = self.hilbert_dim;
        let mut out = CMatrix::zeros(d, d);
        for e in &self.ops {
            out += e.matrix() * rho.matrix() * e.matrix().adjoint();
        }
        Ok(DensityMatrix::from_matrix_unchecked(linalg::hermitize(&out)))
    }

    /// `sum_k |Tr E_k|^2`.
    pub fn trace_weight(&self) -> f64 {
        self.ops.iter().map(|e| e.trace().norm_sqr()).sum()
    }
}

fn check_gamma_t(gamma_t: f64) -> Result<()> {
    if !(gamma_t >= 0.0) || !gamma_t.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "gamma*t must be finite and >= 0, got {gamma_t}"
        )));
    }
    Ok(())
}

/// `E_0 = 1 - (gamma t / 2) L^dag L`, `E_1 = sqrt(gamma t) L`.
///
/// At `gamma_t = 0` the set is just `{1}`.
pub fn kraus_first_order(l: &Operator, gamma_t: f64) -> Result<KrausSet> {
    check_gamma_t(gamma_t)?;
    let d = l.dim();
    if gamma_t == 0.0 {
        return KrausSet::new(vec![Operator::identity(d)]);
    }
    let e0 = &Operator::identity(d) - &l.gram().scale(c(gamma_t / 2.0));
    let e1 = l.scale(c(gamma_t.sqrt()));
    KrausSet::new(vec![e0, e1])
}

/// `E_0 = 1 - sum_k (gamma_k t / 2) L_k^dag L_k`, `E_k = sqrt(gamma_k t) L_k`.
pub fn kraus_multi(noise: &NoiseModel, t: f64) -> Result<KrausSet> {
    check_gamma_t(t)?;
    let d = noise
        .dim()
        .ok_or_else(|| Error::InvalidParameter("noise model has no terms".into()))?;
    let mut e0 = Operator::identity(d);
    let mut ops = Vec::with_capacity(noise.terms().len() + 1);
    for term in noise.terms() {
        let gt = term.rate * t;
        e0 = &e0 - &term.op.gram().scale(c(gt / 2.0));
        ops.push(term.op.scale(c(gt.sqrt())));
    }
    ops.insert(0, e0);
    KrausSet::new(ops)
}

/// Coefficient superoperators `S_lk` of the perturbative series, for all
/// `l + k <= max_total`.
#[derive(Debug, Clone)]
pub struct SeriesTerms {
    max_total: usize,
    hilbert_dim: usize,
    // terms[l][k]
    terms: Vec<Vec<SuperOperator>>,
}

impl SeriesTerms {
    pub fn new(h: &Operator, noise: &NoiseModel, max_total: usize) -> Result<Self> {
        let d = h.dim();
        let hc = liouvillian(h, &NoiseModel::empty())?;
        let diss = dissipator_superop(noise, d)?;
        let zero = SuperOperator::zeros(d);
        let mut terms = vec![vec![zero.clone(); max_total + 1]; max_total + 1];
        terms[0][0] = SuperOperator::identity(d);
        for k in 1..=max_total {
            for l in 0..=(max_total - k) {
                let prev = &terms[l][k - 1];
                let mut m = hc.matrix() * prev.matrix() - prev.matrix() * hc.matrix();
                if l >= 1 {
                    m += diss.matrix() * terms[l - 1][k - 1].matrix();
                }
                terms[l][k] = SuperOperator::new(m.unscale(k as f64), d)?;
            }
        }
        Ok(Self {
            max_total,
            hilbert_dim: d,
            terms,
        })
    }

    /// `S_lk`; zero outside the computed range.
    pub fn term(&self, l: usize, k: usize) -> SuperOperator {
        if l + k <= self.max_total {
            self.terms[l][k].clone()
        } else {
            SuperOperator::zeros(self.hilbert_dim)
        }
    }

    pub fn max_total(&self) -> usize {
        self.max_total
    }

    /// `rho* + sum_{1 <= l, l + k <= max_total} gamma^l t^k S_lk[rho*]`.
    pub fn evaluate(&self, rho_star: &DensityMatrix, gamma: f64, t: f64) -> Result<DensityMatrix> {
        if rho_star.dim() != self.hilbert_dim {
            return Err(Error::DimensionMismatch {
                expected: self.hilbert_dim,
                found: rho_star.dim(),
            });
        }
        let mut out = rho_star.matrix().clone();
        for l in 1..=self.max_total {
            for k in 1..=(self.max_total - l) {
                let coeff = gamma.powi(l as i32) * t.powi(k as i32);
                out += self.terms[l][k].apply_matrix(rho_star.matrix()).scale(coeff);
            }
        }
        Ok(DensityMatrix::from_matrix_unchecked(linalg::hermitize(&out)))
    }
}

/// Truncated perturbative series of the noisy state around the noiseless
/// target `rho_star` (the unitary evolution of the initial state to time `t`).
///
/// The dissipator is `gamma * sum_k w_k D[L_k]` where `w_k` are the rates
/// stored in `noise`. `order = n` keeps every term with `l + k <= 2n`: order 1
/// is the linear response `rho* + gamma t rho_11`, order 2 adds
/// `gamma t^2 rho_12`, `gamma t^3 rho_13` and `(gamma t)^2 rho_22`.
pub fn perturbative_expansion(
    rho_star: &DensityMatrix,
    h: &Operator,
    noise: &NoiseModel,
    gamma: f64,
    t: f64,
    order: usize,
) -> Result<DensityMatrix> {
    if !(1..=3).contains(&order) {
        return Err(Error::InvalidParameter(format!(
            "expansion order must be 1, 2 or 3, got {order}"
        )));
    }
    SeriesTerms::new(h, noise, 2 * order)?.evaluate(rho_star, gamma, t)
}

/// `M = {L^dag L, rho*} / 2 - L rho* L^dag`, the first-order perturbation.
pub fn perturbation_matrix(rho_star: &DensityMatrix, l: &Operator) -> CMatrix {
    let r = rho_star.matrix();
    let lm = l.matrix();
    let ldl = lm.adjoint() * lm;
    (&ldl * r + r * &ldl).scale(0.5) - lm * r * lm.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, max_abs_diff, I};
    use crate::lindblad::{apply, propagate};
    use crate::operators::{spin_plus, spin_xy, spin_z};

    #[test]
    fn zero_gamma_t_is_identity_set() {
        let k = kraus_first_order(&spin_z(3).unwrap(), 0.0).unwrap();
        assert_eq!(k.len(), 1);
        assert_eq!(k.ops()[0], Operator::identity(3));
        assert!(kraus_first_order(&spin_z(3).unwrap(), -1e-3).is_err());
    }

    #[test]
    fn trace_of_e0_for_dephasing() {
        let gt = 1e-3;
        for d in 1..=10usize {
            let k = kraus_first_order(&spin_z(d).unwrap(), gt).unwrap();
            let df = d as f64;
            let expected = df - gt / 24.0 * df * (df * df - 1.0);
            assert!((k.ops()[0].trace() - c(expected)).norm() < 1e-12);
        }
    }

    #[test]
    fn first_order_set_matches_exact_at_small_gamma_t() {
        let gt = 1e-4;
        let l = spin_z(2).unwrap();
        let rho = DensityMatrix::plus(2).unwrap();
        let k = kraus_first_order(&l, gt).unwrap();
        let g = liouvillian(&Operator::zeros(2), &NoiseModel::single(1.0, l).unwrap()).unwrap();
        let exact = apply(&propagate(&g, gt).unwrap(), &rho).unwrap();
        assert!(k.apply(&rho).unwrap().max_abs_diff(&exact) < 1e-8);
    }

    #[test]
    fn completeness_defect_is_exactly_quadratic() {
        let gt = 3e-3;
        for d in [2usize, 3, 5] {
            let (jx, jy) = spin_xy(d).unwrap();
            let l = &jx + &jy.scale(c(0.3));
            let k = kraus_first_order(&l, gt).unwrap();
            let ldl = l.gram();
            let expected = (&ldl * &ldl).scale(c(gt * gt / 4.0));
            assert!(k.completeness_defect().max_abs_diff(&expected) < 1e-12);
            let spectral = nalgebra::SymmetricEigen::new(ldl.matrix().clone())
                .eigenvalues
                .amax();
            let bound = 3.0 * gt * gt * spectral * spectral;
            assert!(max_abs(k.completeness_defect().matrix()) <= bound);
        }
    }

    #[test]
    fn multi_reduces_to_single() {
        let l = spin_plus(3).unwrap();
        let a = kraus_multi(&NoiseModel::single(2.0, l.clone()).unwrap(), 0.01).unwrap();
        let b = kraus_first_order(&l, 0.02).unwrap();
        assert_eq!(a.len(), 2);
        for (x, y) in a.ops().iter().zip(b.ops()) {
            assert!(x.max_abs_diff(y) < 1e-15);
        }
    }

    #[test]
    fn two_qubit_dephasing_trace_e0() {
        let gt = 1e-3;
        let noise = NoiseModel::per_site(1.0, &spin_z(2).unwrap(), 2).unwrap();
        let k = kraus_multi(&noise, gt).unwrap();
        assert_eq!(k.len(), 3);
        // Tr(E_0) = 2^n - n (gamma t / 8) 2^n at n = 2
        assert!((k.ops()[0].trace() - c(4.0 - gt)).norm() < 1e-13);
        let w = k.ops()[0].trace().norm_sqr();
        assert!((w - (16.0 - 8.0 * gt)).abs() < 2.0 * gt * gt);
        assert!(kraus_multi(&NoiseModel::empty(), 0.1).is_err());
    }

    #[test]
    fn first_order_expansion_is_rho_star_minus_gamma_t_m() {
        let d = 3;
        let l = spin_z(d).unwrap();
        let rho = DensityMatrix::plus(d).unwrap();
        let noise = NoiseModel::single(1.0, l.clone()).unwrap();
        let (gamma, t) = (0.2, 0.05);
        let ser = perturbative_expansion(&rho, &Operator::zeros(d), &noise, gamma, t, 1).unwrap();
        let expected = rho.matrix() - perturbation_matrix(&rho, &l).scale(gamma * t);
        assert!(max_abs_diff(ser.matrix(), &expected) < 1e-15);
    }

    #[test]
    fn series_terms_vanish_above_diagonal_and_follow_factorial_law_without_h() {
        let d = 3;
        let (jx, _) = spin_xy(d).unwrap();
        let noise = NoiseModel::single(1.0, jx).unwrap();
        let ser = SeriesTerms::new(&Operator::zeros(d), &noise, 8).unwrap();
        let diss = dissipator_superop(&noise, d).unwrap();
        let mut power = SuperOperator::identity(d);
        let mut fact = 1.0;
        for k in 1..=4usize {
            power = diss.compose(&power).unwrap();
            fact *= k as f64;
            assert!(ser.term(k, k).max_abs_diff(&power.scale(1.0 / fact)) < 1e-12);
            for l in 1..=(8 - k) {
                if l != k {
                    assert!(max_abs(ser.term(l, k).matrix()) < 1e-15);
                }
            }
        }
    }

    #[test]
    fn higher_gamma_powers_vanish_at_first_time_order() {
        let d = 2;
        let (jx, jy) = spin_xy(d).unwrap();
        let noise = NoiseModel::single(1.0, spin_z(d).unwrap()).unwrap();
        let h = &jx + &jy.scale(c(0.5));
        let ser = SeriesTerms::new(&h, &noise, 6).unwrap();
        for l in 2..=5 {
            assert_eq!(max_abs(ser.term(l, 1).matrix()), 0.0);
        }
        // rho_22 = D[D[rho*]] / 2 from the literal recursion, since rho_21 = 0
        let diss = dissipator_superop(&noise, d).unwrap();
        let expected = diss.compose(&diss).unwrap().scale(0.5);
        assert!(ser.term(2, 2).max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn rho_12_closed_form() {
        // rho_12 = (i/2)(D[[H, rho*]] - [H, D[rho*]])
        let d = 3;
        let (jx, _) = spin_xy(d).unwrap();
        let l = spin_z(d).unwrap();
        let noise = NoiseModel::single(1.0, l).unwrap();
        let ser = SeriesTerms::new(&jx, &noise, 3).unwrap();
        let rho = DensityMatrix::plus(d).unwrap();
        let diss = dissipator_superop(&noise, d).unwrap();
        let h = jx.matrix();
        let comm = |a: &CMatrix| h * a - a * h;
        let r = rho.matrix();
        let expected = (diss.apply_matrix(&comm(r)) - comm(&diss.apply_matrix(r))) * (I * 0.5);
        let got = ser.term(1, 2).apply_matrix(r);
        assert!(max_abs_diff(&got, &expected) < 1e-14);
    }

    #[test]
    fn unsupported_order() {
        let rho = DensityMatrix::plus(2).unwrap();
        let noise = NoiseModel::single(1.0, spin_z(2).unwrap()).unwrap();
        for order in [0, 4] {
            assert!(perturbative_expansion(&rho, &Operator::zeros(2), &noise, 1.0, 0.1, order).is_err());
        }
    }
}
