// Copyright 2026 The quditfid Authors
// SPDX-License-Identifier: Apache-2.0

//! Fidelity metrics.
//!
//! The deterministic average gate infidelity ([`agi_exact`]) goes through the
//! process fidelity `F_p = Tr(S_U^dag S) / d^2` and `F = (d F_p + 1) / (d + 1)`.
//! [`agi_monte_carlo`] integrates the same quantity over Haar-random pure
//! input states and serves as the independent check.

use nalgebra::SymmetricEigen;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::channels::KrausSet;
use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::lindblad::SuperOperator;
use crate::operators::Operator;

/// Samples per parallel Monte Carlo chunk. Fixed so results do not depend on
/// the thread count.
const MC_CHUNK: usize = 2048;

/// Seeded source of Haar-random unitaries and pure states.
///
/// Samplers are split rather than shared: [`HaarSampler::split`] derives an
/// independent ChaCha stream from the same root seed, so every task can own
/// its generator and results stay reproducible from one seed.
#[derive(Debug, Clone)]
pub struct HaarSampler {
    dim: usize,
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl HaarSampler {
    pub fn new(dim: usize, seed: u64) -> Self {
        Self::with_stream(dim, seed, 0)
    }

    fn with_stream(dim: usize, seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self {
            dim,
            seed,
            stream,
            rng,
        }
    }

    /// Independent child sampler number `task`.
    pub fn split(&self, task: u64) -> Self {
        let stream = self
            .stream
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(task.wrapping_add(1));
        Self::with_stream(self.dim, self.seed, stream)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn gaussian_matrix(&mut self) -> CMatrix {
        let d = self.dim;
        let scale = std::f64::consts::FRAC_1_SQRT_2;
        CMatrix::from_fn(d, d, |_, _| {
            let re: f64 = self.rng.sample(StandardNormal);
            let im: f64 = self.rng.sample(StandardNormal);
            num_complex::Complex64::new(re * scale, im * scale)
        })
    }

    /// Haar-distributed unitary: QR of a complex Ginibre matrix with the
    /// phases of `diag(R)` moved into `Q`.
    pub fn unitary(&mut self) -> Operator {
        let qr = self.gaussian_matrix().qr();
        let mut q = qr.q();
        let r = qr.r();
        for j in 0..self.dim {
            let rjj = r[(j, j)];
            let phase = if rjj.norm() > 0.0 {
                rjj / rjj.norm()
            } else {
                linalg::ONE
            };
            for i in 0..self.dim {
                q[(i, j)] *= phase;
            }
        }
        Operator::new(q).expect("square")
    }

    /// Haar-random pure state vector: first column of a Haar unitary, which
    /// is distributed by the Fubini-Study measure.
    pub fn state_vector(&mut self) -> CVector {
        self.unitary().matrix().column(0).into_owned()
    }

    pub fn state(&mut self) -> DensityMatrix {
        DensityMatrix::pure(&self.state_vector()).expect("unit vector")
    }
}

/// Convenience wrapper for [`HaarSampler::unitary`].
pub fn haar_unitary(sampler: &mut HaarSampler) -> Operator {
    sampler.unitary()
}

/// Mean and standard error of a Monte Carlo average.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: usize,
}

impl MeanEstimate {
    /// `|mean - value|` in units of the standard error.
    pub fn z_score(&self, value: f64) -> f64 {
        if self.std_error == 0.0 {
            if self.mean == value {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean - value).abs() / self.std_error
        }
    }
}

/// Average `f` over `n_samples` Haar-random pure states.
pub fn haar_state_average<F>(sampler: &HaarSampler, n_samples: usize, f: F) -> Result<MeanEstimate>
where
    F: Fn(&CVector) -> f64 + Sync,
{
    if n_samples < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 samples, got {n_samples}"
        )));
    }
    let n_chunks = n_samples.div_ceil(MC_CHUNK);
    let sums: Vec<(f64, f64)> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut local = sampler.split(chunk as u64);
            let count = MC_CHUNK.min(n_samples - chunk * MC_CHUNK);
            let mut s = 0.0;
            let mut s2 = 0.0;
            for _ in 0..count {
                let v = f(&local.state_vector());
                s += v;
                s2 += v * v;
            }
            (s, s2)
        })
        .collect();
    let (s, s2) = sums
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let n = n_samples as f64;
    let mean = s / n;
    let var = ((s2 - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok(MeanEstimate {
        mean,
        std_error: (var / n).sqrt(),
        n_samples,
    })
}

fn check_same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch {
            expected: a,
            found: b,
        });
    }
    Ok(())
}

/// Eigenvalues below this are rounding noise; keeping them would inject
/// errors of order `sqrt(eps)` through the square roots.
const EIGEN_FLOOR: f64 = 1e-14;

fn clipped_sqrt(x: f64) -> f64 {
    if x > EIGEN_FLOOR {
        x.sqrt()
    } else {
        0.0
    }
}

fn psd_sqrt(m: &CMatrix) -> CMatrix {
    let eig = SymmetricEigen::new(linalg::hermitize(m));
    let roots = eig.eigenvalues.map(|x| num_complex::Complex64::new(clipped_sqrt(x), 0.0));
    &eig.eigenvectors * CMatrix::from_diagonal(&roots) * eig.eigenvectors.adjoint()
}

/// State fidelity `F(rho, target)`.
///
/// When either state is pure this is `Tr(rho target)`; otherwise the Uhlmann form
/// `(Tr sqrt(sqrt(rho) target sqrt(rho)))^2`.
pub fn state_fidelity(rho: &DensityMatrix, target: &DensityMatrix) -> Result<f64> {
    check_same_dim(target.dim(), rho.dim())?;
    for (name, m) in [("rho", rho), ("target", target)] {
        let tr = m.trace();
        if (tr.re - 1.0).abs() > 1e-6 || tr.im.abs() > 1e-6 {
            return Err(Error::InvalidDensityMatrix(format!("{name} has trace {tr}")));
        }
    }
    if target.is_pure() || rho.is_pure() {
        return Ok(linalg::inner(target.matrix(), rho.matrix()).re.clamp(0.0, 1.0));
    }
    let s = psd_sqrt(rho.matrix());
    let inner = &s * target.matrix() * &s;
    let eig = SymmetricEigen::new(linalg::hermitize(&inner));
    let root_sum: f64 = eig.eigenvalues.iter().map(|x| clipped_sqrt(*x)).sum();
    Ok((root_sum * root_sum).clamp(0.0, 1.0))
}

/// `Delta L = <L^dag L> - <L^dag><L>` in the pure state `target`.
///
/// The single-state infidelity to first order is `gamma t Delta L`.
pub fn fluctuation_dissipation(target: &DensityMatrix, l: &Operator) -> Result<f64> {
    check_same_dim(target.dim(), l.dim())?;
    if !target.is_pure() {
        return Err(Error::NotPure(target.purity()));
    }
    let r = target.matrix();
    let second = linalg::inner(r, l.gram().matrix()).re;
    let first = linalg::inner(r, l.matrix());
    Ok(second - first.norm_sqr())
}

/// `Delta L` for a pure state given as a vector, without forming `rho`.
pub fn fluctuation_of_vector(psi: &CVector, l: &Operator) -> f64 {
    let lpsi = l.matrix() * psi;
    let mean = psi.dotc(&lpsi);
    lpsi.norm_squared() - mean.norm_sqr()
}

/// AGI from the Kraus trace formula `1 - (d + sum_k |Tr E_k|^2) / (d (d + 1))`.
///
/// The Kraus operators are the error part of the channel, with the target
/// gate already factored out.
pub fn agi_kraus(kraus: &KrausSet, d: usize) -> Result<f64> {
    if kraus.is_empty() {
        return Err(Error::InvalidParameter("empty Kraus set".into()));
    }
    check_same_dim(kraus.hilbert_dim(), d)?;
    let df = d as f64;
    Ok(1.0 - (df + kraus.trace_weight()) / (df * (df + 1.0)))
}

fn check_target(channel: &SuperOperator, target: &Operator) -> Result<()> {
    check_same_dim(channel.hilbert_dim(), target.dim())?;
    target.require_unitary()
}

/// Process (entanglement) fidelity of `channel` with respect to the unitary
/// `target`.
pub fn process_fidelity(channel: &SuperOperator, target: &Operator) -> Result<f64> {
    check_target(channel, target)?;
    let d = target.dim() as f64;
    let su = SuperOperator::from_unitary(target);
    Ok(linalg::inner(su.matrix(), channel.matrix()).re / (d * d))
}

/// Deterministic average gate infidelity of `channel` against `target`.
pub fn agi_exact(channel: &SuperOperator, target: &Operator) -> Result<f64> {
    let fp = process_fidelity(channel, target)?;
    let d = target.dim() as f64;
    Ok(1.0 - (d * fp + 1.0) / (d + 1.0))
}

/// Monte Carlo average gate infidelity over Haar-random pure inputs.
pub fn agi_monte_carlo(
    channel: &SuperOperator,
    target: &Operator,
    n_samples: usize,
    sampler: &HaarSampler,
) -> Result<MeanEstimate> {
    check_target(channel, target)?;
    check_same_dim(channel.hilbert_dim(), sampler.dim())?;
    let u = target.matrix();
    haar_state_average(sampler, n_samples, |psi| {
        let rho0 = psi * psi.adjoint();
        let out = channel.apply_matrix(&rho0);
        let phi = u * psi;
        1.0 - phi.dotc(&(&out * &phi)).re
    })
}

/// Closed-form Haar average of `Delta L`:
/// `Tr(L^dag L) / (d + 1) - |Tr L|^2 / (d (d + 1))`.
pub fn weingarten_average(l: &Operator) -> f64 {
    let d = l.dim() as f64;
    l.gram().trace().re / (d + 1.0) - l.trace().norm_sqr() / (d * (d + 1.0))
}

/// Process infidelity from the average gate infidelity, `(D + 1) agi / D`.
pub fn process_from_average(agi: f64, dim: usize) -> Result<f64> {
    if dim == 0 {
        return Err(Error::InvalidDimension("dimension must be >= 1".into()));
    }
    if !(0.0..=1.0).contains(&agi) {
        return Err(Error::InvalidParameter(format!("AGI {agi} outside [0, 1]")));
    }
    let d = dim as f64;
    Ok((d + 1.0) * agi / d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::kraus_first_order;
    use crate::linalg::c;
    use crate::lindblad::{liouvillian, propagate};
    use crate::operators::{spin_plus, spin_xy, spin_z, NoiseModel};

    #[test]
    fn haar_unitaries_are_unitary_and_reproducible() {
        let mut a = HaarSampler::new(5, 42);
        let mut b = HaarSampler::new(5, 42);
        for _ in 0..20 {
            let u = a.unitary();
            assert!(u.unitarity_error() < 1e-10);
            assert_eq!(u, b.unitary());
        }
        let mut other = HaarSampler::new(5, 43);
        assert_ne!(HaarSampler::new(5, 42).unitary(), other.unitary());
        let mut s1 = a.split(3);
        let mut s2 = a.split(4);
        assert_ne!(s1.unitary(), s2.unitary());
    }

    #[test]
    fn state_fidelity_examples() {
        let p = DensityMatrix::plus(3).unwrap();
        assert!((state_fidelity(&p, &p).unwrap() - 1.0).abs() < 1e-14);
        let mm = DensityMatrix::maximally_mixed(3);
        assert!((state_fidelity(&mm, &p).unwrap() - 1.0 / 3.0).abs() < 1e-14);
        let e0 = DensityMatrix::basis(3, 0).unwrap();
        let e1 = DensityMatrix::basis(3, 1).unwrap();
        assert!(state_fidelity(&e0, &e1).unwrap().abs() < 1e-15);
        assert!(state_fidelity(&e0, &DensityMatrix::basis(2, 0).unwrap()).is_err());
    }

    #[test]
    fn uhlmann_matches_pure_formula_and_symmetry() {
        let mut s = HaarSampler::new(3, 7);
        let pure = s.state();
        let mixed_mat = (s.state().matrix() + s.state().matrix().scale(2.0)).unscale(3.0);
        let mixed = DensityMatrix::new(mixed_mat).unwrap();
        // general formula with the pure state in the first slot
        let f1 = state_fidelity(&pure, &mixed).unwrap();
        let f2 = state_fidelity(&mixed, &pure).unwrap();
        assert!((f1 - f2).abs() < 1e-10);
        let other = DensityMatrix::maximally_mixed(3);
        let g1 = state_fidelity(&mixed, &other).unwrap();
        let g2 = state_fidelity(&other, &mixed).unwrap();
        assert!((g1 - g2).abs() < 1e-10);

        // Commuting states reduce to the classical Bhattacharyya form.
        let (p, q): ([f64; 3], [f64; 3]) = ([0.5, 0.3, 0.2], [0.1, 0.6, 0.3]);
        let diag = |v: [f64; 3]| {
            DensityMatrix::new(CMatrix::from_diagonal(&CVector::from_vec(
                v.iter().map(|x| c(*x)).collect(),
            )))
            .unwrap()
        };
        let classical: f64 = p.iter().zip(&q).map(|(a, b)| (a * b).sqrt()).sum();
        let f = state_fidelity(&diag(p), &diag(q)).unwrap();
        assert!((f - classical * classical).abs() < 1e-13);
    }

    #[test]
    fn fluctuation_examples() {
        let jz = spin_z(2).unwrap();
        let up = DensityMatrix::basis(2, 0).unwrap();
        assert!(fluctuation_dissipation(&up, &jz).unwrap().abs() < 1e-15);
        let plus = DensityMatrix::plus(2).unwrap();
        assert!((fluctuation_dissipation(&plus, &jz).unwrap() - 0.25).abs() < 1e-15);
        assert!(matches!(
            fluctuation_dissipation(&DensityMatrix::maximally_mixed(2), &jz),
            Err(Error::NotPure(_))
        ));
        let v = CVector::from_element(2, c(1.0)).unscale(2f64.sqrt());
        assert!((fluctuation_of_vector(&v, &jz) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn agi_kraus_examples() {
        let id = KrausSet::new(vec![Operator::identity(4)]).unwrap();
        assert!(agi_kraus(&id, 4).unwrap().abs() < 1e-15);
        assert!(agi_kraus(&id, 3).is_err());
        let gt = 1e-6;
        for d in 2..=8usize {
            let k = kraus_first_order(&spin_z(d).unwrap(), gt).unwrap();
            let df = d as f64;
            let expected = gt / 12.0 * df * (df - 1.0);
            assert!((agi_kraus(&k, d).unwrap() - expected).abs() < 10.0 * gt * gt * df.powi(4));
        }
    }

    #[test]
    fn agi_exact_identity_and_rejections() {
        let id = SuperOperator::identity(3);
        assert!(agi_exact(&id, &Operator::identity(3)).unwrap().abs() < 1e-15);
        let mut m = CMatrix::identity(3, 3);
        m[(0, 0)] = c(2.0);
        let bad = Operator::new(m).unwrap();
        assert!(matches!(agi_exact(&id, &bad), Err(Error::NotUnitary(_))));
        assert!(agi_exact(&id, &Operator::identity(2)).is_err());
    }

    #[test]
    fn agi_exact_dephasing_qubit() {
        let gt = 0.01;
        let g = liouvillian(&Operator::zeros(2), &NoiseModel::single(1.0, spin_z(2).unwrap()).unwrap())
            .unwrap();
        let ch = propagate(&g, gt).unwrap();
        let agi = agi_exact(&ch, &Operator::identity(2)).unwrap();
        // exact closed form (1 - exp(-gt/2)) / 3
        assert!((agi - (1.0 - (-gt / 2.0f64).exp()) / 3.0).abs() < 1e-15);
        assert!((1.0 - agi / (gt / 6.0)).abs() < 3e-3);
    }

    #[test]
    fn agi_exact_matches_kraus_to_second_order() {
        for gt in [1e-5, 1e-4] {
            for d in [3usize, 5] {
                let (jx, _) = spin_xy(d).unwrap();
                let k = kraus_first_order(&jx, gt).unwrap();
                let a = agi_kraus(&k, d).unwrap();
                let b = agi_exact(&k.to_superoperator(), &Operator::identity(d)).unwrap();
                assert!((a - b).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn monte_carlo_noiseless_is_zero() {
        let mut s = HaarSampler::new(3, 1);
        let u = s.unitary();
        let est = agi_monte_carlo(&SuperOperator::from_unitary(&u), &u, 100, &s.split(9)).unwrap();
        assert!(est.mean.abs() < 1e-10);
        assert!(agi_monte_carlo(&SuperOperator::identity(3), &u, 1, &s).is_err());
    }

    #[test]
    fn weingarten_examples() {
        assert!((weingarten_average(&spin_z(2).unwrap()) - 1.0 / 6.0).abs() < 1e-15);
        assert!(weingarten_average(&Operator::identity(5)).abs() < 1e-14);
        // J_+ gives twice the J_z value
        for d in 2..=6 {
            let r =
                weingarten_average(&spin_plus(d).unwrap()) / weingarten_average(&spin_z(d).unwrap());
            assert!((r - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn process_from_average_examples() {
        assert_eq!(process_from_average(0.0, 4).unwrap(), 0.0);
        assert!(process_from_average(0.1, 0).is_err());
        assert!(process_from_average(1.5, 2).is_err());
        let gt = 1e-3;
        for d in 2..=10usize {
            let df = d as f64;
            let agi = gt / 12.0 * df * (df - 1.0);
            let p = process_from_average(agi, d).unwrap();
            assert!((p - gt / 12.0 * (df * df - 1.0)).abs() < 1e-15);
        }
        for n in 1..=6u32 {
            let dd = 2f64.powi(n as i32);
            let agi = gt / 4.0 * n as f64 * dd / (dd + 1.0);
            let p = process_from_average(agi, 1 << n).unwrap();
            assert!((p - gt / 4.0 * n as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn basis_invariance() {
        let d = 3;
        let mut s = HaarSampler::new(d, 11);
        let (jx, _) = spin_xy(d).unwrap();
        let noise = NoiseModel::single(0.3, spin_plus(d).unwrap()).unwrap();
        let ch = propagate(&liouvillian(&jx, &noise).unwrap(), 0.7).unwrap();
        let u = s.unitary();
        let r = s.unitary();
        let sr = SuperOperator::from_unitary(&r);
        let rotated = sr.adjoint().compose(&ch.compose(&sr).unwrap()).unwrap();
        let ur = &(&r.dagger() * &u) * &r;
        let a = agi_exact(&ch, &u).unwrap();
        let b = agi_exact(&rotated, &ur).unwrap();
        assert!((a - b).abs() < 1e-10);
    }
}
