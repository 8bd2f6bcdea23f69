// Copyright 2026 The quditfid Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex matrix helpers shared by the rest of the crate.
//!
//! The matrix exponential is the scaling-and-squaring algorithm with
//! variable-degree Padé approximants (Higham 2005). Diagonal inputs, which
//! is what pure dephasing with a vanishing Hamiltonian produces, are
//! exponentiated entrywise.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Largest entrywise modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

/// Max column sum, the induced 1-norm.
pub fn norm_one(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn hermiticity_error(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

pub fn unitarity_error(m: &CMatrix) -> f64 {
    let n = m.nrows();
    max_abs_diff(&(m.adjoint() * m), &CMatrix::identity(n, n))
}

/// `(A + A^dag) / 2`.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().sum()
}

/// `Tr(A^dag B)` without forming the product.
pub fn inner(a: &CMatrix, b: &CMatrix) -> Complex64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

fn is_diagonal(m: &CMatrix) -> bool {
    let (r, c) = m.shape();
    for j in 0..c {
        for i in 0..r {
            if i != j && m[(i, j)] != ZERO {
                return false;
            }
        }
    }
    true
}

const THETA: [(usize, f64); 4] = [
    (3, 1.495_585_217_958_292e-2),
    (5, 2.539_398_330_063_230e-1),
    (7, 9.504_178_996_162_932e-1),
    (9, 2.097_847_961_257_068),
];
const THETA_13: f64 = 5.371_920_351_148_152;

fn pade_coefficients(m: usize) -> &'static [f64] {
    match m {
        3 => &[120.0, 60.0, 12.0, 1.0],
        5 => &[30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0],
        7 => &[
            17_297_280.0,
            8_648_640.0,
            1_995_840.0,
            277_200.0,
            25_200.0,
            1_512.0,
            56.0,
            1.0,
        ],
        9 => &[
            17_643_225_600.0,
            8_821_612_800.0,
            2_075_673_600.0,
            302_702_400.0,
            30_270_240.0,
            2_162_160.0,
            110_880.0,
            3_960.0,
            90.0,
            1.0,
        ],
        13 => &[
            64_764_752_532_480_000.0,
            32_382_376_266_240_000.0,
            7_771_770_303_897_600.0,
            1_187_353_796_428_800.0,
            129_060_195_264_000.0,
            10_559_470_521_600.0,
            670_442_572_800.0,
            33_522_128_640.0,
            1_323_241_920.0,
            40_840_800.0,
            960_960.0,
            16_380.0,
            182.0,
            1.0,
        ],
        _ => unreachable!("no Padé table for degree {m}"),
    }
}

fn pade_low(a: &CMatrix, m: usize) -> (CMatrix, CMatrix) {
    let n = a.nrows();
    let b = pade_coefficients(m);
    let a2 = a * a;
    let mut powers = vec![CMatrix::identity(n, n), a2.clone()];
    while powers.len() <= m / 2 {
        let next = powers.last().unwrap() * &a2;
        powers.push(next);
    }
    let mut u = CMatrix::zeros(n, n);
    let mut v = CMatrix::zeros(n, n);
    for (j, p) in powers.iter().enumerate() {
        u += p.scale(b[2 * j + 1]);
        v += p.scale(b[2 * j]);
    }
    (a * u, v)
}

fn pade_13(a: &CMatrix) -> (CMatrix, CMatrix) {
    let n = a.nrows();
    let b = pade_coefficients(13);
    let id = CMatrix::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let u_inner = &a6 * (a6.scale(b[13]) + a4.scale(b[11]) + a2.scale(b[9]))
        + a6.scale(b[7])
        + a4.scale(b[5])
        + a2.scale(b[3])
        + id.scale(b[1]);
    let u = a * u_inner;
    let v = &a6 * (a6.scale(b[12]) + a4.scale(b[10]) + a2.scale(b[8]))
        + a6.scale(b[6])
        + a4.scale(b[4])
        + a2.scale(b[2])
        + id.scale(b[0]);
    (u, v)
}

/// Matrix exponential of a square complex matrix.
pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm requires a square matrix");
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    if is_diagonal(a) {
        return CMatrix::from_diagonal(&a.diagonal().map(|z| z.exp()));
    }

    let norm = norm_one(a);
    for &(m, theta) in THETA.iter() {
        if norm <= theta {
            let (u, v) = pade_low(a, m);
            return pade_solve(u, v);
        }
    }

    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a.scale(0.5f64.powi(s));
    let (u, v) = pade_13(&scaled);
    let mut r = pade_solve(u, v);
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

fn pade_solve(u: CMatrix, v: CMatrix) -> CMatrix {
    let p = &v + &u;
    let q = v - u;
    q.lu()
        .solve(&p)
        .expect("Padé denominator is singular; input norm out of range")
}

/// Column-stacking vectorization; nalgebra storage is already column-major.
pub fn vectorize(m: &CMatrix) -> CVector {
    CVector::from_column_slice(m.as_slice())
}

pub fn unvectorize(v: &CVector, dim: usize) -> CMatrix {
    assert_eq!(v.len(), dim * dim);
    CMatrix::from_column_slice(dim, dim, v.as_slice())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn taylor_expm(a: &CMatrix, terms: usize) -> CMatrix {
        let n = a.nrows();
        let mut term = CMatrix::identity(n, n);
        let mut sum = term.clone();
        for k in 1..terms {
            term = &term * a / c(k as f64);
            sum += &term;
        }
        sum
    }

    fn sample_matrix(n: usize, scale: f64) -> CMatrix {
        CMatrix::from_fn(n, n, |i, j| {
            let x = ((i * 7 + j * 3) as f64 * 0.37).sin();
            let y = ((i * 5 + j * 11) as f64 * 0.23).cos();
            Complex64::new(x, y) * scale
        })
    }

    #[test]
    fn expm_matches_taylor_for_each_pade_degree() {
        for scale in [1e-3, 5e-2, 0.2, 0.5, 1.0] {
            let a = sample_matrix(5, scale);
            let diff = max_abs_diff(&expm(&a), &taylor_expm(&a, 60));
            assert!(diff < 1e-12, "scale {scale}: {diff}");
        }
    }

    #[test]
    fn expm_scaling_and_squaring_large_norm() {
        // Anti-Hermitian input keeps exp well conditioned while the norm is
        // far above the largest Padé threshold.
        let b = sample_matrix(6, 4.0);
        let a = &b - b.adjoint();
        assert!(norm_one(&a) > 20.0);
        let e = expm(&a);
        let prod = &e * expm(&(-&a));
        assert!(max_abs_diff(&prod, &CMatrix::identity(6, 6)) < 1e-12);
        let mut reference = taylor_expm(&(&a / c(64.0)), 40);
        for _ in 0..6 {
            reference = &reference * &reference;
        }
        assert!(max_abs_diff(&e, &reference) < 1e-11);
    }

    #[test]
    fn expm_diagonal_fast_path() {
        let a = CMatrix::from_diagonal(&CVector::from_vec(vec![c(-0.5), I * 2.0, c(3.0)]));
        let e = expm(&a);
        assert!((e[(0, 0)] - c((-0.5f64).exp())).norm() < 1e-15);
        assert!((e[(1, 1)] - (I * 2.0).exp()).norm() < 1e-15);
        assert_eq!(e[(0, 1)], ZERO);
    }

    #[test]
    fn expm_of_antihermitian_is_unitary() {
        let h = hermitize(&sample_matrix(4, 3.0));
        let u = expm(&(h * -I));
        assert!(unitarity_error(&u) < 1e-12);
    }

    #[test]
    fn vectorize_round_trip_is_column_stacking() {
        let m = CMatrix::from_fn(2, 2, |i, j| c((i + 2 * j) as f64));
        let v = vectorize(&m);
        assert_eq!(v[1], c(1.0)); // entry (1, 0)
        assert_eq!(v[2], c(2.0)); // entry (0, 1)
        assert_eq!(unvectorize(&v, 2), m);
    }
}
