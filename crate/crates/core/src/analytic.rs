// Copyright 2026 The quditfid Authors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form first-order AGI slopes and the qudit-vs-qubit critical ratio.
//!
//! Every slope is the coefficient `c` in `AGI = c * gamma * t + O((gamma t)^2)`.

use crate::error::{Error, Result};
use crate::operators::{NoiseModel, Operator};

/// Single qudit under pure dephasing `L = J_z`: `d (d - 1) / 12`.
pub fn c_qudit_dephasing(d: usize) -> f64 {
    let d = d as f64;
    d * (d - 1.0) / 12.0
}

/// Arbitrary collapse operator on one qudit:
/// `(Tr(L^dag L) - |Tr L|^2 / d) / (d + 1)`.
pub fn c_general(l: &Operator) -> f64 {
    let d = l.dim() as f64;
    (l.gram().trace().re - l.trace().norm_sqr() / d) / (d + 1.0)
}

/// `n` identically dephasing qubits: `n 2^n / (4 (2^n + 1))`.
pub fn c_qubits_dephasing(n: usize) -> f64 {
    let dim = 2f64.powi(n as i32);
    n as f64 * dim / (4.0 * (dim + 1.0))
}

/// `n_sites` qudits of dimension `d`, identical dephasing:
/// `N d^N (d^2 - 1) / (12 (d^N + 1))`.
pub fn c_qudits_dephasing(d: usize, n_sites: usize) -> f64 {
    let df = d as f64;
    let dn = df.powi(n_sites as i32);
    n_sites as f64 * dn * (df * df - 1.0) / (12.0 * (dn + 1.0))
}

/// Sites with individual noise: `d^(N-1) / (d^N + 1) * sum_k gamma_k (Tr(L_k^dag L_k) - |Tr L_k|^2 / d)`.
///
/// `noise_per_site[k]` holds the single-site operators (dimension `d`) of
/// site `k`; `N = noise_per_site.len()`. The result multiplies `t`, since the
/// rates are carried by the noise models.
pub fn c_heterogeneous(noise_per_site: &[NoiseModel], d: usize) -> Result<f64> {
    let n_sites = noise_per_site.len();
    if n_sites == 0 {
        return Err(Error::InvalidParameter("no sites given".into()));
    }
    let df = d as f64;
    let mut sum = 0.0;
    for site in noise_per_site {
        for term in site.terms() {
            if term.op.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: term.op.dim(),
                });
            }
            let op = &term.op;
            sum += term.rate * (op.gram().trace().re - op.trace().norm_sqr() / df);
        }
    }
    let dn = df.powi(n_sites as i32);
    Ok(df.powi(n_sites as i32 - 1) / (dn + 1.0) * sum)
}

/// `c_d / c_{b,n} = (d^2 - 1) / (3 log2 d)` for `d = 2^n`; real `d > 1`
/// is accepted as the continuous curve.
pub fn critical_ratio(d: f64) -> Result<f64> {
    if !(d > 1.0) || !d.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "critical ratio needs d > 1, got {d}"
        )));
    }
    Ok((d * d - 1.0) / (3.0 * d.log2()))
}

/// The intuitive `d^2 / log2 d` scaling, kept for comparison.
pub fn naive_ratio(d: f64) -> Result<f64> {
    if !(d > 1.0) || !d.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "naive ratio needs d > 1, got {d}"
        )));
    }
    Ok(d * d / d.log2())
}

#[derive(Debug, Clone, PartialEq)]
pub enum SystemKind {
    Qudit { d: usize },
    Qubits { n: usize },
    Qudits { d: usize, n_sites: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChannelKind {
    Dephasing,
    /// Single-site collapse operator, applied identically on every site.
    General(Operator),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlopePrediction {
    pub system: SystemKind,
    pub channel: ChannelKind,
    pub slope_c: f64,
}

impl SlopePrediction {
    pub fn new(system: SystemKind, channel: ChannelKind) -> Result<Self> {
        let slope_c = match (&system, &channel) {
            (SystemKind::Qudit { d }, ChannelKind::Dephasing) => c_qudit_dephasing(*d),
            (SystemKind::Qubits { n }, ChannelKind::Dephasing) => c_qubits_dephasing(*n),
            (SystemKind::Qudits { d, n_sites }, ChannelKind::Dephasing) => {
                c_qudits_dephasing(*d, *n_sites)
            }
            (system, ChannelKind::General(l)) => {
                let (d, n_sites) = match *system {
                    SystemKind::Qudit { d } => (d, 1),
                    SystemKind::Qubits { n } => (2, n),
                    SystemKind::Qudits { d, n_sites } => (d, n_sites),
                };
                if l.dim() != d {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: l.dim(),
                    });
                }
                let site = NoiseModel::single(1.0, l.clone())?;
                c_heterogeneous(&vec![site; n_sites], d)?
            }
        };
        Ok(Self {
            system,
            channel,
            slope_c,
        })
    }
}

/// Exact rational versions of the dephasing slopes.
pub mod exact {
    use num_rational::Ratio;

    pub type Q = Ratio<i128>;

    pub fn c_qudit_dephasing(d: i128) -> Q {
        Q::new(d * (d - 1), 12)
    }

    pub fn c_qubits_dephasing(n: u32) -> Q {
        let dim = 2i128.pow(n);
        Q::new(n as i128 * dim, 4 * (dim + 1))
    }

    pub fn c_qudits_dephasing(d: i128, n_sites: u32) -> Q {
        let dn = d.pow(n_sites);
        Q::new(n_sites as i128 * dn * (d * d - 1), 12 * (dn + 1))
    }

    /// `(4^n - 1) / (3 n)`.
    pub fn critical_ratio_pow2(n: u32) -> Q {
        Q::new(4i128.pow(n) - 1, 3 * n as i128)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{spin_plus, spin_xy, spin_z, NoiseTerm};
    use num_rational::Ratio;

    #[test]
    fn qudit_dephasing_values() {
        assert_eq!(c_qudit_dephasing(1), 0.0);
        assert!((c_qudit_dephasing(2) - 1.0 / 6.0).abs() < 1e-16);
        assert!((c_qudit_dephasing(22) - 38.5).abs() < 1e-13);
    }

    #[test]
    fn general_channel_values() {
        for d in 2..=12 {
            let jz = spin_z(d).unwrap();
            assert!((c_general(&jz) - c_qudit_dephasing(d)).abs() < 1e-12);
            assert!((c_general(&spin_plus(d).unwrap()) - 2.0 * c_general(&jz)).abs() < 1e-11);
            assert!(c_general(&Operator::identity(d)).abs() < 1e-13);
        }
    }

    #[test]
    fn qubit_and_qudit_ensemble_values() {
        assert_eq!(c_qubits_dephasing(0), 0.0);
        assert!((c_qubits_dephasing(1) - 1.0 / 6.0).abs() < 1e-16);
        assert!((c_qubits_dephasing(3) - 2.0 / 3.0).abs() < 1e-15);
        assert!((c_qudits_dephasing(3, 2) - 1.2).abs() < 1e-14);
        for d in 2..=10 {
            assert!((c_qudits_dephasing(d, 1) - c_qudit_dephasing(d)).abs() < 1e-13);
        }
    }

    #[test]
    fn rational_identities() {
        for n in 0..=10u32 {
            assert_eq!(exact::c_qudits_dephasing(2, n), exact::c_qubits_dephasing(n));
        }
        for n in 1..=6u32 {
            let d = 2i128.pow(n);
            let ratio = exact::c_qudit_dephasing(d) / exact::c_qubits_dephasing(n);
            assert_eq!(ratio, exact::critical_ratio_pow2(n));
            let float = critical_ratio(d as f64).unwrap();
            let q = exact::critical_ratio_pow2(n);
            assert!((float - *q.numer() as f64 / *q.denom() as f64).abs() < 1e-12 * float);
        }
        assert_eq!(exact::critical_ratio_pow2(6), Ratio::new(455, 2));
    }

    #[test]
    fn float_forms_match_rationals() {
        let to_f = |q: exact::Q| *q.numer() as f64 / *q.denom() as f64;
        for n in 0..=10u32 {
            assert!((c_qubits_dephasing(n as usize) - to_f(exact::c_qubits_dephasing(n))).abs() < 1e-14);
        }
        for d in 1..=30i128 {
            assert!((c_qudit_dephasing(d as usize) - to_f(exact::c_qudit_dephasing(d))).abs() < 1e-12);
        }
    }

    #[test]
    fn critical_ratio_table_values() {
        for (d, expected) in [(2.0, 1.0), (4.0, 2.5), (8.0, 7.0), (64.0, 227.5)] {
            assert!((critical_ratio(d).unwrap() - expected).abs() < 1e-12);
        }
        assert!((naive_ratio(8.0).unwrap() - 64.0 / 3.0).abs() < 1e-12);
        assert!(critical_ratio(1.0).is_err());
        let big: f64 = 1e6;
        let asym = critical_ratio(big).unwrap() / (big * big / (3.0 * big.log2()));
        assert!((asym - 1.0).abs() < 1e-10);
    }

    #[test]
    fn heterogeneous_reductions() {
        let sz = spin_z(2).unwrap();
        let site = |g: f64| NoiseModel::single(g, sz.clone()).unwrap();
        let same = c_heterogeneous(&[site(0.7), site(0.7), site(0.7)], 2).unwrap();
        assert!((same - 0.7 * c_qubits_dephasing(3)).abs() < 1e-14);
        let (jx, _) = spin_xy(3).unwrap();
        let one = c_heterogeneous(&[NoiseModel::single(0.4, jx.clone()).unwrap()], 3).unwrap();
        assert!((one - 0.4 * c_general(&jx)).abs() < 1e-14);
        assert!(c_heterogeneous(&[], 2).is_err());
        let wrong = NoiseModel::new(vec![NoiseTerm { rate: 1.0, op: jx }]).unwrap();
        assert!(c_heterogeneous(&[wrong], 2).is_err());
    }

    #[test]
    fn additivity_over_orthogonal_traceless_parts() {
        for d in 2..=8 {
            let (jx, jy) = spin_xy(d).unwrap();
            let jz = spin_z(d).unwrap();
            let sum = &(&jx + &jy) + &jz;
            let parts = c_general(&jx) + c_general(&jy) + c_general(&jz);
            assert!((c_general(&sum) - parts).abs() < 1e-11);
            assert!((c_general(&sum) - 3.0 * c_general(&jz)).abs() < 1e-11);
        }
    }

    #[test]
    fn slope_prediction_dispatch() {
        let p = SlopePrediction::new(SystemKind::Qubits { n: 3 }, ChannelKind::Dephasing).unwrap();
        assert!((p.slope_c - 2.0 / 3.0).abs() < 1e-15);
        let g = SlopePrediction::new(
            SystemKind::Qubits { n: 3 },
            ChannelKind::General(spin_z(2).unwrap()),
        )
        .unwrap();
        assert!((g.slope_c - p.slope_c).abs() < 1e-14);
        let q = SlopePrediction::new(
            SystemKind::Qudits { d: 3, n_sites: 2 },
            ChannelKind::General(spin_z(3).unwrap()),
        )
        .unwrap();
        assert!((q.slope_c - 1.2).abs() < 1e-13);
        assert!(SlopePrediction::new(
            SystemKind::Qudit { d: 3 },
            ChannelKind::General(spin_z(2).unwrap())
        )
        .is_err());
    }
}
