// Copyright 2026 The quditfid Authors
// SPDX-License-Identifier: Apache-2.0

//! Simulated `c_d / c_{b,n}` for `d = 2^n` next to the closed form.

use std::path::{Path, PathBuf};

use quditfid::analytic::{critical_ratio, naive_ratio};
use serde::Serialize;

use crate::error::{HarnessError, Result};
use crate::experiment::run_experiment;
use crate::output::{write_csv, write_json};
use crate::spec::{ExperimentSpec, GammaGrid, Scale, SystemKind, EXACT_DIM_CEILING};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalRow {
    pub n: usize,
    pub d: usize,
    pub c_qudit_fit: f64,
    pub c_qubits_fit: f64,
    pub ratio_simulated: f64,
    pub ratio_analytic: f64,
    /// `d^2 / log2 d`, printed for comparison only.
    pub ratio_naive: f64,
    /// `ratio_simulated / ratio_analytic - 1`.
    pub relative_error: f64,
    pub method_qudit: &'static str,
    pub method_qubits: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalOutput {
    pub name: String,
    pub seed: u64,
    pub grid: GammaGrid,
    pub exact_dim_ceiling: usize,
    pub rows: Vec<CriticalRow>,
}

impl CriticalOutput {
    pub fn row(&self, n: usize) -> Option<&CriticalRow> {
        self.rows.iter().find(|r| r.n == n)
    }

    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let csv = dir.join(format!("{}.csv", self.name));
        let json = dir.join(format!("{}.json", self.name));
        write_csv(&csv, &self.rows)?;
        write_json(&json, self)?;
        Ok((csv, json))
    }
}

pub fn default_n_list(scale: Scale) -> Vec<usize> {
    match scale {
        Scale::Desk | Scale::Paper => (1..=6).collect(),
    }
}

/// Fits the single-qudit slope at `d = 2^n` and the `n`-qubit slope on the
/// same grid and divides them. Systems above
/// [`EXACT_DIM_CEILING`] use the first-order Kraus channel, which the
/// `method_*` columns record.
pub fn critical_curve_experiment(n_list: &[usize], grid: GammaGrid, seed: u64) -> Result<CriticalOutput> {
    if n_list.iter().any(|&n| n == 0 || n > 12) {
        return Err(HarnessError::InvalidSpec("n must lie in 1..=12".into()));
    }
    let dims: Vec<usize> = n_list.iter().map(|&n| 1usize << n).collect();
    let mut qudit = ExperimentSpec::slopes_qudit(Scale::Desk, seed);
    qudit.name = "critical-qudit".into();
    qudit.sizes = dims.clone();
    qudit.grid = grid;
    let mut qubits = ExperimentSpec::slopes_qubits(Scale::Desk, seed);
    qubits.name = "critical-qubits".into();
    qubits.sizes = n_list.to_vec();
    qubits.grid = grid;
    debug_assert_eq!(qubits.system, SystemKind::Qubits);

    let a = run_experiment(&qudit)?;
    let b = run_experiment(&qubits)?;
    let mut rows = Vec::new();
    for (&n, &d) in n_list.iter().zip(&dims) {
        let fa = a.fits().iter().find(|f| f.size == d).expect("one fit per size");
        let fb = b.fits().iter().find(|f| f.size == n).expect("one fit per size");
        let ratio = fa.slope_fit / fb.slope_fit;
        let analytic = critical_ratio(d as f64)?;
        rows.push(CriticalRow {
            n,
            d,
            c_qudit_fit: fa.slope_fit,
            c_qubits_fit: fb.slope_fit,
            ratio_simulated: ratio,
            ratio_analytic: analytic,
            ratio_naive: naive_ratio(d as f64)?,
            relative_error: ratio / analytic - 1.0,
            method_qudit: fa.method,
            method_qubits: fb.method,
        });
    }
    rows.sort_by_key(|r| r.n);
    Ok(CriticalOutput {
        name: "critical-curve".into(),
        seed,
        grid,
        exact_dim_ceiling: EXACT_DIM_CEILING,
        rows,
    })
}
