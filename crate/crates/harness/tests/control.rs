// Copyright 2026 The quditfid Authors
// SPDX-License-Identifier: Apache-2.0

//! Idle (H = 0) dephasing runs against the closed-form channel.
//!
//! With no drive, `J_z` dephasing multiplies `rho_jk` by
//! `exp(-gamma t (m_j - m_k)^2 / 2)`, so the process fidelity is the mean of
//! those factors over all `(j, k)`.

use quditfid::fitting::fit_slope;
use quditfid_harness::spec::{ExperimentSpec, GammaGrid, Scale};
use quditfid_harness::run_experiment;

fn closed_form_agi(d: usize, gt: f64) -> f64 {
    let m = |j: usize| (d as f64 - 1.0) / 2.0 - j as f64;
    let mut sum = 0.0;
    for j in 0..d {
        for k in 0..d {
            sum += (-gt * (m(j) - m(k)).powi(2) / 2.0).exp();
        }
    }
    let df = d as f64;
    let fp = sum / (df * df);
    1.0 - (df * fp + 1.0) / (df + 1.0)
}

#[test]
fn idle_rows_and_fits_match_closed_form() {
    let mut spec = ExperimentSpec::slopes_qudit(Scale::Desk, 1);
    spec.grid = GammaGrid::new(1e-5, 1e-3, 9).unwrap();
    let out = run_experiment(&spec).unwrap();
    for row in &out.rows {
        let want = closed_form_agi(row.dim, row.gamma_t);
        assert!((row.agi_exact - want).abs() <= 1e-12 * want.max(1e-300) + 1e-16, "d={} gt={}", row.dim, row.gamma_t);
    }
    for fit in out.fits() {
        let points: Vec<(f64, f64)> = spec
            .grid
            .points()
            .into_iter()
            .map(|gt| (gt, closed_form_agi(fit.dim, gt)))
            .collect();
        let oracle = fit_slope(&points).unwrap().slope_c;
        assert!((fit.slope_fit / oracle - 1.0).abs() < 1e-9, "d={}", fit.dim);
        // The departure from the linear law stays small against the
        // curvature of the closed form at the top of the grid.
        let curvature = 1.0 - closed_form_agi(fit.dim, 1e-3) / (1e-3 * fit.slope_theory);
        assert!(fit.relative_deviation.abs() <= curvature.abs());
    }
}
