// Copyright 2026 The quditfid Authors
// SPDX-License-Identifier: Apache-2.0

//! Spread of fitted slopes over GRAPE-synthesised random gates.

use std::path::{Path, PathBuf};

use quditfid::fitting::{deviation_stats, DeviationStats};
use serde::Serialize;

use crate::error::{HarnessError, Result};
use crate::experiment::{run_experiment, ExperimentOutput};
use crate::output::{write_csv, write_json};
use crate::spec::{ExperimentSpec, GateSpec};

/// Deviation distribution of one dimension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionStats {
    pub d: usize,
    /// Gates whose pulses met the GRAPE goal; only these enter the stats.
    pub n_converged: usize,
    pub n_failed: usize,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
    pub p05: f64,
    pub p25: f64,
    pub median: f64,
    pub p75: f64,
    pub p95: f64,
    pub max_abs: f64,
}

impl DimensionStats {
    fn new(d: usize, n_failed: usize, s: &DeviationStats) -> Self {
        Self {
            d,
            n_converged: s.count,
            n_failed,
            mean: s.mean,
            std: s.std,
            min: s.min,
            max: s.max,
            p05: s.p05,
            p25: s.p25,
            median: s.median,
            p75: s.p75,
            p95: s.p95,
            max_abs: s.max_abs(),
        }
    }

    /// Full range `max - min`, the width compared across dimensions.
    pub fn width(&self) -> f64 {
        self.max - self.min
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateDependenceOutput {
    pub experiment: ExperimentOutput,
    pub stats: Vec<DimensionStats>,
}

impl GateDependenceOutput {
    pub fn stats_for(&self, d: usize) -> Option<&DimensionStats> {
        self.stats.iter().find(|s| s.d == d)
    }

    /// Writes the per-point CSV and JSON of the experiment plus
    /// `<name>-fits.csv` (one row per gate) and `<name>-stats.csv`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let (csv, json) = self.experiment.write(dir)?;
        let name = &self.experiment.summary.name;
        let fits = dir.join(format!("{name}-fits.csv"));
        let stats = dir.join(format!("{name}-stats.csv"));
        write_csv(&fits, self.experiment.fits())?;
        write_csv(&stats, &self.stats)?;
        let stats_json = dir.join(format!("{name}-stats.json"));
        write_json(&stats_json, &self.stats)?;
        Ok(vec![csv, json, fits, stats, stats_json])
    }
}

/// Runs `spec` (which must use random gates) and summarises per dimension.
pub fn gate_dependence_experiment(spec: &ExperimentSpec) -> Result<GateDependenceOutput> {
    match spec.gates {
        GateSpec::Cue { n_gates, .. } if n_gates >= 2 => {}
        _ => {
            return Err(HarnessError::InvalidSpec(
                "gate dependence needs at least 2 random gates".into(),
            ))
        }
    }
    let experiment = run_experiment(spec)?;
    let mut stats = Vec::new();
    for &d in &spec.sizes {
        let fits: Vec<_> = experiment.fits().iter().filter(|f| f.size == d).collect();
        let good: Vec<f64> = fits
            .iter()
            .filter(|f| f.flag.is_empty())
            .map(|f| f.relative_deviation)
            .collect();
        let n_failed = fits.len() - good.len();
        if good.len() < 2 {
            return Err(HarnessError::InvalidSpec(format!(
                "only {} of {} gates converged at d = {d}",
                good.len(),
                fits.len()
            )));
        }
        stats.push(DimensionStats::new(d, n_failed, &deviation_stats(&good)?));
    }
    Ok(GateDependenceOutput { experiment, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::Scale;

    #[test]
    fn small_run_stays_in_band() {
        let mut spec = ExperimentSpec::gate_dependence(Scale::Desk, 9);
        spec.sizes = vec![2, 3];
        spec.gates = GateSpec::Cue { n_gates: 4, seed: 9 };
        let out = gate_dependence_experiment(&spec).unwrap();
        assert_eq!(out.stats.len(), 2);
        for s in &out.stats {
            assert_eq!(s.n_converged + s.n_failed, 4);
            assert!(s.max_abs < 1e-2, "d={} max |dev| = {}", s.d, s.max_abs);
        }
    }

    #[test]
    fn identity_gates_are_rejected() {
        let spec = ExperimentSpec::slopes_qudit(Scale::Desk, 0);
        assert!(gate_dependence_experiment(&spec).is_err());
    }
}
