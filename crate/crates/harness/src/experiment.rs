// Copyright 2026 The quditfid Authors
// SPDX-License-Identifier: Apache-2.0

//! Execution of an [`ExperimentSpec`]: simulated AGI per `gamma t`, the
//! first-order prediction next to it, and one slope fit per
//! (system size, gate) group.

use std::cmp::Ordering;
use std::path::{Path, PathBuf};

use quditfid::analytic::{c_general, c_heterogeneous};
use quditfid::channels::kraus_multi;
use quditfid::fidelity::{agi_exact, agi_kraus, HaarSampler};
use quditfid::fitting::{fit_slope, relative_deviation};
use quditfid::lindblad::{liouvillian, propagate};
use quditfid::operators::{NoiseModel, Operator};
use quditfid::pulses::{
    grape_optimize, schedule_to_propagator, schedule_unitary, ControlBasis, GrapeOptions,
    PulseSchedule, GRADIENT_METHOD,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{HarnessError, Result};
use crate::output::{write_csv, write_json};
use crate::spec::{
    ExperimentSpec, GammaGrid, GateReference, GateSpec, GrapeSettings, SystemKind,
    EXACT_DIM_CEILING,
};

pub const METHOD_EXACT: &str = "exact-superoperator";
pub const METHOD_KRAUS: &str = "kraus-first-order";
pub const FLAG_GRAPE_UNCONVERGED: &str = "grape-unconverged";

/// One simulated point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub system: &'static str,
    /// Qudit dimension or number of qubits.
    pub size: usize,
    pub dim: usize,
    pub channel: &'static str,
    pub gate: String,
    pub gamma_t: f64,
    pub agi_exact: f64,
    pub agi_linear: f64,
    /// `1 - agi_exact / agi_linear`; empty where the prediction is zero.
    pub relative_deviation: Option<f64>,
    pub method: &'static str,
    pub flag: String,
}

/// Slope fit of one (size, gate) group.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitSummary {
    pub system: &'static str,
    pub size: usize,
    pub dim: usize,
    pub channel: &'static str,
    pub gate: String,
    pub method: &'static str,
    pub slope_fit: f64,
    pub slope_theory: f64,
    /// `1 - slope_fit / slope_theory`.
    pub relative_deviation: f64,
    pub one_minus_r2: f64,
    pub n_points: usize,
    pub gamma_t_min: f64,
    pub gamma_t_max: f64,
    pub flag: String,
    /// Noiseless control error of the synthesised gate, if any.
    pub grape_infidelity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub name: String,
    pub seed: u64,
    pub system: &'static str,
    pub sizes: Vec<usize>,
    pub channel: &'static str,
    pub gates: String,
    pub grid: GammaGrid,
    pub exact_dim_ceiling: usize,
    /// Methods that produced at least one row.
    pub methods: Vec<&'static str>,
    pub grape: Option<GrapeReport>,
    pub fits: Vec<FitSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrapeReport {
    pub settings: GrapeSettings,
    pub gradient_method: &'static str,
    pub gates_attempted: usize,
    pub gates_unconverged: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub rows: Vec<Row>,
    pub summary: ExperimentSummary,
}

impl ExperimentOutput {
    pub fn fits(&self) -> &[FitSummary] {
        &self.summary.fits
    }

    /// Writes `<dir>/<name>.csv` and `<dir>/<name>.json`; returns both paths.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let csv = dir.join(format!("{}.csv", self.summary.name));
        let json = dir.join(format!("{}.json", self.summary.name));
        write_csv(&csv, &self.rows)?;
        write_json(&json, &self.summary)?;
        Ok((csv, json))
    }
}

struct WorkItem {
    size: usize,
    gate: Option<usize>,
}

struct ItemResult {
    rows: Vec<Row>,
    fit: FitSummary,
}

/// A target gate, realised either trivially or by a pulse schedule.
enum Realisation {
    Identity,
    Pulsed {
        basis: ControlBasis,
        schedule: PulseSchedule,
        reference: Operator,
        infidelity: f64,
        converged: bool,
    },
}

fn gate_label(gate: Option<usize>) -> String {
    match gate {
        None => "identity".to_string(),
        Some(g) => format!("cue-{g:05}"),
    }
}

/// Seed for GRAPE initialisation of gate `g`, decorrelated from the
/// gate-sampling stream.
fn grape_seed(seed: u64, d: usize, g: usize) -> u64 {
    seed ^ ((d as u64) << 40) ^ (g as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn realise(spec: &ExperimentSpec, size: usize, gate: Option<usize>) -> Result<Realisation> {
    let (g, gate_seed) = match (gate, &spec.gates) {
        (None, _) => return Ok(Realisation::Identity),
        (Some(g), GateSpec::Cue { seed, .. }) => (g, *seed),
        (Some(_), GateSpec::Identity) => unreachable!("identity specs have no gate index"),
    };
    let d = size;
    let target = HaarSampler::new(d, gate_seed).split(g as u64).unitary();
    let basis = ControlBasis::ladder(d)?;
    let opts = GrapeOptions {
        n_slots: spec.grape.n_slots(d),
        total_time: spec.grape.total_time,
        max_iters: spec.grape.max_iters,
        goal_infidelity: spec.grape.goal_infidelity,
        seed: grape_seed(spec.seed, d, g),
        restarts: spec.grape.restarts,
        ..GrapeOptions::default()
    };
    let result = grape_optimize(&target, &basis, &opts)?;
    let reference = match spec.grape.reference {
        GateReference::Target => target,
        GateReference::Realised => schedule_unitary(&result.schedule, &basis)?,
    };
    Ok(Realisation::Pulsed {
        basis,
        schedule: result.schedule,
        reference,
        infidelity: result.infidelity,
        converged: result.converged,
    })
}

fn run_item(spec: &ExperimentSpec, item: &WorkItem) -> Result<ItemResult> {
    let system = spec.system;
    let size = item.size;
    let dim = system.hilbert_dim(size).expect("validated");
    let site_op = spec.channel.site_operator(system.site_dim(size))?;
    let noise = system.noise(size, &spec.channel)?;
    let slope_theory = match system {
        SystemKind::Qudit => c_general(&site_op),
        SystemKind::Qubits => {
            c_heterogeneous(&vec![NoiseModel::single(1.0, site_op.clone())?; size], 2)?
        }
    };
    let realisation = realise(spec, size, item.gate)?;
    let gate = gate_label(item.gate);
    let points = spec.grid.points();

    let method = if dim <= EXACT_DIM_CEILING { METHOD_EXACT } else { METHOD_KRAUS };
    let (flag, grape_infidelity) = match &realisation {
        Realisation::Pulsed { converged: false, infidelity, .. } => {
            (FLAG_GRAPE_UNCONVERGED.to_string(), Some(*infidelity))
        }
        Realisation::Pulsed { infidelity, .. } => (String::new(), Some(*infidelity)),
        Realisation::Identity => (String::new(), None),
    };

    let mut agis = Vec::with_capacity(points.len());
    match (&realisation, method) {
        (Realisation::Identity, METHOD_EXACT) => {
            let generator = liouvillian(&Operator::zeros(dim), &noise)?;
            for &gt in &points {
                let channel = propagate(&generator.scale(gt), 1.0)?;
                agis.push(agi_exact(&channel, &Operator::identity(dim))?);
            }
        }
        (Realisation::Identity, _) => {
            for &gt in &points {
                agis.push(agi_kraus(&kraus_multi(&noise, gt)?, dim)?);
            }
        }
        (
            Realisation::Pulsed {
                basis,
                schedule,
                reference,
                ..
            },
            _,
        ) => {
            let t = schedule.total_time();
            for &gt in &points {
                let channel = schedule_to_propagator(schedule, basis, &noise.scaled(gt / t)?)?;
                agis.push(agi_exact(&channel, reference)?);
            }
        }
    }

    let rows: Vec<Row> = points
        .iter()
        .zip(&agis)
        .map(|(&gt, &agi)| {
            let linear = slope_theory * gt;
            Row {
                system: system.label(),
                size,
                dim,
                channel: spec.channel.label(),
                gate: gate.clone(),
                gamma_t: gt,
                agi_exact: agi,
                agi_linear: linear,
                relative_deviation: relative_deviation(agi, linear).ok(),
                method,
                flag: flag.clone(),
            }
        })
        .collect();

    let pts: Vec<(f64, f64)> = points.iter().copied().zip(agis.iter().copied()).collect();
    let fit = fit_slope(&pts)?;
    let fit = FitSummary {
        system: system.label(),
        size,
        dim,
        channel: spec.channel.label(),
        gate,
        method,
        slope_fit: fit.slope_c,
        slope_theory,
        relative_deviation: relative_deviation(fit.slope_c, slope_theory)
            .map_err(HarnessError::from)?,
        one_minus_r2: fit.one_minus_r2,
        n_points: fit.n_points,
        gamma_t_min: fit.gamma_t_range.0,
        gamma_t_max: fit.gamma_t_range.1,
        flag,
        grape_infidelity,
    };
    Ok(ItemResult { rows, fit })
}

fn row_order(a: &Row, b: &Row) -> Ordering {
    (a.size, &a.gate)
        .cmp(&(b.size, &b.gate))
        .then(a.gamma_t.total_cmp(&b.gamma_t))
}

/// Runs every (size, gate) work item on the rayon pool and merges the
/// results in sorted order, so the output does not depend on scheduling.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    spec.validate()?;
    let gates: Vec<Option<usize>> = match spec.gates {
        GateSpec::Identity => vec![None],
        GateSpec::Cue { n_gates, .. } => (0..n_gates).map(Some).collect(),
    };
    let items: Vec<WorkItem> = spec
        .sizes
        .iter()
        .flat_map(|&size| gates.iter().map(move |&gate| WorkItem { size, gate }))
        .collect();
    let results: Vec<ItemResult> = items
        .par_iter()
        .map(|item| run_item(spec, item))
        .collect::<Result<_>>()?;

    let mut rows: Vec<Row> = results.iter().flat_map(|r| r.rows.iter().cloned()).collect();
    rows.sort_by(row_order);
    let mut fits: Vec<FitSummary> = results.into_iter().map(|r| r.fit).collect();
    fits.sort_by(|a, b| (a.size, &a.gate).cmp(&(b.size, &b.gate)));

    let mut methods: Vec<&'static str> = fits.iter().map(|f| f.method).collect();
    methods.sort_unstable();
    methods.dedup();

    let grape = match spec.gates {
        GateSpec::Identity => None,
        GateSpec::Cue { .. } => Some(GrapeReport {
            settings: spec.grape,
            gradient_method: GRADIENT_METHOD,
            gates_attempted: fits.len(),
            gates_unconverged: fits.iter().filter(|f| !f.flag.is_empty()).count(),
        }),
    };
    let gates_label = match spec.gates {
        GateSpec::Identity => "identity (H = 0)".to_string(),
        GateSpec::Cue { n_gates, seed } => format!("cue(n_gates = {n_gates}, seed = {seed})"),
    };
    Ok(ExperimentOutput {
        rows,
        summary: ExperimentSummary {
            name: spec.name.clone(),
            seed: spec.seed,
            system: spec.system.label(),
            sizes: spec.sizes.clone(),
            channel: spec.channel.label(),
            gates: gates_label,
            grid: spec.grid,
            exact_dim_ceiling: EXACT_DIM_CEILING,
            methods,
            grape,
            fits,
        },
    })
}
