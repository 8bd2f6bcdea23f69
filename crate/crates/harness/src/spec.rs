// Copyright 2026 The quditfid Authors
// SPDX-License-Identifier: Apache-2.0

//! Declarative experiment descriptions and the desk/paper parameter presets.

use std::path::PathBuf;

use quditfid::operators::{spin_plus, spin_xy, spin_z, NoiseModel, Operator};
use serde::Serialize;

use crate::error::{HarnessError, Result};

/// Hilbert dimension up to which channels are propagated as dense
/// superoperators. A `d^2 x d^2` complex matrix at `d = 32` is 16 MiB; at
/// `d = 64` it would be 256 MiB per temporary.
pub const EXACT_DIM_CEILING: usize = 32;

/// Largest Hilbert dimension accepted at all (first-order Kraus path).
pub const KRAUS_DIM_CEILING: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    /// Reduced sizes that run in minutes on one core.
    Desk,
    /// Parameter ranges of the original study (cluster scale for GRAPE).
    Paper,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChannelSpec {
    Jz,
    Jx,
    Jplus,
    JxJyJz,
    /// `S_z` on every qubit of an ensemble.
    QubitEnsembleSz,
    /// User-supplied single-site collapse operator.
    Custom(Operator),
}

impl ChannelSpec {
    pub fn label(&self) -> &'static str {
        match self {
            ChannelSpec::Jz => "Jz",
            ChannelSpec::Jx => "Jx",
            ChannelSpec::Jplus => "Jplus",
            ChannelSpec::JxJyJz => "JxJyJz",
            ChannelSpec::QubitEnsembleSz => "qubit-ensemble-Sz",
            ChannelSpec::Custom(_) => "custom",
        }
    }

    /// Collapse operator acting on one site of dimension `d`.
    pub fn site_operator(&self, d: usize) -> Result<Operator> {
        Ok(match self {
            ChannelSpec::Jz => spin_z(d)?,
            ChannelSpec::Jx => spin_xy(d)?.0,
            ChannelSpec::Jplus => spin_plus(d)?,
            ChannelSpec::JxJyJz => {
                let (jx, jy) = spin_xy(d)?;
                &(&jx + &jy) + &spin_z(d)?
            }
            ChannelSpec::QubitEnsembleSz => {
                if d != 2 {
                    return Err(HarnessError::InvalidSpec(format!(
                        "qubit-ensemble-Sz needs d = 2, got {d}"
                    )));
                }
                spin_z(2)?
            }
            ChannelSpec::Custom(op) => {
                if op.dim() != d {
                    return Err(HarnessError::InvalidSpec(format!(
                        "custom operator has dimension {}, system site has {d}",
                        op.dim()
                    )));
                }
                op.clone()
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    /// One qudit of dimension `size`.
    Qudit,
    /// `size` qubits, each with its own copy of the collapse operator.
    Qubits,
}

impl SystemKind {
    pub fn label(self) -> &'static str {
        match self {
            SystemKind::Qudit => "qudit",
            SystemKind::Qubits => "qubits",
        }
    }

    pub fn site_dim(self, size: usize) -> usize {
        match self {
            SystemKind::Qudit => size,
            SystemKind::Qubits => 2,
        }
    }

    pub fn n_sites(self, size: usize) -> usize {
        match self {
            SystemKind::Qudit => 1,
            SystemKind::Qubits => size,
        }
    }

    /// Total Hilbert dimension, or `None` if it overflows.
    pub fn hilbert_dim(self, size: usize) -> Option<usize> {
        match self {
            SystemKind::Qudit => Some(size),
            SystemKind::Qubits => 1usize.checked_shl(size as u32).filter(|_| size < 63),
        }
    }

    /// Unit-rate noise model of the whole system.
    pub fn noise(self, size: usize, channel: &ChannelSpec) -> Result<NoiseModel> {
        let op = channel.site_operator(self.site_dim(size))?;
        Ok(match self {
            SystemKind::Qudit => NoiseModel::single(1.0, op)?,
            SystemKind::Qubits => NoiseModel::per_site(1.0, &op, size)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaGrid {
    pub min: f64,
    pub max: f64,
    pub n_points: usize,
}

impl GammaGrid {
    pub fn new(min: f64, max: f64, n_points: usize) -> Result<Self> {
        let grid = Self { min, max, n_points };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min >= 0.0) || !(self.max <= 1.0) || !(self.min < self.max) {
            return Err(HarnessError::InvalidSpec(format!(
                "gamma*t grid must satisfy 0 <= min < max <= 1, got [{}, {}]",
                self.min, self.max
            )));
        }
        if self.n_points < 2 {
            return Err(HarnessError::InvalidSpec(format!(
                "gamma*t grid needs at least 2 points, got {}",
                self.n_points
            )));
        }
        Ok(())
    }

    /// Uniformly spaced points including both ends.
    pub fn points(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.n_points - 1) as f64;
        (0..self.n_points)
            .map(|i| {
                if i + 1 == self.n_points {
                    self.max
                } else {
                    self.min + step * i as f64
                }
            })
            .collect()
    }
}

/// Gate against which a pulsed channel's AGI is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum GateReference {
    /// The sampled target gate; residual control error stays in the AGI.
    Target,
    /// The noiseless unitary the pulses actually implement, which removes
    /// control error from the slopes.
    Realised,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrapeSettings {
    pub goal_infidelity: f64,
    pub max_iters: u64,
    pub restarts: usize,
    /// Total gate time; `gamma` is chosen as `gamma_t / total_time`.
    pub total_time: f64,
    pub reference: GateReference,
}

impl Default for GrapeSettings {
    fn default() -> Self {
        Self {
            goal_infidelity: 1e-6,
            max_iters: 3000,
            restarts: 3,
            total_time: 1.0,
            reference: GateReference::Target,
        }
    }
}

impl GrapeSettings {
    /// Slot count grows with the number of transitions to drive.
    pub fn n_slots(&self, d: usize) -> usize {
        (16 * d).max(32)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GateSpec {
    /// `H = 0`, target is the identity.
    Identity,
    /// `n_gates` Haar-random targets, each synthesised with GRAPE.
    Cue { n_gates: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub system: SystemKind,
    /// Qudit dimensions or qubit counts, depending on `system`.
    pub sizes: Vec<usize>,
    pub grid: GammaGrid,
    pub channel: ChannelSpec,
    pub gates: GateSpec,
    pub seed: u64,
    pub grape: GrapeSettings,
    pub output_path: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if self.name.is_empty()
            || !self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
        {
            return Err(HarnessError::InvalidSpec(format!(
                "experiment name `{}` must be a non-empty identifier",
                self.name
            )));
        }
        if self.sizes.is_empty() {
            return Err(HarnessError::InvalidSpec("no system sizes given".into()));
        }
        for &size in &self.sizes {
            let min = match self.system {
                SystemKind::Qudit => 2,
                SystemKind::Qubits => 1,
            };
            if size < min {
                return Err(HarnessError::InvalidSpec(format!(
                    "{} size {size} is below {min}",
                    self.system.label()
                )));
            }
            let dim = self.system.hilbert_dim(size).unwrap_or(usize::MAX);
            if dim > KRAUS_DIM_CEILING {
                return Err(HarnessError::DimensionCeiling {
                    dim,
                    ceiling: KRAUS_DIM_CEILING,
                    what: "any channel",
                });
            }
            if let GateSpec::Cue { .. } = self.gates {
                if self.system != SystemKind::Qudit {
                    return Err(HarnessError::InvalidSpec(
                        "random gates are synthesised for single qudits only".into(),
                    ));
                }
                if dim > EXACT_DIM_CEILING {
                    return Err(HarnessError::DimensionCeiling {
                        dim,
                        ceiling: EXACT_DIM_CEILING,
                        what: "pulsed gates",
                    });
                }
            }
        }
        if let GateSpec::Cue { n_gates, .. } = self.gates {
            if n_gates == 0 {
                return Err(HarnessError::InvalidSpec("n_gates must be positive".into()));
            }
        }
        // Exercise operator construction so bad channel/system pairs fail early.
        for &size in &self.sizes {
            self.channel.site_operator(self.system.site_dim(size))?;
        }
        Ok(())
    }

    fn base(name: &str, system: SystemKind, sizes: Vec<usize>, grid: GammaGrid, seed: u64) -> Self {
        Self {
            name: name.to_string(),
            system,
            sizes,
            grid,
            channel: match system {
                SystemKind::Qudit => ChannelSpec::Jz,
                SystemKind::Qubits => ChannelSpec::QubitEnsembleSz,
            },
            gates: GateSpec::Identity,
            seed,
            grape: GrapeSettings::default(),
            output_path: None,
        }
    }

    /// Pure dephasing of single qudits, even `d`.
    pub fn slopes_qudit(scale: Scale, seed: u64) -> Self {
        let d_max = match scale {
            Scale::Desk => 12,
            Scale::Paper => 22,
        };
        let grid = GammaGrid { min: 0.0, max: 1e-4, n_points: 11 };
        Self::base("slopes-qudit", SystemKind::Qudit, (2..=d_max).step_by(2).collect(), grid, seed)
    }

    /// Pure dephasing of qubit ensembles.
    pub fn slopes_qubits(scale: Scale, seed: u64) -> Self {
        let n_max = match scale {
            Scale::Desk => 5,
            Scale::Paper => 7,
        };
        let grid = GammaGrid { min: 0.0, max: 1e-4, n_points: 11 };
        Self::base("slopes-qubits", SystemKind::Qubits, (1..=n_max).collect(), grid, seed)
    }

    /// Departure from linearity over a wide `gamma t` range.
    pub fn deviation_sweep(scale: Scale, seed: u64) -> Self {
        let d_max = match scale {
            Scale::Desk => 12,
            Scale::Paper => 22,
        };
        let grid = GammaGrid { min: 0.0, max: 1e-2, n_points: 21 };
        Self::base("deviation-sweep", SystemKind::Qudit, (2..=d_max).step_by(2).collect(), grid, seed)
    }

    /// One of the channel-comparison runs; `channel` picks the operator.
    pub fn channels_compare(scale: Scale, seed: u64, channel: ChannelSpec) -> Self {
        let d_max = match scale {
            Scale::Desk => 12,
            Scale::Paper => 22,
        };
        let grid = GammaGrid { min: 0.0, max: 1e-4, n_points: 11 };
        let mut spec = Self::base(
            &format!("channels-compare-{}", channel.label()),
            SystemKind::Qudit,
            (2..=d_max).step_by(2).collect(),
            grid,
            seed,
        );
        spec.channel = channel;
        spec
    }

    /// GRAPE-synthesised random gates under dephasing.
    pub fn gate_dependence(scale: Scale, seed: u64) -> Self {
        let (dims, n_gates, n_points) = match scale {
            Scale::Desk => (vec![2, 3, 4], 200, 5),
            Scale::Paper => (vec![2, 3, 4, 5], 5000, 11),
        };
        let grid = GammaGrid { min: 1e-5, max: 1e-3, n_points };
        let mut spec = Self::base("gate-dependence", SystemKind::Qudit, dims, grid, seed);
        spec.gates = GateSpec::Cue { n_gates, seed };
        spec
    }
}
