// Copyright 2026 The quditfid Authors
// SPDX-License-Identifier: Apache-2.0

//! Experiment runner for `quditfid`: declarative specs, CSV/JSON output,
//! gate-dependence statistics, the critical-ratio curve and the platform
//! advantage report.

pub mod critical;
pub mod error;
pub mod experiment;
pub mod gate_dependence;
pub mod output;
pub mod platforms;
pub mod spec;

pub use error::{HarnessError, Result};
pub use experiment::{run_experiment, ExperimentOutput};
pub use spec::{ExperimentSpec, Scale};
