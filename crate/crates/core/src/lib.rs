// Copyright 2026 The quditfid Authors
// SPDX-License-Identifier: Apache-2.0

//! Average gate infidelity of open qudits and qubit ensembles.
//!
//! The crate simulates Lindblad dynamics of `d`-level systems, extracts
//! average gate infidelities exactly (superoperators), to first order
//! (Kraus operators) and by Haar sampling, and compares them with the
//! closed-form linear-in-`gamma t` slopes of [`analytic`]. [`pulses`]
//! synthesises ladder-control gates with GRAPE for gate-dependence studies.

pub mod analytic;
pub mod channels;
pub mod density;
pub mod error;
pub mod fidelity;
pub mod fitting;
pub mod lindblad;
pub mod linalg;
pub mod operators;
pub mod pulses;

pub use error::{Error, Result};
