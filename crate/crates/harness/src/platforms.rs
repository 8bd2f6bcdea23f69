// Copyright 2026 The quditfid Authors
// SPDX-License-Identifier: Apache-2.0

//! Platform coherence data and the single-qudit advantage report.
//!
//! The bundled table is `data/platforms.csv` with columns
//! `label,technology,kind,d,n,t2_s,gate_time_s,tau_tabulated,source,note`.
//! Times are in seconds; `inf` marks an unlimited `T2` and `unknown` a value
//! the source does not give. `tau_tabulated` is the order-of-magnitude
//! figure of merit quoted with the data; `note` carries source annotations
//! verbatim.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use quditfid::analytic::critical_ratio;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::output::{write_csv, write_json};

pub const BUNDLED_PLATFORMS: &str = include_str!("../data/platforms.csv");

/// Label of the default reference: a superconducting qubit platform.
pub const DEFAULT_REFERENCE: &str = "sc-kjaergaard-2020";

/// A possibly missing or unbounded non-negative quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Quantity {
    Value(f64),
    Infinite,
    Unknown,
}

impl Quantity {
    pub fn value(self) -> Option<f64> {
        match self {
            Quantity::Value(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Value(v) => write!(f, "{v:e}"),
            Quantity::Infinite => f.write_str("inf"),
            Quantity::Unknown => f.write_str("unknown"),
        }
    }
}

impl FromStr for Quantity {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" => Ok(Quantity::Infinite),
            "unknown" => Ok(Quantity::Unknown),
            t => {
                let v: f64 = t
                    .parse()
                    .map_err(|_| HarnessError::Platform(format!("cannot parse quantity `{t}`")))?;
                if !(v >= 0.0) || !v.is_finite() {
                    return Err(HarnessError::Platform(format!(
                        "quantity must be finite and non-negative, got `{t}`"
                    )));
                }
                Ok(Quantity::Value(v))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlatformKind {
    Qubit,
    Qudit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlatformRecord {
    pub label: String,
    pub technology: String,
    pub kind: PlatformKind,
    pub d: usize,
    pub n_sites: usize,
    pub t2: Quantity,
    pub gate_time: Quantity,
    pub tau_tabulated: Quantity,
    pub source: String,
    pub note: String,
}

/// Flat text form used for (de)serialisation.
#[derive(Debug, Serialize, Deserialize)]
struct RawRecord {
    label: String,
    technology: String,
    kind: PlatformKind,
    d: usize,
    n: usize,
    t2_s: String,
    gate_time_s: String,
    tau_tabulated: String,
    source: String,
    note: String,
}

impl PlatformRecord {
    /// `gate_time / T2`, missing unless both are known. An unlimited `T2`
    /// gives zero when the gate time is known.
    pub fn tau_computed(&self) -> Quantity {
        match (self.gate_time, self.t2) {
            (Quantity::Value(t), Quantity::Value(t2)) if t2 > 0.0 => Quantity::Value(t / t2),
            (Quantity::Value(_), Quantity::Infinite) => Quantity::Value(0.0),
            _ => Quantity::Unknown,
        }
    }

    pub fn tau(&self, source: TauSource) -> Quantity {
        match source {
            TauSource::Tabulated => self.tau_tabulated,
            TauSource::Computed => self.tau_computed(),
        }
    }

    fn from_raw(raw: RawRecord) -> Result<Self> {
        if raw.d < 2 || raw.n == 0 {
            return Err(HarnessError::Platform(format!(
                "{}: need d >= 2 and n >= 1",
                raw.label
            )));
        }
        Ok(Self {
            t2: raw.t2_s.parse()?,
            gate_time: raw.gate_time_s.parse()?,
            tau_tabulated: raw.tau_tabulated.parse()?,
            label: raw.label,
            technology: raw.technology,
            kind: raw.kind,
            d: raw.d,
            n_sites: raw.n,
            source: raw.source,
            note: raw.note,
        })
    }

    fn to_raw(&self) -> RawRecord {
        RawRecord {
            label: self.label.clone(),
            technology: self.technology.clone(),
            kind: self.kind,
            d: self.d,
            n: self.n_sites,
            t2_s: self.t2.to_string(),
            gate_time_s: self.gate_time.to_string(),
            tau_tabulated: self.tau_tabulated.to_string(),
            source: self.source.clone(),
            note: self.note.clone(),
        }
    }
}

pub fn parse_platforms(text: &str) -> Result<Vec<PlatformRecord>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    reader
        .deserialize::<RawRecord>()
        .map(|r| PlatformRecord::from_raw(r?))
        .collect()
}

pub fn serialize_platforms(records: &[PlatformRecord]) -> Result<String> {
    let raw: Vec<RawRecord> = records.iter().map(PlatformRecord::to_raw).collect();
    crate::output::to_csv_string(&raw)
}

pub fn bundled_platforms() -> Result<Vec<PlatformRecord>> {
    parse_platforms(BUNDLED_PLATFORMS)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum TauSource {
    /// Order-of-magnitude figure of merit given with the data.
    Tabulated,
    /// `gate_time / T2` from the listed times.
    Computed,
}

/// Real `d` where `(d^2 - 1) / (3 log2 d)` equals `ratio`, by bisection.
/// `None` if no `d >= 2` satisfies it (ratio below 1).
pub fn critical_crossing(ratio: f64) -> Result<Option<f64>> {
    if !(ratio >= 0.0) || !ratio.is_finite() {
        return Err(HarnessError::Platform(format!(
            "tau ratio must be finite and non-negative, got {ratio}"
        )));
    }
    let f = |d: f64| critical_ratio(d).map(|c| c - ratio);
    if f(2.0)? > 0.0 {
        return Ok(None);
    }
    let (mut lo, mut hi) = (2.0f64, 4.0f64);
    while f(hi)? < 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// Largest integer `d >= 2` with `critical_ratio(d) <= ratio`.
pub fn max_advantageous_dimension(ratio: f64) -> Result<Option<usize>> {
    Ok(critical_crossing(ratio)?.map(|x| (x + 1e-9).floor() as usize))
}

pub const VERDICT_ADVANTAGEOUS: &str = "advantageous";
pub const VERDICT_NOT_ADVANTAGEOUS: &str = "not advantageous";
pub const VERDICT_UNBOUNDED: &str = "advantageous (tau = 0, no finite dimension bound)";
pub const VERDICT_INSUFFICIENT: &str = "insufficient data";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdvantageRow {
    pub label: String,
    pub technology: String,
    pub d: usize,
    pub n: usize,
    pub t2_s: String,
    pub gate_time_s: String,
    pub tau_tabulated: String,
    pub tau_computed: String,
    pub tau_source: TauSource,
    /// `tau_reference / tau_platform`; empty when undefined or infinite.
    pub tau_ratio: Option<f64>,
    pub critical_ratio: f64,
    pub verdict: &'static str,
    pub crossing_d: Option<f64>,
    pub max_advantageous_d: Option<usize>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlatformReport {
    pub reference: String,
    pub reference_tau: f64,
    pub tau_source: TauSource,
    pub rows: Vec<AdvantageRow>,
}

impl PlatformReport {
    pub fn row(&self, label: &str) -> Option<&AdvantageRow> {
        self.rows.iter().find(|r| r.label == label)
    }

    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let csv = dir.join("platforms.csv");
        let json = dir.join("platforms.json");
        write_csv(&csv, &self.rows)?;
        write_json(&json, self)?;
        Ok((csv, json))
    }
}

/// Advantage of every qudit record over `reference` (a qubit platform).
pub fn platform_report(
    records: &[PlatformRecord],
    reference: &PlatformRecord,
    tau_source: TauSource,
) -> Result<PlatformReport> {
    let reference_tau = match reference.tau(tau_source) {
        Quantity::Value(v) if v > 0.0 => v,
        other => {
            return Err(HarnessError::Platform(format!(
                "reference {} needs a positive tau, has {other}",
                reference.label
            )))
        }
    };
    let mut rows = Vec::new();
    for r in records.iter().filter(|r| r.kind == PlatformKind::Qudit) {
        let crit = critical_ratio(r.d as f64)?;
        let (tau_ratio, verdict, crossing, max_d) = match r.tau(tau_source) {
            Quantity::Infinite => (None, VERDICT_UNBOUNDED, None, None),
            Quantity::Value(tau) if tau == 0.0 => (None, VERDICT_UNBOUNDED, None, None),
            Quantity::Value(tau) => {
                let ratio = reference_tau / tau;
                let verdict = if ratio > crit {
                    VERDICT_ADVANTAGEOUS
                } else {
                    VERDICT_NOT_ADVANTAGEOUS
                };
                let crossing = critical_crossing(ratio)?;
                (Some(ratio), verdict, crossing, max_advantageous_dimension(ratio)?)
            }
            Quantity::Unknown => (None, VERDICT_INSUFFICIENT, None, None),
        };
        rows.push(AdvantageRow {
            label: r.label.clone(),
            technology: r.technology.clone(),
            d: r.d,
            n: r.n_sites,
            t2_s: r.t2.to_string(),
            gate_time_s: r.gate_time.to_string(),
            tau_tabulated: r.tau_tabulated.to_string(),
            tau_computed: r.tau_computed().to_string(),
            tau_source,
            tau_ratio,
            critical_ratio: crit,
            verdict,
            crossing_d: crossing,
            max_advantageous_d: max_d,
            note: r.note.clone(),
        });
    }
    rows.sort_by(|a, b| a.label.cmp(&b.label));
    Ok(PlatformReport {
        reference: reference.label.clone(),
        reference_tau,
        tau_source,
        rows,
    })
}
