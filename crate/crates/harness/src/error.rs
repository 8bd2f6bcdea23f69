// Copyright 2026 The quditfid Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] quditfid::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid experiment spec: {0}")]
    InvalidSpec(String),
    #[error("dimension {dim} exceeds the ceiling {ceiling} for {what}")]
    DimensionCeiling {
        dim: usize,
        ceiling: usize,
        what: &'static str,
    },
    #[error("platform data: {0}")]
    Platform(String),
}

pub type Result<T> = std::result::Result<T, HarnessError>;
