// Copyright 2026 The quditfid Authors
// SPDX-License-Identifier: Apache-2.0

use crate::error::{Error, Result};

/// Least-squares fit of `agi = slope * gamma_t` through the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub slope_c: f64,
    /// `1 - R^2` with `R^2 = 1 - SS_res / SS_tot` and a mean-centred `SS_tot`.
    pub one_minus_r2: f64,
    pub n_points: usize,
    pub gamma_t_range: (f64, f64),
}

/// Unweighted zero-intercept slope fit.
pub fn fit_slope(points: &[(f64, f64)]) -> Result<FitResult> {
    if points.len() < 2 {
        return Err(Error::DegenerateFit(format!(
            "need at least 2 points, got {}",
            points.len()
        )));
    }
    if let Some(&(x, _)) = points.iter().find(|(x, y)| !(*x >= 0.0) || !y.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "gamma*t must be >= 0 and values finite (gamma*t = {x})"
        )));
    }
    let lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        return Err(Error::DegenerateFit("all gamma*t values are identical".into()));
    }
    let sxx: f64 = points.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = points.iter().map(|(x, y)| x * y).sum();
    let slope = sxy / sxx;

    let n = points.len() as f64;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let ss_res: f64 = points.iter().map(|(x, y)| (y - slope * x).powi(2)).sum();
    let ss_tot: f64 = points.iter().map(|(_, y)| (y - mean_y).powi(2)).sum();
    let one_minus_r2 = if ss_tot > 0.0 {
        (ss_res / ss_tot).clamp(0.0, 1.0)
    } else if ss_res == 0.0 {
        0.0
    } else {
        1.0
    };
    Ok(FitResult {
        slope_c: slope,
        one_minus_r2,
        n_points: points.len(),
        gamma_t_range: (lo, hi),
    })
}

/// `1 - sim / theory`.
pub fn relative_deviation(agi_sim: f64, agi_th: f64) -> Result<f64> {
    if agi_th == 0.0 {
        return Err(Error::InvalidParameter(
            "relative deviation undefined for a zero reference".into(),
        ));
    }
    Ok(1.0 - agi_sim / agi_th)
}

/// Summary of a deviation distribution, for candlestick-style reports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationStats {
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation (`n - 1` denominator).
    pub std: f64,
    pub min: f64,
    pub max: f64,
    pub p05: f64,
    pub p25: f64,
    pub median: f64,
    pub p75: f64,
    pub p95: f64,
}

impl DeviationStats {
    pub fn max_abs(&self) -> f64 {
        self.min.abs().max(self.max.abs())
    }

    /// Interquartile range.
    pub fn iqr(&self) -> f64 {
        self.p75 - self.p25
    }
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

pub fn deviation_stats(samples: &[f64]) -> Result<DeviationStats> {
    if samples.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("non-finite sample".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(DeviationStats {
        count: samples.len(),
        mean,
        std: var.sqrt(),
        min: sorted[0],
        max: sorted[sorted.len() - 1],
        p05: percentile(&sorted, 0.05),
        p25: percentile(&sorted, 0.25),
        median: percentile(&sorted, 0.5),
        p75: percentile(&sorted, 0.75),
        p95: percentile(&sorted, 0.95),
    })
}
