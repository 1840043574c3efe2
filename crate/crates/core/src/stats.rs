//! Empirical CDFs and normal fits of path-loss samples.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pathloss::PathLossSample;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalFit {
    pub mu: f64,
    /// Population standard deviation (divides by n).
    pub sigma: f64,
    pub n: usize,
}

/// Right-continuous ECDF: distinct sorted values, each paired with the
/// fraction of samples at or below it.
pub fn ecdf(values: &[f64]) -> Result<Vec<(f64, f64)>> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidInput("NaN in ECDF input".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
    for (i, v) in sorted.iter().enumerate() {
        let p = (i + 1) as f64 / n;
        match out.last_mut() {
            Some(last) if last.0 == *v => last.1 = p,
            _ => out.push((*v, p)),
        }
    }
    Ok(out)
}

pub fn normal_fit(values: &[f64]) -> Result<NormalFit> {
    let n = values.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "normal fit needs at least 2 values, got {n}"
        )));
    }
    let mu = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / n as f64;
    Ok(NormalFit {
        mu,
        sigma: var.sqrt(),
        n,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    /// Fit over the unclipped samples.
    pub fit: NormalFit,
    /// Sample counts with 0, 1 and 2 wall reflections.
    pub wr_histogram: [usize; 3],
    pub clipped: usize,
    pub total: usize,
}

pub fn summarize_sweep(samples: &[PathLossSample]) -> Result<SweepSummary> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut wr_histogram = [0usize; 3];
    for s in samples {
        wr_histogram[usize::from(s.num_wr.min(2))] += 1;
    }
    let usable: Vec<f64> = samples
        .iter()
        .filter(|s| !s.clipped)
        .map(|s| s.pl_db)
        .collect();
    let clipped = samples.len() - usable.len();
    if usable.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{clipped} of {} samples are clipped deep nulls; {} usable for the normal fit",
            samples.len(),
            usable.len()
        )));
    }
    Ok(SweepSummary {
        fit: normal_fit(&usable)?,
        wr_histogram,
        clipped,
        total: samples.len(),
    })
}
