//! Parametric bootstrap of the reconstruction fidelity.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::quantile;
use crate::counts::CountsRecord;
use crate::error::{Error, Result};
use crate::measure::{sample, to_empirical};
use crate::reconstruct::{reconstruct, ReconstructionOptions};
use crate::seeds::derive_seed;
use crate::state::{fidelity, PureState};

pub const MIN_RESAMPLES: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapResult {
    /// Fidelity of the estimate from the original counts.
    pub point: f64,
    /// Band edges: the 16th/84th percentile offsets from the resample median,
    /// applied around `point` and clamped to `[0, 1]`.
    pub lo: f64,
    pub hi: f64,
    pub q16: f64,
    pub median: f64,
    pub q84: f64,
    pub resamples: usize,
}

impl BootstrapResult {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Resamples every record multinomially from its own empirical distribution,
/// reconstructs each resample, and summarizes the fidelity to `reference`.
pub fn bootstrap_ci(
    records: &[CountsRecord],
    n: usize,
    opts: &ReconstructionOptions,
    resamples: usize,
    seed: u64,
    reference: &PureState,
) -> Result<BootstrapResult> {
    if resamples < MIN_RESAMPLES {
        return Err(Error::InvalidConfig(format!(
            "bootstrap needs at least {MIN_RESAMPLES} resamples, got {resamples}"
        )));
    }
    let (est, _) = reconstruct(records, n, opts)?;
    let point = fidelity(reference, &est)?;
    let tables: Vec<_> = records.iter().map(to_empirical).collect();

    let mut fids = (0..resamples)
        .into_par_iter()
        .map(|b| {
            let resampled = records
                .iter()
                .zip(&tables)
                .enumerate()
                .map(|(k, (r, t))| sample(t, r.shots(), derive_seed(seed, &[b as u64, k as u64])))
                .collect::<Result<Vec<_>>>()?;
            let (est, _) = reconstruct(&resampled, n, opts)?;
            fidelity(reference, &est)
        })
        .collect::<Result<Vec<f64>>>()?;
    fids.sort_by(f64::total_cmp);

    let q16 = quantile(&fids, 0.16);
    let median = quantile(&fids, 0.5);
    let q84 = quantile(&fids, 0.84);
    Ok(BootstrapResult {
        point,
        lo: (point - (median - q16)).clamp(0.0, 1.0),
        hi: (point + (q84 - median)).clamp(0.0, 1.0),
        q16,
        median,
        q84,
        resamples,
    })
}
