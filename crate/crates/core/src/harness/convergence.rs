//! Distance between transformed Laguerre and Hermite spectra as `p` grows,
//! measured by two-sample KS statistics of extreme and median eigenvalues.

use serde::Serialize;

use super::output::run_replicates;
use crate::ensembles::{sample_hermite, sample_laguerre, HermiteParams, LaguerreParams};
use crate::error::{Error, Result};
use crate::numerics::{ks_two_sample, EmpiricalSample};
use crate::scaling::transform_values;

/// Max, min and median of one spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumSummary {
    pub max: f64,
    pub min: f64,
    pub median: f64,
}

impl SpectrumSummary {
    pub fn of_sorted(v: &[f64]) -> Self {
        SpectrumSummary {
            max: v[v.len() - 1],
            min: v[0],
            median: crate::ensembles::median_sorted(v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub p: f64,
    pub ks_max: f64,
    pub ks_min: f64,
    pub ks_median: f64,
    /// Mean and standard deviation of the two-sample KS statistic between
    /// equal-size samples from one law.
    pub null_mean: f64,
    pub null_sd: f64,
}

pub const CONVERGENCE_COLUMNS: [&str; 6] =
    ["p", "ks_max", "ks_min", "ks_median", "null_mean", "null_sd"];

impl ConvergenceRow {
    pub fn to_row(&self) -> [f64; 6] {
        [self.p, self.ks_max, self.ks_min, self.ks_median, self.null_mean, self.null_sd]
    }
}

/// Asymptotic mean and sd of `sup|F_R − G_R|` for two independent samples of
/// size `R` from one continuous law: `√(2/R)` times the Kolmogorov mean
/// `√(π/2)·ln 2` and sd `√(π²/12 − (π/2)·ln²2)`.
pub fn two_sample_null_moments(r: usize) -> (f64, f64) {
    let pi = std::f64::consts::PI;
    let ln2 = std::f64::consts::LN_2;
    let mean = (pi / 2.0).sqrt() * ln2;
    let sd = (pi * pi / 12.0 - pi / 2.0 * ln2 * ln2).sqrt();
    let s = (2.0 / r as f64).sqrt();
    (mean * s, sd * s)
}

/// Stream tags for the two samples at p-index `k`.
fn tags(k: usize) -> (u32, u32) {
    (1000 + 2 * k as u32, 1001 + 2 * k as u32)
}

pub fn transformed_laguerre_summaries(
    params: &LaguerreParams,
    replicates: usize,
    seed: u64,
    tag: u32,
) -> Result<Vec<SpectrumSummary>> {
    run_replicates(seed, tag, replicates, |rng| {
        let s = sample_laguerre(params, rng)?;
        Ok(SpectrumSummary::of_sorted(&transform_values(s.values(), params)))
    })
}

pub fn hermite_summaries(
    params: &HermiteParams,
    replicates: usize,
    seed: u64,
    tag: u32,
) -> Result<Vec<SpectrumSummary>> {
    run_replicates(seed, tag, replicates, |rng| {
        Ok(SpectrumSummary::of_sorted(sample_hermite(params, rng)?.values()))
    })
}

/// KS distances for max, min and median between two sets of summaries.
pub fn summary_ks(a: &[SpectrumSummary], b: &[SpectrumSummary]) -> Result<[f64; 3]> {
    let col = |s: &[SpectrumSummary], f: fn(&SpectrumSummary) -> f64| {
        EmpiricalSample::new(s.iter().map(f).collect())
    };
    let mut out = [0.0; 3];
    let getters: [fn(&SpectrumSummary) -> f64; 3] = [|s| s.max, |s| s.min, |s| s.median];
    for (o, g) in out.iter_mut().zip(getters) {
        *o = ks_two_sample(&col(a, g)?, &col(b, g)?)?;
    }
    Ok(out)
}

pub fn convergence_scan(
    n: usize,
    p_list: &[f64],
    beta: f64,
    replicates: usize,
    seed: u64,
) -> Result<Vec<ConvergenceRow>> {
    if replicates == 0 {
        return Err(Error::param("replicates must be >= 1"));
    }
    let hermite = HermiteParams::new(n, beta)?;
    let laguerre: Vec<LaguerreParams> = p_list
        .iter()
        .map(|&p| LaguerreParams::new(n, p, beta))
        .collect::<Result<_>>()?;
    let (null_mean, null_sd) = two_sample_null_moments(replicates);
    let mut rows = Vec::with_capacity(p_list.len());
    for (k, params) in laguerre.iter().enumerate() {
        let (tl, th) = tags(k);
        let lag = transformed_laguerre_summaries(params, replicates, seed, tl)?;
        let her = hermite_summaries(&hermite, replicates, seed, th)?;
        let [ks_max, ks_min, ks_median] = summary_ks(&lag, &her)?;
        rows.push(ConvergenceRow {
            p: params.p,
            ks_max,
            ks_min,
            ks_median,
            null_mean,
            null_sd,
        });
    }
    Ok(rows)
}
