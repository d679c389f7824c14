//! Normalizations of Laguerre spectra in the regime `p ≫ n`.

use serde::{Deserialize, Serialize};

use crate::ensembles::{EnsembleParams, LaguerreParams, Spectrum};
use crate::error::{Error, Result};

/// Laguerre eigenvalues mapped by `x = √(p/2β)(λ/p − β)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformedSample {
    pub x: Vec<f64>,
    pub source: LaguerreParams,
}

impl TransformedSample {
    /// Inverse map `λ = p(β + √(2β/p)·x)`.
    pub fn to_eigenvalues(&self) -> Vec<f64> {
        let LaguerreParams { p, beta, .. } = self.source;
        let s = (2.0 * beta / p).sqrt();
        self.x.iter().map(|x| p * (beta + s * x)).collect()
    }

    /// `−√(βp/2)`, the image of `λ = 0`.
    pub fn lower_edge(&self) -> f64 {
        -(self.source.beta * self.source.p / 2.0).sqrt()
    }
}

pub fn hermite_transform(s: &Spectrum, params: &LaguerreParams) -> Result<TransformedSample> {
    match s.params() {
        EnsembleParams::Laguerre(l) if l == params => {}
        other => {
            return Err(Error::input(format!(
                "spectrum was sampled under {other:?}, not {params:?}"
            )))
        }
    }
    Ok(TransformedSample {
        x: transform_values(s.values(), params),
        source: *params,
    })
}

/// The transform applied to raw values; order is preserved.
pub fn transform_values(lambda: &[f64], params: &LaguerreParams) -> Vec<f64> {
    let LaguerreParams { p, beta, .. } = *params;
    let c = (p / (2.0 * beta)).sqrt();
    lambda.iter().map(|l| c * (l / p - beta)).collect()
}

/// Atoms `x_i/√n`, each of weight `1/n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaledEmpiricalMeasure {
    pub atoms: Vec<f64>,
}

impl ScaledEmpiricalMeasure {
    pub fn from_transformed(t: &TransformedSample) -> Self {
        let r = (t.x.len() as f64).sqrt();
        ScaledEmpiricalMeasure {
            atoms: t.x.iter().map(|x| x / r).collect(),
        }
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.atoms.len() as f64
    }

    pub fn total_mass(&self) -> f64 {
        self.weight() * self.atoms.len() as f64
    }

    /// Fraction of atoms inside `[lo, hi]`.
    pub fn mass_in(&self, lo: f64, hi: f64) -> f64 {
        self.atoms.iter().filter(|&&a| (lo..=hi).contains(&a)).count() as f64 * self.weight()
    }
}

/// Centering of the extreme eigenvalues and their common scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremeCentering {
    pub mu_low: f64,
    pub mu_high: f64,
    pub sigma: f64,
}

/// `(2p − 4√(np), 2p + 4√(np), 2√p·n^{−1/6})`; defined for β = 2 only.
pub fn extreme_centerings_beta2(params: &LaguerreParams) -> Result<ExtremeCentering> {
    require_beta2(params)?;
    let (n, p) = (params.n as f64, params.p);
    let r = 4.0 * (n * p).sqrt();
    Ok(ExtremeCentering {
        mu_low: 2.0 * p - r,
        mu_high: 2.0 * p + r,
        sigma: 2.0 * p.sqrt() * n.powf(-1.0 / 6.0),
    })
}

/// `(β(p − 2√(np)), β√p·n^{−1/6})` for the smallest eigenvalue.
pub fn smallest_centering(params: &LaguerreParams) -> (f64, f64) {
    let (n, p, b) = (params.n as f64, params.p, params.beta);
    (b * (p - 2.0 * (n * p).sqrt()), b * p.sqrt() * n.powf(-1.0 / 6.0))
}

/// `√(λ_max/λ_min)`.
pub fn condition_number(s: &Spectrum) -> Result<f64> {
    condition_number_of(s.values())
}

pub fn condition_number_of(values: &[f64]) -> Result<f64> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        if !(v > 0.0) {
            return Err(Error::domain(format!(
                "condition number needs positive eigenvalues, found {v}"
            )));
        }
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if values.is_empty() {
        return Err(Error::domain("condition number of an empty spectrum"));
    }
    Ok((hi / lo).sqrt())
}

/// `(α_n, β_n) = (2√p·n^{1/6}, 1 + 2√(n/p))`.
pub fn condition_constants(params: &LaguerreParams) -> Result<(f64, f64)> {
    require_beta2(params)?;
    let (n, p) = (params.n as f64, params.p);
    Ok((2.0 * p.sqrt() * n.powf(1.0 / 6.0), 1.0 + 2.0 * (n / p).sqrt()))
}

/// `α_n(κ_n − β_n)`.
pub fn condition_statistic(s: &Spectrum, params: &LaguerreParams) -> Result<f64> {
    condition_statistic_of(s.values(), params)
}

pub fn condition_statistic_of(values: &[f64], params: &LaguerreParams) -> Result<f64> {
    let (alpha, center) = condition_constants(params)?;
    Ok(alpha * (condition_number_of(values)? - center))
}

fn require_beta2(params: &LaguerreParams) -> Result<()> {
    if params.beta != 2.0 {
        return Err(Error::domain(format!(
            "extreme-eigenvalue constants are stated for beta = 2 only, got {}",
            params.beta
        )));
    }
    Ok(())
}
