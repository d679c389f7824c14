//! Rate functions for extreme eigenvalues and for the empirical measure,
//! limiting spectral densities, and the concentration bound check.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ensembles::{sample_hermite, HermiteParams};
use crate::error::{Error, Result};
use crate::numerics::special::{ln_gamma_p, ln_gamma_q};
use crate::numerics::RngStream;

/// A rate that is either finite or `+∞` outside its effective domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "domain", content = "value", rename_all = "snake_case")]
pub enum RateValue {
    Finite(f64),
    Infinite,
}

impl RateValue {
    pub fn is_finite(self) -> bool {
        matches!(self, RateValue::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            RateValue::Finite(v) => Some(v),
            RateValue::Infinite => None,
        }
    }

    /// The value with `+∞` mapped to `f64::INFINITY`, for output only.
    pub fn to_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for RateValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RateValue::Finite(v) => write!(f, "{v}"),
            RateValue::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Max,
    Min,
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max" => Ok(Side::Max),
            "min" => Ok(Side::Min),
            _ => Err(Error::param(format!("side must be max or min, got {s:?}"))),
        }
    }
}

/// `(x − β)/2 − (β/2)·log(x/β)` on `[β, ∞)` for the largest eigenvalue and
/// on `(0, β]` for the smallest; `+∞` elsewhere.
pub fn rate_extreme(x: f64, beta: f64, side: Side) -> RateValue {
    let inside = match side {
        Side::Max => x >= beta,
        Side::Min => x > 0.0 && x <= beta,
    };
    if !inside || !x.is_finite() {
        return RateValue::Infinite;
    }
    if x == beta {
        return RateValue::Finite(0.0);
    }
    let r = x / beta;
    // (β/2)(r − 1 − log r), with log1p near r = 1
    let d = r - 1.0;
    let v = 0.5 * beta * (d - d.ln_1p());
    RateValue::Finite(v.max(0.0))
}

/// Exact finite-`p` tail exponent for one eigenvalue: `λ/p` is
/// Gamma(βp/2, scale 2/p), so this returns `−(1/p)·log P(λ ≥ px)` for
/// `x ≥ β` and `−(1/p)·log P(λ ≤ px)` for `x < β`.
pub fn gamma_rate_oracle(x: f64, beta: f64, p: f64) -> Result<f64> {
    if !(x > 0.0) || !(beta > 0.0) || !(p > 0.0) {
        return Err(Error::param(format!(
            "gamma rate needs x, beta, p > 0 (x={x}, beta={beta}, p={p})"
        )));
    }
    let a = 0.5 * beta * p;
    let z = 0.5 * p * x;
    let ln_tail = if x >= beta { ln_gamma_q(a, z)? } else { ln_gamma_p(a, z)? };
    Ok(-ln_tail / p)
}

/// `(βπ)⁻¹·√(2β − x²)` on `|x| ≤ √(2β)`.
pub fn semicircle_pdf(x: f64, beta: f64) -> f64 {
    let r2 = 2.0 * beta;
    if x * x >= r2 {
        return 0.0;
    }
    (r2 - x * x).sqrt() / (beta * PI)
}

pub fn semicircle_cdf(x: f64, beta: f64) -> f64 {
    let r = (2.0 * beta).sqrt();
    if x <= -r {
        return 0.0;
    }
    if x >= r {
        return 1.0;
    }
    let v = 0.5 + x * (r * r - x * x).sqrt() / (PI * r * r) + (x / r).asin() / PI;
    v.clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum ComparisonLaw {
    /// Marchenko-Pastur with ratio `γ ∈ (0, 1]`.
    MarchenkoPastur { gamma: f64 },
    /// `8x⁻³·exp(−4/x²)` on `x > 0`.
    EdelmanSquare,
}

pub fn comparison_pdf(x: f64, law: ComparisonLaw) -> Result<f64> {
    match law {
        ComparisonLaw::MarchenkoPastur { gamma } => {
            if !(gamma > 0.0 && gamma <= 1.0) {
                return Err(Error::param(format!(
                    "Marchenko-Pastur ratio must lie in (0, 1], got {gamma}"
                )));
            }
            let lo = (1.0 - gamma.sqrt()).powi(2);
            let hi = (1.0 + gamma.sqrt()).powi(2);
            if !(x > lo && x < hi) || x <= 0.0 {
                return Ok(0.0);
            }
            Ok(((x - lo) * (hi - x)).sqrt() / (2.0 * PI * gamma * x))
        }
        ComparisonLaw::EdelmanSquare => {
            if !(x > 0.0) {
                return Ok(0.0);
            }
            Ok(8.0 * x.powi(-3) * (-4.0 / (x * x)).exp())
        }
    }
}

/// A probability measure on a uniform grid of cell centers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GriddedMeasure {
    pub grid: Vec<f64>,
    pub mass: Vec<f64>,
    pub grid_step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GriddedMeasureSidecar {
    pub grid_step: f64,
    pub beta_context: Option<f64>,
}

const MASS_TOL: f64 = 1e-10;

impl GriddedMeasure {
    pub fn new(grid: Vec<f64>, mass: Vec<f64>) -> Result<Self> {
        if grid.len() != mass.len() || grid.is_empty() {
            return Err(Error::input(format!(
                "grid and mass lengths differ or are empty ({} vs {})",
                grid.len(),
                mass.len()
            )));
        }
        let h = if grid.len() > 1 { grid[1] - grid[0] } else { 1.0 };
        if !(h > 0.0) {
            return Err(Error::input("grid must be ascending"));
        }
        for (i, w) in grid.windows(2).enumerate() {
            if ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(grid[i].abs()) {
                return Err(Error::input(format!("grid is not uniform at index {}", i + 1)));
            }
        }
        if mass.iter().any(|m| !(m.is_finite() && *m >= 0.0)) {
            return Err(Error::input("masses must be finite and nonnegative"));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::input(format!("masses sum to {total}, not 1")));
        }
        Ok(GriddedMeasure { grid, mass, grid_step: h })
    }

    /// Exact cell masses `F(x + h/2) − F(x − h/2)` on cells of width `h`
    /// tiling `[lo, hi]`, renormalized to absorb mass outside.
    pub fn from_cdf(cdf: impl Fn(f64) -> f64, lo: f64, hi: f64, h: f64) -> Result<Self> {
        if !(hi > lo) || !(h > 0.0) {
            return Err(Error::param("need lo < hi and h > 0"));
        }
        let cells = ((hi - lo) / h).ceil() as usize;
        let grid: Vec<f64> = (0..cells).map(|i| lo + (i as f64 + 0.5) * h).collect();
        let mut mass: Vec<f64> = grid.iter().map(|&x| cdf(x + 0.5 * h) - cdf(x - 0.5 * h)).collect();
        normalize(&mut mass)?;
        Self::new(grid, mass)
    }

    /// Midpoint masses `f(x)·h`, renormalized.
    pub fn from_density(pdf: impl Fn(f64) -> f64, lo: f64, hi: f64, h: f64) -> Result<Self> {
        if !(hi > lo) || !(h > 0.0) {
            return Err(Error::param("need lo < hi and h > 0"));
        }
        let cells = ((hi - lo) / h).ceil() as usize;
        let grid: Vec<f64> = (0..cells).map(|i| lo + (i as f64 + 0.5) * h).collect();
        let mut mass: Vec<f64> = grid.iter().map(|&x| pdf(x) * h).collect();
        normalize(&mut mass)?;
        Self::new(grid, mass)
    }

    pub fn semicircle(beta: f64, h: f64) -> Result<Self> {
        let r = (2.0 * beta).sqrt();
        Self::from_cdf(|x| semicircle_cdf(x, beta), -r, r, h)
    }

    pub fn uniform(lo: f64, hi: f64, h: f64) -> Result<Self> {
        Self::from_cdf(|x| ((x - lo) / (hi - lo)).clamp(0.0, 1.0), lo, hi, h)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,mass\n");
        for (x, m) in self.grid.iter().zip(&self.mass) {
            out.push_str(&format!("{x},{m}\n"));
        }
        out
    }

    pub fn write(&self, dir: &Path, stem: &str, beta_context: Option<f64>) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let csv = dir.join(format!("{stem}.csv"));
        std::fs::write(&csv, self.to_csv()).map_err(|e| Error::io(&csv, e))?;
        let side = GriddedMeasureSidecar {
            grid_step: self.grid_step,
            beta_context,
        };
        let json = dir.join(format!("{stem}.json"));
        std::fs::write(&json, serde_json::to_string_pretty(&side)?).map_err(|e| Error::io(&json, e))
    }
}

fn normalize(mass: &mut [f64]) -> Result<()> {
    let total: f64 = mass.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::numeric("measure has no mass on its grid"));
    }
    for m in mass.iter_mut() {
        *m /= total;
    }
    Ok(())
}

/// `Φ(t) = (t²/2)·log|t| − 3t²/4`, a second antiderivative of `log|t|`.
fn log_antiderivative2(t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let t2 = t * t;
    0.5 * t2 * t.abs().ln() - 0.75 * t2
}

/// Average of `log|x − y|` for `x`, `y` uniform on two width-`h` cells whose
/// centers are `k` cells apart.
fn cell_pair_log_mean(k: usize, h: f64) -> f64 {
    if k == 0 {
        return h.ln() - 1.5;
    }
    let t = k as f64 * h;
    (log_antiderivative2(t + h) - 2.0 * log_antiderivative2(t) + log_antiderivative2(t - h))
        / (h * h)
}

/// `½∬g dν dν + (β/4)log(β/2) − 3β/8` with
/// `g(x, y) = ½(x² + y²) − β·log|x − y|`.
///
/// The measure is spread uniformly over each cell and every cell pair is
/// integrated exactly, so the log singularity is never sampled. A measure
/// concentrated on a single cell is treated as a point mass and rated `+∞`.
pub fn rate_functional(nu: &GriddedMeasure, beta: f64) -> RateValue {
    let h = nu.grid_step;
    let occupied = nu.mass.iter().filter(|&&m| m > 0.0).count();
    if occupied <= 1 {
        return RateValue::Infinite;
    }
    let second_moment: f64 = nu
        .grid
        .iter()
        .zip(&nu.mass)
        .map(|(x, m)| m * (x * x + h * h / 12.0))
        .sum();

    // log energy through the mass autocorrelation, summed in a fixed order
    let m = &nu.mass;
    let n = m.len();
    let mut log_energy = 0.0;
    for k in 0..n {
        let corr: f64 = (0..n - k).map(|i| m[i] * m[i + k]).sum();
        if corr == 0.0 {
            continue;
        }
        let weight = if k == 0 { 1.0 } else { 2.0 };
        log_energy += weight * corr * cell_pair_log_mean(k, h);
    }

    let double_integral = second_moment - beta * log_energy;
    RateValue::Finite(0.5 * double_integral + 0.25 * beta * (0.5 * beta).ln() - 0.375 * beta)
}

/// `g(x, y) = ½(x² + y²) − β·log|x − y|` at a point.
pub fn rate_kernel(x: f64, y: f64, beta: f64) -> f64 {
    0.5 * (x * x + y * y) - beta * (x - y).abs().ln()
}

/// Constant in the concentration bound `C·exp(−½nt² + Cnt)`. Not derived;
/// fixed by a coarse sweep of `t` over [3, 6] at n = 50, β = 1.
pub const CONCENTRATION_C: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationResult {
    pub n: usize,
    pub beta: f64,
    pub t: f64,
    pub replicates: usize,
    /// Fraction of draws with `max|λ_i| ≥ √n·t`.
    pub empirical: f64,
    pub std_error: f64,
    pub ln_bound: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Monte Carlo exceedance of `max|λ_i| ≥ √n·t` for the β-Hermite ensemble,
/// paired with the bound at [`CONCENTRATION_C`].
pub fn concentration_check(
    n: usize,
    beta: f64,
    t: f64,
    replicates: usize,
    rng: &mut RngStream,
) -> Result<ConcentrationResult> {
    if replicates == 0 {
        return Err(Error::param("concentration check needs at least one replicate"));
    }
    if n < 2 || !(t > 0.0) {
        return Err(Error::param(format!("need n >= 2 and t > 0 (n={n}, t={t})")));
    }
    let params = HermiteParams::new(n, beta)?;
    let level = (n as f64).sqrt() * t;
    let mut hits = 0usize;
    for _ in 0..replicates {
        let s = sample_hermite(&params, rng)?;
        if s.max().abs().max(s.min().abs()) >= level {
            hits += 1;
        }
    }
    let prob = hits as f64 / replicates as f64;
    let c = CONCENTRATION_C;
    let nf = n as f64;
    let ln_bound = c.ln() - 0.5 * nf * t * t + c * nf * t;
    let bound = ln_bound.exp();
    Ok(ConcentrationResult {
        n,
        beta,
        t,
        replicates,
        empirical: prob,
        std_error: (prob * (1.0 - prob) / replicates as f64).sqrt(),
        ln_bound,
        bound,
        holds: prob <= bound,
    })
}
