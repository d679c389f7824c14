//! Exact samplers for the beta-Hermite and beta-Laguerre eigenvalue laws via
//! their tridiagonal / bidiagonal matrix models, and the corresponding joint
//! log-densities.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::numerics::{eig_sym_tridiagonal, sample_chi, RngStream, StreamId, SymTridiagonal};

/// Deflation tolerance used for every ensemble eigensolve.
pub const EIG_TOL: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HermiteParams {
    pub n: usize,
    pub beta: f64,
}

impl HermiteParams {
    pub fn new(n: usize, beta: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::param("Hermite ensemble needs n >= 1"));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::param(format!("beta must be > 0, got {beta}")));
        }
        Ok(Self { n, beta })
    }
}

/// Parameters of the beta-Laguerre ensemble. `p` is a real number `>= n`;
/// integrality is not required.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaguerreParams {
    pub n: usize,
    pub p: f64,
    pub beta: f64,
}

impl LaguerreParams {
    pub fn new(n: usize, p: f64, beta: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::param("Laguerre ensemble needs n >= 1"));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::param(format!("beta must be > 0, got {beta}")));
        }
        if !(p.is_finite() && p >= n as f64) {
            return Err(Error::param(format!("Laguerre ensemble needs p >= n (n={n}, p={p})")));
        }
        Ok(Self { n, p, beta })
    }

    /// Exponent `(β/2)(p − n + 1) − 1` of each `λ_i` in the joint density.
    pub fn weight_exponent(&self) -> f64 {
        0.5 * self.beta * (self.p - self.n as f64 + 1.0) - 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "ensemble", rename_all = "lowercase")]
pub enum EnsembleParams {
    Hermite(HermiteParams),
    Laguerre(LaguerreParams),
}

impl EnsembleParams {
    pub fn n(&self) -> usize {
        match self {
            EnsembleParams::Hermite(h) => h.n,
            EnsembleParams::Laguerre(l) => l.n,
        }
    }

    pub fn beta(&self) -> f64 {
        match self {
            EnsembleParams::Hermite(h) => h.beta,
            EnsembleParams::Laguerre(l) => l.beta,
        }
    }
}

/// Sorted eigenvalues together with the ensemble and stream that produced
/// them.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
    params: EnsembleParams,
    seed: StreamId,
}

impl Spectrum {
    pub fn new(mut values: Vec<f64>, params: EnsembleParams, seed: StreamId) -> Result<Self> {
        if values.len() != params.n() {
            return Err(Error::input(format!(
                "spectrum has {} values, ensemble has n = {}",
                values.len(),
                params.n()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("spectrum contains non-finite values"));
        }
        values.sort_by(f64::total_cmp);
        if matches!(params, EnsembleParams::Laguerre(_)) && values[0] <= 0.0 {
            return Err(Error::input("Laguerre spectrum must be strictly positive"));
        }
        Ok(Self {
            values,
            params,
            seed,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn params(&self) -> &EnsembleParams {
        &self.params
    }

    pub fn seed(&self) -> StreamId {
        self.seed
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn median(&self) -> f64 {
        median_sorted(&self.values)
    }
}

pub(crate) fn median_sorted(v: &[f64]) -> f64 {
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Eigenvalues of `T/√2` with `T` tridiagonal, diagonal N(0, 2) and
/// off-diagonal `χ_{β(n−1)}, …, χ_β`.
pub fn sample_hermite(params: &HermiteParams, rng: &mut RngStream) -> Result<Spectrum> {
    let n = params.n;
    let diag: Vec<f64> = (0..n).map(|_| rng.standard_normal()).collect();
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    for i in 1..n {
        off.push(sample_chi(params.beta * (n - i) as f64, rng)? / std::f64::consts::SQRT_2);
    }
    let t = SymTridiagonal::new(diag, off)?;
    let ev = eig_sym_tridiagonal(&t, EIG_TOL)?;
    Spectrum::new(ev, EnsembleParams::Hermite(*params), rng.id())
}

/// Placement of the `χ_{β(n−i)}` entries in the bidiagonal factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bidiagonal {
    /// `B` lower bidiagonal (the reference model).
    Lower,
    /// `B` upper bidiagonal; same law for `B·Bᵀ`.
    Upper,
}

/// Eigenvalues of `B·Bᵀ` with `B` lower bidiagonal, diagonal
/// `χ_{βp}, χ_{β(p−1)}, …, χ_{β(p−n+1)}` and sub-diagonal
/// `χ_{β(n−1)}, …, χ_β`. Cost is O(n) draws plus one O(n²) eigensolve
/// regardless of `p`.
pub fn sample_laguerre(params: &LaguerreParams, rng: &mut RngStream) -> Result<Spectrum> {
    sample_laguerre_model(params, rng, Bidiagonal::Lower)
}

pub fn sample_laguerre_model(
    params: &LaguerreParams,
    rng: &mut RngStream,
    layout: Bidiagonal,
) -> Result<Spectrum> {
    let t = laguerre_tridiagonal(params, rng, layout)?;
    let ev = eig_sym_tridiagonal(&t, EIG_TOL)?;
    // rounding can push a tiny eigenvalue to zero or below for huge p; clamp
    // to the smallest positive normal so downstream logs stay finite
    let ev = ev.into_iter().map(|v| v.max(f64::MIN_POSITIVE)).collect();
    Spectrum::new(ev, EnsembleParams::Laguerre(*params), rng.id())
}

fn laguerre_tridiagonal(
    params: &LaguerreParams,
    rng: &mut RngStream,
    layout: Bidiagonal,
) -> Result<SymTridiagonal> {
    let n = params.n;
    let beta = params.beta;
    let mut a = Vec::with_capacity(n);
    for i in 0..n {
        a.push(sample_chi(beta * (params.p - i as f64), rng)?);
    }
    let mut b = Vec::with_capacity(n.saturating_sub(1));
    for i in 1..n {
        b.push(sample_chi(beta * (n - i) as f64, rng)?);
    }
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    match layout {
        Bidiagonal::Lower => {
            // B[i,i] = a_i, B[i+1,i] = b_i
            for i in 0..n {
                let prev = if i > 0 { b[i - 1] * b[i - 1] } else { 0.0 };
                diag[i] = a[i] * a[i] + prev;
            }
            for i in 0..n.saturating_sub(1) {
                off[i] = a[i] * b[i];
            }
        }
        Bidiagonal::Upper => {
            // B[i,i] = a_i, B[i,i+1] = b_i
            for i in 0..n {
                let next = if i + 1 < n { b[i] * b[i] } else { 0.0 };
                diag[i] = a[i] * a[i] + next;
            }
            for i in 0..n.saturating_sub(1) {
                off[i] = a[i + 1] * b[i];
            }
        }
    }
    SymTridiagonal::new(diag, off)
}

/// `Σ_{i<j} log|x_i − x_j|`, or `−∞` on any tie.
fn log_vandermonde(x: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let d = (x[i] - x[j]).abs();
            if d == 0.0 {
                return f64::NEG_INFINITY;
            }
            s += d.ln();
        }
    }
    s
}

/// `log c_n^{β,p}`, the Laguerre normalizing constant.
pub fn log_laguerre_constant(params: &LaguerreParams) -> f64 {
    let hb = 0.5 * params.beta;
    let n = params.n as f64;
    let mut c = -hb * n * params.p * std::f64::consts::LN_2;
    for j in 1..=params.n {
        let jf = j as f64;
        c += ln_gamma(1.0 + hb) - ln_gamma(1.0 + hb * jf) - ln_gamma(hb * (params.p - n + jf));
    }
    c
}

/// `log K_n^β`, the Hermite normalizing constant.
pub fn log_hermite_constant(params: &HermiteParams) -> f64 {
    let hb = 0.5 * params.beta;
    let mut c = -0.5 * params.n as f64 * (2.0 * std::f64::consts::PI).ln();
    for j in 1..=params.n {
        c += ln_gamma(1.0 + hb) - ln_gamma(1.0 + hb * j as f64);
    }
    c
}

/// Log of the (unordered) Laguerre joint density. Non-positive coordinates
/// and ties give `−∞`.
pub fn log_density_laguerre(lambda: &[f64], params: &LaguerreParams) -> f64 {
    if lambda.len() != params.n || lambda.iter().any(|&l| !(l > 0.0)) {
        return f64::NEG_INFINITY;
    }
    let vdm = log_vandermonde(lambda);
    if vdm == f64::NEG_INFINITY {
        return vdm;
    }
    let e = params.weight_exponent();
    log_laguerre_constant(params) + params.beta * vdm
        + lambda.iter().map(|l| e * l.ln() - 0.5 * l).sum::<f64>()
}

/// Log of the (unordered) Hermite joint density; `−∞` on ties.
pub fn log_density_hermite(x: &[f64], params: &HermiteParams) -> f64 {
    if x.len() != params.n {
        return f64::NEG_INFINITY;
    }
    let vdm = log_vandermonde(x);
    if vdm == f64::NEG_INFINITY {
        return vdm;
    }
    log_hermite_constant(params) + params.beta * vdm - 0.5 * x.iter().map(|v| v * v).sum::<f64>()
}

#[derive(Debug, Serialize, Deserialize)]
struct SpectrumSidecar {
    ensemble: String,
    n: usize,
    p: Option<f64>,
    beta: f64,
    master_seed: u64,
    stream_index: u64,
}

impl Spectrum {
    /// CSV body with header `index,value`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("index,value\n");
        for (i, v) in self.values.iter().enumerate() {
            let _ = writeln!(s, "{i},{v:e}");
        }
        s
    }

    /// JSON sidecar `{ensemble, n, p, beta, master_seed, stream_index}`.
    pub fn sidecar_json(&self) -> String {
        let (ensemble, p) = match self.params {
            EnsembleParams::Hermite(_) => ("hermite", None),
            EnsembleParams::Laguerre(l) => ("laguerre", Some(l.p)),
        };
        let side = SpectrumSidecar {
            ensemble: ensemble.into(),
            n: self.params.n(),
            p,
            beta: self.params.beta(),
            master_seed: self.seed.master_seed,
            stream_index: self.seed.stream_index,
        };
        serde_json::to_string_pretty(&side).expect("sidecar serializes")
    }

    /// Writes `<stem>.csv` and `<stem>.json`.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let csv = dir.join(format!("{stem}.csv"));
        std::fs::write(&csv, self.to_csv()).map_err(|e| Error::io(&csv, e))?;
        let json = dir.join(format!("{stem}.json"));
        std::fs::write(&json, self.sidecar_json()).map_err(|e| Error::io(&json, e))?;
        Ok(())
    }

    /// Inverse of [`Spectrum::to_csv`] / [`Spectrum::sidecar_json`].
    pub fn from_csv_and_sidecar(csv: &str, sidecar: &str) -> Result<Self> {
        let side: SpectrumSidecar = serde_json::from_str(sidecar)?;
        let params = match side.ensemble.as_str() {
            "hermite" => EnsembleParams::Hermite(HermiteParams::new(side.n, side.beta)?),
            "laguerre" => {
                let p = side.p.ok_or_else(|| Error::input("laguerre sidecar missing p"))?;
                EnsembleParams::Laguerre(LaguerreParams::new(side.n, p, side.beta)?)
            }
            other => return Err(Error::input(format!("unknown ensemble {other:?}"))),
        };
        let mut lines = csv.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == "index,value" => {}
            _ => return Err(Error::Parse { row: 1, column: 1, message: "expected header index,value".into() }),
        }
        let mut values = Vec::new();
        for (row, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let mut cols = line.split(',');
            let _ = cols.next();
            let v = cols
                .next()
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::Parse { row: row + 1, column: 2, message: format!("bad value in {line:?}") })?;
            values.push(v);
        }
        Spectrum::new(
            values,
            params,
            StreamId { master_seed: side.master_seed, stream_index: side.stream_index },
        )
    }
}
