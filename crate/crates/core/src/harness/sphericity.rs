//! Sphericity test for complex Gaussian data based on the condition number
//! of the Gram matrix.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ensembles::{sample_laguerre, LaguerreParams};
use crate::error::{Error, Result};
use crate::numerics::{eig_hermitian, HermitianMatrix, RngStream};
use crate::scaling::{condition_number_of, condition_statistic_of};
use crate::tracy_widom::{critical_value, two_sided_p_value, DistributionTable, TableLabel};

/// An `n × p` complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexData {
    pub n: usize,
    pub p: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl ComplexData {
    pub fn scaled(&self, rho: f64) -> ComplexData {
        ComplexData {
            n: self.n,
            p: self.p,
            re: self.re.iter().map(|v| v * rho).collect(),
            im: self.im.iter().map(|v| v * rho).collect(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n {
            for k in 0..self.p {
                if k > 0 {
                    out.push(',');
                }
                let j = i * self.p + k;
                out.push_str(&format!("{},{}", self.re[j], self.im[j]));
            }
            out.push('\n');
        }
        out
    }
}

/// Parses rows of `re_1,im_1,…,re_p,im_p`. A first line made only of
/// non-numeric fields is taken as a header. Locations in errors are 1-based
/// file rows and columns.
pub fn parse_complex_csv(text: &str) -> Result<ComplexData> {
    let mut re = Vec::new();
    let mut im = Vec::new();
    let mut width: Option<usize> = None;
    let mut n = 0;
    for (idx, line) in text.lines().enumerate() {
        let row = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if idx == 0 && fields.iter().all(|f| f.parse::<f64>().is_err()) {
            continue;
        }
        match width {
            None => {
                if !fields.len().is_multiple_of(2) {
                    return Err(Error::Parse {
                        row,
                        column: fields.len(),
                        message: format!(
                            "expected alternating real/imaginary columns, found {} fields",
                            fields.len()
                        ),
                    });
                }
                width = Some(fields.len());
            }
            Some(w) if w != fields.len() => {
                return Err(Error::Parse {
                    row,
                    column: fields.len().min(w) + 1,
                    message: format!("expected {w} fields, found {}", fields.len()),
                });
            }
            _ => {}
        }
        for (c, f) in fields.iter().enumerate() {
            let v: f64 = f.parse().map_err(|_| Error::Parse {
                row,
                column: c + 1,
                message: format!("not a number: {f:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    row,
                    column: c + 1,
                    message: format!("non-finite value {f:?}"),
                });
            }
            if c % 2 == 0 {
                re.push(v);
            } else {
                im.push(v);
            }
        }
        n += 1;
    }
    let Some(w) = width else {
        return Err(Error::input("no data rows"));
    };
    if im.iter().all(|&v| v == 0.0) {
        return Err(Error::input(
            "all imaginary parts are zero; the test is calibrated for complex data only",
        ));
    }
    Ok(ComplexData { n, p: w / 2, re, im })
}

pub fn read_complex_csv(path: &Path) -> Result<ComplexData> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_complex_csv(&text)
}

/// Eigenvalues of `X·X*`, ascending.
pub fn gram_eigenvalues(x: &ComplexData) -> Result<Vec<f64>> {
    let (n, p) = (x.n, x.p);
    let mut re = vec![0.0; n * n];
    let mut im = vec![0.0; n * n];
    for i in 0..n {
        let (ai, bi) = (&x.re[i * p..(i + 1) * p], &x.im[i * p..(i + 1) * p]);
        for j in i..n {
            let (aj, bj) = (&x.re[j * p..(j + 1) * p], &x.im[j * p..(j + 1) * p]);
            let mut sr = 0.0;
            let mut si = 0.0;
            for k in 0..p {
                sr += ai[k] * aj[k] + bi[k] * bj[k];
                si += bi[k] * aj[k] - ai[k] * bj[k];
            }
            re[i * n + j] = sr;
            re[j * n + i] = sr;
            im[i * n + j] = si;
            im[j * n + i] = -si;
        }
        im[i * n + i] = 0.0;
    }
    eig_hermitian(&HermitianMatrix::new(n, re, im)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Reject,
    Retain,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphericityReport {
    pub n: usize,
    pub p: usize,
    pub kappa: f64,
    pub statistic: f64,
    pub critical_value_at_alpha: f64,
    pub alpha: f64,
    pub p_value: f64,
    pub decision: Decision,
}

pub fn sphericity_test(
    x: &ComplexData,
    alpha: f64,
    conv: &DistributionTable,
) -> Result<SphericityReport> {
    if x.p <= x.n {
        return Err(Error::domain(format!(
            "the test needs more columns than rows (n={}, p={})",
            x.n, x.p
        )));
    }
    let eig = gram_eigenvalues(x)?;
    report_from_eigenvalues(&eig, x.n, x.p as f64, alpha, conv)
}

/// The test applied to Gram eigenvalues directly.
pub fn report_from_eigenvalues(
    eig: &[f64],
    n: usize,
    p: f64,
    alpha: f64,
    conv: &DistributionTable,
) -> Result<SphericityReport> {
    if conv.label != TableLabel::UplusV {
        return Err(Error::param(format!("expected the UplusV table, got {}", conv.label)));
    }
    if !(p > n as f64) {
        return Err(Error::domain(format!("the test needs p > n (n={n}, p={p})")));
    }
    let params = LaguerreParams::new(n, p, 2.0)?;
    let kappa = condition_number_of(eig)?;
    let statistic = condition_statistic_of(eig, &params)?;
    let s = critical_value(alpha, conv)?;
    let p_value = two_sided_p_value(statistic, conv);
    let decision = if statistic.abs() > s {
        Decision::Reject
    } else {
        Decision::Retain
    };
    Ok(SphericityReport {
        n,
        p: p as usize,
        kappa,
        statistic,
        critical_value_at_alpha: s,
        alpha,
        p_value,
        decision,
    })
}

/// I.i.d. standard complex Gaussian entries (real and imaginary parts of
/// variance 1/2).
pub fn simulate_null_data(n: usize, p: usize, rng: &mut RngStream) -> ComplexData {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut re = Vec::with_capacity(n * p);
    let mut im = Vec::with_capacity(n * p);
    for _ in 0..n * p {
        re.push(s * rng.standard_normal());
        im.push(s * rng.standard_normal());
    }
    ComplexData { n, p, re, im }
}

/// Statistic under the null drawn through the β = 2 Laguerre eigenvalue
/// law, which is the law of the Gram eigenvalues up to a common scale.
pub fn null_statistic_shortcut(n: usize, p: f64, rng: &mut RngStream) -> Result<f64> {
    let params = LaguerreParams::new(n, p, 2.0)?;
    let s = sample_laguerre(&params, rng)?;
    condition_statistic_of(s.values(), &params)
}

/// Statistic under the null from a full simulated data matrix.
pub fn null_statistic_full(n: usize, p: usize, rng: &mut RngStream) -> Result<f64> {
    let x = simulate_null_data(n, p, rng);
    let params = LaguerreParams::new(n, p as f64, 2.0)?;
    condition_statistic_of(&gram_eigenvalues(&x)?, &params)
}
