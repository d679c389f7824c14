use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Real symmetric tridiagonal matrix stored as its diagonal and first
/// off-diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::input("tridiagonal matrix must have n >= 1"));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(Error::input(format!(
                "off-diagonal length {} inconsistent with n = {}",
                offdiag.len(),
                diag.len()
            )));
        }
        if diag.iter().chain(offdiag.iter()).any(|v| !v.is_finite()) {
            return Err(Error::input("tridiagonal entries must be finite"));
        }
        Ok(Self { diag, offdiag })
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    pub fn trace(&self) -> f64 {
        self.diag.iter().sum()
    }

    /// Squared Frobenius norm.
    pub fn frobenius_sq(&self) -> f64 {
        self.diag.iter().map(|d| d * d).sum::<f64>()
            + 2.0 * self.offdiag.iter().map(|e| e * e).sum::<f64>()
    }

    /// Max-row-sum norm; used as the spectral scale for tolerances.
    pub fn scale(&self) -> f64 {
        let n = self.n();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.offdiag[i - 1].abs() } else { 0.0 };
                let right = if i + 1 < n { self.offdiag[i].abs() } else { 0.0 };
                left + self.diag[i].abs() + right
            })
            .fold(0.0, f64::max)
    }
}

/// Maximum QL iterations per unit of matrix size.
const SWEEPS_PER_ROW: usize = 50;

/// All eigenvalues of `t`, ascending.
///
/// Implicit QL with Wilkinson shifts. Off-diagonals are deflated once
/// `|e_i| <= tol * (|d_i| + |d_{i+1}|)`; tolerances below machine epsilon are
/// raised to epsilon.
pub fn eig_sym_tridiagonal(t: &SymTridiagonal, tol: f64) -> Result<Vec<f64>> {
    if !(tol > 0.0) {
        return Err(Error::param(format!("eigensolver tolerance must be > 0, got {tol}")));
    }
    let tol = tol.max(f64::EPSILON);
    let n = t.n();
    let mut d = t.diag.clone();
    let mut e = t.offdiag.clone();
    e.push(0.0);

    let cap = SWEEPS_PER_ROW * n.max(1);
    let mut total_iters = 0usize;

    for l in 0..n {
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= tol * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            total_iters += 1;
            if total_iters > cap {
                return Err(Error::numeric(format!(
                    "tridiagonal QL did not converge after {cap} iterations (n = {n}, \
                     stuck at row {l}, |e| = {:.3e})",
                    e[l].abs()
                )));
            }

            // Wilkinson shift from the leading 2x2 block.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    d.sort_by(f64::total_cmp);
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngStream;
    use proptest::prelude::*;

    fn eig(diag: &[f64], off: &[f64]) -> Vec<f64> {
        let t = SymTridiagonal::new(diag.to_vec(), off.to_vec()).unwrap();
        eig_sym_tridiagonal(&t, 1e-15).unwrap()
    }

    #[test]
    fn two_by_two() {
        let ev = eig(&[2.0, 2.0], &[1.0]);
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14, "{ev:?}");
    }

    #[test]
    fn path_graph() {
        let ev = eig(&[0.0; 3], &[1.0, 1.0]);
        let s2 = 2f64.sqrt();
        for (a, b) in ev.iter().zip([-s2, 0.0, s2]) {
            assert!((a - b).abs() < 1e-14, "{ev:?}");
        }
    }

    #[test]
    fn path_graph_large() {
        // eigenvalues 2 cos(kπ/(n+1))
        let n = 200;
        let ev = eig(&vec![0.0; n], &vec![1.0; n - 1]);
        let mut want: Vec<f64> = (1..=n)
            .map(|k| 2.0 * (k as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos())
            .collect();
        want.sort_by(f64::total_cmp);
        for (a, b) in ev.iter().zip(&want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn one_by_one() {
        assert_eq!(eig(&[5.0], &[]), vec![5.0]);
    }

    #[test]
    fn diagonal_input_is_sorted() {
        assert_eq!(eig(&[3.0, -1.0, 2.0], &[0.0, 0.0]), vec![-1.0, 2.0, 3.0]);
    }

    #[test]
    fn rejects_malformed() {
        assert!(SymTridiagonal::new(vec![1.0, 2.0], vec![]).is_err());
        assert!(SymTridiagonal::new(vec![], vec![]).is_err());
        let t = SymTridiagonal::new(vec![1.0], vec![]).unwrap();
        assert!(eig_sym_tridiagonal(&t, 0.0).is_err());
    }

    #[test]
    fn wide_dynamic_range() {
        // Laguerre-like: huge diagonal, modest coupling
        let mut rng = RngStream::new(5, 5);
        let n = 50;
        let d: Vec<f64> = (0..n).map(|_| 2.5e6 + 3000.0 * rng.standard_normal()).collect();
        let e: Vec<f64> = (0..n - 1).map(|_| 15000.0 * rng.uniform_open()).collect();
        let t = SymTridiagonal::new(d, e).unwrap();
        let ev = eig_sym_tridiagonal(&t, 1e-15).unwrap();
        let tr: f64 = ev.iter().sum();
        assert!((tr - t.trace()).abs() <= 1e-12 * n as f64 * t.scale());
    }

    proptest! {
        #[test]
        fn trace_and_frobenius_preserved(
            diag in prop::collection::vec(-10.0f64..10.0, 1..40),
            seed in any::<u64>(),
        ) {
            let n = diag.len();
            let mut rng = RngStream::new(seed, 0);
            let off: Vec<f64> = (0..n.saturating_sub(1)).map(|_| 5.0 * rng.standard_normal()).collect();
            let t = SymTridiagonal::new(diag, off).unwrap();
            let tol = 1e-14;
            let ev = eig_sym_tridiagonal(&t, tol).unwrap();
            prop_assert!(ev.windows(2).all(|w| w[0] <= w[1]));
            let scale = t.scale().max(1.0);
            let sum: f64 = ev.iter().sum();
            prop_assert!((sum - t.trace()).abs() <= 10.0 * n as f64 * tol * scale);
            let sq: f64 = ev.iter().map(|x| x * x).sum();
            prop_assert!((sq - t.frobenius_sq()).abs() <= 10.0 * n as f64 * tol * scale * scale);
        }
    }
}
