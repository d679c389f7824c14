use num_complex::Complex64;

use super::tridiag::{eig_sym_tridiagonal, SymTridiagonal};
use crate::error::{Error, Result};

/// Dense complex Hermitian matrix held as separate row-major real and
/// imaginary grids.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

/// Relative tolerance on `max |H - H*|`.
const HERMITIAN_TOL: f64 = 1e-10;

impl HermitianMatrix {
    pub fn new(n: usize, re: Vec<f64>, im: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::input("matrix must be at least 1x1"));
        }
        if re.len() != n * n || im.len() != n * n {
            return Err(Error::input(format!(
                "expected {} entries per grid, got re={} im={}",
                n * n,
                re.len(),
                im.len()
            )));
        }
        if re.iter().chain(im.iter()).any(|v| !v.is_finite()) {
            return Err(Error::input("matrix entries must be finite"));
        }
        let scale = re
            .iter()
            .zip(&im)
            .map(|(a, b)| a.hypot(*b))
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let dr = re[i * n + j] - re[j * n + i];
                let di = im[i * n + j] + im[j * n + i];
                worst = worst.max(dr.hypot(di));
            }
        }
        if worst > HERMITIAN_TOL * scale {
            return Err(Error::input(format!(
                "matrix is not Hermitian: max |H - H*| = {worst:.3e} (scale {scale:.3e})"
            )));
        }
        Ok(Self { n, re, im })
    }

    pub fn from_complex(n: usize, entries: &[Complex64]) -> Result<Self> {
        let re = entries.iter().map(|z| z.re).collect();
        let im = entries.iter().map(|z| z.im).collect();
        Self::new(n, re, im)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn to_complex(&self) -> Vec<Complex64> {
        self.re
            .iter()
            .zip(&self.im)
            .map(|(&r, &i)| Complex64::new(r, i))
            .collect()
    }
}

/// Householder reduction of a Hermitian matrix to a real symmetric
/// tridiagonal with the same spectrum.
///
/// The complex sub-diagonal produced by the reflections is made real by a
/// diagonal unitary similarity, which leaves the diagonal untouched and
/// replaces each off-diagonal entry by its modulus.
pub fn hermitian_to_tridiagonal(h: &HermitianMatrix) -> Result<SymTridiagonal> {
    let n = h.n;
    let mut a = h.to_complex();
    let at = |i: usize, j: usize| i * n + j;

    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];

    for k in 0..n.saturating_sub(1) {
        // x = A[k+1.., k]
        let m = n - k - 1;
        let x: Vec<Complex64> = (0..m).map(|i| a[at(k + 1 + i, k)]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let tail = x[1..].iter().map(|z| z.norm_sqr()).sum::<f64>();
        if xnorm == 0.0 || tail == 0.0 {
            off[k] = x[0].norm();
            continue;
        }
        let phase = if x[0].norm() > 0.0 {
            x[0] / x[0].norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let alpha = -phase * xnorm;
        let mut v = x.clone();
        v[0] -= alpha;
        let vnorm_sq = v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let tau = 2.0 / vnorm_sq;

        // trailing block B = A[k+1.., k+1..]; p = tau B v
        let mut p = vec![Complex64::new(0.0, 0.0); m];
        for i in 0..m {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..m {
                acc += a[at(k + 1 + i, k + 1 + j)] * v[j];
            }
            p[i] = acc * tau;
        }
        // K = (tau/2) v* p is real for Hermitian B
        let vp: Complex64 = v.iter().zip(&p).map(|(vi, pi)| vi.conj() * pi).sum();
        let kk = 0.5 * tau * vp.re;
        let w: Vec<Complex64> = p.iter().zip(&v).map(|(pi, vi)| pi - vi * kk).collect();
        for i in 0..m {
            for j in 0..m {
                let upd = v[i] * w[j].conj() + w[i] * v[j].conj();
                a[at(k + 1 + i, k + 1 + j)] -= upd;
            }
        }
        off[k] = alpha.norm();
        // column/row k now only touch alpha; zero the rest for cleanliness
        a[at(k + 1, k)] = alpha;
        a[at(k, k + 1)] = alpha.conj();
        for i in 1..m {
            a[at(k + 1 + i, k)] = Complex64::new(0.0, 0.0);
            a[at(k, k + 1 + i)] = Complex64::new(0.0, 0.0);
        }
    }
    for (i, d) in diag.iter_mut().enumerate() {
        *d = a[at(i, i)].re;
    }
    SymTridiagonal::new(diag, off)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eig_hermitian(h: &HermitianMatrix) -> Result<Vec<f64>> {
    let t = hermitian_to_tridiagonal(h)?;
    eig_sym_tridiagonal(&t, 1e-15)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngStream;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity() {
        let h = HermitianMatrix::new(2, vec![1.0, 0.0, 0.0, 1.0], vec![0.0; 4]).unwrap();
        assert_eq!(eig_hermitian(&h).unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn pauli_y() {
        let h = HermitianMatrix::from_complex(2, &[c(0., 0.), c(0., 1.), c(0., -1.), c(0., 0.)])
            .unwrap();
        let ev = eig_hermitian(&h).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn two_by_two_closed_form() {
        // det = (2 − t)(3 − t) − |1 + i|² = t² − 5t + 4, roots 1 and 4
        let h = HermitianMatrix::from_complex(2, &[c(2., 0.), c(1., 1.), c(1., -1.), c(3., 0.)])
            .unwrap();
        let ev = eig_hermitian(&h).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-13, "{ev:?}");
        assert!((ev[1] - 4.0).abs() < 1e-13, "{ev:?}");
        // with |off|² = 3 the roots are (5 ± √13)/2
        let s3 = 3f64.sqrt();
        let h = HermitianMatrix::from_complex(2, &[c(2., 0.), c(0., s3), c(0., -s3), c(3., 0.)])
            .unwrap();
        let ev = eig_hermitian(&h).unwrap();
        let r = 13f64.sqrt();
        assert!((ev[0] - (5.0 - r) / 2.0).abs() < 1e-13);
        assert!((ev[1] - (5.0 + r) / 2.0).abs() < 1e-13);
    }

    #[test]
    fn rejects_non_hermitian() {
        let h = HermitianMatrix::from_complex(2, &[c(1., 0.), c(1., 1.), c(1., 1.), c(1., 0.)]);
        assert!(matches!(h, Err(Error::Input(_))));
        let h = HermitianMatrix::new(2, vec![1.0, 2.0, 2.5, 1.0], vec![0.0; 4]);
        assert!(matches!(h, Err(Error::Input(_))));
    }

    /// Random unitary via Gram-Schmidt on a complex Gaussian matrix.
    fn random_unitary(n: usize, rng: &mut RngStream) -> Vec<Complex64> {
        let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
        for _ in 0..n {
            let mut v: Vec<Complex64> =
                (0..n).map(|_| c(rng.standard_normal(), rng.standard_normal())).collect();
            for u in &cols {
                let proj: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= proj * ui;
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            v.iter_mut().for_each(|z| *z /= norm);
            cols.push(v);
        }
        let mut u = vec![c(0., 0.); n * n];
        for (j, col) in cols.iter().enumerate() {
            for i in 0..n {
                u[i * n + j] = col[i];
            }
        }
        u
    }

    #[test]
    fn recovers_prescribed_spectrum() {
        let mut rng = RngStream::new(77, 1);
        for n in [1usize, 2, 3, 7, 30] {
            let u = random_unitary(n, &mut rng);
            let d: Vec<f64> = (0..n).map(|i| i as f64 * 1.5 - 4.0).collect();
            let mut h = vec![c(0., 0.); n * n];
            for i in 0..n {
                for j in 0..n {
                    let mut acc = c(0., 0.);
                    for k in 0..n {
                        acc += u[i * n + k] * d[k] * u[j * n + k].conj();
                    }
                    h[i * n + j] = acc;
                }
            }
            // symmetrize away rounding
            for i in 0..n {
                for j in i..n {
                    let avg = (h[i * n + j] + h[j * n + i].conj()) * 0.5;
                    h[i * n + j] = avg;
                    h[j * n + i] = avg.conj();
                }
            }
            let hm = HermitianMatrix::from_complex(n, &h).unwrap();
            let ev = eig_hermitian(&hm).unwrap();
            for (a, b) in ev.iter().zip(&d) {
                assert!((a - b).abs() < 1e-11, "n={n}: {ev:?} vs {d:?}");
            }
        }
    }
}
