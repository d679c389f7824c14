//! Gamma and chi variates for arbitrary real shape.
//!
//! Marsaglia & Tsang squeeze/rejection for shape >= 1; shapes below one are
//! boosted to `shape + 1` and corrected with a `U^(1/shape)` factor.

use super::rng::RngStream;
use crate::error::{Error, Result};

/// Draw from Gamma(shape, scale) with mean `shape * scale`.
pub fn sample_gamma(shape: f64, scale: f64, rng: &mut RngStream) -> Result<f64> {
    if !(shape > 0.0 && shape.is_finite()) {
        return Err(Error::param(format!("gamma shape must be > 0, got {shape}")));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::param(format!("gamma scale must be > 0, got {scale}")));
    }
    Ok(scale * standard_gamma(shape, rng))
}

/// Draw from the chi distribution with `k` (possibly non-integer) degrees of
/// freedom: the square root of a Gamma(k/2, 2) variate.
pub fn sample_chi(k: f64, rng: &mut RngStream) -> Result<f64> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::param(format!("chi degrees of freedom must be > 0, got {k}")));
    }
    Ok((2.0 * standard_gamma(0.5 * k, rng)).sqrt())
}

/// Gamma(shape, 1), shape > 0 assumed.
pub(crate) fn standard_gamma(shape: f64, rng: &mut RngStream) -> f64 {
    if shape < 1.0 {
        let boost = rng.uniform_open().powf(1.0 / shape);
        return marsaglia_tsang(shape + 1.0, rng) * boost;
    }
    marsaglia_tsang(shape, rng)
}

fn marsaglia_tsang(shape: f64, rng: &mut RngStream) -> f64 {
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let (x, v) = loop {
            let x = rng.standard_normal();
            let v = 1.0 + c * x;
            if v > 0.0 {
                break (x, v * v * v);
            }
        };
        let u = rng.uniform_open();
        let x2 = x * x;
        // squeeze
        if u < 1.0 - 0.0331 * x2 * x2 {
            return d * v;
        }
        if u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moments(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, var)
    }

    #[test]
    fn exponential_special_case() {
        let n = 100_000;
        let mut rng = RngStream::new(11, 0);
        let xs: Vec<f64> = (0..n).map(|_| sample_gamma(1.0, 2.0, &mut rng).unwrap()).collect();
        let (mean, _) = moments(&xs);
        // sd of Exp(mean 2) is 2
        let se = 2.0 / (n as f64).sqrt();
        assert!((mean - 2.0).abs() < 3.0 * se, "mean {mean}");
    }

    #[test]
    fn gamma_mean_and_variance() {
        let n = 100_000;
        let mut rng = RngStream::new(12, 0);
        let xs: Vec<f64> = (0..n).map(|_| sample_gamma(2.5, 2.0, &mut rng).unwrap()).collect();
        let (mean, var) = moments(&xs);
        let nf = n as f64;
        // Gamma(k, θ): var = kθ² = 10, fourth central moment = 3k(k+2)θ⁴ + 6kθ⁴
        let se_mean = (10.0 / nf).sqrt();
        let mu4 = (3.0 * 2.5 * 4.5 + 6.0 * 2.5) * 16.0;
        let se_var = ((mu4 - 100.0) / nf).sqrt();
        assert!((mean - 5.0).abs() < 3.0 * se_mean, "mean {mean}");
        assert!((var - 10.0).abs() < 3.0 * se_var, "var {var}");
    }

    #[test]
    fn small_shape_boost() {
        let n = 100_000;
        let mut rng = RngStream::new(13, 0);
        let xs: Vec<f64> = (0..n).map(|_| sample_gamma(0.3, 1.0, &mut rng).unwrap()).collect();
        assert!(xs.iter().all(|&x| x >= 0.0));
        let (mean, _) = moments(&xs);
        let se = (0.3f64 / n as f64).sqrt();
        assert!((mean - 0.3).abs() < 3.0 * se, "mean {mean}");
    }

    #[test]
    fn rejects_bad_parameters() {
        let mut rng = RngStream::new(0, 0);
        assert!(matches!(sample_gamma(0.0, 1.0, &mut rng), Err(Error::Parameter(_))));
        assert!(matches!(sample_gamma(1.0, -1.0, &mut rng), Err(Error::Parameter(_))));
        assert!(matches!(sample_chi(-1.0, &mut rng), Err(Error::Parameter(_))));
        assert!(matches!(sample_chi(0.0, &mut rng), Err(Error::Parameter(_))));
    }

    #[test]
    fn chi_square_moment_identity() {
        let n = 100_000;
        for (seed, k) in [(21u64, 2.0f64), (22, 3.7), (23, 0.4), (24, 250.0)] {
            let mut rng = RngStream::new(seed, 0);
            let mean_sq = (0..n)
                .map(|_| sample_chi(k, &mut rng).unwrap().powi(2))
                .sum::<f64>()
                / n as f64;
            // Var(χ²_k) = 2k; 3 standard errors
            let se = (2.0 * k / n as f64).sqrt();
            assert!((mean_sq - k).abs() < 3.0 * se, "k={k}: mean {mean_sq}");
        }
    }
}
