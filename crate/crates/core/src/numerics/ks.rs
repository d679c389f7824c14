use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finite sample kept sorted ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalSample {
    values: Vec<f64>,
}

impl EmpiricalSample {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("empirical sample contains non-finite values"));
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        let n = self.values.len() as f64;
        self.values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0)
    }

    /// Empirical quantile with linear interpolation between order statistics.
    pub fn quantile(&self, q: f64) -> f64 {
        let n = self.values.len();
        let pos = q.clamp(0.0, 1.0) * (n - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = (lo + 1).min(n - 1);
        let w = pos - lo as f64;
        self.values[lo] * (1.0 - w) + self.values[hi] * w
    }

    pub fn median(&self) -> f64 {
        self.quantile(0.5)
    }
}

/// One-sample Kolmogorov-Smirnov statistic `sup |F_n - cdf|`, evaluated on
/// both sides of every jump of the empirical CDF.
pub fn ks_distance(sample: &EmpiricalSample, cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::input("KS distance of an empty sample"));
    }
    let n = sample.len() as f64;
    let mut d = 0.0f64;
    let vals = sample.values();
    let mut i = 0;
    while i < vals.len() {
        // tied values form a single jump
        let mut j = i;
        while j + 1 < vals.len() && vals[j + 1] == vals[i] {
            j += 1;
        }
        let f = cdf(vals[i]).clamp(0.0, 1.0);
        let below = i as f64 / n;
        let above = (j + 1) as f64 / n;
        d = d.max((f - below).abs()).max((above - f).abs());
        i = j + 1;
    }
    Ok(d)
}

/// Two-sample Kolmogorov-Smirnov statistic `sup |F_a - F_b|`.
pub fn ks_two_sample(a: &EmpiricalSample, b: &EmpiricalSample) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::input("KS distance of an empty sample"));
    }
    let (xa, xb) = (a.values(), b.values());
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < xa.len() && j < xb.len() {
        let v = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] == v {
            i += 1;
        }
        while j < xb.len() && xb[j] == v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Limiting Kolmogorov distribution `P(K <= x)` where `K = sup |B(t)|` of a
/// Brownian bridge.
pub fn kolmogorov_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < 1.0 {
        // theta-function form converges fast for small x
        let c = std::f64::consts::PI.powi(2) / (8.0 * x * x);
        let s: f64 = (0..50)
            .map(|k| (-(((2 * k + 1) * (2 * k + 1)) as f64) * c).exp())
            .sum();
        return (2.0 * std::f64::consts::PI).sqrt() / x * s;
    }
    let s: f64 = (1..100)
        .map(|k| {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            sign * (-2.0 * (k * k) as f64 * x * x).exp()
        })
        .sum();
    (1.0 - 2.0 * s).clamp(0.0, 1.0)
}

/// Upper `q`-quantile approximation for the two-sample KS statistic with
/// sample sizes `n` and `m` (asymptotic Kolmogorov law).
pub fn ks_two_sample_critical(q: f64, n: usize, m: usize) -> f64 {
    let (mut lo, mut hi) = (0.0, 5.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_cdf(mid) < 1.0 - q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let eff = (n as f64 * m as f64) / (n + m) as f64;
    hi / eff.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn uniform(x: f64) -> f64 {
        x.clamp(0.0, 1.0)
    }

    #[test]
    fn single_point() {
        let s = EmpiricalSample::new(vec![0.5]).unwrap();
        assert_eq!(ks_distance(&s, uniform).unwrap(), 0.5);
    }

    #[test]
    fn two_points() {
        let s = EmpiricalSample::new(vec![0.75, 0.25]).unwrap();
        assert!((ks_distance(&s, uniform).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn empty_is_an_error() {
        let s = EmpiricalSample::new(vec![]).unwrap();
        assert!(ks_distance(&s, uniform).is_err());
        assert!(ks_two_sample(&s, &s).is_err());
    }

    #[test]
    fn rejects_nan() {
        assert!(EmpiricalSample::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn two_sample_basic() {
        let a = EmpiricalSample::new(vec![1.0, 2.0, 3.0]).unwrap();
        let b = EmpiricalSample::new(vec![4.0, 5.0]).unwrap();
        assert_eq!(ks_two_sample(&a, &b).unwrap(), 1.0);
        assert_eq!(ks_two_sample(&a, &a).unwrap(), 0.0);
        let c = EmpiricalSample::new(vec![1.5, 2.5, 3.5]).unwrap();
        assert!((ks_two_sample(&a, &c).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn kolmogorov_quantiles() {
        // classical tabulated values
        assert!((kolmogorov_cdf(1.3581) - 0.95).abs() < 1e-4);
        assert!((kolmogorov_cdf(1.6276) - 0.99).abs() < 1e-4);
        // the two branches agree at the switch point
        let l = {
            let x: f64 = 1.0 - 1e-12;
            kolmogorov_cdf(x)
        };
        assert!((l - kolmogorov_cdf(1.0)).abs() < 1e-10);
    }

    proptest! {
        #[test]
        fn invariant_under_monotone_reparameterization(
            xs in prop::collection::vec(0.001f64..0.999, 1..60),
        ) {
            let s = EmpiricalSample::new(xs.clone()).unwrap();
            let d = ks_distance(&s, uniform).unwrap();
            // apply t -> t³ + 2t (strictly increasing) to sample and cdf
            let g = |t: f64| t * t * t + 2.0 * t;
            let ginv = |y: f64| {
                let (mut lo, mut hi) = (-1.0f64, 2.0f64);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if g(mid) < y { lo = mid } else { hi = mid }
                }
                0.5 * (lo + hi)
            };
            let t = EmpiricalSample::new(xs.iter().map(|&x| g(x)).collect()).unwrap();
            let d2 = ks_distance(&t, |y| uniform(ginv(y))).unwrap();
            prop_assert!((d - d2).abs() < 1e-9);
        }

        #[test]
        fn two_sample_symmetric(
            a in prop::collection::vec(-5.0f64..5.0, 1..50),
            b in prop::collection::vec(-5.0f64..5.0, 1..50),
        ) {
            let a = EmpiricalSample::new(a).unwrap();
            let b = EmpiricalSample::new(b).unwrap();
            prop_assert_eq!(ks_two_sample(&a, &b).unwrap(), ks_two_sample(&b, &a).unwrap());
        }
    }
}
