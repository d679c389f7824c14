//! Reference computations shared by the integration and acceptance tests.
//! Nothing here calls into the library's numerics: each oracle is a
//! separate, deliberately plain implementation.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Gamma};

/// `Ai(x)` and `Ai'(x)` from the large-x asymptotic expansion, good to
/// ~1e-12 relative for x ≥ 6.
pub fn airy_asymptotic(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let pre = (-zeta).exp() / (2.0 * std::f64::consts::PI.sqrt());
    let (mut su, mut sv) = (1.0, 1.0);
    let mut u = 1.0;
    let mut zk = 1.0;
    for k in 1..12 {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
        zk *= -zeta;
        su += u / zk;
        sv += v / zk;
    }
    (pre * su / x.powf(0.25), -pre * x.powf(0.25) * sv)
}

/// Tracy-Widom F₁ and F₂ on a uniform grid from a fixed-step RK4 solve of
/// Painlevé II carried along with its tail integrals.
pub struct TwOracle {
    pub x: Vec<f64>,
    pub f1: Vec<f64>,
    pub f2: Vec<f64>,
}

impl TwOracle {
    /// Integrates from 8 down to `x_end` with step `h`.
    pub fn solve(x_end: f64, h: f64) -> Self {
        let x0 = 8.0;
        let (ai, aip) = airy_asymptotic(x0);
        // (q, q', ∫_x q², ∫_x (t−x) q², ∫_x q), all tails from x0 dropped
        let mut y = [ai, aip, 0.0, 0.0, 0.0];
        let rhs = |x: f64, y: &[f64; 5]| -> [f64; 5] {
            let q = y[0];
            [y[1], x * q + 2.0 * q * q * q, -q * q, -y[2], -q]
        };
        let steps = ((x0 - x_end) / h).round() as usize;
        let mut xs = Vec::with_capacity(steps + 1);
        let mut f1 = Vec::with_capacity(steps + 1);
        let mut f2 = Vec::with_capacity(steps + 1);
        let mut push = |x: f64, y: &[f64; 5]| {
            let e2 = (-y[3]).exp();
            xs.push(x);
            f2.push(e2);
            f1.push((-0.5 * y[4]).exp() * e2.sqrt());
        };
        push(x0, &y);
        let dt = -h;
        for k in 0..steps {
            let x = x0 - k as f64 * h;
            let add = |a: &[f64; 5], b: &[f64; 5], s: f64| {
                let mut o = *a;
                for i in 0..5 {
                    o[i] += s * b[i];
                }
                o
            };
            let k1 = rhs(x, &y);
            let k2 = rhs(x + 0.5 * dt, &add(&y, &k1, 0.5 * dt));
            let k3 = rhs(x + 0.5 * dt, &add(&y, &k2, 0.5 * dt));
            let k4 = rhs(x + dt, &add(&y, &k3, dt));
            for i in 0..5 {
                y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            push(x0 - (k + 1) as f64 * h, &y);
        }
        xs.reverse();
        f1.reverse();
        f2.reverse();
        TwOracle { x: xs, f1, f2 }
    }

    /// Mean and standard deviation of a CDF sampled on `self.x`, by
    /// integrating the CDF itself (trapezoid rule).
    pub fn moments(&self, cdf: &[f64]) -> (f64, f64) {
        let (a, b) = (self.x[0], self.x[self.x.len() - 1]);
        let h = self.x[1] - self.x[0];
        let mut int_f = 0.0;
        let mut int_xf = 0.0;
        for i in 1..self.x.len() {
            int_f += 0.5 * h * (cdf[i] + cdf[i - 1]);
            int_xf += 0.5 * h * (self.x[i] * cdf[i] + self.x[i - 1] * cdf[i - 1]);
        }
        // E X = b − ∫F,  E X² = b² − a²F(a) − 2∫xF
        let mean = b - int_f - a * cdf[0];
        let m2 = b * b - a * a * cdf[0] - 2.0 * int_xf;
        (mean, (m2 - mean * mean).sqrt())
    }

    /// Linear interpolation of `cdf` at `x`.
    pub fn at(&self, cdf: &[f64], x: f64) -> f64 {
        let h = self.x[1] - self.x[0];
        let t = (x - self.x[0]) / h;
        let i = (t.floor() as usize).min(self.x.len() - 2);
        let w = t - i as f64;
        cdf[i] * (1.0 - w) + cdf[i + 1] * w
    }
}

/// Ordered pairs `(λ_min, λ_max)` drawn from the n = 2 Laguerre joint
/// density `∝ |λ₁−λ₂|^β (λ₁λ₂)^a e^{−(λ₁+λ₂)/2}` with
/// `a = β(p−1)/2 − 1`.
///
/// Proposal: `s = λ₁+λ₂ ~ Gamma(2a+2+β, 2)` and `u = λ₁/s ~ Beta(a+1, a+1)`,
/// which has density `∝ (λ₁+λ₂)^β (λ₁λ₂)^a e^{−s/2}`; accept with
/// probability `|λ₁−λ₂|^β / s^β = |2u−1|^β ≤ 1`.
pub fn n2_laguerre_rejection(beta: f64, p: f64, count: usize, seed: u64) -> Vec<(f64, f64)> {
    let a = beta * (p - 1.0) / 2.0 - 1.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sum = Gamma::new(2.0 * a + 2.0 + beta, 2.0).unwrap();
    let split = Beta::new(a + 1.0, a + 1.0).unwrap();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let s = sum.sample(&mut rng);
        let u = split.sample(&mut rng);
        if rng.random::<f64>() < (2.0 * u - 1.0).abs().powf(beta) {
            let (l1, l2) = (s * u, s * (1.0 - u));
            out.push((l1.min(l2), l1.max(l2)));
        }
    }
    out
}

pub fn mean_and_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

/// One-sample KS distance computed directly from the definition.
pub fn ks_one_sample(mut v: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}
