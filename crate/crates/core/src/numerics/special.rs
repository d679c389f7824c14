//! Special functions: log-scale regularized incomplete gamma, normal and
//! gamma CDFs, and the large-argument Airy expansion.

use std::f64::consts::PI;

use statrs::function::erf::erfc;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

const MAX_ITERS: usize = 1_000_000;

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// `log P(a, x)`, the log of the regularized lower incomplete gamma function.
pub fn ln_gamma_p(a: f64, x: f64) -> Result<f64> {
    check(a, x)?;
    if x == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    if x < a + 1.0 {
        ln_p_series(a, x)
    } else {
        let lq = ln_q_continued_fraction(a, x)?;
        Ok(ln_one_minus_exp(lq))
    }
}

/// `log Q(a, x)`, the log of the regularized upper incomplete gamma function.
pub fn ln_gamma_q(a: f64, x: f64) -> Result<f64> {
    check(a, x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x < a + 1.0 {
        let lp = ln_p_series(a, x)?;
        Ok(ln_one_minus_exp(lp))
    } else {
        ln_q_continued_fraction(a, x)
    }
}

/// CDF of Gamma(shape, scale) at `x`.
pub fn gamma_cdf(shape: f64, scale: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    ln_gamma_p(shape, x / scale).map(f64::exp).unwrap_or(f64::NAN)
}

fn check(a: f64, x: f64) -> Result<()> {
    if !(a > 0.0 && a.is_finite()) || !(x >= 0.0) {
        return Err(Error::param(format!("incomplete gamma needs a > 0, x >= 0 (a={a}, x={x})")));
    }
    Ok(())
}

/// log(1 - e^v) for v <= 0.
fn ln_one_minus_exp(v: f64) -> f64 {
    if v > -std::f64::consts::LN_2 {
        (-v.exp_m1()).ln()
    } else {
        (-v.exp()).ln_1p()
    }
}

fn ln_p_series(a: f64, x: f64) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut ap = a;
    for _ in 0..MAX_ITERS {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term < sum * 1e-17 {
            return Ok(-x + a * x.ln() - ln_gamma(a + 1.0) + sum.ln());
        }
    }
    Err(Error::numeric(format!("incomplete gamma series did not converge (a={a}, x={x})")))
}

/// Modified Lentz evaluation of the continued fraction for Q(a, x).
fn ln_q_continued_fraction(a: f64, x: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITERS {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            return Ok(-x + a * x.ln() - ln_gamma(a) + h.ln());
        }
    }
    Err(Error::numeric(format!(
        "incomplete gamma continued fraction did not converge (a={a}, x={x})"
    )))
}

/// `(Ai(x), Ai'(x))` for `x > 0` via the modified Bessel representation
/// `Ai(x) = √(x/3) K_{1/3}(ζ) / π`, `Ai'(x) = −x K_{2/3}(ζ) / (π√3)` with
/// `ζ = (2/3) x^{3/2}`.
pub fn airy_ai(x: f64) -> (f64, f64) {
    assert!(x > 0.0, "airy_ai implemented for x > 0 only");
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let k13 = bessel_k_scaled(1.0 / 3.0, zeta);
    let k23 = bessel_k_scaled(2.0 / 3.0, zeta);
    let e = (-zeta).exp();
    let ai = (x / 3.0).sqrt() * k13 / PI * e;
    let aip = -x * k23 / (PI * 3f64.sqrt()) * e;
    (ai, aip)
}

/// `e^z K_ν(z)` for `z > 0` from `K_ν(z) = ∫_0^∞ e^{−z cosh t} cosh(νt) dt`.
/// The integrand is analytic and decays double-exponentially, so the
/// trapezoid rule converges geometrically in the step.
fn bessel_k_scaled(nu: f64, z: f64) -> f64 {
    const H: f64 = 1.0 / 32.0;
    let mut sum = 0.5; // t = 0 term, e^{-z(cosh 0 - 1)} = 1, halved
    let mut k = 1;
    loop {
        let t = k as f64 * H;
        // z (cosh t − 1) = 2 z sinh²(t/2), computed without cancellation
        let sh = (0.5 * t).sinh();
        let term = (-2.0 * z * sh * sh).exp() * (nu * t).cosh();
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
        k += 1;
    }
    sum * H
}

/// `(Ai(x), Ai'(x))` for `x >= 5` from the optimally truncated asymptotic
/// series in `ζ = (2/3) x^{3/2}`. Truncation error is roughly `e^{−2ζ}`, so
/// this is only double-precision accurate for x around 10 and beyond.
pub fn airy_ai_large(x: f64) -> (f64, f64) {
    debug_assert!(x >= 5.0);
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let pref = (-zeta).exp() / (2.0 * PI.sqrt());
    let (mut su, mut sv) = (1.0, 1.0);
    let mut u = 1.0f64;
    let mut last_u = f64::INFINITY;
    let mut last_v = f64::INFINITY;
    let mut zk = 1.0;
    for k in 1..60 {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
        zk *= -zeta;
        let tu = u / zk;
        let tv = v / zk;
        if tu.abs() >= last_u || tv.abs() >= last_v {
            break;
        }
        su += tu;
        sv += tv;
        last_u = tu.abs();
        last_v = tv.abs();
        if last_u < 1e-17 * su.abs() && last_v < 1e-17 * sv.abs() {
            break;
        }
    }
    let ai = pref / x.powf(0.25) * su;
    let aip = -pref * x.powf(0.25) * sv;
    (ai, aip)
}
