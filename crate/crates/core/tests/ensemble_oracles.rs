mod common;

use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF, Gamma, Normal};

use rmtlab::ensembles::{
    sample_hermite, sample_laguerre, sample_laguerre_model, Bidiagonal, HermiteParams,
    LaguerreParams,
};
use rmtlab::numerics::{ks_two_sample, ks_two_sample_critical, EmpiricalSample, RngStream};

fn laguerre_draws(params: &LaguerreParams, count: usize, seed: u64, layout: Bidiagonal) -> Vec<Vec<f64>> {
    (0..count)
        .map(|r| {
            let mut rng = RngStream::new(seed, r as u64);
            sample_laguerre_model(params, &mut rng, layout).unwrap().values().to_vec()
        })
        .collect()
}

#[test]
fn single_eigenvalue_laws() {
    let draws = 20_000;
    // 99.9% point of the one-sample KS law
    let crit = 1.95 / (draws as f64).sqrt();
    for (p, beta) in [(10.0, 2.0), (7.3, 1.0)] {
        let params = LaguerreParams::new(1, p, beta).unwrap();
        let v: Vec<f64> = laguerre_draws(&params, draws, 11, Bidiagonal::Lower)
            .into_iter()
            .map(|s| s[0])
            .collect();
        // shape βp/2, scale 2
        let law = Gamma::new(beta * p / 2.0, 0.5).unwrap();
        let d = common::ks_one_sample(v, |x| law.cdf(x));
        assert!(d < crit, "Laguerre n=1 p={p} beta={beta}: KS {d}");
    }
    let normal = Normal::new(0.0, 1.0).unwrap();
    for beta in [1.0, 2.0, 4.0] {
        let params = HermiteParams::new(1, beta).unwrap();
        let v: Vec<f64> = (0..draws)
            .map(|r| sample_hermite(&params, &mut RngStream::new(12, r as u64)).unwrap().values()[0])
            .collect();
        let d = common::ks_one_sample(v, |x| normal.cdf(x));
        assert!(d < crit, "Hermite n=1 beta={beta}: KS {d}");
    }
}

#[test]
fn laguerre_trace_identity() {
    // E tr(B Bᵀ) = Σ over all χ² entries of their degrees of freedom
    for (n, p, beta) in [(5, 20.0, 1.0), (4, 9.5, 2.5)] {
        let params = LaguerreParams::new(n, p, beta).unwrap();
        let traces: Vec<f64> = laguerre_draws(&params, 10_000, 3, Bidiagonal::Lower)
            .iter()
            .map(|s| s.iter().sum())
            .collect();
        let dof: f64 = (0..n).map(|i| beta * (p - i as f64)).sum::<f64>()
            + (1..n).map(|i| beta * (n - i) as f64).sum::<f64>();
        assert!((dof - beta * n as f64 * p).abs() < 1e-9);
        let (m, se) = common::mean_and_se(&traces);
        assert!((m - dof).abs() < 3.0 * se, "n={n}: mean trace {m} vs {dof} (se {se})");
    }
}

#[test]
fn hermite_second_moment_identity() {
    // E Σx² = n + βn(n−1)/2 for the weight e^{−x²/2}
    let (n, beta) = (6, 1.5);
    let params = HermiteParams::new(n, beta).unwrap();
    let sums: Vec<f64> = (0..10_000)
        .map(|r| {
            let s = sample_hermite(&params, &mut RngStream::new(4, r)).unwrap();
            s.values().iter().map(|x| x * x).sum()
        })
        .collect();
    let expected = n as f64 + beta * (n * (n - 1)) as f64 / 2.0;
    let (m, se) = common::mean_and_se(&sums);
    assert!((m - expected).abs() < 3.0 * se, "{m} vs {expected}");
}

#[test]
fn n2_means_match_rejection_sampler() {
    for (beta, p) in [(1.0, 5.0), (2.0, 6.0)] {
        let params = LaguerreParams::new(2, p, beta).unwrap();
        let ours = laguerre_draws(&params, 40_000, 21, Bidiagonal::Lower);
        let oracle = common::n2_laguerre_rejection(beta, p, 40_000, 22);
        for (k, name) in [(0usize, "min"), (1, "max")] {
            let a: Vec<f64> = ours.iter().map(|s| s[k]).collect();
            let b: Vec<f64> = oracle.iter().map(|s| if k == 0 { s.0 } else { s.1 }).collect();
            let (ma, sa) = common::mean_and_se(&a);
            let (mb, sb) = common::mean_and_se(&b);
            let se = sa.hypot(sb);
            assert!((ma - mb).abs() < 3.0 * se, "beta={beta} {name}: {ma} vs {mb} (se {se})");
        }
    }
}

/// χ² homogeneity statistic and degrees of freedom for two samples of
/// `(λ_min, λ_max)` binned on pooled quantiles.
fn homogeneity(a: &[(f64, f64)], b: &[(f64, f64)], bins: usize) -> (f64, usize) {
    let cuts = |f: fn(&(f64, f64)) -> f64| {
        let mut v: Vec<f64> = a.iter().chain(b).map(f).collect();
        v.sort_by(f64::total_cmp);
        (1..bins).map(|k| v[k * v.len() / bins]).collect::<Vec<f64>>()
    };
    let (c0, c1) = (cuts(|s| s.0), cuts(|s| s.1));
    let cell = |s: &(f64, f64)| {
        let i = c0.partition_point(|&c| c <= s.0);
        let j = c1.partition_point(|&c| c <= s.1);
        i * bins + j
    };
    let mut counts = vec![[0.0f64; 2]; bins * bins];
    for s in a {
        counts[cell(s)][0] += 1.0;
    }
    for s in b {
        counts[cell(s)][1] += 1.0;
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut stat = 0.0;
    let mut used = 0;
    for c in counts.iter().filter(|c| c[0] + c[1] >= 20.0) {
        let tot = c[0] + c[1];
        let (ea, eb) = (tot * na / (na + nb), tot * nb / (na + nb));
        stat += (c[0] - ea).powi(2) / ea + (c[1] - eb).powi(2) / eb;
        used += 1;
    }
    (stat, used - 1)
}

#[test]
fn n2_joint_law_matches_density() {
    for (beta, p) in [(1.0, 5.0), (2.0, 6.0), (0.7, 3.4)] {
        let params = LaguerreParams::new(2, p, beta).unwrap();
        let ours: Vec<(f64, f64)> = laguerre_draws(&params, 20_000, 31, Bidiagonal::Lower)
            .iter()
            .map(|s| (s[0], s[1]))
            .collect();
        let oracle = common::n2_laguerre_rejection(beta, p, 20_000, 32);
        let (stat, df) = homogeneity(&ours, &oracle, 5);
        let crit = ChiSquared::new(df as f64).unwrap().inverse_cdf(1.0 - 1e-3);
        assert!(stat < crit, "beta={beta} p={p}: chi2 {stat} on {df} df (crit {crit})");
    }
}

#[test]
fn bidiagonal_transpose_gives_same_law() {
    let params = LaguerreParams::new(5, 12.0, 1.5).unwrap();
    let draws = 5_000;
    let lower = laguerre_draws(&params, draws, 41, Bidiagonal::Lower);
    let upper = laguerre_draws(&params, draws, 42, Bidiagonal::Upper);
    let crit = ks_two_sample_critical(1e-3, draws, draws);
    for k in [0, 2, 4] {
        let col = |s: &[Vec<f64>]| EmpiricalSample::new(s.iter().map(|v| v[k]).collect()).unwrap();
        let d = ks_two_sample(&col(&lower), &col(&upper)).unwrap();
        assert!(d < crit, "eigenvalue {k}: KS {d} (crit {crit})");
    }
}

#[test]
fn huge_p_stays_finite_and_ordered() {
    let params = LaguerreParams::new(50, 1.25e8, 2.0).unwrap();
    let s = sample_laguerre(&params, &mut RngStream::new(1, 0)).unwrap();
    assert!(s.values().windows(2).all(|w| w[0] <= w[1]));
    // every eigenvalue is near βp at this aspect ratio
    assert!(s.values().iter().all(|&v| (v / (2.0 * 1.25e8) - 1.0).abs() < 0.01));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn laguerre_spectra_are_valid(
        n in 1usize..12,
        extra in 0.0f64..200.0,
        beta in 0.2f64..6.0,
        seed in any::<u64>(),
        stream in any::<u64>(),
    ) {
        let params = LaguerreParams::new(n, n as f64 + extra, beta).unwrap();
        let a = sample_laguerre(&params, &mut RngStream::new(seed, stream)).unwrap();
        let b = sample_laguerre(&params, &mut RngStream::new(seed, stream)).unwrap();
        prop_assert_eq!(a.values(), b.values());
        prop_assert_eq!(a.values().len(), n);
        prop_assert!(a.values().iter().all(|&v| v > 0.0 && v.is_finite()));
        prop_assert!(a.values().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn hermite_spectra_are_valid(n in 1usize..16, beta in 0.2f64..6.0, seed in any::<u64>()) {
        let params = HermiteParams::new(n, beta).unwrap();
        let s = sample_hermite(&params, &mut RngStream::new(seed, 0)).unwrap();
        prop_assert_eq!(s.values().len(), n);
        prop_assert!(s.values().iter().all(|v| v.is_finite()));
        prop_assert!(s.values().windows(2).all(|w| w[0] <= w[1]));
    }
}
