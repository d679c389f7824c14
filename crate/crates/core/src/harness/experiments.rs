//! Seeded runners that emit the data behind each figure.

use std::path::PathBuf;

use serde_json::{json, Value};

use super::config::{ExperimentConfig, ExperimentId, ResolvedConfig};
use super::convergence::{
    convergence_scan, hermite_summaries, summary_ks, transformed_laguerre_summaries,
    SpectrumSummary, CONVERGENCE_COLUMNS,
};
use super::output::{mean_sd, run_replicates, OutputWriter, Provenance, VERSION};
use crate::ensembles::{sample_laguerre, HermiteParams, LaguerreParams};
use crate::error::Result;
use crate::ldp::{gamma_rate_oracle, rate_extreme, semicircle_cdf, semicircle_pdf, Side};
use crate::numerics::{ks_distance, ks_two_sample_critical, EmpiricalSample};
use crate::scaling::{
    condition_number_of, condition_statistic_of, extreme_centerings_beta2, hermite_transform,
    smallest_centering, ScaledEmpiricalMeasure,
};
use crate::tracy_widom::{DistributionTable, TableStore};

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub files: Vec<PathBuf>,
    pub summary: Value,
}

// stream tags, one range per experiment
const TAG_FIG1_LAGUERRE: u32 = 1;
const TAG_FIG1_HERMITE: u32 = 2;
const TAG_FIG2: u32 = 10;
const TAG_FIG3: u32 = 20;
const TAG_FIG5: u32 = 50;

pub fn run_experiment(config: &ExperimentConfig, tables: &TableStore) -> Result<ExperimentOutput> {
    let cfg = config.resolve()?;
    let owned;
    let tables = if cfg.tol.is_some() || cfg.grid_step.is_some() {
        owned = TableStore::new(
            cfg.tol.unwrap_or(tables.tol()),
            cfg.grid_step.unwrap_or(tables.grid_step()),
            tables.cache_dir().map(Into::into),
        )?;
        &owned
    } else {
        tables
    };
    let provenance = Provenance {
        experiment_id: cfg.experiment_id.to_string(),
        master_seed: cfg.master_seed,
        config_hash: cfg.hash(),
        version: VERSION,
    };
    let mut out = OutputWriter::new(&config.output_dir, provenance)?;
    let summary = match cfg.experiment_id {
        ExperimentId::Fig1Compare => fig1_compare(&cfg, &mut out)?,
        ExperimentId::Fig2Condition => fig2_condition(&cfg, tables, &mut out)?,
        ExperimentId::Fig3Extremes => fig3_extremes(&cfg, tables, &mut out)?,
        ExperimentId::Fig4Rates => fig4_rates(&cfg, &mut out)?,
        ExperimentId::Fig5Semicircle => fig5_semicircle(&cfg, &mut out)?,
        ExperimentId::ConvergenceScan => convergence(&cfg, &mut out)?,
    };
    out.summary(&format!("{}_summary", cfg.experiment_id), &summary)?;
    Ok(ExperimentOutput {
        files: out.into_files(),
        summary,
    })
}

fn table_rows(t: &DistributionTable) -> impl Iterator<Item = [f64; 3]> + '_ {
    (0..t.len()).map(|i| [t.grid[i], t.cdf[i], t.pdf[i]])
}

fn fig1_compare(cfg: &ResolvedConfig, out: &mut OutputWriter) -> Result<Value> {
    let (n, p, beta, reps) = (cfg.n, cfg.p_list[0], cfg.betas[0], cfg.replicates);
    let lag = transformed_laguerre_summaries(
        &LaguerreParams::new(n, p, beta)?,
        reps,
        cfg.master_seed,
        TAG_FIG1_LAGUERRE,
    )?;
    let her = hermite_summaries(&HermiteParams::new(n, beta)?, reps, cfg.master_seed, TAG_FIG1_HERMITE)?;
    let stats = |s: &SpectrumSummary| [s.max, s.min, s.max - s.min, s.median];
    out.csv(
        "fig1_compare_replicates",
        &[
            "replicate",
            "laguerre_max",
            "laguerre_min",
            "laguerre_range",
            "laguerre_median",
            "hermite_max",
            "hermite_min",
            "hermite_range",
            "hermite_median",
        ],
        lag.iter().zip(&her).enumerate().map(|(r, (a, b))| {
            let mut row = vec![r as f64];
            row.extend(stats(a));
            row.extend(stats(b));
            row
        }),
    )?;
    let [ks_max, ks_min, ks_median] = summary_ks(&lag, &her)?;
    let range = |s: &[SpectrumSummary]| EmpiricalSample::new(s.iter().map(|x| x.max - x.min).collect());
    let ks_range = crate::numerics::ks_two_sample(&range(&lag)?, &range(&her)?)?;
    Ok(json!({
        "n": n, "p": p, "beta": beta, "replicates": reps,
        "ks_max": ks_max, "ks_min": ks_min, "ks_range": ks_range, "ks_median": ks_median,
        "ks_two_sample_critical_0.99": ks_two_sample_critical(0.01, reps, reps),
    }))
}

fn fig2_condition(cfg: &ResolvedConfig, tables: &TableStore, out: &mut OutputWriter) -> Result<Value> {
    let conv = tables.u_plus_v()?;
    let f2_mean = tables.tracy_widom(2.0)?.mean();
    let mut rows = Vec::new();
    let mut per_p = Vec::new();
    for (k, &p) in cfg.p_list.iter().enumerate() {
        let params = LaguerreParams::new(cfg.n, p, 2.0)?;
        let draws = run_replicates(cfg.master_seed, TAG_FIG2 + k as u32, cfg.replicates, |rng| {
            let s = sample_laguerre(&params, rng)?;
            Ok((condition_number_of(s.values())?, condition_statistic_of(s.values(), &params)?))
        })?;
        let stat: Vec<f64> = draws.iter().map(|d| d.1).collect();
        let (m, sd) = mean_sd(&stat);
        let ks = ks_distance(&EmpiricalSample::new(stat.clone())?, |x| conv.cdf_at(x))?;
        per_p.push(json!({
            "p": p, "ks_vs_uplusv": ks, "mean": m, "sd": sd,
            "std_error": sd / (stat.len() as f64).sqrt(),
        }));
        rows.extend(draws.iter().enumerate().map(|(r, d)| [p, r as f64, d.0, d.1]));
    }
    out.csv("fig2_condition_replicates", &["p", "replicate", "kappa", "statistic"], rows)?;
    out.csv("fig2_condition_uplusv", &["x", "cdf", "pdf"], table_rows(&conv))?;
    Ok(json!({
        "n": cfg.n, "beta": 2.0, "replicates": cfg.replicates,
        "target_mean": 2.0 * f2_mean,
        "by_p": per_p,
    }))
}

/// Pearson correlation.
pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let (ma, sa) = mean_sd(a);
    let (mb, sb) = mean_sd(b);
    let cov = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / (a.len() as f64 - 1.0);
    cov / (sa * sb)
}

/// `P(A < med A, B < med B) − P(A < med A)·P(B < med B)`, empirically.
pub fn quadrant_dependence(a: &[f64], b: &[f64]) -> f64 {
    let med = |v: &[f64]| {
        let mut s = v.to_vec();
        s.sort_by(f64::total_cmp);
        crate::ensembles::median_sorted(&s)
    };
    let (ma, mb) = (med(a), med(b));
    let n = a.len() as f64;
    let fa = a.iter().filter(|&&x| x < ma).count() as f64 / n;
    let fb = b.iter().filter(|&&x| x < mb).count() as f64 / n;
    let joint = a.iter().zip(b).filter(|(x, y)| **x < ma && **y < mb).count() as f64 / n;
    joint - fa * fb
}

/// Centering and scale for the largest eigenvalue. β = 2 uses the
/// independence constants; other β use the β-scaled analogue
/// `(β(p + 2√(np)), β√p·n^{−1/6})`, which is exploratory only.
fn largest_centering(params: &LaguerreParams) -> Result<(f64, f64, bool)> {
    if params.beta == 2.0 {
        let c = extreme_centerings_beta2(params)?;
        return Ok((c.mu_high, c.sigma, false));
    }
    let (n, p, b) = (params.n as f64, params.p, params.beta);
    Ok((b * (p + 2.0 * (n * p).sqrt()), b * p.sqrt() * n.powf(-1.0 / 6.0), true))
}

fn fig3_extremes(cfg: &ResolvedConfig, tables: &TableStore, out: &mut OutputWriter) -> Result<Value> {
    let beta = cfg.betas[0];
    let lambda0 = tables.lambda0(beta)?;
    let tw = tables.edge_law(beta)?;
    let mut rows = Vec::new();
    let mut per_p = Vec::new();
    for (k, &p) in cfg.p_list.iter().enumerate() {
        let params = LaguerreParams::new(cfg.n, p, beta)?;
        let (mu_min, s_min) = smallest_centering(&params);
        let (mu_max, s_max, exploratory) = largest_centering(&params)?;
        let draws = run_replicates(cfg.master_seed, TAG_FIG3 + k as u32, cfg.replicates, |rng| {
            let s = sample_laguerre(&params, rng)?;
            Ok(((s.min() - mu_min) / s_min, (s.max() - mu_max) / s_max))
        })?;
        let mins: Vec<f64> = draws.iter().map(|d| d.0).collect();
        let maxs: Vec<f64> = draws.iter().map(|d| d.1).collect();
        let ks_min = ks_distance(&EmpiricalSample::new(mins.clone())?, |x| lambda0.cdf_at(x))?;
        let ks_max = ks_distance(&EmpiricalSample::new(maxs.clone())?, |x| tw.cdf_at(x))?;
        per_p.push(json!({
            "p": p,
            "ks_min_vs_lambda0": ks_min,
            "ks_max_vs_tracy_widom": ks_max,
            "max_centering_exploratory": exploratory,
            "correlation_min_max": correlation(&mins, &maxs),
            "quadrant_dependence": quadrant_dependence(&mins, &maxs),
        }));
        rows.extend(draws.iter().enumerate().map(|(r, d)| [p, r as f64, d.0, d.1]));
    }
    out.csv("fig3_extremes_replicates", &["p", "replicate", "scaled_min", "scaled_max"], rows)?;
    out.csv("fig3_extremes_lambda0", &["x", "cdf", "pdf"], table_rows(&lambda0))?;
    out.csv("fig3_extremes_tracy_widom", &["x", "cdf", "pdf"], table_rows(&tw))?;
    Ok(json!({
        "n": cfg.n, "beta": beta, "replicates": cfg.replicates,
        "lambda0_table": lambda0.label.to_string(),
        "by_p": per_p,
    }))
}

fn fig4_rates(cfg: &ResolvedConfig, out: &mut OutputWriter) -> Result<Value> {
    let p = cfg.p_list[0];
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for &beta in &cfg.betas {
        let step = cfg.grid_step.unwrap_or(beta / 100.0);
        let count = (5.0 * beta / step).floor() as usize;
        for k in 1..=count {
            let x = k as f64 * step;
            let hi = rate_extreme(x, beta, Side::Max);
            let lo = rate_extreme(x, beta, Side::Min);
            let oracle = gamma_rate_oracle(x, beta, p)?;
            if let Some(v) = hi.finite().or(lo.finite()) {
                worst = worst.max((v - oracle).abs());
            }
            rows.push([beta, x, hi.to_f64(), lo.to_f64(), oracle]);
        }
    }
    out.csv("fig4_rates", &["beta", "x", "rate_max", "rate_min", "gamma_oracle"], rows)?;
    Ok(json!({
        "betas": cfg.betas, "oracle_p": p,
        "max_abs_rate_minus_oracle": worst,
    }))
}

fn fig5_semicircle(cfg: &ResolvedConfig, out: &mut OutputWriter) -> Result<Value> {
    let (n, p, beta) = (cfg.n, cfg.p_list[0], cfg.betas[0]);
    let params = LaguerreParams::new(n, p, beta)?;
    let measures = run_replicates(cfg.master_seed, TAG_FIG5, cfg.replicates, |rng| {
        let s = sample_laguerre(&params, rng)?;
        Ok(ScaledEmpiricalMeasure::from_transformed(&hermite_transform(&s, &params)?))
    })?;
    let mut ks = Vec::with_capacity(measures.len());
    for m in &measures {
        ks.push(ks_distance(&EmpiricalSample::new(m.atoms.clone())?, |x| {
            semicircle_cdf(x, beta)
        })?);
    }
    out.csv(
        "fig5_semicircle_atoms",
        &["replicate", "atom"],
        measures
            .iter()
            .enumerate()
            .flat_map(|(r, m)| m.atoms.iter().map(move |&a| [r as f64, a])),
    )?;
    let r = (2.0 * beta).sqrt();
    out.csv(
        "fig5_semicircle_density",
        &["x", "pdf", "cdf"],
        (0..=400).map(|i| {
            let x = -1.25 * r + 2.5 * r * i as f64 / 400.0;
            [x, semicircle_pdf(x, beta), semicircle_cdf(x, beta)]
        }),
    )?;
    let (mean_ks, _) = mean_sd(&ks);
    Ok(json!({
        "n": n, "p": p, "beta": beta, "replicates": cfg.replicates,
        "ks_by_replicate": ks, "mean_ks": mean_ks,
    }))
}

fn convergence(cfg: &ResolvedConfig, out: &mut OutputWriter) -> Result<Value> {
    let rows = convergence_scan(cfg.n, &cfg.p_list, cfg.betas[0], cfg.replicates, cfg.master_seed)?;
    out.csv("convergence_scan", &CONVERGENCE_COLUMNS, rows.iter().map(|r| r.to_row()))?;
    Ok(json!({
        "n": cfg.n, "beta": cfg.betas[0], "replicates": cfg.replicates,
        "rows": rows,
    }))
}
