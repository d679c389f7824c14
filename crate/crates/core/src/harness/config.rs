use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentId {
    Fig1Compare,
    Fig2Condition,
    Fig3Extremes,
    Fig4Rates,
    Fig5Semicircle,
    ConvergenceScan,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 6] = [
        ExperimentId::Fig1Compare,
        ExperimentId::Fig2Condition,
        ExperimentId::Fig3Extremes,
        ExperimentId::Fig4Rates,
        ExperimentId::Fig5Semicircle,
        ExperimentId::ConvergenceScan,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentId::Fig1Compare => "fig1_compare",
            ExperimentId::Fig2Condition => "fig2_condition",
            ExperimentId::Fig3Extremes => "fig3_extremes",
            ExperimentId::Fig4Rates => "fig4_rates",
            ExperimentId::Fig5Semicircle => "fig5_semicircle",
            ExperimentId::ConvergenceScan => "convergence_scan",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| {
                let known: Vec<&str> = ExperimentId::ALL.iter().map(|id| id.as_str()).collect();
                Error::Usage(format!(
                    "unknown experiment {s:?}; expected one of {}",
                    known.join(", ")
                ))
            })
    }
}

/// Experiment settings as read from flags or a config file. Unset fields
/// take per-experiment defaults in [`ExperimentConfig::resolve`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment_id: ExperimentId,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub p_list: Option<Vec<f64>>,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub betas: Option<Vec<f64>>,
    #[serde(default)]
    pub replicates: Option<usize>,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Painlevé solver tolerance for Tracy-Widom tables.
    #[serde(default)]
    pub tol: Option<f64>,
    /// Grid step for Tracy-Widom tables or the rate-function x grid.
    #[serde(default)]
    pub grid_step: Option<f64>,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl ExperimentConfig {
    pub fn new(experiment_id: ExperimentId) -> Self {
        ExperimentConfig {
            experiment_id,
            n: None,
            p: None,
            p_list: None,
            beta: None,
            betas: None,
            replicates: None,
            master_seed: 0,
            output_dir: default_output_dir(),
            tol: None,
            grid_step: None,
        }
    }

    /// Reads a JSON or TOML file, chosen by extension (`.toml` is TOML,
    /// anything else JSON).
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        if path.extension().is_some_and(|e| e == "toml") {
            toml::from_str(&text).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
        } else {
            serde_json::from_str(&text).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
        }
    }

    /// Fills defaults and validates everything before any sampling.
    pub fn resolve(&self) -> Result<ResolvedConfig> {
        use ExperimentId::*;
        let id = self.experiment_id;
        let (n, p_list, betas, replicates) = match id {
            Fig1Compare => (50, vec![1_250_000.0], vec![2.0], 10_000),
            Fig2Condition => (50, vec![500.0, 2500.0, 25_000.0, 125_000.0], vec![2.0], 10_000),
            Fig3Extremes => (50, vec![12_500.0, 125_000.0, 1_250_000.0], vec![2.0], 10_000),
            Fig4Rates => (1, vec![10_000.0], vec![1.0, 2.0], 1),
            Fig5Semicircle => (200, vec![20_000.0], vec![2.0], 20),
            ConvergenceScan => (
                50,
                vec![500.0, 2500.0, 25_000.0, 125_000.0, 1_250_000.0],
                vec![2.0],
                2000,
            ),
        };
        let n = self.n.unwrap_or(n);
        let p_list = match (&self.p_list, self.p) {
            (Some(list), None) => list.clone(),
            (None, Some(p)) => vec![p],
            (None, None) => p_list,
            (Some(_), Some(_)) => {
                return Err(Error::param("give either p or p_list, not both"));
            }
        };
        let betas = match (&self.betas, self.beta) {
            (Some(list), None) => list.clone(),
            (None, Some(b)) => vec![b],
            (None, None) => betas,
            (Some(_), Some(_)) => return Err(Error::param("give either beta or betas, not both")),
        };
        let replicates = self.replicates.unwrap_or(replicates);

        if replicates < 1 {
            return Err(Error::param("replicates must be >= 1"));
        }
        if n < 1 {
            return Err(Error::param("n must be >= 1"));
        }
        if p_list.is_empty() || betas.is_empty() {
            return Err(Error::param("p_list and betas must be nonempty"));
        }
        for &b in &betas {
            if !(b > 0.0 && b.is_finite()) {
                return Err(Error::param(format!("beta must be > 0, got {b}")));
            }
        }
        if id != Fig4Rates {
            for &p in &p_list {
                if !(p.is_finite() && p >= n as f64) {
                    return Err(Error::param(format!("need p >= n (n={n}, p={p})")));
                }
            }
        }
        if betas.len() > 1 && id != Fig4Rates {
            return Err(Error::param(format!("{id} takes a single beta")));
        }
        match id {
            Fig2Condition if betas[0] != 2.0 => {
                return Err(Error::Domain(format!(
                    "{id}: the condition-number law is stated for beta = 2"
                )));
            }
            Fig1Compare | Fig5Semicircle if p_list.len() != 1 => {
                return Err(Error::param(format!("{id} takes a single p")));
            }
            Fig3Extremes if ![1.0, 2.0, 4.0].contains(&betas[0]) => {
                return Err(Error::Domain(format!(
                    "{id}: Tracy-Widom limits are tabulated for beta in {{1, 2, 4}}"
                )));
            }
            _ => {}
        }
        for v in [self.tol, self.grid_step].into_iter().flatten() {
            if !(v > 0.0) {
                return Err(Error::param("tol and grid_step must be positive"));
            }
        }
        Ok(ResolvedConfig {
            experiment_id: id,
            n,
            p_list,
            betas,
            replicates,
            master_seed: self.master_seed,
            tol: self.tol,
            grid_step: self.grid_step,
        })
    }
}

/// Fully specified experiment; its hash identifies the outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedConfig {
    pub experiment_id: ExperimentId,
    pub n: usize,
    pub p_list: Vec<f64>,
    pub betas: Vec<f64>,
    pub replicates: usize,
    pub master_seed: u64,
    pub tol: Option<f64>,
    pub grid_step: Option<f64>,
}

impl ResolvedConfig {
    /// SHA-256 of the canonical JSON form; the output directory is not part
    /// of it.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex(&Sha256::digest(json.as_bytes()))
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
