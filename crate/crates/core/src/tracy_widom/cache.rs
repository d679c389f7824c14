//! Lazily built, disk-cached distribution tables.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use super::painleve::{solve_painleve2_on_grid, PainleveSolution, DEFAULT_GRID_STEP, DEFAULT_TOL};
use super::tables::{
    build_tw_table_with, convolve_self, lambda0_table, DistributionTable, F4Convention, TableLabel,
};
use crate::error::{Error, Result};

pub const CACHE_ENV: &str = "RMTLAB_CACHE";
pub const BUILDER_VERSION: &str = concat!("rmtlab-", env!("CARGO_PKG_VERSION"), "/tw-1");

/// Convention used for the β = 4 smallest-eigenvalue law.
pub const LAMBDA0_F4: F4Convention = F4Convention::GeneralBeta;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableMeta {
    pub label: TableLabel,
    pub beta: f64,
    pub tol: f64,
    pub grid_step: f64,
    pub builder_version: String,
}

/// Cache directory from an explicit override, else `$RMTLAB_CACHE`, else a
/// directory under the system temp dir.
pub fn resolve_cache_dir(flag: Option<&Path>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    match std::env::var_os(CACHE_ENV) {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => std::env::temp_dir().join("rmtlab-cache"),
    }
}

/// Source of Tracy-Widom, Λ₀ and U+V tables at a fixed solver tolerance and
/// grid step. Tables are memoized in memory and, when a directory is set,
/// on disk.
#[derive(Debug)]
pub struct TableStore {
    tol: f64,
    grid_step: f64,
    dir: Option<PathBuf>,
    solution: OnceLock<PainleveSolution>,
    memo: Mutex<HashMap<TableLabel, DistributionTable>>,
}

impl TableStore {
    pub fn new(tol: f64, grid_step: f64, dir: Option<PathBuf>) -> Result<Self> {
        if !(tol > 0.0) || !(grid_step > 0.0) {
            return Err(Error::param("table tolerance and grid step must be positive"));
        }
        Ok(TableStore {
            tol,
            grid_step,
            dir,
            solution: OnceLock::new(),
            memo: Mutex::new(HashMap::new()),
        })
    }

    /// Default tolerance and grid, no disk cache.
    pub fn in_memory() -> Self {
        Self::new(DEFAULT_TOL, DEFAULT_GRID_STEP, None).expect("defaults are valid")
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn grid_step(&self) -> f64 {
        self.grid_step
    }

    pub fn cache_dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn solution(&self) -> Result<&PainleveSolution> {
        if let Some(s) = self.solution.get() {
            return Ok(s);
        }
        let s = solve_painleve2_on_grid(8.0, -10.0, self.tol, self.grid_step)?;
        Ok(self.solution.get_or_init(|| s))
    }

    pub fn get(&self, label: TableLabel) -> Result<DistributionTable> {
        if let Some(t) = self.memo.lock().expect("table memo poisoned").get(&label) {
            return Ok(t.clone());
        }
        let table = match self.load(label)? {
            Some(t) => t,
            None => {
                let t = self.build(label)?;
                if let Err(e) = self.store(&t) {
                    eprintln!("warning: could not write {label} table to cache: {e}");
                }
                t
            }
        };
        self.memo
            .lock()
            .expect("table memo poisoned")
            .insert(label, table.clone());
        Ok(table)
    }

    /// Tracy-Widom table for β ∈ {1, 2, 4} in the scaled F₄ convention.
    pub fn tracy_widom(&self, beta: f64) -> Result<DistributionTable> {
        self.get(tw_label(beta)?)
    }

    /// Law of `Λ₀` with `−Λ₀ ~ F_β`.
    pub fn lambda0(&self, beta: f64) -> Result<DistributionTable> {
        tw_label(beta)?;
        self.get(TableLabel::Lambda0(beta as u8))
    }

    /// The Tracy-Widom law `F_β` with `−Λ₀ ~ F_β` under the sampler's
    /// normalization; for β = 4 this is the [`LAMBDA0_F4`] convention.
    pub fn edge_law(&self, beta: f64) -> Result<DistributionTable> {
        self.get(lambda0_base(beta)?)
    }

    pub fn u_plus_v(&self) -> Result<DistributionTable> {
        self.get(TableLabel::UplusV)
    }

    fn build(&self, label: TableLabel) -> Result<DistributionTable> {
        let sol = self.solution()?;
        match label {
            TableLabel::F1 => build_tw_table_with(1.0, sol, F4Convention::Scaled),
            TableLabel::F2 => build_tw_table_with(2.0, sol, F4Convention::Scaled),
            TableLabel::F4 => build_tw_table_with(4.0, sol, F4Convention::Scaled),
            TableLabel::F4Unscaled => build_tw_table_with(4.0, sol, F4Convention::Unscaled),
            TableLabel::F4General => build_tw_table_with(4.0, sol, F4Convention::GeneralBeta),
            TableLabel::Lambda0(b) => lambda0_table(&self.get(lambda0_base(b as f64)?)?),
            TableLabel::UplusV => convolve_self(&self.get(TableLabel::F2)?),
        }
    }

    fn meta(&self, label: TableLabel) -> TableMeta {
        TableMeta {
            label,
            beta: label.beta(),
            tol: self.tol,
            grid_step: self.grid_step,
            builder_version: BUILDER_VERSION.to_string(),
        }
    }

    fn paths(&self, label: TableLabel) -> Option<(PathBuf, PathBuf)> {
        let dir = self.dir.as_ref()?;
        let stem = format!("{label}-tol{:e}-h{:e}", self.tol, self.grid_step);
        Some((dir.join(format!("{stem}.csv")), dir.join(format!("{stem}.json"))))
    }

    /// A cached table, or `None` when absent or built under other settings.
    fn load(&self, label: TableLabel) -> Result<Option<DistributionTable>> {
        let Some((csv, json)) = self.paths(label) else {
            return Ok(None);
        };
        let (Ok(meta_text), Ok(csv_text)) = (fs::read_to_string(&json), fs::read_to_string(&csv))
        else {
            return Ok(None);
        };
        match serde_json::from_str::<TableMeta>(&meta_text) {
            Ok(m) if m == self.meta(label) => {}
            _ => return Ok(None),
        }
        Ok(DistributionTable::from_csv(&csv_text, label).ok())
    }

    fn store(&self, table: &DistributionTable) -> Result<()> {
        let Some((csv, json)) = self.paths(table.label) else {
            return Ok(());
        };
        let dir = self.dir.as_ref().expect("paths implies dir");
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_atomic(&csv, &table.to_csv())?;
        write_atomic(&json, &serde_json::to_string_pretty(&self.meta(table.label))?)
    }
}

fn lambda0_base(beta: f64) -> Result<TableLabel> {
    Ok(match tw_label(beta)? {
        TableLabel::F4 => match LAMBDA0_F4 {
            F4Convention::Scaled => TableLabel::F4,
            F4Convention::Unscaled => TableLabel::F4Unscaled,
            F4Convention::GeneralBeta => TableLabel::F4General,
        },
        other => other,
    })
}

fn tw_label(beta: f64) -> Result<TableLabel> {
    match beta {
        1.0 => Ok(TableLabel::F1),
        2.0 => Ok(TableLabel::F2),
        4.0 => Ok(TableLabel::F4),
        _ => Err(Error::domain(format!(
            "Tracy-Widom tables exist for beta in {{1, 2, 4}}, got {beta}"
        ))),
    }
}

fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    fs::write(&tmp, text).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cache_round_trip_and_validation() {
        let dir = tempfile::tempdir().unwrap();
        let store = TableStore::new(DEFAULT_TOL, DEFAULT_GRID_STEP, Some(dir.path().into())).unwrap();
        let built = store.get(TableLabel::F2).unwrap();
        assert!(fs::read_dir(dir.path()).unwrap().count() >= 2);

        let fresh = TableStore::new(DEFAULT_TOL, DEFAULT_GRID_STEP, Some(dir.path().into())).unwrap();
        assert_eq!(fresh.load(TableLabel::F2).unwrap().unwrap(), built);

        // tampered metadata is a miss, not an error
        let (_, json) = fresh.paths(TableLabel::F2).unwrap();
        let text = fs::read_to_string(&json).unwrap().replace("tw-1", "tw-0");
        fs::write(&json, text).unwrap();
        assert!(fresh.load(TableLabel::F2).unwrap().is_none());
        assert_eq!(fresh.get(TableLabel::F2).unwrap(), built);

        // different tolerance means a different key
        let other = TableStore::new(1e-10, DEFAULT_GRID_STEP, Some(dir.path().into())).unwrap();
        assert!(other.load(TableLabel::F2).unwrap().is_none());
    }

    #[test]
    fn derived_tables() {
        let store = TableStore::in_memory();
        let l2 = store.lambda0(2.0).unwrap();
        assert_eq!(l2.label, TableLabel::Lambda0(2));
        assert_eq!(store.lambda0(4.0).unwrap().grid.len(), l2.grid.len());
        assert_eq!(store.u_plus_v().unwrap().label, TableLabel::UplusV);
        assert!(matches!(store.tracy_widom(3.0), Err(Error::Domain(_))));
    }

    #[test]
    fn cache_dir_resolution_prefers_flag() {
        let p = Path::new("/some/where");
        assert_eq!(resolve_cache_dir(Some(p)), p);
    }
}
