use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::RngStream;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Identifies the run that produced an output file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub experiment_id: String,
    pub master_seed: u64,
    pub config_hash: String,
    pub version: &'static str,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    file: &'a str,
    columns: &'a [&'a str],
    #[serde(flatten)]
    provenance: &'a Provenance,
}

#[derive(Serialize)]
struct Summary<'a, T: Serialize> {
    #[serde(flatten)]
    provenance: &'a Provenance,
    summary: &'a T,
}

/// Writes CSV files, each with a JSON sidecar, into one directory.
pub struct OutputWriter {
    dir: PathBuf,
    provenance: Provenance,
    files: Vec<PathBuf>,
}

impl OutputWriter {
    pub fn new(dir: &Path, provenance: Provenance) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        Ok(OutputWriter {
            dir: dir.to_path_buf(),
            provenance,
            files: Vec::new(),
        })
    }

    pub fn csv<R, I>(&mut self, name: &str, columns: &[&str], rows: I) -> Result<PathBuf>
    where
        I: IntoIterator<Item = R>,
        R: AsRef<[f64]>,
    {
        let mut text = columns.join(",");
        text.push('\n');
        for row in rows {
            let row = row.as_ref();
            debug_assert_eq!(row.len(), columns.len());
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    text.push(',');
                }
                write_float(&mut text, *v);
            }
            text.push('\n');
        }
        let file = format!("{name}.csv");
        let path = self.write(&file, &text)?;
        let side = Sidecar {
            file: &file,
            columns,
            provenance: &self.provenance,
        };
        self.write(&format!("{name}.json"), &serde_json::to_string_pretty(&side)?)?;
        Ok(path)
    }

    pub fn summary<T: Serialize>(&mut self, name: &str, summary: &T) -> Result<PathBuf> {
        let s = Summary {
            provenance: &self.provenance,
            summary,
        };
        self.write(&format!("{name}.json"), &serde_json::to_string_pretty(&s)?)
    }

    pub fn files(&self) -> &[PathBuf] {
        &self.files
    }

    pub fn into_files(self) -> Vec<PathBuf> {
        self.files
    }

    fn write(&mut self, file: &str, text: &str) -> Result<PathBuf> {
        let path = self.dir.join(file);
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        self.files.push(path.clone());
        Ok(path)
    }
}

/// Shortest round-trip form; infinities as `inf`/`-inf`.
pub(crate) fn write_float(out: &mut String, v: f64) {
    if v == f64::INFINITY {
        out.push_str("inf");
    } else if v == f64::NEG_INFINITY {
        out.push_str("-inf");
    } else {
        let _ = write!(out, "{v}");
    }
}

/// Stream index for replicate `r` of the sampling task `tag`. Tags occupy
/// the high 32 bits so tasks never share a stream.
pub fn stream_index(tag: u32, r: usize) -> u64 {
    ((tag as u64) << 32) | r as u64
}

/// Runs `f` once per replicate on its own stream, in parallel; results come
/// back in replicate order regardless of scheduling.
pub fn run_replicates<T, F>(master_seed: u64, tag: u32, count: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut RngStream) -> Result<T> + Sync,
{
    (0..count)
        .into_par_iter()
        .map(|r| {
            let mut rng = RngStream::new(master_seed, stream_index(tag, r));
            f(&mut rng)
        })
        .collect()
}

pub(crate) fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (m, 0.0);
    }
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, var.sqrt())
}
