use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rmtlab::ensembles::{sample_hermite, sample_laguerre, HermiteParams, LaguerreParams, Spectrum};
use rmtlab::harness::{read_complex_csv, run_experiment, sphericity_test, ExperimentConfig, ExperimentId};
use rmtlab::ldp::{rate_extreme, rate_functional, GriddedMeasure, Side};
use rmtlab::numerics::RngStream;
use rmtlab::tracy_widom::{resolve_cache_dir, TableLabel, TableStore, CACHE_ENV};
use rmtlab::{Error, Result};

#[derive(Parser)]
#[command(name = "rmtlab", version, about = "Beta-Laguerre / beta-Hermite random matrix laboratory")]
struct Cli {
    /// Directory for cached Tracy-Widom and U+V tables.
    #[arg(long, global = true, env = CACHE_ENV)]
    cache_dir: Option<PathBuf>,

    /// JSON or TOML experiment config (`experiment` and `convergence`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw eigenvalue spectra from a beta ensemble.
    Sample(SampleArgs),
    /// Build (or fetch from cache) a distribution table.
    TwTable(TableArgs),
    /// Evaluate rate functions.
    #[command(subcommand)]
    Rate(RateCommand),
    /// Run a figure experiment.
    Experiment(ExperimentArgs),
    /// Sphericity test on a complex data matrix.
    Sphericity(SphericityArgs),
    /// Laguerre-to-Hermite convergence scan.
    Convergence(Overrides),
}

#[derive(Clone, Copy, ValueEnum)]
enum Ensemble {
    Hermite,
    Laguerre,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long, value_enum)]
    ensemble: Ensemble,
    #[arg(long)]
    n: usize,
    /// Degrees-of-freedom parameter (Laguerre only).
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 2.0)]
    beta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stream index of the first draw; draw `k` uses `stream + k`.
    #[arg(long, default_value_t = 0)]
    stream: u64,
    #[arg(long, default_value_t = 1)]
    count: u64,
    /// Write `sample_<k>.csv` plus sidecars here instead of printing.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Args)]
struct TableArgs {
    /// F1, F2, F4, F4_unscaled, F4_general, Lambda0_1, Lambda0_2, Lambda0_4 or UplusV.
    #[arg(long, default_value = "F2")]
    label: String,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    grid_step: Option<f64>,
    /// Output CSV path; prints to stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum RateCommand {
    /// Extreme-eigenvalue rate on a grid of x values.
    Extreme {
        #[arg(long, default_value_t = 2.0)]
        beta: f64,
        #[arg(long, default_value = "max")]
        side: String,
        /// Explicit points; otherwise a grid over (0, x_max].
        #[arg(long, value_delimiter = ',')]
        x: Vec<f64>,
        #[arg(long)]
        x_max: Option<f64>,
        #[arg(long, default_value_t = 100)]
        points: usize,
    },
    /// Empirical-measure rate functional of a gridded measure.
    Functional {
        #[arg(long, default_value_t = 2.0)]
        beta: f64,
        /// CSV with header `x,mass` on an equally spaced grid.
        #[arg(long, conflicts_with = "semicircle")]
        input: Option<PathBuf>,
        /// Use the discretized semicircle at this grid step instead.
        #[arg(long)]
        semicircle: Option<f64>,
    },
}

#[derive(Args)]
struct ExperimentArgs {
    /// One of fig1_compare, fig2_condition, fig3_extremes, fig4_rates,
    /// fig5_semicircle, convergence_scan. May come from --config instead.
    id: Option<String>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct Overrides {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    p_list: Option<Vec<f64>>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    betas: Option<Vec<f64>>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    grid_step: Option<f64>,
}

#[derive(Args)]
struct SphericityArgs {
    /// CSV of `re_1,im_1,…,re_p,im_p`, one row per observation.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Also write the report as JSON here.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let cache = Some(resolve_cache_dir(cli.cache_dir.as_deref()));
    let store = |tol: Option<f64>, step: Option<f64>| {
        let d = TableStore::in_memory();
        TableStore::new(tol.unwrap_or(d.tol()), step.unwrap_or(d.grid_step()), cache.clone())
    };
    match cli.command {
        Command::Sample(a) => sample(a),
        Command::TwTable(a) => {
            let label: TableLabel = a.label.parse().map_err(|e| match e {
                Error::Input(m) => Error::Usage(m),
                other => other,
            })?;
            let table = store(a.tol, a.grid_step)?.get(label)?;
            emit(a.output.as_deref(), &table.to_csv())
        }
        Command::Rate(r) => rate(r),
        Command::Experiment(a) => {
            let cfg = experiment_config(cli.config.as_deref(), a.id.as_deref(), a.overrides)?;
            experiment(&cfg, &store(None, None)?)
        }
        Command::Convergence(o) => {
            let cfg = experiment_config(cli.config.as_deref(), Some("convergence_scan"), o)?;
            experiment(&cfg, &store(None, None)?)
        }
        Command::Sphericity(a) => {
            let data = read_complex_csv(&a.input)?;
            let report = sphericity_test(&data, a.alpha, &store(None, None)?.u_plus_v()?)?;
            let json = serde_json::to_string_pretty(&report)?;
            if let Some(path) = &a.output {
                std::fs::write(path, &json).map_err(|e| Error::Io { path: path.clone(), source: e })?;
            }
            emit(None, &format!("{json}\n"))
        }
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io { path: p.into(), source: e }),
        None => {
            // a closed stdout pipe is not an error worth reporting
            let _ = std::io::stdout().write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn sample(a: SampleArgs) -> Result<()> {
    let draw = |k: u64| -> Result<Spectrum> {
        let mut rng = RngStream::new(a.seed, a.stream + k);
        match a.ensemble {
            Ensemble::Hermite => sample_hermite(&HermiteParams::new(a.n, a.beta)?, &mut rng),
            Ensemble::Laguerre => {
                let p = a.p.ok_or_else(|| Error::Usage("--p is required for laguerre".into()))?;
                sample_laguerre(&LaguerreParams::new(a.n, p, a.beta)?, &mut rng)
            }
        }
    };
    let mut text = String::from("draw,index,value\n");
    for k in 0..a.count {
        let s = draw(k)?;
        match &a.output_dir {
            Some(dir) => s.write(dir, &format!("sample_{k}"))?,
            None => {
                for (i, v) in s.values().iter().enumerate() {
                    text.push_str(&format!("{k},{i},{v:e}\n"));
                }
            }
        }
    }
    if a.output_dir.is_none() {
        emit(None, &text)?;
    }
    Ok(())
}

fn rate(r: RateCommand) -> Result<()> {
    match r {
        RateCommand::Extreme { beta, side, x, x_max, points } => {
            let side: Side = side.parse()?;
            if beta.is_nan() || beta <= 0.0 {
                return Err(Error::Parameter(format!("beta must be positive, got {beta}")));
            }
            let xs = if x.is_empty() {
                let hi = x_max.unwrap_or(5.0 * beta);
                if points == 0 || hi.is_nan() || hi <= 0.0 {
                    return Err(Error::Parameter("need points >= 1 and x_max > 0".into()));
                }
                (1..=points).map(|i| hi * i as f64 / points as f64).collect()
            } else {
                x
            };
            let mut text = String::from("x,rate\n");
            for v in xs {
                text.push_str(&format!("{v},{}\n", rate_extreme(v, beta, side)));
            }
            emit(None, &text)
        }
        RateCommand::Functional { beta, input, semicircle } => {
            let nu = match (input, semicircle) {
                (Some(path), _) => read_measure(&path)?,
                (None, Some(h)) => GriddedMeasure::semicircle(beta, h)?,
                (None, None) => {
                    return Err(Error::Usage("give --input or --semicircle".into()));
                }
            };
            emit(None, &format!("{}\n", rate_functional(&nu, beta)))
        }
    }
}

fn read_measure(path: &Path) -> Result<GriddedMeasure> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.into(), source: e })?;
    let mut grid = Vec::new();
    let mut mass = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (idx == 0 && line.starts_with('x')) {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                row: idx + 1,
                column: fields.len().min(2) + 1,
                message: format!("expected 2 fields, found {}", fields.len()),
            });
        }
        for (c, (f, out)) in fields.iter().zip([&mut grid, &mut mass]).enumerate() {
            out.push(f.parse::<f64>().map_err(|_| Error::Parse {
                row: idx + 1,
                column: c + 1,
                message: format!("not a number: {f:?}"),
            })?);
        }
    }
    GriddedMeasure::new(grid, mass)
}

fn experiment_config(config: Option<&Path>, id: Option<&str>, o: Overrides) -> Result<ExperimentConfig> {
    let mut cfg = match (config, id) {
        (Some(path), id) => {
            let cfg = ExperimentConfig::from_file(path)?;
            if let Some(id) = id {
                let id: ExperimentId = id.parse()?;
                if id != cfg.experiment_id {
                    return Err(Error::Usage(format!(
                        "command asks for {id} but {} configures {}",
                        path.display(),
                        cfg.experiment_id
                    )));
                }
            }
            cfg
        }
        (None, Some(id)) => ExperimentConfig::new(id.parse()?),
        (None, None) => return Err(Error::Usage("an experiment id or --config is required".into())),
    };
    let Overrides { n, p, p_list, beta, betas, replicates, seed, output_dir, tol, grid_step } = o;
    cfg.n = n.or(cfg.n);
    cfg.p = p.or(cfg.p);
    cfg.p_list = p_list.or(cfg.p_list);
    cfg.beta = beta.or(cfg.beta);
    cfg.betas = betas.or(cfg.betas);
    cfg.replicates = replicates.or(cfg.replicates);
    cfg.master_seed = seed.unwrap_or(cfg.master_seed);
    cfg.output_dir = output_dir.unwrap_or(cfg.output_dir);
    cfg.tol = tol.or(cfg.tol);
    cfg.grid_step = grid_step.or(cfg.grid_step);
    Ok(cfg)
}

fn experiment(cfg: &ExperimentConfig, store: &TableStore) -> Result<()> {
    let out = run_experiment(cfg, store)?;
    for f in &out.files {
        eprintln!("wrote {}", f.display());
    }
    emit(None, &format!("{}\n", serde_json::to_string_pretty(&out.summary)?))
}
