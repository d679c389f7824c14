//! Experiment harness: configuration, seeded replicate runners, output
//! files with provenance sidecars, the sphericity test and the convergence
//! scan.

pub mod config;
pub mod convergence;
pub mod experiments;
pub mod output;
pub mod sphericity;

pub use config::{ExperimentConfig, ExperimentId, ResolvedConfig};
pub use convergence::{convergence_scan, two_sample_null_moments, ConvergenceRow};
pub use experiments::{run_experiment, ExperimentOutput};
pub use output::{run_replicates, stream_index, OutputWriter, Provenance};
pub use sphericity::{
    parse_complex_csv, read_complex_csv, sphericity_test, ComplexData, Decision, SphericityReport,
};
