//! Synthetic benchmarks: test functions, GP sample paths, median crash
//! thresholds, a simulated decision maker and the benchmark runner.

pub mod export;
pub mod functions;
pub mod oracle;
pub mod problem;
pub mod runner;
pub mod sample_path;
pub mod sobol;

pub use export::{export_results, summary_table, ExportFormat};
pub use oracle::simulate_dm;
pub use problem::{compute_threshold, GridConfig, Objective, ProblemSpec, TestProblem};
pub use runner::{
    run_benchmark, Aggregate, Algorithm, BenchmarkConfig, BenchmarkResult, CellResult, ModelConfig,
};
pub use sample_path::{GpSamplePath, SamplePathParams};
