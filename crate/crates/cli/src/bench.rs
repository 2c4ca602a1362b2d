use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Args;
use crashpbo::bench::{export_results, run_benchmark, summary_table, BenchmarkConfig, ExportFormat};

use crate::CliError;

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Benchmark config (.toml or .json) with `BenchmarkConfig` keys.
    config: PathBuf,
    /// Result file; `.csv` or `.json`. May be repeated.
    #[arg(long, short)]
    out: Vec<PathBuf>,
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long)]
    parallel: Option<usize>,
    /// Master seed, overriding the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Repetitions per cell, overriding the config.
    #[arg(long)]
    repetitions: Option<usize>,
}

pub fn load_config(path: &Path) -> Result<BenchmarkConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let parsed = match path.extension().and_then(|e| e.to_str()) {
        Some("toml") => toml::from_str(&text).map_err(|e| e.to_string()),
        Some("json") => serde_json::from_str(&text).map_err(|e| e.to_string()),
        _ => Err("config must be a .toml or .json file".to_string()),
    };
    parsed.map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub fn run(args: BenchArgs) -> Result<(), CliError> {
    let mut config = load_config(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(r) = args.repetitions {
        config.repetitions = r;
    }
    config.validate().map_err(|e| CliError::Usage(format!("{}: {e}", args.config.display())))?;
    let outputs = args
        .out
        .iter()
        .map(|p| ExportFormat::from_path(p).map(|f| (p, f)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    if args.parallel == Some(0) {
        return Err(CliError::Usage("--parallel must be at least 1".into()));
    }

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.parallel {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(CliError::runtime)?;
    let cells = config.cells().len();
    eprintln!("running {cells} cells on {} threads", pool.current_num_threads());
    let started = Instant::now();
    let result = pool.install(|| run_benchmark(&config)).map_err(CliError::runtime)?;

    for (path, format) in outputs {
        export_results(&result, path, format)
            .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
        eprintln!("wrote {}", path.display());
    }
    let failed = result.cells.iter().filter(|c| c.error.is_some()).count();
    print!("{}", summary_table(&result));
    eprintln!("finished in {:.1} s", started.elapsed().as_secs_f64());
    if failed > 0 {
        eprintln!("warning: {failed} of {cells} cells failed; see the error column");
    }
    Ok(())
}
