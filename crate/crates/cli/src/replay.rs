use std::path::PathBuf;

use clap::Args;
use crashpbo::optimizer::replay_document;
use crashpbo::{Error, OptimizerState};

use crate::CliError;

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// A session export, or a stored session record from the service.
    export: PathBuf,
}

pub fn run(args: ReplayArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.export)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", args.export.display())))?;
    let doc: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", args.export.display())))?;
    // Service records embed the bare optimizer state.
    let state = match doc.get("state") {
        Some(s) if doc.get("id").is_some() => {
            let state: OptimizerState = serde_json::from_value(s.clone())
                .map_err(|e| CliError::Runtime(format!("{}: {e}", args.export.display())))?;
            state.to_json().map_err(CliError::runtime)?
        }
        _ => text,
    };
    let report = replay_document(&state).map_err(|e| match e {
        Error::SchemaVersion { .. } => CliError::Runtime(format!("schema version mismatch: {e}")),
        e => CliError::Runtime(format!("replay failed: {e}")),
    })?;
    println!("recorded dataset hash  {}", report.recorded_hash);
    println!("stored dataset hash    {}", report.stored_dataset_hash);
    println!("replayed dataset hash  {}", report.replayed_hash);
    if report.matches {
        println!("match");
        Ok(())
    } else {
        println!("MISMATCH: {}", report.detail);
        Err(CliError::Runtime("replay does not reproduce the recorded dataset".into()))
    }
}
