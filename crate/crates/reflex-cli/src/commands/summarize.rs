use reflex_core::ingest::read_dataset;
use reflex_core::summarize::{build_backend, run_backends, BackendConfig, ChatBackend, SummaryOutcome};

use crate::out::{progress, write_data};
use crate::{CliError, SummarizeArgs};

pub fn run(args: SummarizeArgs, quiet: bool) -> Result<(), CliError> {
    if !args.dataset.is_file() {
        return Err(CliError::usage(format!("dataset {} does not exist", args.dataset.display())));
    }
    if args.concurrency == 0 {
        return Err(CliError::usage("--concurrency must be at least 1"));
    }

    let mut backends: Vec<Box<dyn ChatBackend>> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for path in &args.backends {
        let config = BackendConfig::from_path(path).map_err(|e| CliError::usage(e.to_string()))?;
        if !seen.insert(config.backend_id.clone()) {
            return Err(CliError::usage(format!("duplicate backend_id {}", config.backend_id)));
        }
        backends.push(build_backend(&config).map_err(|e| CliError::usage(e.to_string()))?);
    }

    let dataset = read_dataset(&args.dataset).map_err(|e| CliError::runtime(e.to_string()))?;
    progress(
        quiet,
        format!(
            "summarize: {} groups x {} backends ({} pairs)",
            dataset.groups.len(),
            backends.len(),
            dataset.groups.len() * backends.len()
        ),
    );

    let outcomes = run_backends(&backends, &dataset.groups, args.concurrency);
    let ok = outcomes.iter().filter(|o| matches!(o, SummaryOutcome::Ok(_))).count();

    let mut buf = Vec::new();
    for outcome in &outcomes {
        let line = serde_json::to_string(outcome)
            .map_err(|e| CliError::runtime(format!("failed to serialize outcome: {e}")))?;
        buf.extend_from_slice(line.as_bytes());
        buf.push(b'\n');
    }
    write_data(args.out.as_deref(), &buf)?;

    progress(quiet, format!("summarize: {} ok, {} failed", ok, outcomes.len() - ok));
    Ok(())
}
