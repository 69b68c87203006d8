use reflex_core::bench::{
    aggregate, render_report, run_benchmark, validate_run, write_records, MetricKind, RunConfig,
};

use crate::out::{progress, write_atomic, write_data};
use crate::{BenchArgs, CliError};

pub fn run(args: BenchArgs, quiet: bool) -> Result<(), CliError> {
    // Everything up to run_benchmark is validation: any failure exits 2
    // before a single cache write or provider call.
    let config = RunConfig::from_path(&args.config).map_err(|e| CliError::usage(e.to_string()))?;
    let plan = validate_run(config).map_err(|e| CliError::usage(e.to_string()))?;

    if args.dry_run {
        let groups: usize = plan.datasets.iter().map(|d| d.groups.len()).sum();
        let metrics: Vec<&str> = plan.metrics.iter().map(|m| m.as_str()).collect();
        let backends: Vec<&str> = plan.backend_configs.iter().map(|b| b.backend_id.as_str()).collect();
        let embed_bound = if plan.metrics.contains(&MetricKind::ReflexEmbedding) {
            plan.pair_count() * 2
        } else {
            0
        };
        let judge_bound = if plan.metrics.contains(&MetricKind::ReflexJudge) {
            plan.pair_count()
        } else {
            0
        };
        let mut out = String::new();
        out.push_str(&format!("datasets: {} ({groups} groups)\n", plan.datasets.len()));
        out.push_str(&format!("backends: {}\n", backends.join(", ")));
        out.push_str(&format!("metrics: {}\n", metrics.join(", ")));
        out.push_str(&format!("pairs: {}\n", plan.pair_count()));
        out.push_str(&format!("records: {}\n", plan.record_count()));
        out.push_str(&format!("summary calls needed: {}\n", plan.summary_calls_needed()));
        out.push_str(&format!("embedding calls: up to {embed_bound}\n"));
        out.push_str(&format!("judge calls: up to {judge_bound}\n"));
        out.push_str(&format!("cache_dir: {}\n", plan.config.cache_dir.display()));
        return write_data(None, out.as_bytes());
    }

    let (records, stats) = run_benchmark(&plan).map_err(|e| CliError::runtime(e.to_string()))?;

    let mut buf = Vec::new();
    write_records(&records, &mut buf)
        .map_err(|e| CliError::runtime(format!("failed to serialize records: {e}")))?;
    write_data(plan.config.records_out.as_deref(), &buf)?;

    if let Some(dir) = &plan.config.report_dir {
        let tables = aggregate(&records);
        let mut formats = plan.config.output_formats.clone();
        formats.dedup();
        for format in formats {
            let bytes = render_report(&tables, format);
            let path = dir.join(format!("report.{}", format.extension()));
            write_atomic(&path, &bytes)?;
            progress(quiet, format!("bench: wrote {}", path.display()));
        }
    }

    progress(
        quiet,
        format!(
            "bench: {} records ({} ok, {} failed), {} provider call(s), {} cache hit(s)",
            records.len(),
            stats.ok_records,
            stats.failed_records,
            stats.provider_calls,
            stats.cache_hits
        ),
    );
    Ok(())
}
