use reflex_core::bench::{aggregate, read_records, render_report, ReportFormat};

use crate::out::{progress, write_data};
use crate::{CliError, ReportArgs};

pub fn run(args: ReportArgs, quiet: bool) -> Result<(), CliError> {
    let format: ReportFormat = args.format.parse().map_err(CliError::Usage)?;
    if !args.records.is_file() {
        return Err(CliError::usage(format!("records file {} does not exist", args.records.display())));
    }
    let text = std::fs::read_to_string(&args.records)
        .map_err(|e| CliError::runtime(format!("failed to read {}: {e}", args.records.display())))?;
    let records = read_records(&text, &args.records.display().to_string())
        .map_err(|e| CliError::runtime(e.to_string()))?;

    let tables = aggregate(&records);
    let bytes = render_report(&tables, format);
    write_data(args.out.as_deref(), &bytes)?;

    progress(
        quiet,
        format!("report: {} record(s) across {} backend table(s)", records.len(), tables.len()),
    );
    Ok(())
}
