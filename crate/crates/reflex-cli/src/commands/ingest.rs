use reflex_core::ingest::{
    default_filters, load_dataset, write_dataset, FilterRule, IngestError, InputFormat, LoadOptions,
    LogLevel,
};

use crate::out::{progress, write_data};
use crate::{CliError, FormatArg, IngestArgs};

pub fn run(args: IngestArgs, quiet: bool) -> Result<(), CliError> {
    if !args.input.is_file() {
        return Err(CliError::usage(format!("input {} does not exist", args.input.display())));
    }
    if args.group_size == 0 {
        return Err(CliError::usage("--group-size must be at least 1"));
    }

    let format = match args.format {
        FormatArg::Syslog => InputFormat::Syslog,
        FormatArg::Json => InputFormat::Json,
        FormatArg::Apache => InputFormat::Apache,
        FormatArg::Plain => InputFormat::Plain,
        FormatArg::Paired => InputFormat::Paired,
    };

    let mut filters = if args.no_default_filters {
        Vec::new()
    } else {
        default_filters()
    };
    if let Some(level) = &args.filter_level {
        let level = LogLevel::parse(level)
            .ok_or_else(|| CliError::usage(format!("unknown level `{level}` for --filter-level")))?;
        filters.push(FilterRule::LevelAtOrBelow(level));
    }
    for pattern in &args.filter_patterns {
        let rule = FilterRule::pattern(pattern).map_err(|e| CliError::usage(e.to_string()))?;
        filters.push(rule);
    }

    let options = LoadOptions {
        dataset_name: args.dataset.clone(),
        group_size: args.group_size,
        filters,
    };
    let (dataset, stats) = load_dataset(&args.input, format, &options).map_err(|e| match e {
        IngestError::InvalidPattern { .. } => CliError::usage(e.to_string()),
        other => CliError::runtime(other.to_string()),
    })?;

    let mut buf = Vec::new();
    write_dataset(&dataset, &mut buf)
        .map_err(|e| CliError::runtime(format!("failed to serialize dataset: {e}")))?;
    write_data(args.out.as_deref(), &buf)?;

    progress(
        quiet,
        format!(
            "ingest: {} lines read, {} dropped empty, {} parse fallbacks, {} filtered, {} groups",
            stats.lines_read, stats.dropped_empty, stats.parse_fallbacks, stats.filtered_out, stats.groups
        ),
    );
    Ok(())
}
