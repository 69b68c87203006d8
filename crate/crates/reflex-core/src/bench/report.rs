//! Render aggregate tables as markdown, CSV, or JSON.
//!
//! All formats lay metrics out as rows and datasets as columns with values
//! fixed to four decimals. A cell that has no successful record renders as a
//! placeholder (markdown `—`, empty CSV field, JSON `null`) rather than a
//! zero. The JSON form additionally carries coverage, medians, standard
//! deviations, and failure reasons.

use serde::{Deserialize, Serialize};

use super::{AggregateTable, CellAggregate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Markdown,
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(format!("unknown report format `{other}` (expected markdown|csv|json)")),
        }
    }
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Markdown => "md",
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        }
    }
}

/// Render tables to document bytes in the requested format.
pub fn render_report(tables: &[AggregateTable], format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Markdown => render_markdown(tables).into_bytes(),
        ReportFormat::Csv => render_csv(tables).into_bytes(),
        ReportFormat::Json => render_json(tables).into_bytes(),
    }
}

fn cell_text(cell: &CellAggregate) -> Option<String> {
    cell.mean.map(|m| format!("{m:.4}"))
}

fn render_markdown(tables: &[AggregateTable]) -> String {
    let mut out = String::from("# Benchmark Report\n");
    if tables.is_empty() {
        out.push_str("\n_No records to report._\n");
        return out;
    }
    for table in tables {
        out.push_str(&format!("\n## {}\n\n", table.backend_id));
        out.push_str("Metric");
        for dataset in &table.datasets {
            out.push_str(&format!(" | {dataset}"));
        }
        out.push('\n');
        out.push_str("---");
        for _ in &table.datasets {
            out.push_str(" | ---");
        }
        out.push('\n');
        for row in &table.rows {
            out.push_str(row.metric.display_name());
            for cell in &row.cells {
                match cell_text(cell) {
                    Some(text) => out.push_str(&format!(" | {text}")),
                    None => out.push_str(" | —"),
                }
            }
            out.push('\n');
        }

        let mut partial: Vec<String> = Vec::new();
        for row in &table.rows {
            for (i, cell) in row.cells.iter().enumerate() {
                if cell.total_count > 0 && cell.coverage < 1.0 {
                    partial.push(format!(
                        "{}/{} {:.2}",
                        row.metric.display_name(),
                        table.datasets[i],
                        cell.coverage
                    ));
                }
            }
        }
        if !partial.is_empty() {
            out.push_str(&format!("\nCoverage below 1.0: {}\n", partial.join(", ")));
        }
    }
    out
}

fn render_csv(tables: &[AggregateTable]) -> String {
    // one header across backends: union of dataset columns, sorted
    let mut datasets: Vec<&String> = tables.iter().flat_map(|t| &t.datasets).collect();
    datasets.sort();
    datasets.dedup();

    let mut out = String::from("backend,metric");
    for dataset in &datasets {
        out.push(',');
        out.push_str(&csv_escape(dataset));
    }
    out.push('\n');

    for table in tables {
        for row in &table.rows {
            out.push_str(&csv_escape(&table.backend_id));
            out.push(',');
            out.push_str(row.metric.as_str());
            for dataset in &datasets {
                out.push(',');
                if let Some(idx) = table.datasets.iter().position(|d| &d == dataset) {
                    if let Some(text) = cell_text(&row.cells[idx]) {
                        out.push_str(&text);
                    }
                }
            }
            out.push('\n');
        }
    }
    out
}

fn csv_escape(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn render_json(tables: &[AggregateTable]) -> String {
    #[derive(Serialize)]
    struct JsonCell<'a> {
        dataset: &'a str,
        mean: Option<f64>,
        coverage: f64,
        ok_count: usize,
        total_count: usize,
        median: Option<f64>,
        std_dev: Option<f64>,
        failure_reasons: &'a [String],
    }
    #[derive(Serialize)]
    struct JsonRow<'a> {
        metric: &'a str,
        display_name: &'a str,
        cells: Vec<JsonCell<'a>>,
    }
    #[derive(Serialize)]
    struct JsonTable<'a> {
        backend_id: &'a str,
        datasets: &'a [String],
        rows: Vec<JsonRow<'a>>,
    }
    #[derive(Serialize)]
    struct JsonReport<'a> {
        tables: Vec<JsonTable<'a>>,
    }

    let report = JsonReport {
        tables: tables
            .iter()
            .map(|table| JsonTable {
                backend_id: &table.backend_id,
                datasets: &table.datasets,
                rows: table
                    .rows
                    .iter()
                    .map(|row| JsonRow {
                        metric: row.metric.as_str(),
                        display_name: row.metric.display_name(),
                        cells: row
                            .cells
                            .iter()
                            .enumerate()
                            .map(|(i, cell)| JsonCell {
                                dataset: &table.datasets[i],
                                mean: cell.mean,
                                coverage: cell.coverage,
                                ok_count: cell.ok_count,
                                total_count: cell.total_count,
                                median: cell.median,
                                std_dev: cell.std_dev,
                                failure_reasons: &cell.failure_reasons,
                            })
                            .collect(),
                    })
                    .collect(),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    text
}
