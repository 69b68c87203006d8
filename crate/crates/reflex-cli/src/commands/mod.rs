pub mod bench;
pub mod evaluate;
pub mod ingest;
pub mod report;
pub mod summarize;
