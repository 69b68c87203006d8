#![no_main]

use libfuzzer_sys::fuzz_target;
use reflex_core::ingest::{parse_line, SourceFormat};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    // single-line contract: feed each line separately
    for line in text.lines().take(64) {
        for format in [
            SourceFormat::Syslog,
            SourceFormat::Json,
            SourceFormat::ApacheCommon,
            SourceFormat::Plain,
        ] {
            if let Some(parsed) = parse_line(line, format) {
                // fallback and success paths both preserve the raw bytes
                assert_eq!(parsed.raw, line);
                assert!(!parsed.message.is_empty());
            }
        }
    }
});
