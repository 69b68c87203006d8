#![no_main]

use libfuzzer_sys::fuzz_target;
use reflex_core::ingest::parse_paired;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok((dataset, _stats)) = parse_paired(text, "fuzz") {
        for group in &dataset.groups {
            assert!(!group.lines.is_empty());
            assert!(group.reference_summary.is_some());
        }
    }
});
