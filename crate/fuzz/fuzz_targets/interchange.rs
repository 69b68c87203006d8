#![no_main]

use libfuzzer_sys::fuzz_target;
use reflex_core::ingest::parse_dataset;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(dataset) = parse_dataset(text, "fuzz") {
        for group in &dataset.groups {
            assert!(!group.lines.is_empty());
            assert!(group.lines.iter().all(|l| !l.message.is_empty()));
        }
    }
});
