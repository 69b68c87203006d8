#![no_main]

use libfuzzer_sys::fuzz_target;
use reflex_core::reflex::parse_verdict;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(verdict) = parse_verdict(text, "fuzz-judge") {
        for rating in [verdict.relevance, verdict.informativeness, verdict.coherence] {
            assert!((1..=5).contains(&rating));
        }
        assert!((0.2..=1.0).contains(&verdict.overall));
    }
});
