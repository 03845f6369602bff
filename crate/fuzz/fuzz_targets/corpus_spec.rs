#![no_main]

use libfuzzer_sys::fuzz_target;
use squareknap::harness::parse_corpus_spec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(spec) = parse_corpus_spec(text) else {
        return;
    };
    // generation is cheap only for small corpora
    let cells = spec.n.len().saturating_mul(spec.families.len()).saturating_mul(spec.per_cell);
    if cells <= 16 && spec.n.iter().all(|&n| n <= 32) {
        if let Ok(specs) = spec.instances() {
            assert_eq!(specs.len(), cells);
        }
    }
});
