#![no_main]

use libfuzzer_sys::fuzz_target;
use squareknap::format::parse_schedule_spec;
use squareknap::{Scalar, ThresholdSchedule};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(spec) = parse_schedule_spec(text) else {
        return;
    };
    let s = ThresholdSchedule::from_spec(Scalar::ratio(1, 8), Some(&spec)).expect("validated spec");
    for i in 0..4 {
        if let (Some(hi), Some(lo)) = (s.boundary(i), s.boundary(i + 1)) {
            assert!(lo < hi);
        }
    }
});
