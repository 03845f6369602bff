#![no_main]

use libfuzzer_sys::fuzz_target;
use squareknap::Scalar;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(x) = text.parse::<Scalar>() {
        let canonical = x.to_string();
        let again: Scalar = canonical.parse().expect("canonical form parses");
        assert_eq!(again, x);
        assert_eq!(again.to_string(), canonical);
    }
});
