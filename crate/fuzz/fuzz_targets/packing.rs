#![no_main]

use libfuzzer_sys::fuzz_target;
use squareknap::format::{parse_instance, parse_packing_doc};

const INSTANCE: &str = r#"{
  "bin": {"w": "1", "h": "3/2"},
  "items": [
    {"id": "a", "side": "1/2", "profit": "4"},
    {"id": "b", "side": "1/3", "profit": "2"},
    {"id": "c", "side": "3/4", "profit": "9"}
  ]
}"#;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(doc) = parse_packing_doc(text) else {
        return;
    };
    assert_eq!(parse_packing_doc(&doc.to_json()).expect("emitted packing parses"), doc);
    let inst = parse_instance(INSTANCE).expect("fixed instance");
    if let Ok(packing) = doc.to_packing(&inst) {
        assert_eq!(packing.check().is_ok(), packing.is_feasible());
    }
});
