//! Replays the checked-in fuzz corpus through the same checks the fuzz
//! targets make, so the parsers stay covered on stable toolchains.

use std::fs;
use std::path::PathBuf;

use squareknap::format::{parse_instance, parse_packing_doc, parse_schedule_spec};
use squareknap::harness::parse_corpus_spec;
use squareknap::{Scalar, ThresholdSchedule};

const PACKING_INSTANCE: &str = r#"{
  "bin": {"w": "1", "h": "3/2"},
  "items": [
    {"id": "a", "side": "1/2", "profit": "4"},
    {"id": "b", "side": "1/3", "profit": "2"},
    {"id": "c", "side": "3/4", "profit": "9"}
  ]
}"#;

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(String, String)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let path = e.unwrap().path();
            let bytes = fs::read(&path).unwrap();
            (path.file_name().unwrap().to_string_lossy().into_owned(), String::from_utf8_lossy(&bytes).into_owned())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

fn check_rational(text: &str) -> bool {
    let Ok(x) = text.parse::<Scalar>() else {
        return false;
    };
    let canonical = x.to_string();
    let again: Scalar = canonical.parse().expect("canonical form parses");
    assert_eq!(again, x);
    assert_eq!(again.to_string(), canonical);
    true
}

fn check_instance(text: &str) -> bool {
    let Ok(inst) = parse_instance(text) else {
        return false;
    };
    let emitted = inst.to_json();
    let again = parse_instance(&emitted).expect("emitted instance parses");
    assert_eq!(again, inst);
    assert_eq!(again.to_json(), emitted);
    true
}

fn check_packing(text: &str) -> bool {
    let Ok(doc) = parse_packing_doc(text) else {
        return false;
    };
    assert_eq!(parse_packing_doc(&doc.to_json()).unwrap(), doc);
    let inst = parse_instance(PACKING_INSTANCE).unwrap();
    if let Ok(packing) = doc.to_packing(&inst) {
        assert_eq!(packing.check().is_ok(), packing.is_feasible());
    }
    true
}

fn check_corpus_spec(text: &str) -> bool {
    let Ok(spec) = parse_corpus_spec(text) else {
        return false;
    };
    let cells = spec.n.len() * spec.families.len() * spec.per_cell;
    if cells <= 16 && spec.n.iter().all(|&n| n <= 32) {
        if let Ok(specs) = spec.instances() {
            assert_eq!(specs.len(), cells);
        }
    }
    true
}

fn check_schedule(text: &str) -> bool {
    let Ok(spec) = parse_schedule_spec(text) else {
        return false;
    };
    let s = ThresholdSchedule::from_spec(Scalar::ratio(1, 8), Some(&spec)).expect("validated spec");
    for i in 0..4 {
        if let (Some(hi), Some(lo)) = (s.boundary(i), s.boundary(i + 1)) {
            assert!(lo < hi);
        }
    }
    true
}

fn replay(target: &str, check: fn(&str) -> bool) -> Vec<String> {
    seeds(target).into_iter().filter(|(_, text)| check(text)).map(|(name, _)| name).collect()
}

#[test]
fn rational_seeds() {
    let ok = replay("rational", check_rational);
    assert!(ok.contains(&"half".to_string()) && ok.contains(&"bare_decimal".to_string()));
    assert!(!ok.contains(&"zero_denominator".to_string()));
}

#[test]
fn instance_seeds() {
    let ok = replay("instance", check_instance);
    assert_eq!(ok, ["empty", "three_items", "with_schedule"]);
}

#[test]
fn packing_seeds() {
    assert_eq!(replay("packing", check_packing).len(), 4);
}

#[test]
fn corpus_spec_seeds() {
    assert_eq!(replay("corpus_spec", check_corpus_spec), ["mixed", "tiny"]);
}

#[test]
fn schedule_seeds() {
    let ok = replay("schedule", check_schedule);
    assert!(ok.contains(&"scaled".to_string()) && ok.contains(&"half".to_string()));
}

#[test]
fn hostile_inputs_are_rejected_without_panicking() {
    for text in ["", "/", "1/", "/2", "--1", "1.2.3", "0x10", "1e5", "NaN", "inf", " 1", "1/-2", "٣"] {
        check_rational(text);
    }
    let long = format!("0.{}", "7".repeat(4000));
    assert!(check_rational(&long));
    for text in [
        "{}",
        "[]",
        "null",
        r#"{"bin":{"w":"0","h":"1"},"items":[]}"#,
        r#"{"bin":{"w":"1","h":"1"},"items":[{"id":"a","side":"0","profit":"1"}]}"#,
        r#"{"bin":{"w":"1","h":"1"},"items":[{"id":"a","side":"1/2","profit":"-1"}]}"#,
        r#"{"bin":{"w":"1","h":"1"},"items":[],"schedule":{"base":"1/4","growth":0}}"#,
    ] {
        assert!(!check_instance(text), "{text}");
    }
    assert!(!check_packing(r#"{"placements":[{"id":"a","x":"0"}],"profit":"0","feasible":true}"#));
    assert!(!check_corpus_spec(r#"{"seed":1}"#));
    for (seed, per_cell, n) in [(1u64, u64::MAX, 4u64), (1, 1, u64::MAX), (u64::MAX, 2, 4)] {
        let text = format!(
            r#"{{"seed":{seed},"per_cell":{per_cell},"n":[{n}],"families":["uniform"],"algorithms":["greedy"],"epsilon":"1/8"}}"#
        );
        assert!(!check_corpus_spec(&text), "{text}");
    }
    assert!(!check_schedule(r#"{"base":"1/4","growth":-1}"#));
}
