mod common;

use common::{cases, expected, golden_dir, run, VERBS};
use serde_json::Value;

#[test]
fn every_verb_matches_its_golden_output_twice() {
    let cases = cases();
    for v in VERBS {
        assert!(cases.iter().any(|c| c.code == 0 && c.args.iter().any(|a| a == v)), "no golden case for {v}");
    }
    for c in &cases {
        let expected = expected(c);
        let (code1, first) = run(&c.args);
        let (code2, second) = run(&c.args);
        assert_eq!(code1, c.code, "{}: exit code", c.name);
        assert_eq!(code2, c.code, "{}: exit code on rerun", c.name);
        assert_eq!(first, second, "{}: output differs between runs", c.name);
        assert_eq!(String::from_utf8_lossy(&first), String::from_utf8_lossy(&expected), "{}", c.name);
    }
}

#[test]
fn errors_are_typed_json() {
    for c in cases().iter().filter(|c| c.code != 0) {
        let (_, out) = run(&c.args);
        let v: Value = serde_json::from_slice(&out).unwrap();
        assert!(v["error"].is_string() && v["detail"].is_string(), "{}: {v}", c.name);
        let expected_parse = c.code == 1;
        assert_eq!(v["error"] == "ParseError", expected_parse, "{}: {v}", c.name);
    }
}

/// Deterministic corruptions of a valid input.
fn corruptions(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for cut in [1, text.len() / 3, text.len() / 2, text.len() - 2] {
        out.push(text[..cut].to_string());
    }
    let swaps = [
        ("\"L\": 2", "\"L\": 1"),
        ("\"L\": 2", "\"L\": 99"),
        ("\"1 2\"", "\"2 1\""),
        ("\"1 2\"", "\"1 1\""),
        ("\"1\"", "\"7\""),
        ("\"even\"", "\"odd\""),
        ("\"-1\"", "\"1/0\""),
        ("\"-1\"", "\"x\""),
        ("\"2\"", "\"0\""),
        ("1", "-1"),
        ("[", "[[]"),
        ("2", "0"),
    ];
    for (from, to) in swaps {
        if text.contains(from) {
            out.push(text.replacen(from, to, 1));
            out.push(text.replace(from, to));
        }
    }
    out
}

#[test]
fn malformed_inputs_never_crash() {
    let dir = std::env::temp_dir().join(format!("supermum-fuzz-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut seen = [0usize; 3];
    for c in cases().iter().filter(|c| c.code == 0 && !c.args.contains(&"text".to_string())) {
        let Some(pos) = c.args.iter().position(|a| a.ends_with(".json")) else { continue };
        let text = std::fs::read_to_string(golden_dir().join(&c.args[pos])).unwrap();
        for (i, bad) in corruptions(&text).into_iter().enumerate() {
            let path = dir.join(format!("{}-{i}.json", c.name));
            std::fs::write(&path, bad).unwrap();
            let mut args = c.args.clone();
            args[pos] = path.to_string_lossy().into_owned();
            let (code, out) = run(&args);
            assert!((0..=2).contains(&code), "{}-{i}: exit {code}", c.name);
            let v: Value = serde_json::from_slice(&out).unwrap_or_else(|e| panic!("{}-{i}: {e}", c.name));
            if code != 0 {
                assert!(v["error"].is_string(), "{}-{i}: {v}", c.name);
            }
            seen[code as usize] += 1;
        }
    }
    std::fs::remove_dir_all(&dir).ok();
    assert!(seen[1] > 0 && seen[2] > 0, "corpus should reach both error classes: {seen:?}");
}
