#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub struct Case {
    pub name: String,
    pub code: i32,
    pub args: Vec<String>,
}

/// Cases listed in `golden/cases.txt` as `name | exit code | arguments`.
pub fn cases() -> Vec<Case> {
    let text = std::fs::read_to_string(golden_dir().join("cases.txt")).unwrap();
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let parts: Vec<&str> = l.split('|').map(str::trim).collect();
            Case {
                name: parts[0].to_string(),
                code: parts[1].parse().unwrap(),
                args: parts[2].split_whitespace().map(String::from).collect(),
            }
        })
        .collect()
}

pub fn expected(c: &Case) -> Vec<u8> {
    std::fs::read(golden_dir().join("expected").join(format!("{}.out", c.name))).unwrap()
}

/// Runs the binary from the golden directory; returns (exit code, stdout).
pub fn run(args: &[String]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_supermum")).args(args).current_dir(golden_dir()).output().unwrap();
    (out.status.code().expect("terminated by signal"), out.stdout)
}

pub const VERBS: [&str; 13] = [
    "ber",
    "strace",
    "stranspose",
    "sexp",
    "berezin-int",
    "residue",
    "check-sc",
    "ramond-audit",
    "mumford-ramond",
    "mumford-ns",
    "mumford-ns-punctured",
    "ranks",
    "moduli-dim",
];
