//! Helpers for driving the `qwalk` binary from tests.
#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qwalk"));
    cmd.env_remove("QWALK_SEED").env_remove("RUST_LOG");
    cmd
}

pub fn run(args: &[&str], out: &Path) -> Output {
    bin()
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("failed to launch qwalk")
}

pub fn run_ok(args: &[&str], out: &Path) -> Output {
    let o = run(args, out);
    assert!(
        o.status.success(),
        "qwalk {args:?} failed: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    o
}

pub fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

pub fn schema(name: &str) -> serde_json::Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("schema")
        .join(format!("{name}.schema.json"));
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

pub fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// JSON artifacts expected to be byte-identical across runs, with contents.
pub fn reproducible_json(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .filter(|p| p.file_name().unwrap() != "timing.json")
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

/// Small invocations of every subcommand, cheap enough for repeated runs.
pub fn quick_commands() -> Vec<Vec<String>> {
    let csv = data("quarter_closes.csv").to_string_lossy().into_owned();
    let market = "--spot 6 --strike 7 --rate 0.04 --vol 0.4 --maturity-days 90";
    [
        format!("fit-returns {csv} --num 4 --step 1 --restarts 2 --seed 11"),
        "fit-binomial --n 31 --p 0.3 --num 2 --step 3 --restarts 2 --seed 11".to_string(),
        format!("fit-lognormal {market} --num 3 --step 4 --restarts 2 --seed 11"),
        format!("price-call {market}"),
        "dtqw-demo --coin H --init symmetric --steps 20".to_string(),
    ]
    .iter()
    .map(|s| s.split_whitespace().map(String::from).collect())
    .collect()
}
