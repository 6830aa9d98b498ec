#![allow(dead_code)]

use std::path::PathBuf;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn fixture_str(name: &str) -> String {
    fixture(name).to_str().unwrap().to_string()
}

pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    pub fn json(&self) -> serde_json::Value {
        serde_json::from_str(&self.stdout)
            .unwrap_or_else(|e| panic!("bad JSON ({e}):\n{}\n{}", self.stdout, self.stderr))
    }
}

/// Run the CLI in-process with an empty config so ambient settings never leak in.
pub fn cli(args: &[&str]) -> Outcome {
    let mut argv = vec!["portflow".to_string()];
    let mut rest = args.iter().map(|s| s.to_string());
    if let Some(sub) = rest.next() {
        argv.push(sub.clone());
        if sub != "synth" && !args.contains(&"--config") {
            argv.extend(["--config".to_string(), "/dev/null".to_string()]);
        }
    }
    argv.extend(rest);
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = portflow::cli::run(argv, &mut out, &mut err);
    Outcome {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

/// Report bytes with the timestamp line removed.
pub fn without_timestamp(text: &str) -> String {
    text.lines()
        .filter(|l| !(l.contains("\"timestamp\"") || l.starts_with("- Generated:") || l.starts_with("metadata,timestamp,")))
        .collect::<Vec<_>>()
        .join("\n")
}
