#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const BIN: &str = env!("CARGO_BIN_EXE_ocsvm-rules");

/// Root of the repository (for the checked-in data).
pub fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

pub fn run_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed with {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    std::fs::write(path, s).unwrap();
}

pub fn points_csv(path: &Path, pts: &[[f64; 2]]) {
    let rows: Vec<Vec<String>> = pts.iter().map(|p| vec![p[0].to_string(), p[1].to_string()]).collect();
    write_csv(path, &["x", "y"], &rows);
}

/// Writes `<dir>/run.json` and returns its path.
pub fn write_config(dir: &Path, body: serde_json::Value) -> PathBuf {
    let path = dir.join("run.json");
    std::fs::write(&path, serde_json::to_string_pretty(&body).unwrap()).unwrap();
    path
}

pub fn xy_config(dir: &Path, csv: &str) -> PathBuf {
    write_config(
        dir,
        serde_json::json!({
            "dataset": csv,
            "schema": { "numerical": ["x", "y"] },
            "output_dir": "out"
        }),
    )
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}
