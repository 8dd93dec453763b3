//! End-to-end runs of the `loadability` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
}

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loadability"))
        .args(args)
        .env("LOADABILITY_LOG", "error")
        .output()
        .unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Scenario copy with `fig1.toml` text edited, placed next to the shared
/// parameter files.
fn edited(dir: &Path, name: &str, edit: impl Fn(String) -> String) -> PathBuf {
    for f in ["machine.toml", "line.toml", "load.toml", "source.toml"] {
        fs::copy(data(f), dir.join(f)).unwrap();
    }
    let p = dir.join(name);
    fs::write(&p, edit(fs::read_to_string(data("fig1.toml")).unwrap())).unwrap();
    p
}

fn csv_rows(p: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(p).unwrap();
    let h = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|x| x.unwrap().iter().map(String::from).collect())
        .collect();
    (h, rows)
}

#[test]
fn run_writes_trace_and_report() {
    let out = tempfile::tempdir().unwrap();
    let o = bin(&[
        "run",
        s(&data("fig1.toml")),
        "--out",
        s(out.path()),
        "--t-end",
        "0.3",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let (h, rows) = csv_rows(&out.path().join("trace.csv"));
    assert_eq!(h[0], "t");
    assert!(h.iter().any(|c| c == "l1.tau"));
    assert!(rows.len() > 10);
    let col = |name: &str| h.iter().position(|c| c == name).unwrap();
    let (p, scale) = (col("tellegen_p"), col("tellegen_scale"));
    for r in &rows {
        assert!(r.iter().all(|v| v != "NaN"));
        let rel = r[p].parse::<f64>().unwrap().abs() / r[scale].parse::<f64>().unwrap().max(1.0);
        assert!(rel < 1e-8);
    }
    // 12 significant digits
    assert!(
        rows[1][1]
            .split('e')
            .next()
            .unwrap()
            .trim_start_matches('-')
            .len()
            == 13
    );
    let (h, rows) = csv_rows(&out.path().join("loadability.csv"));
    assert_eq!(h[..4], ["t", "lhs", "rhs", "margin"]);
    assert!(!rows.is_empty());
}

#[test]
fn runs_are_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = bin(&[
            "run",
            s(&data("fig1.toml")),
            "--out",
            s(d.path()),
            "--t-end",
            "0.1",
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    let read = |d: &tempfile::TempDir| fs::read(d.path().join("trace.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn unknown_field_is_rejected_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let p = edited(dir.path(), "bad.toml", |t| {
        t.replace("stride = 10", "stride = 10\nstrde = 3")
    });
    let o = bin(&["run", s(&p), "--out", s(&dir.path().join("out"))]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.toml:"), "{err}");
    assert!(err.contains("strde"), "{err}");
}

#[test]
fn missing_scenario_is_invalid() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["run", s(&dir.path().join("nope.toml"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn empty_sweep_grid_is_invalid() {
    let dir = tempfile::tempdir().unwrap();
    let p = edited(dir.path(), "empty.toml", |t| {
        let i = t.find("\nr = [").unwrap();
        format!("{}\nr = []\n", &t[..i])
    });
    let o = bin(&["pv-sweep", s(&p), "--out", s(&dir.path().join("out"))]);
    assert_eq!(
        o.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn bad_flag_values_are_invalid() {
    let o = bin(&["run", s(&data("fig1.toml")), "--step", "-1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = bin(&["--parallel", "0", "run", s(&data("fig1.toml"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn divergence_keeps_partial_trace() {
    let dir = tempfile::tempdir().unwrap();
    // the operating point sits below this limit; a large exciter step at
    // 0.05 s drives the field voltage past it
    let p = edited(dir.path(), "div.toml", |t| {
        t.replace("stride = 10", "stride = 10\ndivergence_limit = 5.0")
    });
    let out = dir.path().join("out");
    let o = bin(&["run", s(&p), "--out", s(&out), "--disturbance-mag", "0.0"]);
    assert_eq!(o.status.code(), Some(0));
    let o = bin(&["run", s(&p), "--out", s(&out), "--disturbance-mag", "0.5"]);
    assert_eq!(
        o.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let (_, rows) = csv_rows(&out.join("trace.csv"));
    let last: f64 = rows.last().unwrap()[0].parse().unwrap();
    assert!(last > 0.05 && last < 0.1, "{last}");
    assert!(rows
        .iter()
        .flatten()
        .all(|v| v.parse::<f64>().is_ok_and(f64::is_finite) || v == "inf"));
}

#[test]
fn equal_inertia_gives_identical_runs() {
    let out = tempfile::tempdir().unwrap();
    let o = bin(&[
        "inertia-demo",
        s(&data("two_machine.toml")),
        "--out",
        s(out.path()),
        "--j-high",
        "5",
        "--j-low",
        "5",
        "--t-end",
        "0.2",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let (_, rows) = csv_rows(&out.path().join("spectra.csv"));
    assert!(rows.iter().all(|r| r[1] == r[2]));
    let (_, rows) = csv_rows(&out.path().join("fractions.csv"));
    assert_eq!(rows[0][3], rows[1][3]);
}

#[test]
fn single_curve_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let p = edited(dir.path(), "short.toml", |t| {
        let i = t.find("\nr = [").unwrap();
        format!("{}\nr = [2.0, 1.0, 0.5]\nt_end = 2.0\n", &t[..i])
    });
    let out = dir.path().join("out");
    let o = bin(&[
        "pv-sweep",
        s(&p),
        "--out",
        s(&out),
        "--line-inductance",
        "0.1",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let (h, rows) = csv_rows(&out.join("pv_x0.1.csv"));
    assert_eq!(h, ["R", "V", "P", "stable", "branch"]);
    assert_eq!(rows.len(), 3);
    // power rises as the resistance falls on the upper branch
    let p: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(p[0] < p[1]);
}
