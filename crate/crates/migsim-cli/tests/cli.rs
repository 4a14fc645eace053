//! End-to-end tests against the compiled `migsim` binary.
//!
//! These spawn real processes, so every run keeps drop counts small; the
//! statistical behaviour of the engine is covered by the library tests.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn migsim() -> Command {
    Command::new(env!("CARGO_BIN_EXE_migsim"))
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn assert_exit(out: &Output, want: i32, context: &str) {
    let got = out.status.code();
    assert_eq!(
        got,
        Some(want),
        "{context}: expected exit {want}, got {got:?}\nstdout:\n{}\nstderr:\n{}",
        stdout(out),
        stderr(out)
    );
}

#[test]
fn presets_list_names_all_four() {
    let out = migsim().args(["presets", "list"]).output().unwrap();
    assert_exit(&out, 0, "presets list");
    let listing = stdout(&out);
    let ids: Vec<&str> = listing.lines().map(str::trim).collect();
    let expected = ["S1-sub6-mimo", "S2-ca-refarm", "S3-mmwave-28", "S4-nsa-sa"];
    assert_eq!(ids, expected, "expected {expected:?}, got {ids:?}");
}

#[test]
fn presets_show_emits_parseable_toml() {
    let out = migsim().args(["presets", "show", "S3-mmwave-28"]).output().unwrap();
    assert_exit(&out, 0, "presets show S3");
    let text = stdout(&out);
    let value: toml::Value = text.parse().expect("preset output must be valid TOML");
    assert_eq!(
        value["scenario_id"].as_str(),
        Some("S3-mmwave-28"),
        "scenario_id mismatch in shown preset"
    );
    assert_eq!(
        value["bands"][0]["frequency_hz"].as_float(),
        Some(28e9),
        "S3 preset must carry the 28 GHz band"
    );

    // Lookup is case-insensitive.
    let lower = migsim().args(["presets", "show", "s3-mmwave-28"]).output().unwrap();
    assert_exit(&lower, 0, "presets show lowercase id");
    assert_eq!(stdout(&lower), text, "case-insensitive lookup must return the same file");

    let bad = migsim().args(["presets", "show", "S9-unknown"]).output().unwrap();
    assert_exit(&bad, 2, "presets show unknown id");
    assert!(
        stderr(&bad).contains("unknown preset"),
        "diagnostic should name the problem, got: {}",
        stderr(&bad)
    );
}

#[test]
fn validate_prints_stable_digest() {
    let first = migsim().args(["validate", "--preset", "S1-sub6-mimo"]).output().unwrap();
    assert_exit(&first, 0, "validate preset");
    let line = stdout(&first);
    let digest = line.rsplit(' ').next().unwrap().trim();
    assert_eq!(digest.len(), 64, "digest should be 64 hex chars, got '{digest}'");
    assert!(digest.chars().all(|c| c.is_ascii_hexdigit()), "non-hex digest '{digest}'");

    let second = migsim().args(["validate", "--preset", "S1-sub6-mimo"]).output().unwrap();
    assert_eq!(stdout(&second), line, "digest must be stable across invocations");
}

#[test]
fn validate_names_offending_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    let base = stdout(&migsim().args(["presets", "show", "S4-nsa-sa"]).output().unwrap());
    fs::write(&path, base.replace("tx_power_dbm = 43.0", "tx_power_dbm = 60.0")).unwrap();

    let out = migsim().args(["validate", "--config", path.to_str().unwrap()]).output().unwrap();
    assert_exit(&out, 2, "validate out-of-range tx power");
    assert!(
        stderr(&out).contains("tx_power"),
        "diagnostic must name the field, got: {}",
        stderr(&out)
    );

    let missing = migsim()
        .args(["validate", "--config", dir.path().join("absent.toml").to_str().unwrap()])
        .output()
        .unwrap();
    assert_exit(&missing, 3, "validate missing file");
}

#[test]
fn run_is_deterministic_across_parallelism() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for (out_dir, par) in [(&out_a, "1"), (&out_b, "8")] {
        let out = migsim()
            .args(["run", "--preset", "S1-sub6-mimo", "--drops", "10"])
            .args(["--parallelism", par, "--out", out_dir.to_str().unwrap()])
            .output()
            .unwrap();
        assert_exit(&out, 0, &format!("run parallelism {par}"));
    }
    for name in ["kpi.csv", "sinr_histogram.csv", "layout.csv"] {
        let a = fs::read(out_a.join(name)).unwrap();
        let b = fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} must be byte-identical across parallelism degrees");
    }
}

#[test]
fn run_overrides_reach_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = migsim()
        .args(["run", "--preset", "S1-sub6-mimo", "--drops", "7", "--seed", "99"])
        .args(["--set", "overhead=0.2", "--out", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_exit(&out, 0, "run with overrides");

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["drops"], 7, "manifest drops should echo the override");
    assert_eq!(manifest["seed"], 99, "manifest seed should echo the override");
    assert_eq!(manifest["config"]["drops"], 7, "config echo should carry the override");
    assert_eq!(manifest["config"]["overhead"], 0.2, "--set override should reach the echo");

    let kpi = fs::read_to_string(dir.path().join("kpi.csv")).unwrap();
    assert!(
        kpi.lines().next().unwrap().starts_with("kpi,value,ci95_low,ci95_high,unit"),
        "unexpected kpi header: {}",
        kpi.lines().next().unwrap()
    );
}

#[test]
fn run_rejects_unknown_override_key() {
    let dir = tempfile::tempdir().unwrap();
    let out = migsim()
        .args(["run", "--preset", "S1-sub6-mimo", "--set", "nonsense=1"])
        .args(["--out", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_exit(&out, 2, "run with unknown override key");
    assert!(
        stderr(&out).contains("nonsense"),
        "diagnostic must name the key, got: {}",
        stderr(&out)
    );
}

#[test]
fn run_env_var_sets_default_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let out = migsim()
        .args(["run", "--preset", "S1-sub6-mimo", "--drops", "3"])
        .env("MIGSIM_OUT", dir.path())
        .output()
        .unwrap();
    assert_exit(&out, 0, "run with MIGSIM_OUT");
    assert!(
        dir.path().join("kpi.csv").is_file(),
        "kpi.csv should land in $MIGSIM_OUT ({})",
        dir.path().display()
    );
}

#[test]
fn run_per_ue_flag_writes_sample_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = migsim()
        .args(["run", "--preset", "S4-nsa-sa", "--drops", "2", "--per-ue"])
        .args(["--out", dir.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_exit(&out, 0, "run --per-ue");
    let per_ue = fs::read_to_string(dir.path().join("per_ue.csv")).unwrap();
    let header = per_ue.lines().next().unwrap();
    assert!(
        header.starts_with("drop,ue,"),
        "unexpected per-UE header: {header}"
    );
    // 2 drops, 10 UEs/cell; every sample row present.
    assert!(
        per_ue.lines().count() > 2,
        "per-UE table should contain sample rows"
    );
}

#[test]
fn run_unwritable_output_dir_exits_io() {
    let dir = tempfile::tempdir().unwrap();
    let block = dir.path().join("blockfile");
    fs::write(&block, b"not a directory").unwrap();
    let out = migsim()
        .args(["run", "--preset", "S1-sub6-mimo", "--drops", "2"])
        .args(["--out", block.join("sub").to_str().unwrap()])
        .output()
        .unwrap();
    assert_exit(&out, 3, "run into unwritable output dir");
    assert!(
        stderr(&out).contains("blockfile"),
        "I/O diagnostic should carry the path, got: {}",
        stderr(&out)
    );
}

#[test]
fn run_requires_exactly_one_config_source() {
    let neither = migsim().args(["run"]).output().unwrap();
    assert_exit(&neither, 2, "run without --config/--preset");

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s1.toml");
    fs::write(
        &path,
        stdout(&migsim().args(["presets", "show", "S1-sub6-mimo"]).output().unwrap()),
    )
    .unwrap();
    let both = migsim()
        .args(["run", "--preset", "S1-sub6-mimo", "--config", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_exit(&both, 2, "run with both --config and --preset");
}

#[test]
fn shown_preset_round_trips_through_config_flag() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s2.toml");
    fs::write(
        &path,
        stdout(&migsim().args(["presets", "show", "S2-ca-refarm"]).output().unwrap()),
    )
    .unwrap();

    let from_file = migsim()
        .args(["validate", "--config", path.to_str().unwrap()])
        .output()
        .unwrap();
    let from_preset = migsim().args(["validate", "--preset", "S2-ca-refarm"]).output().unwrap();
    assert_exit(&from_file, 0, "validate shown preset from file");
    assert_eq!(
        stdout(&from_file),
        stdout(&from_preset),
        "digest must match between preset and its shown file"
    );

    assert!(Path::new(env!("CARGO_BIN_EXE_migsim")).is_file());
}
