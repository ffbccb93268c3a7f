//! End-to-end tests of the `delta-arc` binary: exit codes, stdout/stderr
//! contracts, and the colour switch.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn corpus(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(rel)
}

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_delta-arc"));
    cmd.env("DELTA_ARC_COLOR", "never");
    cmd
}

fn run(cmd: &mut Command) -> (Output, String, String) {
    let output = cmd.output().unwrap();
    let stdout = String::from_utf8(output.stdout.clone()).unwrap();
    let stderr = String::from_utf8(output.stderr.clone()).unwrap();
    (output, stdout, stderr)
}

fn derive_cmd(out: Option<&Path>) -> Command {
    let mut cmd = bin();
    cmd.arg("derive")
        .arg("--core")
        .arg(corpus("multicopter/core"))
        .arg("--deltas")
        .arg(corpus("multicopter/deltas"))
        .arg("--config")
        .arg(corpus("multicopter/DeltaWolf.deltacfg"))
        .arg("--types")
        .arg(corpus("multicopter/multicopter.types"));
    if let Some(dir) = out {
        cmd.arg("--out").arg(dir);
    }
    cmd
}

#[test]
fn derive_emits_the_product_and_reports_the_order() {
    let out = tempfile::tempdir().unwrap();
    let (output, stdout, stderr) = run(&mut derive_cmd(Some(out.path())));
    assert!(output.status.success(), "stderr: {stderr}");
    assert!(stdout.contains(
        "product `DeltaWolf` derived: PressureSensor -> HeightHold -> RemoveHHFlightMode -> HexoCopter"
    ), "stdout: {stdout}");

    let written: Vec<&str> = stdout.lines().filter(|l| l.starts_with("wrote ")).collect();
    let files: Vec<PathBuf> = std::fs::read_dir(out.path()).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(written.len(), files.len());
    assert!(files.iter().all(|f| f.extension().is_some_and(|e| e == "arc")));
    assert!(files.iter().any(|f| f.file_name().unwrap() == "FlightController.arc"));

    // The derived product leaves exactly one port unconnected.
    let warnings: Vec<&str> = stderr.lines().filter(|l| l.contains("warning")).collect();
    assert_eq!(warnings.len(), 1, "stderr: {stderr}");
    assert!(warnings[0].contains("CC-PORT-UNCONNECTED"));
    assert!(warnings[0].contains("steeringMode"));
}

#[test]
fn derive_accepts_the_lexicographic_strategy() {
    let (output, stdout, _) = run(derive_cmd(None).arg("--order-strategy").arg("lex"));
    assert!(output.status.success());
    assert!(stdout.contains("PressureSensor -> HeightHold -> RemoveHHFlightMode -> HexoCopter"));
}

#[test]
fn check_passes_on_the_core_models() {
    let (output, stdout, _) = run(bin()
        .arg("check")
        .arg("--core")
        .arg(corpus("multicopter/core"))
        .arg("--types")
        .arg(corpus("multicopter/multicopter.types")));
    assert!(output.status.success());
    assert!(stdout.contains("9 component(s) checked, no errors"), "stdout: {stdout}");
}

#[test]
fn check_rejects_a_dangling_subcomponent_type() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("Broken.arc"), "component Broken { component Ghost g; }\n").unwrap();
    let (output, _, stderr) = run(bin().arg("check").arg("--core").arg(dir.path()));
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr.contains("CC-TYPE-RESOLVE"), "stderr: {stderr}");
    assert!(stderr.contains("Ghost"));
}

#[test]
fn order_prints_one_valid_order_by_default_and_all_on_request() {
    let ordering_corpus = |all: bool| {
        let mut cmd = bin();
        cmd.arg("order")
            .arg("--deltas")
            .arg(corpus("ordering/deltas"))
            .arg("--config")
            .arg(corpus("ordering/ABCD.deltacfg"));
        if all {
            cmd.arg("--all");
        }
        cmd
    };

    let (output, stdout, _) = run(&mut ordering_corpus(false));
    assert!(output.status.success());
    assert_eq!(stdout, "B -> C -> D -> A\n");

    let (output, stdout, _) = run(&mut ordering_corpus(true));
    assert!(output.status.success());
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines, ["B -> C -> D -> A", "B -> D -> C -> A"]);
}

#[test]
fn order_fails_when_the_configuration_names_an_unknown_delta() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("missing.deltacfg");
    std::fs::write(&config, "deltaconfig Missing { A, Nope }\n").unwrap();
    let (output, _, stderr) = run(bin()
        .arg("order")
        .arg("--deltas")
        .arg(corpus("ordering/deltas"))
        .arg("--config")
        .arg(&config));
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr.contains("GEN-DELTA-MISSING"), "stderr: {stderr}");
    assert!(stderr.contains("Nope"));
}

#[test]
fn metrics_prints_the_table_and_machine_readable_lines() {
    let (output, stdout, _) = run(bin()
        .arg("metrics")
        .arg("--core")
        .arg(corpus("multicopter/core"))
        .arg("--deltas")
        .arg(corpus("multicopter/deltas")));
    assert!(output.status.success());
    assert!(stdout.contains("relative delta share: 42.31%"), "stdout: {stdout}");
    for line in ["combined.files=13", "combined.loc=104", "deltas.loc=44", "relVC=42.31", "combined.avgLOC=8.0"] {
        assert!(stdout.contains(line), "missing `{line}` in: {stdout}");
    }
}

#[test]
fn missing_paths_exit_with_the_usage_code() {
    let (output, _, _) = run(bin().arg("check").arg("--core").arg("/nonexistent/path"));
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn the_color_switch_controls_ansi_escapes() {
    let (_, _, with) = run(derive_cmd(None).env("DELTA_ARC_COLOR", "always"));
    assert!(with.contains("\u{1b}["), "expected escapes in: {with:?}");
    let (_, _, without) = run(derive_cmd(None).env("DELTA_ARC_COLOR", "never"));
    assert!(!without.contains("\u{1b}["), "unexpected escapes in: {without:?}");
}
