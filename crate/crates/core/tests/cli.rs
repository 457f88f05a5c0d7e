use std::fs;
use std::path::Path;

use gsgf::cli_io::{main_run, read_records, Snapshot, EXIT_BLOWUP, EXIT_FAILED, EXIT_OK};
use gsgf::diagnostics::RECORD_COLUMNS;

const BASE: &str = "dim = 2\nn = 16\nr = 4\nmu0 = 1\nmu1 = 1\nalpha1 = 0.1\n";

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn gsgf(args: &[&str]) -> i32 {
    main_run(std::iter::once("gsgf").chain(args.iter().copied()))
}

#[test]
fn run_writes_records_and_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "run.cfg",
        &format!("{BASE}t_end = 0.2\nic = random_band 1 4 0.5 3\ndt = 0.01\nsnapshot_every = 10\noutput_dir = out\n"),
    );
    assert_eq!(gsgf(&["run", &cfg]), EXIT_OK);
    let out = dir.path().join("out");
    let records = read_records(&out.join("records.csv")).unwrap();
    assert_eq!(records.len(), 21);
    assert!(fs::read_to_string(out.join("records.csv"))
        .unwrap()
        .starts_with(&RECORD_COLUMNS.join(",")));
    let snap = Snapshot::read(out.join("snapshot_00000010.bin")).unwrap();
    assert!((snap.t - 0.1).abs() < 1e-12);
    assert!(out.join("snapshot_00000020.bin").exists());

    // resume from the first snapshot; the records continue the straight run exactly
    let resume = write_config(
        dir.path(),
        "resume.cfg",
        &format!(
            "{BASE}t_end = 0.2\nic = file out/snapshot_00000010.bin\ndt = 0.01\nsnapshot_every = 10\n\
             output_dir = resumed\n"
        ),
    );
    assert_eq!(gsgf(&["run", &resume]), EXIT_OK);
    let tail = read_records(&dir.path().join("resumed/records.csv")).unwrap();
    assert_eq!(tail.as_slice(), &records[11..]);
}

#[test]
fn invalid_configs_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = write_config(dir.path(), "a.cfg", "dim = 2\n");
    assert_eq!(gsgf(&["run", &missing]), EXIT_FAILED);
    let bad = write_config(
        dir.path(),
        "b.cfg",
        &format!("{BASE}t_end = 1\nic = shear\nviscosity = 3\n"),
    );
    assert_eq!(gsgf(&["run", &bad]), EXIT_FAILED);
    assert_eq!(gsgf(&["run", "/nonexistent/config"]), EXIT_FAILED);
    assert_eq!(gsgf(&["frobnicate"]), EXIT_FAILED);
    assert_eq!(gsgf(&["--help"]), EXIT_OK);
}

#[test]
fn blow_up_exits_two_with_partial_records() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "blow.cfg",
        &format!("{BASE}t_end = 5\nic = random_band 1 7 20 1\ndt = 0.05\n"),
    );
    assert_eq!(gsgf(&["run", &cfg]), EXIT_BLOWUP);
    let partial = read_records(&dir.path().join("records.csv")).unwrap();
    assert!(!partial.is_empty());
}

#[test]
fn verification_commands() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "v.cfg",
        &format!("{BASE}t_end = 0.3\nic = random_band 1 4 1 5\n"),
    );
    assert_eq!(
        gsgf(&["verify-constitutive", &cfg, "--samples", "2000", "--fd-samples", "100"]),
        EXIT_OK
    );
    assert_eq!(gsgf(&["check", &cfg, "--fields", "2"]), EXIT_OK);
    assert_eq!(gsgf(&["uniqueness", &cfg, "--delta", "1e-6"]), EXIT_OK);
    assert!(dir.path().join("growth.csv").exists());
    assert_eq!(gsgf(&["uniqueness", &cfg, "--delta=-1"]), EXIT_FAILED);
}
