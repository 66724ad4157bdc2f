//! The command-line front end on files in a scratch directory.

use std::fs;
use std::path::Path;

use clap::Parser;
use cwfnet::cli::{run, RunConfig, EXIT_CAP, EXIT_INPUT, EXIT_OK};
use cwfnet::formats::{emit_native, parse_native};
use cwfnet::models;

fn invoke(args: &[&str]) -> (i32, String, String) {
    let config = RunConfig::try_parse_from(std::iter::once("cwfnet").chain(args.iter().copied())).unwrap();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(&config, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn trace_and_residual_files() {
    let dir = tempfile::tempdir().unwrap();
    let net = write(dir.path(), "coupled.cwf", &emit_native(&models::coupled_choice()));
    let trace = dir.path().join("out.trace");
    let residual = dir.path().join("residual.cwf");
    let (code, _, _) = invoke(&[
        "reduce",
        &net,
        "--trace",
        trace.to_str().unwrap(),
        "--emit",
        residual.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(fs::metadata(&trace).is_ok());
    let back = parse_native(&fs::read_to_string(&residual).unwrap()).unwrap();
    assert!(back.net().transition_count() > 1);
}

#[test]
fn validate_reports_violations() {
    let dir = tempfile::tempdir().unwrap();
    let text = "NET bad\nPLACE i\nPLACE o\nPLACE x\nTRANS t : i -> o x\nPAIR • -> • •\nENTRY i\nEXIT o\n";
    let bad = write(dir.path(), "bad.cwf", text);
    let good = write(dir.path(), "small-loop.cwf", &emit_native(&models::small_loop()));
    let (_, out, _) = invoke(&["validate", &good, &bad]);
    assert!(out.lines().any(|l| l.contains("small-loop.cwf") && l.ends_with(": OK")), "{out}");
    assert!(out.contains("x cannot reach o"), "{out}");
}

#[test]
fn batch_skips_unreadable_files() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "small-loop.cwf", &emit_native(&models::small_loop()));
    write(dir.path(), "ins.cwf", &emit_native(&models::insurance_err()));
    write(dir.path(), "junk.cwf", "this is not a net\n");
    let (code, out, err) = invoke(&["--report", "csv", "batch", dir.path().to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(err.contains("junk.cwf"), "{err}");
    assert!(out.contains("cyclic FC sound,2,"), "{out}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let net = write(dir.path(), "ins.cwf", &emit_native(&models::insurance_err()));
    assert_eq!(invoke(&["check", "/nonexistent.cwf"]).0, EXIT_INPUT);
    assert_eq!(invoke(&["--cap", "2", "oracle", &net]).0, EXIT_CAP);
    let (code, out, _) = invoke(&["--k", "2", "oracle", &net]);
    assert_eq!(code, EXIT_OK, "{out}");
}
