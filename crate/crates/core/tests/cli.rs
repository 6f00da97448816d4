use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_papr-lab")).args(args).output().unwrap()
}

fn small_run(out: &Path, threads: &str) -> Output {
    run(&[
        "all",
        "--chain",
        "existing,proposed",
        "--cr",
        "1.2",
        "--seed",
        "42",
        "--symbols",
        "200",
        "--max-symbols",
        "400",
        "--ebn0",
        "0:4:4",
        "--threads",
        threads,
        "--out",
        out.to_str().unwrap(),
    ])
}

#[test]
fn help_lists_every_flag() {
    let out = run(&["--help"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for flag in [
        "--config",
        "--threads",
        "--n",
        "--l",
        "--bw",
        "--fc",
        "--cr",
        "--chain",
        "--symbols",
        "--max-symbols",
        "--min-errors",
        "--ebn0",
        "--seed",
        "--filter-order",
        "--filter-ripple-db",
        "--filter-phase",
        "--out",
    ] {
        assert!(text.contains(flag), "missing {flag}");
    }
}

#[test]
fn malformed_values_exit_nonzero_naming_flag() {
    for (args, flag) in [
        (vec!["--n", "96"], "--n"),
        (vec!["--cr", "-1"], "--cr"),
        (vec!["--filter-order", "0"], "--filter-order"),
        (vec!["--symbols", "lots"], "--symbols"),
    ] {
        let out = run(&args);
        assert!(!out.status.success(), "{args:?}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert!(err.contains(flag), "{args:?}: {err}");
    }
}

#[test]
fn unknown_flag_rejected() {
    let out = run(&["--bogus", "1"]);
    assert!(!out.status.success());
}

#[test]
fn single_chain_run_writes_deterministic_files() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(small_run(&a, "1").status.success());
    assert!(small_run(&b, "3").status.success());
    let expected = [
        "ccdf_existing_cr1.20.csv",
        "ccdf_proposed_cr1.20.csv",
        "ber_existing_cr1.20.csv",
        "ber_proposed_cr1.20.csv",
        "ber_analytic.csv",
        "summary.csv",
    ];
    for name in expected {
        let x = fs::read(a.join(name)).unwrap();
        assert_eq!(x, fs::read(b.join(name)).unwrap(), "{name}");
    }
    let ccdf = fs::read_to_string(a.join("ccdf_existing_cr1.20.csv")).unwrap();
    assert!(ccdf.starts_with("papr0_db,ccdf\n"));
    assert_eq!(ccdf.lines().count(), 142);
    let ber = fs::read_to_string(a.join("ber_proposed_cr1.20.csv")).unwrap();
    assert!(ber.starts_with("ebn0_db,ber,errors,bits\n"));
    assert_eq!(ber.lines().count(), 3);
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["master_seed"], 42);
    assert_eq!(manifest["rng"], "chacha20");
}

#[test]
fn config_file_is_overridden_by_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let conf = tmp.path().join("run.conf");
    let out = tmp.path().join("out");
    fs::write(
        &conf,
        format!("# small run\nchain = unclipped\nsymbols = 50\nebn0 = 0\nout = {}\n", out.display()),
    )
    .unwrap();
    let res = run(&["ccdf", "--config", conf.to_str().unwrap(), "--symbols", "60"]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["num_symbols"], 60);
    assert!(out.join("ccdf_unclipped.csv").exists());
    assert!(!out.join("ber_analytic.csv").exists());
}
