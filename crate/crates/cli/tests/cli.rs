use std::fs;
use std::process::{Command as Process, Output};

use bcs_cli::commands::table1;
use bcs_cli::{execute, CliError, Command, RunConfig};
use bcs_core::boundary3d::t_j;

fn bcs(args: &[&str]) -> Output {
    Process::new(env!("CARGO_BIN_EXE_bcs")).args(args).output().unwrap()
}

fn config(text: &str) -> RunConfig {
    RunConfig::parse(text).unwrap()
}

#[test]
fn corrupted_t3_sign_fails_only_t3_cells() {
    let outcome = table1(|j, x| if j == 3 { t_j(x, 3).map(|y| -y) } else { t_j(x, j) }).unwrap();
    assert!(!outcome.report.passed());
    let failed: Vec<&str> = outcome
        .report
        .checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| c.name.as_str())
        .collect();
    assert!(failed.contains(&"t3 order 0"), "{failed:?}");
    assert!(failed.iter().all(|n| n.starts_with("t3") || n.starts_with("m3")), "{failed:?}");

    let clean = table1(|j, x| t_j(x, j)).unwrap();
    assert!(clean.report.passed());
}

#[test]
fn zero_step_is_a_configuration_error() {
    let err = execute(Command::M3Profile, &config(r#"{"bc": "dirichlet", "step": 0.0}"#)).unwrap_err();
    assert!(matches!(err, CliError::Config(_)), "{err}");
}

#[test]
fn empty_coupling_list_is_rejected() {
    let err = execute(Command::Tc0, &config(r#"{"lambdas": []}"#)).unwrap_err();
    assert!(matches!(err, CliError::Config(_)), "{err}");
    let err = execute(Command::Tc0, &RunConfig::default()).unwrap_err();
    assert!(matches!(err, CliError::Config(_)), "{err}");
}

#[test]
fn single_channel_spectrum_is_insufficient() {
    let err = execute(Command::VmuSpectrum, &config(r#"{"l_max": 0}"#)).unwrap_err();
    assert!(matches!(err, CliError::InsufficientData(_)), "{err}");
    let ok = execute(Command::VmuSpectrum, &config(r#"{"l_max": 3}"#)).unwrap();
    assert_eq!(ok.report.results["s_wave_dominant"], true);
}

#[test]
fn zero_potential_criterion_is_inconclusive() {
    let cfg = config(
        r#"{"potential": {"kind": "gaussian", "a": 0.0, "ell": 1.0, "d": 3}, "bc": "neumann", "mu": 1.0}"#,
    );
    let out = execute(Command::Criterion, &cfg).unwrap();
    let table = out.table.unwrap();
    assert_eq!(table.rows[0][2], "inconclusive");
    assert!(out.report.passed());
}

#[test]
fn neumann_profile_checks_and_csv_layout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let csv = dir.path().join("m3.csv");
    fs::write(&cfg, r#"{"command": "m3-profile", "bc": "neumann"}"#).unwrap();
    let out = bcs(&["m3-profile", "--config", cfg.to_str().unwrap(), "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,m3");
    assert_eq!(lines.len(), 402);
    assert_eq!(lines[1], "0.0000000000000000e0,4.0000000000000000e0");
}

#[test]
fn mismatched_command_and_unknown_keys_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"command": "tc0", "bc": "neumann"}"#).unwrap();
    assert_eq!(bcs(&["m3-profile", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    fs::write(&cfg, r#"{"bc": "neumann", "stepsize": 0.1}"#).unwrap();
    assert_eq!(bcs(&["m3-profile", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"lambdas": [0.8, 0.5, 0.6], "mu": 1.0}"#).unwrap();
    let run = |threads: &str, name: &str| {
        let csv = dir.path().join(name);
        let out = bcs(&[
            "tc0",
            "--config",
            cfg.to_str().unwrap(),
            "--threads",
            threads,
            "--out",
            csv.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        (out.stdout, fs::read(csv).unwrap())
    };
    let a = run("1", "a.csv");
    let b = run("2", "b.csv");
    assert_eq!(a, b);
    let text = String::from_utf8(a.1).unwrap();
    assert!(text.starts_with("lambda,Tc,residual,e_mu_m_mu_lambda\n5.0000000000000000e-1,"));
}
