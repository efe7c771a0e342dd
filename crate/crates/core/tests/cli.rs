//! Drives the `cstar` binary.

use std::process::{Command, Output};

mod common;

use common::{instance, SHIPPED};
use cstar_fixpoint::cli::report::{strip_volatile, RunReport};

fn cstar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cstar"))
        .args(args)
        .env_remove("CSTAR_SEED")
        .output()
        .expect("cstar runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn shipped_instance_list_is_complete() {
    let mut on_disk: Vec<String> = std::fs::read_dir(instance(""))
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".inst"))
        .collect();
    on_disk.sort();
    let mut listed: Vec<String> = SHIPPED.iter().map(|(n, _)| n.to_string()).collect();
    listed.sort();
    assert_eq!(on_disk, listed);
}

#[test]
fn exit_codes_match_contract() {
    for (name, expected) in SHIPPED {
        let path = instance(name);
        for cmd in ["verify", "solve"] {
            let out = cstar(&[cmd, "--instance", path.to_str().unwrap(), "--samples", "300"]);
            assert_eq!(code(&out), expected, "{cmd} {name}: {}", String::from_utf8_lossy(&out.stderr));
            if expected == 2 {
                let err = String::from_utf8_lossy(&out.stderr);
                assert_eq!(err.lines().count(), 1, "one-line diagnostic expected: {err}");
                assert!(out.stdout.is_empty());
            }
        }
    }
}

#[test]
fn solve_scalar_half() {
    let path = instance("scalar_half.inst");
    let out = cstar(&["solve", "--instance", path.to_str().unwrap(), "--tol", "1e-10", "--format", "machine"]);
    assert_eq!(code(&out), 0);
    let report = RunReport::from_machine(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let solve = report.sections[0].solve.as_ref().unwrap();
    assert!(solve.converged);
    assert!((solve.point.coords()[0] - 2.0).abs() <= solve.aposteriori_bound);
    assert!(solve.aposteriori_bound <= 2e-10 / (1.0 - 0.5));
    assert_eq!(report.conv_tol, 1e-10);
}

#[test]
fn verify_broken_signed_reports_positivity_witness() {
    let path = instance("broken_signed.inst");
    let out = cstar(&["verify", "--instance", path.to_str().unwrap(), "--format", "machine"]);
    assert_eq!(code(&out), 1);
    let report = RunReport::from_machine(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let positivity = &report.sections[0].axioms.as_ref().unwrap().positivity;
    assert!(positivity.failures > 0);
    let w = &positivity.witnesses[0];
    assert!(w.points[0].coords()[0] < w.points[1].coords()[0]);
}

#[test]
fn parse_errors_name_the_problem() {
    let out = cstar(&["verify", "--instance", instance("bad_slope.inst").to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("certificate norm not < 1"));
    let out = cstar(&["verify", "--instance", instance("broken_indefinite.inst").to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("weight not positive"));
    let out = cstar(&["verify", "--instance", "/no/such/file.inst"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&cstar(&["solve"])), 2);
    assert_eq!(code(&cstar(&["solve", "--builtin", "nope"])), 2);
    assert_eq!(code(&cstar(&["frobnicate"])), 2);
    assert_eq!(code(&cstar(&["solve", "--builtin", "scalar-half", "--seed", "-3"])), 2);
    assert_eq!(code(&cstar(&["solve", "--builtin", "scalar-half", "--tol", "0"])), 2);
}

#[test]
fn demo_succeeds_with_one_section_per_builtin() {
    let out = cstar(&["demo", "--samples", "200", "--format", "machine"]);
    assert_eq!(code(&out), 0);
    let report = RunReport::from_machine(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(report.sections.len(), cstar_fixpoint::instances::VALID_BUILTINS.len());
}

#[test]
fn machine_reports_are_deterministic() {
    let path = instance("coordinatewise.inst");
    let args = ["solve", "--instance", path.to_str().unwrap(), "--seed", "7", "--format", "machine"];
    let a = String::from_utf8(cstar(&args).stdout).unwrap();
    let b = String::from_utf8(cstar(&args).stdout).unwrap();
    assert_eq!(strip_volatile(&a), strip_volatile(&b));
    let parsed = RunReport::from_machine(&a).unwrap();
    assert_eq!(parsed.to_machine(), a);
}

#[test]
fn seed_comes_from_environment() {
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_cstar"));
        cmd.args(["verify", "--builtin", "broken-signed", "--samples", "50", "--format", "machine"]).args(extra);
        match env {
            Some(v) => cmd.env("CSTAR_SEED", v),
            None => cmd.env_remove("CSTAR_SEED"),
        };
        cmd.output().unwrap()
    };
    let from_env = RunReport::from_machine(&String::from_utf8(run(Some("31"), &[]).stdout).unwrap()).unwrap();
    assert_eq!(from_env.seed, 31);
    let flag_wins = RunReport::from_machine(&String::from_utf8(run(Some("31"), &["--seed", "4"]).stdout).unwrap())
        .unwrap();
    assert_eq!(flag_wins.seed, 4);
    let default = RunReport::from_machine(&String::from_utf8(run(None, &[]).stdout).unwrap()).unwrap();
    assert_eq!(default.seed, 0);
    assert_eq!(code(&run(Some("many"), &[])), 2);
}

#[test]
fn output_file_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("report.txt");
    let out = cstar(&[
        "solve",
        "--builtin",
        "scalar-half",
        "--format",
        "machine",
        "--output",
        target.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&target).unwrap();
    assert!(RunReport::from_machine(&written).is_ok());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn text_format_is_human_readable() {
    let out = cstar(&["solve", "--builtin", "coordinatewise", "--samples", "100"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("axiom positivity"));
    assert!(text.contains("converged after"));
    assert!(text.contains("consistent"));
}
