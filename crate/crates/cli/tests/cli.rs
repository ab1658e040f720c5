//! End-to-end checks of the binary: exit codes, flag/config precedence,
//! byte-level reproducibility, field-file input.

use std::path::PathBuf;
use std::process::{Command, Output};

use detlab::algebra::Vec2;
use detlab::pde::VectorField2;

fn detlab_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_detlab"))
}

fn run_args(args: &[&str]) -> Output {
    detlab_bin().args(args).output().expect("binary runs")
}

fn tmp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("detlab-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn laminate_fixed_seed_is_byte_identical() {
    let out1 = tmp_path("lam1.csv");
    let out2 = tmp_path("lam2.csv");
    for out in [&out1, &out2] {
        let st = run_args(&[
            "laminate",
            "--nosc",
            "5,10",
            "--seed",
            "7",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(st.status.success());
    }
    let a = std::fs::read(&out1).unwrap();
    let b = std::fs::read(&out2).unwrap();
    assert_eq!(a, b);
    assert!(!a.is_empty());
    std::fs::remove_file(out1).ok();
    std::fs::remove_file(out2).ok();
}

#[test]
fn config_file_applies_and_flags_win() {
    let cfg_path = tmp_path("cfg.txt");
    std::fs::write(&cfg_path, "seed = 3\nnosc = 5\n").unwrap();
    let with_file = run_args(&["laminate", "--config", cfg_path.to_str().unwrap()]);
    assert!(with_file.status.success());
    let base = run_args(&["laminate", "--nosc", "5", "--seed", "3"]);
    assert_eq!(with_file.stdout, base.stdout);

    // Flag beats the file.
    let flag_wins = run_args(&[
        "laminate",
        "--config",
        cfg_path.to_str().unwrap(),
        "--seed",
        "4",
    ]);
    let expect = run_args(&["laminate", "--nosc", "5", "--seed", "4"]);
    assert_eq!(flag_wins.stdout, expect.stdout);
    assert_ne!(flag_wins.stdout, base.stdout);
    std::fs::remove_file(cfg_path).ok();
}

#[test]
fn config_parse_error_exits_one_with_line() {
    let cfg_path = tmp_path("bad.txt");
    std::fs::write(&cfg_path, "nosc = 5\nbogus line\n").unwrap();
    let out = run_args(&["laminate", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "stderr: {err}");
    std::fs::remove_file(cfg_path).ok();
}

#[test]
fn unknown_integrand_exits_one() {
    let out = run_args(&["moments", "--integrand", "septic"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn degenerate_field_file_exits_two() {
    // det Du = 2x vanishes along x = 0: the recovery guard trips.
    let field = VectorField2::sample_unit_square(16, |p| Vec2::new(p.x * p.x, p.y)).unwrap();
    let path = tmp_path("degenerate.field");
    std::fs::write(&path, field.write_text()).unwrap();
    let out = run_args(&["recover", "--map", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("degenerate determinant"), "stderr: {err}");
    std::fs::remove_file(path).ok();
}

#[test]
fn corrupt_field_file_reports_byte_offset() {
    let field = VectorField2::sample_unit_square(8, |p| p).unwrap();
    let mut text = field.write_text();
    let pos = text.rfind("\n1").unwrap();
    text.replace_range(pos..pos + 2, "\nZ");
    let path = tmp_path("corrupt.field");
    std::fs::write(&path, &text).unwrap();
    let out = run_args(&["recover", "--map", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("byte offset"), "stderr: {err}");
    std::fs::remove_file(path).ok();
}

#[test]
fn field_file_round_trips_through_recover() {
    let field = VectorField2::sample_unit_square(24, |p| {
        Vec2::new(1.2 * p.x + 0.4 * p.y, 0.3 * p.x + 1.1 * p.y)
    })
    .unwrap();
    let path = tmp_path("affine.field");
    std::fs::write(&path, field.write_text()).unwrap();
    let out = run_args(&["recover", "--map", path.to_str().unwrap()]);
    assert!(out.status.success());
    let body = String::from_utf8_lossy(&out.stdout);
    let row = body.lines().nth(1).expect("one data row");
    assert!(row.starts_with("24,"));
    let dev: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
    assert!(dev <= 1e-8, "row: {row}");
    std::fs::remove_file(path).ok();
}

#[test]
fn moments_json_shape() {
    let out = run_args(&["moments", "--levels", "0,1", "--weight-grid", "50"]);
    assert!(out.status.success());
    let body = String::from_utf8_lossy(&out.stdout);
    assert!(body.contains("\"integrand\": \"quad\""));
    assert!(body.contains("\"admissible_t\": [0.0000000000000000e0, 1.0000000000000000e0]"));
    assert!(body.contains("\"note\""));
}
