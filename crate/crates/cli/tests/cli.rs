use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use genbvp::boundary::GeneralBoundaryOperator;
use genbvp::bvp::BvpProblem;
use genbvp::funcspace::{Grid, PolyMatrix, PolyVector};
use genbvp::stieltjes::{MatrixMeasure, ScalarMeasure};
use genbvp::{approx, corpus, problem_file, CVector, C64};

fn genbvp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_genbvp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn corpus_file(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus").join(format!("{name}.json"))
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn shipped_corpus_files_match_builtin_problems() {
    for name in corpus::NAMES {
        let parsed = problem_file::parse_problem(corpus_file(name), None).unwrap();
        assert_eq!(parsed, corpus::load(name, 2048).unwrap().problem, "{name}");
    }
}

#[test]
fn solve_p1_matches_exact_endpoint() {
    let out = genbvp(&["solve", corpus_file("P1").to_str().unwrap(), "--grid-n", "2048"]);
    assert!(out.status.success());
    let rows = csv_rows(&stdout(&out));
    let last = rows.last().unwrap();
    let t: f64 = last[0].parse().unwrap();
    let y: f64 = last[1].parse().unwrap();
    assert_eq!(t, 1.0);
    assert!((y - ((-1.0f64).exp() + 1.0)).abs() < 1e-8);
}

#[test]
fn sweep_errors_decrease() {
    let out = genbvp(&["sweep", "P1", "--ks", "4:256:x2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("k,err_w1r,err_cr1,det,sigma_hat,bound_holds\n"));
    let errs: Vec<(f64, f64)> = csv_rows(&text)
        .iter()
        .map(|r| (r[1].parse().unwrap(), r[2].parse().unwrap()))
        .collect();
    assert_eq!(errs.len(), 7);
    assert!(errs.windows(2).all(|w| w[1].0 < w[0].0 && w[1].1 < w[0].1));
}

#[test]
fn theorem_three_check_passes_on_p1() {
    let out = genbvp(&["check", "P1", "--theorem", "3", "--eps", "1e-3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn constants_command() {
    let out = genbvp(&["constants", "P1"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("kappa_hat = "));
}

#[test]
fn output_is_deterministic() {
    let a = genbvp(&["sweep", "P3", "--ks", "4,8,16"]);
    let b = genbvp(&["sweep", "P3", "--ks", "4,8,16"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn out_dir_receives_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = genbvp(&["solve", "P2", "--grid-n", "256", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let names: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    assert_eq!(names, vec!["solution.csv".to_string()]);
}

#[test]
fn approximate_writes_the_multipoint_problem() {
    let out = genbvp(&["approximate", "P2", "--grid-n", "512", "--k", "4"]);
    assert!(out.status.success());
    let parsed = problem_file::parse_str(&stdout(&out), None).unwrap();
    let p = corpus::load("P2", 512).unwrap().problem;
    assert_eq!(parsed, approx::build_multipoint_problem(&p, 4).unwrap());
}

fn neumann_neumann() -> String {
    let (a, b) = (0.0, 1.0);
    let mut phi = MatrixMeasure::zeros(a, b, 2, 1);
    phi.set(0, 0, ScalarMeasure::dirac(a, b, 0.0, C64::new(1.0, 0.0)).unwrap());
    phi.set(1, 0, ScalarMeasure::dirac(a, b, 1.0, C64::new(1.0, 0.0)).unwrap());
    let bop = GeneralBoundaryOperator::new(2, 1, vec![genbvp::CMatrix::zeros(2, 1)], phi).unwrap();
    let p = BvpProblem::new(
        Grid::new(a, b, 256).unwrap(),
        vec![PolyMatrix::zeros(a, b, 1, 1); 2],
        PolyVector::zeros(a, b, 1),
        CVector::zeros(2),
        bop.into(),
    )
    .unwrap();
    problem_file::emit(&p)
}

#[test]
fn singular_problem_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nn.json");
    std::fs::write(&path, neumann_neumann()).unwrap();
    let out = genbvp(&["solve", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not uniquely solvable"));
}

#[test]
fn io_and_parse_errors_exit_with_code_three() {
    assert_eq!(genbvp(&["solve", "/nonexistent/problem.json"]).status.code(), Some(3));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let text = std::fs::read_to_string(corpus_file("P1"))
        .unwrap()
        .replacen("\"q\": [", "\"q\": [[0.0, 0.0], ", 1);
    std::fs::write(&path, text).unwrap();
    let out = genbvp(&["solve", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("q"));

    assert_eq!(genbvp(&["sweep", "P1", "--discretizer", "simpson"]).status.code(), Some(3));
    assert_eq!(genbvp(&["solve"]).status.code(), Some(3));
}

#[test]
fn strategies_are_listed() {
    let text = stdout(&genbvp(&["strategies"]));
    for name in ["midpoint", "right-endpoint", "mean", "polygonal", "sawtooth", "constant-shift", "none"] {
        assert!(text.contains(name), "{name}");
    }
}
