use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hullsolve_cli::report::{Outcome, RunReport, TRACE_HEADER};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hullsolve"))
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).env("HULLSOLVE_THREADS", "2").output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Fixture {
    dir: TempDir,
    a1: PathBuf,
    b1: PathBuf,
    a2: PathBuf,
    b2: PathBuf,
}

fn fixture() -> Fixture {
    let dir = TempDir::new().unwrap();
    let a1 = write(dir.path(), "ex1A.txt", "2 2\n3 -2\n2 1\n");
    let b1 = write(dir.path(), "ex1b.txt", "-1\n4\n");
    let a2 = write(dir.path(), "ex2A.mtx", "%%MatrixMarket matrix array real general\n2 2\n2\n1\n-1\n1\n");
    let b2 = write(dir.path(), "ex2b.txt", "0 -3\n");
    Fixture { dir, a1, b1, a2, b2 }
}

fn report(path: &Path) -> RunReport {
    RunReport::from_json(&fs::read_to_string(path).unwrap()).unwrap()
}

fn solve_section(r: &RunReport) -> &hullsolve_cli::report::SolveSection {
    match &r.outcome {
        Outcome::Solve(s) => s,
        other => panic!("not a solve report: {other:?}"),
    }
}

#[test]
fn nonneg_first_system() {
    let f = fixture();
    let rep = f.dir.path().join("r.json");
    let out = run(&[
        "solve",
        "--matrix",
        s(&f.a1),
        "--rhs",
        s(&f.b1),
        "--mode",
        "nonneg",
        "--epsilon0",
        "1e-10",
        "--report",
        s(&rep),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&rep);
    let x = solve_section(&r).x.clone().unwrap();
    assert!((x[0].unwrap() - 1.0).abs() < 1e-8 && (x[1].unwrap() - 2.0).abs() < 1e-8);
    assert!(solve_section(&r).relative_residual.unwrap() <= 1e-10);
}

#[test]
fn incremental_second_system_with_trace() {
    let f = fixture();
    let rep = f.dir.path().join("r.json");
    let csv = f.dir.path().join("t.csv");
    let out = run(&[
        "solve",
        "--matrix",
        s(&f.a2),
        "--rhs",
        s(&f.b2),
        "--mode",
        "incremental",
        "--epsilon0",
        "1e-8",
        "--trace",
        s(&csv),
        "--report",
        s(&rep),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&rep);
    let sec = solve_section(&r);
    let x = sec.x.clone().unwrap();
    assert!((x[0].unwrap() + 1.0).abs() < 1e-6 && (x[1].unwrap() + 2.0).abs() < 1e-6);
    assert!(sec.shift_bounds.as_ref().unwrap().log_tau_star_prime.is_some());

    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(TRACE_HEADER));
    let last = lines.last().unwrap();
    let value: f64 = last.split(',').nth(2).unwrap().parse().unwrap();
    assert_eq!(value, sec.residual_norm.unwrap());
    assert_eq!(r.trace.as_ref().unwrap().last().unwrap().gap_or_e, sec.residual_norm);
}

#[test]
fn double_increment_policy() {
    let f = fixture();
    let out = run(&["solve", "--matrix", s(&f.a2), "--rhs", s(&f.b2), "--increment", "double", "-q"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
}

#[test]
fn nonneg_mode_reports_certificate() {
    let f = fixture();
    let rep = f.dir.path().join("r.json");
    let out = run(&["solve", "--matrix", s(&f.a2), "--rhs", s(&f.b2), "--mode", "nonneg", "--report", s(&rep)]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&rep);
    let w = solve_section(&r).witness.clone().expect("certificate");
    assert!(w.margins.iter().all(|m| m.unwrap() < 0.0));
    assert_eq!(r.status, "infeasible_nonneg");
}

#[test]
fn hull_outside_gives_witness() {
    let dir = TempDir::new().unwrap();
    let pts = write(dir.path(), "pts.txt", "3 2\n0 0\n1 0\n0 1\n");
    let p = write(dir.path(), "p.txt", "2 2\n");
    let rep = dir.path().join("r.json");
    let out = run(&["hull", "--points", s(&pts), "--target", s(&p), "--report", s(&rep)]);
    assert_eq!(out.status.code(), Some(1));
    let Outcome::Hull(h) = report(&rep).outcome else { panic!() };
    let w = h.witness.unwrap();
    assert!(w.margins.iter().all(|m| m.unwrap() < 0.0));
    let (lo, hi) = (w.distance_lower.unwrap(), w.distance_upper.unwrap());
    let exact = 1.5 * 2f64.sqrt();
    assert!(lo <= exact && exact <= hi);

    let inside = write(dir.path(), "q.txt", "0.2 0.3\n");
    let out = run(&["hull", "--points", s(&pts), "--target", s(&inside), "--epsilon", "1e-3", "--init", "centroid"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn reports_are_deterministic() {
    let f = fixture();
    // Same argv both times: the command echo is part of the report.
    let rep = f.dir.path().join("r.json");
    let mut seen = Vec::new();
    for _ in 0..2 {
        let out = run(&["solve", "--matrix", s(&f.a2), "--rhs", s(&f.b2), "--trace", "/dev/null", "--report", s(&rep)]);
        assert_eq!(out.status.code(), Some(0));
        seen.push(report(&rep).without_wall_time().to_json());
    }
    assert_eq!(seen[0], seen[1]);

    let (b1, b2) = (f.dir.path().join("b1.json"), f.dir.path().join("b2.json"));
    for (r, threads) in [(&b1, "1"), (&b2, "3")] {
        let out = bin()
            .args(["bench", "--suite", "nonneg", "--sizes", "4,8", "--count", "3", "--seed", "5", "--epsilon0", "0.01"])
            .args(["-q", "--report", s(r)])
            .env("HULLSOLVE_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
    }
    let (Outcome::Bench(x), Outcome::Bench(y)) = (report(&b1).outcome, report(&b2).outcome) else { panic!() };
    assert_eq!(x.rows, y.rows);
    assert!(x.rows.windows(2).all(|w| w[0].id < w[1].id));
    assert_eq!((x.threads, y.threads), (1, 3));
}

#[test]
fn analyze_and_oracle() {
    let f = fixture();
    let rep = f.dir.path().join("a.json");
    assert_eq!(run(&["analyze", "--matrix", s(&f.a2), "--rhs", s(&f.b2), "--report", s(&rep)]).status.code(), Some(0));
    let Outcome::Analyze(a) = report(&rep).outcome else { panic!() };
    assert!(a.delta0_bound.unwrap() > 0.0);
    assert!(a.shift_bounds.log_tau_star.unwrap() >= a.shift_bounds.log_tau_star_prime.unwrap());

    let out = run(&["oracle", "--matrix", s(&f.a2), "--rhs", s(&f.b2), "--report", s(&rep)]);
    assert_eq!(out.status.code(), Some(0));
    let Outcome::Oracle(o) = report(&rep).outcome else { panic!() };
    assert_eq!(o.t_star, Some(2.0));
}

#[test]
fn input_errors_exit_two() {
    let f = fixture();
    let empty = write(f.dir.path(), "empty.txt", "");
    let out = run(&["solve", "--matrix", s(&empty), "--rhs", s(&f.b1)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));

    let short = write(f.dir.path(), "short.txt", "1 2 3\n");
    assert_eq!(run(&["solve", "--matrix", s(&f.a1), "--rhs", s(&short)]).status.code(), Some(2));

    let singular = write(f.dir.path(), "sing.txt", "2 2\n1 -1\n0 0\n");
    assert_eq!(run(&["solve", "--matrix", s(&singular), "--rhs", s(&f.b1), "--mode", "nonneg"]).status.code(), Some(2));

    assert_eq!(run(&["solve", "--matrix", s(&f.a1)]).status.code(), Some(2));
    assert_eq!(run(&["solve", "--matrix", s(&f.a1), "--rhs", s(&f.b1), "--increment", "x"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
