use std::path::Path;
use std::process::{Command, Output};

use psi_ham::doc::{read_json, to_json_string, SeriesDoc};
use psi_ham::table::{Axis, EvalRequest, Source};
use psi_ham_core::verify::reference_iterates;
use psi_ham_core::{series_eval, SpatialPoint};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_psi-ham"))
        .args(args)
        .env_remove("PSI_HAM_TOLERANCES")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

const TUBE_PRESSURE: [&str; 10] = [
    "--app",
    "tube-pressure",
    "--psi",
    "log",
    "--a",
    "1",
    "--nu",
    "1",
    "--P",
    "1",
];

#[test]
fn ml_prints_value_then_terms() {
    let o = run(&["ml", "--alpha", "1", "--z", "-2", "--tol", "1e-12"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("0.135335283237"));
    assert!(lines.next().unwrap().starts_with("terms "));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["ml", "--alpha", "0.5", "--z", "-100"]).status.code(), Some(2));
    let region = run(&[
        "solve", "--app", "planar", "--rho0", "1", "--alpha", "0.5", "--hbar", "0.5", "--resum",
    ]);
    assert_eq!(region.status.code(), Some(3));
    let bad_grid = run(&[
        &["eval"][..],
        &TUBE_PRESSURE,
        &["--alphas", "1", "--r", "0.1", "--t", "5:1:10"],
    ]
    .concat());
    assert_eq!(bad_grid.status.code(), Some(2));
    let missing = run(&["solve", "--app", "tube", "--nu", "1", "--alpha", "0.5"]);
    assert_eq!(missing.status.code(), Some(2));
    let wrong_param = run(&[
        "solve", "--app", "tube", "--nu", "1", "--P", "1", "--alpha", "0.5", "--hbar", "-1",
    ]);
    assert_eq!(wrong_param.status.code(), Some(2));
    let early = run(&[
        &["eval"][..],
        &TUBE_PRESSURE,
        &["--alphas", "1", "--r", "0.1", "--t", "0.5:2:4"],
    ]
    .concat());
    assert_eq!(early.status.code(), Some(2));
}

#[test]
fn solve_is_deterministic_and_round_trips_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let args = |name: &str| {
        let out = dir.path().join(name);
        let o = run(&[
            "solve",
            "--app",
            "planar",
            "--psi",
            "log",
            "--a",
            "1",
            "--rho0",
            "1",
            "--g",
            "0.3",
            "--alpha",
            "0.7",
            "--hbar",
            "-0.6",
            "--hbar-v",
            "-0.8",
            "--orders",
            "5",
            "--out",
            path_str(&out),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        out
    };
    let first = std::fs::read(args("a.json")).unwrap();
    let second = std::fs::read(args("b.json")).unwrap();
    assert_eq!(first, second);

    let doc: SeriesDoc = read_json(&dir.path().join("a.json")).unwrap();
    assert_eq!(to_json_string(&doc).as_bytes(), &first[..]);
    let (problem, loaded) = doc.to_series().unwrap();
    let solve = psi_ham::cli::SolveArgs {
        problem: psi_ham::cli::ProblemArgs {
            problem: None,
            app: Some("planar".into()),
            psi: Some("log".into()),
            a: Some(1.0),
            nu: None,
            pressure: None,
            rho0: Some(1.0),
            g: Some(0.3),
        },
        alpha: Some(0.7),
        hbar: -0.6,
        hbar_v: Some(-0.8),
        orders: 5,
        resum: false,
        terms: 4,
        out: None,
    };
    let (_, _, fresh) = psi_ham::cli::solve_series(&solve).unwrap();
    for i in 0..12 {
        let x = 0.5 * i as f64;
        let point = SpatialPoint::Planar { x, y: 0.2 };
        for t in [1.0, 1.3, 2.0, 3.7] {
            let a = series_eval(&loaded, problem.psi(), 1.0, point, t, 5).unwrap();
            let b = series_eval(&fresh, problem.psi(), 1.0, point, t, 5).unwrap();
            assert_eq!(a.u.to_bits(), b.u.to_bits());
            assert_eq!(a.v.unwrap().to_bits(), b.v.unwrap().to_bits());
        }
    }
}

#[test]
fn eval_of_stored_series_matches_in_process_table() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("tube.json");
    let o = run(&[
        "solve",
        "--app",
        "tube",
        "--psi",
        "log",
        "--a",
        "1",
        "--nu",
        "1",
        "--alpha",
        "0.75",
        "--hbar",
        "-0.5",
        "--resum",
        "--terms",
        "4",
        "--out",
        path_str(&file),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let cli = run(&["eval", "--series", path_str(&file), "--r", "0.5:2:7", "--t", "1:2:5"]);
    assert_eq!(cli.status.code(), Some(0), "{}", String::from_utf8_lossy(&cli.stderr));
    let (problem, series) = read_json::<SeriesDoc>(&file).unwrap().to_series().unwrap();
    let req = EvalRequest {
        problem,
        axes: vec![Axis::parse("r", "0.5:2:7").unwrap(), Axis::parse("t", "1:2:5").unwrap()],
        alphas: vec![0.75],
        source: Source::Series { series, orders_used: 4 },
    };
    assert_eq!(stdout(&cli), req.run().unwrap().to_csv());
    // the resummed tube series is the 4-term closed form
    let exact = run(&[
        "eval", "--app", "tube", "--psi", "log", "--a", "1", "--nu", "1", "--alpha", "0.75", "--terms", "4", "--r",
        "0.5:2:7", "--t", "1:2:5",
    ]);
    assert_eq!(stdout(&exact), stdout(&cli));
}

#[test]
fn figure_two_shape() {
    let o = run(&[
        &["eval"][..],
        &TUBE_PRESSURE,
        &["--r", "0.1", "--t", "1:5:100", "--alphas", "1,0.8,0.5"],
    ]
    .concat());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.ends_with('\n') && !text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,u(alpha=1),u(alpha=0.8),u(alpha=0.5)");
    assert_eq!(lines.len(), 101);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 4));
    assert_eq!(lines[1], "1,0.99,0.99,0.99");
    assert!(lines[100].starts_with("5,"));
}

#[test]
fn figure_six_has_opposite_components() {
    let o = run(&[
        "eval",
        "--app",
        "planar",
        "--psi",
        "log",
        "--a",
        "1",
        "--rho0",
        "1",
        "--y",
        "0.2",
        "--t",
        "2",
        "--x",
        "0:6.283:100",
        "--alphas",
        "1,0.7,0.4",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 101);
    assert_eq!(lines[0].split(',').count(), 7);
    for l in &lines[1..] {
        let c: Vec<f64> = l.split(',').map(|s| s.parse().unwrap()).collect();
        for pair in c[1..].chunks(2) {
            assert_eq!(pair[0], -pair[1]);
        }
    }
}

#[test]
fn singular_points_become_empty_cells() {
    let o = run(&[
        "eval", "--app", "tube", "--nu", "1", "--alpha", "0.5", "--r", "0:1:3", "--t", "0.5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().nth(1), Some("0,"));
    let err = String::from_utf8(o.stderr).unwrap();
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("warning: r=0"));
}

#[test]
fn adm_reduction_leaves_only_first_order() {
    let o = run(&[
        &["solve"][..],
        &TUBE_PRESSURE,
        &["--alpha", "0.5", "--hbar", "-1", "--orders", "3"],
    ]
    .concat());
    assert_eq!(o.status.code(), Some(0));
    let doc: SeriesDoc = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc.u.len(), 4);
    assert!(!doc.u[0].is_empty() && !doc.u[1].is_empty());
    assert!(doc.u[2].is_empty() && doc.u[3].is_empty());
}

#[test]
fn tube_solve_matches_reference_listing() {
    let o = run(&[
        "solve", "--app", "tube", "--nu", "1", "--alpha", "0.6", "--orders", "4", "--hbar", "-0.7",
    ]);
    let (problem, series) = serde_json::from_str::<SeriesDoc>(&stdout(&o))
        .unwrap()
        .to_series()
        .unwrap();
    let (table, _) = reference_iterates(&problem, -0.7);
    // the listing starts at u₁
    assert_eq!(table.len(), 4);
    for (i, want) in table.iter().enumerate() {
        assert!(
            series.u()[i + 1].max_deviation(want).unwrap() <= 1e-12,
            "order {}",
            i + 1
        );
    }
}

#[test]
fn verify_report_and_budget_override() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let ok = run(&[
        &["verify"][..],
        &TUBE_PRESSURE,
        &["--alpha", "0.5", "--out", path_str(&report)],
    ]
    .concat());
    assert_eq!(ok.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(doc["within_budget"], true);
    assert!(doc["sup"].as_f64().unwrap() <= 5e-3);
    assert_eq!(doc["nodes"], 2048);

    let strict = dir.path().join("strict.toml");
    let builtin = include_str!("../tolerances.toml");
    std::fs::write(&strict, builtin.replace("sup_norm = 5e-3", "sup_norm = 1e-9")).unwrap();
    let over = Command::new(env!("CARGO_BIN_EXE_psi-ham"))
        .args([&["verify"][..], &TUBE_PRESSURE, &["--alpha", "0.5"]].concat())
        .env("PSI_HAM_TOLERANCES", &strict)
        .output()
        .unwrap();
    assert_eq!(over.status.code(), Some(1));

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, builtin.replace("version = 1", "version = 9")).unwrap();
    let rejected = Command::new(env!("CARGO_BIN_EXE_psi-ham"))
        .args([&["verify"][..], &TUBE_PRESSURE, &["--alpha", "0.5"]].concat())
        .env("PSI_HAM_TOLERANCES", &bad)
        .output()
        .unwrap();
    assert_eq!(rejected.status.code(), Some(2));
}

#[test]
fn zero_candidate_flags_initial_data() {
    let o = run(&[
        "verify",
        "--app",
        "tube",
        "--nu",
        "1",
        "--alpha",
        "0.5",
        "--candidate",
        "zero",
        "--r",
        "0.5:1:5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["sup"].as_f64(), Some(0.0));
    assert_eq!(doc["ic_max_deviation"].as_f64(), Some(1.0));
}

#[test]
fn problem_documents_reject_unknown_fields() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("p.json");
    std::fs::write(
        &good,
        r#"{"app":"tube-pressure","alpha":0.5,"psi":"log","a":1,"nu":1,"P":1}"#,
    )
    .unwrap();
    let o = run(&["solve", "--problem", path_str(&good), "--hbar", "-1", "--orders", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let bad = dir.path().join("q.json");
    std::fs::write(
        &bad,
        r#"{"app":"tube-pressure","alpha":0.5,"psi":"log","a":1,"nu":1,"P":1,"H":2}"#,
    )
    .unwrap();
    let o = run(&["solve", "--problem", path_str(&bad), "--hbar", "-1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn figure_export_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(run(&["figure", "--out", path_str(&a)]).status.code(), Some(0));
    assert_eq!(run(&["figure", "--out", path_str(&b)]).status.code(), Some(0));
    for id in 1..=6 {
        let name = format!("figure{id}.csv");
        let x = std::fs::read(a.join(&name)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, std::fs::read(b.join(&name)).unwrap(), "{name}");
    }
    assert_eq!(run(&["figure", "--id", "7"]).status.code(), Some(2));
}
