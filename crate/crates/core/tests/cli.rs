use std::fs;
use std::process::{Command, Output};

fn finetti(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_finetti"))
        .args(args)
        .env_remove("FINETTI_LOG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> &str {
    std::str::from_utf8(&o.stdout).unwrap()
}

#[test]
fn compute_golden_row() {
    let o = finetti(&[
        "compute", "--p", "0.5", "--alpha", "0.5", "--N", "2", "--method", "dp", "--header",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "p,alpha,pi,beta,N,method,value,std_error,mu_limit,abs_err,condition_satisfied\n\
         0.5,0.5,1.0,1.0,2,dp,0.3194444444444444,,0.36189625663488917,0.04245181219044475,false\n"
    );
    assert!(o.stderr.is_empty());
}

#[test]
fn compute_limits() {
    for (alpha, expected) in [("1", 0.2178), ("0.5", 0.3619)] {
        let o = finetti(&[
            "compute", "--p", "0.5", "--alpha", alpha, "--method", "limit",
        ]);
        assert_eq!(o.status.code(), Some(0));
        let fields: Vec<&str> = stdout(&o).trim_end().split(',').collect();
        assert_eq!(fields[4], "");
        let value: f64 = fields[6].parse().unwrap();
        assert!((value - expected).abs() < 5e-5);
    }
}

#[test]
fn study_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let csv = dir.path().join(format!("{name}.csv"));
        let svg = dir.path().join(format!("{name}.svg"));
        let o = finetti(&[
            "study",
            "--p-list",
            "0.5,0.3",
            "--alpha-list",
            "1,0.75",
            "--n-list",
            "8,16,32",
            "--method",
            "dp,closed,mc,limit",
            "--trials",
            "2000",
            "--seed",
            "7",
            "--out",
            csv.to_str().unwrap(),
            "--svg",
            svg.to_str().unwrap(),
        ]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert!(o.stdout.is_empty());
        (fs::read(csv).unwrap(), fs::read_to_string(svg).unwrap())
    };
    let (a, svg) = run("a");
    let (b, _) = run("b");
    assert_eq!(a, b);

    let text = String::from_utf8(a).unwrap();
    assert!(!text.contains('\r'));
    assert_eq!(text.lines().count(), 1 + 2 * 2 * 3 * 4);

    let doc = roxmltree::Document::parse(&svg).unwrap();
    let polylines = doc
        .descendants()
        .filter(|n| n.has_tag_name("polyline"))
        .count();
    assert_eq!(polylines, 2 * 2 * 3);
}

#[test]
fn study_to_stdout_matches_file() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let args = [
        "study",
        "--p-list",
        "0.5",
        "--alpha-list",
        "1",
        "--n-list",
        "4,2",
    ];
    let to_stdout = finetti(&args);
    let mut with_out = args.to_vec();
    with_out.extend(["--out", csv.to_str().unwrap()]);
    assert_eq!(finetti(&with_out).status.code(), Some(0));
    assert_eq!(to_stdout.stdout, fs::read(csv).unwrap());
}

#[test]
fn simulate_is_deterministic_and_accurate() {
    let args = [
        "simulate", "--pi", "1", "--beta", "1", "--N", "1", "--trials", "100000", "--seed", "42",
    ];
    let a = finetti(&args);
    let b = finetti(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let line = stdout(&a).lines().nth(1).unwrap().to_string();
    let mean: f64 = line.split(',').next().unwrap().parse().unwrap();
    assert!((mean - 0.25).abs() <= 4.0 * 0.25 / 1e5f64.sqrt());
    assert!(line.ends_with(",100000,42"));
}

#[test]
fn exit_codes() {
    assert_eq!(finetti(&["verify"]).status.code(), Some(0));
    assert_eq!(
        finetti(&["verify", "--max-n", "3", "--inject-fault"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(finetti(&["verify", "--trunc", "33"]).status.code(), Some(2));
    assert_eq!(
        finetti(&[
            "study",
            "--p-list",
            "0.5",
            "--alpha-list",
            "1",
            "--n-list",
            ""
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        finetti(&["compute", "--p", "0", "--alpha", "1", "--N", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(finetti(&["frobnicate"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("missing").join("out.csv");
    let o = finetti(&[
        "study",
        "--p-list",
        "0.5",
        "--alpha-list",
        "1",
        "--n-list",
        "4",
        "--out",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!o.stderr.is_empty());
}

#[test]
fn verify_report_lines() {
    let o = finetti(&["verify"]);
    let lines: Vec<&str> = stdout(&o).lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines.iter().all(|l| l.starts_with("PASS ")));
    let o = finetti(&["verify", "--max-n", "2", "--trunc", "4", "--inject-fault"]);
    assert!(stdout(&o)
        .lines()
        .any(|l| l.starts_with("FAIL eigen_residual")));
}

#[test]
fn log_output_stays_off_stdout() {
    let o = Command::new(env!("CARGO_BIN_EXE_finetti"))
        .args([
            "compute", "--pi", "2", "--beta", "0.5", "--N", "50", "--method", "closed",
        ])
        .env("FINETTI_LOG", "debug")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1);
}
