use std::fs;
use std::process::{Command, Output};

fn nearcurve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nearcurve"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn count_prints_n() {
    let o = nearcurve(&[
        "count", "--curve", "poly:0,0,1", "--interval", "0,1", "--Q", "3", "--delta", "1/10", "--method",
        "exact",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "N=6"));
}

#[test]
fn parabola_example() {
    let o = nearcurve(&["examples", "parabola", "--Q", "10000"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.lines().any(|l| l == "construction_count=5150"));
    assert!(out.lines().any(|l| l == "verified=true"));
}

#[test]
fn exit_codes() {
    let bad_delta = nearcurve(&["count", "--curve", "cos", "--interval", "0,1", "--Q", "3", "--delta", "0.7"]);
    assert_eq!(bad_delta.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad_delta.stderr).contains("(0, 1/2)"));
    assert_eq!(nearcurve(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(nearcurve(&["count", "--curve", "poly:", "--interval", "0,1", "--Q", "3", "--delta", "0.1"]).status.code(), Some(1));
    let decimal_exact = nearcurve(&[
        "count", "--curve", "poly:0,0,1", "--interval", "0,1", "--Q", "3", "--delta", "0.1", "--method", "exact",
    ]);
    assert_eq!(decimal_exact.status.code(), Some(1));
    let outside = nearcurve(&["dual", "--curve", "poly:0,0,1", "--interval", "0,1", "--y", "3"]);
    assert_eq!(outside.status.code(), Some(2));
    let budget = nearcurve(&["poisson", "--g", "poly:0,0,4000", "--range", "0,1", "--tol", "1e-14"]);
    assert_eq!(budget.status.code(), Some(2), "{}", String::from_utf8_lossy(&budget.stderr));
    assert_eq!(nearcurve(&["--help"]).status.code(), Some(0));
}

#[test]
fn scan_output_is_reproducible_across_threads() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str, name: &str| {
        let path = dir.path().join(name);
        let o = nearcurve(&[
            "scan", "--curve", "poly:0,0,0,1", "--interval", "-1/2,1/2", "--Q", "100,200", "--delta",
            "0.1,1/4", "--threads", threads, "--out", path.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        fs::read(path).unwrap()
    };
    let one = run("1", "a.csv");
    assert_eq!(one, run("4", "b.csv"));
    let text = String::from_utf8(one).unwrap();
    assert!(text.starts_with("# curve: poly:0,0,0,1; interval:-1/2,1/2\n# config_digest: "));
    assert!(text.contains("# version: nearcurve "));
    assert!(text.contains("\ncurve_id,Q,delta,N,main_term,residual,ambiguous,method,elapsed_ms\n"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 5);
}

#[test]
fn timings_add_timestamp() {
    let o = nearcurve(&["count", "--curve", "cos", "--interval", "0,1", "--Q", "10", "--delta", "0.1", "--timings"]);
    assert!(stdout(&o).lines().any(|l| l.starts_with("# timestamp: ")));
}

#[test]
fn config_file_with_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "command = count\ncurve = poly:0,0,1\ninterval = 0,1\nQ = 2\ndelta = 1/10\nmethod = exact\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let from_file = stdout(&nearcurve(&["--config", cfg, "--Q", "3"]));
    assert!(from_file.lines().any(|l| l == "N=6"));
    let explicit = stdout(&nearcurve(&[
        "count", "--curve", "poly:0,0,1", "--interval", "0,1", "--Q", "3", "--delta", "1/10", "--method", "exact",
    ]));
    assert_eq!(from_file, explicit, "same effective config gives same bytes");
}

#[test]
fn json_lines_carry_meta() {
    let o = nearcurve(&[
        "dualsum", "--curve", "poly:0,1/4,1/2", "--interval", "0,1", "--K", "20", "--Q0", "100", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 7);
    assert!(lines[0]["meta"]["config_digest"].is_string());
    assert_eq!(lines[1]["variant"], "2.40");
}

#[test]
fn scan_fit_and_plot_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("scan.csv");
    let plots = dir.path().join("plots");
    let o = nearcurve(&[
        "scan", "--curve", "poly:0,0,1", "--interval", "0,1", "--Q", "100,200,400,800", "--delta", "1/4",
        "--method", "exact", "--out", csv.to_str().unwrap(), "--emit-plot", plots.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let fit = nearcurve(&["fit", "--input", csv.to_str().unwrap(), "--axis", "Q", "--fixed", "0.25"]);
    assert_eq!(fit.status.code(), Some(0), "{}", String::from_utf8_lossy(&fit.stderr));
    let report: serde_json::Value = serde_json::from_str(stdout(&fit).lines().nth(1).unwrap()).unwrap();
    let slope = report["slope"].as_f64().unwrap();
    assert!((1.9..=2.1).contains(&slope), "{slope}");
    assert!(plots.join("scan_count.json").exists());
}

#[test]
fn remaining_subcommands_run() {
    let cases: [&[&str]; 6] = [
        &["expsum", "--curve", "poly:0,0,1", "--interval", "0,1", "--Q", "3", "--k", "1"],
        &["discrepancy", "--curve", "cos", "--interval", "-1,1", "--Q", "30", "--trials", "5", "--seed", "3"],
        &["vdc", "--curve", "poly:0,0,0,1", "--interval", "0,1", "--d", "3", "--format", "csv"],
        &["poisson", "--g", "poly:0,0,5", "--range", "0,1"],
        &["dual", "--curve", "poly:0,0,0,1", "--interval", "1/5,1", "--roundtrip", "200"],
        &["examples", "fermat", "--d", "3", "--Q", "200,400"],
    ];
    for args in cases {
        let o = nearcurve(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).starts_with("# curve: "), "{args:?}");
    }
    let o = nearcurve(&["expsum", "--curve", "poly:0,0,1", "--interval", "0,1", "--Q", "3", "--k", "1"]);
    assert!(stdout(&o).lines().any(|l| l == "re=4.0"));
}
