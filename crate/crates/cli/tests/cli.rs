use std::fs;
use std::process::{Command, Output};

use sbm_core::io::parse_labeling;
use sbm_core::nmi;

fn sbm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sbm"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn sample_fit_eval_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let o = sbm(&[
        "sample",
        "--k",
        "2",
        "--s1",
        "0.9",
        "--s2",
        "0.05",
        "--rho-mode",
        "const",
        "--rho",
        "1",
        "--n",
        "10",
        "--seed",
        "4",
        "--out",
        &p("g.txt"),
        "--labels",
        &p("z.txt"),
    ]);
    assert!(o.status.success());
    assert!(fs::read_to_string(p("g.txt"))
        .unwrap()
        .starts_with("10 2\n"));

    let o = sbm(&[
        "fit",
        &p("g.txt"),
        "--objective",
        "ml",
        "--exact",
        "--alpha",
        "1/5",
        "--out",
        &p("e.txt"),
    ]);
    assert!(o.status.success());
    let meta: serde_json::Value = serde_json::from_str(stdout(&o).lines().next().unwrap()).unwrap();
    assert_eq!(meta["method"], "exact");
    assert_eq!(meta["feasible"], true);
    assert_eq!(meta["n"], 10);

    let o = sbm(&["eval", &p("e.txt"), &p("z.txt")]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("misclassified "));
}

#[test]
fn headerless_edge_lists_need_k() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    fs::write(&g, "1 2\n2 3\n1 3\n4 5\n5 6\n4 6\n").unwrap();
    let g = g.to_str().unwrap();
    assert_eq!(sbm(&["fit", g, "--no-header"]).status.code(), Some(2));
    let o = sbm(&[
        "fit",
        g,
        "--no-header",
        "--k",
        "2",
        "--exact",
        "--alpha",
        "1/3",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let labels: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(labels, ["1", "1", "1", "2", "2", "2"]);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(
        sbm(&["fit", "/nonexistent/graph.txt", "--k", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(sbm(&["constant", "--k", "2"]).status.code(), Some(2));
    assert_eq!(sbm(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(
        sbm(&["constant", "--k", "2", "--s1", "-1", "--s2", "1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn constant_reports_verdicts() {
    let o = sbm(&["constant", "--k", "2", "--s1", "16", "--s2", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("C 4.50000000000\n"), "{text}");
    assert!(text.contains("ml_exact_recovery (C >= 1) true"));
    assert!(text.contains("icl_exact_recovery (C >= 1 + k^2 = 5) false"));
}

#[test]
fn params_file_and_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let params = dir.path().join("model.txt");
    fs::write(
        &params,
        "k = 3\npi = 0.2, 0.3, 0.5\nS = 5, 1, 1; 1, 5, 1; 1, 1, 5\nrho_mode = log_n_over_n\n",
    )
    .unwrap();
    let o = sbm(&["constant", "--params", params.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        format!("params = {}\nn = 80,120\nreps = 100\n", params.display()),
    )
    .unwrap();
    let o = sbm(&[
        "concentration",
        "--config",
        cfg.to_str().unwrap(),
        "--delta",
        "1000",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let rows: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("80 ") || l.starts_with("120 "))
        .collect();
    assert_eq!(rows.len(), 2);
    for row in rows {
        // a huge radius is never violated
        let fields: Vec<&str> = row.split_whitespace().collect();
        assert_eq!(fields[4], "0");
        assert_eq!(fields[5], "true");
    }
}

#[test]
fn kept_labelings_reproduce_the_csv() {
    let dir = tempfile::tempdir().unwrap();
    let keep = dir.path().join("labels");
    let plot = dir.path().join("curve.svg");
    let o = sbm(&[
        "sweep-separation",
        "--n",
        "40",
        "--reps",
        "2",
        "--grid",
        "0,3",
        "--restarts",
        "3",
        "--keep-labelings",
        keep.to_str().unwrap(),
        "--plot",
        plot.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(fs::read_to_string(&plot).unwrap().starts_with("<svg"));
    let csv = stdout(&o);
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 8);
    for (i, row) in rows.iter().enumerate() {
        let f: Vec<&str> = row.split(',').collect();
        let stem = keep.join(format!("row{:05}_{}", i + 1, f[7]));
        let read = |suffix: &str| {
            let text = fs::read_to_string(format!("{}_{suffix}.txt", stem.display())).unwrap();
            parse_labeling(&text, Some(2)).unwrap()
        };
        let value = nmi(&read("estimate"), &read("truth")).unwrap();
        assert_eq!(value, f[8].parse::<f64>().unwrap());
    }
    let summary = String::from_utf8(o.stderr).unwrap();
    assert!(summary.contains("soft limit 0.1"));
}

#[test]
fn verify_fails_loudly_on_a_corrupted_tau() {
    let o = sbm(&["verify", "--seed", "5", "--corrupt-tau"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL icl_ml_gap_bound"));
}
