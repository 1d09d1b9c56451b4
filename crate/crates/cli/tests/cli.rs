use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn tailcheck(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tailcheck"))
        .args(args)
        .current_dir(cwd)
        .env_remove("TAILCHECK_THREADS")
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}\nstdout:\n{}\nstderr:\n{}",
        out.status,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

const QUICK_ROC: [&str; 7] = [
    "simulate-roc",
    "--reps",
    "20",
    "--permutations",
    "99",
    "--boots",
    "100",
];

#[test]
fn zero_reps_is_a_config_error_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = tailcheck(&["simulate-roc", "--reps", "0", "--out", "res"], dir.path());
    assert!(!out.status.success());
    assert!(stderr(&out).contains("n_reps"), "{}", stderr(&out));
    assert!(!dir.path().join("res").exists());
}

#[test]
fn bad_flag_prints_usage() {
    let dir = tempfile::tempdir().unwrap();
    let out = tailcheck(&["simulate-roc", "--bogus"], dir.path());
    assert!(!out.status.success());
    assert!(stderr(&out).contains("Usage"), "{}", stderr(&out));
}

#[test]
fn same_seed_gives_byte_identical_summaries() {
    let dir = tempfile::tempdir().unwrap();
    let mut a = QUICK_ROC.to_vec();
    a.extend(["--seed", "7", "--out", "a"]);
    let mut b = QUICK_ROC.to_vec();
    b.extend(["--seed", "7", "--out", "b", "--threads", "3"]);
    ok(&tailcheck(&a, dir.path()));
    ok(&tailcheck(&b, dir.path()));
    for name in ["roc_venkatraman.json", "roc_bootstrap_auc.json"] {
        let x = fs::read(dir.path().join("a").join(name)).unwrap();
        let y = fs::read(dir.path().join("b").join(name)).unwrap();
        assert_eq!(x, y, "{name}");
        let v: Value = serde_json::from_slice(&x).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["decomposition"]["n_reps"], 20);
    }
}

#[test]
fn records_csv_has_the_documented_header() {
    let dir = tempfile::tempdir().unwrap();
    let mut a = QUICK_ROC.to_vec();
    a.extend(["--out", "r", "--records"]);
    ok(&tailcheck(&a, dir.path()));
    let text = fs::read_to_string(dir.path().join("r/roc_venkatraman.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("rep,statistic,p_value,decision,true_state")
    );
    assert_eq!(lines.count(), 20);
}

#[test]
fn default_roc_run_shows_gamma_inflation_for_venkatraman() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(&tailcheck(
        &[
            "simulate-roc",
            "--reps",
            "1000",
            "--seed",
            "42",
            "--out",
            "o",
        ],
        dir.path(),
    ));
    let v = json(&dir.path().join("o/roc_venkatraman.json"));
    let gamma = v["decomposition"]["gamma"]["rate"].as_f64().unwrap();
    assert!((0.35..=0.50).contains(&gamma), "gamma {gamma}");
    // the table shows the same number
    let row = stdout
        .lines()
        .find(|l| l.starts_with("gamma"))
        .expect("gamma row");
    assert!(row.contains(&format!("{gamma:.4}")), "{row}");
    let boot = json(&dir.path().join("o/roc_bootstrap_auc.json"));
    assert!(boot["decomposition"]["gamma"]["rate"].as_f64().unwrap() < 0.10);
}

#[test]
fn survival_run_reverses_sign_plots_and_round_trips_the_data() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(&tailcheck(
        &[
            "simulate-survival",
            "--out",
            "s",
            "--plot",
            "km.svg",
            "--data",
            "cross.csv",
        ],
        dir.path(),
    ));

    let summary = json(&dir.path().join("s/survival_crossing.json"));
    assert_eq!(summary["schema_version"], 1);
    let z = |kind: &str| {
        summary["tests"]
            .as_array()
            .unwrap()
            .iter()
            .find(|t| t["scheme"]["kind"] == kind)
            .unwrap()["z"]
            .as_f64()
            .unwrap()
    };
    assert_ne!(z("gehan_breslow").signum(), z("log_rank").signum());

    let em = json(&dir.path().join("s/survival_equal_median.json"));
    let n = em["decomposition"]["n_reps"].as_f64().unwrap();
    let a_longer = em["observed_directions"]["less"].as_f64().unwrap() / n;
    assert!((a_longer - 0.5).abs() <= 0.05, "{a_longer}");

    let svg = fs::read_to_string(dir.path().join("km.svg")).unwrap();
    let doc = roxmltree::Document::parse(&svg).expect("well-formed XML");
    let polylines = doc
        .descendants()
        .filter(|n| n.has_tag_name("polyline"))
        .count();
    assert_eq!(polylines, 2);

    // the exported dataset gives the same z values through `test survival`
    let tested = ok(&tailcheck(&["test", "survival", "cross.csv"], dir.path()));
    let table = |s: &str| -> Vec<String> {
        s.lines()
            .skip_while(|l| !l.starts_with("weighting"))
            .take(5)
            .map(String::from)
            .collect()
    };
    assert_eq!(table(&stdout), table(&tested));
    assert_eq!(table(&tested).len(), 5);
}

#[test]
fn audit_ci_csv_rows() {
    let dir = tempfile::tempdir().unwrap();
    ok(&tailcheck(&["audit-ci", "--out", "audit.csv"], dir.path()));
    let mut reader = csv::Reader::from_path(dir.path().join("audit.csv")).unwrap();
    assert_eq!(
        reader
            .headers()
            .unwrap()
            .iter()
            .collect::<Vec<_>>()
            .join(","),
        "estimator,n,p,coverage,alpha_l,alpha_u,left_hw,right_hw,width"
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    let f = |r: &csv::StringRecord, i: usize| r[i].parse::<f64>().unwrap();
    let of = |name: &'static str| rows.iter().filter(move |r| &r[0] == name);

    assert_eq!(of("cp-equal").count(), 99);
    assert!(of("cp-equal").all(|r| f(r, 4) <= 0.025 && f(r, 5) <= 0.025));
    assert!(of("cp-shortest").any(|r| f(r, 4) > 0.025 || f(r, 5) > 0.025));
    let mean_width =
        |name: &'static str| of(name).map(|r| f(r, 8)).sum::<f64>() / of(name).count() as f64;
    assert!(mean_width("cp-shortest") <= mean_width("cp-equal"));
    for r in &rows {
        let total = f(r, 3) + f(r, 4) + f(r, 5);
        assert!((total - 1.0).abs() < 1e-12);
    }
}

#[test]
fn audit_ci_selects_estimators_and_writes_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(&tailcheck(
        &["audit-ci", "--n", "10", "--estimator", "wald"],
        dir.path(),
    ));
    assert_eq!(stdout.lines().count(), 100);
    assert!(stdout.lines().skip(1).all(|l| l.starts_with("wald,10,")));
    let out = tailcheck(&["audit-ci", "--estimator", "nope"], dir.path());
    assert!(!out.status.success());
}

#[test]
fn survival_csv_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("bad.csv"),
        "time,event,group\n1.0,1,A\n2.0,2,B\n",
    )
    .unwrap();
    let out = tailcheck(&["test", "survival", "bad.csv"], dir.path());
    assert!(!out.status.success());
    let msg = stderr(&out);
    assert!(msg.contains("line 3") && msg.contains("event"), "{msg}");

    fs::write(dir.path().join("cols.csv"), "time,group\n1.0,A\n").unwrap();
    let msg = stderr(&tailcheck(&["test", "survival", "cols.csv"], dir.path()));
    assert!(
        msg.contains("line 1") && msg.contains("missing column `event`"),
        "{msg}"
    );
}

#[test]
fn roc_csv_checks_classes_and_cells() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("one.csv"),
        "class,marker_x,marker_y\n1,0.5,0.2\n1,0.7,0.1\n",
    )
    .unwrap();
    let out = tailcheck(&["test", "roc", "one.csv"], dir.path());
    assert!(!out.status.success());
    assert!(
        stderr(&out).contains("degenerate class"),
        "{}",
        stderr(&out)
    );

    fs::write(
        dir.path().join("nan.csv"),
        "class,marker_x,marker_y\n1,0.5,0.2\n0,x,0.1\n",
    )
    .unwrap();
    let msg = stderr(&tailcheck(&["test", "roc", "nan.csv"], dir.path()));
    assert!(msg.contains("line 3") && msg.contains("marker_x"), "{msg}");
}

fn write_roc_csv(path: &Path) {
    let mut text = String::from("class,marker_x,marker_y\n");
    for i in 0..30 {
        let class = i % 2;
        let x = i as f64 * 0.1 + class as f64;
        let y = ((i * 7) % 11) as f64 * 0.2 + 0.5 * class as f64;
        text.push_str(&format!("{class},{x},{y}\n"));
    }
    fs::write(path, text).unwrap();
}

#[test]
fn venkatraman_on_user_data_warns_about_direction() {
    let dir = tempfile::tempdir().unwrap();
    write_roc_csv(&dir.path().join("roc.csv"));
    let out = tailcheck(
        &["test", "roc", "roc.csv", "--permutations", "199"],
        dir.path(),
    );
    let stdout = ok(&out);
    assert!(stdout.contains("p_value:") && stdout.contains("decision:"));
    assert!(stderr(&out).contains("warning"), "{}", stderr(&out));

    let out = tailcheck(
        &[
            "test",
            "roc",
            "roc.csv",
            "--method",
            "bootstrap",
            "--boots",
            "200",
        ],
        dir.path(),
    );
    let stdout = ok(&out);
    assert!(stdout.contains("bootstrap_auc"));
    assert!(!stderr(&out).contains("warning"));
    // deterministic under a fixed seed
    let again = ok(&tailcheck(
        &[
            "test",
            "roc",
            "roc.csv",
            "--method",
            "bootstrap",
            "--boots",
            "200",
        ],
        dir.path(),
    ));
    assert_eq!(stdout, again);
}

#[test]
fn config_file_supplies_defaults_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("c.toml"),
        "n_reps = 0\nn_permutations = 99\nn_boot = 100\n",
    )
    .unwrap();
    let out = tailcheck(
        &["--config", "c.toml", "simulate-roc", "--out", "x"],
        dir.path(),
    );
    assert!(!out.status.success());
    assert!(!dir.path().join("x").exists());
    ok(&tailcheck(
        &[
            "--config",
            "c.toml",
            "simulate-roc",
            "--reps",
            "5",
            "--out",
            "x",
        ],
        dir.path(),
    ));
    let v = json(&dir.path().join("x/roc_venkatraman.json"));
    assert_eq!(v["config"]["n_reps"], 5);
    assert_eq!(v["config"]["test"]["n_permutations"], 99);

    fs::write(dir.path().join("bad.toml"), "n_reps = \"many\"\n").unwrap();
    let out = tailcheck(&["--config", "bad.toml", "simulate-roc"], dir.path());
    assert!(!out.status.success());
}

#[test]
fn thread_count_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_tailcheck"))
        .args(["audit-ci", "--n", "5"])
        .env("TAILCHECK_THREADS", "0")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(stderr(&out).contains("threads"));
}

#[test]
fn report_reads_saved_results() {
    let dir = tempfile::tempdir().unwrap();
    let mut a = QUICK_ROC.to_vec();
    a.extend(["--out", "r"]);
    ok(&tailcheck(&a, dir.path()));
    let stdout = ok(&tailcheck(
        &[
            "report",
            "r/roc_venkatraman.json",
            "r/roc_bootstrap_auc.json",
        ],
        dir.path(),
    ));
    assert!(
        stdout.contains("roc_venkatraman") && stdout.contains("gamma"),
        "{stdout}"
    );

    let text = fs::read_to_string(dir.path().join("r/roc_venkatraman.json")).unwrap();
    fs::write(dir.path().join("cut.json"), &text[..text.len() / 2]).unwrap();
    let out = tailcheck(&["report", "cut.json"], dir.path());
    assert!(!out.status.success());
    assert!(stderr(&out).contains("line"), "{}", stderr(&out));
}
