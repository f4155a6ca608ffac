//! End-to-end runs of the `hyperdefect` binary.

use std::process::{Command, Output};

use hyperdefect::harmonics::{gaunt_table, GauntTable};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperdefect"))
        .args(args)
        .env_remove("DEFECT_OUTPUT_DIR")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_lines(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn variance_csv() {
    let o = run(&[
        "variance",
        "--d",
        "2",
        "--l-range",
        "10:30:10",
        "--no-timestamp",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let header = text.lines().next().unwrap();
    let cfg: serde_json::Value =
        serde_json::from_str(header.strip_prefix("# config: ").unwrap()).unwrap();
    assert_eq!(cfg["command"], "variance");
    assert_eq!(cfg["l_range"], "10:30:10");
    let rows = data_lines(&text);
    assert_eq!(
        rows[0],
        ["l", "variance", "scaled_variance", "tail_bound", "q_used"]
    );
    assert_eq!(rows.len(), 4);
    for r in &rows[1..] {
        let l: f64 = r[0].parse().unwrap();
        let v: f64 = r[1].parse().unwrap();
        let scaled: f64 = r[2].parse().unwrap();
        assert!((scaled - l * l * v).abs() < 1e-12 * scaled);
        assert!(r[1].split('e').next().unwrap().replace('.', "").len() == 17);
    }
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    assert_eq!(
        run(&["variance", "--l-range", "5:1"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["constant", "--d", "9"]).status.code(), Some(2));
    let o = run(&["variance", "--d", "2", "--l", "10", "--tol", "1e-8"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unreachable"));
    let o = run(&["lemcg", "--d", "2", "--l", "4", "--no-timestamp"]);
    assert_eq!(o.status.code(), Some(0));
    let row = &data_lines(&stdout(&o))[1];
    assert_eq!(row.last().unwrap(), "true");
}

#[test]
fn constant_both_methods() {
    let o = run(&["constant", "--d", "2", "--method", "both", "--no-timestamp"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let r = &doc["result"];
    let bound = r["lower_bound"].as_f64().unwrap();
    assert!((bound - 32.0 / 27f64.sqrt()).abs() < 1e-12);
    let s = r["series"]["value"].as_f64().unwrap();
    let i = r["integral"]["value"].as_f64().unwrap();
    assert!(s > bound && i > bound);
    assert!(r["relative_disagreement"].as_f64().unwrap() < 1e-3);
    assert_eq!(r["consistent"], true);
}

#[test]
fn gaunt_text_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    let o = run(&[
        "gaunt",
        "--d",
        "3",
        "--l",
        "2",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# config: "));
    let back = GauntTable::read_text(text.as_bytes()).unwrap();
    let direct = gaunt_table(3, 2).unwrap();
    for (a, b, c, v) in direct.nonzero() {
        assert_eq!(back.get(a, b, c), v);
    }
}

#[test]
fn config_file_reproduces_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"command":"mc-clt","d":2,"l_range":"4:7","n":50,"seed":9,"format":"csv"}"#,
    )
    .unwrap();
    let a = run(&[
        "mc-clt",
        "--config",
        cfg.to_str().unwrap(),
        "--no-timestamp",
    ]);
    let b = run(&[
        "mc-clt",
        "--config",
        cfg.to_str().unwrap(),
        "--no-timestamp",
        "--workers",
        "1",
    ]);
    assert_eq!(a.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&a.stderr).contains("skipping odd"));
    // only the worker count in the embedded config differs
    let strip = |o: &Output| stdout(o).lines().skip(1).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(&a), strip(&b));
    let c = run(&[
        "mc-clt",
        "--config",
        cfg.to_str().unwrap(),
        "--no-timestamp",
    ]);
    assert_eq!(a.stdout, c.stdout);
    let rows = data_lines(&stdout(&a));
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[1][0], "4");
    assert_eq!(rows[2][0], "6");
    let stamped = run(&["mc-clt", "--config", cfg.to_str().unwrap()]);
    assert!(stdout(&stamped)
        .lines()
        .next()
        .unwrap()
        .contains("\"timestamp\""));
    let wrong = run(&["variance", "--config", cfg.to_str().unwrap()]);
    assert_eq!(wrong.status.code(), Some(2));
}

#[test]
fn output_directory_and_defects() {
    let dir = tempfile::tempdir().unwrap();
    let defects = dir.path().join("raw.csv");
    let o = Command::new(env!("CARGO_BIN_EXE_hyperdefect"))
        .args([
            "mc-clt",
            "--l",
            "6",
            "--n",
            "40",
            "--format",
            "json",
            "--no-timestamp",
        ])
        .args(["--defects", defects.to_str().unwrap()])
        .env("DEFECT_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("mc-clt.json")).unwrap())
            .unwrap();
    assert_eq!(doc["rows"][0]["n"], 40);
    assert!(doc["summary"][0]["w1"].as_f64().unwrap() >= 0.0);
    let raw = std::fs::read_to_string(&defects).unwrap();
    assert!(raw.starts_with("realization,defect,normalized_defect\n"));
    assert_eq!(raw.lines().count(), 41);
}

#[test]
fn facile_and_ccoef() {
    let o = run(&["facile", "--q-range", "1:6", "--no-timestamp"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = data_lines(&stdout(&o));
    assert_eq!(rows.len(), 1 + 21);
    assert_eq!(&rows[1][2..4], ["56", "324"]);
    let o = run(&["ccoef", "--d", "2", "--q-range", "1:2", "--no-timestamp"]);
    let rows = data_lines(&stdout(&o));
    assert_eq!(rows[0], ["d", "q", "method", "value", "error_estimate"]);
    let closed: f64 = rows[2][3].parse().unwrap();
    assert!((closed - 2.0 / (std::f64::consts::PI * 3f64.sqrt())).abs() < 1e-15);
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("selftest.json");
    let o = run(&[
        "selftest",
        "--output",
        path.to_str().unwrap(),
        "--no-timestamp",
    ]);
    let log = String::from_utf8_lossy(&o.stderr);
    assert_eq!(log.matches("[PASS]").count(), 10, "{log}");
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(doc["result"].as_array().unwrap().len(), 10);
}
