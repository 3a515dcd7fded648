use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn paraprod(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paraprod"))
        .args(args)
        .current_dir(cwd)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn gram_unit_symbols() {
    let dir = tempfile::tempdir().unwrap();
    let o = paraprod(&["gram", "--depth", "2", "--b", "const:1", "--d", "const:1", "--out", "g"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 3);
    for line in text.lines() {
        let v: f64 = line.rsplit(' ').nth(1).unwrap().parse().unwrap();
        assert!(v <= 1e-10, "{line}");
    }
    for name in ["composition_gram_closed", "composition_gram_direct", "t_gram_closed", "t_gram_direct"] {
        let csv = fs::read_to_string(dir.path().join(format!("g/{name}.csv"))).unwrap();
        assert_eq!(csv.lines().count(), 8, "{name}");
    }
}

#[test]
fn gram_depth_one_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = paraprod(&["gram", "--depth", "1", "--out", "g"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("g/t_gram_direct.csv")).unwrap();
    for line in csv.lines().skip(1) {
        for cell in line.split(',').skip(1) {
            assert_eq!(cell, "0.0000000000000000e0+0.0000000000000000e0i");
        }
    }
}

#[test]
fn malformed_symbol_file_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.json"), "{\"depth\": 2, \"entries\": [").unwrap();
    let o = paraprod(&["gram", "--b", "file:bad.json", "--d", "const:1"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("malformed"));
}

#[test]
fn conditions_worked_instance() {
    let dir = tempfile::tempdir().unwrap();
    let o = paraprod(&["conditions", "--depth", "2", "--b", "const:1", "--d", "const:1", "--out", "c"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v = json(&dir.path().join("c/conditions.json"));
    assert_eq!(v["A"], 0.0);
    assert_eq!(v["C"], 0.0);
    assert!((v["B"].as_f64().unwrap() - std::f64::consts::SQRT_2).abs() < 1e-5);
    assert!((v["op_norm"].as_f64().unwrap() - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-5);
    assert_eq!(v["depth"], 2);
    assert_eq!(stdout(&o), fs::read_to_string(dir.path().join("c/conditions.json")).unwrap());
}

#[test]
fn conditions_zero_symbol() {
    let dir = tempfile::tempdir().unwrap();
    let o = paraprod(&["conditions", "--depth", "4", "--b", "zero", "--out", "c"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v = json(&dir.path().join("c/conditions.json"));
    for k in ["A", "B", "C", "op_norm", "bmo_b"] {
        assert_eq!(v[k], 0.0, "{k}");
    }
    assert!(v["ratio"].is_null());
}

#[test]
fn conditions_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out| ["conditions", "--depth", "4", "--b", "random:seed=7", "--out", out];
    paraprod(&args("one"), dir.path());
    paraprod(&args("two"), dir.path());
    let a = fs::read(dir.path().join("one/conditions.json")).unwrap();
    let b = fs::read(dir.path().join("two/conditions.json")).unwrap();
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["seed"], 7);
    assert!(v["b_source"].as_str().unwrap().starts_with("random:seed=7"));
}

#[test]
fn conditions_from_files_infer_depth() {
    let dir = tempfile::tempdir().unwrap();
    let s = paraprod::generate(paraprod::SymbolKind::random(3), 3);
    s.save(dir.path().join("b.json")).unwrap();
    let o = paraprod(&["conditions", "--b", "file:b.json", "--d", "log", "--out", "c"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&dir.path().join("c/conditions.json"))["b_hash"], s.content_hash());
    let o = paraprod(&["conditions", "--depth", "4", "--b", "file:b.json"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let o = paraprod(&["conditions", "--b", "log"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_empty_campaign() {
    let dir = tempfile::tempdir().unwrap();
    let o = paraprod(&["verify", "--trials", "0", "--out", "v"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("no data"));
    let v = json(&dir.path().join("v/summary.json"));
    assert_eq!(v["no_data"], true);
    assert_eq!(v["pass"], true);
}

#[test]
fn verify_config_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("cfg.json"), r#"{"depths":[2,3],"trials":9,"gamma":0.5}"#).unwrap();
    let o = paraprod(&["verify", "--config", "cfg.json", "--trials", "2", "--out", "v"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v = json(&dir.path().join("v/summary.json"));
    assert_eq!(v["trials_run"], 4);
    assert_eq!(v["config"]["gamma"], 0.5);
    let csv = fs::read_to_string(dir.path().join("v/campaign.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.lines().nth(1).unwrap().starts_with("2,0,0,"));
}

#[test]
fn verify_corrupted_closed_form_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = paraprod(&["verify", "--depths", "2-3", "--trials", "2", "--corrupt-closed", "--out", "v"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("gram_equivalence: FAIL"));
    let v = json(&dir.path().join("v/summary.json"));
    assert_eq!(v["pass"], false);
}

#[test]
fn verify_rejects_trivial_depths() {
    let dir = tempfile::tempdir().unwrap();
    let o = paraprod(&["verify", "--depths", "1-3", "--trials", "1"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn sweep_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = paraprod(&["sweep", "--depths", "2-6", "--out", "s"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("s/sweep.csv")).unwrap();
    let norms: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(5).unwrap().parse().unwrap())
        .collect();
    assert_eq!(norms.len(), 5);
    assert!(norms.windows(2).all(|w| w[1] > w[0]));
    let o = paraprod(&["sweep", "--depths", "4", "--out", "s1"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read_to_string(dir.path().join("s1/sweep.csv")).unwrap().lines().count(), 2);
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(paraprod(&["frobnicate"], dir.path()).status.code(), Some(1));
    assert_eq!(paraprod(&["gram", "--depth", "x"], dir.path()).status.code(), Some(1));
    assert_eq!(paraprod(&["gram", "--depth", "2", "--b", "const:"], dir.path()).status.code(), Some(1));
    assert_eq!(paraprod(&["--help"], dir.path()).status.code(), Some(0));
}
