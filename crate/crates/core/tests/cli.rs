use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use mosel::numerics::{sample_complex_gaussian, stream_rng, ComplexMatrix};
use num_complex::Complex64;

fn mosel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mosel"))
        .args(args)
        .env_remove("MOSEL_SEED")
        .output()
        .unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn selected(json: &serde_json::Value, criterion: &str) -> u64 {
    json["per_criterion"][criterion]["selected"].as_u64().unwrap()
}

#[test]
fn estimate_agrees_with_simulation_selections() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = mosel(&[
        "simulate", "--scenario", "sim3", "--trials", "3", "--seed", "11", "--dump-data", "2", "--out",
        path(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let mut sel = csv::Reader::from_path(out.join("data/selections.csv")).unwrap();
    let mut checked = 0;
    for rec in sel.records() {
        let rec = rec.unwrap();
        let (file, criterion, k) = (&rec[0], &rec[3], rec[4].parse::<u64>().unwrap());
        let input = out.join("data").join(file);
        let est_path = dir.path().join(format!("{file}.json"));
        let o = mosel(&["estimate", "--input", path(&input), "--out", path(&est_path)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let json: serde_json::Value = serde_json::from_slice(&fs::read(&est_path).unwrap()).unwrap();
        assert_eq!(selected(&json, criterion), k, "{file} {criterion}");
        checked += 1;
    }
    // 6 true orders x 2 dumped trials x 4 criteria
    assert_eq!(checked, 48);
    assert!(out.join("manifest.json").exists());
}

#[test]
fn circular_data_with_null_mdl_selects_zero() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("circ.csv");
    let c = ComplexMatrix::identity(6, 6);
    let p = ComplexMatrix::zeros(6, 6);
    let data = sample_complex_gaussian(&c, &p, 2000, &mut stream_rng(3, 0, 0)).unwrap();
    data.write_csv(fs::File::create(&input).unwrap()).unwrap();

    let o = mosel(&["estimate", "--input", path(&input), "--include-null", "--criteria", "beef,mdl"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let default_out = dir.path().join("circ.csv.estimate.json");
    let json: serde_json::Value = serde_json::from_slice(&fs::read(default_out).unwrap()).unwrap();
    assert_eq!(selected(&json, "mdl"), 0);
    assert!(json["per_criterion"]["beef"]["scores"].get("0").is_some());
    assert!(json["per_criterion"].get("aic").is_none());
}

#[test]
fn identical_rows_fail_as_numerical_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("flat.csv");
    let row = "1.0,2.0,-0.5,0.25\n";
    fs::write(&input, format!("re_0,im_0,re_1,im_1\n{}", row.repeat(50))).unwrap();
    let o = mosel(&["estimate", "--input", path(&input)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("singular"));
}

#[test]
fn malformed_csv_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.csv");
    fs::write(&input, "re_0,im_0\n1.0,2.0\n3.0,oops\n").unwrap();
    let o = mosel(&["estimate", "--input", path(&input)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn missing_input_is_io_error() {
    let o = mosel(&["estimate", "--input", "/nonexistent/data.csv"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn linear_demo_rejects_zero_noise() {
    let o = mosel(&["linear-demo", "--sigma2", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = mosel(&["linear-demo", "--n", "25", "--k", "4", "--seed", "5"]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("eta_hat") && text.contains("grid eta"));
}

#[test]
fn custom_config_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"n_dim": 3, "n_samples": 100, "coeff_low": 0.1, "coeff_high": 0.9, "n_trials": 4,
            "true_orders": [1, 2], "criteria": ["beef"], "master_seed": 2, "trails": 5}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = mosel(&["simulate", "--scenario", "custom", "--config", path(&cfg), "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn custom_config_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"n_dim": 3, "n_samples": 200, "coeff_low": 0.3, "coeff_high": 0.9, "n_trials": 5,
            "true_orders": [1, 2, 3], "criteria": ["beef", "aic"], "master_seed": 2}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = mosel(&[
        "simulate", "--scenario", "custom", "--config", path(&cfg), "--out", path(&out), "--gnuplot",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let curve = fs::read_to_string(out.join("pc_curve.csv")).unwrap();
    assert_eq!(curve.lines().count(), 1 + 2 * 3);
    assert!(out.join("pc_curve.gp").exists());
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["master_seed"], 2);
}

#[test]
fn seed_from_environment_matches_flag() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let o = Command::new(env!("CARGO_BIN_EXE_mosel"))
        .args(["simulate", "--scenario", "sim3", "--trials", "5", "--out", path(&a)])
        .env("MOSEL_SEED", "42")
        .output()
        .unwrap();
    assert!(o.status.success());
    let o = mosel(&["simulate", "--scenario", "sim3", "--trials", "5", "--seed", "42", "--out", path(&b)]);
    assert!(o.status.success());
    assert_eq!(
        fs::read(a.join("pc_curve.csv")).unwrap(),
        fs::read(b.join("pc_curve.csv")).unwrap()
    );
}

#[test]
fn paradox_csv_shape() {
    let dir = tempfile::tempdir().unwrap();
    let (out, g_out) = (dir.path().join("p.csv"), dir.path().join("g.csv"));
    let o = mosel(&["paradox", "--out", path(&out), "--g-out", path(&g_out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let mut rdr = csv::Reader::from_path(&out).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["scale", "eef", "bayes_factor"]);
    let eef: Vec<f64> = rdr.records().map(|r| r.unwrap()[1].parse().unwrap()).collect();
    assert_eq!(eef.len(), 5);
    assert!(eef.windows(2).all(|w| w[1] > w[0]));

    let mut rdr = csv::Reader::from_path(&g_out).unwrap();
    let rows: Vec<(f64, f64)> = rdr
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[1].parse().unwrap(), r[2].parse().unwrap())
        })
        .collect();
    assert!(rows.iter().all(|r| r.0 == rows[0].0));
    assert!(rows.last().unwrap().1 < 1e-6);
}

#[test]
fn paradox_rejects_bad_g() {
    assert_eq!(mosel(&["paradox", "--g", "-1"]).status.code(), Some(2));
}

#[test]
fn unknown_criterion_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("x.csv");
    let data = sample_complex_gaussian(
        &ComplexMatrix::identity(2, 2),
        &ComplexMatrix::from_element(2, 2, Complex64::new(0.0, 0.0)),
        50,
        &mut stream_rng(1, 0, 0),
    )
    .unwrap();
    data.write_csv(fs::File::create(&input).unwrap()).unwrap();
    assert_eq!(mosel(&["estimate", "--input", path(&input), "--criteria", "bic"]).status.code(), Some(2));
}
