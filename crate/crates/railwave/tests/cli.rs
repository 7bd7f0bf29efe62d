use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn railwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_railwave")).args(args).output().expect("spawn railwave")
}

fn railwave_env(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_railwave"))
        .args(args)
        .env("RAILWAVE_THREADS", threads)
        .output()
        .expect("spawn railwave")
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn movable_sweep_has_constant_se() {
    let o = railwave(&["sweep", "--arch", "pass-movable", "--length", "100", "--power-dbm", "10", "--samples", "50"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = data_rows(&stdout(&o));
    assert_eq!(rows.len(), 50);
    assert!(rows.iter().all(|r| r[2] == rows[0][2]));
    let se: f64 = rows[0][2].parse().unwrap();
    assert!((se - 18.0736).abs() < 1e-3);
}

#[test]
fn output_embeds_effective_config() {
    let o = railwave(&["sweep", "--arch", "pass-fix", "--n", "3", "--length", "60", "--samples", "10", "--power-dbm", "17"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let config = text.lines().find_map(|l| l.strip_prefix("# config ")).expect("config line");
    let v: serde_json::Value = serde_json::from_str(config).unwrap();
    assert_eq!(v["radio"]["power_dbm"], 17.0);
    assert_eq!(v["corridor"]["length_m"], 60.0);
    assert_eq!(v["corridor"]["samples"], 10);
    assert!(text.contains("# architecture pass-fix(3)"));
    assert_eq!(text.lines().find(|l| !l.starts_with('#')), Some("x_m,snr_db,se_bpshz"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "[radio]\npower_dbm = 0.0\n[corridor]\nlength_m = 40.0\nsamples = 8\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let from_file = railwave(&["--config", cfg, "sweep", "--arch", "pass-movable"]);
    let overridden = railwave(&["--config", cfg, "sweep", "--arch", "pass-movable", "--power-dbm", "10"]);
    let a = data_rows(&stdout(&from_file));
    let b = data_rows(&stdout(&overridden));
    assert_eq!(a.len(), 8);
    assert_eq!(a[0][0], "2.50000");
    let gap: f64 = b[0][1].parse::<f64>().unwrap() - a[0][1].parse::<f64>().unwrap();
    assert!((gap - 10.0).abs() < 1e-3);
}

#[test]
fn exit_codes() {
    assert_eq!(railwave(&["--help"]).status.code(), Some(0));
    assert_eq!(railwave(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(railwave(&["sweep", "--arch", "pass-movable", "--bogus"]).status.code(), Some(1));
    assert_eq!(railwave(&["sweep", "--arch", "waveguide"]).status.code(), Some(1));
    assert_eq!(railwave(&["sweep", "--arch", "lcx-double", "--n", "4"]).status.code(), Some(1));
    assert_eq!(railwave(&["sweep", "--arch", "pass-fix:2", "--n", "4"]).status.code(), Some(1));
    assert_eq!(railwave(&["sweep", "--arch", "pass-active", "--n", "500", "--length", "50"]).status.code(), Some(1));
    assert_eq!(railwave(&["gen-dataset", "--split", "dev", "--out-dir", "x"]).status.code(), Some(1));
    let o = railwave(&["ls-eval", "--dataset", "/nonexistent/dir/test.rwce"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn bad_config_file_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[radio]\npowr_dbm = 3\n").unwrap();
    let o = railwave(&["--config", cfg.to_str().unwrap(), "sweep", "--arch", "pass-movable"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("powr_dbm"));
}

#[test]
fn sweep_is_byte_identical_across_runs_and_thread_counts() {
    let args = ["sweep", "--arch", "lcx-double", "--length", "50", "--samples", "400"];
    let a = railwave_env(&args, "1");
    let b = railwave_env(&args, "4");
    let c = railwave_env(&args, "1");
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

fn gen(dir: &Path, threads: &str, extra: &[&str]) -> Output {
    let mut args = vec!["gen-dataset", "--split", "test", "--count", "300", "--seed", "11", "--out-dir"];
    args.push(dir.to_str().unwrap());
    args.extend_from_slice(extra);
    railwave_env(&args, threads)
}

#[test]
fn dataset_generation_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(gen(a.path(), "1", &[]).status.success());
    assert!(gen(b.path(), "3", &[]).status.success());
    for f in ["manifest.json", "test.rwce"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let c = tempfile::tempdir().unwrap();
    let o = railwave(&["gen-dataset", "--split", "test", "--count", "300", "--seed", "12", "--out-dir", c.path().to_str().unwrap()]);
    assert!(o.status.success());
    assert_ne!(fs::read(a.path().join("test.rwce")).unwrap(), fs::read(c.path().join("test.rwce")).unwrap());
}

#[test]
fn manifest_merges_only_matching_runs() {
    let d = tempfile::tempdir().unwrap();
    let dir = d.path().to_str().unwrap();
    let ok = railwave(&["gen-dataset", "--split", "val", "--count", "20", "--seed", "5", "--out-dir", dir]);
    assert!(ok.status.success());
    let ok = railwave(&["gen-dataset", "--split", "test", "--count", "30", "--seed", "5", "--out-dir", dir]);
    assert!(ok.status.success());
    let m: serde_json::Value = serde_json::from_slice(&fs::read(d.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["splits"]["validation"]["count"], 20);
    assert_eq!(m["splits"]["test"]["count"], 30);
    assert_eq!(m["master_seed"], 5);

    let clash = railwave(&["gen-dataset", "--split", "train", "--count", "10", "--seed", "6", "--out-dir", dir]);
    assert_eq!(clash.status.code(), Some(2));
    let clash = railwave(&["gen-dataset", "--split", "train", "--count", "10", "--seed", "5", "--t", "4", "--out-dir", dir]);
    assert_eq!(clash.status.code(), Some(2));
    assert!(!d.path().join("train.rwce").exists());
}

#[test]
fn score_and_ls_eval_pipeline() {
    let d = tempfile::tempdir().unwrap();
    assert!(gen(d.path(), "2", &[]).status.success());
    let pred = d.path().join("zero.rwpr");
    railwave::dataset::write_zero_predictions(&pred, 300, 16).unwrap();
    let ds = d.path().to_str().unwrap();
    let o = railwave(&["score", "--dataset", ds, "--pred", pred.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(
        text.lines().find(|l| !l.starts_with('#')),
        Some("t,snr_bucket_db,nmse_db,baseline_ls_nmse_db")
    );
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 21);
    assert!(rows.iter().all(|r| r[0] == "16" && r[2] == "0.00000"));

    let ls = stdout(&railwave(&["ls-eval", "--dataset", ds]));
    let ls_rows = data_rows(&ls);
    for (a, b) in rows.iter().zip(&ls_rows) {
        assert_eq!(a[3], b[2], "baseline column must equal ls-eval");
    }
    let short = data_rows(&stdout(&railwave(&["ls-eval", "--dataset", ds, "--t", "4"])));
    assert!(short.iter().all(|r| r[0] == "4"));

    railwave::dataset::write_zero_predictions(&pred, 299, 16).unwrap();
    let o = railwave(&["score", "--dataset", ds, "--pred", pred.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn fig3_small_grid() {
    let o = railwave(&["fig3", "--length", "60", "--samples", "500", "--snr-min", "0", "--snr-max", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = data_rows(&stdout(&o));
    assert_eq!(rows.len(), 15);
    let names: Vec<&str> = rows.iter().step_by(3).map(|r| r[0].as_str()).collect();
    assert_eq!(names, ["lcx-single", "lcx-double", "lcx-segmented-4", "pass-fix-40", "pass-active-40"]);
    for curve in rows.chunks(3) {
        let p: Vec<f64> = curve.iter().map(|r| r[2].parse().unwrap()).collect();
        assert!((p[1] - p[0] - 1.0).abs() < 1e-4 && (p[2] - p[1] - 1.0).abs() < 1e-4);
    }
}

#[test]
fn fig2_small_matrix_with_report() {
    let d = tempfile::tempdir().unwrap();
    let out = d.path().join("fig2.csv");
    let report = d.path().join("deltas.csv");
    let o = railwave(&[
        "fig2", "--lengths", "50,100", "--counts", "1,2", "--samples", "200",
        "--out", out.to_str().unwrap(), "--report", report.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = data_rows(&fs::read_to_string(&out).unwrap());
    assert_eq!(rows.len(), 2 * 2 * 6);
    let rep = data_rows(&fs::read_to_string(&report).unwrap());
    assert_eq!(rep.len(), 4);
    assert_ne!(rep[0][10], "not-evaluated");
    assert!(rep[1..].iter().all(|r| r[10] == "not-evaluated"));
}
