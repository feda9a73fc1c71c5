use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn fracdisp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracdisp"))
        .args(args)
        .env_remove("FRACDISP_THREADS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn csv(dir: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(dir.join("results.csv"))
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn out_dir(tmp: &TempDir, name: &str) -> String {
    tmp.path().join(name).to_string_lossy().into_owned()
}

#[test]
fn list_shows_every_scenario() {
    let out = fracdisp(&["list"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.lines().count() - 1 >= 8, "{text}");
    assert!(text.lines().any(|l| l.starts_with("verify-dispersive") && l.contains("dispersive estimate")));
}

#[test]
fn list_filters_by_module() {
    let all = stdout(&fracdisp(&["list"])).lines().count();
    let out = fracdisp(&["list", "verify"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert!(!rows.is_empty() && rows.len() + 1 < all);
    assert!(rows.iter().all(|l| l.starts_with("verify-")));
}

#[test]
fn list_with_unknown_filter_is_empty() {
    let out = fracdisp(&["list", "no-such-module"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).lines().count(), 1);
}

#[test]
fn verify_dispersive_example() {
    let tmp = TempDir::new().unwrap();
    let dir = out_dir(&tmp, "run");
    let out = fracdisp(&["verify", "dispersive", "--alpha", "0.5", "--beta", "1.5", "--d", "1", "--p", "inf", "--out", &dir]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let m = manifest(Path::new(&dir));
    assert_eq!(m["scenario"], "verify-dispersive");
    assert_eq!(m["config"]["options"]["lebesgue"], "inf");
    assert_eq!(m["derived"]["delta"], "3");
    let slope = m["summary"]["fit"]["slope"].as_f64().unwrap();
    assert!((slope + 1.0 / 3.0).abs() <= 0.07 / 3.0, "{slope}");
    let rows = csv(Path::new(&dir));
    assert_eq!(rows[0], ["t", "operator_norm"]);
    assert_eq!(rows.len(), 8);
    for row in &rows[1..] {
        assert!(row.iter().all(|c| c.parse::<f64>().is_ok()), "{row:?}");
    }
}

#[test]
fn failing_check_exits_one_and_still_writes() {
    let tmp = TempDir::new().unwrap();
    let dir = out_dir(&tmp, "run");
    let out = fracdisp(&["verify", "dispersive", "--tolerance", "1e-9", "--out", &dir]);
    assert_eq!(code(&out), 1);
    assert_eq!(manifest(Path::new(&dir))["pass"], false);
}

#[test]
fn malformed_config_exits_two_without_outputs() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path().join("never");
    for body in [
        format!(r#"{{"kind":"solve","output":{:?},"bogus":1}}"#, dir),
        format!(r#"{{"kind":"solve","output":{:?},"grid":{{"n":100,"half_width":10}}}}"#, dir),
        format!(r#"{{"kind":"solve","output":{:?},"params":{{"alpha":1.5}}}}"#, dir),
        "{ not json".to_string(),
    ] {
        let cfg = tmp.path().join("cfg.json");
        fs::write(&cfg, &body).unwrap();
        let out = fracdisp(&["solve", "--config", cfg.to_str().unwrap()]);
        assert_eq!(code(&out), 2, "{body}");
        assert!(!dir.exists(), "{body}");
    }
}

#[test]
fn config_for_another_scenario_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("cfg.json");
    fs::write(&cfg, r#"{"kind":"verify-picard"}"#).unwrap();
    assert_eq!(code(&fracdisp(&["solve", "--config", cfg.to_str().unwrap()])), 2);
}

#[test]
fn bad_thread_count_is_an_error() {
    let tmp = TempDir::new().unwrap();
    let dir = out_dir(&tmp, "run");
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_fracdisp"))
            .args(["mlf", "--out", &dir])
            .env("FRACDISP_THREADS", threads)
            .output()
            .unwrap()
    };
    assert_eq!(code(&run("zero")), 2);
    assert!(!Path::new(&dir).exists());
    assert_eq!(code(&run("1")), 0);
}

#[test]
fn solve_with_small_data_contracts() {
    let tmp = TempDir::new().unwrap();
    let dir = out_dir(&tmp, "run");
    let out = fracdisp(&["solve", "--norm", "x-kappa", "--amplitude", "0.1", "--picard-tol", "1e-14", "--out", &dir]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let m = manifest(Path::new(&dir));
    assert_eq!(m["derived"]["p0"], "7");
    assert_eq!(m["derived"]["kappa"], "9/70");
    assert_eq!(m["config"]["params"]["p"], 7.0);
    let ratios: Vec<f64> = m["summary"]["diagnostics"]["ratios"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert!(!ratios.is_empty() && ratios.iter().all(|&r| r <= 0.5), "{ratios:?}");
    assert_eq!(m["summary"]["diagnostics"]["converged"], true);
    assert_eq!(csv(Path::new(&dir))[0], ["t", "l2", "linf", "lq"]);
}

#[test]
fn manifest_reproduces_results_bit_for_bit() {
    let tmp = TempDir::new().unwrap();
    let a = out_dir(&tmp, "a");
    let b = out_dir(&tmp, "b");
    assert_eq!(code(&fracdisp(&["solve", "--amplitude", "0.3", "--n-steps", "32", "--out", &a])), 0);
    let m = Path::new(&a).join("manifest.json");
    assert_eq!(code(&fracdisp(&["solve", "--config", m.to_str().unwrap(), "--out", &b])), 0);
    assert_eq!(
        fs::read(Path::new(&a).join("results.csv")).unwrap(),
        fs::read(Path::new(&b).join("results.csv")).unwrap()
    );
    let (mut ma, mut mb) = (manifest(Path::new(&a)), manifest(Path::new(&b)));
    ma["config"]["output"] = Value::Null;
    mb["config"]["output"] = Value::Null;
    assert_eq!(ma, mb);
}

#[test]
fn snapshots_feed_back_as_a_datum() {
    let tmp = TempDir::new().unwrap();
    let a = out_dir(&tmp, "a");
    let out = fracdisp(&["propagate", "--operator", "schrodinger", "--times", "0.5", "--snapshots", "--out", &a]);
    assert_eq!(code(&out), 0);
    let snap = Path::new(&a).join("snapshot_000.bin");
    assert_eq!(manifest(Path::new(&a))["snapshots"][0], "snapshot_000.bin");
    let l2: f64 = csv(Path::new(&a))[1][1].parse().unwrap();

    let b = out_dir(&tmp, "b");
    let out = fracdisp(&["norms", "--datum-file", snap.to_str().unwrap(), "--out", &b]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv(Path::new(&b));
    let l2_back: f64 = rows.iter().find(|r| r[0] == "l2").unwrap()[1].parse().unwrap();
    assert!((l2 - l2_back).abs() <= 1e-12 * l2);

    // A snapshot on a different grid is a configuration error.
    let c = out_dir(&tmp, "c");
    let out = fracdisp(&["norms", "--datum-file", snap.to_str().unwrap(), "--n", "128", "--out", &c]);
    assert_eq!(code(&out), 2);
    assert!(!Path::new(&c).exists());
}

#[test]
fn beta_lt2_constants_are_exact() {
    let tmp = TempDir::new().unwrap();
    let dir = out_dir(&tmp, "run");
    let out = fracdisp(&["verify", "beta-lt2", "--out", &dir]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let m = manifest(Path::new(&dir));
    let d = &m["derived"];
    assert_eq!((&d["delta"], &d["varsigma"], &d["gamma"]), (&"25/18".into(), &"1/4".into(), &"7/36".into()));
    assert_eq!((&d["nu_smooth"], &d["sigma"]), (&"1/18".into(), &"7/15".into()));
    assert_eq!(csv(Path::new(&dir)).len(), 6);
}

#[test]
fn mlf_routes_agree() {
    let tmp = TempDir::new().unwrap();
    let dir = out_dir(&tmp, "run");
    let out = fracdisp(&["mlf", "--alpha", "0.7", "--b", "1", "--z-re", "-2", "--z-im", "1", "--out", &dir]);
    assert_eq!(code(&out), 0);
    let m = manifest(Path::new(&dir));
    let diffs = m["summary"]["relative_difference_from_routed"].as_object().unwrap();
    for route in ["series", "integral"] {
        assert!(diffs[route].as_f64().unwrap() <= 1e-9, "{route}: {diffs:?}");
    }
}
