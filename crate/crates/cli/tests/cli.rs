use std::path::Path;
use std::process::{Command, Output};

use critnls_core::{Dimension, GroundStateProfile};
use serde_json::Value;

fn critnls(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_critnls"))
        .args(args)
        .current_dir(cwd)
        .env("CRITNLS_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn write_config(dir: &Path, name: &str, family: &str, a: f64, t_end: f64) -> String {
    let text = format!(
        r#"{{"dim":3,"grid":{{"rMax":20,"nPoints":1024}},
            "stepping":{{"dtInit":0.01,"dtMin":1e-9,"tEnd":{t_end},"recordEvery":5}},
            "initialData":{{"family":"{family}","params":{{"a":{a}}}}}}}"#
    );
    std::fs::write(dir.join(name), text).unwrap();
    name.to_string()
}

#[test]
fn ground_state_prints_profile_constants() {
    let dir = tempfile::tempdir().unwrap();
    for n in [3u32, 4, 5] {
        let out = critnls(&["--dim", &n.to_string(), "ground-state"], dir.path());
        assert_eq!(out.status.code(), Some(0));
        let v = json(&out);
        let p = GroundStateProfile::cached(Dimension::new(n).unwrap());
        assert_eq!(v["dim"], n);
        assert_eq!(v["gradNormSq"].as_f64().unwrap(), p.grad_norm_sq);
        assert_eq!(v["energy"].as_f64().unwrap(), p.energy);
        for key in ["sobolevConst", "potentialNormSq", "quadErrorBound"] {
            assert!(v[key].is_f64(), "{key}");
        }
    }
}

#[test]
fn bad_dimension_and_missing_dimension_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        critnls(&["--dim", "6", "ground-state"], dir.path()).status.code(),
        Some(2)
    );
    assert_eq!(critnls(&["ground-state"], dir.path()).status.code(), Some(2));
    assert_eq!(
        critnls(&["--dim", "3", "ground-state", "--quad-tol", "-1"], dir.path())
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn classify_reports_region_and_margins() {
    let dir = tempfile::tempdir().unwrap();
    let y = GroundStateProfile::cached(Dimension::THREE).grad_norm_sq;
    let out = critnls(
        &["--dim", "3", "classify", "--energy", "2", "--gradsq", "3"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["region"], "ScatteringRegion");
    assert_eq!(v["yC"].as_f64().unwrap(), y);
    assert_eq!(v["margins"]["gradSq"].as_f64().unwrap(), y - 3.0);

    let certified = critnls(
        &[
            "--dim",
            "3",
            "classify",
            "--energy",
            "-1",
            "--gradsq",
            "30",
            "--side-condition",
            "finite-variance",
        ],
        dir.path(),
    );
    assert_eq!(json(&certified)["region"], "BlowupRegionCertified");
    let expected = critnls(
        &["--dim", "3", "classify", "--energy", "-1", "--gradsq", "30"],
        dir.path(),
    );
    assert_eq!(json(&expected)["region"], "BlowupRegionExpected");
    let above = critnls(
        &["--dim", "3", "classify", "--energy", "5", "--gradsq", "30"],
        dir.path(),
    );
    assert_eq!(json(&above)["region"], "AboveThreshold");
}

#[test]
fn classify_rejects_infeasible_pair() {
    let dir = tempfile::tempdir().unwrap();
    let out = critnls(
        &["--dim", "3", "classify", "--energy", "-1", "--gradsq", "3"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not realized"));
}

#[test]
fn evolve_writes_identical_outputs_on_rerun() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.json", "scaledGroundState", 0.5, 0.5);
    let mut bytes = Vec::new();
    for out_dir in ["first", "second"] {
        let out = critnls(&["evolve", "--config", &cfg, "--out-dir", out_dir], dir.path());
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let v = json(&out);
        assert_eq!(v["termination"], "ReachedTEnd");
        assert_eq!(v["tStop"].as_f64().unwrap(), 0.5);
        assert!(v["drifts"]["massRel"].as_f64().unwrap() < 1e-12);
        let base = dir.path().join(out_dir);
        let summary: Value =
            serde_json::from_str(&std::fs::read_to_string(base.join("summary.json")).unwrap()).unwrap();
        assert_eq!(summary, v);
        bytes.push(std::fs::read(base.join("trajectory.csv")).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
    let header = String::from_utf8_lossy(&bytes[0]).lines().next().unwrap().to_string();
    assert!(header.starts_with("t,mass,energy,gradSq,potSq,sNormAccum"));
    assert!(header.contains("zRsecond@8") && header.contains("localGrad@2"));
}

#[test]
fn evolve_rejects_unknown_config_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.json", "gaussian", 0.5, 0.1);
    let text = std::fs::read_to_string(dir.path().join(&cfg)).unwrap();
    std::fs::write(dir.path().join("bad.json"), text.replacen('{', r#"{"extra":1,"#, 1)).unwrap();
    let out = critnls(&["evolve", "--config", "bad.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("extra"));
    assert_eq!(
        critnls(&["evolve", "--config", "missing.json"], dir.path())
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn virial_check_reads_back_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.json", "gaussian", 1.0, 0.5);
    assert_eq!(
        critnls(&["evolve", "--config", &cfg], dir.path()).status.code(),
        Some(0)
    );
    let out = critnls(
        &["virial-check", "--trajectory", "trajectory.csv", "--R", "8"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["radius"].as_f64().unwrap(), 8.0);
    assert_eq!(v["records"], 11);
    let max_abs = v["firstIdentity"]["maxAbs"].as_f64().unwrap();
    assert!(
        max_abs < 1e-2 * v["firstRhsScale"].as_f64().unwrap().max(1.0),
        "{max_abs}"
    );
    let wrong = critnls(
        &["virial-check", "--trajectory", "trajectory.csv", "--R", "4"],
        dir.path(),
    );
    assert_eq!(wrong.status.code(), Some(2));
}

#[test]
fn sweep_exit_code_follows_consistency() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sweep.json", "gaussian", 0.5, 1.0);
    let out = critnls(
        &["dichotomy-sweep", "--config", &cfg, "--amplitudes", "0,0.5,3"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["rows"], 3);
    assert_eq!(v["consistent"], 3);
    let csv = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(dir.path().join("report.json").exists());

    // A scaled W below threshold has not dispersed by t = 1, so the
    // scattering prediction is not yet confirmed.
    let short = write_config(dir.path(), "short.json", "scaledGroundState", 0.5, 1.0);
    let out = critnls(
        &["dichotomy-sweep", "--config", &short, "--amplitudes", "0.5"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["inconsistent"], 1);
}

#[test]
fn sweep_requires_amplitudes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sweep.json", "gaussian", 0.5, 1.0);
    assert_eq!(
        critnls(&["dichotomy-sweep", "--config", &cfg], dir.path())
            .status
            .code(),
        Some(2)
    );
    let out = critnls(
        &["dichotomy-sweep", "--config", &cfg, "--amplitudes", "nan"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}
