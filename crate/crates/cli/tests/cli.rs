use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn stdens(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stdens"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .arg("--quiet")
        .output()
        .unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn density_on_uniform_mode() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdens(&["density"], &scenario("uniform.toml"), dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let summary = json(&dir.path().join("summary.json"));
    let left = &summary["regions"][0];
    assert_eq!(left["name"], "left");
    assert!((left["probability"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    let g = read(&dir.path().join("g.csv"));
    let mut lines = g.lines();
    assert_eq!(lines.next(), Some("it,ix,t,x,g"));
    assert_eq!(g.lines().count(), 1 + 16 * 16);
    // 17 significant digits.
    let value = lines.next().unwrap().rsplit(',').next().unwrap();
    assert_eq!(value.split('e').next().unwrap().replace(['.', '-'], "").len(), 17);
    assert_eq!(read(&dir.path().join("marginal_x.csv")).lines().next(), Some("ix,x,g1"));
    assert_eq!(read(&dir.path().join("marginal_t.csv")).lines().next(), Some("it,t,g0"));
}

#[test]
fn electron_density_reports_temporal_law() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdens(&["density"], &scenario("electron.toml"), dir.path());
    assert!(out.status.success());
    let summary = json(&dir.path().join("summary.json"));
    assert!(summary["electron_temporal"]["max_relative_deviation"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn boost_check_scalar_and_photon() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdens(&["boost-check"], &scenario("scalar_boost.toml"), dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&dir.path().join("boost.json"));
    assert_eq!(report["beta"].as_f64(), Some(0.5));
    assert!(report["pointwise"]["max_deviation"].as_f64().unwrap() <= 1e-10);
    assert_eq!(report["regions"][0]["rows"].as_array().unwrap().len(), 3);
    let table = read(&dir.path().join("region_invariance.csv"));
    assert_eq!(table.lines().count(), 4);

    let dir = tempfile::tempdir().unwrap();
    let out = stdens(&["boost-check"], &scenario("photon.toml"), dir.path());
    assert!(out.status.success());
    let report = json(&dir.path().join("boost.json"));
    assert_eq!(report["photon_gauge_family"]["calibrated"], Value::Bool(true));
}

#[test]
fn momentum_spectrum_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdens(&["momentum"], &scenario("scalar_boost.toml"), dir.path());
    assert!(out.status.success());
    let csv = read(&dir.path().join("spectrum.csv"));
    assert_eq!(csv.lines().next(), Some("n,freq_sign,p0,p1,C_re,C_im,n_k"));
    let total: f64 = csv.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);
    let report = json(&dir.path().join("momentum.json"));
    assert!(report["charge"].as_f64().unwrap() > 0.0);
    assert!(report["grid_decomposition"]["max_coefficient_deviation"].as_f64().unwrap() < 1e-10);
}

#[test]
fn fock_equivalence_on_interference_state() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdens(&["fock", "--grid", "32x32"], &scenario("interference.toml"), dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = read(&dir.path().join("equivalence.csv"));
    let mut rows = 0;
    for line in table.lines().skip(1) {
        let diff: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(diff <= 1e-12);
        rows += 1;
    }
    assert_eq!(rows, 9);
    let report = json(&dir.path().join("fock.json"));
    let left = &report["regions"][0];
    assert!((left["expected_count"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn sampling_is_reproducible() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        let out = stdens(&["sample"], &scenario("interference.toml"), dir.path());
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for name in ["events.csv", "fit.json"] {
        assert_eq!(std::fs::read(a.path().join(name)).unwrap(), std::fs::read(b.path().join(name)).unwrap());
    }
    assert_eq!(read(&a.path().join("events.csv")).lines().next(), Some("t,x,stream,index"));
    let fit = json(&a.path().join("fit.json"));
    assert_eq!(fit["seed"].as_u64(), Some(7));
    assert!(fit["p"].as_f64().unwrap() >= 1e-3);

    let c = tempfile::tempdir().unwrap();
    assert!(stdens(&["sample", "--seed", "8"], &scenario("interference.toml"), c.path()).status.success());
    assert_eq!(json(&c.path().join("fit.json"))["seed"].as_u64(), Some(8));
    assert_ne!(std::fs::read(a.path().join("events.csv")).unwrap(), std::fs::read(c.path().join("events.csv")).unwrap());
}

#[test]
fn density_outputs_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        assert!(stdens(&["density"], &scenario("interference.toml"), dir.path()).status.success());
    }
    for name in ["g.csv", "marginal_x.csv", "marginal_t.csv", "summary.json"] {
        assert_eq!(std::fs::read(a.path().join(name)).unwrap(), std::fs::read(b.path().join(name)).unwrap());
    }
}

#[test]
fn uncertainty_record() {
    let dir = tempfile::tempdir().unwrap();
    assert!(stdens(&["uncertainty"], &scenario("comb.toml"), dir.path()).status.success());
    let record = read(&dir.path().join("report.txt"));
    let get = |key: &str| -> f64 {
        record
            .lines()
            .find_map(|l| l.strip_prefix(&format!("{key} = ")))
            .unwrap()
            .parse()
            .unwrap()
    };
    assert!((0.5..=0.6).contains(&get("product_space")));
    assert!((0.5..=0.6).contains(&get("product_time")));
    assert!(record.contains("space_violation = false"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    };
    let base = read(&scenario("uniform.toml"));

    let malformed = write("malformed.toml", &base.replace("n_space = 16", "n_space = \"sixteen\""));
    let out = stdens(&["density"], &malformed, &dir.path().join("o"));
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line") && err.contains("n_space"), "{err}");

    let aliased = write("aliased.toml", &base.replace("n = 1", "n = 8"));
    let out = stdens(&["density"], &aliased, &dir.path().join("o"));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("modes[0].n"));

    let out = stdens(&["boost-check"], &scenario("uniform.toml"), &dir.path().join("o"));
    assert_eq!(out.status.code(), Some(2));

    let out = stdens(&["density"], &dir.path().join("missing.toml"), &dir.path().join("o"));
    assert_eq!(out.status.code(), Some(4));

    let empty = write(
        "empty.toml",
        &format!("{base}\n[sampling]\nevents = 10\nseed = 1\nfilter = [0.0001, 0.0001]\n"),
    );
    let out = stdens(&["sample"], &empty, &dir.path().join("o"));
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));

    let blocked = write("blocked", "");
    let out = stdens(&["density"], &scenario("uniform.toml"), &blocked.join("sub"));
    assert_eq!(out.status.code(), Some(4));
}
