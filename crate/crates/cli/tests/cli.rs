use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bcregions::region::RateRegion;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bcregions"))
}

fn model(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("models").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn region(kind: &str, model_name: &str, extra: &[&str]) -> Output {
    let m = model(model_name);
    let mut args = vec!["region", "--kind", kind, "--model", m.to_str().unwrap(), "--sweep", "6:0.25:4"];
    args.extend_from_slice(extra);
    run(&args)
}

fn ok(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

const KINDS: [(&str, &str); 10] = [
    ("tdcs", "blackwell-tdcs.json"),
    ("uv", "bsc-pair.json"),
    ("superposition", "bsc-pair.json"),
    ("marton-rtd", "bsc-pair.json"),
    ("bec", "bec-two.json"),
    ("bsc3", "three-bsc.json"),
    ("blackwell", "blackwell-states.json"),
    ("finite-field", "finite-field.json"),
    ("gaussian", "gaussian-scalar.json"),
    ("dpc", "gaussian-scalar.json"),
];

#[test]
fn every_region_passes_the_validator_on_reload() {
    for (kind, m) in KINDS {
        let csv = ok(&region(kind, m, &[]));
        let r = RateRegion::read_csv(csv.as_bytes()).unwrap_or_else(|e| panic!("{kind}: {e}"));
        r.validate().unwrap_or_else(|e| panic!("{kind}: {e}"));
        let json = ok(&region(kind, m, &["--format", "json"]));
        RateRegion::from_json(&json).unwrap().validate().unwrap();
    }
}

#[test]
fn common_message_supports_are_three_dimensional() {
    let m = model("blackwell-tdcs.json");
    let csv = ok(&run(&["region", "--kind", "common", "--model", m.to_str().unwrap(), "--sweep", "2:0.5:2"]));
    assert!(csv.starts_with("lambda1,lambda2,lambda0,"));
    let r = RateRegion::read_csv(csv.as_bytes()).unwrap();
    assert!(r.is_three_dimensional());
    r.validate().unwrap();
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    for (kind, m) in [("uv", "bsc-pair.json"), ("marton-rtd", "bsc-pair.json"), ("gaussian", "gaussian-vector.json")] {
        let a = ok(&region(kind, m, &["--seed", "11"]));
        let b = ok(&region(kind, m, &["--seed", "11"]));
        assert_eq!(a, b, "{kind}");
        let serial = bin()
            .env("BCREGIONS_THREADS", "1")
            .args(["region", "--kind", kind, "--model", model(m).to_str().unwrap(), "--sweep", "6:0.25:4", "--seed", "11"])
            .output()
            .unwrap();
        assert_eq!(a, ok(&serial), "{kind} serial");
    }
}

#[test]
fn single_erasure_component_gives_a_triangle() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("bec.json");
    ok(&region("bec", "trivial-single-bec.json", &["--format", "json", "--out", out.to_str().unwrap()]));
    let r = RateRegion::from_json(&std::fs::read_to_string(out).unwrap()).unwrap();
    let v: Vec<(f64, f64)> = r.vertices.iter().map(|p| (p.r1, p.r2)).collect();
    assert_eq!(v.len(), 3);
    for want in [(0.0, 0.0), (0.7, 0.0), (0.0, 0.7)] {
        assert!(v.iter().any(|p| (p.0 - want.0).abs() < 1e-12 && (p.1 - want.1).abs() < 1e-12), "{v:?}");
    }
}

#[test]
fn order_check_reports_both_pairs() {
    let text = ok(&run(&["order", "check", "--model", model("bsc-pair.json").to_str().unwrap()]));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["components"]["degraded"], true);
    assert_eq!(v["lifted"]["degraded"], true);
    let text = ok(&run(&["order", "check", "--model", model("four-bsc.json").to_str().unwrap()]));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!(v["lifted"]["more_capable"].is_boolean());
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.json");
    std::fs::write(&bad, r#"{"p1": 0.5}"#).unwrap();
    let code = |o: Output| o.status.code().unwrap();
    assert_eq!(code(run(&["region", "--kind", "uv", "--model", bad.to_str().unwrap()])), 2);
    assert_eq!(code(region("uv", "bsc-pair.json", &["--resolution", "5"])), 2);
    assert_eq!(code(region("tdcs", "bsc-pair.json", &[])), 2);
    assert_eq!(code(run(&["region", "--kind", "uv", "--model", "/nonexistent/model.json"])), 2);

    let ternary = tmp.path().join("ternary.json");
    std::fs::write(&ternary, r#"{"deterministic": {"f1": [0, 1, 2], "f2": [0, 0, 1]}, "p1": 0.6, "p2": 0.2}"#).unwrap();
    assert_eq!(code(run(&["region", "--kind", "marton-rtd", "--model", ternary.to_str().unwrap()])), 3);
    let wide = tmp.path().join("wide.json");
    std::fs::write(&wide, r#"{"deterministic": {"f1": [0, 1, 2, 3], "f2": [0, 0, 1, 1]}, "p1": 0.6, "p2": 0.2}"#).unwrap();
    assert_eq!(code(run(&["region", "--kind", "uv", "--model", wide.to_str().unwrap()])), 3);

    let threads = bin()
        .env("BCREGIONS_THREADS", "zero")
        .args(["region", "--kind", "bec", "--model", model("bec-two.json").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(code(threads), 2);
}

#[test]
fn repro_writes_manifest_and_finite_field_corners() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("out");
    ok(&run(&["repro", "fig5", "--p1", "0.7", "--p2", "0.4", "--sweep", "6:0.25:4", "--out", dir.to_str().unwrap()]));
    let manifest: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["targets"][0]["target"], "fig5");
    for f in manifest["targets"][0]["files"].as_array().unwrap() {
        assert!(dir.join(f.as_str().unwrap()).exists());
    }
    let vertices = std::fs::read_to_string(dir.join("fig5_vertices.csv")).unwrap();
    let rows: Vec<(f64, f64)> = vertices
        .lines()
        .skip(1)
        .map(|l| {
            let c: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            (c[2], c[3])
        })
        .collect();
    assert_eq!(rows, vec![(0.0, 0.0), (1.0, 0.0), (0.7, 0.6), (0.0, 1.0)]);
    let region = RateRegion::read_csv(std::fs::File::open(dir.join("fig5_tdcs_region.csv")).unwrap()).unwrap();
    region.validate().unwrap();
    assert!((region.support(&[1.0, 1.0]) - 1.3).abs() < 2e-3);
}

#[test]
fn repro_dpc_gap_is_nonnegative() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("gap");
    ok(&run(&["repro", "dpc-gap", "--sweep", "4:1.1:3", "--out", dir.to_str().unwrap()]));
    let table = std::fs::read_to_string(dir.join("dpc_gap.csv")).unwrap();
    assert!(table.starts_with("lambda,gap,"));
    for line in table.lines().skip(1) {
        let gap: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!(gap >= 0.0);
    }
}
