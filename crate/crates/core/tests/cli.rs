use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cube-shuffle"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn plan(dir: &Path, scenario: &str, extra: &[&str]) -> PathBuf {
    let out = dir.join(scenario.replace(".json", ".plan.json"));
    let src = fixture(scenario);
    let mut args = vec!["plan", src.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn validate_exit_codes() {
    let o = run(&["validate", fixture("standard.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["schema_version"], 1);

    let o = run(&["validate", fixture("overlapping.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["violation"], serde_json::json!([1, 3]));

    let o = run(&["validate", fixture("adversarial.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["exhaustive"], true);
}

#[test]
fn usage_and_parse_errors() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["validate"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ \"n\": 2, ").unwrap();
    assert_eq!(run(&["verify", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["validate", "/nonexistent/domain.json"]).status.code(), Some(2));
    let p = plan(dir.path(), "three_cubes.json", &[]);
    let o = run(&["render", p.to_str().unwrap(), "--times", "3/2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn finite_plan_has_two_eh_stages() {
    let dir = tempfile::tempdir().unwrap();
    let p = plan(dir.path(), "three_cubes.json", &[]);
    let file: Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    let steps = file["provenance"].as_array().unwrap();
    assert_eq!(steps.iter().filter(|s| s["lemma"] == "eh-shuffle").count(), 2, "{steps:?}");
    let o = run(&["verify", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["pass"], true);
}

#[test]
fn disconnected_complement_is_reported() {
    let o = run(&["plan", fixture("disconnected.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("complement disconnected"));
}

#[test]
fn infinite_plan_materializes_bound() {
    let dir = tempfile::tempdir().unwrap();
    let p = plan(dir.path(), "interleaved_to_standard.json", &["--bound", "12"]);
    let file: Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    assert_eq!(file["materialized_bound"], 12);
    assert_eq!(file["paths"].as_array().unwrap().len(), 12);
    let gluing = file["provenance"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["lemma"] == "infinite-gluing")
        .expect("gluing step");
    assert_eq!(gluing["stages"].as_array().unwrap().len(), 12);
    let o = run(&["verify", p.to_str().unwrap(), "--bound", "12"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn verify_constant_plan() {
    let dir = tempfile::tempdir().unwrap();
    let p = plan(dir.path(), "constant.json", &[]);
    let o = run(&["verify", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["pass"], true);
}

#[test]
fn tampered_plan_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let p = plan(dir.path(), "three_cubes.json", &[]);
    let mut file: Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    // Freeze cube 1 on its start, so it collides with cube 2 arriving there.
    let start = file["paths"][0]["keyframes"][0]["cube"].clone();
    for kf in file["paths"][0]["keyframes"].as_array_mut().unwrap() {
        kf["cube"] = start.clone();
    }
    std::fs::write(&p, serde_json::to_string(&file).unwrap()).unwrap();
    let o = run(&["verify", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["pass"], false);
}

#[test]
fn eval_start_matches_bare_concatenation() {
    let dir = tempfile::tempdir().unwrap();
    let moving = plan(dir.path(), "three_cubes.json", &[]);
    let still = plan(dir.path(), "constant.json", &[]);
    let sc = fixture("three_cubes.json");
    let a = json(&run(&["eval", moving.to_str().unwrap(), sc.to_str().unwrap(), "--times", "0"]));
    let b = json(&run(&["eval", still.to_str().unwrap(), sc.to_str().unwrap(), "--times", "0,1/2,1"]));
    let va = a["times"][0]["values"].as_array().unwrap();
    assert_eq!(va.len(), 17 * 17);
    for t in 0..3 {
        let vb = b["times"][t]["values"].as_array().unwrap();
        for (x, y) in va.iter().zip(vb) {
            assert_eq!(x["s"], y["s"]);
            assert_eq!(x["value"], y["value"]);
            assert_eq!(y["error_bound"], "0/1");
        }
    }
    assert!(va.iter().any(|v| v["value"][0] != "0/1"));
}

fn rects(svg: &str, size: f64) -> Vec<(usize, [f64; 4])> {
    let attr = |tag: &str, name: &str| -> f64 {
        let start = tag.find(&format!(" {name}=\"")).unwrap() + name.len() + 3;
        let end = start + tag[start..].find('"').unwrap();
        tag[start..end].parse().unwrap()
    };
    svg.lines()
        .filter(|l| l.contains("data-index"))
        .map(|l| {
            let (x, y, w, h) = (attr(l, "x"), attr(l, "y"), attr(l, "width"), attr(l, "height"));
            (attr(l, "data-index") as usize, [x / size, (x + w) / size, 1.0 - (y + h) / size, 1.0 - y / size])
        })
        .collect()
}

#[test]
fn render_staircase() {
    let dir = tempfile::tempdir().unwrap();
    let p = plan(dir.path(), "interleaved_to_standard.json", &["--bound", "16"]);
    let frames = dir.path().join("frames");
    let o = run(&[
        "render",
        p.to_str().unwrap(),
        "--times",
        "0,1/3,1/2,2/3,1",
        "--out-dir",
        frames.to_str().unwrap(),
        "--size",
        "1200",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = json(&o);
    assert_eq!(report["rectangles"], serde_json::json!([16, 16, 16, 16, 16]));
    let frame = |i: usize| rects(&std::fs::read_to_string(frames.join(format!("frame-{i:03}.svg"))).unwrap(), 1200.0);
    let near = |a: f64, b: f64| (a - b).abs() < 1e-3;
    let slab = |k: usize| ((k as f64 - 1.0) / k as f64, k as f64 / (k as f64 + 1.0));

    // t = 0: the interleaved domain, slab k split at its midpoint.
    for (k, r) in frame(0) {
        let (lo, hi) = slab(k.div_ceil(2));
        let mid = (lo + hi) / 2.0;
        let (a, b) = if k % 2 == 1 { (lo, mid) } else { (mid, hi) };
        assert!(near(r[0], a) && near(r[1], b), "t=0 index {k}: {r:?}");
    }
    // Stage m finishes index m in its slab and keeps the rest in [1 - 1/m, 1].
    for (frame_no, done) in [(2, 1usize), (3, 2)] {
        for (k, r) in frame(frame_no) {
            if k <= done {
                let (a, b) = slab(k);
                assert!(near(r[0], a) && near(r[1], b) && near(r[2], 0.0) && near(r[3], 1.0), "index {k}: {r:?}");
            } else {
                assert!(r[0] >= 1.0 - 1.0 / (done as f64 + 1.0) - 1e-3, "index {k} outside its block: {r:?}");
            }
        }
    }
    for (_, r) in frame(1) {
        assert!(r.iter().all(|v| (-1e-9..=1.0 + 1e-9).contains(v)));
    }
    for (k, r) in frame(4) {
        let (a, b) = slab(k);
        assert!(near(r[0], a) && near(r[1], b), "t=1 index {k}: {r:?}");
    }
}
