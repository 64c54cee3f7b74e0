use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn chardyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chardyn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn classify_xyz() {
    let v = json_of(&chardyn(&["classify", "--word", "xyz"]));
    assert_eq!(v["kind"], "hyperbolic");
    assert!((v["lambda"].as_f64().unwrap() - (2.0 + 5f64.sqrt())).abs() < 1e-12);
    assert_eq!(v["stable"], true);
    assert_eq!(v["ind_f"], "v_z");
    assert_eq!(v["ind_finv"], "v_y");
    assert_eq!(v["config"]["params"]["word"], "xyz");
}

#[test]
fn free_spectrum_is_one_band() {
    let v = json_of(&chardyn(&[
        "spectrum", "--sub", "fib", "--kappa", "0", "--window", "-3:3",
    ]));
    let bands = v["intervals"].as_array().unwrap();
    assert_eq!(bands.len(), 1);
    let (a, b) = (bands[0][0].as_f64().unwrap(), bands[0][1].as_f64().unwrap());
    assert!((a + 2.0).abs() < 0.01 && (b - 2.0).abs() < 0.01, "{a} {b}");
}

#[test]
fn exit_codes() {
    assert_eq!(chardyn(&["bogus"]).status.code(), Some(2));
    assert_eq!(
        chardyn(&["classify", "--word", "xq"]).status.code(),
        Some(2)
    );
    assert_eq!(
        chardyn(&[
            "classify",
            "--word",
            "xyz",
            "--report",
            "/nonexistent/dir/r.json"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(chardyn(&["spectrum", "--grid", "1"]).status.code(), Some(2));
    // No spectrum in the window: nothing to box-count.
    let out = chardyn(&[
        "dimension",
        "--kappa",
        "2",
        "--window",
        "10:11",
        "--grid",
        "2000",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!out.stderr.is_empty());
}

#[test]
fn rasters_are_stable_across_workers_and_reruns() {
    let dir = tempfile::tempdir().unwrap();
    let mut images = Vec::new();
    for (k, workers) in ["1", "8", "8"].iter().enumerate() {
        let out = path(dir.path(), &format!("r{k}.pgm"));
        let o = chardyn(&[
            "render-real",
            "--D",
            "5",
            "--word",
            "xyz",
            "--window",
            "-10:10",
            "--grid",
            "96",
            "--workers",
            workers,
            "--out",
            &out,
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        images.push(fs::read(&out).unwrap());
        let side: Value =
            serde_json::from_slice(&fs::read(format!("{out}.json")).unwrap()).unwrap();
        assert_eq!(side["config"]["command"], "render-real");
        assert_eq!(side["width"], 96);
    }
    assert!(images.windows(2).all(|w| w[0] == w[1]));
    assert!(images[0].starts_with(b"P5\n96 96\n65535\n"));
}

#[test]
fn spectrum_and_samples_are_stable_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    for (name, args) in [
        (
            "spec",
            vec![
                "spectrum",
                "--kappa",
                "2",
                "--grid",
                "3001",
                "--lyapunov",
                "200",
            ],
        ),
        (
            "samples",
            vec!["orbit", "--D", "2", "--random", "5000", "--max-iter", "300"],
        ),
    ] {
        let mut tables = Vec::new();
        for workers in ["1", "8"] {
            let out = path(dir.path(), &format!("{name}{workers}.csv"));
            let report = format!("{out}.report");
            let mut a = args.clone();
            a.extend(["--workers", workers, "--out", &out, "--report", &report]);
            let o = chardyn(&a);
            assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
            tables.push((fs::read(&out).unwrap(), fs::read(&report).unwrap()));
        }
        assert!(tables[0].0 == tables[1].0, "{name} table differs");
        // Reports differ only in the echoed output paths.
        let strip = |b: &[u8]| {
            let mut v: Value = serde_json::from_slice(b).unwrap();
            v["config"]["outputs"] = Value::Null;
            v
        };
        assert_eq!(strip(&tables[0].1), strip(&tables[1].1));
    }
}

#[test]
fn config_files_replay_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let first = path(dir.path(), "a.csv");
    let o = chardyn(&[
        "orbit",
        "--D",
        "5",
        "--point",
        "1,2,0.5",
        "--max-iter",
        "20",
        "--out",
        &first,
    ]);
    assert!(o.status.success());
    let side: Value = serde_json::from_slice(&fs::read(format!("{first}.json")).unwrap()).unwrap();
    let mut config = side["config"].clone();
    let second = path(dir.path(), "b.csv");
    config["outputs"]["out"] = Value::String(second.clone());
    let cfg = path(dir.path(), "run.json");
    fs::write(&cfg, serde_json::to_vec(&config).unwrap()).unwrap();
    assert!(chardyn(&["--config", &cfg]).status.success());
    assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap());

    let o = chardyn(&["--config", &cfg, "--max-iter", "3"]);
    let v = json_of(&o);
    assert_eq!(v["config"]["params"]["max-iter"], 3);
    assert_eq!(v["config"]["params"]["D"], "5");
}

#[test]
fn painleve_report() {
    let dir = tempfile::tempdir().unwrap();
    let rep = path(dir.path(), "p.json");
    let o = chardyn(&[
        "painleve", "--theta", "1,0,0,0", "--loop", "l0l1", "--n-max", "2", "--report", &rep,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&fs::read(&rep).unwrap()).unwrap();
    assert_eq!(v["kind"], "hyperbolic");
    assert_eq!(v["fraction_real"], 1.0);
    assert_eq!(v["convention"], "l0 -> yxyx, l1 -> zyzy, linf -> xzxz");
    let v = json_of(&chardyn(&[
        "painleve", "--theta", "1,0,0,0", "--loop", "l0",
    ]));
    assert_eq!(v["entropy"], 0.0);
    assert!(v.get("confinement").is_none());
}

#[test]
fn census_counts() {
    let v = json_of(&chardyn(&["cayley-census", "--word", "xyz", "--n", "2"]));
    assert_eq!(v["points"].as_array().unwrap().len(), 18);
}
