use std::process::{Command, Output};

use levy_hit::cli::csv_reader;

fn levy_hit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_levy-hit"))
        .args(args)
        .env("LEVY_HIT_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn rows(text: &[u8]) -> (Vec<String>, Vec<Vec<String>>) {
    let mut rd = csv_reader(text);
    let header = rd.headers().unwrap().iter().map(String::from).collect();
    let body = rd
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (header, body)
}

#[test]
fn models_lists_presets() {
    let out = levy_hit(&["models"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["brownian", "stable-specneg-1.5", "factorized-beta0.4-0.6"] {
        assert!(text.contains(name), "{name}");
    }
}

#[test]
fn psi_writes_a_parseable_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("psi.csv");
    let out = levy_hit(&["psi", "--model", "brownian", "--xi-grid", "1e-3:1e3:64", "-o", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let (header, body) = rows(&std::fs::read(&path).unwrap());
    assert_eq!(header, ["xi", "re_psi", "im_psi"]);
    assert_eq!(body.len(), 64);
    for r in &body {
        let (xi, re): (f64, f64) = (r[0].parse().unwrap(), r[1].parse().unwrap());
        assert!((re / (xi * xi) - 1.0).abs() < 1e-12);
    }
    // Only the target remains in the directory: the temporary was renamed.
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn model_files_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bm.toml");
    std::fs::write(&path, "sigma = 2.0\ncentered = true\n").unwrap();
    let out = levy_hit(&["psi", "--model", path.to_str().unwrap(), "--xi-grid", "1"]);
    assert!(out.status.success());
    assert_eq!(rows(&out.stdout).1[0][1].parse::<f64>().unwrap(), 4.0);
    let out = levy_hit(&["psi", "--model", "brownian", "--set", "sigma=3", "--xi-grid", "1"]);
    assert_eq!(rows(&out.stdout).1[0][1].parse::<f64>().unwrap(), 9.0);
    let out = levy_hit(&["psi", "--model", "brownian", "--set", "sigma=-1", "--xi-grid", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn input_errors_exit_with_one() {
    assert_eq!(levy_hit(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(levy_hit(&["psi", "--model", "nope"]).status.code(), Some(1));
    assert_eq!(levy_hit(&["psi", "--model", "brownian", "--xi-grid", "1:2"]).status.code(), Some(1));
    assert_eq!(levy_hit(&["verify", "--suite", "nope"]).status.code(), Some(1));
    let out = levy_hit(&["hit", "--model", "stable-sym-1.5", "--x", "0.5", "--R", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn closed_form_suite_passes() {
    let out = levy_hit(&["verify", "--suite", "brownian-closed-forms"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, body) = rows(&out.stdout);
    assert_eq!(header.join(","), levy_hit::verify::CSV_HEADER);
    assert!(body.iter().all(|r| r[6] == "pass"));
}

#[test]
fn hit_is_deterministic_and_prints_its_seed() {
    let args = [
        "hit", "--model", "stable-specneg-1.5", "--x", "2", "--R", "1", "--t-grid", "0.1:100:10", "--mc-paths", "2000",
        "--seed", "7",
    ];
    let a = levy_hit(&args);
    let b = levy_hit(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8_lossy(&a.stderr).contains("seed=7"));
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.starts_with("# seed=7"));
    let (header, body) = rows(text.as_bytes());
    assert_eq!(header[4], "comparator");
    assert_eq!(body.len(), 10);
    let other = levy_hit(&[&args[..12], &["8"]].concat());
    assert_ne!(other.stdout, text.as_bytes());
}

#[test]
fn starts_below_the_interval_use_the_reflected_process() {
    let out = levy_hit(&[
        "hit", "--model", "stable-sym-1.5", "--x=-3", "--R", "1", "--t-grid", "1:10:2", "--mc-paths", "500",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (_, body) = rows(&out.stdout);
    assert!(body.iter().all(|r| r[0].parse::<f64>().unwrap() == -3.0));
}

#[test]
fn band_failures_exit_with_two() {
    // Survival near 1e-4 cannot be resolved by 100 paths: the estimate is 0
    // and the ratio leaves the band.
    let out = levy_hit(&[
        "hit", "--model", "brownian", "--x", "1.001", "--R", "1", "--t-grid", "50", "--mc-paths", "100", "--dt", "0.5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let (_, body) = rows(&out.stdout);
    assert_eq!(body[0][7].parse::<f64>().unwrap(), 0.0);
}
