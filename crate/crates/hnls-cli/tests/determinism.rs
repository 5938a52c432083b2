//! Criterion 8: repeated `compare` runs with an identical config produce
//! byte-identical numerical outputs (report.json may differ only in its
//! timestamp field). Also exercises cache idempotence and exit codes.

use std::path::Path;
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_hnls")
}

fn det_config() -> String {
    r#"{
  "schema_version": 1,
  "datum": {
    "kind": "sech", "amplitude": 0.3, "width": 1.0,
    "grid_n": 2048, "grid_length": 60.0
  },
  "z_grid": { "min": -8.0, "max": 8.0, "nodes": 201 },
  "evolution": {
    "n": 4096, "length": 480.0, "dt": 0.001, "t_final": 30.0,
    "frame_velocity": 1.2, "edge_tolerance": null
  },
  "rays": [{ "xi": 1.2, "t_min": 20.0, "t_max": 30.0, "count": 9 }],
  "convention": "a"
}"#
    .to_string()
}

fn run_compare(config: &Path, out: &Path, cache: Option<&Path>) {
    let mut cmd = Command::new(bin());
    cmd.arg("--config").arg(config).arg("--out").arg(out);
    if let Some(c) = cache {
        cmd.arg("--cache").arg(c);
    }
    cmd.arg("compare");
    let status = cmd.status().expect("binary runs");
    assert!(status.success(), "compare failed: {status:?}");
}

fn file_names(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

fn strip_timestamp(text: &str) -> String {
    let mut v: serde_json::Value = serde_json::from_str(text).unwrap();
    v["timestamp"] = serde_json::Value::Null;
    serde_json::to_string(&v).unwrap()
}

#[test]
fn criterion_8_repeated_compare_runs_are_byte_identical() {
    let base = std::env::temp_dir().join(format!("hnls_det_{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&base);
    std::fs::create_dir_all(&base).unwrap();
    let cfg_path = base.join("det.json");
    std::fs::write(&cfg_path, det_config()).unwrap();

    let out1 = base.join("out1");
    let out2 = base.join("out2");
    run_compare(&cfg_path, &out1, None);
    run_compare(&cfg_path, &out2, None);

    let names1 = file_names(&out1);
    let names2 = file_names(&out2);
    assert_eq!(names1, names2, "different artifact sets");
    assert_eq!(names1.iter().filter(|n| n.ends_with(".svg")).count(), 4);
    assert_eq!(names1.iter().filter(|n| n.ends_with(".csv")).count(), 3);

    let mut identical = 0;
    for name in &names1 {
        let a = std::fs::read(out1.join(name)).unwrap();
        let b = std::fs::read(out2.join(name)).unwrap();
        if name.ends_with("report.json") {
            let sa = strip_timestamp(&String::from_utf8(a).unwrap());
            let sb = strip_timestamp(&String::from_utf8(b).unwrap());
            assert_eq!(sa, sb, "{name} differs beyond the timestamp");
        } else {
            assert_eq!(a, b, "{name} not byte-identical");
        }
        identical += 1;
    }
    println!("criterion 8 [determinism]: PASS ({identical} artifacts byte-identical modulo timestamp)");

    let _ = std::fs::remove_dir_all(&base);
}

#[test]
fn cached_rerun_is_idempotent_and_identical() {
    let base = std::env::temp_dir().join(format!("hnls_cache_{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&base);
    std::fs::create_dir_all(&base).unwrap();
    let cfg_path = base.join("det.json");
    std::fs::write(&cfg_path, det_config()).unwrap();
    let cache = base.join("cache");

    let out1 = base.join("out1");
    let out2 = base.join("out2");
    run_compare(&cfg_path, &out1, Some(&cache));
    let t0 = std::time::Instant::now();
    run_compare(&cfg_path, &out2, Some(&cache));
    let cached_time = t0.elapsed();

    for name in file_names(&out1) {
        let a = std::fs::read(out1.join(&name)).unwrap();
        let b = std::fs::read(out2.join(&name)).unwrap();
        if name.ends_with("report.json") {
            let sa = strip_timestamp(&String::from_utf8(a).unwrap());
            let sb = strip_timestamp(&String::from_utf8(b).unwrap());
            assert_eq!(sa, sb);
        } else {
            assert_eq!(a, b, "{name} differs under cache reuse");
        }
    }
    println!("cache: second run took {cached_time:?}");

    let _ = std::fs::remove_dir_all(&base);
}

#[test]
fn exit_codes_for_config_and_validity_errors() {
    let base = std::env::temp_dir().join(format!("hnls_codes_{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&base);
    std::fs::create_dir_all(&base).unwrap();

    // malformed config: unknown key, exit 2, message names the key
    let bad = base.join("bad.json");
    std::fs::write(&bad, det_config().replace("\"rays\"", "\"raysx\"")).unwrap();
    let out = Command::new(bin())
        .arg("--config")
        .arg(&bad)
        .arg("--out")
        .arg(base.join("o"))
        .arg("scatter")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("raysx"));

    // ray below the validity region: exit 4
    let invalid = base.join("invalid.json");
    std::fs::write(&invalid, det_config().replace("\"xi\": 1.2", "\"xi\": 0.5")).unwrap();
    let out = Command::new(bin())
        .arg("--config")
        .arg(&invalid)
        .arg("--out")
        .arg(base.join("o"))
        .arg("asym")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));

    let _ = std::fs::remove_dir_all(&base);
}

#[test]
fn signmap_at_xi_one_has_zero_crossings_at_stationary_points() {
    let base = std::env::temp_dir().join(format!("hnls_signmap_{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&base);
    std::fs::create_dir_all(&base).unwrap();
    let cfg = det_config().replace(
        "\"convention\": \"a\"",
        "\"sign_map\": { \"xi\": 1.0, \"window\": [-0.8, 1.4, -0.6, 0.6], \"resolution\": [221, 81] },\n  \"convention\": \"a\"",
    );
    let cfg_path = base.join("sm.json");
    std::fs::write(&cfg_path, cfg).unwrap();
    let out_dir = base.join("out");
    let status = Command::new(bin())
        .arg("--config")
        .arg(&cfg_path)
        .arg("--out")
        .arg(&out_dir)
        .arg("signmap")
        .status()
        .unwrap();
    assert!(status.success());

    let csv_path = file_names(&out_dir)
        .into_iter()
        .find(|n| n.ends_with("_signmap.csv"))
        .map(|n| out_dir.join(n))
        .expect("signmap csv written");
    let text = std::fs::read_to_string(csv_path).unwrap();

    // pick the first row strictly above the real axis and find the sign
    // flips of Im theta along it; they bracket z2 = 0 and z1 = 2/3
    let mut rows: Vec<(f64, f64, i32)> = Vec::new();
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let (x, y, s) = (
            cols[0].parse::<f64>().unwrap(),
            cols[1].parse::<f64>().unwrap(),
            cols[2].parse::<i32>().unwrap(),
        );
        rows.push((x, y, s));
    }
    let y_target = rows
        .iter()
        .map(|r| r.1)
        .filter(|&y| y > 1e-9)
        .fold(f64::INFINITY, f64::min);
    let mut row: Vec<(f64, i32)> = rows
        .iter()
        .filter(|r| (r.1 - y_target).abs() < 1e-12)
        .map(|r| (r.0, r.2))
        .collect();
    row.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut crossings = Vec::new();
    for w in row.windows(2) {
        if w[0].1 != w[1].1 {
            crossings.push(0.5 * (w[0].0 + w[1].0));
        }
    }
    assert!(
        crossings.iter().any(|&c| c.abs() < 0.05),
        "no crossing near z2 = 0: {crossings:?}"
    );
    assert!(
        crossings.iter().any(|&c| (c - 2.0 / 3.0).abs() < 0.05),
        "no crossing near z1 = 2/3: {crossings:?}"
    );

    let _ = std::fs::remove_dir_all(&base);
}

#[test]
fn selftest_exits_zero() {
    let status = Command::new(bin()).arg("selftest").status().unwrap();
    assert!(status.success());
}
