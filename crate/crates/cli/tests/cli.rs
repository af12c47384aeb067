use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn casimir(sub: &str, config: &Path, out: &Path, threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_casimir"))
        .args([sub, "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(["--threads", threads])
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn csv_column(path: &Path, name: &str) -> Vec<String> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let idx = r.headers().unwrap().iter().position(|h| h == name).expect("column");
    r.records().map(|row| row.unwrap()[idx].to_string()).collect()
}

const MIRRORS: &str = r#"{
  "geometry": {"kind": "slab", "gap": 1.0},
  "materials": {"bodies": [{"kind": "constant", "params": {"eps": 1e8}}]},
  "thermal": {"temperature": 0.0, "rel_tol": 1e-9},
  "sweep": [0.5, 1.0, 2.0]
}"#;

#[test]
fn lifshitz_sweep_scales_as_inverse_cube() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "run.json", MIRRORS);
    let out = dir.path().join("out");
    let o = casimir("lifshitz", &cfg, &out, "1");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let h = csv_column(&out.join("results.csv"), "H");
    assert_eq!(h, ["0.5", "1", "2"]);
    let f: Vec<f64> = csv_column(&out.join("results.csv"), "F_per_area").iter().map(|s| s.parse().unwrap()).collect();
    assert!((f[0] / f[1] - 8.0).abs() < 1e-4 * 8.0, "{f:?}");
    assert!((f[2] / f[1] - 0.125).abs() < 1e-4 * 0.125, "{f:?}");
    // large-ε walls sit within a few 1e-3 of the ideal-mirror value
    let ideal = -std::f64::consts::PI.powi(2) / 720.0;
    assert!(((f[1] - ideal) / ideal).abs() < 3e-3, "{}", f[1]);
    // P = −∂(F/A)/∂H = 3 F/(A H) for a 1/H³ law
    let p: Vec<f64> = csv_column(&out.join("results.csv"), "pressure").iter().map(|s| s.parse().unwrap()).collect();
    assert!((p[1] / (3.0 * f[1]) - 1.0).abs() < 1e-5, "{p:?}");
    let status = csv_column(&out.join("results.csv"), "status");
    assert!(status.iter().all(|s| s == "converged"));

    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("results.json")).unwrap()).unwrap();
    let recs = json["records"].as_array().unwrap();
    assert_eq!(recs.len(), 3);
    assert!(!recs[0]["per_frequency"].as_array().unwrap().is_empty());
    assert_eq!(json["config"]["command"], "lifshitz");
    assert!(out.join("timing.json").is_file());
}

#[test]
fn empty_sweep_gives_one_record_at_config_gap() {
    let dir = TempDir::new().unwrap();
    let text = MIRRORS.replace(",\n  \"sweep\": [0.5, 1.0, 2.0]", "").replace("\"gap\": 1.0", "\"gap\": 1.5");
    let cfg = write(&dir, "run.json", &text);
    let out = dir.path().join("out");
    let o = casimir("lifshitz", &cfg, &out, "1");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(csv_column(&out.join("results.csv"), "H"), ["1.5"]);
}

const SPHERES: &str = r#"{
  "geometry": {"kind": "spheres", "radius": 1.0, "gap": 1.0},
  "materials": {"bodies": [{"kind": "constant", "params": {"eps": 4.0}}]},
  "thermal": {"temperature": 1.0, "rel_tol": 1e-5},
  "numerics": {"refinement": 0, "l_max": 3},
  "sweep": [1.0, 1.5]
}"#;

#[test]
fn output_is_bit_identical_across_runs_and_thread_counts() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "run.json", SPHERES);
    let mut files = Vec::new();
    for (k, threads) in ["1", "1", "2"].iter().enumerate() {
        let out = dir.path().join(format!("out{k}"));
        let o = casimir("bem-energy", &cfg, &out, threads);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        files.push((fs::read(out.join("results.csv")).unwrap(), fs::read(out.join("results.json")).unwrap()));
    }
    assert!(files[0] == files[1]);
    assert!(files[0] == files[2]);
    let out = dir.path().join("out0");
    let f: Vec<f64> = csv_column(&out.join("results.csv"), "F").iter().map(|s| s.parse().unwrap()).collect();
    assert!(f[0] < f[1] && f[1] < 0.0, "{f:?}");
}

#[test]
fn sphere_sphere_agrees_with_bem_energy() {
    let dir = TempDir::new().unwrap();
    let text = SPHERES.replace("\"sweep\": [1.0, 1.5]", "\"sweep\": [1.5]");
    let cfg = write(&dir, "run.json", &text);
    let a = dir.path().join("bem");
    let b = dir.path().join("tgtg");
    assert!(casimir("bem-energy", &cfg, &a, "0").status.success());
    let o = casimir("sphere-sphere", &cfg, &b, "0");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let fa: f64 = csv_column(&a.join("results.csv"), "F")[0].parse().unwrap();
    let fb: f64 = csv_column(&b.join("results.csv"), "F")[0].parse().unwrap();
    // same mesh on both routes; the difference is multipole truncation
    assert!(((fa - fb) / fa).abs() < 2e-2, "{fa} {fb}");
}

#[test]
fn force_points_toward_the_other_body() {
    let dir = TempDir::new().unwrap();
    let text = SPHERES.replace("\"sweep\": [1.0, 1.5]", "\"sweep\": [1.0]");
    let cfg = write(&dir, "run.json", &text);
    let out = dir.path().join("out");
    let o = casimir("force", &cfg, &out, "0");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = out.join("results.csv");
    let fz: f64 = csv_column(&csv, "Fz")[0].parse().unwrap();
    let fx: f64 = csv_column(&csv, "Fx")[0].parse().unwrap();
    assert!(fz < 0.0, "{fz}");
    assert!(fx.abs() < 1e-6 * fz.abs(), "{fx} {fz}");
}

#[test]
fn tmatrix_lists_every_entry() {
    let dir = TempDir::new().unwrap();
    let text = r#"{
      "geometry": {"kind": "spheres", "radius": 1.0, "gap": 1.0},
      "materials": {"bodies": [{"kind": "constant", "params": {"eps": 2.0}}]},
      "numerics": {"refinement": 0, "l_max": 2, "kappa": 0.5}
    }"#;
    let cfg = write(&dir, "run.json", text);
    let out = dir.path().join("out");
    let o = casimir("tmatrix", &cfg, &out, "1");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    // 2 polarizations × (3 + 5) modes, squared
    assert_eq!(csv_column(&out.join("results.csv"), "re").len(), 256);
}

#[test]
fn config_errors_exit_with_2() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let cases = [
        MIRRORS.replace("[0.5, 1.0, 2.0]", "[1.0, 0.5]"),
        MIRRORS.replace("\"eps\": 1e8", "\"eps\": \"big\""),
        MIRRORS.replace("\"slab\"", "\"tube\""),
        MIRRORS.replace("{\n  \"geometry\"", "{\n  \"command\": \"force\",\n  \"geometry\""),
        r#"{"geometry": {"kind": "meshes", "files": [{"path": "missing.mesh"}]},
            "materials": {"bodies": [{"kind": "vacuum"}]}}"#
            .to_string(),
        "{ not json".to_string(),
    ];
    for (i, text) in cases.iter().enumerate() {
        let cfg = write(&dir, &format!("bad{i}.json"), text);
        let sub = if i == 4 { "bem-energy" } else { "lifshitz" };
        let o = casimir(sub, &cfg, &out, "1");
        assert_eq!(o.status.code(), Some(2), "case {i}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(String::from_utf8_lossy(&o.stderr).contains("config error"), "case {i}");
    }
    let o = casimir("lifshitz", &dir.path().join("nope.json"), &out, "1");
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_casimir")).args(["lifshitz", "--bogus"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn field_path_is_reported() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "bad.json", &MIRRORS.replace("[0.5, 1.0, 2.0]", "[0.5, 0.5]"));
    let o = casimir("lifshitz", &cfg, &dir.path().join("out"), "1");
    assert!(String::from_utf8_lossy(&o.stderr).contains("sweep[1]"));
}

const OCTAHEDRON: &str = "# unit octahedron\n\
v 1 0 0\nv -1 0 0\nv 0 1 0\nv 0 -1 0\nv 0 0 1\nv 0 0 -1\n\
f 1 3 5\nf 3 2 5\nf 2 4 5\nf 4 1 5\nf 3 1 6\nf 2 3 6\nf 4 2 6\nf 1 4 6\n";

#[test]
fn mesh_files_are_read_relative_to_the_config() {
    let dir = TempDir::new().unwrap();
    write(&dir, "oct.mesh", OCTAHEDRON);
    let text = r#"{
      "geometry": {"kind": "meshes", "files": [{"path": "oct.mesh"}, {"path": "oct.mesh", "offset": [0, 0, 3]}]},
      "materials": {"bodies": [{"kind": "constant", "params": {"eps": 3.0}}]},
      "thermal": {"temperature": 1.0},
      "sweep": [0.5, 1.0]
    }"#;
    let cfg = write(&dir, "run.json", text);
    let out = dir.path().join("out");
    let o = casimir("bem-energy", &cfg, &out, "1");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let f: Vec<f64> = csv_column(&out.join("results.csv"), "F").iter().map(|s| s.parse().unwrap()).collect();
    assert!(f[0] < f[1] && f[1] < 0.0, "{f:?}");
}

#[test]
fn numeric_failures_exit_with_3() {
    let dir = TempDir::new().unwrap();
    write(&dir, "oct.mesh", OCTAHEDRON);
    // the second copy overlaps the first
    let text = r#"{
      "geometry": {"kind": "meshes", "files": [{"path": "oct.mesh"}, {"path": "oct.mesh", "offset": [0.5, 0, 0]}]},
      "materials": {"bodies": [{"kind": "constant", "params": {"eps": 3.0}}]},
      "thermal": {"temperature": 1.0}
    }"#;
    let cfg = write(&dir, "run.json", text);
    let o = casimir("bem-energy", &cfg, &dir.path().join("out"), "1");
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}
