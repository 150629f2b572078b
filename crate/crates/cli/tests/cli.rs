use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;
use twinbarrier_cli::RunConfig;

const DESK: &str = r#"{
  "geometry": { "H": 1.0, "hole": { "x0": 0.45, "delta": 0.1 }, "w": 0.3, "L": 2.0 },
  "truncation": { "N": 200, "M": 30 },
  "band": { "points": 400 },
  "oracle": { "h": 0.025, "Z": 1.0, "Nb": 12 }
}"#;

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn desk_with(edit: impl FnOnce(&mut Value)) -> String {
    let mut v: Value = serde_json::from_str(DESK).unwrap();
    edit(&mut v);
    v.to_string()
}

fn run(args: &[&str], config: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twinbarrier"))
        .args(args)
        .arg("--config")
        .arg(config)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn sweep_writes_a_conserving_deterministic_table() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "desk.json", DESK);
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for out in [&a, &b] {
        let o = run(&["sweep", "--out", out.to_str().unwrap()], &cfg);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(!text.contains('\r'));
    assert_eq!(
        text.lines().next().unwrap(),
        "k,re_r1,im_r1,re_t1,im_t1,R,T,energy_defect,h_res"
    );
    let table = rows(&text);
    assert_eq!(table.len(), 400);
    assert!(table.windows(2).all(|w| w[0][0] < w[1][0]));
    for r in &table {
        assert_eq!(r.len(), 9);
        assert!(r[7] <= 1e-8);
    }
    // 17 significant digits.
    let first = text.lines().nth(1).unwrap().split(',').next().unwrap();
    assert_eq!(
        first
            .split('e')
            .next()
            .unwrap()
            .replace('.', "")
            .trim_start_matches('-')
            .len(),
        17
    );
}

#[test]
fn empty_band_gives_a_header_only_file() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "empty.json", &desk_with(|v| v["band"]["points"] = 0.into()));
    let o = run(&["sweep"], &cfg);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "k,re_r1,im_r1,re_t1,im_t1,R,T,energy_defect,h_res\n");
}

#[test]
fn resonance_report_lists_the_desk_roots() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "desk.json", DESK);
    let o = run(&["resonance"], &cfg);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let list = v["resonances"].as_array().unwrap();
    let find = |kind: &str| list.iter().find(|r| r["kind"] == kind).unwrap();
    let d = find("dirichlet");
    let n = find("neumann");
    assert_eq!(list.len(), 2);
    assert!((d["k_res"].as_f64().unwrap() - 4.85).abs() < 0.02);
    assert!((n["k_res"].as_f64().unwrap() - 3.65).abs() < 0.02);
    assert!((d["closed_cavity"].as_f64().unwrap() - 4.8508).abs() < 1e-3);
    for r in list {
        assert!(r["residual"].as_f64().unwrap() <= 1e-10);
        assert!(r["re_r1"].is_number() && r["im_t1"].is_number());
    }
    assert_eq!(v["status"], "found");
}

#[test]
fn resonance_report_is_honest_for_other_apertures() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "wide.json",
        &desk_with(|v| v["geometry"]["hole"] = serde_json::json!({ "x0": 0.3, "delta": 0.4 })),
    );
    let o = run(&["resonance"], &cfg);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let count = v["resonances"].as_array().unwrap().len();
    assert_eq!(v["count"].as_u64().unwrap() as usize, count);
    assert_eq!(v["status"], if count == 0 { "none found" } else { "found" });
}

#[test]
fn malformed_and_unknown_configs_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let broken = write(&dir, "broken.json", "{ \"geometry\": ");
    let o = run(&["resonance"], &broken);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot parse"));

    let unknown = write(
        &dir,
        "unknown.json",
        &desk_with(|v| v["geometry"]["hole"]["radius"] = 0.1.into()),
    );
    let o = run(&["sweep"], &unknown);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("radius"));

    let o = run(&["sweep"], &dir.path().join("missing.json"));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn band_touching_the_second_cutoff_is_rejected_at_load() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "edge.json",
        &desk_with(|v| v["band"] = serde_json::json!({ "kmin": 4.0, "kmax": std::f64::consts::TAU, "points": 10 })),
    );
    let o = run(&["validate"], &cfg);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("single-mode band"));
}

fn checks(o: &Output) -> Vec<(String, bool)> {
    let v: Value = serde_json::from_str(&stdout(o)).unwrap();
    v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| (c["name"].as_str().unwrap().to_owned(), c["passed"].as_bool().unwrap()))
        .collect()
}

#[test]
fn validate_reports_every_suite_on_the_desk() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "desk.json", &desk_with(|v| v["band"]["points"] = 100.into()));
    let o = run(&["validate"], &cfg);
    let got = checks(&o);
    let names: Vec<&str> = got.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(
        names,
        [
            "unimodularity",
            "energy",
            "dual_path",
            "spd",
            "convergence",
            "overlap_quadrature"
        ]
    );
    for (name, passed) in &got {
        if name != "convergence" {
            assert!(passed, "{name}");
        }
    }
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let all = got.iter().all(|(_, p)| *p);
    assert_eq!(v["passed"].as_bool().unwrap(), all);
    assert_eq!(o.status.code(), Some(if all { 0 } else { 1 }));
}

#[test]
fn validate_passes_with_a_tolerance_the_truncation_can_meet() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "loose.json",
        &desk_with(|v| {
            v["band"]["points"] = 50.into();
            v["validate"] = serde_json::json!({ "convergence_tol": 1e-3, "convergence_points": 3 });
        }),
    );
    let o = run(&["validate"], &cfg);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn under_truncated_validation_fails_the_convergence_check() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "m2.json",
        &desk_with(|v| {
            v["truncation"]["M"] = 2.into();
            v["band"]["points"] = 20.into();
        }),
    );
    let o = run(&["validate"], &cfg);
    assert_eq!(o.status.code(), Some(1));
    let conv = checks(&o).into_iter().find(|(n, _)| n == "convergence").unwrap();
    assert!(!conv.1);
}

#[test]
fn oracle_comparison_agrees_at_ten_desk_points() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "desk.json", DESK);
    let o = run(&["compare-oracle", "--halves"], &cfg);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.lines().next().unwrap().contains("abs_dr1n"));
    let table = rows(&text);
    assert_eq!(table.len(), 10);
    for r in &table {
        assert_eq!(r.len(), 21);
        for d in [r[9], r[10], r[15], r[20]] {
            assert!(d <= 0.02, "{d}");
        }
    }
}

#[test]
fn closed_barriers_reflect_totally_in_both_solvers() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "closed.json",
        &desk_with(|v| v["geometry"]["hole"]["delta"] = 0.0.into()),
    );
    let o = run(&["compare-oracle", "--k", "3.7,4.4"], &cfg);
    assert_eq!(o.status.code(), Some(0));
    for r in rows(&stdout(&o)) {
        assert!((r[1].hypot(r[2]) - 1.0).abs() < 1e-12);
        assert!((r[3].hypot(r[4]) - 1.0).abs() < 1e-8);
        assert!(r[7].hypot(r[8]) < 1e-8);
    }
    assert_eq!(run(&["sweep"], &cfg).status.code(), Some(2));
}

#[test]
fn out_of_band_oracle_wavenumbers_are_usage_errors() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "desk.json", DESK);
    assert_eq!(run(&["compare-oracle", "--k", "7.0"], &cfg).status.code(), Some(2));
}

fn field_table(cfg: &Path, k: f64) -> (Vec<Vec<f64>>, f64) {
    let o = run(&["field", "--k", &k.to_string()], cfg);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), "x,z,re_u,im_u");
    let enhancement = text
        .lines()
        .find_map(|l| l.strip_prefix("# cavity_enhancement="))
        .unwrap()
        .parse()
        .unwrap();
    (rows(&text), enhancement)
}

#[test]
fn field_is_enhanced_in_the_cavity_at_resonance() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "desk.json", DESK);
    let v: Value = serde_json::from_str(&stdout(&run(&["resonance"], &cfg))).unwrap();
    let kd = v["resonances"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["kind"] == "dirichlet")
        .unwrap()["k_res"]
        .as_f64()
        .unwrap();
    let (_, enhancement) = field_table(&cfg, kd);
    assert!(enhancement > 5.0, "{enhancement}");
    let (_, off) = field_table(&cfg, 4.0);
    assert!(off < 1.0);
}

#[test]
fn field_vanishes_on_barriers_and_respects_hole_symmetry() {
    let dir = TempDir::new().unwrap();
    // 41 x-samples mirror onto each other about x = 1/2.
    let cfg = write(
        &dir,
        "field.json",
        &desk_with(|v| v["field"] = serde_json::json!({ "nx": 41, "nz": 361, "margin": 1.0 })),
    );
    let (table, _) = field_table(&cfg, 4.3);
    let g = twinbarrier::Geometry::desk();
    let mut on_barrier = 0;
    for r in &table {
        if g.in_barrier(r[0], 0.0, r[1]) {
            assert_eq!((r[2], r[3]), (0.0, 0.0));
            on_barrier += 1;
        }
    }
    assert!(on_barrier > 0);
    for line in table.chunks(41) {
        let scale = line.iter().map(|r| r[2].hypot(r[3])).fold(1.0, f64::max);
        for i in 0..41 {
            let (a, b) = (&line[i], &line[40 - i]);
            assert!(
                (a[2] - b[2]).abs() <= 1e-10 * scale && (a[3] - b[3]).abs() <= 1e-10 * scale,
                "z = {}",
                a[1]
            );
        }
    }
}

#[test]
fn config_round_trips_through_json() {
    let cfg = RunConfig::from_json(DESK).unwrap();
    let again = RunConfig::from_json(&cfg.to_json()).unwrap();
    assert_eq!(cfg, again);
    let rect = r#"{ "geometry": { "H": 1.0, "H2": 2.0, "hole": { "x0": 0.4, "delta": 0.2, "y0": 0.8, "delta2": 0.3 }, "w": 0.3, "L": 2.0 },
                    "output": { "sweep": "out/sweep.csv" } }"#;
    let cfg = RunConfig::from_json(rect).unwrap();
    assert_eq!(cfg, RunConfig::from_json(&cfg.to_json()).unwrap());
    assert!(cfg.prepare().is_ok());
}
