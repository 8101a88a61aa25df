use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sletool"))
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn sletool")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn torque_outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture("prototype.cfg");
    let mut outputs = Vec::new();
    for i in 0..2 {
        let out = dir.path().join(format!("t{i}.csv"));
        let rep = dir.path().join(format!("t{i}.json"));
        let o = run(&[
            "torque",
            "--config",
            cfg.to_str().unwrap(),
            "--alpha",
            "20:60:0.5",
            "--out",
            out.to_str().unwrap(),
            "--report",
            rep.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        outputs.push((std::fs::read(out).unwrap(), std::fs::read(rep).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
    let rows = csv_rows(std::str::from_utf8(&outputs[0].0).unwrap());
    assert_eq!(rows.len(), 81);
}

#[test]
fn report_digest_tracks_inputs() {
    let digest = |args: &[&str]| {
        let o = run(args);
        assert!(o.status.success());
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        v["input_digest"].as_str().unwrap().to_string()
    };
    let cfg = fixture("prototype.cfg");
    let with_cfg = ["geometry", "--config", cfg.to_str().unwrap()];
    let a = digest(&with_cfg);
    assert_eq!(a, digest(&with_cfg));
    assert_eq!(a.len(), 64);
    assert_ne!(a, digest(&["geometry"]));
    assert_ne!(digest(&["spring-opt"]), digest(&["spring-opt", "--d-fgr-mm", "40"]));
}

#[test]
fn holding_angle_sweep_peaks_near_sixty_with_projected_lever() {
    let o = run(&["torque", "--beta", "0:90:1", "--alpha-deg", "45", "--d-fgr-form", "projected"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    let best = rows.iter().max_by(|a, b| a[2].total_cmp(&b[2])).unwrap();
    assert!((best[0] - 60.0).abs() <= 1.0, "peak at {}", best[0]);
}

#[test]
fn width_sweep_reports_alpha_column() {
    let o = run(&["torque", "--width", "41,60,82"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("w_tool_mm,alpha_deg,T_sqz_Nmm,T_stch_Nmm\n"));
    let rows = csv_rows(&text);
    assert!(rows.windows(2).all(|w| w[1][1] > w[0][1]));
}

#[test]
fn empty_or_malformed_grids_are_usage_errors() {
    for g in ["", "1:0:1", "0:1:0", "x"] {
        let o = run(&["torque", "--alpha", g]);
        assert_eq!(o.status.code(), Some(2), "grid `{g}`");
    }
}

#[test]
fn validate_exit_codes() {
    let ok = run(&["validate", "--config", fixture("prototype.cfg").to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("alpha_min = 19.7246"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "w_tool_min = 30\n").unwrap();
    let o = run(&["validate", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("pads collide with ratchet"));

    std::fs::write(&bad, "xi = six\n").unwrap();
    assert_eq!(run(&["validate", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["validate", "--config", "/nonexistent/x.cfg"]).status.code(), Some(2));
}

#[test]
fn infeasible_analyses_exit_three() {
    let o = run(&["spring-opt", "--max-diameter", "5"]);
    assert_eq!(o.status.code(), Some(3));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("long_arm.cfg");
    std::fs::write(&cfg, "r_sprt = 25\n").unwrap();
    assert_eq!(run(&["cam", "--config", cfg.to_str().unwrap()]).status.code(), Some(3));

    let scen = dir.path().join("far.cfg");
    std::fs::write(&scen, "start_dx = 9\nsearch_bound = 3\n").unwrap();
    assert_eq!(run(&["insertion", "--scenario", scen.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn spring_catalog_pick_respects_diameter() {
    let o = run(&["spring-opt", "--catalog", fixture("springs.cfg").to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["catalog_pick"]["label"], "TS-060");
    assert!(v["result"]["xi_star"].as_f64().unwrap() > 0.5);
}

#[test]
fn insertion_fixture_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let rep = dir.path().join("ins.json");
    let o = run(&[
        "insertion",
        "--scenario",
        fixture("insertion.cfg").to_str().unwrap(),
        "--report",
        rep.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("step,t_s,x_mm,y_mm,z_mm,Fx_N,Fy_N,Fz_N,stage\n"));
    for stage in ["linear", "spiral", "rotation"] {
        assert!(text.contains(&format!(",{stage}\n")), "missing {stage}");
    }
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(rep).unwrap()).unwrap();
    assert_eq!(v["analysis"], "insertion");
    assert_eq!(v["result"]["insertion"]["success"], true);
}

#[test]
fn cam_polyline_matches_csv() {
    let dir = tempfile::tempdir().unwrap();
    let poly = dir.path().join("p.txt");
    let o = run(&["cam", "--samples", "7", "--polyline", poly.to_str().unwrap()]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    let pts: Vec<Vec<f64>> = std::fs::read_to_string(poly)
        .unwrap()
        .lines()
        .map(|l| l.split_whitespace().map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 7);
    for (r, p) in rows.iter().zip(&pts) {
        assert_eq!(&r[3..5], &p[..]);
    }
}

#[test]
fn stability_grid_and_layout() {
    let dir = tempfile::tempdir().unwrap();
    let layout = dir.path().join("layout.json");
    let o = run(&["stability", "--r-sprt", "8,12", "--alpha", "25:55:10", "--layout", layout.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("alpha_deg,r_sprt_mm,Q\n"));
    assert_eq!(text.lines().count(), 1 + 8);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(layout).unwrap()).unwrap();
    assert_eq!(v["contacts"].as_array().unwrap().len(), 6);
}

#[test]
fn angle_report_compares_against_measured_time() {
    let dir = tempfile::tempdir().unwrap();
    let rep = dir.path().join("a.json");
    let o = run(&["angle", "--duration", "2", "--report", rep.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("t_s,delta_out_deg,phase\n"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(rep).unwrap()).unwrap();
    assert_eq!(v["result"]["measured_time_to_360_s"], 5.8);
    assert!(v["result"]["ideal_time_to_target_s"].as_f64().unwrap() > 0.0);
}
