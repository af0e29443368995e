use std::path::Path;
use std::process::{Command, Output};

use yamabe_core::analysis::{AsymptoticReport, Status};
use yamabe_core::export::{self, GeometryTable, ProfileMeta};
use yamabe_core::geometry;
use yamabe_core::sweep::SweepRow;

fn yamabe(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_yamabe"))
        .args(args)
        .env_remove("YAMABE_OUT_DIR")
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn solve_then_geometry_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let o = yamabe(
        &["solve", "--n", "3", "--beta", "1", "--rho", "1", "--r-max", "200"],
        dir.path(),
    );
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).starts_with("solve: Global"));

    let prof = export::read_profile(&dir.path().join("profile.csv"), &dir.path().join("profile.json")).unwrap();
    let meta: ProfileMeta = export::read_json(&dir.path().join("profile.json")).unwrap();
    assert_eq!(meta.grid_points, prof.len());
    assert_eq!(prof.r_last(), 200.0);

    let o = yamabe(
        &["geometry", "--n", "3", "--beta", "1", "--rho", "1", "--r-max", "200"],
        dir.path(),
    );
    assert!(o.status.success(), "{o:?}");
    let exported = export::read_geometry_csv(&dir.path().join("geometry.csv")).unwrap();
    let recomputed = GeometryTable::from(&geometry::geometry(&prof).unwrap());
    assert!(exported.max_rel_diff(&recomputed) < 1e-12);
}

#[test]
fn stitched_geometry_reaches_r_max() {
    let dir = tempfile::tempdir().unwrap();
    let o = yamabe(
        &[
            "geometry", "--n", "3", "--beta", "3", "--rho", "1", "--r-max", "1e4", "--format", "csv",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{o:?}");
    let t = export::read_geometry_csv(&dir.path().join("geometry.csv")).unwrap();
    assert!((t.r.last().unwrap() - 1e4).abs() < 1e-6);
    assert!(!dir.path().join("geometry.json").exists());
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let pass = yamabe(&["verify", "--n", "3", "--beta", "3", "--rho", "1"], dir.path());
    assert_eq!(pass.status.code(), Some(0), "{}", stdout(&pass));
    let report: AsymptoticReport = export::read_json(&dir.path().join("report.json")).unwrap();
    assert_eq!(report.overall, Status::Pass);

    // underdamped approach to the limit: invariants fail
    let fail = yamabe(&["verify", "--n", "5", "--beta", "1", "--rho", "1"], dir.path());
    assert_eq!(fail.status.code(), Some(1), "{}", stdout(&fail));
    assert!(stdout(&fail).contains("psi_s_range"));

    let refused = yamabe(&["verify", "--n", "3", "--beta", "1", "--rho", "1"], dir.path());
    assert_eq!(refused.status.code(), Some(2));
}

#[test]
fn config_file_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "n = 3\nbeta = 1.0\nrho = -1.0\nr_max = 50.0\nformats = [\"json\"]\n",
    )
    .unwrap();
    let o = yamabe(
        &["solve", "--config", cfg.to_str().unwrap(), "--r-max", "20"],
        dir.path(),
    );
    assert!(o.status.success(), "{o:?}");
    let meta: ProfileMeta = export::read_json(&dir.path().join("profile.json")).unwrap();
    assert_eq!(meta.params.alpha, 1.25);
    assert_eq!(meta.status.radius(), 20.0);
    assert!(!dir.path().join("profile.csv").exists());

    std::fs::write(&cfg, "n = 3\nbetta = 1.0\n").unwrap();
    let bad = yamabe(&["solve", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("betta"));
}

#[test]
fn output_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_yamabe"))
        .args(["solve", "--n", "3", "--beta", "1", "--rho", "0", "--r-max", "10"])
        .env("YAMABE_OUT_DIR", dir.path().join("env"))
        .output()
        .unwrap();
    assert!(o.status.success(), "{o:?}");
    assert!(dir.path().join("env/profile.csv").exists());
}

#[test]
fn certify_blowup_reports_bound() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "certify-blowup",
        "--n",
        "3",
        "--m",
        "0.2",
        "--alpha",
        "-4",
        "--beta",
        "-1",
    ];
    let o = yamabe(&args, dir.path());
    assert!(o.status.success(), "{o:?}");
    let line = stdout(&o);
    assert!(line.contains("Case1") && line.contains("within bound"), "{line}");
    let v: serde_json::Value = export::read_json(&dir.path().join("certificate.json")).unwrap();
    assert!((v["certificate"]["radius_bound"].as_f64().unwrap() - 5f64.sqrt()).abs() < 1e-12);

    let not_regime = yamabe(&["certify-blowup", "--n", "3", "--beta", "1", "--rho", "1"], dir.path());
    assert_eq!(not_regime.status.code(), Some(2));
}

#[test]
fn selfsim_backward_and_study() {
    let dir = tempfile::tempdir().unwrap();
    // alpha (1-m) = 2 beta + 1
    let o = yamabe(
        &[
            "selfsim",
            "--n",
            "3",
            "--m",
            "0.2",
            "--beta",
            "1",
            "--alpha",
            "3.75",
            "--kind",
            "backward",
            "--T",
            "2",
            "--t",
            "1",
            "--x",
            "0.5,1,1.5",
            "--study",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{o:?}");
    let v: serde_json::Value = export::read_json(&dir.path().join("selfsim.json")).unwrap();
    assert_eq!(v["u"].as_array().unwrap().len(), 3);
    assert!(v["study"]["max_residual"].as_f64().unwrap() < 1e-5);

    let wrong = yamabe(
        &[
            "selfsim", "--n", "3", "--m", "0.2", "--beta", "1", "--alpha", "1", "--kind", "forward",
        ],
        dir.path(),
    );
    assert_eq!(wrong.status.code(), Some(2));
}

#[test]
fn sweep_writes_one_row_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let o = yamabe(
        &["sweep", "--n", "3", "--beta", "3,4", "--rho", "1", "--jobs", "2"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let rows: Vec<SweepRow> = export::read_json(&dir.path().join("sweep.json")).unwrap();
    assert_eq!(rows.len(), 2);
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);

    let grid = dir.path().join("grid.toml");
    std::fs::write(&grid, "n = 3\nm = 0.2\nbeta = -1.0\nalpha = [-1.0, -4.0]\n").unwrap();
    let o = yamabe(&["sweep", "--config", grid.to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).contains("BlowUp=2"));
}
