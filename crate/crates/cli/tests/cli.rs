use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use softwg_cli::RunConfig;
use tempfile::TempDir;

fn write_config(dir: &TempDir, name: &str, json: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, json).unwrap();
    path
}

fn softwg(config: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_softwg"))
        .arg(config)
        .args(args)
        .env_remove("SOFTWG_THREADS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const SMALL_SPECTRUM: &str = r#"{
    "geometry": {"R": 4, "theta": THETA, "a": 0.5},
    "profile": {"kind": "square_well", "V0": 2},
    "grid": {"h": 0.25, "box": [-6, 6, -4, 6], "refinement_levels": 2},
    "solver": {"k": 2, "tol": TOL, "seed": 7},
    "theta_list": [0.5, 1.5, 2.5, 3.0]
}"#;

fn small(theta: &str, tol: &str) -> String {
    SMALL_SPECTRUM.replace("THETA", theta).replace("TOL", tol)
}

#[test]
fn config_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let bad = write_config(
        &dir,
        "bad.json",
        r#"{"geometry": {"R": 4, "theta": 1, "a": 0.5}, "profile": {"kind": "delta", "alpha": -1}, "typo": 1}"#,
    );
    let o = softwg(&bad, &["--experiment", "transverse"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("typo"));
    assert!(o.stdout.is_empty());

    let o = softwg(&dir.path().join("missing.json"), &["--experiment", "transverse"]);
    assert_eq!(o.status.code(), Some(2));

    let empty = small("1", "1e-3").replace("[0.5, 1.5, 2.5, 3.0]", "[]");
    let empty = write_config(&dir, "sweep.json", &empty);
    assert_eq!(softwg(&empty, &["--experiment", "sweep"]).status.code(), Some(2));
}

#[test]
fn solver_failure_exits_3() {
    let dir = TempDir::new().unwrap();
    // the squeezed delta well (width 4h) would reach the arc centre
    let cfg = write_config(
        &dir,
        "c.json",
        r#"{"geometry": {"R": 4, "theta": 1, "a": 0.5}, "profile": {"kind": "delta", "alpha": -1},
            "grid": {"h": 1, "box": [-8, 8, -4, 8], "refinement_levels": 2}}"#,
    );
    let o = softwg(&cfg, &["--experiment", "spectrum"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn transverse_json_and_resolved_config() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "t.json",
        r#"{"geometry": {"R": 4, "theta": 1.5707963267948966, "a": 0.5},
            "profile": {"kind": "delta", "alpha": -1}}"#,
    );
    let o = softwg(&cfg, &["--experiment", "transverse", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["E1"].as_f64(), Some(-0.25));
    assert_eq!(v["double_wells"].as_array().unwrap().len(), 3);
    let slope = v["gap_slope"].as_f64().unwrap();
    assert!((slope + 1.0).abs() < 0.1);

    let resolved_text = v["resolved_config"].to_string();
    let resolved = RunConfig::from_json(&resolved_text).unwrap();
    assert!(resolved.grid.bbox.is_some());
    assert_eq!(RunConfig::from_json(&resolved.to_json()).unwrap(), resolved);

    // feeding the resolved block back reproduces the report
    let again = write_config(&dir, "r.json", &resolved_text);
    let o2 = softwg(&again, &["--experiment", "transverse", "--format", "json"]);
    assert_eq!(o.stdout, o2.stdout);
}

#[test]
fn variational_csv_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "v.json",
        r#"{"geometry": {"R": 4, "theta": 1.5707963267948966, "a": 0.5},
            "profile": {"kind": "delta", "alpha": -1}, "n_list": [100, 400, 1600]}"#,
    );
    let out = dir.path().join("v.csv");
    let o = softwg(
        &cfg,
        &["--experiment", "variational", "--format", "csv", "--threads", "1", "--out"],
    );
    assert_eq!(o.status.code(), Some(2), "--out needs a value");
    let o = softwg(
        &cfg,
        &[
            "--experiment",
            "variational",
            "--format",
            "csv",
            "--threads",
            "1",
            "--out",
            out.to_str().unwrap(),
        ],
    );
    assert!(o.status.success());
    let first = std::fs::read_to_string(&out).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_softwg"))
        .arg(&cfg)
        .args(["--experiment", "variational", "--format", "csv"])
        .env("SOFTWG_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(stdout(&o), first);
    let lines: Vec<&str> = first.lines().collect();
    assert_eq!(
        lines[0],
        "n,q1,q2_int,q2_ext,total,bracket_q2_int,bracket_q2_ext,bracket_total,limit,certificate_n0,certificate_value"
    );
    assert_eq!(lines.len(), 4);
    let cols: Vec<&str> = lines[3].split(',').collect();
    assert_eq!(cols[0], "1600");
    assert_eq!(cols[9], "1024");
    assert!(cols[8].starts_with("-9.8264243"));
}

#[test]
fn variational_edge_angles() {
    let dir = TempDir::new().unwrap();
    let base = r#"{"geometry": {"R": 4, "theta": THETA, "a": 0.5},
        "profile": {"kind": "square_well", "V0": 2}, "n_list": [8, 64]}"#;
    let folded = write_config(&dir, "pi.json", &base.replace("THETA", "3.141592653589793"));
    let o = softwg(&folded, &["--experiment", "variational"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["limit"]["value"].is_null());
    assert_eq!(v["limit"]["label"], "-inf (divergent ext term)");
    let ext: Vec<f64> = v["forms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["q2_ext"].as_f64().unwrap())
        .collect();
    assert!(ext[1] < 4.0 * ext[0]);

    let straight = write_config(&dir, "zero.json", &base.replace("THETA", "0"));
    let o = softwg(&straight, &["--experiment", "variational"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["certificate"]["label"], "no certificate (straight)");
    assert_eq!(v["limit"]["value"].as_f64(), Some(0.0));
    for f in v["forms"].as_array().unwrap() {
        assert_eq!(f["bracket_q2_int"].as_f64(), Some(0.0));
        assert_eq!(f["bracket_q2_ext"].as_f64(), Some(0.0));
        assert_eq!(f["q2_int"].as_f64(), Some(0.0));
        // transverse energy integral over a length ~n, zero up to rounding
        let n = f["n"].as_f64().unwrap();
        assert!(f["q2_ext"].as_f64().unwrap().abs() <= 1e-13 * n);
    }
}

#[test]
fn spectrum_not_converged_exits_4_with_report() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "s.json", &small("1.5707963267948966", "1e-12"));
    let out = dir.path().join("s.json.out");
    let o = softwg(&cfg, &["--experiment", "spectrum", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["converged"], false);
    assert_eq!(v["levels"].as_array().unwrap().len(), 2);
    assert_eq!(v["levels"][1]["dim"], 95 * 79);

    let loose = write_config(&dir, "l.json", &small("1.5707963267948966", "1"));
    let o = softwg(&loose, &["--experiment", "spectrum", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("index,lambda,lambda_coarse,lambda_fine,disagreement,margin,binding,threshold")
    );
    assert_eq!(lines.count(), 2);
}

#[test]
fn sweep_rows_in_input_order() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "w.json", &small("1", "1"));
    let one = softwg(&cfg, &["--experiment", "sweep", "--format", "csv", "--threads", "1"]);
    let four = softwg(&cfg, &["--experiment", "sweep", "--format", "csv", "--threads", "4"]);
    assert!(one.status.success(), "{}", String::from_utf8_lossy(&one.stderr));
    assert_eq!(one.stdout, four.stdout);
    let text = stdout(&one);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "theta,E1,threshold,lambda_1,lambda_2,binding_count,variational_limit,certificate_n0,errors"
    );
    assert_eq!(lines.len(), 5);
    let thetas: Vec<f64> = lines[1..]
        .iter()
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(thetas, vec![0.5, 1.5, 2.5, 3.0]);
    for l in &lines[1..] {
        let cols: Vec<&str> = l.split(',').collect();
        assert!(cols[6].parse::<f64>().unwrap() < 0.0);
        assert_eq!(cols[8], "");
    }
}

#[test]
fn matrix_dump_format() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "m.json", &small("1", "1"));
    let path = dir.path().join("a.coo");
    let o = softwg(
        &cfg,
        &["--experiment", "transverse", "--dump-matrix", path.to_str().unwrap()],
    );
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    let header: Vec<usize> = lines
        .next()
        .unwrap()
        .split_whitespace()
        .map(|t| t.parse().unwrap())
        .collect();
    let (nx, ny) = (47, 39);
    assert_eq!(header, vec![nx * ny, 5 * nx * ny - 2 * nx - 2 * ny]);
    assert_eq!(lines.count(), header[1]);
}
