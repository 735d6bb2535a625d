use std::process::{Command, Output};

fn finsler(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_finsler")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(o: &Output) -> (Vec<String>, Vec<Vec<String>>) {
    let text = stdout(o);
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn column(o: &Output, name: &str) -> Vec<f64> {
    let (header, rows) = csv_rows(o);
    let j = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[j].parse().unwrap()).collect()
}

#[test]
fn euclidean_ricci_column_is_zero() {
    let o = finsler(&["curvature", "--metric", "euclidean", "--points", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let ric = column(&o, "Ric");
    assert_eq!(ric.len(), 5);
    assert!(ric.iter().all(|r| *r == 0.0));
}

#[test]
fn klein_ricci_is_minus_f_squared() {
    let o = finsler(&["curvature", "--metric", "klein", "--points", "10", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    for (r, f) in column(&o, "Ric").iter().zip(column(&o, "F")) {
        assert!((r + f * f).abs() <= 1e-8 * f * f, "{r} {f}");
    }
}

#[test]
fn sphere_has_no_negative_ricci_spray() {
    let o = finsler(&["curvature", "--metric", "sphere", "--theorem3"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not negative-definite"));
}

#[test]
fn csv_floats_round_trip() {
    let o = finsler(&["geodesic", "--metric", "klein", "--s-max", "0.5", "--step", "0.01"]);
    let (header, rows) = csv_rows(&o);
    assert_eq!(header, ["s", "x1", "x2", "v1", "v2", "Q"]);
    assert_eq!(rows.len(), 51);
    for cell in &rows[17] {
        let v: f64 = cell.parse().unwrap();
        assert_eq!(&format!("{v:.16e}"), cell);
    }
}

#[test]
fn euclidean_geodesic_is_a_line() {
    let o = finsler(&["geodesic", "--metric", "euclidean", "--s-max", "2", "--step", "0.01"]);
    for (s, x) in column(&o, "s").iter().zip(column(&o, "x1")) {
        assert!((s - x).abs() <= 1e-10);
    }
    assert!(column(&o, "x2").iter().all(|x| x.abs() <= 1e-10));
}

#[test]
fn klein_geodesic_through_origin_has_artanh_distance() {
    let o = finsler(&["geodesic", "--metric", "klein", "--direction", "0.6,0.8", "--s-max", "2", "--step", "0.001"]);
    let (x1, x2) = (column(&o, "x1"), column(&o, "x2"));
    for (i, s) in column(&o, "s").iter().enumerate().step_by(250) {
        let r = x1[i].hypot(x2[i]);
        assert!((r.atanh() - s).abs() <= 1e-8, "{s}");
        assert!((0.8 * x1[i] - 0.6 * x2[i]).abs() <= 1e-8);
    }
}

#[test]
fn projparam_on_flat_space_is_arc_length() {
    let o = finsler(&["projparam", "--metric", "euclidean", "--s-max", "3", "--step", "0.01"]);
    assert_eq!(o.status.code(), Some(0));
    for (s, p) in column(&o, "s").iter().zip(column(&o, "p")) {
        assert!((s - p).abs() <= 1e-12);
    }
}

#[test]
fn projparam_json_reports_sphere_poles() {
    let o = finsler(&["projparam", "--metric", "sphere", "--s-max", "3", "--step", "0.005", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let poles = v["poles"].as_array().unwrap();
    assert_eq!(poles.len(), 1);
    assert!((poles[0].as_f64().unwrap() - std::f64::consts::FRAC_PI_2).abs() <= 1e-6);
}

#[test]
fn oscillation_verdicts() {
    let sphere = finsler(&["oscillation", "--metric", "sphere", "--s-max", "3", "--s-back", "3", "--step", "0.005"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&sphere)).unwrap();
    assert_eq!(v["minus"]["verdict"], "Oscillatory");
    assert_eq!(v["plus"]["verdict"], "Oscillatory");
    assert_eq!(v["cover"]["intervals"].as_array().unwrap().len(), 3);

    let klein = finsler(&["oscillation", "--metric", "klein", "--s-max", "4", "--s-back", "4", "--step", "0.005"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&klein)).unwrap();
    assert_eq!(v["plus"]["verdict"], "Nonoscillatory");
    assert_eq!(v["cover"]["intervals"].as_array().unwrap().len(), 1);

    let flat = finsler(&["oscillation", "--metric", "euclidean", "--s-max", "4", "--window", "-30,30"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&flat)).unwrap();
    assert_eq!(v["minus"]["verdict"], "Nonoscillatory");
    assert_eq!(v["minus"]["window"][0], -30.0);
}

#[test]
fn pseudodist_reports_both_directions() {
    let o = finsler(&["pseudodist", "--metric", "funk", "--from", "0.1,0", "--to", "-0.2,0.3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for dir in ["forward", "backward"] {
        assert!(v[dir]["upper_bound"].as_f64().unwrap() > 0.0);
        assert!(v[dir]["budget_used"]["n_max"].is_u64());
    }
    assert_eq!(v["forward"]["x"], v["backward"]["y"]);
}

#[test]
fn euclidean_pseudodist_is_small() {
    let o = finsler(&["pseudodist", "--metric", "euclidean", "--from", "0,0", "--to", "1,2", "--format", "csv"]);
    let ub = column(&o, "upper_bound");
    assert_eq!(ub.len(), 2);
    assert!(ub.iter().all(|u| *u <= 1e-2));
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let o = finsler(&[
            "curvature", "--metric", "randers", "--points", "20", "--seed", "11", "--out", path.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        assert!(o.stdout.is_empty());
        std::fs::read(path).unwrap()
    };
    let (a, b) = (run("a.csv"), run("b.csv"));
    assert_eq!(a, b);
    let other = finsler(&["curvature", "--metric", "randers", "--points", "20", "--seed", "12"]);
    assert_ne!(a, other.stdout);
}

#[test]
fn metric_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    std::fs::write(&path, r#"{"name": "sphere", "dim": 3, "params": {"radius": 2.0}}"#).unwrap();
    let o = finsler(&["curvature", "--metric", path.to_str().unwrap(), "--points", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let (header, _) = csv_rows(&o);
    assert!(header.contains(&"x3".to_string()));
    // K = 1/4 in dimension 3: Ric = 2 K F^2
    for (r, f) in column(&o, "Ric").iter().zip(column(&o, "F")) {
        assert!((r - 0.5 * f * f).abs() <= 1e-8 * f * f);
    }
}

#[test]
fn verify_exit_codes() {
    let good = finsler(&["verify", "--metric", "klein"]);
    assert_eq!(good.status.code(), Some(0));
    let bad = finsler(&["verify", "--metric", r#"{"name": "randers", "params": {"eps": 2.0}}"#]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("strong convexity,NaN"));
    let config = finsler(&["verify", "--metric", r#"{"name": "klein", "colour": 1}"#]);
    assert_eq!(config.status.code(), Some(2));
}

#[test]
fn verify_zoo_passes() {
    let o = finsler(&["verify", "--zoo", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn config_errors_exit_two() {
    for args in [
        vec!["geodesic", "--metric", "hyperbolic"],
        vec!["geodesic", "--metric", "klein", "--point", "0,0,0"],
        vec!["geodesic", "--metric", "klein", "--step", "-1"],
        vec!["curvature", "--metric", "klein", "--dim", "9"],
        vec!["pseudodist", "--metric", "klein", "--from", "0,0", "--to", "0.1,0", "--k", "0"],
        vec!["oscillation", "--window", "3,1"],
        vec!["projparam", "--anchor", "99"],
        vec!["curvature", "--format", "xml"],
        vec!["frobnicate"],
    ] {
        assert_eq!(finsler(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn domain_errors_exit_three() {
    let o = finsler(&["geodesic", "--metric", "klein", "--point", "1.5,0"]);
    assert_eq!(o.status.code(), Some(3));
    let o = finsler(&["pseudodist", "--metric", "funk", "--from", "0,0", "--to", "3,0"]);
    assert_eq!(o.status.code(), Some(3));
}
