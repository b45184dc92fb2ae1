use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weakderiv")).args(args).output().expect("binary runs")
}

fn f(name: &str) -> String {
    fixture(name).display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn admissible_pair_exits_zero_with_trace() {
    let o = run(&["check", "--mu", &f("delta0.spec"), "--eta", &f("measure_dipole_quadrupole_eta.spec")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("verdict: admissible"), "{s}");
    assert!(s.contains("rule: "), "{s}");
}

#[test]
fn third_derivative_of_point_mass_is_refuted() {
    let o = run(&["check", "--mu", &f("delta0.spec"), "--eta", &f("third_order_eta.spec")]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("verdict: inadmissible"), "{s}");
    assert!(s.contains("counterexample: "), "{s}");
    assert!(!s.contains("none found"), "{s}");
}

#[test]
fn falsify_emits_counterexample_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.csv");
    let o = run(&[
        "falsify",
        "--mu",
        &f("delta0.spec"),
        "--eta",
        &f("third_order_eta.spec"),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let csv = std::fs::read_to_string(&out).unwrap();
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 1);
    let value: f64 = rows[0][5].parse().unwrap();
    assert!(value < 0.0);
}

#[test]
fn missing_file_names_the_path() {
    let o = run(&["check", "--mu", "does/not/exist.spec", "--eta", &f("translate_right_eta.spec")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("does/not/exist.spec"), "{}", stderr(&o));
}

#[test]
fn unknown_config_key_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("bad.conf");
    std::fs::write(&conf, "family = delta\nwobble = 3\n").unwrap();
    let o = run(&["--config", conf.to_str().unwrap(), "deform"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("wobble"), "{}", stderr(&o));
}

#[test]
fn malformed_spec_is_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("bad.spec");
    std::fs::write(&spec, "domain = line\natom = 0, x, 1\n").unwrap();
    let o = run(&["check", "--mu", &f("delta0.spec"), "--eta", spec.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn ladder_is_reported_descending() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.csv");
    let o = run(&[
        "velocity",
        "--mu",
        &f("delta0.spec"),
        "--eta",
        &f("translate_right_eta.spec"),
        "--eps",
        "0.05,0.2,0.1",
        "--stride",
        "1000",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with('#'));
    assert!(csv.lines().any(|l| l == "# eps = 0.2,0.1,0.05"), "{csv}");
}

#[test]
fn translating_point_mass_has_unit_velocity() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.csv");
    let summary = dir.path().join("s.csv");
    let o = run(&[
        "--config",
        &f("translate_velocity.conf"),
        "velocity",
        "--stride",
        "7",
        "--summary",
        summary.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = data_rows(&std::fs::read_to_string(&out).unwrap());
    let mut on_mask = 0;
    for r in &rows {
        let f_eps: f64 = r[2].parse().unwrap();
        let v: f64 = r[4].parse().unwrap();
        if f_eps > 1e-3 {
            assert!((v - 1.0).abs() <= 1e-4, "v = {v} at x = {}", r[1]);
            on_mask += 1;
        }
    }
    assert!(on_mask > 100);
    let summary = data_rows(&std::fs::read_to_string(&summary).unwrap());
    assert_eq!(summary.len(), 5);
}

#[test]
fn csv_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<PathBuf> = (0..2).map(|i| dir.path().join(format!("{i}.csv"))).collect();
    for (p, jobs) in paths.iter().zip(["1", "3"]) {
        let o = run(&[
            "--jobs",
            jobs,
            "--config",
            &f("explicit_k2_deform.conf"),
            "deform",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let a = std::fs::read(&paths[0]).unwrap();
    let b = std::fs::read(&paths[1]).unwrap();
    assert!(a.starts_with(b"#"));
    assert_eq!(a, b);
}

#[test]
fn command_line_overrides_config() {
    let o = run(&["--config", &f("delta_deform.conf"), "deform", "--tol", "0", "--out", "/dev/null"]);
    // tol 0 cannot be met by a numerical estimate
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
}

#[test]
fn cone_outside_direction_prints_certificate() {
    let o = run(&["cone", "--ball", "0,0,1", "--point", "1,0", "--direction", "1,0"]);
    assert_eq!(o.status.code(), Some(1));
    let s = stdout(&o);
    assert!(s.contains("class: Outside"));
    assert!(s.contains("certificate:"));
}

#[test]
fn negative_coordinates_are_values() {
    let o = run(&["cone", "--polytope", &f("square.csv"), "--point", "0,0", "--direction", "-1,0.5"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stdout(&o).contains("class: Outside"));
}

#[test]
fn cone_curve_on_square_corner() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.csv");
    let o = run(&[
        "cone",
        "--polytope",
        &f("square.csv"),
        "--point",
        "0,0",
        "--direction",
        "1,0.5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("class: InTangentCone"));
    let rows = data_rows(&std::fs::read_to_string(&out).unwrap());
    assert!(!rows.is_empty());
    for r in rows {
        assert_eq!(r.len(), 4);
    }
}

#[test]
fn circle_rotation_satisfies_tangent_condition() {
    let o = run(&[
        "fourier",
        "--mu",
        &f("circle_uniform.spec"),
        "--eta",
        &f("circle_rotation_eta.spec"),
        "--n",
        "6",
        "--out",
        "/dev/null",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("toeplitz_psd: true"));
    assert!(s.contains("tangent N=6: satisfied"), "{s}");
}
