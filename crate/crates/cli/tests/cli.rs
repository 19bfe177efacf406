use std::path::PathBuf;
use std::process::{Command, Output};

fn phasekit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phasekit"))
        .args(args)
        .env_remove("PHASEKIT_TOL_OVERRIDE")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name)
}

#[test]
fn build_schema() {
    let o = phasekit(&[
        "build", "--sector", "plus", "--kernel", "absphi", "--dim", "64",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines = data_lines(&text);
    assert_eq!(lines[0], "kind,i,j,re,im");
    assert_eq!(
        lines.iter().filter(|l| l.starts_with("entry,")).count(),
        64 * 64
    );
    assert_eq!(
        lines
            .iter()
            .filter(|l| l.starts_with("eigenvalue,"))
            .count(),
        64
    );
    assert!(text.contains("# tool: phasekit "));
    assert!(text.contains("# tol.hermiticity: 1e-12"));
    assert!(text.contains("# param.dim: 64"));
}

#[test]
fn minus_cos_phase_cancels() {
    let o = phasekit(&[
        "build",
        "--sector",
        "minus",
        "--kernel",
        "cosphi",
        "--dim",
        "2",
        "--no-meta",
    ]);
    assert_eq!(o.status.code(), Some(0));
    for line in data_lines(&stdout(&o)).iter().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells[3].parse::<f64>().unwrap(), 0.0, "{line}");
    }
}

#[test]
fn plus_cos_phase_corner() {
    let o = phasekit(&["build", "--kernel", "cosphi", "--dim", "3", "--no-meta"]);
    let text = stdout(&o);
    let row = text.lines().find(|l| l.starts_with("entry,0,1,")).unwrap();
    let re: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
    assert!((re - 2f64.sqrt() / 2.0).abs() < 1e-15);
}

#[test]
fn series_kernels() {
    let o = phasekit(&[
        "build",
        "--kernel",
        "series",
        "--coeffs",
        "1",
        "--dim",
        "4",
        "--no-meta",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("eigenvalue,3,3,1.0000000000000000e0"));
    assert_eq!(
        phasekit(&["build", "--kernel", "series", "--dim", "4"])
            .status
            .code(),
        Some(2)
    );
    let o = phasekit(&[
        "build",
        "--kernel",
        "absphi-series",
        "--cutoff",
        "99",
        "--dim",
        "8",
    ]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["build", "--dim", "0"][..],
        &["build"],
        &["build", "--dim", "4", "--sector", "sideways"],
        &["coherent-scan", "--theta", "1:x", "--nbar", "4"],
        &["coherent-scan", "--theta", "", "--nbar", "4"],
        &["coherent-scan", "--theta", "1", "--nbar", "-1"],
        &["check", "everything"],
        &["build", "--dim", "4", "--tol", "hermiticity=0"],
        &["nonsense"],
    ] {
        assert_eq!(phasekit(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn one_point_scan() {
    let o = phasekit(&[
        "coherent-scan",
        "--theta",
        "0.5",
        "--nbar",
        "16",
        "--no-meta",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines = data_lines(&text);
    assert_eq!(lines.len(), 2);
    assert_eq!(
        lines[0],
        "theta,nbar,sector,dim,expect,abs_theta,fourier_ref,deviation"
    );
}

#[test]
fn scan_grid_order_and_both_sectors() {
    let o = phasekit(&[
        "coherent-scan",
        "--theta",
        "0.5:1.5:3",
        "--nbar",
        "4,9",
        "--sector",
        "both",
        "--no-meta",
    ]);
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = data_lines(&text)
        .iter()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(rows.len(), 12);
    assert_eq!(rows[0][2], "plus");
    assert_eq!(rows[6][2], "minus");
    let thetas: Vec<f64> = rows[..6].iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(thetas, [0.5, 0.5, 1.0, 1.0, 1.5, 1.5]);
}

#[test]
fn truncation_failure_names_minimal_dim() {
    let o = phasekit(&[
        "coherent-scan",
        "--theta",
        "1",
        "--nbar",
        "400",
        "--dim",
        "300",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("minimal admissible dim is"), "{err}");
}

#[test]
fn checks_pass() {
    for which in ["rotator", "boundary", "commutators"] {
        let o = phasekit(&["check", which]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{which}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert!(stdout(&o).contains("# verdict: pass"));
    }
    let o = phasekit(&["check", "oracle", "--max-index", "8"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn tightened_tolerance_fails_check_and_lists_cases() {
    let o = phasekit(&["check", "boundary", "--tol", "boundary_residual=1e-30"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("check(s) failed"), "{err}");
    // The residual table is still written.
    assert!(stdout(&o).contains("# verdict: fail"));
}

#[test]
fn env_override_is_honoured_and_flags_win() {
    let run = |env: &str, extra: &[&str]| {
        let mut args = vec!["build", "--dim", "2"];
        args.extend_from_slice(extra);
        let o = Command::new(env!("CARGO_BIN_EXE_phasekit"))
            .args(&args)
            .env("PHASEKIT_TOL_OVERRIDE", env)
            .output()
            .unwrap();
        (o.status.code(), String::from_utf8(o.stdout).unwrap())
    };
    let (code, out) = run("hermiticity=1e-8,spectrum_slack=1e-6", &[]);
    assert_eq!(code, Some(0));
    assert!(out.contains("# tol.hermiticity: 1e-8"));
    assert!(out.contains("# tol.spectrum_slack: 1e-6"));
    let (_, out) = run("hermiticity=1e-8", &["--tol", "hermiticity=1e-7"]);
    assert!(out.contains("# tol.hermiticity: 1e-7"));
    assert_eq!(run("bogus=1", &[]).0, Some(2));
}

#[test]
fn config_file_with_flag_precedence() {
    let path = scratch("run.conf");
    std::fs::write(
        &path,
        "# example\nsector = minus\nkernel=cosphi\ndim=3\ntol.hermiticity=1e-9\n",
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let o = phasekit(&["build", "--config", p]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("# param.sector: minus"));
    assert!(text.contains("# param.dim: 3"));
    assert!(text.contains("# tol.hermiticity: 1e-9"));
    let text = stdout(&phasekit(&[
        "build", "--config", p, "--dim", "5", "--sector", "plus",
    ]));
    assert!(text.contains("# param.sector: plus"));
    assert!(text.contains("# param.dim: 5"));

    std::fs::write(&path, "colour=blue\n").unwrap();
    assert_eq!(
        phasekit(&["build", "--config", p, "--dim", "2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn json_mirrors_csv_numbers() {
    let o = phasekit(&["build", "--dim", "3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["meta"]["param.dim"], "3");
    let csv = stdout(&phasekit(&["build", "--dim", "3", "--no-meta"]));
    let rows = v["rows"].as_array().unwrap();
    for (row, line) in rows.iter().zip(data_lines(&csv).iter().skip(1)) {
        let re = line.split(',').nth(3).unwrap();
        assert_eq!(row["re"]["repr"], re);
        assert_eq!(
            row["re"]["value"].as_f64().unwrap(),
            re.parse::<f64>().unwrap()
        );
    }
    let o = phasekit(&["build", "--dim", "3", "--format", "json", "--no-meta"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v.get("meta").is_none());
}

#[test]
fn identical_invocations_are_byte_identical() {
    let args = [
        "coherent-scan",
        "--theta",
        "0.3,1.2",
        "--nbar",
        "25,50",
        "--sector",
        "both",
    ];
    assert_eq!(phasekit(&args).stdout, phasekit(&args).stdout);
    let path = scratch("out.csv");
    let o = phasekit(&["build", "--dim", "5", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(
        std::fs::read(&path).unwrap(),
        phasekit(&["build", "--dim", "5"]).stdout
    );
}

#[test]
fn help_documents_columns() {
    let o = phasekit(&["build", "--help"]);
    assert!(stdout(&o).contains("kind,i,j,re,im"));
    let o = phasekit(&["coherent-scan", "--help"]);
    assert!(stdout(&o).contains("theta,nbar,sector,dim,expect,abs_theta,fourier_ref,deviation"));
}
