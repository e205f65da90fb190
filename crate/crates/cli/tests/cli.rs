use std::fs;
use std::process::{Command, Output};

use boxaffine_cli::report::{hashed_region, validate_report};

const BIN: &str = env!("CARGO_BIN_EXE_boxaffine");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn energies(report: &str) -> Vec<f64> {
    validate_report(report).unwrap().content.levels.iter().map(|l| l.energy).collect()
}

#[test]
fn cq_box_ground_level() {
    let o = run(&["spectrum", "--model", "cq-box", "--b", "1", "--hbar", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let e = energies(&stdout(&o));
    assert!((e[0] - 2.4674011).abs() < 1e-7);
}

#[test]
fn aq_box_methods_agree() {
    let o = run(&["spectrum", "--model", "aq-box", "--method", "both", "--levels", "6"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = validate_report(&stdout(&o)).unwrap();
    let a = r.content.agreement.unwrap();
    assert!(a.passed && a.max_relative_delta <= 1e-6);
    for (k, l) in r.content.levels.iter().enumerate() {
        assert_eq!(l.node_count, k);
        assert!(l.relative_delta.unwrap() <= 1e-6);
        assert_eq!(l.parity.as_deref(), Some(if k % 2 == 0 { "even" } else { "odd" }));
    }
}

#[test]
fn half_ho_levels() {
    let o = run(&["spectrum", "--model", "half-ho", "--levels", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let e = energies(&stdout(&o));
    for (k, v) in e.iter().enumerate() {
        assert!((v - 2.0 * (k as f64 + 1.0)).abs() < 1e-5, "{e:?}");
    }
}

#[test]
fn deterministic_hashed_region() {
    let args = ["spectrum", "--model", "cq-box", "--levels", "4", "--method", "both"];
    let (a, b) = (stdout(&run(&args)), stdout(&run(&args)));
    assert_eq!(hashed_region(&a).unwrap(), hashed_region(&b).unwrap());
    assert_eq!(validate_report(&a).unwrap().digest, validate_report(&b).unwrap().digest);
}

#[test]
fn usage_errors_exit_2() {
    for (args, needle) in [
        (vec!["spectrum", "--b", "-1"], "--b must be a finite number > 0"),
        (vec!["spectrum", "--model", "anti-box"], "anti-box supports only `potential`"),
        (vec!["spectrum", "--model", "wedge"], "possible values"),
        (vec!["spectrum", "--levels", "13"], "--levels"),
        (vec!["spectrum", "--model", "half-ho", "--method", "rayleigh-ritz"], "half-ho"),
        (vec!["convergence", "--model", "anti-box"], "anti-box"),
        (vec!["potential", "--model", "aq-box", "--x-min", "-1", "--x-max", "0"], "singular"),
        (vec!["potential", "--format", "json"], "CSV only"),
        (vec!["spectrum", "--config", "/nonexistent/boxaffine.json"], "--config"),
        (vec!["frobnicate"], "unrecognized subcommand"),
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(stderr(&o).contains(needle), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn disagreement_exits_3() {
    // a tiny basis cannot resolve the sixth level to the agreement threshold
    let o = run(&["spectrum", "--model", "aq-box", "--method", "both", "--basis-size", "6", "--levels", "6"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let r = validate_report(&stdout(&o)).unwrap();
    assert!(!r.content.agreement.unwrap().passed);
    assert!(stderr(&o).contains("disagreement"));
}

#[test]
fn solver_failure_exits_4() {
    // ħ²/b² overflows, which both solvers report as a failure
    for method in ["rayleigh-ritz", "shooting"] {
        let o = run(&["spectrum", "--model", "aq-box", "--b", "1e-200", "--method", method]);
        assert_eq!(o.status.code(), Some(4), "{method}: {}", stderr(&o));
        let module = method.replace('-', "_");
        assert!(stderr(&o).contains(&format!("{module}: InvalidParameter")), "{}", stderr(&o));
    }
}

#[test]
fn potential_csv() {
    let o = run(&["potential", "--model", "aq-box", "--b", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,V,ratio"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 199);
    let mid = rows.iter().find(|r| r[0] == 0.0).expect("x = 0 sampled");
    assert_eq!(mid[1], 1.0);
    let last = rows.last().unwrap();
    assert!((last[2] - 1.0).abs() < 5e-3 && (last[2] - 1.0).abs() < (rows[150][2] - 1.0).abs());

    let o = run(&["potential", "--model", "anti-box", "--W", "1", "--b", "1"]);
    let text = stdout(&o);
    assert!(text.lines().any(|l| l == "2,1.5"), "{text}");
}

#[test]
fn check_derivatives_targets() {
    let o = run(&["check-derivatives", "--target", "toy"]);
    assert_eq!(o.status.code(), Some(0));
    let d = validate_report(&stdout(&o)).unwrap().content.derivatives.unwrap();
    assert_eq!(d.deltas.len(), 1);
    assert_eq!((d.deltas[0].location, d.deltas[0].coefficient), (0.0, 1.0));
    assert!(!d.l2_finite && d.l2_norm_squared.is_none());
    assert!((d.slope + 1.0).abs() < 0.1);

    for n in ["1", "2"] {
        let o = run(&["check-derivatives", "--target", "cq-eigenfunction", "--n", n, "--b", "1"]);
        let d = validate_report(&stdout(&o)).unwrap().content.derivatives.unwrap();
        let locs: Vec<f64> = d.deltas.iter().map(|t| t.location).collect();
        assert_eq!(locs, vec![-1.0, 1.0]);
        assert!(!d.l2_finite);
    }

    let o = run(&["check-derivatives", "--target", "toy", "--format", "csv"]);
    assert_eq!(stdout(&o).lines().count(), 8);
}

#[test]
fn convergence_report() {
    let o = run(&["convergence", "--model", "aq-box", "--levels", "4", "--grid-size", "4001"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let c = validate_report(&stdout(&o)).unwrap().content.convergence.unwrap();
    let rr = c.rayleigh_ritz.unwrap();
    assert_eq!(rr.sizes, vec![8, 16, 24, 32]);
    assert!(rr.nonincreasing);
    assert!(rr.final_relative_change.iter().all(|d| *d <= 1e-8));
    let sh = c.shooting.unwrap();
    assert_eq!(sh.grid_sizes, vec![4001, 8001, 16001]);
    for p in sh.observed_order.iter().flatten() {
        assert!((1.8..=3.0).contains(p), "{p}");
    }
}

#[test]
fn config_file_and_out_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let out = dir.path().join("report.csv");
    fs::write(&cfg, r#"{"model": "cq-box", "levels": 3, "format": "csv", "method": "rayleigh-ritz"}"#).unwrap();
    let o = run(&["spectrum", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--levels", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.starts_with("index,energy"));

    fs::write(&cfg, r#"{"modle": "cq-box"}"#).unwrap();
    let o = run(&["spectrum", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown field"));
}

#[test]
fn help_exits_zero() {
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("spectrum"));
}
