use std::path::Path;
use std::process::{Command, Output};

use chemotaxis_core::config::preset;
use chemotaxis_core::run::{parse_status_line, read_csv, RunStatus, CSV_FILE, STATUS_FILE};

fn chemotaxis(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chemotaxis"))
        .args(args)
        .current_dir(cwd)
        .env_remove("CHEMOTAXIS_OUT")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn check_base_scenario_prints_witness() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("base.txt"), "params.m = 1\n").unwrap();
    let out = chemotaxis(&["check", "base.txt"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for line in [
        "theorem_regime = true",
        "witness.p = 3",
        "witness.eta = 1",
        "witness.sigma1 = 4",
        "witness.sigma2 = 4",
        "witness.sigma3 = -1",
        "witness.sigma4 = -1",
        "witness.kappa = 1",
    ] {
        assert!(text.lines().any(|l| l == line), "missing '{line}' in\n{text}");
    }
}

#[test]
fn check_rejects_k1_in_theorem_scenario() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.txt"), "scenario = theorem\nparams.k1 = 0.5\n").unwrap();
    let out = chemotaxis(&["check", "bad.txt"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("k1 > 1"));
}

#[test]
fn unknown_keys_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.txt"), "params.mm = 1\n").unwrap();
    let out = chemotaxis(&["run", "bad.txt"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("params.mm"));
}

#[test]
fn equilibrium_run_is_flat() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = preset("equilibrium").unwrap();
    cfg.record_stride = 50;
    std::fs::write(dir.path().join("eq.txt"), cfg.to_text()).unwrap();
    let out = chemotaxis(&["run", "eq.txt", "--out", "eq_out"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = read_csv(&dir.path().join("eq_out").join(CSV_FILE)).unwrap();
    assert!(rows.len() > 10);
    let first = &rows[0];
    for r in &rows {
        for (a, b) in [
            (r.mass_u, first.mass_u),
            (r.linf_u, first.linf_u),
            (r.lp_u, first.lp_u),
            (r.min_v, first.min_v),
            (r.min_w, first.min_w),
            (r.l2_v, first.l2_v),
            (r.l2_w, first.l2_w),
            (r.y, first.y),
        ] {
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{a} vs {b}");
        }
    }
    let status = std::fs::read_to_string(dir.path().join("eq_out").join(STATUS_FILE)).unwrap();
    assert_eq!(parse_status_line(&status).map(|s| s.0), Some(RunStatus::Ok));
}

#[test]
fn default_output_root_from_env() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = preset("equilibrium").unwrap();
    cfg.grid.nx = 16;
    cfg.horizon = 0.01;
    std::fs::write(dir.path().join("small.txt"), cfg.to_text()).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_chemotaxis"))
        .args(["run", "small.txt"])
        .current_dir(dir.path())
        .env("CHEMOTAXIS_OUT", dir.path().join("root"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("root/small").join(CSV_FILE).exists());
}

#[test]
fn plot_writes_svg() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = preset("boundedness").unwrap();
    cfg.grid.nx = 32;
    cfg.horizon = 0.02;
    cfg.record_stride = 5;
    std::fs::write(dir.path().join("b.txt"), cfg.to_text()).unwrap();
    assert_eq!(chemotaxis(&["run", "b.txt", "--out", "b"], dir.path()).status.code(), Some(0));
    let out = chemotaxis(&["plot", "b"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let svg = std::fs::read_to_string(dir.path().join("b/diagnostics.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.matches("<path").count() == 3);
}

#[test]
fn sweep_writes_summary() {
    let dir = tempfile::tempdir().unwrap();
    let text = "grid.nx = 16\ntime.horizon = 0.005\nsweep.axis.params.chi0 = 1, 2, 4\nsweep.parallelism = 2\n";
    std::fs::write(dir.path().join("s.txt"), text).unwrap();
    let out = chemotaxis(&["sweep", "s.txt", "--out", "s"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = std::fs::read_to_string(dir.path().join("s/summary.csv")).unwrap();
    let lines: Vec<&str> = summary.lines().collect();
    assert_eq!(lines[0], "point,params.chi0,status,t_final,final_linf_u,sup_y");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("0,1,ok,0.005,"));
}

#[test]
fn preset_round_trips_through_cli() {
    let dir = tempfile::tempdir().unwrap();
    let out = chemotaxis(&["preset", "contrast"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), preset("contrast").unwrap().to_text());
    assert_eq!(chemotaxis(&["preset", "nope"], dir.path()).status.code(), Some(1));
}
