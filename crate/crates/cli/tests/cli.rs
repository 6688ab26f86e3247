use std::process::Command;

use oy_lattice_cli::config::{ExperimentConfig, Overrides};
use oy_lattice_cli::registry::lookup;
use oy_lattice_cli::{output, run, CliError};

fn small(name: &str) -> ExperimentConfig {
    let mut c = (lookup(name).unwrap().defaults)();
    match name {
        "static-moments" => {
            c.n_grid = vec![16];
            c.replicas = 4;
            c.samples = 4000;
        }
        "qv-limit" => {
            c.replicas = 6;
            c.horizon = oy_lattice_cli::Horizon::Micro(1.0);
        }
        _ => {}
    }
    c
}

#[test]
fn static_moments_reports_exact_mean() {
    let out = run(&small("static-moments")).unwrap();
    assert_eq!(out.report.values["exact_E_W[n=16]"], -0.125);
    assert_eq!(out.report.values["exact_Var_W[n=16]"], 0.28125);
}

#[test]
fn zero_replicas_is_a_validation_error() {
    let mut c = small("qv-limit");
    c.replicas = 0;
    c.n_grid = vec![17];
    match run(&c) {
        Err(CliError::Config(v)) => assert_eq!(v.len(), 2, "{v:?}"),
        other => panic!("expected config error, got {other:?}"),
    }
}

#[test]
fn summary_is_independent_of_thread_count() {
    let c = small("qv-limit");
    let json = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        let out = pool.install(|| run(&c)).unwrap();
        output::summary_json(&out.report).unwrap()
    };
    assert_eq!(json(1), json(3));
}

#[test]
fn manifest_reproduces_summary() {
    let dir = tempfile::tempdir().unwrap();
    let c = small("qv-limit");
    let out = run(&c).unwrap();
    output::write_all(dir.path(), &c, &out.report, &out.rows).unwrap();
    let first = std::fs::read_to_string(dir.path().join("qv-limit.json")).unwrap();
    let again = ExperimentConfig::load(&dir.path().join("qv-limit.manifest.json")).unwrap();
    assert_eq!(again, c);
    let rerun = run(&again).unwrap();
    assert_eq!(output::summary_json(&rerun.report).unwrap(), first);

    let csv = std::fs::read_to_string(dir.path().join("qv-limit.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "experiment,replica,functional,n,l_or_eps,t,value"
    );
    assert_eq!(lines.count(), out.rows.len());
}

#[test]
fn flags_override_file() {
    let mut c = small("qv-limit");
    c.apply(&Overrides {
        replicas: Some(3),
        dt: Some(2e-3),
        ..Overrides::default()
    });
    assert_eq!((c.replicas, c.dt), (3, 2e-3));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_oy-lattice");
    let list = Command::new(bin).arg("list").output().unwrap();
    assert!(list.status.success());
    let text = String::from_utf8(list.stdout).unwrap();
    assert_eq!(text.lines().count(), 12);

    let dir = tempfile::tempdir().unwrap();
    let bad = Command::new(bin)
        .args(["run", "qv-limit", "--replicas", "0", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let unknown = Command::new(bin).args(["run", "nope"]).output().unwrap();
    assert_eq!(unknown.status.code(), Some(2));

    let ok = Command::new(bin)
        .args(["run", "oracle-equivalence", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(dir.path().join("oracle-equivalence.manifest.json").exists());
}
