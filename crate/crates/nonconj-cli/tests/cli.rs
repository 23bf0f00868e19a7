use nonconj_cli::table::parse_table;
use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = r#"{"model": "harmonic", "params": {"eta": 0.5}, "cutoffs": [4, 4], "t_end": 1.0, "steps": 20, "sample_every": 10}"#;

fn nonconj(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nonconj"));
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn run_writes_the_core_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.json", SMALL);
    let out = dir.path().join("out.csv");
    let o = nonconj(&["run", "--config", &cfg, "--out", out.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let golden = include_str!("golden/core_header.csv");
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(format!("{header}\n"), golden);
    for key in ["# config:", "# units:", "# signs:", "# convergence:", "# nonconj "] {
        assert!(text.lines().any(|l| l.starts_with(key)), "missing {key}");
    }
    let (cols, rows) = parse_table(&text).unwrap();
    assert_eq!(cols.len(), 17);
    assert_eq!(rows.len(), 3);
    assert_eq!(rows.iter().map(|r| r[0]).collect::<Vec<_>>(), vec![0.0, 0.5, 1.0]);
}

#[test]
fn printed_values_parse_back_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.json", SMALL);
    let o = nonconj(&["run", "--config", &cfg], &[]);
    let text = String::from_utf8(o.stdout).unwrap();
    let (_, rows) = parse_table(&text).unwrap();
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    for (line, row) in body.iter().zip(&rows) {
        let again: Vec<String> = row.iter().map(|&x| nonconj_cli::table::format_value(x)).collect();
        assert_eq!(*line, again.join(","));
    }
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "small.json", SMALL);
    let a = nonconj(&["run", "--config", &cfg], &[]).stdout;
    let b = nonconj(&["run", "--config", &cfg], &[]).stdout;
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn sweep_output_does_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "jc.json", include_str!("../../../configs/jc_mutual_info_sweep.json"));
    let one = dir.path().join("one");
    let many = dir.path().join("many");
    let args = |d: &Path| vec!["sweep".to_string(), "--config".into(), cfg.clone(), "--values".into(), "0.9,0.1,0.5".into(), "--out".into(), d.to_str().unwrap().into()];
    let run = |d: &Path, threads: &str| {
        let a = args(d);
        let refs: Vec<&str> = a.iter().map(String::as_str).collect();
        let o = nonconj(&refs, &[("NONCONJ_THREADS", threads)]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    };
    run(&one, "1");
    run(&many, "3");
    let a = std::fs::read_to_string(one.join("sweep.csv")).unwrap();
    assert_eq!(a, std::fs::read_to_string(many.join("sweep.csv")).unwrap());
    let (cols, rows) = parse_table(&a).unwrap();
    assert_eq!(cols[0], "p_g");
    assert_eq!(rows.iter().map(|r| r[0]).collect::<Vec<_>>(), vec![0.1, 0.5, 0.9]);
    for k in 0..3 {
        assert!(one.join(format!("point_{k:03}.csv")).exists());
    }
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.json", r#"{"model": "harmonic", "params": {"etaa": 0.5}, "stepz": 3}"#);
    let o = nonconj(&["run", "--config", &cfg], &[]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("etaa") && err.contains("'eta'"), "{err}");
    assert!(err.contains("stepz") && err.contains("'steps'"), "{err}");
    let o = nonconj(&["check", "--config", &cfg], &[]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn convergence_gate_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "gate.json",
        r#"{"model": "harmonic", "params": {"eta": 0.5}, "cutoffs": [3, 3], "t_end": 4.0, "steps": 16, "sample_every": 4,
            "convergence": {"enabled": true, "require": true}}"#,
    );
    let o = nonconj(&["run", "--config", &cfg], &[]);
    assert_eq!(o.status.code(), Some(2));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("# convergence: unconverged")), "{text}");
}

#[test]
fn check_and_models_do_not_propagate() {
    let o = nonconj(&["models"], &[]);
    assert_eq!(o.status.code(), Some(0));
    let listing = String::from_utf8(o.stdout).unwrap();
    for m in nonconj_cli::config::MODEL_NAMES {
        assert!(listing.contains(m), "{m}");
    }
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "dipole.json", include_str!("../../../configs/switched_dipole_mode.json"));
    let o = nonconj(&["check", "--config", &cfg], &[]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8(o.stdout).unwrap().starts_with("config ok"));
}

#[test]
fn zero_coupling_example_has_flat_ledger() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "zero.json", include_str!("../../../configs/zero_coupling.json"));
    let o = nonconj(&["run", "--config", &cfg], &[]);
    assert_eq!(o.status.code(), Some(0));
    let (cols, rows) = parse_table(&String::from_utf8(o.stdout).unwrap()).unwrap();
    for name in ["Q", "Qprime", "deltaQ", "W", "Wprime", "Sigma", "SigmaTilde", "SigmaPrime"] {
        let k = cols.iter().position(|c| c == name).unwrap();
        assert!(rows.iter().all(|r| r[k].abs() < 1e-9), "{name}");
    }
}
