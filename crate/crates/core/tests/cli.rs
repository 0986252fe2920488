use std::path::PathBuf;
use std::process::{Command, Output};

use lcu_lab::harness::CSV_HEADER;

fn lcu_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lcu-lab")).args(args).output().expect("spawn lcu-lab")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lcu-lab-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn sweep_writes_sorted_csv_and_sidecar() {
    let dir = scratch("sweep");
    let out = dir.join("run.csv");
    let res = lcu_lab(&[
        "sweep",
        "--qubits",
        "4,2",
        "--ranks",
        "2,1",
        "--samples",
        "50",
        "--seed",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 5);
    let keys: Vec<(usize, usize)> = lines[1..]
        .iter()
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            assert_eq!(f.len(), 12);
            (f[3].parse().unwrap(), f[4].parse().unwrap())
        })
        .collect();
    assert_eq!(keys, vec![(2, 1), (2, 2), (4, 1), (4, 2)]);
    assert!(lines[1].starts_with("special_orthogonal,coherent,gaussian,2,1,50,3,"));
    let meta = std::fs::read_to_string(dir.join("run.csv.meta")).unwrap();
    assert!(meta.lines().any(|l| l == "seed = 3"));
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = scratch("config");
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "# single cell\nqubits = 3\nranks = 2\nsamples = 20\nseed = 11\n").unwrap();
    let res = lcu_lab(&["sweep", "--config", cfg.to_str().unwrap(), "--ranks", "1"]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let text = String::from_utf8(res.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[1].starts_with("special_orthogonal,coherent,gaussian,3,1,20,11,"));
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn config_errors_exit_with_one() {
    for args in [
        &["sweep", "--group", "symplectic"][..],
        &["sweep", "--qubits", "0"],
        &["sweep", "--group", "unitary", "--backend", "gaussian"],
        &["sweep", "--backend", "dense", "--qubits", "14"],
        &["sweep", "--samples", "1"],
        &["sweep", "--config", "/nonexistent/lcu.cfg"],
    ] {
        let res = lcu_lab(args);
        assert_eq!(res.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&res.stderr));
    }
}

#[test]
fn tight_grid_validates() {
    let res = lcu_lab(&["validate", "--qubits", "2,3", "--ranks", "1,2", "--samples", "5"]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
}

#[test]
fn analytic_table_lists_spot_values() {
    let res = lcu_lab(&["analytic", "--qubits", "2,4", "--ranks", "1,2"]);
    assert!(res.status.success());
    let text = String::from_utf8(res.stdout).unwrap();
    assert!(text.contains("0.142857142857"), "{text}");
    assert!(text.contains("0.166666666667"), "{text}");
}
