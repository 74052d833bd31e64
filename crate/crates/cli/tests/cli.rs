use std::path::Path;
use std::process::{Command, Output};

use paramod::jacobi::JacobiCoeffTable;

fn paramod(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paramod"))
        .args(args)
        .env("PARAMOD_CACHE", cache)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn rejects_unsupported_level() {
    let dir = tempfile::tempdir().unwrap();
    let o = paramod(dir.path(), &["basis", "80"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("level 80"));
}

#[test]
fn basis_61_admits_six_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let o = paramod(dir.path(), &["basis", "61"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("6 blocks admitted"), "{s}");
    assert!(s.contains("dim S_3(K(61)) = 7 = 6 + 1"), "{s}");
    assert!(s.contains("restricted rank 6 of 6"), "{s}");
}

#[test]
fn basis_73_admits_eight_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let o = paramod(dir.path(), &["basis", "73"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("8 blocks admitted"));
}

#[test]
fn euler_79_at_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = paramod(dir.path(), &["euler", "79", "--primes", "2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "Q_2  1 + 5x + 14x^2 + 40x^3 + 64x^4  ok\n");
}

#[test]
fn eigen_73_tp2() {
    let dir = tempfile::tempdir().unwrap();
    let o = paramod(dir.path(), &["eigen", "73", "--ops", "Tp2", "--primes", "2,3", "--format", "tsv"]);
    assert!(o.status.success());
    let rows: Vec<(String, String)> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            (f[1].to_string(), f[3].to_string())
        })
        .collect();
    assert_eq!(rows, vec![("2".into(), "6".into()), ("3".into(), "-9".into())]);
}

#[test]
fn eigen_at_level_needs_t01_not_tp2() {
    let dir = tempfile::tempdir().unwrap();
    let o = paramod(dir.path(), &["eigen", "61", "--ops", "Tp2", "--primes", "61"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("ERROR"));
}

#[test]
fn warm_rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["eigen", "61", "--primes", "2,3", "--ops", "Tp,Tp2"];
    let a = paramod(dir.path(), &args);
    let b = paramod(dir.path(), &args);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = paramod(dir.path(), &args);
    assert_eq!(b.stdout, c.stdout);
}

#[test]
fn jacobi_cache_roundtrips() {
    let dir = tempfile::tempdir().unwrap();
    assert!(paramod(dir.path(), &["basis", "61", "--d-max", "20000"]).status.success());
    let path = dir.path().join("61").join("tb1.jac");
    let before = std::fs::read(&path).unwrap();
    let t = JacobiCoeffTable::load(&path).unwrap();
    let again = dir.path().join("copy.jac");
    t.save(&again).unwrap();
    assert_eq!(before, std::fs::read(&again).unwrap());
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# eigenvalue run\nprimes = 2,3\nformat = tsv\n").unwrap();
    let c = cfg.to_str().unwrap();
    let o = paramod(dir.path(), &["--config", c, "eigen", "61"]);
    assert_eq!(stdout(&o).lines().count(), 3);
    let o = paramod(dir.path(), &["--config", c, "eigen", "61", "--primes", "5", "--format", "text"]);
    let s = stdout(&o);
    assert!(s.starts_with("T(5)"), "{s}");
    assert_eq!(s.lines().count(), 1);
}

#[test]
fn divisors_and_expand_61() {
    let dir = tempfile::tempdir().unwrap();
    let o = paramod(dir.path(), &["divisors", "61"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("13 classes, published table reproduced"));
    let o = paramod(dir.path(), &["expand", "61", "--index", "1,10,1", "--index", "1,12,1", "--format", "tsv"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("f\t1\t10\t1\t-75\t-75"), "{s}");
    assert!(s.contains("f\t1\t12\t1\t107\t107"), "{s}");
}

#[test]
fn speedups_61() {
    let dir = tempfile::tempdir().unwrap();
    let o = paramod(dir.path(), &["verify-speedups", "61", "--format", "tsv"]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().skip(1).all(|l| l.contains("\tyes\t")));
}
