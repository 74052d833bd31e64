use paramod::data::{LevelData, LEVELS};
use paramod::eulerfactor::{bad_relation, spin_euler_bad, spin_euler_good};

#[test]
fn published_good_rows_from_published_eigenvalues() {
    for n in LEVELS {
        let d = LevelData::load(n).unwrap();
        let mut rows = 0;
        for row in &d.eigenvalues.euler {
            let p = row[0];
            let q = spin_euler_good(d.tp(p).unwrap(), d.t1(p).unwrap(), p, 3);
            assert_eq!(q.to_i64().unwrap(), row[1..].to_vec(), "N={n} Q_{p}");
            rows += 1;
        }
        assert!(rows >= 4);
    }
}

#[test]
fn published_bad_factor_from_t_n() {
    for n in LEVELS {
        let d = LevelData::load(n).unwrap();
        let eps = d.eigenvalues.atkin_lehner;
        let lp = d.tp(n).unwrap();
        let l01 = i64::try_from(bad_relation(lp, eps, n, 3)).unwrap();
        let q = spin_euler_bad(lp, l01, eps, n, 3);
        assert_eq!(q.to_i64().unwrap(), d.euler_bad(), "N={n}");
        // the relation read backwards from the published factor
        let c2 = d.euler_bad()[2];
        assert_eq!((c2 - n.pow(3)) % n, 0);
        assert_eq!((c2 - n.pow(3)) / n, l01);
    }
}

#[test]
fn q2_of_79_prints() {
    let d = LevelData::load(79).unwrap();
    let q = spin_euler_good(d.tp(2).unwrap(), d.t1(2).unwrap(), 2, 3);
    assert_eq!(q.to_string(), "1 + 5x + 14x^2 + 40x^3 + 64x^4");
}
