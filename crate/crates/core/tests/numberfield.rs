use std::collections::BTreeMap;

use paramod::data::{LevelData, LEVELS};
use paramod::numberfield::{verify_congruence, CongruenceInput};
use paramod::paramodular::LiftBasis;
use paramod::restrict::{default_pool, eigenvalue, lift_hecke_matrices, FormExpr, HeckeOp};

fn report(n: i64, hecke: &BTreeMap<i64, Vec<Vec<i64>>>, lambda_f: &BTreeMap<i64, i64>) -> bool {
    let d = LevelData::load(n).unwrap();
    let rep = verify_congruence(&CongruenceInput { data: &d, hecke, lambda_f }).unwrap();
    print!("{rep}");
    rep.all_pass()
}

#[test]
fn congruences_with_published_t2() {
    for n in LEVELS {
        let d = LevelData::load(n).unwrap();
        let hecke = BTreeMap::from([(2, d.hecke.t2.clone())]);
        assert!(report(n, &hecke, &BTreeMap::new()));
    }
}

#[test]
fn congruences_with_computed_hecke_operators() {
    let primes = [2, 3, 5, 7, 11, 13];
    for n in LEVELS {
        let d = LevelData::load(n).unwrap();
        let basis = LiftBasis::new(n, d.specs(), 300_000).unwrap();
        let pool = default_pool(n, Some(d.restriction.s));
        let hecke = lift_hecke_matrices(&basis, &pool, &primes, HeckeOp::T).unwrap();
        let f = FormExpr::nonlift(&d.nonlift_spec());
        let lambda_f: BTreeMap<i64, i64> = primes
            .iter()
            .map(|&p| (p, eigenvalue(&basis, &f, &pool, p, HeckeOp::T, 3, 3).unwrap().lambda as i64))
            .collect();
        for (&p, &l) in &lambda_f {
            assert_eq!(Some(l), d.tp(p), "N = {n}, p = {p}");
        }
        assert!(report(n, &hecke, &lambda_f));
    }
}
