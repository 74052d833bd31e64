use paramod::data::LevelData;
use paramod::paramodular::LiftBasis;
use paramod::restrict::{
    coset_sums, compare_speedups, default_pool, degree, eigenvalue, Cyclotomic, FormExpr, HeckeOp, RestrictionMatrix,
};

fn setup(n: i64) -> (LevelData, LiftBasis, Vec<RestrictionMatrix>) {
    let d = LevelData::load(n).unwrap();
    let b = LiftBasis::new(n, d.specs(), 300_000).unwrap();
    let pool = default_pool(n, Some(d.restriction.s));
    (d, b, pool)
}

#[test]
fn coset_degrees() {
    let s = RestrictionMatrix::new(61, 122, 11, 61).unwrap();
    for p in [2i64, 3, 5, 7] {
        let t = degree(&coset_sums(&s, p, 3, HeckeOp::T).unwrap());
        assert_eq!(t as i64, (p * p + 1) * (p + 1), "T({p})");
        let t1 = degree(&coset_sums(&s, p, 3, HeckeOp::T1).unwrap());
        assert_eq!(t1 as i64, p.pow(4) + p.pow(3) + p * p + p, "T1({p}^2)");
    }
}

#[test]
fn speedups_agree_with_full_sums_over_cyclotomic() {
    let (d, b, _) = setup(61);
    let [a, bb, c] = d.restriction.s;
    let s = RestrictionMatrix::new(61, a, bb, c).unwrap();
    for p in [2i64, 3] {
        let ring = Cyclotomic::new(p as u64);
        let f = FormExpr::lift(0, b.dim());
        let checks = compare_speedups(&b, &f, &s, p, HeckeOp::T, 3, 30, &ring).unwrap();
        for c in &checks {
            println!("p={p} {} {} {}/{} agree={:?} nonzero={}", c.sum, c.speedup, c.reduced_terms, c.full_terms, c.agree, c.nonzero);
        }
        assert!(!checks.is_empty());
        assert!(checks.iter().all(|c| c.agree != Some(false)));
        assert!(checks.iter().any(|c| c.agree == Some(true) && c.nonzero > 0));
    }
}

#[test]
fn nonlift_eigenvalues_small_primes() {
    for n in [61, 73] {
        let (d, b, pool) = setup(n);
        let f = FormExpr::nonlift(&d.nonlift_spec());
        for p in [2, 3] {
            let run = eigenvalue(&b, &f, &pool, p, HeckeOp::T, 3, 3).unwrap();
            assert_eq!(Some(run.lambda as i64), d.tp(p), "N={n} T({p})");
            let run = eigenvalue(&b, &f, &pool, p, HeckeOp::T1, 3, 3).unwrap();
            assert_eq!(Some(run.lambda as i64), d.t1(p), "N={n} T1({p}^2)");
        }
    }
}
