use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use paramod::data::LevelData;
use paramod::paramodular::{
    fc_action_bad_prime, nonlift_coeff, unit_content_witness, BadOperator, FjQuotient, LiftBasis,
    ParamodularCache, ParamodularIndex, SymQ,
};

fn basis(level: i64, d_max: i64) -> (LevelData, LiftBasis) {
    let d = LevelData::load(level).unwrap();
    let b = LiftBasis::new(level, d.specs(), d_max).unwrap();
    (d, b)
}

#[test]
fn unit_content_values() {
    for level in [61, 73, 79] {
        let (d, b) = basis(level, 4 * level * 12);
        let spec = d.nonlift_spec();
        let q = FjQuotient::new(&b, &spec, 1, 4).unwrap();
        let mut vals = vec![];
        for &[n, r, m, want] in &d.nonlift.unit_content {
            let v = nonlift_coeff(&b, &q, &spec, ParamodularIndex::new(n, r, m)).unwrap();
            assert_eq!(v, want as i128, "f_{level}({n},{r},{m})");
            vals.push(v);
        }
        assert!(unit_content_witness(&vals));
    }
}

#[test]
fn lift_first_coefficient_is_jacobi_coefficient() {
    let (_, b) = basis(61, 4 * 61 * 6);
    for r in -15..=15 {
        for j in 0..b.dim() {
            assert_eq!(b.lift_coeff(j, 1, r, 1).unwrap(), b.tables()[j].coeff(1, r).unwrap());
        }
    }
}

#[test]
fn quotient_solve_reproduces_product() {
    let (d, b) = basis(61, 4 * 61 * 40);
    let spec = d.nonlift_spec();
    let q = FjQuotient::new(&b, &spec, 3, 6).unwrap();
    // (G_i G_j)_4 = B_1 H_3 + B_2 H_2 + B_3 H_1, checked through q^6
    let gi: Vec<_> = (1..=3).map(|m| b.fj_series(spec.num.0, m, 8).unwrap()).collect();
    let gj: Vec<_> = (1..=3).map(|m| b.fj_series(spec.num.1, m, 8).unwrap()).collect();
    let gk: Vec<_> = (1..=3).map(|m| b.fj_series(spec.den, m, 8).unwrap()).collect();
    let mut lhs = gi[0].mul(&gj[2]).unwrap();
    lhs.add_scaled(&gi[1].mul(&gj[1]).unwrap(), 1).unwrap();
    lhs.add_scaled(&gi[2].mul(&gj[0]).unwrap(), 1).unwrap();
    let mut rhs = lhs.clone();
    for m1 in 1..=3i64 {
        let h = q.fj_table(4 - m1).unwrap().to_series(6).unwrap();
        rhs.add_scaled(&gk[(m1 - 1) as usize].mul(&h).unwrap(), -1).unwrap();
    }
    rhs.truncate(6);
    assert!(rhs.is_zero(), "residual {rhs}");
}

#[test]
fn quotient_is_symmetric() {
    let (d, b) = basis(61, 4 * 61 * 40);
    let spec = d.nonlift_spec();
    let q = FjQuotient::new(&b, &spec, 3, 4).unwrap();
    // a(n, r, m) computed with FJ index m equals the one with FJ index n
    let h2 = q.fj_table(2).unwrap();
    let h3 = q.fj_table(3).unwrap();
    for r in -20..=20 {
        let t = ParamodularIndex::new(3, r, 2);
        if t.in_cusp_support(61) {
            assert_eq!(h2.coeff(3, r).unwrap(), h3.coeff(2, r).unwrap(), "r = {r}");
        }
    }
}

#[test]
fn cache_roundtrip_and_symmetry() {
    let (_, b) = basis(61, 4 * 61 * 200);
    let s = SymQ::new(122, 11, 1, 1);
    let mut c = ParamodularCache::new(61, "G1");
    c.populate(&s, 200, |t| b.lift_coeff(0, t.n, t.r, t.m)).unwrap();
    assert!(c.len() > 10);
    for (t, v) in c.entries() {
        assert_eq!(b.lift_coeff(0, t.m, t.r, t.n).unwrap(), *v);
        assert_eq!(b.lift_coeff(0, t.n, -t.r, t.m).unwrap(), -*v);
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g1.para");
    c.save(&path).unwrap();
    let back = ParamodularCache::load(&path).unwrap();
    assert_eq!(back, c);
    assert_eq!(back.get(ParamodularIndex::new(1, -10, 1)), Some(-b.lift_coeff(0, 1, 10, 1).unwrap()));
}

/// Matrix of the operator on the lift basis: `images[j]` holds the
/// coefficients of `G[j] | T` at `ts`. Solves and checks the overdetermined
/// system exactly.
fn lift_matrix(base: &[Vec<i128>], images: &[Vec<i128>]) -> Vec<Vec<BigRational>> {
    let dim = base.len();
    let npts = base[0].len();
    let to_q = |v: i128| BigRational::from_integer(BigInt::from(v));
    let mut out = vec![];
    for img in images {
        let mut m: Vec<Vec<BigRational>> = (0..npts)
            .map(|i| {
                let mut row: Vec<BigRational> = (0..dim).map(|l| to_q(base[l][i])).collect();
                row.push(to_q(img[i]));
                row
            })
            .collect();
        let mut piv = 0;
        for col in 0..dim {
            let Some(p) = (piv..m.len()).find(|&i| !m[i][col].is_zero()) else { continue };
            m.swap(piv, p);
            let inv = m[piv][col].clone();
            for c in 0..=dim {
                m[piv][c] = &m[piv][c] / &inv;
            }
            for i in 0..m.len() {
                if i != piv && !m[i][col].is_zero() {
                    let f = m[i][col].clone();
                    for c in 0..=dim {
                        let s = &f * &m[piv][c];
                        m[i][c] -= s;
                    }
                }
            }
            piv += 1;
        }
        assert_eq!(piv, dim, "lift coefficients at the sample are not independent");
        for row in &m[piv..] {
            assert!(row[dim].is_zero(), "image leaves the lift space");
        }
        out.push((0..dim).map(|i| m[i][dim].clone()).collect());
    }
    out
}

/// The lift subspace is stable under the bad-prime operators, so the
/// coefficient formulas applied to each lift give combinations of lifts.
/// Lifts have Fricke sign -1, so on them `T01 = T(p) - (p + 1)`.
#[test]
fn bad_prime_action_on_lifts() {
    let level = 61;
    let (_, b) = basis(level, 61 * 61 * 244);
    let dim = b.dim();
    let ts: Vec<ParamodularIndex> =
        [1, 3, 5, 7, 9, 10, 12, 13, 14, 15].iter().map(|&r| ParamodularIndex::new(1, r, 1)).collect();
    let base: Vec<Vec<i128>> =
        (0..dim).map(|j| ts.iter().map(|t| b.lift_coeff(j, t.n, t.r, t.m).unwrap()).collect()).collect();
    let mats: Vec<_> = [BadOperator::Tp, BadOperator::T01]
        .iter()
        .map(|&op| {
            let images: Vec<Vec<i128>> = (0..dim)
                .map(|j| {
                    ts.iter()
                        .map(|&t| {
                            fc_action_bad_prime(|n, r, m| b.lift_coeff(j, n, r, m), level, 3, 61, t, op).unwrap()
                        })
                        .collect()
                })
                .collect();
            lift_matrix(&base, &images)
        })
        .collect();
    for j in 0..dim {
        for i in 0..dim {
            let mut want = mats[0][j][i].clone();
            if i == j {
                want -= BigRational::from_integer(BigInt::from(62));
            }
            assert_eq!(mats[1][j][i], want, "entry ({i}, {j})");
        }
    }
}
