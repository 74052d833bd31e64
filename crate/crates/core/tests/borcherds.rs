use num_rational::Ratio;
use paramod::borcherds::{
    borcherds_data, borcherds_fj_expansion, check_grit_equals_borcherds, combination_multiplicity,
    divisor_table, humbert_multiplicity, humbert_triple, psi_from_theta_block,
};
use paramod::data::LevelData;
use paramod::jacobi::{apply_v, theta_block_table, JacobiCoeffTable};

fn psis(level: i64) -> (LevelData, Vec<JacobiCoeffTable>) {
    let d = LevelData::load(level).unwrap();
    let q = level / 4 + 2;
    let p = d.specs().iter().map(|s| psi_from_theta_block(s, q).unwrap()).collect();
    (d, p)
}

#[test]
fn weight_and_sign_of_every_member() {
    for level in [61, 73, 79] {
        let (_, ps) = psis(level);
        for psi in &ps {
            let b = borcherds_data(psi).unwrap();
            assert_eq!(b.weight, Ratio::from_integer(3));
            assert_eq!(b.epsilon, Some(-1));
            assert_eq!(b.a, Ratio::from_integer(1));
            assert_eq!(b.c, Ratio::from_integer(level as i128));
        }
    }
}

#[test]
fn divisor_examples_61() {
    let (_, ps) = psis(61);
    let (n, m, r) = humbert_triple(61, 1, 1).unwrap();
    assert_eq!(humbert_multiplicity(&ps[0], n, m, r).unwrap(), 9);
    let (n, m, r) = humbert_triple(61, 16, 4).unwrap();
    assert_eq!(humbert_multiplicity(&ps[0], n, m, r).unwrap(), 0);
    let comb = [(1, &ps[0]), (1, &ps[5]), (-1, &ps[1])];
    assert_eq!(combination_multiplicity(&comb, 4, 2).unwrap(), 3);
}

#[test]
fn divisor_tables_reproduce() {
    for level in [61, 73, 79] {
        let (d, ps) = psis(level);
        let spec = d.nonlift_spec();
        let mut cols: Vec<(String, Vec<(i64, &JacobiCoeffTable)>)> =
            d.divisors.members.iter().map(|&j| (format!("B[{j}]"), vec![(1, &ps[j - 1])])).collect();
        cols.push(("quotient".into(), vec![(1, &ps[spec.num.0]), (1, &ps[spec.num.1]), (-1, &ps[spec.den])]));
        let classes: Vec<(i64, i64)> = d.divisors.rows.iter().map(|r| (r[0], r[1])).collect();
        let t = divisor_table(&cols, &classes).unwrap();
        for (row, want) in t.rows.iter().zip(&d.divisors.rows) {
            let got: Vec<i64> = row.2.iter().map(|&x| x as i64).collect();
            assert_eq!(got, want[2..].to_vec(), "level {level} class ({}, {})", row.0, row.1);
        }
        assert!(t.negative_entries().is_empty());
    }
}

#[test]
fn humbert_class_depends_on_r_mod_2n() {
    let (_, ps) = psis(61);
    // (|D|, r) and (|D|, r + 2N k) give the same multiplicity
    for (dd, r) in [(1, 1), (4, 2), (5, 35), (20, 52), (65, 59)] {
        let a = combination_multiplicity(&[(1, &ps[0])], dd, r).unwrap();
        let b = combination_multiplicity(&[(1, &ps[0])], dd, r + 122).unwrap();
        let c = combination_multiplicity(&[(1, &ps[0])], dd, r - 122).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }
}

#[test]
fn borcherds_equals_gritsenko_depth_two() {
    for level in [61, 73, 79] {
        let d = LevelData::load(level).unwrap();
        for s in d.specs() {
            assert!(check_grit_equals_borcherds(&s, 2, 4).unwrap(), "{s}");
        }
    }
}

#[test]
fn borcherds_equals_gritsenko_depth_three_61() {
    let d = LevelData::load(61).unwrap();
    let s = &d.specs()[0];
    let psi = psi_from_theta_block(s, 8).unwrap();
    let bl = borcherds_fj_expansion(&psi, 3, 4).unwrap();
    let phi = theta_block_table(s, 4 * 61 * 3 * 5).unwrap();
    let g3 = apply_v(&phi, 3).unwrap().to_series(4).unwrap();
    assert_eq!(bl[2], g3);
}
