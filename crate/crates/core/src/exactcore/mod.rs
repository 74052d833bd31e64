//! Exact arithmetic shared by the rest of the crate: integer polynomials,
//! prime fields, factorisation modulo primes and Chinese remaindering.

mod crt;
mod fp;
mod poly;

use std::collections::BTreeSet;

pub use crt::{
    crt_lift, find_split_prime, is_prime_u64, kronecker_prime, legendre, prime_factors_u64,
    primes_up_to,
};
pub use fp::{factor_mod_p, inv_mod, mul_mod, pow_mod, reduce_i128, FpPoly, PrimeFieldElem};
pub use poly::{bareiss_det, poly_discriminant, resultant, trial_factor, IntPoly};

pub type BigRat = num_rational::BigRational;

/// Degrees of the irreducible factors of `f` modulo `p`, with multiplicity.
fn degree_pattern(f: &IntPoly, p: u64) -> Option<Vec<usize>> {
    let fs = factor_mod_p(f, p).ok()?;
    if fs.iter().any(|(_, m)| *m > 1) {
        return None;
    }
    Some(fs.iter().map(|(g, _)| g.degree().unwrap()).collect())
}

fn subset_sums(degs: &[usize]) -> BTreeSet<usize> {
    let mut s = BTreeSet::from([0usize]);
    for &d in degs {
        let next: Vec<usize> = s.iter().map(|x| x + d).collect();
        s.extend(next);
    }
    s
}

/// Certify irreducibility of a monic integer polynomial over Q by combining
/// factorisation patterns modulo small primes. Returns the primes used, or
/// `None` if no certificate was found among primes below `limit`.
pub fn irreducibility_certificate(f: &IntPoly, limit: u64) -> Option<Vec<u64>> {
    let n = f.degree()?;
    if n <= 1 {
        return Some(vec![]);
    }
    let mut possible: BTreeSet<usize> = (0..=n).collect();
    let mut used = vec![];
    for p in primes_up_to(limit) {
        let Some(pat) = degree_pattern(f, p) else { continue };
        let sums = subset_sums(&pat);
        let before = possible.len();
        possible = possible.intersection(&sums).copied().collect();
        if possible.len() < before {
            used.push(p);
        }
        if possible.len() == 2 {
            return Some(used);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certificate() {
        let q = IntPoly::from_i64(&[2026, -5205, 4471, -1714, 322, -29, 1]);
        assert!(irreducibility_certificate(&q, 200).is_some());
        let red = &IntPoly::from_i64(&[26, -11, 1]) * &IntPoly::from_i64(&[1, 0, 1]);
        assert!(irreducibility_certificate(&red, 200).is_none());
    }
}
