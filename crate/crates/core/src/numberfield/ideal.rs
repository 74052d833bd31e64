use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::field::{Elem, NumberField};
use crate::exactcore::{factor_mod_p, poly_discriminant, IntPoly};
use crate::{Error, Result};

/// The ideal `<k, g>` of the ring of integers.
#[derive(Clone, Debug, PartialEq)]
pub struct PGIdeal {
    pub modulus: u64,
    pub gen: Elem,
}

/// A prime `<p, phi_i(a)>` from Kummer-Dedekind, with ramification index and
/// residue degree.
#[derive(Clone, Debug)]
pub struct KDPrime {
    pub ideal: PGIdeal,
    pub factor: IntPoly,
    pub e: u32,
    pub f: usize,
}

impl KDPrime {
    /// `a = r mod P` for a residue degree one prime.
    pub fn root(&self) -> Option<u64> {
        if self.f != 1 {
            return None;
        }
        let p = self.ideal.modulus as i64;
        Some((-i64::try_from(self.factor.coeff(0)).unwrap()).rem_euclid(p) as u64)
    }
}

/// Factor `p O_K` from the factorisation of the minimal polynomial modulo
/// `p`; requires `p^2` not to divide its discriminant.
pub fn kummer_dedekind(k: &NumberField, p: u64) -> Result<Vec<KDPrime>> {
    let d = poly_discriminant(k.minpoly());
    if (d % BigInt::from(p * p)).is_zero() {
        return Err(Error::Precondition(format!("{}^2 divides the discriminant of {}", p, k.minpoly())));
    }
    Ok(factor_mod_p(k.minpoly(), p)?
        .into_iter()
        .map(|(g, e)| {
            let factor = g.to_int();
            KDPrime { ideal: PGIdeal { modulus: p, gen: k.eval_poly(&factor) }, f: g.degree().unwrap(), factor, e }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    In,
    NotIn,
    Inconclusive(String),
}

impl Membership {
    pub fn is_in(&self) -> bool {
        *self == Membership::In
    }
}

/// `aux * x` is a multiple of `w` in the ring of integers.
pub fn aux_divides(k: &NumberField, x: &Elem, w: &Elem, aux: &BigInt) -> bool {
    let Some(z) = k.div(&k.scale(x, &BigRational::from_integer(aux.clone())), w) else { return false };
    k.is_integral(&z)
}

/// Membership of `x` in `<k, w>` by the coprime-multiplier argument: if
/// `aux x` lies in `<w>` and `gcd(aux, k) = 1` then `x` lies in
/// `<w> + k O_K`. A failure proves nothing.
pub fn member_via_witness(k: &NumberField, x: &Elem, modulus: u64, w: &Elem, aux: &BigInt) -> Membership {
    if !aux.gcd(&BigInt::from(modulus)).is_one() {
        return Membership::Inconclusive(format!("multiplier {aux} is not prime to {modulus}"));
    }
    if k.is_zero(x) {
        return Membership::In;
    }
    if aux_divides(k, x, w, aux) {
        Membership::In
    } else {
        Membership::Inconclusive(format!("{aux} x is not a multiple of the witness"))
    }
}

/// Membership of `x` in a residue degree one prime `<p, a - r>` through the
/// residue map, valid when `p` does not divide `[O_K : Z[a]]` and `x` has
/// `p`-integral coordinates.
pub fn member_via_residue(k: &NumberField, x: &Elem, prime: &KDPrime) -> Membership {
    let Some(r) = prime.root() else {
        return Membership::Inconclusive("residue degree above one".into());
    };
    match k.residue(x, prime.ideal.modulus, r) {
        Some(0) => Membership::In,
        Some(_) => Membership::NotIn,
        None => Membership::Inconclusive("coordinates not p-integral".into()),
    }
}

/// Search a multiplier prime to the modulus among the divisors of the
/// witness norm, trying `preferred` first.
pub fn find_aux(k: &NumberField, xs: &[Elem], modulus: u64, w: &Elem, preferred: Option<&BigInt>) -> Option<BigInt> {
    let ok = |l: &BigInt| l.gcd(&BigInt::from(modulus)).is_one() && xs.iter().all(|x| aux_divides(k, x, w, l));
    if let Some(l) = preferred {
        if ok(l) {
            return Some(l.clone());
        }
    }
    let n = k.norm(w);
    if !n.is_integer() || n.is_zero() {
        return None;
    }
    let mut n = n.to_integer();
    if n < BigInt::zero() {
        n = -n;
    }
    // strip the modulus' primes
    for p in crate::exactcore::prime_factors_u64(modulus) {
        let pb = BigInt::from(p);
        while (&n % &pb).is_zero() {
            n /= &pb;
        }
    }
    let divs = divisors(&n, 1 << 16)?;
    divs.into_iter().find(ok)
}

fn divisors(n: &BigInt, limit: usize) -> Option<Vec<BigInt>> {
    let (fs, rest) = crate::exactcore::trial_factor(n, 1 << 20);
    let mut out = vec![BigInt::one()];
    for (p, e) in fs.into_iter().map(|(p, e)| (BigInt::from(p), e)).chain((!rest.is_one()).then(|| (rest.clone(), 1))) {
        let mut next = vec![];
        for d in &out {
            let mut q = d.clone();
            for _ in 0..=e {
                next.push(q.clone());
                q *= &p;
            }
        }
        out = next;
        if out.len() > limit {
            return None;
        }
    }
    out.sort();
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kd_level61() {
        let k = NumberField::from_i64(&[2026, -5205, 4471, -1714, 322, -29, 1]).unwrap();
        let ps = kummer_dedekind(&k, 43).unwrap();
        let mut deg: Vec<(usize, u32)> = ps.iter().map(|p| (p.f, p.e)).collect();
        deg.sort();
        assert_eq!(deg, vec![(1, 1), (1, 1), (1, 1), (3, 1)]);
        let roots: Vec<u64> = ps.iter().filter_map(|p| p.root()).collect();
        assert!(roots.contains(&(43 - 7)));
        let p7 = ps.iter().find(|p| p.root() == Some(36)).unwrap();
        let x = k.add(&k.gen(), &k.from_int(7));
        assert_eq!(member_via_residue(&k, &x, p7), Membership::In);
        assert_eq!(member_via_residue(&k, &k.one(), p7), Membership::NotIn);
        assert_eq!(member_via_residue(&k, &k.zero(), p7), Membership::In);
    }

    #[test]
    fn kd_rejects_square_discriminant() {
        let k = NumberField::from_i64(&[-964, 1766, -1077, 261, -27, 1]).unwrap();
        assert!(kummer_dedekind(&k, 2).is_err());
    }

    #[test]
    fn witness_route() {
        let k = NumberField::from_i64(&[26, -11, 1]).unwrap();
        let w = k.add(&k.gen(), &k.from_int(5));
        // (a+5)(a-16) = a^2 - 11a - 80 = -106
        let x = k.from_int(106);
        assert!(member_via_witness(&k, &x, 2, &w, &BigInt::one()).is_in());
        let y = k.from_int(3);
        assert!(!member_via_witness(&k, &y, 2, &w, &BigInt::from(53)).is_in());
        assert_eq!(find_aux(&k, &[k.from_int(2)], 2, &w, None), Some(BigInt::from(53)));
    }
}
