use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::fp::{mul_mod, pow_mod};
use crate::{Error, Result};

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn prime_factors_u64(mut n: u64) -> Vec<u64> {
    let mut out = vec![];
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&k| is_prime_u64(k)).collect()
}

/// Legendre symbol `(a/p)` for an odd prime `p`.
pub fn legendre(a: i64, p: u64) -> i32 {
    let r = a.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Kronecker-style symbol `(a/p)` also covering `p = 2`.
pub fn kronecker_prime(a: i64, p: u64) -> i32 {
    if p != 2 {
        return legendre(a, p);
    }
    if a % 2 == 0 {
        0
    } else if matches!(a.rem_euclid(8), 1 | 7) {
        1
    } else {
        -1
    }
}

/// The least prime `l >= min_l` with `l = 1 mod mu`, and a root
/// `r` of exact multiplicative order `mu` modulo `l`, of the form `g^((l-1)/mu)`
/// with `g` minimal.
pub fn find_split_prime(mu: u64, min_l: u64) -> (u64, u64) {
    assert!(mu >= 1);
    let start = min_l.max(2);
    let mut l = start + (1 % mu + mu - start % mu) % mu;
    while !is_prime_u64(l) {
        l += mu;
    }
    let qs = prime_factors_u64(mu);
    // g^((l-1)/mu) has order exactly mu for suitable g; take the least such power
    let r = (1..l)
        .map(|g| pow_mod(g, (l - 1) / mu, l))
        .find(|&r| qs.iter().all(|&q| pow_mod(r, mu / q, l) != 1))
        .expect("cyclic group has an element of each order dividing l-1");
    (l, r)
}

/// Reconstruct the unique integer of absolute value at most `bound` from its
/// residues. Residues may be given as any representatives.
pub fn crt_lift(residues: &[(BigInt, u64)], bound: &BigInt) -> Result<BigInt> {
    let mut x = BigInt::zero();
    let mut m = BigInt::one();
    for (r, p) in residues {
        let pb = BigInt::from(*p);
        if !m.gcd(&pb).is_one() {
            return Err(Error::Precondition(format!("modulus {p} is not coprime to the others")));
        }
        // x + m*t = r mod p
        let inv = m.mod_floor(&pb).modpow(&(&pb - 2u32), &pb);
        let t = ((r - &x).mod_floor(&pb) * inv).mod_floor(&pb);
        x += &m * t;
        m *= pb;
    }
    if m <= BigInt::from(2) * bound {
        return Err(Error::Precondition(format!(
            "modulus product {m} does not exceed twice the bound {bound}"
        )));
    }
    let mut y = x.mod_floor(&m);
    if BigInt::from(2) * &y > m {
        y -= &m;
    }
    if y.abs() > *bound {
        return Err(Error::Inconsistent(format!("lift {y} exceeds bound {bound}")));
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_primes() {
        assert_eq!(find_split_prime(2, 10), (11, 10));
        assert_eq!(find_split_prime(4, 10), (13, 8));
        assert_eq!(find_split_prime(1, 100), (101, 1));
        let (l, r) = find_split_prime(61 * 61, 1 << 30);
        assert_eq!(l % (61 * 61), 1);
        assert_eq!(pow_mod(r, 61 * 61, l), 1);
        assert_ne!(pow_mod(r, 61, l), 1);
    }

    #[test]
    fn primality() {
        let ps: Vec<u64> = (0..60).filter(|&n| is_prime_u64(n)).collect();
        assert_eq!(ps, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
        assert!(is_prime_u64(1_000_000_007));
        assert!(!is_prime_u64(1_000_000_007 * 3));
    }

    #[test]
    fn legendre_symbols() {
        assert_eq!(legendre(-1, 61), 1);
        assert_eq!(legendre(-1, 79), -1);
        assert_eq!(kronecker_prime(2, 61), -1);
        assert_eq!(kronecker_prime(2, 73), 1);
    }
}
