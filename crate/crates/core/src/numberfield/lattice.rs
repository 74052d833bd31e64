//! Full-rank Z-lattices in a number field, for orders and their ideals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::field::{Elem, NumberField};
use crate::exactcore::poly_discriminant;
use crate::{Error, Result};

/// Lattice `(1/den) * rowspace(rows)`, with `rows` in Hermite normal form:
/// upper triangular, positive diagonal, entries above each pivot reduced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    den: BigInt,
    rows: Vec<Vec<BigInt>>,
}

impl Lattice {
    /// The lattice spanned by `gens`, which must have full rank `n`.
    pub fn span(gens: &[Elem], n: usize) -> Result<Lattice> {
        let den = gens
            .iter()
            .flat_map(|g| g.0.iter())
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let m: Vec<Vec<BigInt>> = gens
            .iter()
            .map(|g| g.0.iter().map(|c| (c * BigRational::from_integer(den.clone())).to_integer()).collect())
            .collect();
        let rows = hnf(m, n).ok_or_else(|| Error::Singular("generators do not span a full lattice".into()))?;
        Ok(Lattice { den, rows }.normalize())
    }

    fn normalize(mut self) -> Lattice {
        let g = self.rows.iter().flatten().fold(self.den.clone(), |acc, x| acc.gcd(x));
        if !g.is_one() {
            self.den /= &g;
            for r in self.rows.iter_mut() {
                for x in r.iter_mut() {
                    *x /= &g;
                }
            }
        }
        self
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> Vec<Elem> {
        self.rows
            .iter()
            .map(|r| Elem(r.iter().map(|x| BigRational::new(x.clone(), self.den.clone())).collect()))
            .collect()
    }

    /// Covolume relative to `Z^n`.
    pub fn covolume(&self) -> BigRational {
        let d: BigInt = self.rows.iter().enumerate().map(|(i, r)| r[i].clone()).product();
        BigRational::new(d, self.den.pow(self.rank() as u32))
    }

    pub fn contains(&self, x: &Elem) -> bool {
        // clear the lattice denominator, then peel off rows
        let mut v: Vec<BigRational> = x.0.iter().map(|c| c * BigRational::from_integer(self.den.clone())).collect();
        if v.iter().any(|c| !c.is_integer()) {
            return false;
        }
        for (i, r) in self.rows.iter().enumerate() {
            let q = &v[i] / BigRational::from_integer(r[i].clone());
            if !q.is_integer() {
                return false;
            }
            for (a, b) in v.iter_mut().zip(r) {
                *a -= &q * BigRational::from_integer(b.clone());
            }
        }
        v.iter().all(|c| c.is_zero())
    }

    pub fn contains_lattice(&self, o: &Lattice) -> bool {
        o.basis().iter().all(|x| self.contains(x))
    }

    /// `[self : sub]` for a sublattice.
    pub fn index_of(&self, sub: &Lattice) -> BigRational {
        sub.covolume() / self.covolume()
    }
}

/// Row Hermite normal form of an integer matrix with `n` columns; `None`
/// when the rank is below `n`.
fn hnf(mut m: Vec<Vec<BigInt>>, n: usize) -> Option<Vec<Vec<BigInt>>> {
    let mut out: Vec<Vec<BigInt>> = vec![];
    for c in 0..n {
        loop {
            let nz: Vec<usize> = (0..m.len()).filter(|&i| !m[i][c].is_zero()).collect();
            if nz.is_empty() {
                return None;
            }
            let piv = *nz.iter().min_by_key(|&&i| m[i][c].abs()).unwrap();
            let mut done = true;
            for &i in &nz {
                if i == piv {
                    continue;
                }
                let q = m[i][c].div_floor(&m[piv][c]);
                let p = m[piv].clone();
                for (x, y) in m[i].iter_mut().zip(&p) {
                    *x -= &q * y;
                }
                if !m[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                let mut r = m.swap_remove(piv);
                if r[c].is_negative() {
                    for x in r.iter_mut() {
                        *x = -&*x;
                    }
                }
                out.push(r);
                m.retain(|r| r.iter().any(|x| !x.is_zero()));
                break;
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            let q = out[j][i].div_floor(&out[i][i]);
            if !q.is_zero() {
                let r = out[i].clone();
                for (x, y) in out[j].iter_mut().zip(&r) {
                    *x -= &q * y;
                }
            }
        }
    }
    Some(out)
}

/// An order of a number field given by a Z-basis.
#[derive(Clone, Debug)]
pub struct Order {
    pub field: NumberField,
    pub lattice: Lattice,
}

impl Order {
    /// Smallest order containing `Z[a]` and the given algebraic integers.
    pub fn generated_by(field: &NumberField, extra: &[Elem]) -> Result<Order> {
        let n = field.deg();
        for x in extra {
            if !field.is_integral(x) {
                return Err(Error::Precondition(format!("{x} is not an algebraic integer")));
            }
        }
        let mut gens: Vec<Elem> = (0..n)
            .map(|i| {
                let mut v = vec![BigRational::zero(); n];
                v[i] = BigRational::one();
                Elem(v)
            })
            .collect();
        gens.extend(extra.iter().cloned());
        let mut lat = Lattice::span(&gens, n)?;
        loop {
            let b = lat.basis();
            let mut all = b.clone();
            for i in 0..n {
                for j in i..n {
                    all.push(field.mul(&b[i], &b[j]));
                }
            }
            let next = Lattice::span(&all, n)?;
            if next == lat {
                break;
            }
            lat = next;
        }
        Ok(Order { field: field.clone(), lattice: lat })
    }

    pub fn basis(&self) -> Vec<Elem> {
        self.lattice.basis()
    }

    /// The `p`-maximal order containing `self`. If an order is not maximal
    /// at `p` there is an integral element outside it whose `p`-multiple is
    /// inside, so adjoining integral `(sum e_i b_i) / p` with digits
    /// `0 <= e_i < p` until none is left gives the `p`-maximal order.
    pub fn p_maximal(&self, p: u64) -> Result<Order> {
        let n = self.field.deg();
        if (p as f64).powi(n as i32) > 1e6 {
            return Err(Error::Precondition(format!("{p}^{n} candidates is too many")));
        }
        let pr = BigRational::new(BigInt::one(), BigInt::from(p));
        let mut o = self.clone();
        'grow: loop {
            let b = o.basis();
            let mut digits = vec![0u64; n];
            loop {
                // next digit vector, skipping zero
                let mut i = 0;
                while i < n {
                    digits[i] += 1;
                    if digits[i] < p {
                        break;
                    }
                    digits[i] = 0;
                    i += 1;
                }
                if i == n {
                    break 'grow;
                }
                let mut x = self.field.zero();
                for (d, bi) in digits.iter().zip(&b) {
                    if *d != 0 {
                        x = self.field.add(&x, &self.field.scale(bi, &BigRational::from_integer(BigInt::from(*d))));
                    }
                }
                let x = self.field.scale(&x, &pr);
                if self.field.is_integral(&x) {
                    let gens: Vec<Elem> = b.into_iter().chain([x]).collect();
                    o = Order::generated_by(&self.field, &gens)?;
                    continue 'grow;
                }
            }
        }
        Ok(o)
    }

    /// `[O : Z[a]]`
    pub fn index_over_power_basis(&self) -> BigInt {
        let r = BigRational::one() / self.lattice.covolume();
        assert!(r.is_integer());
        r.to_integer()
    }

    /// Discriminant of the order, `disc(minpoly) / [O : Z[a]]^2`.
    pub fn discriminant(&self) -> BigInt {
        let i = self.index_over_power_basis();
        poly_discriminant(self.field.minpoly()) / (&i * &i)
    }

    /// True when the order is maximal at `p`, detected by `p^2` not
    /// dividing its discriminant.
    pub fn certainly_maximal_at(&self, p: u64) -> bool {
        let p2 = BigInt::from(p * p);
        !(self.discriminant() % p2).is_zero()
    }

    pub fn ideal(&self, gens: &[Elem]) -> Result<Ideal> {
        let b = self.basis();
        let mut all = vec![];
        for g in gens {
            for w in &b {
                all.push(self.field.mul(g, w));
            }
        }
        Ok(Ideal { lattice: Lattice::span(&all, self.field.deg())? })
    }

    pub fn contains(&self, x: &Elem) -> bool {
        self.lattice.contains(x)
    }
}

/// A nonzero ideal of an order, as a lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ideal {
    pub lattice: Lattice,
}

impl Ideal {
    /// `[O : I]`
    pub fn norm(&self, o: &Order) -> BigInt {
        let r = o.lattice.index_of(&self.lattice);
        assert!(r.is_integer(), "ideal not inside the order");
        r.to_integer()
    }

    pub fn contains(&self, x: &Elem) -> bool {
        self.lattice.contains(x)
    }

    pub fn mul(&self, o: &Order, other: &Ideal) -> Result<Ideal> {
        let mut all = vec![];
        for x in self.lattice.basis() {
            for y in other.lattice.basis() {
                all.push(o.field.mul(&x, &y));
            }
        }
        Ok(Ideal { lattice: Lattice::span(&all, o.field.deg())? })
    }

    pub fn add(&self, o: &Order, other: &Ideal) -> Result<Ideal> {
        let mut all = self.lattice.basis();
        all.extend(other.lattice.basis());
        Ok(Ideal { lattice: Lattice::span(&all, o.field.deg())? })
    }

    /// Residue representatives of `O / I`, for small norms.
    fn residues(&self, o: &Order) -> Result<Vec<Elem>> {
        // coordinates of the ideal basis in the order basis are triangular
        // after a change of basis; enumerate the box given by the diagonal
        let ob = o.basis();
        let n = ob.len();
        let to_order = |x: &Elem| -> Vec<BigRational> {
            let m: Vec<Vec<BigRational>> = (0..n).map(|i| (0..n).map(|j| ob[j].0[i].clone()).collect()).collect();
            super::linalg::solve(&super::linalg::Rationals, &m, &x.0).expect("basis")
        };
        let rel: Vec<Elem> = self.lattice.basis().iter().map(|x| Elem(to_order(x))).collect();
        let rel = Lattice::span(&rel, n)?;
        let diag: Vec<BigInt> = rel.rows.iter().enumerate().map(|(i, r)| r[i].clone() / &rel.den).collect();
        let total: BigInt = diag.iter().product();
        if total > BigInt::from(4096) {
            return Err(Error::Precondition("residue ring too large to enumerate".into()));
        }
        let mut out = vec![o.field.zero()];
        for (i, d) in diag.iter().enumerate() {
            let d = i64::try_from(d).unwrap();
            let mut next = vec![];
            for x in &out {
                for k in 0..d {
                    next.push(o.field.add(x, &o.field.scale(&ob[i], &BigRational::from_integer(k.into()))));
                }
            }
            out = next;
        }
        Ok(out)
    }

    /// `O / I` is a field. Only for small norms.
    pub fn is_prime(&self, o: &Order) -> Result<bool> {
        if self.norm(o).is_one() {
            return Ok(false);
        }
        let one = o.ideal(&[o.field.one()])?;
        for x in self.residues(o)? {
            if self.contains(&x) {
                continue;
            }
            let s = self.add(o, &o.ideal(&[x])?)?;
            if s != one {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn gaussian_integers() {
        let k = NumberField::from_i64(&[1, 0, 1]).unwrap();
        let o = Order::generated_by(&k, &[]).unwrap();
        assert_eq!(o.index_over_power_basis(), BigInt::from(1));
        let p = o.ideal(&[k.elem(vec![r(1, 1), r(1, 1)])]).unwrap();
        assert_eq!(p.norm(&o), BigInt::from(2));
        assert!(p.is_prime(&o).unwrap());
        let two = o.ideal(&[k.from_int(2)]).unwrap();
        assert_eq!(p.mul(&o, &p).unwrap(), two);
        let three = o.ideal(&[k.from_int(3)]).unwrap();
        assert!(three.is_prime(&o).unwrap());
        let five = o.ideal(&[k.from_int(5)]).unwrap();
        assert!(!five.is_prime(&o).unwrap());
    }

    #[test]
    fn order_closure() {
        // Z[sqrt 5] inside Z[(1 + sqrt 5)/2]
        let k = NumberField::from_i64(&[-5, 0, 1]).unwrap();
        let phi = k.elem(vec![r(1, 2), r(1, 2)]);
        let o = Order::generated_by(&k, &[phi.clone()]).unwrap();
        assert_eq!(o.index_over_power_basis(), BigInt::from(2));
        assert_eq!(o.discriminant(), BigInt::from(5));
        assert!(o.contains(&phi));
        assert!(!o.contains(&k.elem(vec![r(1, 2)])));
        let z = Order::generated_by(&k, &[]).unwrap().p_maximal(2).unwrap();
        assert_eq!(z.index_over_power_basis(), BigInt::from(2));
        assert!(z.contains(&phi));
        // Z[2i] grows to Z[i]
        let k = NumberField::from_i64(&[4, 0, 1]).unwrap();
        let o = Order::generated_by(&k, &[]).unwrap().p_maximal(2).unwrap();
        assert_eq!(o.index_over_power_basis(), BigInt::from(2));
        assert_eq!(o.discriminant(), BigInt::from(-4));
    }
}
