use super::ring::CoeffRing;
use crate::{Error, Result};

/// Truncated series in `q^(1/den)`: `coeffs[n]` is the coefficient of
/// `q^(n/den)`, known for `n < coeffs.len()`.
#[derive(Clone, Debug, PartialEq)]
pub struct PuiseuxSeries<E> {
    pub den: i64,
    pub coeffs: Vec<E>,
}

impl<E: Clone> PuiseuxSeries<E> {
    pub fn new(den: i64, coeffs: Vec<E>) -> Self {
        assert!(den >= 1);
        PuiseuxSeries { den, coeffs }
    }

    /// Coefficient of `q^(num/den)`.
    pub fn coeff(&self, num: usize) -> Option<&E> {
        self.coeffs.get(num)
    }

    /// Coefficients of the integral powers `q^0, q^1, ...` within the
    /// truncation.
    pub fn integral_part(&self) -> Vec<E> {
        self.coeffs.iter().step_by(self.den as usize).cloned().collect()
    }

    pub fn valuation<R: CoeffRing<E = E>>(&self, ring: &R) -> Option<usize> {
        valuation(ring, &self.coeffs)
    }

    /// Product truncated to the common precision.
    pub fn mul<R: CoeffRing<E = E>>(&self, o: &Self, ring: &R) -> Result<Self> {
        if self.den != o.den {
            return Err(Error::Precondition("series with different q-denominators".into()));
        }
        let len = self.coeffs.len().min(o.coeffs.len());
        Ok(PuiseuxSeries::new(self.den, mul_trunc(ring, &self.coeffs, &o.coeffs, len)))
    }

    /// Quotient, with precision reduced by the valuation of the divisor.
    pub fn div<R: CoeffRing<E = E>>(&self, o: &Self, ring: &R) -> Result<Self> {
        if self.den != o.den {
            return Err(Error::Precondition("series with different q-denominators".into()));
        }
        let v = valuation(ring, &o.coeffs).ok_or_else(|| Error::Singular("division by a zero series".into()))?;
        let len = self.coeffs.len().min(o.coeffs.len()).saturating_sub(v);
        Ok(PuiseuxSeries::new(self.den, div_trunc(ring, &self.coeffs, &o.coeffs, len)?))
    }
}

pub fn valuation<R: CoeffRing>(ring: &R, a: &[R::E]) -> Option<usize> {
    a.iter().position(|x| !ring.is_zero(x))
}

/// First `len` coefficients of `a b`.
pub fn mul_trunc<R: CoeffRing>(ring: &R, a: &[R::E], b: &[R::E], len: usize) -> Vec<R::E> {
    let va = valuation(ring, a).unwrap_or(a.len());
    let vb = valuation(ring, b).unwrap_or(b.len());
    let brev: Vec<R::E> = b.iter().rev().cloned().collect();
    let mut out = vec![ring.zero(); len];
    for (n, o) in out.iter_mut().enumerate() {
        if n < va + vb {
            continue;
        }
        // sum_{i = lo}^{hi} a[i] b[n - i]
        let hi = (n - vb).min(a.len().saturating_sub(1));
        let lo = va.max((n + 1).saturating_sub(b.len()));
        if lo > hi || a.is_empty() {
            continue;
        }
        // b[n - i] for i = lo..=hi is brev[b.len() - 1 - n + i]
        let off = b.len() - 1 + lo - n;
        *o = ring.dot(&a[lo..=hi], &brev[off..off + (hi - lo + 1)]);
    }
    out
}

/// First `len` coefficients of `num / den`, where `num` vanishes below the
/// valuation `v` of `den`. Needs `len + v` coefficients of both.
pub fn div_trunc<R: CoeffRing>(ring: &R, num: &[R::E], den: &[R::E], len: usize) -> Result<Vec<R::E>> {
    let v = valuation(ring, den).ok_or_else(|| Error::Singular("division by a zero series".into()))?;
    if num.len() < len + v || den.len() < len + v {
        return Err(Error::Precondition("series too short for the requested quotient precision".into()));
    }
    if num[..v].iter().any(|x| !ring.is_zero(x)) {
        return Err(Error::InexactDivision("quotient has a pole at the cusp".into()));
    }
    let inv = ring.inv(&den[v]).ok_or_else(|| Error::Singular("leading coefficient not invertible".into()))?;
    // drev[j] = den[v + len - 1 - j]
    let drev: Vec<R::E> = den[v..v + len].iter().rev().cloned().collect();
    let mut q: Vec<R::E> = Vec::with_capacity(len);
    for n in 0..len {
        // sum_{i < n} q[i] den[v + n - i]
        let s = if n == 0 { ring.zero() } else { ring.dot(&q[..n], &drev[len - 1 - n..len - 1]) };
        let t = ring.sub(&num[v + n], &s);
        q.push(ring.mul(&t, &inv));
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::super::ring::Fl;
    use super::*;

    #[test]
    fn mul_then_div_roundtrip() {
        let f = Fl::split(1, 1 << 20);
        let a: Vec<u64> = vec![0, 0, 3, 1, 4, 1, 5, 9, 2, 6];
        let b: Vec<u64> = vec![0, 2, 7, 1, 8, 2, 8, 1, 8, 2];
        let ab = mul_trunc(&f, &a, &b, 10);
        assert_eq!(&ab[..4], &[0, 0, 0, 6]);
        assert_eq!(ab[4], 3 * 7 + 2);
        let q = div_trunc(&f, &ab, &b, 9).unwrap();
        assert_eq!(&q[..], &a[..9]);
        let s = PuiseuxSeries::new(3, (0..10u64).collect());
        assert_eq!(s.integral_part(), vec![0, 3, 6, 9]);
    }
}
