use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::eigvec::{apply, apply_shifted, eigenvector_coeffs, kernel_vector, proportionality};
use super::field::{Elem, NumberField};
use super::ideal::{find_aux, kummer_dedekind, member_via_residue, member_via_witness, KDPrime, Membership};
use super::lattice::Order;
use super::linalg::charpoly_q;
use crate::data::{parse_factored, FieldData, IdealData, LevelData};
use crate::exactcore::{is_prime_u64, irreducibility_certificate, poly_discriminant, IntPoly};
use crate::Result;

#[derive(Clone, Debug, Serialize)]
pub struct Claim {
    pub key: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CongruenceReport {
    pub level: i64,
    pub claims: Vec<Claim>,
}

impl CongruenceReport {
    pub fn all_pass(&self) -> bool {
        self.claims.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&Claim> {
        self.claims.iter().filter(|c| !c.pass).collect()
    }

    fn push(&mut self, key: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.claims.push(Claim { key: key.into(), pass, detail: detail.into() });
    }
}

impl fmt::Display for CongruenceReport {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        for c in &self.claims {
            writeln!(f, "{}  {}  {}", if c.pass { "PASS" } else { "FAIL" }, c.key, c.detail)?;
        }
        Ok(())
    }
}

/// Everything the congruence theorems need beyond the published tables.
pub struct CongruenceInput<'a> {
    pub data: &'a LevelData,
    /// `T(p)` on the lift basis, `G[j] | T = sum_i M[i][j] G[i]`
    pub hecke: &'a BTreeMap<i64, Vec<Vec<i64>>>,
    /// `lambda_f(T(p))` of the nonlift
    pub lambda_f: &'a BTreeMap<i64, i64>,
}

fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

fn mat_q(m: &[Vec<i64>]) -> Vec<Vec<BigRational>> {
    m.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect()
}

fn int_poly(c: &[BigRational]) -> Option<IntPoly> {
    c.iter().all(|x| x.is_integer()).then(|| IntPoly::new(c.iter().map(|x| x.to_integer()).collect()))
}

pub fn verify_congruence(inp: &CongruenceInput) -> Result<CongruenceReport> {
    let d = inp.data;
    let mut rep = CongruenceReport { level: d.level, claims: vec![] };
    let n = d.level;

    // characteristic polynomial of T(2) and its factors
    let cp = int_poly(&charpoly_q(&mat_q(&d.hecke.t2))).expect("integer matrix");
    let prod = d.charpoly();
    rep.push(format!("{n}/charpoly"), cp == prod, format!("det(x - M) = {cp}"));
    for f in &d.hecke.charpoly_factors {
        let f = IntPoly::from_i64(f);
        let cert = irreducibility_certificate(&f, 500);
        rep.push(
            format!("{n}/irreducible {f}"),
            cert.is_some(),
            match cert {
                Some(ps) => format!("degree patterns modulo {ps:?}"),
                None => "no certificate".into(),
            },
        );
    }
    if let Some(m) = inp.hecke.get(&2) {
        rep.push(format!("{n}/T(2) matrix"), *m == d.hecke.t2, "restriction-solved against published");
    }
    let disc = poly_discriminant(&cp);
    let pub_disc = parse_factored(&d.hecke.charpoly_disc)?;
    rep.push(format!("{n}/disc(charpoly)"), disc == pub_disc, format!("{disc} vs published {}", d.hecke.charpoly_disc));

    for fd in &d.field {
        verify_field(inp, fd, &mut rep)?;
    }
    Ok(rep)
}

/// `lambda_f(T(p))`, computed if available, else published.
fn lambda_f(inp: &CongruenceInput, p: i64) -> Option<i64> {
    inp.lambda_f.get(&p).copied().or_else(|| inp.data.tp(p))
}

/// Eigenvalue of `M` on `d`, if `d` is an eigenvector.
fn eigenvalue_on(k: &NumberField, m: &[Vec<i64>], d: &[Elem]) -> Option<Elem> {
    let md = apply(k, m, d);
    proportionality(k, d, &md)
}

fn verify_field(inp: &CongruenceInput, fd: &FieldData, rep: &mut CongruenceReport) -> Result<()> {
    let data = inp.data;
    let key = format!("{}/{}", data.level, fd.name);
    let k = NumberField::from_i64(&fd.minpoly)?;
    let disc = poly_discriminant(k.minpoly());
    let pub_disc = parse_factored(&fd.disc)?;
    rep.push(format!("{key}/disc"), disc == pub_disc, format!("{disc}"));

    let dvec: Vec<Elem> = fd.vector.iter().map(|v| k.parse(v)).collect::<Result<_>>()?;
    let integral = dvec.iter().all(|x| k.is_integral(x));
    rep.push(format!("{key}/d_j integral"), integral, format!("{} coefficients", dvec.len()));
    let m2 = &data.hecke.t2;
    let kernel_ok = apply_shifted(&k, m2, &dvec).iter().all(|x| k.is_zero(x));
    rep.push(format!("{key}/(M - a) d = 0"), kernel_ok, "T(2) eigenvector with eigenvalue a");
    let v = kernel_vector(&k, m2)?;
    let ratio = proportionality(&k, &v, &dvec);
    rep.push(
        format!("{key}/eigenspace"),
        ratio.is_some(),
        match &ratio {
            Some(r) => format!("d = ({r}) v for the kernel vector v with last entry 1"),
            None => "d is not a multiple of the kernel vector".into(),
        },
    );

    for idl in &fd.ideal {
        verify_ideal(inp, &k, fd, idl, &dvec, rep)?;
    }

    // eigenvalue-difference norms and their gcd
    let mut diffs: BTreeMap<String, Elem> = BTreeMap::new();
    let lam2 = lambda_f(inp, 2).expect("lambda(T(2))");
    diffs.insert("T2".into(), k.sub(&k.gen(), &k.from_int(lam2)));
    for (name, p, published) in [("T3", 3, &fd.lambda_t3), ("T5", 5, &fd.lambda_t5)] {
        let Some(published) = published else { continue };
        let lg = k.parse(published)?;
        if let Some(mp) = inp.hecke.get(&p) {
            let computed = eigenvalue_on(&k, mp, &dvec);
            rep.push(
                format!("{key}/lambda_g(T({p}))"),
                computed.as_ref() == Some(&lg),
                format!("published {lg}, from the restriction-solved T({p}) matrix: {}", computed.map_or("none".into(), |x| x.to_string())),
            );
        }
        let lf = lambda_f(inp, p).expect("lambda(T(p))");
        diffs.insert(name.into(), k.sub(&lg, &k.from_int(lf)));
    }
    if let (Some(a), Some(b)) = (diffs.get("T2").cloned(), diffs.get("T3").cloned()) {
        diffs.insert("T2+T3".into(), k.add(&a, &b));
    }
    let mut g = BigInt::zero();
    for nd in &fd.norms {
        let Some(x) = diffs.get(&nd.what) else {
            rep.push(format!("{key}/norm {}", nd.what), false, "difference not available");
            continue;
        };
        // a difference that is already rational is used as it stands
        let (nx, label) = match k.to_rational(x) {
            Some(r) => (r, "difference"),
            None => (k.norm(x), "N"),
        };
        let want = parse_factored(&nd.value)?;
        rep.push(
            format!("{key}/norm {}", nd.what),
            nx.is_integer() && nx.to_integer().abs() == want.abs(),
            format!("{label} = {nx}, published {}", nd.value),
        );
        if nx.is_integer() {
            g = g.gcd(&nx.to_integer());
        }
    }
    let want = parse_factored(&fd.norm_gcd)?;
    rep.push(format!("{key}/gcd of norms"), g == want, format!("{g}, published {}", fd.norm_gcd));

    // Hecke eigenvalue congruences for every available T(p)
    for idl in &fd.ideal {
        let route = IdealRoute::new(&k, idl, &dvec)?;
        for (&p, mp) in inp.hecke {
            let Some(lg) = eigenvalue_on(&k, mp, &dvec) else {
                rep.push(format!("{key}/{}/T({p}) eigenvector", idl.name), false, "d is not a T(p) eigenvector");
                continue;
            };
            let Some(lf) = lambda_f(inp, p) else { continue };
            let diff = k.sub(&lg, &k.from_int(lf));
            let m = route.member(&k, &diff);
            rep.push(
                format!("{key}/{}/lambda(T({p})) congruence", idl.name),
                m.is_in(),
                format!("lambda_g = {lg}, lambda_f = {lf}: {m:?}"),
            );
        }
    }
    Ok(())
}

/// Independent membership test for an ideal: the residue map at a degree
/// one Kummer-Dedekind prime, or a lattice computation in an order that is
/// maximal at the modulus.
enum IdealRoute {
    Residue(KDPrime),
    Lattice(Order, super::lattice::Ideal),
    None(String),
}

impl IdealRoute {
    fn new(k: &NumberField, idl: &IdealData, dvec: &[Elem]) -> Result<IdealRoute> {
        let gen = k.parse(&idl.generator)?;
        let p = idl.modulus as u64;
        if is_prime_u64(p) {
            if let Ok(kd) = kummer_dedekind(k, p) {
                if let Some(pr) = kd.into_iter().find(|pr| pr.f == 1 && same_mod(k, &pr.ideal.gen, &gen, p)) {
                    return Ok(IdealRoute::Residue(pr));
                }
            }
        }
        let w = k.parse(&idl.witness)?;
        let mut extra: Vec<Elem> = dvec.to_vec();
        extra.push(w.clone());
        extra.push(gen.clone());
        if let Some(v) = &idl.cube_root {
            extra.push(k.parse(v)?);
        }
        let mut o = Order::generated_by(k, &extra)?;
        for q in crate::exactcore::prime_factors_u64(p) {
            match o.p_maximal(q) {
                Ok(m) => o = m,
                Err(e) => return Ok(IdealRoute::None(e.to_string())),
            }
        }
        let i = o.ideal(&[k.from_int(idl.modulus), gen])?;
        Ok(IdealRoute::Lattice(o, i))
    }

    fn member(&self, k: &NumberField, x: &Elem) -> Membership {
        match self {
            IdealRoute::Residue(pr) => member_via_residue(k, x, pr),
            IdealRoute::Lattice(o, i) => {
                if !o.contains(x) {
                    Membership::Inconclusive("element outside the order".into())
                } else if i.contains(x) {
                    Membership::In
                } else {
                    Membership::NotIn
                }
            }
            IdealRoute::None(why) => Membership::Inconclusive(why.clone()),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            IdealRoute::Residue(_) => "residue map",
            IdealRoute::Lattice(..) => "lattice",
            IdealRoute::None(_) => "none",
        }
    }
}

/// `x - y` lies in `p Z[a]`.
fn same_mod(k: &NumberField, x: &Elem, y: &Elem, p: u64) -> bool {
    let t = k.sub(x, y);
    let pb = BigInt::from(p);
    t.0.iter().all(|c| c.is_integer() && (c.to_integer() % &pb).is_zero())
}

#[allow(clippy::too_many_arguments)]
fn verify_ideal(
    inp: &CongruenceInput,
    k: &NumberField,
    fd: &FieldData,
    idl: &IdealData,
    dvec: &[Elem],
    rep: &mut CongruenceReport,
) -> Result<()> {
    let data = inp.data;
    let key = format!("{}/{}/{}", data.level, fd.name, idl.name);
    let p = idl.modulus as u64;
    let gen = k.parse(&idl.generator)?;
    let w = k.parse(&idl.witness)?;

    if is_prime_u64(p) {
        match kummer_dedekind(k, p) {
            Ok(kd) => {
                let mut got: Vec<Vec<i64>> =
                    kd.iter().map(|pr| pr.factor.coeffs().iter().map(|c| i64::try_from(c).unwrap()).collect()).collect();
                got.sort();
                if let Some(pubf) = &idl.mod_factors {
                    let mut want = pubf.clone();
                    want.sort();
                    rep.push(format!("{key}/factorisation mod {p}"), got == want, format!("{got:?}"));
                }
                let sum: usize = kd.iter().map(|pr| pr.e as usize * pr.f).sum();
                rep.push(format!("{key}/sum e f = degree"), sum == k.deg(), format!("{sum}"));
                let hit = kd.iter().find(|pr| same_mod(k, &pr.ideal.gen, &gen, p));
                rep.push(
                    format!("{key}/prime (Kummer-Dedekind)"),
                    hit.is_some(),
                    match hit {
                        Some(pr) => format!("<{p}, {}> with e = {}, f = {}, norm {p}^{}", pr.ideal.gen, pr.e, pr.f, pr.f),
                        None => "generator is not a factor modulo p".into(),
                    },
                );
                // <p, w> = I: w in I and p exactly divides N(w) (then <p, w> is
                // prime of norm p)
                if let Some(pr) = hit {
                    let nw = k.norm(&w);
                    if let Some(pn) = &idl.witness_norm {
                        let want = parse_factored(pn)?;
                        rep.push(format!("{key}/N(w)"), nw == rat(want), format!("{nw}"));
                    }
                    let same = same_mod(k, &w, &gen, p);
                    let exact = nw.is_integer() && {
                        let z = nw.to_integer();
                        let pb = BigInt::from(p);
                        (&z % &pb).is_zero() && !(&z % (&pb * &pb)).is_zero()
                    };
                    let inside = member_via_residue(k, &w, pr).is_in();
                    let others: Vec<String> = kd
                        .iter()
                        .filter(|q| q.f == 1 && !same_mod(k, &q.ideal.gen, &gen, p))
                        .map(|q| format!("{:?}", member_via_residue(k, &k.scale(&w, &rat(k.denominator(&w))), q)))
                        .collect();
                    rep.push(
                        format!("{key}/<{p}, w> = I"),
                        same || (exact && inside),
                        if same {
                            "w is the generator modulo p".to_string()
                        } else {
                            format!("p || N(w), w in I; cleared w against the other norm-p primes: {others:?}")
                        },
                    );
                }
            }
            Err(e) => rep.push(format!("{key}/prime (Kummer-Dedekind)"), false, e.to_string()),
        }
    }

    let route = IdealRoute::new(k, idl, dvec)?;
    if let IdealRoute::Lattice(o, i) = &route {
        let norm = i.norm(o);
        if let Some(want) = idl.norm {
            rep.push(format!("{key}/norm"), norm == BigInt::from(want), format!("[O : I] = {norm} in an order of index {} over Z[a]", o.index_over_power_basis()));
        }
        if let Some(cr) = &idl.cube_root {
            let q = o.ideal(&[k.from_int(2), k.parse(cr)?])?;
            let qn = q.norm(o);
            let prime = q.is_prime(o)?;
            rep.push(format!("{key}/<2, v> prime"), prime, format!("norm {qn}"));
            let cube = q.mul(o, &q)?.mul(o, &q)?;
            rep.push(format!("{key}/<2, v>^3 = I"), cube == *i, "compared as lattices");
        }
    }

    // coefficientwise congruence: c_j - scale d_j in I for every j, then the
    // nonlift quotient scale
    let c = &data.nonlift.linear;
    let sc = rat(idl.scale);
    let xs: Vec<Elem> = c.iter().zip(dvec).map(|(&cj, dj)| k.sub(&k.from_int(cj), &k.scale(dj, &sc))).collect();
    let published_aux = parse_factored(&idl.aux)?;
    let aux = find_aux(k, &xs, p, &w, Some(&published_aux));
    rep.push(
        format!("{key}/multiplier"),
        aux.is_some(),
        match &aux {
            Some(a) if *a == published_aux => format!("{a} as published"),
            Some(a) => format!("{a} (published {published_aux} fails)"),
            None => "no multiplier found".into(),
        },
    );
    for (j, x) in xs.iter().enumerate() {
        let m1 = match &aux {
            Some(a) => member_via_witness(k, x, p, &w, a),
            None => Membership::Inconclusive("no multiplier".into()),
        };
        let m2 = route.member(k, x);
        rep.push(
            format!("{key}/c_{} - ({}) d_{} in I", j + 1, idl.scale, j + 1),
            m1.is_in() && m2.is_in(),
            format!("witness route {m1:?}, {} route {m2:?}", route.name()),
        );
    }
    let q = data.nonlift.scale;
    let qm = route.member(k, &k.from_int(q));
    rep.push(
        format!("{key}/quotient scale {q} in I"),
        q % idl.modulus == 0 && qm.is_in(),
        format!("{} divides {q}; {} route {qm:?}", idl.modulus, route.name()),
    );

    // the normalisation search of the eigenvector, at a prime modulus
    if is_prime_u64(p) {
        let md = BigInt::from(p);
        let table_ok = xs.iter().all(|x| {
            let nx = k.norm(x);
            nx.is_integer() && (nx.to_integer() % &md).is_zero()
        });
        // the search over rational multipliers is informational: a table
        // vector may be a non-rational multiple of the kernel vector
        let search = match eigenvector_coeffs(k, &data.hecke.t2, c, p, idl.scale, 4 * idl.modulus.max(8)) {
            Ok(e) => {
                let agree = e.d.iter().zip(dvec).all(|(x, y)| route.member(k, &k.scale(&k.sub(x, y), &sc)).is_in());
                format!(
                    "search gives ell = {}, b = {}, {} the table modulo I",
                    e.ell,
                    e.b,
                    if agree { "agreeing with" } else { "differing from" }
                )
            }
            Err(e) => format!("search: {e}"),
        };
        rep.push(
            format!("{key}/normalisation"),
            table_ok,
            format!("{p} divides N(c_j - ({}) d_j) for the table; {search}", idl.scale),
        );
    }
    Ok(())
}
