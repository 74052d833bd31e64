use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{bail, Context, Result};
use paramod::borcherds::{divisor_table, psi_from_theta_block};
use paramod::data::LevelData;
use paramod::eulerfactor::{bad_relation, spin_euler_bad, spin_euler_good, EulerPolynomial};
use paramod::exactcore::{inv_mod, mul_mod};
use paramod::jacobi::{admissibility_defect, dim_jacobi_cusp, JacobiCoeffTable};
use paramod::numberfield::{verify_congruence, CongruenceInput};
use paramod::paramodular::{
    dim_paramodular_cusp3, nonlift_coeff, unit_content_witness, FjQuotient, ParamodularIndex,
};
use paramod::restrict::{
    compare_speedups, default_pool, eigenvalue, lift_hecke_matrices, restrict, Cyclotomic, FormExpr, HeckeOp, Fl,
    RestrictionMatrix, LIFT_MATRIX_EXPONENTS,
};

use crate::cache::Cache;
use crate::config::{Format, Op, RunConfig};

/// What a command prints, and whether every check it made passed.
pub struct Outcome {
    pub text: String,
    pub ok: bool,
}

fn pool(cfg: &RunConfig, d: &LevelData) -> Result<Vec<RestrictionMatrix>> {
    match &cfg.s_pool {
        Some(v) => v.iter().map(|&[a, b, c]| Ok(RestrictionMatrix::new(cfg.level, a, b, c)?)).collect(),
        None => Ok(default_pool(cfg.level, Some(d.restriction.s))),
    }
}

/// Run independent jobs on `workers` threads; results keep the job order.
fn run_jobs<J: Sync, T: Send>(jobs: &[J], workers: usize, f: impl Fn(&J) -> T + Sync) -> Vec<T> {
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<T>>> = Mutex::new((0..jobs.len()).map(|_| None).collect());
    std::thread::scope(|sc| {
        for _ in 0..workers.min(jobs.len()).max(1) {
            sc.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= jobs.len() {
                    break;
                }
                let r = f(&jobs[i]);
                slots.lock().unwrap()[i] = Some(r);
            });
        }
    });
    slots.into_inner().unwrap().into_iter().map(|x| x.expect("every job ran")).collect()
}

fn rank_mod(rows: &[Vec<u64>], l: u64) -> usize {
    let mut m = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| m[i][c] != 0) else { continue };
        m.swap(rank, p);
        let inv = inv_mod(m[rank][c], l).unwrap();
        let piv: Vec<u64> = m[rank].iter().map(|&x| mul_mod(x, inv, l)).collect();
        for (i, row) in m.iter_mut().enumerate() {
            if i != rank && row[c] != 0 {
                let f = row[c];
                for (x, y) in row.iter_mut().zip(&piv) {
                    *x = (*x + l - mul_mod(f, *y, l)) % l;
                }
            }
        }
        m[rank] = piv;
        rank += 1;
    }
    rank
}

pub fn basis(cfg: &RunConfig) -> Result<Outcome> {
    let d = LevelData::load(cfg.level)?;
    let n = cfg.level;
    let mut out = String::new();
    let mut ok = true;
    let specs = d.specs();
    let mut admitted = 0;
    for (j, s) in specs.iter().enumerate() {
        let defect = admissibility_defect(s);
        if defect.is_none() && s.index() == n {
            admitted += 1;
        }
        let status = match (&defect, s.index() == n) {
            (None, true) => "admissible".to_string(),
            (None, false) => format!("index {} != {n}", s.index()),
            (Some(why), _) => why.clone(),
        };
        match cfg.format {
            Format::Text => writeln!(out, "G[{}]  {s}  {status}", j + 1)?,
            Format::Tsv => writeln!(out, "block\t{}\t{s}\t{status}", j + 1)?,
        }
    }
    ok &= admitted == specs.len();
    let dj = dim_jacobi_cusp(3, n)?;
    let ds = dim_paramodular_cusp3(n)?;
    let dim_ok = dj == specs.len() as i64 && ds == dj + 1 && ds == d.dim_cusp && dj == d.dim_lifts;
    if !dim_ok {
        bail!("dimension mismatch at level {n}: S_3 = {ds}, J_3^cusp = {dj}, {} theta blocks", specs.len());
    }

    let cache = Cache::open(cfg)?;
    let (b, built) = cache.basis(&d, cfg.d_max)?;
    eprintln!("jacobi tables {} (D <= {})", if built { "written" } else { "cached" }, b.d_max());
    // the lifts stay independent after restriction along the pool
    let exprs: Vec<FormExpr> = (0..b.dim()).map(|j| FormExpr::lift(j, b.dim())).collect();
    let ring = Fl::split(1, cfg.aux_floor);
    let mut rows = vec![];
    let mut used = vec![];
    let mut rank = 0;
    for s in pool(cfg, &d)? {
        let res = match restrict(&b, &exprs, &s, LIFT_MATRIX_EXPONENTS, &ring) {
            Ok(r) => r,
            Err(paramod::Error::CacheMiss { .. }) => continue,
            Err(e) => return Err(e.into()),
        };
        for e in 0..=LIFT_MATRIX_EXPONENTS as usize {
            rows.push(res.iter().map(|r| r.coeffs[e]).collect::<Vec<u64>>());
        }
        used.push(s);
        rank = rank_mod(&rows, ring.l);
        if rank == b.dim() {
            break;
        }
    }
    ok &= rank == b.dim();
    let used: Vec<String> = used.iter().map(|s| format!("({},{},{})", s.a, s.b, s.c)).collect();
    match cfg.format {
        Format::Text => {
            writeln!(out, "{admitted} blocks admitted at index {n}")?;
            writeln!(out, "dim J_3^cusp({n}) = {dj}")?;
            writeln!(out, "dim S_3(K({n})) = {ds} = {dj} + 1")?;
            writeln!(out, "restricted rank {rank} of {} along s = {}", b.dim(), used.join(" "))?;
        }
        Format::Tsv => {
            writeln!(out, "admitted\t{admitted}")?;
            writeln!(out, "dim_jacobi_cusp\t{dj}")?;
            writeln!(out, "dim_paramodular_cusp\t{ds}")?;
            writeln!(out, "restricted_rank\t{rank}\t{}", used.join(" "))?;
        }
    }
    Ok(Outcome { text: out, ok })
}

pub enum ExpandForm {
    Nonlift,
    Lift(usize),
}

pub fn parse_form(s: &str) -> Result<ExpandForm> {
    if s == "f" {
        return Ok(ExpandForm::Nonlift);
    }
    let j = s
        .strip_prefix('G')
        .and_then(|j| j.parse::<usize>().ok())
        .filter(|&j| j >= 1)
        .with_context(|| format!("form {s:?}: expected f or G<j>"))?;
    Ok(ExpandForm::Lift(j - 1))
}

pub fn parse_index(s: &str) -> Result<ParamodularIndex> {
    let v: Vec<i64> = s
        .split(',')
        .map(|x| x.trim().parse())
        .collect::<std::result::Result<_, _>>()
        .with_context(|| format!("bad index {s:?}"))?;
    match v[..] {
        [n, r, m] => Ok(ParamodularIndex::new(n, r, m)),
        _ => bail!("index {s:?} needs n,r,m"),
    }
}

pub fn expand(cfg: &RunConfig, form: &str, indices: &[String]) -> Result<Outcome> {
    let d = LevelData::load(cfg.level)?;
    let form_kind = parse_form(form)?;
    let published: BTreeMap<(i64, i64, i64), i64> =
        d.nonlift.unit_content.iter().map(|&[n, r, m, v]| ((n, r, m), v)).collect();
    let ts: Vec<ParamodularIndex> = if indices.is_empty() {
        published.keys().map(|&(n, r, m)| ParamodularIndex::new(n, r, m)).collect()
    } else {
        indices.iter().map(|s| parse_index(s)).collect::<Result<_>>()?
    };
    for t in &ts {
        if !t.in_cusp_support(cfg.level) {
            bail!("({}, {}, {}) is not a cusp index at level {}", t.n, t.r, t.m, cfg.level);
        }
    }
    let (b, _) = Cache::open(cfg)?.basis(&d, cfg.d_max)?;
    let values: Vec<i128> = match form_kind {
        ExpandForm::Lift(j) => {
            if j >= b.dim() {
                bail!("G{} does not exist (dimension {})", j + 1, b.dim());
            }
            ts.iter().map(|t| b.lift_coeff(j, t.n, t.r, t.m)).collect::<paramod::Result<_>>()?
        }
        ExpandForm::Nonlift => {
            let spec = d.nonlift_spec();
            let m_max = ts.iter().map(|t| t.n.min(t.m)).max().unwrap_or(1);
            let q_max = ts.iter().map(|t| t.n.max(t.m)).max().unwrap_or(1).max(4);
            let q = FjQuotient::new(&b, &spec, m_max, q_max)?;
            ts.iter().map(|&t| nonlift_coeff(&b, &q, &spec, t)).collect::<paramod::Result<_>>()?
        }
    };
    let mut out = String::new();
    let mut ok = true;
    if cfg.format == Format::Tsv {
        out.push_str("form\tn\tr\tm\tcoeff\tpublished\n");
    }
    for (t, v) in ts.iter().zip(&values) {
        let want = matches!(form_kind, ExpandForm::Nonlift).then(|| published.get(&(t.n, t.r, t.m))).flatten();
        ok &= want.is_none_or(|&w| w as i128 == *v);
        let w = want.map_or("-".to_string(), |w| w.to_string());
        match cfg.format {
            Format::Text => writeln!(out, "{form}({},{},{}) = {v}  published {w}", t.n, t.r, t.m)?,
            Format::Tsv => writeln!(out, "{form}\t{}\t{}\t{}\t{v}\t{w}", t.n, t.r, t.m)?,
        }
    }
    if matches!(form_kind, ExpandForm::Nonlift) && indices.is_empty() {
        let unit = unit_content_witness(&values);
        ok &= unit;
        match cfg.format {
            Format::Text => writeln!(out, "content gcd {}", if unit { "1" } else { "> 1" })?,
            Format::Tsv => writeln!(out, "content\t{}", unit as u8)?,
        }
    }
    Ok(Outcome { text: out, ok })
}

/// The published value that a computed eigenvalue is compared with.
fn published(d: &LevelData, p: i64, op: Op) -> Option<i64> {
    match op {
        Op::Tp => d.tp(p),
        Op::Tp2 => d.t1(p),
        Op::T01 => {
            let c2 = *d.euler_bad().get(2)?;
            let n = d.level;
            ((c2 - n.pow(3)) % n == 0).then(|| (c2 - n.pow(3)) / n)
        }
    }
}

fn hecke_op(level: i64, p: i64, op: Op) -> Result<HeckeOp> {
    Ok(match (op, p == level) {
        (Op::Tp, _) => HeckeOp::T,
        (Op::Tp2, false) => HeckeOp::T1,
        (Op::T01, true) => HeckeOp::T01,
        (Op::Tp2, true) => bail!("T1({p}^2) is defined only away from the level; use T01"),
        (Op::T01, false) => bail!("T01({p}^2) is defined only at the level"),
    })
}

struct Solved {
    p: i64,
    op: Op,
    lambda: std::result::Result<i64, String>,
}

/// Eigenvalues of the nonlift for each job, from the cache or computed by
/// restriction on the worker pool; new values are written back.
fn solve_eigenvalues(cfg: &RunConfig, d: &LevelData, jobs: &[(i64, Op)]) -> Result<Vec<Solved>> {
    let cache = Cache::open(cfg)?;
    let mut known = cache.eigenvalues()?;
    let todo: Vec<(i64, Op)> =
        jobs.iter().copied().filter(|&(p, op)| !known.contains_key(&(p, op.tag().to_string()))).collect();
    let mut fresh = BTreeMap::new();
    if !todo.is_empty() {
        let (b, _) = cache.basis(d, cfg.d_max)?;
        let pool = pool(cfg, d)?;
        let f = FormExpr::nonlift(&d.nonlift_spec());
        let results = run_jobs(&todo, cfg.workers, |&(p, op)| -> Result<paramod::restrict::EigenRun> {
            let h = hecke_op(cfg.level, p, op)?;
            Ok(eigenvalue(&b, &f, &pool, p, h, 3, 3)?)
        });
        for (&(p, op), r) in todo.iter().zip(results) {
            match r {
                Ok(run) => {
                    cache.store_manifest(op.tag(), &run)?;
                    let l = i64::try_from(run.lambda).context("eigenvalue overflows i64")?;
                    known.insert((p, op.tag().to_string()), l);
                }
                Err(e) => {
                    fresh.insert((p, op), e.to_string());
                }
            }
        }
        cache.store_eigenvalues(&known)?;
    }
    Ok(jobs
        .iter()
        .map(|&(p, op)| Solved {
            p,
            op,
            lambda: match known.get(&(p, op.tag().to_string())) {
                Some(&l) => Ok(l),
                None => Err(fresh.get(&(p, op)).cloned().unwrap_or_else(|| "not computed".into())),
            },
        })
        .collect())
}

fn op_name(p: i64, op: Op) -> String {
    match op {
        Op::Tp => HeckeOp::T.name(p),
        Op::Tp2 => HeckeOp::T1.name(p),
        Op::T01 => HeckeOp::T01.name(p),
    }
}

pub fn eigen(cfg: &RunConfig) -> Result<Outcome> {
    let d = LevelData::load(cfg.level)?;
    let jobs: Vec<(i64, Op)> = cfg.primes.iter().flat_map(|&p| cfg.ops.iter().map(move |&op| (p, op))).collect();
    let solved = solve_eigenvalues(cfg, &d, &jobs)?;
    let mut out = String::new();
    let mut ok = true;
    if cfg.format == Format::Tsv {
        out.push_str("level\tp\toperator\tlambda\tpublished\tstatus\n");
    }
    for s in &solved {
        let want = published(&d, s.p, s.op);
        let (lam, status) = match &s.lambda {
            Ok(l) => (
                l.to_string(),
                match want {
                    Some(w) if w == *l => "ok".to_string(),
                    Some(_) => "MISMATCH".to_string(),
                    None => "unpublished".to_string(),
                },
            ),
            Err(e) => ("-".to_string(), format!("ERROR {e}")),
        };
        ok &= status == "ok" || status == "unpublished";
        let w = want.map_or("-".to_string(), |w| w.to_string());
        match cfg.format {
            Format::Text => writeln!(out, "{:<10} {lam:>8}  published {w:>6}  {status}", op_name(s.p, s.op))?,
            Format::Tsv => writeln!(out, "{}\t{}\t{}\t{lam}\t{w}\t{status}", cfg.level, s.p, s.op.tag())?,
        }
    }
    Ok(Outcome { text: out, ok })
}

pub fn euler(cfg: &RunConfig) -> Result<Outcome> {
    let d = LevelData::load(cfg.level)?;
    let n = cfg.level;
    let mut jobs = vec![];
    for &p in &cfg.primes {
        if n % p == 0 && p != n {
            bail!("{p} divides the level without being it");
        }
        jobs.push((p, Op::Tp));
        if p != n {
            jobs.push((p, Op::Tp2));
        }
    }
    let solved = solve_eigenvalues(cfg, &d, &jobs)?;
    let get = |p: i64, op: Op| -> Result<i64> {
        let s = solved.iter().find(|s| s.p == p && s.op == op).unwrap();
        s.lambda.clone().map_err(|e| anyhow::anyhow!("{} needed for Q_{p}: {e}", op_name(p, op)))
    };
    let eps = d.eigenvalues.atkin_lehner;
    let mut out = String::new();
    let mut ok = true;
    if cfg.format == Format::Tsv {
        out.push_str("p\tc0\tc1\tc2\tc3\tc4\tstatus\n");
    }
    for &p in &cfg.primes {
        let q: EulerPolynomial = if p == n {
            let lp = get(p, Op::Tp)?;
            let l01 = i64::try_from(bad_relation(lp, eps, p, 3))?;
            spin_euler_bad(lp, l01, eps, p, 3)
        } else {
            spin_euler_good(get(p, Op::Tp)?, get(p, Op::Tp2)?, p, 3)
        };
        let want = if p == n { Some(d.euler_bad()) } else { d.euler(p) };
        let status = match (&want, q.to_i64()) {
            (Some(w), Some(got)) if *w == got => "ok",
            (Some(_), _) => "MISMATCH",
            (None, _) => "unpublished",
        };
        ok &= status != "MISMATCH";
        match cfg.format {
            Format::Text => writeln!(out, "Q_{p}  {q}  {status}")?,
            Format::Tsv => {
                let mut cells: Vec<String> = q.coeffs.iter().map(|c| c.to_string()).collect();
                cells.resize(5, String::new());
                writeln!(out, "{p}\t{}\t{status}", cells.join("\t"))?;
            }
        }
    }
    Ok(Outcome { text: out, ok })
}

pub fn divisors(cfg: &RunConfig) -> Result<Outcome> {
    let d = LevelData::load(cfg.level)?;
    let q = cfg.level / 4 + 2;
    let psis: Vec<JacobiCoeffTable> =
        d.specs().iter().map(|s| psi_from_theta_block(s, q)).collect::<paramod::Result<_>>()?;
    let spec = d.nonlift_spec();
    let mut cols: Vec<(String, Vec<(i64, &JacobiCoeffTable)>)> =
        d.divisors.members.iter().map(|&j| (format!("B[{j}]"), vec![(1, &psis[j - 1])])).collect();
    cols.push((
        format!("B[{}]+B[{}]-B[{}]", spec.num.0 + 1, spec.num.1 + 1, spec.den + 1),
        vec![(1, &psis[spec.num.0]), (1, &psis[spec.num.1]), (-1, &psis[spec.den])],
    ));
    let classes: Vec<(i64, i64)> = d.divisors.rows.iter().map(|r| (r[0], r[1])).collect();
    let t = divisor_table(&cols, &classes)?;
    let matches = t
        .rows
        .iter()
        .zip(&d.divisors.rows)
        .all(|(row, want)| row.2.iter().map(|&x| x as i64).eq(want[2..].iter().copied()));
    let nonneg = t.negative_entries().is_empty();
    let mut text = match cfg.format {
        Format::Text => t.to_string(),
        Format::Tsv => t.to_tsv(),
    };
    match cfg.format {
        Format::Text => {
            writeln!(text, "{} classes, published table {}", t.rows.len(), if matches { "reproduced" } else { "DIFFERS" })?;
            writeln!(text, "entries {}", if nonneg { "all nonnegative" } else { "NEGATIVE" })?;
        }
        Format::Tsv => {}
    }
    Ok(Outcome { text, ok: matches && nonneg })
}

pub fn congruence(cfg: &RunConfig) -> Result<Outcome> {
    let d = LevelData::load(cfg.level)?;
    let cache = Cache::open(cfg)?;
    let primes: Vec<i64> = cfg.primes.iter().copied().filter(|&p| p != cfg.level).collect();
    let mut hecke = BTreeMap::new();
    let missing: Vec<i64> = primes
        .iter()
        .copied()
        .filter(|&p| match cache.hecke_matrix(p) {
            Some(m) => {
                hecke.insert(p, m);
                false
            }
            None => true,
        })
        .collect();
    if !missing.is_empty() {
        let (b, _) = cache.basis(&d, cfg.d_max)?;
        let pool = pool(cfg, &d)?;
        let results = run_jobs(&missing, cfg.workers, |&p| lift_hecke_matrices(&b, &pool, &[p], HeckeOp::T));
        for (&p, r) in missing.iter().zip(results) {
            let m = r.with_context(|| format!("T({p}) on the lifts"))?.remove(&p).unwrap();
            cache.store_hecke_matrix(p, &m)?;
            hecke.insert(p, m);
        }
    }
    let jobs: Vec<(i64, Op)> = primes.iter().map(|&p| (p, Op::Tp)).collect();
    let mut lambda_f = BTreeMap::new();
    for s in solve_eigenvalues(cfg, &d, &jobs)? {
        let l = s.lambda.map_err(|e| anyhow::anyhow!("lambda_f(T({})) needed: {e}", s.p))?;
        lambda_f.insert(s.p, l);
    }
    let rep = verify_congruence(&CongruenceInput { data: &d, hecke: &hecke, lambda_f: &lambda_f })?;
    let text = match cfg.format {
        Format::Text => rep.to_string(),
        Format::Tsv => {
            let mut s = String::from("claim\tpass\tdetail\n");
            for c in &rep.claims {
                writeln!(s, "{}\t{}\t{}", c.key, c.pass as u8, c.detail)?;
            }
            s
        }
    };
    Ok(Outcome { text, ok: rep.all_pass() })
}

pub fn verify_speedups(cfg: &RunConfig, form: &str) -> Result<Outcome> {
    let d = LevelData::load(cfg.level)?;
    let (b, _) = Cache::open(cfg)?.basis(&d, cfg.d_max)?;
    let f = match parse_form(form)? {
        ExpandForm::Nonlift => FormExpr::nonlift(&d.nonlift_spec()),
        ExpandForm::Lift(j) if j < b.dim() => FormExpr::lift(j, b.dim()),
        ExpandForm::Lift(j) => bail!("G{} does not exist", j + 1),
    };
    let s = *pool(cfg, &d)?.first().context("empty s pool")?;
    let mut out = String::new();
    let mut ok = true;
    let mut compared = 0;
    if cfg.format == Format::Tsv {
        out.push_str("p\toperator\tsum\tspeedup\treduced\tfull\tagree\tnonzero\n");
    }
    for &p in &cfg.primes {
        for &op in &cfg.ops {
            let h = hecke_op(cfg.level, p, op)?;
            let ring = Cyclotomic::new(h.mu(p));
            for c in compare_speedups(&b, &f, &s, p, h, 3, cfg.e_max, &ring)? {
                let agree = match c.agree {
                    Some(true) => "yes",
                    Some(false) => "NO",
                    None => "singular",
                };
                ok &= c.agree != Some(false);
                compared += (c.agree == Some(true) && c.nonzero > 0) as usize;
                match cfg.format {
                    Format::Text => writeln!(
                        out,
                        "{:<10} {:<22} {}  {}/{} terms  agree {agree}  ({} nonzero coefficients)",
                        op_name(p, op),
                        c.sum,
                        c.speedup,
                        c.reduced_terms,
                        c.full_terms,
                        c.nonzero
                    )?,
                    Format::Tsv => writeln!(
                        out,
                        "{p}\t{}\t{}\t{}\t{}\t{}\t{agree}\t{}",
                        op.tag(),
                        c.sum,
                        c.speedup,
                        c.reduced_terms,
                        c.full_terms,
                        c.nonzero
                    )?,
                }
            }
        }
    }
    Ok(Outcome { text: out, ok: ok && compared > 0 })
}
