use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::{enumerate_indices, ParamodularIndex, SymQ};
use crate::jacobi::write_atomic;
use crate::{Error, Result};

/// Coefficients `a(n, r, m)` of one antisymmetric paramodular form, keyed
/// by the representative with `n <= m` and `r >= 0`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParamodularCache {
    pub level: i64,
    pub form: String,
    /// Largest `<s, t>` for which every index is present.
    pub depth: i64,
    entries: BTreeMap<ParamodularIndex, i128>,
}

impl ParamodularCache {
    pub fn new(level: i64, form: &str) -> Self {
        ParamodularCache { level, form: form.to_string(), depth: 0, entries: BTreeMap::new() }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn insert(&mut self, t: ParamodularIndex, v: i128) -> Result<()> {
        let (c, sign) = t.canonical();
        let v = sign as i128 * v;
        if c.r == 0 && v != 0 {
            return Err(Error::Inconsistent(format!("antisymmetric form with a({}, 0, {}) = {v}", c.n, c.m)));
        }
        if let Some(&old) = self.entries.get(&c) {
            if old != v {
                return Err(Error::Inconsistent(format!("conflicting values at {c:?}: {old} vs {v}")));
            }
        }
        self.entries.insert(c, v);
        Ok(())
    }

    /// `a(t)`, or `None` when `t` is in cusp support but absent.
    pub fn get(&self, t: ParamodularIndex) -> Option<i128> {
        if !t.in_cusp_support(self.level) {
            return Some(0);
        }
        let (c, sign) = t.canonical();
        self.entries.get(&c).map(|v| sign as i128 * v)
    }

    pub fn coeff(&self, n: i64, r: i64, m: i64) -> Result<i128> {
        self.get(ParamodularIndex::new(n, r, m))
            .ok_or(Error::CacheMiss { needed: 4 * n * m * self.level - r * r, have: self.depth })
    }

    pub fn entries(&self) -> impl Iterator<Item = (&ParamodularIndex, &i128)> {
        self.entries.iter()
    }

    /// Fill every index with `<s, t> <= depth` from `source`.
    pub fn populate<F>(&mut self, s: &SymQ, depth: i64, source: F) -> Result<()>
    where
        F: Fn(ParamodularIndex) -> Result<i128>,
    {
        for t in enumerate_indices(self.level, s, depth as i128 * s.den) {
            let (c, _) = t.canonical();
            if self.entries.contains_key(&c) {
                continue;
            }
            let v = source(c)?;
            self.insert(c, v)?;
        }
        self.depth = self.depth.max(depth);
        Ok(())
    }

    /// `PARA N=.. form=.. depth=..` then `n r m value` lines.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut buf = format!("PARA N={} form={} depth={}\n", self.level, self.form, self.depth);
        for (t, v) in &self.entries {
            buf.push_str(&format!("{} {} {} {}\n", t.n, t.r, t.m, v));
        }
        write_atomic(path, buf.as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = BufReader::new(fs::File::open(path)?);
        let mut lines = f.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty cache file".into()))??;
        let mut fields = header.split_whitespace();
        if fields.next() != Some("PARA") {
            return Err(Error::Parse("not a PARA cache file".into()));
        }
        let mut c = ParamodularCache::default();
        for kv in fields {
            let (key, val) = kv.split_once('=').ok_or_else(|| Error::Parse(kv.into()))?;
            match key {
                "N" => c.level = val.parse().map_err(|_| Error::Parse(kv.into()))?,
                "form" => c.form = val.to_string(),
                "depth" => c.depth = val.parse().map_err(|_| Error::Parse(kv.into()))?,
                _ => return Err(Error::Parse(format!("unknown header field {key}"))),
            }
        }
        if c.level < 1 {
            return Err(Error::Parse("missing level".into()));
        }
        for line in lines {
            let line = line?;
            let v: Vec<&str> = line.split_whitespace().collect();
            if v.len() != 4 {
                return Err(Error::Parse(format!("bad line {line}")));
            }
            let p = |s: &str| s.parse::<i64>().map_err(|_| Error::Parse(line.clone()));
            let t = ParamodularIndex::new(p(v[0])?, p(v[1])?, p(v[2])?);
            let val: i128 = v[3].parse().map_err(|_| Error::Parse(line.clone()))?;
            c.insert(t, val)?;
        }
        Ok(c)
    }
}
