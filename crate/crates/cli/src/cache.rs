//! On-disk caches under `<cache_dir>/<level>/`: Jacobi tables of the basis,
//! solved eigenvalues with their run manifests, and lift Hecke matrices.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use paramod::data::LevelData;
use paramod::jacobi::JacobiCoeffTable;
use paramod::paramodular::LiftBasis;
use paramod::restrict::EigenRun;

use crate::config::RunConfig;

pub struct Cache {
    dir: PathBuf,
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path)?;
    Ok(())
}

impl Cache {
    pub fn open(cfg: &RunConfig) -> Result<Cache> {
        let dir = cfg.level_dir();
        fs::create_dir_all(dir.join("runs")).with_context(|| format!("creating cache dir {}", dir.display()))?;
        Ok(Cache { dir })
    }

    fn table_path(&self, j: usize) -> PathBuf {
        self.dir.join(format!("tb{}.jac", j + 1))
    }

    /// The lift basis from cached tables when they reach `d_max`, else
    /// built and written. Returns whether it was built.
    pub fn basis(&self, data: &LevelData, d_max: i64) -> Result<(LiftBasis, bool)> {
        let specs = data.specs();
        let mut tables = vec![];
        for j in 0..specs.len() {
            match JacobiCoeffTable::load(&self.table_path(j)) {
                Ok(t) if t.d_max() >= d_max && t.index() == data.level => tables.push(t),
                _ => break,
            }
        }
        if tables.len() == specs.len() {
            return Ok((LiftBasis::from_tables(data.level, specs, tables)?, false));
        }
        let b = LiftBasis::new(data.level, specs, d_max)?;
        for (j, t) in b.tables().iter().enumerate() {
            t.save(&self.table_path(j))?;
        }
        Ok((b, true))
    }

    fn eigen_path(&self) -> PathBuf {
        self.dir.join("eigen.tsv")
    }

    /// `(p, operator tag) -> lambda`
    pub fn eigenvalues(&self) -> Result<BTreeMap<(i64, String), i64>> {
        let mut out = BTreeMap::new();
        let Ok(text) = fs::read_to_string(self.eigen_path()) else { return Ok(out) };
        for line in text.lines().filter(|l| !l.starts_with('#')) {
            let f: Vec<&str> = line.split('\t').collect();
            if let [p, op, lam] = f[..] {
                out.insert((p.parse()?, op.to_string()), lam.parse()?);
            }
        }
        Ok(out)
    }

    pub fn store_eigenvalues(&self, vals: &BTreeMap<(i64, String), i64>) -> Result<()> {
        let mut s = String::from("# p\top\tlambda\n");
        for ((p, op), l) in vals {
            s.push_str(&format!("{p}\t{op}\t{l}\n"));
        }
        write_atomic(&self.eigen_path(), s.as_bytes())
    }

    pub fn store_manifest(&self, tag: &str, run: &EigenRun) -> Result<()> {
        let path = self.dir.join("runs").join(format!("{tag}-{}.json", run.p));
        write_atomic(&path, run.manifest().as_bytes())
    }

    fn hecke_path(&self, p: i64) -> PathBuf {
        self.dir.join(format!("hecke-T-{p}.json"))
    }

    pub fn hecke_matrix(&self, p: i64) -> Option<Vec<Vec<i64>>> {
        let text = fs::read_to_string(self.hecke_path(p)).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn store_hecke_matrix(&self, p: i64, m: &[Vec<i64>]) -> Result<()> {
        write_atomic(&self.hecke_path(p), serde_json::to_string(m)?.as_bytes())
    }
}
