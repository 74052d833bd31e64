//! Run configuration: a `key = value` file overlaid by command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use paramod::data::LEVELS;

pub const CACHE_ENV: &str = "PARAMOD_CACHE";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Tsv,
}

/// Operators as named on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Op {
    /// `T(p)`
    Tp,
    /// `T_1(p^2)`, good primes
    Tp2,
    /// `T_{0,1}(p^2)`, the level
    T01,
}

impl Op {
    pub fn parse(s: &str) -> Result<Op> {
        Ok(match s.trim() {
            "Tp" | "T" => Op::Tp,
            "Tp2" | "T1" => Op::Tp2,
            "T01" => Op::T01,
            other => bail!("unknown operator {other:?} (expected Tp, Tp2 or T01)"),
        })
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Op::Tp => "Tp",
            Op::Tp2 => "Tp2",
            Op::T01 => "T01",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub level: i64,
    pub primes: Vec<i64>,
    pub ops: Vec<Op>,
    pub s_pool: Option<Vec<[i64; 3]>>,
    pub cache_dir: PathBuf,
    /// lower bound for the auxiliary primes of the basis checks
    pub aux_floor: u64,
    pub workers: usize,
    pub format: Format,
    /// discriminant bound of the cached Jacobi tables
    pub d_max: i64,
    /// integral exponents compared by `verify-speedups`
    pub e_max: i64,
}

/// Flags shared by every subcommand; `None` defers to the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub primes: Option<String>,
    pub ops: Option<String>,
    pub s_pool: Option<String>,
    pub cache_dir: Option<PathBuf>,
    pub aux_floor: Option<u64>,
    pub workers: Option<usize>,
    pub format: Option<String>,
    pub d_max: Option<i64>,
    pub e_max: Option<i64>,
}

pub fn read_kv(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    parse_kv(&text)
}

pub fn parse_kv(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else { bail!("config line {}: expected key = value", i + 1) };
        out.insert(k.trim().replace('-', "_"), v.trim().to_string());
    }
    Ok(out)
}

/// `2..13`, `2,3,5`, or a mix such as `2..7,61`.
pub fn parse_primes(s: &str) -> Result<Vec<i64>> {
    let mut out = vec![];
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let a: i64 = a.trim().parse().with_context(|| format!("bad prime range {part:?}"))?;
            let b: i64 = b.trim().parse().with_context(|| format!("bad prime range {part:?}"))?;
            out.extend((a.max(2)..=b).filter(|&p| is_prime(p)));
        } else {
            let p: i64 = part.parse().with_context(|| format!("bad prime {part:?}"))?;
            if p <= 0 || !is_prime(p) {
                bail!("{p} is not a positive prime");
            }
            out.push(p);
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn is_prime(n: i64) -> bool {
    n >= 2 && paramod::exactcore::is_prime_u64(n as u64)
}

/// `a,b,c; a,b,c` with `s = [[a, b/2], [b/2, c]]`.
pub fn parse_pool(s: &str) -> Result<Vec<[i64; 3]>> {
    s.split(';')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            let v: Vec<i64> = t
                .split(',')
                .map(|x| x.trim().parse::<i64>())
                .collect::<std::result::Result<_, _>>()
                .with_context(|| format!("bad s triple {t:?}"))?;
            match v[..] {
                [a, b, c] => Ok([a, b, c]),
                _ => bail!("s triple {t:?} needs three entries"),
            }
        })
        .collect()
}

pub fn check_level(level: i64) -> Result<()> {
    if !LEVELS.contains(&level) {
        bail!("level {level} is not supported (expected one of 61, 73, 79)");
    }
    Ok(())
}

impl RunConfig {
    pub fn build(
        level: i64,
        file: &BTreeMap<String, String>,
        flags: &Overrides,
        default_primes: &str,
        default_ops: &str,
    ) -> Result<RunConfig> {
        check_level(level)?;
        for k in file.keys() {
            if !["primes", "ops", "s_pool", "cache_dir", "aux_floor", "workers", "format", "d_max", "e_max"]
                .contains(&k.as_str())
            {
                bail!("unknown config key {k:?}");
            }
        }
        let pick = |flag: &Option<String>, key: &str| flag.clone().or_else(|| file.get(key).cloned());
        let primes = parse_primes(&pick(&flags.primes, "primes").unwrap_or_else(|| default_primes.into()))?;
        let ops = pick(&flags.ops, "ops")
            .unwrap_or_else(|| default_ops.into())
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(Op::parse)
            .collect::<Result<Vec<_>>>()?;
        let s_pool = pick(&flags.s_pool, "s_pool").map(|s| parse_pool(&s)).transpose()?;
        let cache_dir = flags
            .cache_dir
            .clone()
            .or_else(|| file.get("cache_dir").map(PathBuf::from))
            .or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(".paramod-cache"));
        let num = |flag: Option<i64>, key: &str, default: i64| -> Result<i64> {
            match flag {
                Some(v) => Ok(v),
                None => file
                    .get(key)
                    .map(|v| v.parse::<i64>().with_context(|| format!("config {key} = {v:?}")))
                    .unwrap_or(Ok(default)),
            }
        };
        let workers = num(flags.workers.map(|w| w as i64), "workers", default_workers() as i64)?;
        if workers < 1 {
            bail!("workers must be positive");
        }
        let format = match pick(&flags.format, "format").as_deref().unwrap_or("text") {
            "text" => Format::Text,
            "tsv" => Format::Tsv,
            other => bail!("unknown format {other:?} (expected text or tsv)"),
        };
        Ok(RunConfig {
            level,
            primes,
            ops,
            s_pool,
            cache_dir,
            aux_floor: num(flags.aux_floor.map(|x| x as i64), "aux_floor", 1 << 30)? as u64,
            workers: workers as usize,
            format,
            d_max: num(flags.d_max, "d_max", 300_000)?,
            e_max: num(flags.e_max, "e_max", 30)?,
        })
    }

    pub fn level_dir(&self) -> PathBuf {
        self.cache_dir.join(self.level.to_string())
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_ranges() {
        assert_eq!(parse_primes("2..13").unwrap(), vec![2, 3, 5, 7, 11, 13]);
        assert_eq!(parse_primes("3, 2,61").unwrap(), vec![2, 3, 61]);
        assert!(parse_primes("4").is_err());
        assert!(parse_primes("-3").is_err());
    }

    #[test]
    fn flags_win_over_file() {
        let file = parse_kv("primes = 2,3\nformat = tsv # comment\nworkers=2\n").unwrap();
        let flags = Overrides { primes: Some("5".into()), ..Default::default() };
        let c = RunConfig::build(61, &file, &flags, "2..13", "Tp").unwrap();
        assert_eq!(c.primes, vec![5]);
        assert_eq!(c.format, Format::Tsv);
        assert_eq!(c.workers, 2);
    }

    #[test]
    fn bad_inputs() {
        let none = BTreeMap::new();
        assert!(RunConfig::build(80, &none, &Overrides::default(), "2", "Tp").is_err());
        assert!(parse_kv("nonsense").is_err());
        assert!(RunConfig::build(61, &parse_kv("colour = red").unwrap(), &Overrides::default(), "2", "Tp").is_err());
        assert_eq!(parse_pool("158,47,1106; 61,15,1").unwrap(), vec![[158, 47, 1106], [61, 15, 1]]);
    }
}
