//! `paramod`: eigenvalues, Euler factors, divisor tables and congruences of
//! the weight 3 paramodular nonlifts of levels 61, 73 and 79.

mod cache;
mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use config::{Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "paramod", version, about = "Weight 3 paramodular nonlifts of prime level")]
struct Cli {
    /// key = value configuration file; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    flags: Flags,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Flags {
    /// cache directory (default $PARAMOD_CACHE, then ./.paramod-cache)
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// text or tsv
    #[arg(long, global = true)]
    format: Option<String>,
    /// worker threads for independent (prime, operator) jobs
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// restriction matrices to try, `a,b,c; a,b,c`
    #[arg(long, global = true)]
    s_pool: Option<String>,
    /// smallest auxiliary prime for the basis checks
    #[arg(long, global = true)]
    aux_floor: Option<u64>,
    /// discriminant bound of the cached Jacobi tables
    #[arg(long, global = true)]
    d_max: Option<i64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the theta blocks, dimensions and restricted independence of the lifts; write the Jacobi caches
    Basis { level: i64 },
    /// Fourier coefficients of the nonlift `f` or a lift `G<j>`
    Expand {
        level: i64,
        #[arg(long, default_value = "f")]
        form: String,
        /// `n,r,m`; repeatable. Default: the published unit-content indices
        #[arg(long = "index")]
        indices: Vec<String>,
    },
    /// Hecke eigenvalues of the nonlift by restriction
    Eigen {
        level: i64,
        /// e.g. `2..13` or `2,3,61`
        #[arg(long)]
        primes: Option<String>,
        /// comma separated from Tp, Tp2, T01
        #[arg(long)]
        ops: Option<String>,
    },
    /// Spin Euler polynomials Q_p
    Euler {
        level: i64,
        #[arg(long)]
        primes: Option<String>,
    },
    /// Humbert-surface multiplicities of the Borcherds products
    Divisors { level: i64 },
    /// Ideal and eigenvalue congruences between the nonlift and the lifts
    Congruence {
        level: i64,
        #[arg(long)]
        primes: Option<String>,
    },
    /// Compare each reduced coset sum with its full index set, exactly
    VerifySpeedups {
        level: i64,
        #[arg(long)]
        primes: Option<String>,
        #[arg(long)]
        ops: Option<String>,
        #[arg(long, default_value = "G1")]
        form: String,
        /// integral exponents compared
        #[arg(long)]
        e_max: Option<i64>,
    },
}

fn run(cli: Cli) -> Result<bool> {
    let file = match &cli.config {
        Some(p) => config::read_kv(p)?,
        None => Default::default(),
    };
    let f = &cli.flags;
    let mut ov = Overrides {
        cache_dir: f.cache_dir.clone(),
        format: f.format.clone(),
        workers: f.workers,
        s_pool: f.s_pool.clone(),
        aux_floor: f.aux_floor,
        d_max: f.d_max,
        ..Default::default()
    };
    let (level, defaults) = match &cli.cmd {
        Cmd::Basis { level } | Cmd::Expand { level, .. } | Cmd::Divisors { level } => (*level, ("2", "Tp")),
        Cmd::Eigen { level, primes, ops } => {
            ov.primes = primes.clone();
            ov.ops = ops.clone();
            (*level, ("2..13", "Tp"))
        }
        Cmd::Euler { level, primes } => {
            ov.primes = primes.clone();
            (*level, ("2,3,5,7", "Tp"))
        }
        Cmd::Congruence { level, primes } => {
            ov.primes = primes.clone();
            (*level, ("2..13", "Tp"))
        }
        Cmd::VerifySpeedups { level, primes, ops, e_max, .. } => {
            ov.primes = primes.clone();
            ov.ops = ops.clone();
            ov.e_max = *e_max;
            (*level, ("2,3", "Tp"))
        }
    };
    let cfg = RunConfig::build(level, &file, &ov, defaults.0, defaults.1)?;
    let out = match &cli.cmd {
        Cmd::Basis { .. } => commands::basis(&cfg)?,
        Cmd::Expand { form, indices, .. } => commands::expand(&cfg, form, indices)?,
        Cmd::Eigen { .. } => commands::eigen(&cfg)?,
        Cmd::Euler { .. } => commands::euler(&cfg)?,
        Cmd::Divisors { .. } => commands::divisors(&cfg)?,
        Cmd::Congruence { .. } => commands::congruence(&cfg)?,
        Cmd::VerifySpeedups { form, .. } => commands::verify_speedups(&cfg, form)?,
    };
    print!("{}", out.text);
    Ok(out.ok)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
