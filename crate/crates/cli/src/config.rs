use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;
use kfib_balance::numerics::PrecisionContext;
use kfib_balance::Equation;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Environment variable overriding the default cache directory.
pub const CACHE_ENV: &str = "KFIB_CACHE_DIR";
pub const DEFAULT_CACHE_DIR: &str = ".kfib-cache";

/// Cache directory: explicit flag, then `$KFIB_CACHE_DIR`, then the default.
pub fn resolve_cache_dir(flag: Option<&Path>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    match std::env::var_os(CACHE_ENV) {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => PathBuf::from(DEFAULT_CACHE_DIR),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Jsonl,
    Csv,
    Table,
}

/// A set of `k` values written as `a..b` (inclusive), `a`, or a comma list
/// of either.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KRange {
    values: Vec<u32>,
    text: String,
}

impl KRange {
    pub fn inclusive(lo: u32, hi: u32) -> Self {
        KRange {
            values: (lo..=hi).collect(),
            text: format!("{lo}..{hi}"),
        }
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn lo(&self) -> Option<u32> {
        self.values.first().copied()
    }

    pub fn hi(&self) -> Option<u32> {
        self.values.last().copied()
    }

    /// Values inside `lo..=hi`.
    pub fn clamp(&self, lo: u32, hi: u32) -> Vec<u32> {
        self.values
            .iter()
            .copied()
            .filter(|k| (lo..=hi).contains(k))
            .collect()
    }

    /// True when the values form one run without gaps.
    pub fn is_contiguous(&self) -> bool {
        self.values.windows(2).all(|w| w[1] == w[0] + 1)
    }
}

impl fmt::Display for KRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl FromStr for KRange {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        let bad = || CliError::Config(format!("bad k range {s:?} (use a..b, a or a,b,c)"));
        let mut values = Vec::new();
        for part in s.split(',').map(str::trim) {
            if part.is_empty() {
                return Err(bad());
            }
            if let Some((a, b)) = part.split_once("..") {
                let b = b.strip_prefix('=').unwrap_or(b);
                let a: u32 = a.trim().parse().map_err(|_| bad())?;
                let b: u32 = b.trim().parse().map_err(|_| bad())?;
                values.extend(a..=b);
            } else {
                values.push(part.parse().map_err(|_| bad())?);
            }
        }
        values.sort_unstable();
        values.dedup();
        Ok(KRange {
            values,
            text: s.trim().to_string(),
        })
    }
}

/// Parsed `--theorem` / `--equation` selector.
pub fn parse_equation(s: &str) -> CliResult<Equation> {
    s.parse::<Equation>().map_err(CliError::from)
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub working_bits: u32,
    pub max_bits: u32,
    pub jobs: usize,
    pub cache_dir: PathBuf,
    pub format: OutputFormat,
    pub k_range: Option<KRange>,
    pub smoke: bool,
    pub equations: Vec<Equation>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let ctx = PrecisionContext::default();
        RunConfig {
            working_bits: ctx.working_bits,
            max_bits: ctx.max_bits,
            jobs: 1,
            cache_dir: resolve_cache_dir(None),
            format: OutputFormat::Jsonl,
            k_range: None,
            smoke: false,
            equations: Equation::ALL.to_vec(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> CliResult<()> {
        if self.jobs == 0 {
            return Err(CliError::Config("jobs must be at least 1".into()));
        }
        if self.equations.is_empty() {
            return Err(CliError::Config("no equation selected".into()));
        }
        if let Some(r) = &self.k_range {
            if r.is_empty() {
                return Err(CliError::Config(format!("k range {r} is empty")));
            }
        }
        self.precision()?;
        Ok(())
    }

    pub fn precision(&self) -> CliResult<PrecisionContext> {
        Ok(PrecisionContext::new(self.working_bits, self.max_bits, 2)?)
    }

    /// `k` values for an equation: the configured range clipped to
    /// `lo..=hi`, or all of `lo..=hi`.
    pub fn ks(&self, lo: u32, hi: u32) -> Vec<u32> {
        match &self.k_range {
            Some(r) => r.clamp(lo, hi),
            None => (lo..=hi).collect(),
        }
    }

    /// Run `f` on a pool of `jobs` threads.
    pub fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> CliResult<T> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs)
            .build()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
        Ok(pool.install(f))
    }
}
