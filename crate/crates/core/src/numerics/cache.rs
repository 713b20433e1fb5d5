//! On-disk cache of dominant roots.
//!
//! One entry per line: `phi <k> <bits> <decimal-midpoint> <decimal-err>`.
//! Every entry is re-certified on load by a sign change of
//! `x^k (x − 2) + 1` across the stored interval, so a corrupted file can
//! never inject a wrong root.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_traits::One;

use super::ball::{dyadic_to_sci, ApproxReal, Dyadic, Rounding};
use super::elementary::is_below_pow2;
use super::precision::PrecisionContext;
use super::root::{bracket_low, dominant_root, psi};
use crate::error::{Error, Result};

pub const CACHE_FILE: &str = "phi.cache";

#[derive(Clone, Debug)]
struct Entry {
    bits: u32,
    root: ApproxReal,
}

#[derive(Debug)]
pub struct PhiCache {
    path: PathBuf,
    entries: BTreeMap<u32, Entry>,
    dirty: bool,
}

impl PhiCache {
    /// Open (and fully validate) the cache in `dir`. A missing file is an
    /// empty cache.
    pub fn open(dir: &Path) -> Result<Self> {
        let path = dir.join(CACHE_FILE);
        let mut entries = BTreeMap::new();
        if path.exists() {
            let text = fs::read_to_string(&path)?;
            for (lineno, line) in text.lines().enumerate() {
                if line.trim().is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, entry) = parse_line(line).map_err(|e| {
                    Error::CacheInvalid(format!("{}:{}: {e}", path.display(), lineno + 1))
                })?;
                entries.insert(k, entry);
            }
        }
        Ok(PhiCache {
            path,
            entries,
            dirty: false,
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Cached root if it was stored at `ctx.working_bits` or more, otherwise
    /// compute and remember it.
    pub fn get_or_compute(&mut self, k: u32, ctx: &PrecisionContext) -> Result<ApproxReal> {
        if let Some(e) = self.entries.get(&k) {
            if e.bits >= ctx.working_bits {
                return Ok(e.root.clone());
            }
        }
        let root = dominant_root(k, ctx)?;
        self.entries.insert(
            k,
            Entry {
                bits: ctx.working_bits,
                root: root.clone(),
            },
        );
        self.dirty = true;
        Ok(root)
    }

    /// Write the cache atomically (temp file + rename).
    pub fn save(&mut self) -> Result<()> {
        if !self.dirty {
            return Ok(());
        }
        let dir = self.path.parent().unwrap_or(Path::new("."));
        fs::create_dir_all(dir)?;
        let tmp = dir.join(format!(".{CACHE_FILE}.tmp{}", std::process::id()));
        {
            let mut f = fs::File::create(&tmp)?;
            for (k, e) in &self.entries {
                writeln!(f, "{}", format_line(*k, e))?;
            }
            f.sync_all()?;
        }
        fs::rename(&tmp, &self.path)?;
        self.dirty = false;
        Ok(())
    }
}

fn format_line(k: u32, e: &Entry) -> String {
    let digits = (e.root.precision() as f64 * std::f64::consts::LOG10_2) as usize + 4;
    // half a decimal ulp is below 8^-digits
    let rounding = Dyadic::new(BigInt::one(), -3 * digits as i64);
    let err = e.root.radius().add(&rounding);
    format!(
        "phi {k} {} {} {}",
        e.bits,
        e.root.to_decimal(digits),
        dyadic_to_sci(&err, 4, Rounding::Up)
    )
}

fn parse_line(line: &str) -> Result<(u32, Entry)> {
    let parts: Vec<&str> = line.split_whitespace().collect();
    let [tag, k, bits, mid, err] = parts[..] else {
        return Err(Error::Parse(format!(
            "expected 5 fields, got {}",
            parts.len()
        )));
    };
    if tag != "phi" {
        return Err(Error::Parse(format!("unknown record tag {tag:?}")));
    }
    let k: u32 = k
        .parse()
        .map_err(|_| Error::Parse(format!("bad k {k:?}")))?;
    let bits: u32 = bits
        .parse()
        .map_err(|_| Error::Parse(format!("bad bit count {bits:?}")))?;
    if k < 2 || bits < 64 {
        return Err(Error::Parse(format!(
            "out-of-range entry k={k} bits={bits}"
        )));
    }
    let prec = bits + k + 64;
    let mid = ApproxReal::from_decimal(mid, prec + 16)?;
    let err = ApproxReal::from_decimal(err, 64)?;
    if err.is_negative() {
        return Err(Error::Parse("negative error".into()));
    }
    let root = mid.widen(&err);
    validate(k, bits, &root)?;
    Ok((k, Entry { bits, root }))
}

/// Re-certify a stored root from scratch.
fn validate(k: u32, bits: u32, root: &ApproxReal) -> Result<()> {
    let wide = root.precision() + 32;
    let g = |x: ApproxReal| {
        let x = x.with_precision(wide);
        let two = ApproxReal::from_int(2, wide);
        &(&x.powi(u64::from(k)) * &(&x - &two)) + &ApproxReal::one(wide)
    };
    let lo = ApproxReal::from_bounds(&root.lo(), &root.lo(), wide);
    let hi = ApproxReal::from_bounds(&root.hi(), &root.hi(), wide);
    if !g(lo).is_negative() || !g(hi).is_positive() {
        return Err(Error::CacheInvalid(format!(
            "entry for k={k} does not bracket a root"
        )));
    }
    if root.lo() <= bracket_low(k) {
        return Err(Error::CacheInvalid(format!(
            "entry for k={k} is not the dominant root"
        )));
    }
    if !is_below_pow2(&psi(k, root), i64::from(bits) - 10) {
        return Err(Error::CacheInvalid(format!(
            "entry for k={k} is too loose for {bits} bits"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_revalidate() {
        let dir = tempfile::tempdir().unwrap();
        let ctx = PrecisionContext::default();
        let mut cache = PhiCache::open(dir.path()).unwrap();
        assert!(cache.is_empty());
        let a = cache.get_or_compute(5, &ctx).unwrap();
        cache.get_or_compute(77, &ctx).unwrap();
        cache.save().unwrap();

        let mut again = PhiCache::open(dir.path()).unwrap();
        assert_eq!(again.len(), 2);
        let b = again.get_or_compute(5, &ctx).unwrap();
        assert!((&a - &b).contains_zero());
        let text = fs::read_to_string(dir.path().join(CACHE_FILE)).unwrap();
        assert!(text.starts_with("phi 5 192 1.96594823664548"));
    }

    #[test]
    fn corrupted_entries_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let ctx = PrecisionContext::default();
        let mut cache = PhiCache::open(dir.path()).unwrap();
        cache.get_or_compute(4, &ctx).unwrap();
        cache.save().unwrap();
        let path = dir.path().join(CACHE_FILE);
        let text = fs::read_to_string(&path).unwrap();

        // flip a digit in the middle of the midpoint
        let mut bad = text.clone().into_bytes();
        let pos = text.find("1.92756").unwrap() + 5;
        bad[pos] = if bad[pos] == b'9' { b'1' } else { b'9' };
        fs::write(&path, &bad).unwrap();
        assert!(matches!(
            PhiCache::open(dir.path()),
            Err(Error::CacheInvalid(_))
        ));

        fs::write(&path, "phi 4 192 garbage 1e-3\n").unwrap();
        assert!(matches!(
            PhiCache::open(dir.path()),
            Err(Error::CacheInvalid(_))
        ));
    }
}
