//! Certified logarithm and the quadratic constants `γ = 3 + 2√2`,
//! `δ = 3 − 2√2`.

use std::sync::Mutex;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use super::ball::{ApproxReal, Dyadic};
use crate::error::{Error, Result};

/// Fixed-point value `val * 2^-bits` with an error of at most `err` units.
#[derive(Clone, Debug)]
struct Fixed {
    val: BigInt,
    err: BigUint,
    bits: u64,
}

impl Fixed {
    fn truncated(&self, bits: u64) -> Fixed {
        if bits >= self.bits {
            return self.clone();
        }
        let s = self.bits - bits;
        Fixed {
            val: super::ball::shr_floor(&self.val, s),
            err: (&self.err >> s) + 2u32,
            bits,
        }
    }
}

/// `atanh(z)` for a fixed-point `z = sign * mag * 2^-bits` with `|z| <= 1/3`.
///
/// Each truncation costs at most one unit; the running power carries at most
/// two units of error, so the sum of `n` terms plus the tail is off by less
/// than `3n + 8` units.
fn atanh_fixed(z_mag: &BigUint, negative: bool, bits: u64) -> Fixed {
    let z2 = (z_mag * z_mag) >> bits;
    let mut power = z_mag.clone();
    let mut sum = BigUint::zero();
    let mut terms = 0u64;
    let mut odd = 1u32;
    while !power.is_zero() {
        sum += &power / odd;
        power = (&power * &z2) >> bits;
        odd += 2;
        terms += 1;
    }
    let val = if negative {
        -BigInt::from(sum)
    } else {
        BigInt::from(sum)
    };
    Fixed {
        val,
        err: BigUint::from(3 * terms + 8),
        bits,
    }
}

static LOG2_CACHE: Mutex<Option<Fixed>> = Mutex::new(None);

/// `log 2 = 2 atanh(1/3)` to `bits` fractional bits.
fn log2_fixed(bits: u64) -> Fixed {
    let mut cache = LOG2_CACHE.lock().unwrap_or_else(|e| e.into_inner());
    if let Some(c) = cache.as_ref() {
        if c.bits >= bits {
            return c.truncated(bits);
        }
    }
    let wide = bits.max(256) * 2;
    let z = (BigUint::one() << wide) / 3u32;
    let a = atanh_fixed(&z, false, wide);
    let full = Fixed {
        val: a.val * 2,
        err: a.err * 2u32 + 2u32,
        bits: wide,
    };
    let out = full.truncated(bits);
    *cache = Some(full);
    out
}

/// `log(m * 2^e)` for an exact positive dyadic, in fixed point.
fn log_dyadic_fixed(m: &BigUint, e: i64, bits: u64) -> Fixed {
    // m * 2^e = v * 2^j with v in [1/sqrt2, sqrt2]
    let b = m.bits();
    let mut t = b - 1;
    if m * m > BigUint::one() << (2 * b - 1) {
        t = b;
    }
    let j = e + t as i64;
    let pow_t = BigUint::one() << t;
    let (diff_mag, negative) = if m >= &pow_t {
        (m - &pow_t, false)
    } else {
        (&pow_t - m, true)
    };
    let z = (diff_mag << bits) / (m + &pow_t);
    let at = atanh_fixed(&z, negative, bits);
    let mut val = at.val * 2;
    let mut err = at.err * 2u32 + 3u32;
    if j != 0 {
        let l2 = log2_fixed(bits);
        val += l2.val * j;
        err += l2.err * j.unsigned_abs();
    }
    Fixed { val, err, bits }
}

/// Natural logarithm.
///
/// The midpoint's logarithm is computed in fixed point with a certified
/// truncation bound; the radius is propagated through the derivative bound
/// `rad / inf(x)`.
pub fn log(x: &ApproxReal) -> Result<ApproxReal> {
    let prec = x.precision();
    if x.is_exact_zero() || x.hi() <= Dyadic::integer(BigInt::zero()) {
        return Err(Error::domain("logarithm of a non-positive number"));
    }
    if x.contains_zero() {
        return Err(Error::domain("logarithm argument interval touches zero"));
    }
    let mid = x.midpoint();
    if x.is_exact() && mid.mant.is_one() && mid.exp == 0 {
        return Ok(ApproxReal::zero(prec));
    }
    let m = mid.mant.magnitude();
    let e_abs = (mid.exp + m.bits() as i64).unsigned_abs();
    let guard = 40 + (64 - e_abs.leading_zeros()) as u64;
    let bits = u64::from(prec) + guard;
    let f = log_dyadic_fixed(m, mid.exp, bits);
    let mut err = f.err;
    if !x.is_exact() {
        // |log x - log mid| <= rad / (mid - rad), in units of 2^-bits
        let rad = x.radius().mant.magnitude().clone();
        let lo = m - &rad;
        let (q, r) = (rad << bits).div_rem(&lo);
        err += q + if r.is_zero() { 0u32 } else { 1u32 };
    }
    let val = ApproxReal::from_dyadic(f.val, -(bits as i64), prec);
    let radius = ApproxReal::from_dyadic(BigInt::from(err), -(bits as i64), prec);
    Ok(val.widen(&radius))
}

/// `log 2` at `prec` bits.
pub fn ln2(prec: u32) -> ApproxReal {
    let bits = u64::from(prec) + 16;
    let f = log2_fixed(bits);
    ApproxReal::from_dyadic(f.val, -(bits as i64), prec).widen(&ApproxReal::from_dyadic(
        BigInt::from(f.err),
        -(bits as i64),
        prec,
    ))
}

/// Roots of `x² − 6x + 1` and their logarithms.
#[derive(Clone, Debug)]
pub struct AlgebraicConstants {
    pub sqrt2: ApproxReal,
    pub gamma: ApproxReal,
    pub delta: ApproxReal,
    pub log_gamma: ApproxReal,
    pub log2: ApproxReal,
}

impl AlgebraicConstants {
    pub fn new(prec: u32) -> Result<Self> {
        let sqrt2 = ApproxReal::from_int(2, prec + 8).sqrt()?;
        let three = ApproxReal::from_int(3, prec + 8);
        let twice = sqrt2.mul_int(2);
        let gamma = (&three + &twice).with_precision(prec);
        let delta = (&three - &twice).with_precision(prec);
        let log_gamma = log(&gamma)?;
        Ok(AlgebraicConstants {
            sqrt2: sqrt2.with_precision(prec),
            gamma,
            delta,
            log_gamma,
            log2: ln2(prec),
        })
    }
}

/// `x.abs() < 2^-bits`, certified.
pub(crate) fn is_below_pow2(x: &ApproxReal, bits: i64) -> bool {
    let bound = Dyadic::new(BigInt::one(), -bits);
    x.abs().hi() < bound
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN2_50: &str = "0.69314718055994530941723212145817656807550013436026";
    const LN_GAMMA_50: &str = "1.76274717403908605046521864995958461805632065652327";

    fn assert_digits(x: &ApproxReal, expected: &str, digits: usize) {
        let got = x.to_decimal(digits);
        assert_eq!(&got[..], &expected[..got.len()], "got {x}");
    }

    #[test]
    fn log_of_one_is_exact_zero() {
        let l = log(&ApproxReal::one(128)).unwrap();
        assert!(l.is_exact_zero());
    }

    #[test]
    fn log_two_and_gamma_match_reference_digits() {
        assert_digits(&log(&ApproxReal::from_int(2, 200)).unwrap(), LN2_50, 48);
        assert_digits(&ln2(200), LN2_50, 48);
        let c = AlgebraicConstants::new(200).unwrap();
        assert_digits(&c.log_gamma, LN_GAMMA_50, 48);
    }

    #[test]
    fn log_rejects_non_positive() {
        assert!(matches!(log(&ApproxReal::zero(64)), Err(Error::Domain(_))));
        assert!(matches!(
            log(&ApproxReal::from_int(-3, 64)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn gamma_delta_identities() {
        let c = AlgebraicConstants::new(256).unwrap();
        let prod = &c.gamma * &c.delta;
        assert!(prod.contains_int(&BigInt::one()));
        let sum = &c.gamma + &c.delta;
        assert!(sum.contains_int(&BigInt::from(6)));
        let logs = &c.log_gamma + &log(&c.delta).unwrap();
        assert!(logs.contains_zero());
        assert!(is_below_pow2(&logs, 240));
    }

    #[test]
    fn log_of_huge_and_tiny_arguments() {
        // log(2^1000 * 3) = 1000 log 2 + log 3
        let x = ApproxReal::from_int(BigInt::from(3) << 1000u32, 256);
        let l = log(&x).unwrap();
        let expect = &ln2(300).mul_int(1000) + &log(&ApproxReal::from_int(3, 300)).unwrap();
        assert!((&l - &expect).contains_zero());
        let tiny = ApproxReal::from_dyadic(BigInt::one(), -5000, 256);
        let lt = log(&tiny).unwrap();
        assert!((&lt + &ln2(300).mul_int(5000)).contains_zero());
        assert!(lt.radius_f64() < 1e-60);
    }

    #[test]
    fn log_tracks_input_radius() {
        let x = ApproxReal::from_decimal("1.5", 128)
            .unwrap()
            .widen(&ApproxReal::from_decimal("1e-10", 128).unwrap());
        let l = log(&x).unwrap();
        assert!(l.radius_f64() > 6e-11 && l.radius_f64() < 7e-11);
    }
}
