//! Ball arithmetic over dyadic numbers.
//!
//! An [`ApproxReal`] is a midpoint `mid * 2^exp` with a radius
//! `rad * 2^exp`. Every operation rounds outward: the exact result of the
//! operation applied to any points of the operand balls lies inside the
//! returned ball.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Radii are kept to this many bits; anything finer is meaningless noise.
const RAD_BITS: u64 = 64;

/// An exact dyadic rational `mant * 2^exp`. Equality is by value.
#[derive(Clone, Debug)]
pub struct Dyadic {
    pub mant: BigInt,
    pub exp: i64,
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        Dyadic { mant, exp }
    }

    pub fn integer(n: BigInt) -> Self {
        Dyadic { mant: n, exp: 0 }
    }

    /// Rewrite with exponent `e <= self.exp`, exactly.
    fn at_exp(&self, e: i64) -> BigInt {
        debug_assert!(e <= self.exp);
        &self.mant << ((self.exp - e) as u64)
    }

    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << (self.exp as u64)
        } else {
            shr_floor(&self.mant, (-self.exp) as u64)
        }
    }

    pub fn ceil(&self) -> BigInt {
        -Dyadic::new(-&self.mant, self.exp).floor()
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        let e = self.exp.min(other.exp);
        Dyadic::new(self.at_exp(e) - other.at_exp(e), e)
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        let e = self.exp.min(other.exp);
        Dyadic::new(self.at_exp(e) + other.at_exp(e), e)
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn to_f64(&self) -> f64 {
        let bits = self.mant.bits();
        let (m, e) = if bits > 64 {
            let s = bits - 64;
            (shr_floor(&self.mant, s), self.exp + s as i64)
        } else {
            (self.mant.clone(), self.exp)
        };
        ldexp(m.to_f64().unwrap_or(0.0), e)
    }
}

impl PartialEq for Dyadic {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Dyadic {}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.mant.sign(), other.mant.sign()) {
            (a, b) if a != b => return sign_rank(a).cmp(&sign_rank(b)),
            (Sign::NoSign, _) => return Ordering::Equal,
            _ => {}
        }
        let e = self.exp.min(other.exp);
        self.at_exp(e).cmp(&other.at_exp(e))
    }
}

fn sign_rank(s: Sign) -> i8 {
    match s {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

pub(crate) fn shr_floor(n: &BigInt, s: u64) -> BigInt {
    if s == 0 {
        return n.clone();
    }
    n.div_floor(&(BigInt::one() << s))
}

fn shr_ceil(n: &BigUint, s: u64) -> BigUint {
    if s == 0 {
        return n.clone();
    }
    let q = n >> s;
    if low_bits_nonzero(n, s) {
        q + 1u32
    } else {
        q
    }
}

fn low_bits_nonzero(n: &BigUint, s: u64) -> bool {
    match n.trailing_zeros() {
        None => false,
        Some(tz) => tz < s,
    }
}

pub(crate) fn ldexp(x: f64, e: i64) -> f64 {
    let mut x = x;
    let mut e = e;
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

/// Certified real: every represented exact value lies in
/// `[(mid - rad) * 2^exp, (mid + rad) * 2^exp]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproxReal {
    mid: BigInt,
    rad: BigUint,
    exp: i64,
    prec: u32,
}

impl ApproxReal {
    fn normalized(mid: BigInt, rad: BigUint, exp: i64, prec: u32) -> Self {
        let p = u64::from(prec);
        let s = mid
            .bits()
            .saturating_sub(p)
            .max(rad.bits().saturating_sub(RAD_BITS));
        if s == 0 {
            let exp = if mid.is_zero() && rad.is_zero() {
                0
            } else {
                exp
            };
            return ApproxReal {
                mid,
                rad,
                exp,
                prec,
            };
        }
        let (sign, mag) = mid.into_parts();
        let lost = low_bits_nonzero(&mag, s);
        let mut rad = shr_ceil(&rad, s);
        if lost {
            rad += 1u32;
        }
        ApproxReal {
            mid: BigInt::from_biguint(sign, mag >> s),
            rad,
            exp: exp + s as i64,
            prec,
        }
    }

    pub fn zero(prec: u32) -> Self {
        ApproxReal {
            mid: BigInt::zero(),
            rad: BigUint::zero(),
            exp: 0,
            prec,
        }
    }

    pub fn one(prec: u32) -> Self {
        Self::from_int(1, prec)
    }

    pub fn from_int(n: impl Into<BigInt>, prec: u32) -> Self {
        Self::normalized(n.into(), BigUint::zero(), 0, prec)
    }

    pub fn from_biguint(n: &BigUint, prec: u32) -> Self {
        Self::normalized(BigInt::from(n.clone()), BigUint::zero(), 0, prec)
    }

    /// Exact dyadic `mant * 2^exp`, rounded to `prec` bits if needed.
    pub fn from_dyadic(mant: BigInt, exp: i64, prec: u32) -> Self {
        Self::normalized(mant, BigUint::zero(), exp, prec)
    }

    /// Ball enclosing the rational `num / den`.
    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let (num, den) = if den.is_negative() {
            (-num, -den)
        } else {
            (num.clone(), den.clone())
        };
        let s = i64::from(prec) + 2 + den.bits() as i64 - num.bits() as i64;
        let (q, r) = if s >= 0 {
            (num << (s as u64)).div_mod_floor(&den)
        } else {
            num.div_mod_floor(&(den << ((-s) as u64)))
        };
        let rad = if r.is_zero() {
            BigUint::zero()
        } else {
            BigUint::one()
        };
        Self::normalized(q, rad, -s, prec)
    }

    /// Parse a decimal literal such as `17.2`, `-0.5` or `3.94e158`.
    pub fn from_decimal(s: &str, prec: u32) -> Result<Self> {
        let (num, den) = parse_decimal(s)?;
        Ok(Self::from_ratio(&num, &den, prec))
    }

    /// Smallest ball containing both dyadic endpoints.
    pub fn from_bounds(lo: &Dyadic, hi: &Dyadic, prec: u32) -> Self {
        debug_assert!(lo <= hi);
        let e = lo.exp.min(hi.exp);
        let l = lo.at_exp(e);
        let h = hi.at_exp(e);
        let mid = shr_floor(&(&l + &h), 1);
        let rad = (&h - &mid).into_parts().1;
        Self::normalized(mid, rad, e, prec)
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// Re-round to a new precision (growing the radius if bits are dropped).
    pub fn with_precision(&self, prec: u32) -> Self {
        Self::normalized(self.mid.clone(), self.rad.clone(), self.exp, prec)
    }

    pub fn midpoint(&self) -> Dyadic {
        Dyadic::new(self.mid.clone(), self.exp)
    }

    pub fn radius(&self) -> Dyadic {
        Dyadic::new(BigInt::from(self.rad.clone()), self.exp)
    }

    /// The ball collapsed to its (exact) midpoint.
    pub fn mid_only(&self) -> Self {
        ApproxReal {
            mid: self.mid.clone(),
            rad: BigUint::zero(),
            exp: self.exp,
            prec: self.prec,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.mid.is_zero() && self.rad.is_zero()
    }

    pub fn lo(&self) -> Dyadic {
        Dyadic::new(&self.mid - BigInt::from(self.rad.clone()), self.exp)
    }

    pub fn hi(&self) -> Dyadic {
        Dyadic::new(&self.mid + BigInt::from(self.rad.clone()), self.exp)
    }

    /// Upper bound on the base-2 magnitude: `|x| < 2^top`.
    fn top(&self) -> i64 {
        if self.is_exact_zero() {
            return i64::MIN / 4;
        }
        self.exp + self.mid.bits().max(self.rad.bits()) as i64 + 1
    }

    fn rescaled(&self, e: i64) -> (BigInt, BigUint) {
        if self.exp >= e {
            let d = (self.exp - e) as u64;
            (&self.mid << d, &self.rad << d)
        } else {
            let s = (e - self.exp) as u64;
            let lost = low_bits_nonzero(self.mid.magnitude(), s);
            let mut rad = shr_ceil(&self.rad, s);
            if lost {
                rad += 1u32;
            }
            (shr_floor(&self.mid, s), rad)
        }
    }

    fn add_prec(&self, other: &Self, prec: u32) -> Self {
        if self.is_exact_zero() {
            return other.with_precision(prec);
        }
        if other.is_exact_zero() {
            return self.with_precision(prec);
        }
        let top = self.top().max(other.top());
        let e = self.exp.min(other.exp).max(top - i64::from(prec) - 4);
        let (ma, ra) = self.rescaled(e);
        let (mb, rb) = other.rescaled(e);
        Self::normalized(ma + mb, ra + rb, e, prec)
    }

    fn mul_prec(&self, other: &Self, prec: u32) -> Self {
        let mid = &self.mid * &other.mid;
        let mut rad = BigUint::zero();
        if !other.rad.is_zero() {
            rad += self.mid.magnitude() * &other.rad;
        }
        if !self.rad.is_zero() {
            rad += other.mid.magnitude() * &self.rad;
            if !other.rad.is_zero() {
                rad += &self.rad * &other.rad;
            }
        }
        Self::normalized(mid, rad, self.exp + other.exp, prec)
    }

    pub fn abs(&self) -> Self {
        if self.mid.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Certified sign: `None` when the ball straddles zero.
    pub fn sign(&self) -> Option<Ordering> {
        if self.mid.magnitude() > &self.rad {
            Some(if self.mid.is_positive() {
                Ordering::Greater
            } else {
                Ordering::Less
            })
        } else if self.is_exact_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign() == Some(Ordering::Greater)
    }

    pub fn is_negative(&self) -> bool {
        self.sign() == Some(Ordering::Less)
    }

    pub fn contains_zero(&self) -> bool {
        self.mid.magnitude() <= &self.rad
    }

    /// Certified comparison using exact endpoint arithmetic.
    pub fn cmp_certified(&self, other: &Self) -> Option<Ordering> {
        if self.hi() < other.lo() {
            Some(Ordering::Less)
        } else if self.lo() > other.hi() {
            Some(Ordering::Greater)
        } else if self.is_exact() && other.is_exact() && self.mid_eq(other) {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    fn mid_eq(&self, other: &Self) -> bool {
        self.midpoint().cmp(&other.midpoint()) == Ordering::Equal
    }

    /// `Ok(true)` if certainly `self < other`, `Ok(false)` if certainly
    /// `self >= other`, otherwise [`Error::Undecided`].
    pub fn lt(&self, other: &Self) -> Result<bool> {
        match self.cmp_certified(other) {
            Some(Ordering::Less) => Ok(true),
            Some(_) => Ok(false),
            None => Err(self.undecided()),
        }
    }

    pub fn contains_dyadic(&self, x: &Dyadic) -> bool {
        &self.lo() <= x && x <= &self.hi()
    }

    pub fn contains_int(&self, n: &BigInt) -> bool {
        self.contains_dyadic(&Dyadic::integer(n.clone()))
    }

    pub(crate) fn undecided(&self) -> Error {
        Error::Undecided { bits: self.prec }
    }

    /// Floor, if it is the same for every point of the ball.
    pub fn floor(&self) -> Option<BigInt> {
        let lo = self.lo().floor();
        let hi = self.hi().floor();
        (lo == hi).then_some(lo)
    }

    /// Distance to the nearest integer, `||x||`.
    ///
    /// Undecided when the ball straddles a half-integer, since the nearest
    /// integer is then not unique across the ball.
    pub fn nearest_int_distance(&self) -> Result<ApproxReal> {
        if self.is_exact() {
            let m = self.midpoint();
            let below = m.sub(&Dyadic::integer(m.floor()));
            let above = Dyadic::integer(BigInt::one()).sub(&below);
            let d = below.min(above);
            return Ok(Self::from_bounds(&d, &d, self.prec));
        }
        let n = if self.exp >= 0 {
            &self.mid << (self.exp as u64)
        } else {
            let s = (-self.exp) as u64;
            shr_floor(&(&self.mid + (BigInt::one() << (s - 1))), s)
        };
        let half_below = Dyadic::new(2 * &n - 1, -1);
        let half_above = Dyadic::new(2 * &n + 1, -1);
        let lo = self.lo();
        let hi = self.hi();
        if lo <= half_below || hi >= half_above {
            return Err(self.undecided());
        }
        let nd = Dyadic::integer(n);
        let (dlo, dhi) = if lo >= nd {
            (lo.sub(&nd), hi.sub(&nd))
        } else if hi <= nd {
            (nd.sub(&hi), nd.sub(&lo))
        } else {
            let a = nd.sub(&lo);
            let b = hi.sub(&nd);
            (Dyadic::integer(BigInt::zero()), a.max(b))
        };
        Ok(Self::from_bounds(&dlo, &dhi, self.prec))
    }

    /// Reciprocal. Undecided if the ball contains zero.
    pub fn recip(&self) -> Result<Self> {
        if self.is_exact_zero() {
            return Err(Error::domain("reciprocal of zero"));
        }
        if self.contains_zero() {
            return Err(self.undecided());
        }
        let m = self.mid.magnitude();
        let lo_mag = m - &self.rad;
        let hi_mag = m + &self.rad;
        let s = u64::from(self.prec) + 2 + hi_mag.bits();
        let one = BigUint::one() << s;
        let l = &one / &hi_mag;
        let (uq, ur) = one.div_rem(&lo_mag);
        let u = if ur.is_zero() { uq } else { uq + 1u32 };
        let e = -self.exp - s as i64;
        let (l, u) = if self.mid.is_negative() {
            (-BigInt::from(u), -BigInt::from(l))
        } else {
            (BigInt::from(l), BigInt::from(u))
        };
        Ok(Self::from_bounds(
            &Dyadic::new(l, e),
            &Dyadic::new(u, e),
            self.prec,
        ))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        let prec = self.prec.max(other.prec);
        let inv = other.with_precision(prec + 4).recip()?;
        Ok(self.mul_prec(&inv, prec))
    }

    pub fn sqrt(&self) -> Result<Self> {
        if self.is_exact_zero() {
            return Ok(self.clone());
        }
        if self.hi().is_negative() {
            return Err(Error::domain("square root of a negative number"));
        }
        if self.lo().is_negative() {
            return Err(self.undecided());
        }
        let m = self.mid.magnitude();
        let lo = m - &self.rad;
        let hi = m + &self.rad;
        let want = 2 * u64::from(self.prec) + 4;
        let mut t = want.saturating_sub(hi.bits());
        if (self.exp - t as i64).rem_euclid(2) != 0 {
            t += 1;
        }
        let l = (lo << t).sqrt();
        let hs = &hi << t;
        let h0 = hs.sqrt();
        let h = if &h0 * &h0 == hs { h0 } else { h0 + 1u32 };
        let e = (self.exp - t as i64) / 2;
        Ok(Self::from_bounds(
            &Dyadic::new(BigInt::from(l), e),
            &Dyadic::new(BigInt::from(h), e),
            self.prec,
        ))
    }

    /// Integer power by repeated squaring.
    pub fn powi(&self, n: u64) -> Self {
        let guard = 64 - n.leading_zeros() + 4;
        let p = self.prec + guard;
        let mut result = Self::one(p);
        let mut base = self.with_precision(p);
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_prec(&base, p);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_prec(&base, p);
            }
        }
        result.with_precision(self.prec)
    }

    pub fn mul_int(&self, n: impl Into<BigInt>) -> Self {
        self.mul_prec(&Self::from_int(n, self.prec), self.prec)
    }

    /// Ball widened by the absolute value bound of `extra`.
    pub fn widen(&self, extra: &ApproxReal) -> Self {
        let e = extra.abs().hi();
        Self::from_bounds(&self.lo().sub(&e), &self.hi().add(&e), self.prec)
    }

    pub fn to_f64(&self) -> f64 {
        self.midpoint().to_f64()
    }

    pub fn radius_f64(&self) -> f64 {
        self.radius().to_f64()
    }

    /// Midpoint as a plain decimal with `frac_digits` digits after the point.
    pub fn to_decimal(&self, frac_digits: usize) -> String {
        dyadic_to_fixed(&self.midpoint(), frac_digits)
    }

    /// Midpoint in scientific notation with `sig` significant digits.
    pub fn to_sci(&self, sig: usize) -> String {
        dyadic_to_sci(&self.midpoint(), sig, Rounding::Nearest)
    }

    /// Radius rounded up, in scientific notation.
    pub fn radius_sci(&self, sig: usize) -> String {
        dyadic_to_sci(&self.radius(), sig, Rounding::Up)
    }
}

impl fmt::Display for ApproxReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ± {}", self.to_sci(20), self.radius_sci(3))
    }
}

impl Neg for &ApproxReal {
    type Output = ApproxReal;
    fn neg(self) -> ApproxReal {
        ApproxReal {
            mid: -&self.mid,
            rad: self.rad.clone(),
            exp: self.exp,
            prec: self.prec,
        }
    }
}

impl Neg for ApproxReal {
    type Output = ApproxReal;
    fn neg(self) -> ApproxReal {
        -&self
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&ApproxReal> for &ApproxReal {
            type Output = ApproxReal;
            fn $method(self, rhs: &ApproxReal) -> ApproxReal {
                let f: fn(&ApproxReal, &ApproxReal) -> ApproxReal = $body;
                f(self, rhs)
            }
        }
        impl $trait<ApproxReal> for ApproxReal {
            type Output = ApproxReal;
            fn $method(self, rhs: ApproxReal) -> ApproxReal {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&ApproxReal> for ApproxReal {
            type Output = ApproxReal;
            fn $method(self, rhs: &ApproxReal) -> ApproxReal {
                (&self).$method(rhs)
            }
        }
        impl $trait<ApproxReal> for &ApproxReal {
            type Output = ApproxReal;
            fn $method(self, rhs: ApproxReal) -> ApproxReal {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| a.add_prec(b, a.prec.max(b.prec)));
binop!(Sub, sub, |a, b| a.add_prec(&-b, a.prec.max(b.prec)));
binop!(Mul, mul, |a, b| a.mul_prec(b, a.prec.max(b.prec)));

/// Parse `[-]digits[.digits][e[-]digits]` into an exact fraction.
pub fn parse_decimal(s: &str) -> Result<(BigInt, BigInt)> {
    let bad = || Error::Parse(format!("not a decimal number: {s:?}"));
    let s = s.trim();
    let (body, exp10) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, body) = match body.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, body.strip_prefix('+').unwrap_or(body)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((a, b)) => (a, b),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = digits.parse().map_err(|_| bad())?;
    if neg {
        num = -num;
    }
    let scale = exp10 - frac_part.len() as i64;
    let ten = BigInt::from(10u32);
    if scale >= 0 {
        Ok((num * num_traits::pow(ten, scale as usize), BigInt::one()))
    } else {
        Ok((num, num_traits::pow(ten, (-scale) as usize)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Rounding {
    Nearest,
    Up,
}

/// `num / den` rounded per `mode`, both positive.
fn div_round(num: &BigInt, den: &BigInt, mode: Rounding) -> BigInt {
    match mode {
        Rounding::Nearest => (num * 2u32 + den).div_floor(&(den * 2u32)),
        Rounding::Up => num.div_ceil(den),
    }
}

/// Exact `(num, den)` for a dyadic times `10^k`.
fn scaled_by_pow10(d: &Dyadic, k: i64) -> (BigInt, BigInt) {
    let ten = BigInt::from(10u32);
    let mut num = d.mant.abs();
    let mut den = BigInt::one();
    if k >= 0 {
        num *= num_traits::pow(ten, k as usize);
    } else {
        den *= num_traits::pow(ten, (-k) as usize);
    }
    if d.exp >= 0 {
        num <<= d.exp as u64;
    } else {
        den <<= (-d.exp) as u64;
    }
    (num, den)
}

pub(crate) fn dyadic_to_sci(d: &Dyadic, sig: usize, mode: Rounding) -> String {
    let sig = sig.max(1);
    if d.mant.is_zero() {
        return "0".to_string();
    }
    let sign = if d.mant.is_negative() { "-" } else { "" };
    let log2 = d.mant.bits() as f64 - 1.0 + d.exp as f64;
    let mut e10 = (log2 * std::f64::consts::LOG10_2).floor() as i64;
    let lower = num_traits::pow(BigInt::from(10u32), sig - 1);
    let upper = &lower * 10;
    loop {
        let (num, den) = scaled_by_pow10(d, sig as i64 - 1 - e10);
        let q = div_round(&num, &den, mode);
        if q >= upper {
            e10 += 1;
            continue;
        }
        if q < lower {
            e10 -= 1;
            continue;
        }
        let digits = q.to_string();
        let (head, tail) = digits.split_at(1);
        return if tail.is_empty() {
            format!("{sign}{head}e{e10}")
        } else {
            format!("{sign}{head}.{tail}e{e10}")
        };
    }
}

pub(crate) fn dyadic_to_fixed(d: &Dyadic, frac_digits: usize) -> String {
    let (num, den) = scaled_by_pow10(d, frac_digits as i64);
    let q = div_round(&num, &den, Rounding::Nearest);
    let neg = d.mant.is_negative() && !q.is_zero();
    let mut digits = q.to_string();
    if digits.len() <= frac_digits {
        digits = format!("{}{digits}", "0".repeat(frac_digits + 1 - digits.len()));
    }
    let (int_part, frac_part) = digits.split_at(digits.len() - frac_digits);
    let sign = if neg { "-" } else { "" };
    if frac_digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}
