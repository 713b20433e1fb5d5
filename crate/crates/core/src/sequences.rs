//! Exact balancing, Lucas-balancing and k-generalized Fibonacci numbers.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    dominant_root, f_k_at_root, AlgebraicConstants, ApproxReal, PrecisionContext,
};

/// The next `k`-Fibonacci term is the sum of the window; the sum is kept
/// incrementally so each step costs two big-integer additions.
#[derive(Clone, Debug)]
pub struct SequenceWindow {
    k: u32,
    values: VecDeque<BigInt>,
    sum: BigInt,
    next_index: i64,
}

impl SequenceWindow {
    /// Window holding `F_{-(k-2)} = … = F_0 = 0, F_1 = 1`.
    pub fn new(k: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::Precondition(format!(
                "k-Fibonacci needs k >= 2, got {k}"
            )));
        }
        let mut values: VecDeque<BigInt> = (0..k - 1).map(|_| BigInt::zero()).collect();
        values.push_back(BigInt::one());
        Ok(SequenceWindow {
            k,
            values,
            sum: BigInt::one(),
            next_index: 2,
        })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Index of the term the next call to [`Iterator::next`] yields.
    pub fn next_index(&self) -> i64 {
        self.next_index
    }
}

impl Iterator for SequenceWindow {
    type Item = BigInt;

    fn next(&mut self) -> Option<BigInt> {
        let term = self.sum.clone();
        let oldest = self.values.pop_front().expect("window never empty");
        self.sum += &term;
        self.sum -= oldest;
        self.values.push_back(term.clone());
        self.next_index += 1;
        Some(term)
    }
}

/// Memoized terms `F_0, F_1, …` for a fixed `k`.
#[derive(Clone, Debug)]
pub struct KFibTable {
    terms: Vec<BigInt>,
    window: SequenceWindow,
}

impl KFibTable {
    pub fn new(k: u32) -> Result<Self> {
        Ok(KFibTable {
            terms: vec![BigInt::zero(), BigInt::one()],
            window: SequenceWindow::new(k)?,
        })
    }

    pub fn with_len(k: u32, n_max: usize) -> Result<Self> {
        let mut t = Self::new(k)?;
        t.extend_to(n_max);
        Ok(t)
    }

    pub fn k(&self) -> u32 {
        self.window.k
    }

    pub fn extend_to(&mut self, n: usize) {
        while self.terms.len() <= n {
            let t = self.window.next().expect("infinite sequence");
            self.terms.push(t);
        }
    }

    pub fn get(&mut self, n: usize) -> &BigInt {
        self.extend_to(n);
        &self.terms[n]
    }

    /// Terms computed so far, indexed from 0.
    pub fn terms(&self) -> &[BigInt] {
        &self.terms
    }
}

/// `F_n^(k)` for `n >= -(k-2)`.
pub fn kfib(k: u32, n: i64) -> Result<BigInt> {
    if k < 2 {
        return Err(Error::Precondition(format!(
            "k-Fibonacci needs k >= 2, got {k}"
        )));
    }
    if n < -(i64::from(k) - 2) {
        return Err(Error::Precondition(format!(
            "F_n^({k}) is only defined for n >= {}",
            -(i64::from(k) - 2)
        )));
    }
    if n <= 0 {
        return Ok(BigInt::zero());
    }
    let mut t = KFibTable::new(k)?;
    Ok(t.get(n as usize).clone())
}

fn six_recurrence(x0: BigInt, x1: BigInt, l: u64) -> BigInt {
    let (mut a, mut b) = (x0, x1);
    for _ in 0..l {
        let c = &b * 6u32 - &a;
        a = b;
        b = c;
    }
    a
}

pub fn balancing(l: u64) -> BigInt {
    six_recurrence(BigInt::zero(), BigInt::one(), l)
}

pub fn lucas_balancing(l: u64) -> BigInt {
    six_recurrence(BigInt::one(), BigInt::from(3), l)
}

/// `x_0, …, x_{l_max}` of the chosen six-term recurrence.
pub fn six_table(kind: SequenceKind, l_max: u64) -> Vec<BigInt> {
    let (mut a, mut b) = match kind {
        SequenceKind::Balancing => (BigInt::zero(), BigInt::one()),
        SequenceKind::LucasBalancing => (BigInt::one(), BigInt::from(3)),
        SequenceKind::KFib(_) => panic!("six_table is for balancing-type sequences"),
    };
    let mut out = Vec::with_capacity(l_max as usize + 1);
    for _ in 0..=l_max {
        out.push(a.clone());
        let c = &b * 6u32 - &a;
        a = b;
        b = c;
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceKind {
    Balancing,
    LucasBalancing,
    KFib(u32),
}

/// `(γ^l − δ^l)/(4√2)` in ball arithmetic.
pub fn balancing_binet(l: u64, c: &AlgebraicConstants) -> ApproxReal {
    let four_sqrt2 = c.sqrt2.mul_int(4);
    (&c.gamma.powi(l) - &c.delta.powi(l))
        .div(&four_sqrt2)
        .expect("4√2 is bounded away from zero")
}

/// `(γ^l + δ^l)/2` in ball arithmetic.
pub fn lucas_binet(l: u64, c: &AlgebraicConstants) -> ApproxReal {
    let half = ApproxReal::from_dyadic(BigInt::one(), -1, c.gamma.precision());
    &(&c.gamma.powi(l) + &c.delta.powi(l)) * &half
}

/// Certified `|F_n^(k) − f_k(φ) φ^(n−1)|`, checked to be below `1/2`.
pub fn binet_residual(k: u32, n: u64, ctx: &PrecisionContext) -> Result<ApproxReal> {
    if n == 0 {
        return Err(Error::Precondition("binet_residual needs n >= 1".into()));
    }
    let value = kfib(k, n as i64)?;
    let ctx = ctx.at_least(ctx.working_bits + n as u32 + 32);
    let phi = dominant_root(k, &ctx)?;
    let f = f_k_at_root(k, &phi)?;
    let approx = &f * &phi.powi(n - 1);
    checked_residual(k, n, &value, &approx)
}

/// Residuals for `n = 1..=n_max`, sharing one root and one running power.
pub fn binet_residuals(k: u32, n_max: u64, ctx: &PrecisionContext) -> Result<Vec<ApproxReal>> {
    let ctx = ctx.at_least(ctx.working_bits + n_max as u32 + 32);
    let phi = dominant_root(k, &ctx)?;
    let f = f_k_at_root(k, &phi)?;
    let mut table = KFibTable::with_len(k, n_max as usize)?;
    let mut approx = f;
    let mut out = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        out.push(checked_residual(k, n, table.get(n as usize), &approx)?);
        approx = &approx * &phi;
    }
    Ok(out)
}

fn checked_residual(k: u32, n: u64, value: &BigInt, approx: &ApproxReal) -> Result<ApproxReal> {
    let prec = approx.precision();
    let residual = (&ApproxReal::from_int(value.clone(), prec) - approx).abs();
    let half = ApproxReal::from_dyadic(BigInt::one(), -1, prec);
    if residual.lt(&half)? {
        Ok(residual)
    } else {
        Err(Error::invariant(format!(
            "Binet residual for k={k}, n={n} is {residual}, not below 1/2"
        )))
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct GrowthReport {
    pub checked: u64,
    pub violations: Vec<u64>,
}

impl GrowthReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check `γ^(n−1) ≤ B_n ≤ γ^n`, `γ^n ≤ 2C_n ≤ γ^(n+1)` or
/// `φ^(n−2) ≤ F_n ≤ φ^(n−1)` on every index of `range`.
pub fn check_growth_bounds(
    kind: SequenceKind,
    range: std::ops::RangeInclusive<u64>,
    ctx: &PrecisionContext,
) -> Result<GrowthReport> {
    if *range.start() == 0 {
        return Err(Error::Precondition("growth bounds start at index 1".into()));
    }
    let top = *range.end();
    ctx.escalate(|bits| {
        let prec = bits + top as u32 * 3 + 32;
        let (base, values, shift): (ApproxReal, Vec<BigInt>, i64) = match kind {
            SequenceKind::Balancing => (
                AlgebraicConstants::new(prec)?.gamma,
                six_table(kind, top),
                -1,
            ),
            SequenceKind::LucasBalancing => (
                AlgebraicConstants::new(prec)?.gamma,
                six_table(kind, top).into_iter().map(|c| c * 2u32).collect(),
                0,
            ),
            SequenceKind::KFib(k) => (
                dominant_root(k, &PrecisionContext::new(prec, prec.max(ctx.max_bits), 2)?)?,
                KFibTable::with_len(k, top as usize)?.terms().to_vec(),
                -2,
            ),
        };
        let mut report = GrowthReport::default();
        for n in range.clone() {
            let lower = power(&base, n as i64 + shift)?;
            let upper = power(&base, n as i64 + shift + 1)?;
            let v = ApproxReal::from_int(values[n as usize].clone(), prec);
            let ok_lo = cmp_le(&lower, &v)?;
            let ok_hi = cmp_le(&v, &upper)?;
            if !(ok_lo && ok_hi) {
                report.violations.push(n);
            }
            report.checked += 1;
        }
        Ok(report)
    })
}

fn power(base: &ApproxReal, e: i64) -> Result<ApproxReal> {
    if e >= 0 {
        Ok(base.powi(e as u64))
    } else {
        base.powi(e.unsigned_abs()).recip()
    }
}

/// Certified `a ≤ b`; equal exact values count as `≤`.
fn cmp_le(a: &ApproxReal, b: &ApproxReal) -> Result<bool> {
    if a.hi() <= b.lo() {
        Ok(true)
    } else if a.lo() > b.hi() {
        Ok(false)
    } else {
        Err(a.undecided())
    }
}

/// `|F_n^(k) / 2^(n−2) − 1|` (exact), checked against `2^(−k/2)`.
///
/// The bound is only guaranteed while `n < 2^(k/2)`; outside that range a
/// failure is reported as an invariant violation.
pub fn xi_deviation(k: u32, n: u64) -> Result<ApproxReal> {
    if n < u64::from(k) + 2 {
        return Err(Error::domain(format!(
            "ξ is defined for n >= k + 2 = {}, got n={n}",
            k + 2
        )));
    }
    let f = kfib(k, n as i64)?;
    let pow = BigInt::one() << (n - 2);
    let diff = (&f - &pow).abs();
    // |ξ|² < 2^−k  ⇔  diff² · 2^k < 2^(2(n−2))
    if (&diff * &diff) << k >= BigInt::one() << (2 * (n - 2)) {
        return Err(Error::invariant(format!(
            "|ξ| for k={k}, n={n} is not below 2^(-k/2)"
        )));
    }
    Ok(ApproxReal::from_ratio(&diff, &pow, 64 + n as u32))
}
