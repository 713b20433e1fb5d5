//! Dujella–Pethő reduction of `0 < |uτ − v + μ| < A·B^(−w)`, `u ≤ M`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::cf::{cf_expand, CfStop, ContinuedFraction, Refinable};
use crate::error::{Error, Result};
use crate::numerics::{log, ApproxReal, PrecisionContext};

/// Convergents tried after the first `q > 6M` before giving up.
pub const EXTRA_CONVERGENTS: usize = 32;

#[derive(Clone, Debug)]
pub struct ReductionInstance {
    pub tau: Refinable,
    pub mu: Refinable,
    pub a: Refinable,
    pub b: Refinable,
    pub m: BigInt,
}

impl ReductionInstance {
    fn check(&self, ctx: &PrecisionContext) -> Result<()> {
        if self.m < BigInt::one() {
            return Err(Error::Precondition(format!(
                "M must be at least 1, got {}",
                self.m
            )));
        }
        ctx.escalate(|bits| {
            let a = self.a.at(bits)?;
            let b = self.b.at(bits)?;
            let one = ApproxReal::one(bits);
            match (a.sign(), b.cmp_certified(&one)) {
                (Some(std::cmp::Ordering::Greater), Some(std::cmp::Ordering::Greater)) => Ok(()),
                (None, _) | (_, None) => Err(Error::Undecided { bits }),
                _ => Err(Error::Precondition(format!(
                    "need A > 0 and B > 1, got A = {a}, B = {b}"
                ))),
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionStatus {
    Reduced,
    EpsilonFailed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionMethod {
    DujellaPetho,
    Legendre,
}

#[derive(Clone, Debug)]
pub struct ReductionOutcome {
    pub status: ReductionStatus,
    pub method: ReductionMethod,
    pub q_index: usize,
    pub q_used: BigInt,
    /// `||μq|| − M·|qτ − p|`; for the Legendre route, the gap `min(ε', η)`.
    pub epsilon: ApproxReal,
    /// `log(A·q/ε)/log B`, when reduced.
    pub bound: Option<ApproxReal>,
    /// `⌈bound⌉`: every solution has `w < w_bound`.
    pub w_bound: Option<i64>,
    /// `μq` was an exact integer for every convergent tried.
    pub mu_degenerate: bool,
}

impl ReductionOutcome {
    pub fn is_reduced(&self) -> bool {
        self.status == ReductionStatus::Reduced
    }

    pub fn record(&self) -> OutcomeRecord {
        OutcomeRecord {
            status: self.status,
            method: self.method,
            q_index: self.q_index,
            q_digits10: self.q_used.to_string().len(),
            epsilon: self.epsilon.to_sci(6),
            bound: self.bound.as_ref().map(|b| b.to_decimal(3)),
            w_bound: self.w_bound,
        }
    }
}

/// Printable summary of a [`ReductionOutcome`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub status: ReductionStatus,
    pub method: ReductionMethod,
    pub q_index: usize,
    pub q_digits10: usize,
    pub epsilon: String,
    pub bound: Option<String>,
    pub w_bound: Option<i64>,
}

/// The shift `μ`: a ball, or an exact rational whose `||μq||` is computed
/// exactly.
#[derive(Clone, Debug)]
pub enum Shift {
    Real(ApproxReal),
    Rational(BigInt, BigInt),
}

impl Shift {
    pub fn of(mu: &Refinable, bits: u32) -> Result<Self> {
        Ok(match mu.exact() {
            Some((n, d)) => Shift::Rational(n.clone(), d.clone()),
            None => Shift::Real(mu.at(bits)?),
        })
    }

    /// `||μq||`.
    fn distance(&self, q: &BigInt, bits: u32) -> Result<ApproxReal> {
        match self {
            Shift::Real(x) => x.mul_int(q.clone()).nearest_int_distance(),
            Shift::Rational(n, d) => {
                let r = (n * q).mod_floor(d);
                let r = r.clone().min(d - &r);
                if r.is_zero() {
                    Ok(ApproxReal::zero(bits))
                } else {
                    Ok(ApproxReal::from_ratio(&r, d, bits))
                }
            }
        }
    }
}

fn ceil_hi(x: &ApproxReal) -> Result<i64> {
    x.hi()
        .ceil()
        .to_i64()
        .ok_or_else(|| Error::invariant(format!("bound {x} does not fit in i64")))
}

/// `log(A·q/ε)/log B` and its ceiling.
pub(crate) fn exponent_bound(
    a: &ApproxReal,
    q: &BigInt,
    eps: &ApproxReal,
    b: &ApproxReal,
) -> Result<(ApproxReal, i64)> {
    let x = a.mul_int(q.clone()).div(eps)?;
    let bound = log(&x)?.div(&log(b)?)?;
    let w = ceil_hi(&bound)?;
    Ok((bound, w))
}

/// The convergents of `τ` past `6M`, with `|q_i τ − p_i|` at a fixed precision.
///
/// Many instances share `τ` and `M` and differ only in `μ`; a plan is
/// built once and applied to each of them.
#[derive(Clone, Debug)]
pub struct ReductionPlan {
    cf: ContinuedFraction,
    first: usize,
    m: BigInt,
    bits: u32,
    deltas: Vec<ApproxReal>,
    /// `(N, a_max)` with `q_N > M + 1` minimal.
    legendre: Option<(usize, BigInt)>,
}

impl ReductionPlan {
    /// Expand `τ` past `6M` plus [`EXTRA_CONVERGENTS`] terms.
    pub fn expand(
        tau: &Refinable,
        m: &BigInt,
        ctx: &PrecisionContext,
    ) -> Result<ContinuedFraction> {
        let stop = CfStop::MinDenominator {
            bound: m * 6u32,
            extra: EXTRA_CONVERGENTS,
        };
        let cf = cf_expand(tau, &stop, ctx)?;
        if cf.terminated {
            return Err(Error::Precondition(format!(
                "τ = {} is rational",
                tau.label()
            )));
        }
        Ok(cf)
    }

    /// Precision that resolves `μq` and `M·|qτ − p|` for every candidate.
    pub fn natural_bits(cf: &ContinuedFraction, m: &BigInt) -> u32 {
        let q_bits = cf.convergents.last().map_or(0, |(_, q)| q.bits());
        (q_bits + m.bits() + 128) as u32
    }

    pub fn new(cf: ContinuedFraction, tau: &Refinable, m: &BigInt, bits: u32) -> Result<Self> {
        let first = cf
            .first_q_above(&(m * 6u32))
            .ok_or_else(|| Error::Precondition("expansion stops before q > 6M".into()))?;
        let t = tau.at(bits)?;
        let deltas = (first..cf.len())
            .map(|i| {
                (&t.mul_int(cf.q(i).clone()) - &ApproxReal::from_int(cf.p(i).clone(), bits)).abs()
            })
            .collect();
        let legendre = cf
            .first_q_above(&(m + 1u32))
            .and_then(|n| cf.max_quotient(n).map(|a| (n, a.clone())));
        Ok(ReductionPlan {
            cf,
            first,
            m: m.clone(),
            bits,
            deltas,
            legendre,
        })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn cf(&self) -> &ContinuedFraction {
        &self.cf
    }

    pub fn first_index(&self) -> usize {
        self.first
    }

    /// Apply the lemma with the given `μ`, `A`, `B`.
    ///
    /// Returns [`Error::Undecided`] when the sign of some `ε` or some
    /// `||μq||` cannot be settled at the plan's precision.
    pub fn reduce(
        &self,
        mu: &ApproxReal,
        a: &ApproxReal,
        b: &ApproxReal,
    ) -> Result<ReductionOutcome> {
        self.reduce_shift(&Shift::Real(mu.clone()), a, b)
    }

    pub fn reduce_shift(
        &self,
        mu: &Shift,
        a: &ApproxReal,
        b: &ApproxReal,
    ) -> Result<ReductionOutcome> {
        let mut degenerate = true;
        let mut last = None;
        for (j, delta) in self.deltas.iter().enumerate() {
            let i = self.first + j;
            let q = self.cf.q(i);
            let d = mu.distance(q, self.bits)?;
            degenerate &= d.is_exact_zero();
            let eps = &d - &delta.mul_int(self.m.clone());
            match eps.sign() {
                None => return Err(Error::Undecided { bits: self.bits }),
                Some(std::cmp::Ordering::Greater) => {
                    let (bound, w) = exponent_bound(a, q, &eps, b)?;
                    return Ok(ReductionOutcome {
                        status: ReductionStatus::Reduced,
                        method: ReductionMethod::DujellaPetho,
                        q_index: i,
                        q_used: q.clone(),
                        epsilon: eps,
                        bound: Some(bound),
                        w_bound: Some(w),
                        mu_degenerate: false,
                    });
                }
                _ => last = Some((i, eps)),
            }
        }
        let (i, eps) = last.ok_or_else(|| Error::invariant("reduction plan has no candidates"))?;
        Ok(ReductionOutcome {
            status: ReductionStatus::EpsilonFailed,
            method: ReductionMethod::DujellaPetho,
            q_index: i,
            q_used: self.cf.q(i).clone(),
            epsilon: eps,
            bound: None,
            w_bound: None,
            mu_degenerate: degenerate,
        })
    }
}

impl ReductionPlan {
    /// [`ReductionPlan::reduce`], then, if `ε` never turned positive,
    /// the Legendre bound for `μ` close to an integer `r`.
    ///
    /// With `η = |μ − r|` and `1 ≤ u ≤ M`,
    /// `|uτ − (v − r)| > 1/((a_max + 2)(M + 1))`, so any solution has
    /// `A·B^(−w) > ε' = 1/((a_max + 2)(M + 1)) − η`. For `u = 0` the
    /// form is at least `η` unless it vanishes. The bound is
    /// `log(A / min(ε', η))/log B`, or `log(A/ε')/log B` when `η = 0`.
    pub fn reduce_or_fallback(
        &self,
        mu: &ApproxReal,
        a: &ApproxReal,
        b: &ApproxReal,
    ) -> Result<ReductionOutcome> {
        self.reduce_shift_or_fallback(&Shift::Real(mu.clone()), a, b)
    }

    pub fn reduce_shift_or_fallback(
        &self,
        mu: &Shift,
        a: &ApproxReal,
        b: &ApproxReal,
    ) -> Result<ReductionOutcome> {
        let out = self.reduce_shift(mu, a, b)?;
        if out.is_reduced() {
            return Ok(out);
        }
        let Some((n, a_max)) = &self.legendre else {
            return Ok(out);
        };
        let prec = self.bits;
        let eta = mu.distance(&BigInt::one(), prec)?;
        let scale = (a_max + 2u32) * (&self.m + 1u32);
        let gap = &ApproxReal::from_ratio(&BigInt::one(), &scale, prec) - &eta;
        match gap.sign() {
            None => return Err(Error::Undecided { bits: self.bits }),
            Some(std::cmp::Ordering::Greater) => {}
            _ => return Ok(out),
        }
        let eps = if eta.is_exact_zero() {
            gap
        } else {
            match gap.cmp_certified(&eta) {
                Some(std::cmp::Ordering::Less) => gap,
                Some(_) => eta,
                None => return Err(Error::Undecided { bits: self.bits }),
            }
        };
        let (bound, w) = exponent_bound(a, &BigInt::one(), &eps, b)?;
        Ok(ReductionOutcome {
            status: ReductionStatus::Reduced,
            method: ReductionMethod::Legendre,
            q_index: *n,
            q_used: self.cf.q(*n).clone(),
            epsilon: eps,
            bound: Some(bound),
            w_bound: Some(w),
            mu_degenerate: out.mu_degenerate,
        })
    }
}

/// Reduce one instance, escalating precision as needed.
pub fn dujella_petho_reduce(
    inst: &ReductionInstance,
    ctx: &PrecisionContext,
) -> Result<ReductionOutcome> {
    inst.check(ctx)?;
    let cf = ReductionPlan::expand(&inst.tau, &inst.m, ctx)?;
    let start = ReductionPlan::natural_bits(&cf, &inst.m);
    ctx.at_least(start).escalate(|bits| {
        let plan = ReductionPlan::new(cf.clone(), &inst.tau, &inst.m, bits)?;
        plan.reduce_shift(
            &Shift::of(&inst.mu, bits)?,
            &inst.a.at(bits)?,
            &inst.b.at(bits)?,
        )
    })
}

/// Like [`dujella_petho_reduce`], falling back to the Legendre bound when
/// `μ` is an integer or too close to one; see [`ReductionPlan::reduce_or_fallback`].
pub fn reduce_with_fallback(
    inst: &ReductionInstance,
    ctx: &PrecisionContext,
) -> Result<ReductionOutcome> {
    inst.check(ctx)?;
    let cf = ReductionPlan::expand(&inst.tau, &inst.m, ctx)?;
    let start = ReductionPlan::natural_bits(&cf, &inst.m);
    ctx.at_least(start).escalate(|bits| {
        let plan = ReductionPlan::new(cf.clone(), &inst.tau, &inst.m, bits)?;
        plan.reduce_shift_or_fallback(
            &Shift::of(&inst.mu, bits)?,
            &inst.a.at(bits)?,
            &inst.b.at(bits)?,
        )
    })
}

/// `true` when `u·τ − v + μ` is nonzero for the given integers, certified.
pub fn linear_form_nonzero(
    tau: &ApproxReal,
    mu: &ApproxReal,
    u: &BigInt,
    v: &BigInt,
) -> Result<bool> {
    let prec = tau.precision();
    let lam = &(&tau.mul_int(u.clone()) - &ApproxReal::from_int(v.clone(), prec)) + mu;
    if lam.is_exact_zero() {
        return Ok(false);
    }
    if lam.contains_zero() {
        return Err(Error::Undecided { bits: prec });
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt2() -> Refinable {
        Refinable::new("√2", |bits| ApproxReal::from_int(2, bits).sqrt())
    }

    fn inst(mu: Refinable, a: &str, b: &str, m: u64) -> ReductionInstance {
        ReductionInstance {
            tau: sqrt2(),
            mu,
            a: Refinable::decimal(a).unwrap(),
            b: Refinable::decimal(b).unwrap(),
            m: BigInt::from(m),
        }
    }

    fn third() -> Refinable {
        Refinable::rational(BigInt::one(), BigInt::from(3)).unwrap()
    }

    #[test]
    fn sqrt2_one_third_reduces() {
        let out = dujella_petho_reduce(
            &inst(third(), "10", "2", 1000),
            &PrecisionContext::default(),
        )
        .unwrap();
        assert!(out.is_reduced());
        assert!(out.q_used > BigInt::from(6000));
        assert!(out.epsilon.is_positive());
        let w = out.w_bound.unwrap();
        assert!(w > 0 && w < 40, "w_bound = {w}");
    }

    #[test]
    fn zero_mu_fails_and_is_degenerate() {
        let zero = Refinable::rational(BigInt::zero(), BigInt::one()).unwrap();
        let out = dujella_petho_reduce(
            &inst(zero.clone(), "10", "2", 50),
            &PrecisionContext::default(),
        )
        .unwrap();
        assert_eq!(out.status, ReductionStatus::EpsilonFailed);
        assert!(out.mu_degenerate);
        assert!(out.epsilon.is_negative());

        let fb =
            reduce_with_fallback(&inst(zero, "10", "2", 50), &PrecisionContext::default()).unwrap();
        assert_eq!(fb.method, ReductionMethod::Legendre);
        assert!(fb.is_reduced());
    }

    #[test]
    fn rejects_bad_parameters() {
        let ctx = PrecisionContext::default();
        assert!(matches!(
            dujella_petho_reduce(&inst(third(), "10", "1", 10), &ctx),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            dujella_petho_reduce(&inst(third(), "-1", "2", 10), &ctx),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            dujella_petho_reduce(&inst(third(), "1", "2", 0), &ctx),
            Err(Error::Precondition(_))
        ));
        let mut rational = inst(third(), "1", "2", 10);
        rational.tau = Refinable::rational(BigInt::from(7), BigInt::from(5)).unwrap();
        assert!(matches!(
            dujella_petho_reduce(&rational, &ctx),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn plan_matches_direct_reduction() {
        let ctx = PrecisionContext::default();
        let i = inst(third(), "10", "2", 1000);
        let direct = dujella_petho_reduce(&i, &ctx).unwrap();
        let cf = ReductionPlan::expand(&i.tau, &i.m, &ctx).unwrap();
        let bits = ReductionPlan::natural_bits(&cf, &i.m);
        let plan = ReductionPlan::new(cf, &i.tau, &i.m, bits).unwrap();
        let via = plan
            .reduce(
                &i.mu.at(bits).unwrap(),
                &i.a.at(bits).unwrap(),
                &i.b.at(bits).unwrap(),
            )
            .unwrap();
        assert_eq!(via.q_index, direct.q_index);
        assert_eq!(via.w_bound, direct.w_bound);
    }
}
