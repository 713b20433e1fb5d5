//! Certified continued-fraction expansion.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numerics::{ApproxReal, Dyadic, PrecisionContext};

type Eval = dyn Fn(u32) -> Result<ApproxReal> + Send + Sync;

/// A real number that can be re-evaluated at any binary precision.
#[derive(Clone)]
pub struct Refinable {
    label: String,
    eval: Arc<Eval>,
    exact: Option<(BigInt, BigInt)>,
}

impl Refinable {
    pub fn new(
        label: impl Into<String>,
        eval: impl Fn(u32) -> Result<ApproxReal> + Send + Sync + 'static,
    ) -> Self {
        Refinable {
            label: label.into(),
            eval: Arc::new(eval),
            exact: None,
        }
    }

    /// The rational `num / den`, expanded exactly by [`cf_expand`].
    pub fn rational(num: BigInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::domain("rational with zero denominator"));
        }
        let (num, den) = if den.is_negative() {
            (-num, -den)
        } else {
            (num, den)
        };
        let g = num.gcd(&den);
        let (num, den) = (&num / &g, &den / &g);
        let (n2, d2) = (num.clone(), den.clone());
        Ok(Refinable {
            label: format!("{num}/{den}"),
            eval: Arc::new(move |bits| Ok(ApproxReal::from_ratio(&n2, &d2, bits))),
            exact: Some((num, den)),
        })
    }

    pub fn decimal(s: &str) -> Result<Self> {
        let (num, den) = crate::numerics::parse_decimal(s)?;
        let mut r = Self::rational(num, den)?;
        r.label = s.to_string();
        Ok(r)
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.label = label.into();
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn exact(&self) -> Option<&(BigInt, BigInt)> {
        self.exact.as_ref()
    }

    pub fn at(&self, bits: u32) -> Result<ApproxReal> {
        (self.eval)(bits)
    }
}

impl fmt::Debug for Refinable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Refinable({})", self.label)
    }
}

#[derive(Clone, Debug)]
pub enum CfStop {
    /// Until the first `q_i` exceeding the bound, then `extra` more terms.
    MinDenominator {
        bound: BigInt,
        extra: usize,
    },
    Count(usize),
}

impl CfStop {
    pub fn min_denominator(bound: BigInt) -> Self {
        CfStop::MinDenominator { bound, extra: 0 }
    }

    fn satisfied(&self, cf: &ContinuedFraction) -> bool {
        match self {
            CfStop::Count(n) => cf.len() >= *n,
            CfStop::MinDenominator { bound, extra } => cf
                .first_q_above(bound)
                .is_some_and(|i| cf.len() > i + extra),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ContinuedFraction {
    pub partial_quotients: Vec<BigInt>,
    /// `(p_i, q_i)` for each partial quotient.
    pub convergents: Vec<(BigInt, BigInt)>,
    /// The expansion terminated: the source is this rational.
    pub terminated: bool,
}

impl ContinuedFraction {
    pub fn len(&self) -> usize {
        self.partial_quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partial_quotients.is_empty()
    }

    pub fn p(&self, i: usize) -> &BigInt {
        &self.convergents[i].0
    }

    pub fn q(&self, i: usize) -> &BigInt {
        &self.convergents[i].1
    }

    pub fn first_q_above(&self, bound: &BigInt) -> Option<usize> {
        self.convergents.iter().position(|(_, q)| q > bound)
    }

    /// Largest partial quotient among indices `0..=upto`.
    pub fn max_quotient(&self, upto: usize) -> Option<&BigInt> {
        self.partial_quotients[..=upto.min(self.len().saturating_sub(1))]
            .iter()
            .max()
    }

    fn push(&mut self, a: BigInt) {
        let n = self.convergents.len();
        let (p1, q1, p2, q2) = match n {
            0 => (BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one()),
            1 => (
                self.convergents[0].0.clone(),
                self.convergents[0].1.clone(),
                BigInt::one(),
                BigInt::zero(),
            ),
            _ => (
                self.convergents[n - 1].0.clone(),
                self.convergents[n - 1].1.clone(),
                self.convergents[n - 2].0.clone(),
                self.convergents[n - 2].1.clone(),
            ),
        };
        self.convergents.push((&a * p1 + p2, &a * q1 + q2));
        self.partial_quotients.push(a);
    }

    /// `p_i q_{i−1} − p_{i−1} q_i = (−1)^(i−1)` for every `i ≥ 1`.
    pub fn determinants_ok(&self) -> bool {
        (1..self.len()).all(|i| {
            let d = self.p(i) * self.q(i - 1) - self.p(i - 1) * self.q(i);
            d == if i % 2 == 1 {
                BigInt::one()
            } else {
                -BigInt::one()
            }
        })
    }

    pub fn quotients_to_strings(&self) -> Vec<String> {
        self.partial_quotients
            .iter()
            .map(|a| a.to_string())
            .collect()
    }
}

/// Rational endpoint `num / den` with `den > 0`.
#[derive(Clone, Debug)]
struct Frac {
    num: BigInt,
    den: BigInt,
}

impl Frac {
    fn from_dyadic(d: &Dyadic) -> Frac {
        if d.exp >= 0 {
            Frac {
                num: &d.mant << (d.exp as u64),
                den: BigInt::one(),
            }
        } else {
            Frac {
                num: d.mant.clone(),
                den: BigInt::one() << ((-d.exp) as u64),
            }
        }
    }
}

/// Expand every real in `[lo, hi]` simultaneously; stop at the first
/// partial quotient the two endpoints disagree on.
fn expand_common(lo: Frac, hi: Frac, stop: &CfStop) -> ContinuedFraction {
    let mut cf = ContinuedFraction::default();
    let (mut x, mut y) = (lo, hi);
    let exact = x.num.clone() * &y.den == y.num.clone() * &x.den;
    loop {
        if stop.satisfied(&cf) {
            return cf;
        }
        let (ax, rx) = x.num.div_mod_floor(&x.den);
        let (ay, ry) = y.num.div_mod_floor(&y.den);
        if ax != ay {
            return cf;
        }
        if exact {
            cf.push(ax);
            if rx.is_zero() {
                cf.terminated = true;
                return cf;
            }
        } else {
            if rx.is_zero() || ry.is_zero() {
                return cf;
            }
            cf.push(ax);
        }
        x = Frac {
            num: x.den,
            den: rx,
        };
        y = Frac {
            num: y.den,
            den: ry,
        };
    }
}

/// Certified expansion of `x`, escalating precision until `stop` is met.
pub fn cf_expand(
    x: &Refinable,
    stop: &CfStop,
    ctx: &PrecisionContext,
) -> Result<ContinuedFraction> {
    if let Some((num, den)) = x.exact() {
        let f = Frac {
            num: num.clone(),
            den: den.clone(),
        };
        return Ok(expand_common(f.clone(), f, stop));
    }
    ctx.escalate(|bits| {
        let v = x.at(bits)?;
        let cf = expand_common(Frac::from_dyadic(&v.lo()), Frac::from_dyadic(&v.hi()), stop);
        if cf.terminated || stop.satisfied(&cf) {
            Ok(cf)
        } else {
            Err(Error::Undecided { bits })
        }
    })
}

/// Expansion of an exact rational, to termination.
pub fn cf_rational(num: &BigInt, den: &BigInt) -> Result<ContinuedFraction> {
    let r = Refinable::rational(num.clone(), den.clone())?;
    cf_expand(&r, &CfStop::Count(usize::MAX), &PrecisionContext::default())
}

/// Bits needed for `τ` so that convergent denominators up to `2^q_bits`
/// and products `q τ` are resolved.
pub fn bits_for_denominator(q_bits: u64) -> u32 {
    (2 * q_bits + 96) as u32
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::AlgebraicConstants;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    pub(crate) fn log2_over_log_gamma() -> Refinable {
        Refinable::new("log 2 / log γ", |bits| {
            let c = AlgebraicConstants::new(bits)?;
            c.log2.div(&c.log_gamma)
        })
    }

    #[test]
    fn rational_expansion() {
        let cf = cf_rational(&BigInt::from(7), &BigInt::from(3)).unwrap();
        assert_eq!(cf.quotients_to_strings(), ["2", "3"]);
        assert!(cf.terminated);
        assert_eq!(
            cf.convergents.last().unwrap(),
            &(BigInt::from(7), BigInt::from(3))
        );
        let neg = cf_rational(&BigInt::from(-7), &BigInt::from(3)).unwrap();
        assert_eq!(neg.quotients_to_strings(), ["-3", "1", "2"]);
    }

    #[test]
    fn golden_ratio_is_all_ones() {
        let g = Refinable::new("golden", |bits| {
            let five = ApproxReal::from_int(5, bits).sqrt()?;
            Ok(&(&five + &ApproxReal::one(bits)) * &ApproxReal::from_decimal("0.5", bits)?)
        });
        let cf = cf_expand(&g, &CfStop::Count(120), &ctx()).unwrap();
        assert!(cf.partial_quotients.iter().all(|a| a.is_one()));
        assert!(cf.determinants_ok());
        // q_i are Fibonacci numbers
        assert_eq!(cf.q(10), &BigInt::from(89));
    }

    #[test]
    fn paper_prefix_of_log2_over_log_gamma() {
        let cf = cf_expand(&log2_over_log_gamma(), &CfStop::Count(30), &ctx()).unwrap();
        let expect = [
            0, 2, 1, 1, 5, 3, 2, 1, 22, 1, 5, 38, 1, 1, 1, 8, 1, 3, 7, 1, 5, 2, 5, 2, 2, 200, 1, 4,
            4, 6,
        ];
        let got: Vec<i64> = cf
            .partial_quotients
            .iter()
            .map(|a| a.try_into().unwrap())
            .collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn min_denominator_stop_and_escalation() {
        let bound = BigInt::from(10u32).pow(100);
        let stop = CfStop::MinDenominator {
            bound: bound.clone(),
            extra: 3,
        };
        let cf = cf_expand(&log2_over_log_gamma(), &stop, &ctx()).unwrap();
        let i = cf.first_q_above(&bound).unwrap();
        assert!(cf.q(i - 1) <= &bound);
        assert_eq!(cf.len(), i + 4);
        assert!(cf.determinants_ok());
    }

    #[test]
    fn convergents_are_best_approximations() {
        let tau = log2_over_log_gamma();
        let cf = cf_expand(&tau, &CfStop::Count(60), &ctx()).unwrap();
        let t = tau.at(1024).unwrap();
        for i in 1..cf.len() - 1 {
            let err =
                (&t.mul_int(cf.q(i).clone()) - &ApproxReal::from_int(cf.p(i).clone(), 1024)).abs();
            let bound = ApproxReal::from_ratio(&BigInt::one(), cf.q(i + 1), 1024);
            assert!(err.lt(&bound).unwrap(), "i={i}");
        }
    }

    #[test]
    fn source_without_enough_precision_exhausts() {
        // a rational disguised as an inexact source never separates
        let third = Refinable::new("1/3 as a ball", |bits| {
            Ok(ApproxReal::from_ratio(
                &BigInt::one(),
                &BigInt::from(3),
                bits,
            ))
        });
        let tight = PrecisionContext::new(64, 256, 2).unwrap();
        let r = cf_expand(&third, &CfStop::Count(5), &tight);
        assert!(matches!(r, Err(Error::PrecisionExhausted { .. })));
    }
}
