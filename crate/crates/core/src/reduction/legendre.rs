//! Lower bound `|xτ − y| > 1/((a(M) + 2)x)` for `0 < x < M`.

use num_bigint::BigInt;

use super::cf::{cf_expand, CfStop, Refinable};
use crate::error::{Error, Result};
use crate::numerics::PrecisionContext;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LegendreBound {
    /// Largest partial quotient `a_i` for `i ≤ N`.
    pub a_max: BigInt,
    /// Minimal `N` with `q_N > M`, counting `q_0 = 1` as index 0.
    pub n_index: usize,
    pub q_n: BigInt,
    pub q_prev: BigInt,
}

impl LegendreBound {
    /// Position of `q_N` when convergents are counted from one.
    pub fn ordinal(&self) -> usize {
        self.n_index + 1
    }
}

pub fn legendre_bound(
    tau: &Refinable,
    m: &BigInt,
    ctx: &PrecisionContext,
) -> Result<LegendreBound> {
    if m.sign() != num_bigint::Sign::Plus {
        return Err(Error::Precondition(format!("M must be positive, got {m}")));
    }
    let cf = cf_expand(tau, &CfStop::min_denominator(m.clone()), ctx)?;
    let n = match cf.first_q_above(m) {
        Some(n) => n,
        None if cf.terminated => {
            return Err(Error::Precondition(format!(
                "τ = {} is rational",
                tau.label()
            )))
        }
        None => return Err(Error::invariant("expansion stopped before q > M")),
    };
    let a_max = cf
        .max_quotient(n)
        .cloned()
        .ok_or_else(|| Error::invariant("empty expansion"))?;
    let q_prev = if n == 0 {
        BigInt::from(0)
    } else {
        cf.q(n - 1).clone()
    };
    Ok(LegendreBound {
        a_max,
        n_index: n,
        q_n: cf.q(n).clone(),
        q_prev,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{AlgebraicConstants, ApproxReal};

    #[test]
    fn golden_ratio_has_a_max_one() {
        let g = Refinable::new("golden", |bits| {
            let five = ApproxReal::from_int(5, bits).sqrt()?;
            Ok(&(&five + &ApproxReal::one(bits)) * &ApproxReal::from_decimal("0.5", bits)?)
        });
        let lb = legendre_bound(
            &g,
            &BigInt::from(10u64.pow(12)),
            &PrecisionContext::default(),
        )
        .unwrap();
        assert_eq!(lb.a_max, BigInt::from(1));
        assert!(lb.q_prev <= BigInt::from(10u64.pow(12)));
    }

    #[test]
    fn log_ratio_reaches_4008() {
        let tau = Refinable::new("log 2 / log γ", |bits| {
            let c = AlgebraicConstants::new(bits)?;
            c.log2.div(&c.log_gamma)
        });
        let m = BigInt::from(394u32) * BigInt::from(10u32).pow(156);
        let lb = legendre_bound(&tau, &m, &PrecisionContext::default()).unwrap();
        assert_eq!(lb.n_index, 301);
        assert_eq!(lb.ordinal(), 302);
        assert_eq!(lb.a_max, BigInt::from(4008));
        assert!(lb.q_prev < m && m < lb.q_n);
    }

    #[test]
    fn rational_tau_is_rejected() {
        let r = Refinable::rational(BigInt::from(3), BigInt::from(7)).unwrap();
        let e = legendre_bound(&r, &BigInt::from(1000), &PrecisionContext::default());
        assert!(matches!(e, Err(Error::Precondition(_))));
    }
}
