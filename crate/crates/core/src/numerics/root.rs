//! Dominant root `φ(k)` of `Ψ_k(x) = x^k − x^(k−1) − ⋯ − x − 1` and the
//! Binet coefficient `f_k(φ) = (φ − 1) / (2 + (k + 1)(φ − 2))`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::One;

use super::ball::{ApproxReal, Dyadic};
use super::precision::PrecisionContext;
use crate::error::{Error, Result};

/// `(x − 1) Ψ_k(x) = x^k (x − 2) + 1`, evaluated in ball arithmetic.
///
/// The factored form keeps cancellation small near `x = 2`.
fn telescoped(k: u32, x: &ApproxReal) -> ApproxReal {
    let two = ApproxReal::from_int(2, x.precision());
    &(&x.powi(u64::from(k)) * &(x - &two)) + &ApproxReal::one(x.precision())
}

fn telescoped_derivative(k: u32, x: &ApproxReal) -> ApproxReal {
    // d/dx [x^(k+1) − 2x^k + 1] = x^(k−1) ((k+1) x − 2k)
    let lin = &x.mul_int(k + 1) - &ApproxReal::from_int(2 * u64::from(k), x.precision());
    &x.powi(u64::from(k) - 1) * &lin
}

/// `Ψ_k(x)` by Horner's rule: an evaluation route independent of
/// [`telescoped`].
pub fn psi(k: u32, x: &ApproxReal) -> ApproxReal {
    let one = ApproxReal::one(x.precision());
    let mut acc = one.clone();
    for _ in 0..k {
        acc = &(&acc * x) - &one;
    }
    acc
}

/// Lower end of the bracket `2(1 − 2^−k)`.
pub fn bracket_low(k: u32) -> Dyadic {
    // 2 − 2^(1−k) = (2^k − 1) / 2^(k−1)
    Dyadic::new((BigInt::one() << k) - 1, -(i64::from(k) - 1))
}

/// Certified dominant root of `Ψ_k`, for `k >= 2`.
///
/// The returned ball is tight enough that `|Ψ_k|` over the whole ball is
/// below `2^(10 − working_bits)`; its precision is therefore about
/// `working_bits + k` bits.
pub fn dominant_root(k: u32, ctx: &PrecisionContext) -> Result<ApproxReal> {
    if k < 2 {
        return Err(Error::Precondition(format!(
            "dominant_root needs k >= 2, got {k}"
        )));
    }
    ctx.escalate(|bits| dominant_root_at(k, bits))
}

fn dominant_root_at(k: u32, bits: u32) -> Result<ApproxReal> {
    let p = bits + k + 64;
    let target = i64::from(p) - 8;
    // Newton from the right on a convex increasing function: monotone.
    let mut x = ApproxReal::from_dyadic((BigInt::one() << (k + 1)) - 1, -i64::from(k), p);
    let mut converged = false;
    for _ in 0..(4 * 64 + 4 * k as usize) {
        let g = telescoped(k, &x);
        let dg = telescoped_derivative(k, &x);
        let step = g.div(&dg)?;
        x = (&x - &step).mid_only();
        if super::elementary::is_below_pow2(&step, target) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Undecided { bits });
    }
    // Certify by a sign change of the telescoped polynomial.
    let delta = ApproxReal::from_dyadic(BigInt::one(), -(i64::from(p) - 16), p);
    let lo = (&x - &delta).mid_only();
    let hi = (&x + &delta).mid_only();
    let wide = p + 32;
    let g_lo = telescoped(k, &lo.with_precision(wide));
    let g_hi = telescoped(k, &hi.with_precision(wide));
    if g_lo.sign() != Some(Ordering::Less) || g_hi.sign() != Some(Ordering::Greater) {
        return Err(Error::Undecided { bits });
    }
    if lo.lo() <= bracket_low(k) || hi.hi() >= Dyadic::integer(BigInt::from(2)) {
        return Err(Error::invariant(format!(
            "root for k={k} escaped the bracket (2(1-2^-k), 2)"
        )));
    }
    let root = ApproxReal::from_bounds(&lo.lo(), &hi.hi(), p);
    let residual = psi(k, &root);
    if !residual.contains_zero() {
        return Err(Error::invariant(format!(
            "Ψ_{k} does not vanish on its root ball"
        )));
    }
    if !super::elementary::is_below_pow2(&residual, i64::from(bits) - 10) {
        return Err(Error::Undecided { bits });
    }
    Ok(root)
}

/// `f_k(φ) = (φ − 1) / (2 + (k + 1)(φ − 2))`, certified inside `(1/2, 3/4)`.
pub fn f_k_at_root(k: u32, phi: &ApproxReal) -> Result<ApproxReal> {
    let prec = phi.precision();
    let one = ApproxReal::one(prec);
    let two = ApproxReal::from_int(2, prec);
    let num = phi - &one;
    let den = &two + &(phi - &two).mul_int(k + 1);
    let f = num.div(&den)?;
    let half = Dyadic::new(BigInt::one(), -1);
    let three_quarters = Dyadic::new(BigInt::from(3), -2);
    if f.lo() > half && f.hi() < three_quarters {
        Ok(f)
    } else if f.hi() <= half || f.lo() >= three_quarters {
        Err(Error::invariant(format!(
            "f_{k}(φ) = {f} lies outside (1/2, 3/4)"
        )))
    } else {
        Err(Error::Undecided { bits: prec })
    }
}
