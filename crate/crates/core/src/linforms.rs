//! Matveev's lower bound as a calculator and the explicit bounds on `n`,
//! `l` and `k` that follow from it.

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{bracket_low, log, AlgebraicConstants, ApproxReal, PrecisionContext};
use crate::Equation;

fn dec(s: &str, prec: u32) -> ApproxReal {
    ApproxReal::from_decimal(s, prec).expect("well-formed constant")
}

fn int(n: u64, prec: u32) -> ApproxReal {
    ApproxReal::from_int(n, prec)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatveevInstance {
    pub s: u32,
    pub degree: u32,
    pub b_list: Vec<f64>,
    pub d_cap: f64,
}

/// Upper bound on `−log|Λ|`:
/// `1.4 · 30^(s+3) · s^4.5 · d²(1 + log d)(1 + log D) · B_1 ⋯ B_s`.
pub fn matveev_lower_bound(inst: &MatveevInstance) -> Result<f64> {
    if inst.s == 0 || inst.degree == 0 {
        return Err(Error::domain(
            "Matveev instance needs s >= 1 and degree >= 1",
        ));
    }
    if inst.b_list.len() != inst.s as usize {
        return Err(Error::Precondition(format!(
            "expected {} height bounds, got {}",
            inst.s,
            inst.b_list.len()
        )));
    }
    if !(inst.d_cap > 0.0) || inst.b_list.iter().any(|b| !(*b > 0.0)) {
        return Err(Error::domain("Matveev parameters must be positive"));
    }
    if let Some(b) = inst.b_list.iter().find(|b| **b < 0.16) {
        return Err(Error::Precondition(format!(
            "height bound {b} is below 0.16"
        )));
    }
    let s = f64::from(inst.s);
    let d = f64::from(inst.degree);
    let lead = 1.4 * 30f64.powi(inst.s as i32 + 3) * s.powf(4.5);
    let prod: f64 = inst.b_list.iter().product();
    Ok(lead * d * d * (1.0 + d.ln()) * (1.0 + inst.d_cap.ln()) * prod)
}

/// `1.4 · 30^(s+3) · s^4.5`, certified.
pub fn matveev_constant(s: u32, prec: u32) -> Result<ApproxReal> {
    if s == 0 {
        return Err(Error::domain("Matveev constant needs s >= 1"));
    }
    let s_real = int(u64::from(s), prec);
    let root = s_real.sqrt()?;
    Ok(&(&dec("1.4", prec) * &int(30, prec).powi(u64::from(s) + 3)) * &(&s_real.powi(4) * &root))
}

/// `C(s) · d² (1 + log d) · ∏ B_j`, i.e. Matveev's bound without the
/// `(1 + log D)` factor.
fn matveev_core(s: u32, degree: u64, b: &[ApproxReal], prec: u32) -> Result<ApproxReal> {
    let d = int(degree, prec);
    let mut acc = &matveev_constant(s, prec)? * &(&d * &d);
    acc = &acc * &(&ApproxReal::one(prec) + &log(&d)?);
    for bj in b {
        acc = &acc * bj;
    }
    Ok(acc)
}

/// Largest `l` allowed by `l < 0.8 n + 0.2` (balancing) or
/// `l < 0.8 n − 0.4` (Lucas).
pub fn l_upper_bound(eq: Equation, n: u64) -> u64 {
    match eq {
        Equation::Balancing => (4 * n + 1) / 5,
        Equation::Lucas => (4 * n).saturating_sub(2) / 5,
    }
}

/// `2^m S (log S)^m`: every `x` with `x / (log x)^m < S` lies below it.
pub fn sanchez_bound(m: u32, s: &ApproxReal) -> Result<ApproxReal> {
    if m == 0 {
        return Err(Error::Precondition("sanchez_bound needs m >= 1".into()));
    }
    let prec = s.precision();
    let threshold = int(4 * u64::from(m) * u64::from(m), prec).powi(u64::from(m));
    if threshold.hi() > s.lo() {
        return Err(Error::Precondition(format!(
            "S = {} is below (4m²)^m = {}",
            s.to_sci(6),
            threshold.to_sci(6)
        )));
    }
    let two_m = ApproxReal::from_dyadic(BigInt::one(), i64::from(m), prec);
    Ok(&(&two_m * s) * &log(s)?.powi(u64::from(m)))
}

/// Packaged constant `c` of `n < c k^8 log^5 k`.
pub fn n_bound_constant(eq: Equation, prec: u32) -> ApproxReal {
    match eq {
        Equation::Balancing => dec("5.1e31", prec),
        Equation::Lucas => dec("3.28e32", prec),
    }
}

/// `c · k^8 · log^5 k` for a real `k`.
pub fn n_bound_real(eq: Equation, k: &ApproxReal) -> Result<ApproxReal> {
    let prec = k.precision();
    Ok(&(&n_bound_constant(eq, prec) * &k.powi(8)) * &log(k)?.powi(5))
}

/// `M_k = ⌊c · k^8 · log^5 k⌋`, certified.
pub fn derive_n_bound(eq: Equation, k: u32, ctx: &PrecisionContext) -> Result<BigInt> {
    if k < eq.min_k() {
        return Err(Error::Precondition(format!(
            "the {eq} n-bound needs k >= {}, got {k}",
            eq.min_k()
        )));
    }
    ctx.escalate(|bits| {
        let v = n_bound_real(eq, &int(u64::from(k), bits))?;
        v.floor().ok_or(Error::Undecided { bits })
    })
}

/// `−log(1 − a)/a`, so that `|log(1 + x)| < c(a)|x|` for `|x| < a`.
pub fn log_smoothing_constant(a: &ApproxReal) -> Result<ApproxReal> {
    let prec = a.precision();
    let one = ApproxReal::one(prec);
    if !a.is_positive() || !a.lt(&one).unwrap_or(false) {
        return Err(Error::domain(format!("smoothing needs 0 < a < 1, got {a}")));
    }
    (-log(&(&one - a))?).div(a)
}

/// Height bound for `η₃` in the first application of Matveev's theorem.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HeightBudget {
    pub k: u32,
    /// `6.7 log k` or `8.2 log k`
    pub h_eta3_bound: f64,
    pub which_theorem: Equation,
    /// `2(log(k+1) + log 4) + h(4√2)` or `… + h(2)` before rounding up.
    pub raw_height: f64,
}

impl HeightBudget {
    pub fn coefficient(eq: Equation) -> &'static str {
        match eq {
            Equation::Balancing => "6.7",
            Equation::Lucas => "8.2",
        }
    }

    pub fn new(eq: Equation, k: u32, ctx: &PrecisionContext) -> Result<Self> {
        if k < eq.min_k() {
            return Err(Error::Precondition(format!(
                "height budget needs k >= {}",
                eq.min_k()
            )));
        }
        ctx.escalate(|prec| {
            let raw = raw_height_eta3(eq, k, prec)?;
            let budget = &dec(Self::coefficient(eq), prec) * &log(&int(u64::from(k), prec))?;
            if !raw.lt(&budget)? {
                return Err(Error::invariant(format!(
                    "h(η₃) = {} exceeds {} log k at k={k}",
                    raw.to_sci(6),
                    Self::coefficient(eq)
                )));
            }
            Ok(HeightBudget {
                k,
                h_eta3_bound: budget.hi().to_f64(),
                which_theorem: eq,
                raw_height: raw.hi().to_f64(),
            })
        })
    }
}

fn raw_height_eta3(eq: Equation, k: u32, prec: u32) -> Result<ApproxReal> {
    let two = int(2, prec);
    let hf = &log(&int(u64::from(k) + 1, prec))? + &log(&int(4, prec))?;
    let tail = match eq {
        Equation::Balancing => &log(&int(32, prec))? * &dec("0.5", prec),
        Equation::Lucas => log(&two)?,
    };
    Ok(&(&hf * &two) + &tail)
}

/// An elementary inequality in one integer variable that the bound chain
/// relies on.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SlackKind {
    /// `1 + log 2x < c log x`
    OnePlusLogTwoX,
    /// `1 + log x < c log x`
    OnePlusLogX,
    /// `log(a · x^8 · log^j x) < c log x`
    LogOfBound { a: &'static str, j: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SlackFact {
    pub name: &'static str,
    pub kind: SlackKind,
    pub coef: &'static str,
    pub from: u64,
}

impl SlackFact {
    pub fn all(eq: Equation) -> Vec<SlackFact> {
        use SlackKind::*;
        let f = |name, kind, coef, from| SlackFact {
            name,
            kind,
            coef,
            from,
        };
        match eq {
            Equation::Balancing => vec![
                f("1 + log 2k < 2.6 log k", OnePlusLogTwoX, "2.6", 3),
                f("1 + log 2n < 2.1 log n", OnePlusLogTwoX, "2.1", 5),
                f("1 + log n < 1.7 log n", OnePlusLogX, "1.7", 5),
                f(
                    "log(2.91e27 k^8 log^3 k) < 66 log k",
                    LogOfBound { a: "2.91e27", j: 3 },
                    "66",
                    3,
                ),
                f(
                    "log(5.1e31 k^8 log^5 k) < 75 log k",
                    LogOfBound { a: "5.1e31", j: 5 },
                    "75",
                    3,
                ),
            ],
            Equation::Lucas => vec![
                f("1 + log 2k < 3.5 log k", OnePlusLogTwoX, "3.5", 2),
                f("1 + log 2n < 2.3 log n", OnePlusLogTwoX, "2.3", 4),
                f("1 + log n < 1.8 log n", OnePlusLogX, "1.8", 4),
                f(
                    "log(8.18e27 k^8 log^3 k) < 100 log k",
                    LogOfBound { a: "8.18e27", j: 3 },
                    "100",
                    2,
                ),
                f(
                    "log(3.28e32 k^8 log^5 k) < 114 log k",
                    LogOfBound { a: "3.28e32", j: 5 },
                    "114",
                    2,
                ),
            ],
        }
    }

    /// Certified truth value at `x`.
    pub fn holds_at(&self, x: &ApproxReal) -> Result<bool> {
        let prec = x.precision();
        let one = ApproxReal::one(prec);
        let lx = log(x)?;
        let lhs = match self.kind {
            SlackKind::OnePlusLogTwoX => &one + &log(&x.mul_int(2))?,
            SlackKind::OnePlusLogX => &one + &lx,
            SlackKind::LogOfBound { a, j } => {
                &(&log(&dec(a, prec))? + &lx.mul_int(8)) + &log(&lx)?.mul_int(j)
            }
        };
        lhs.lt(&(&dec(self.coef, prec) * &lx))
    }

    /// First integer in `from..=upto` where the fact fails, if any.
    ///
    /// For every fact the gap `rhs − lhs` is increasing in `x`, so a pass at
    /// `from` already covers all larger `x`; the sweep is a cross-check.
    pub fn first_failure(&self, upto: u64, ctx: &PrecisionContext) -> Result<Option<u64>> {
        for x in self.from..=upto {
            let ok = ctx.escalate(|bits| self.holds_at(&int(x, bits)))?;
            if !ok {
                return Ok(Some(x));
            }
        }
        Ok(None)
    }
}

/// The bound on `n` re-derived from the raw inequality chain at a specific
/// `k`, without the rounded-up intermediate constants.
pub fn chain_n_bound(eq: Equation, k: u32, prec: u32) -> Result<ApproxReal> {
    if k < eq.min_k() {
        return Err(Error::Precondition(format!(
            "chain needs k >= {}",
            eq.min_k()
        )));
    }
    let c = AlgebraicConstants::new(prec)?;
    let one = ApproxReal::one(prec);
    let kk = int(u64::from(k), prec);
    let degree = 2 * u64::from(k);
    let two_k = int(degree, prec);
    let ln = |v: u64| log(&int(v, prec));
    // (log 6, n_min, 1+log 2n coefficient, 1+log n coefficient, second-form constant)
    let (lam1, n_min, c_2n, c_n, lam2) = match eq {
        Equation::Balancing => (6, 5, "2.1", "1.7", 3),
        Equation::Lucas => (5, 4, "2.3", "1.8", 2),
    };
    let log_n_min = ln(n_min)?;
    let b1 = &kk * &c.log_gamma;
    let b2 = c.log2.mul_int(2);
    let core_without_b3 = matveev_core(3, degree, &[b1, b2], prec)?;

    // first application: (m−1) log φ < T1 (1 + log 2n) + log λ1 ≤ a1 log n
    let t1 = &core_without_b3 * &(&two_k * &raw_height_eta3(eq, k, prec)?);
    let a1 = &(&t1 * &dec(c_2n, prec)) + &ln(lam1)?.div(&log_n_min)?;

    // h(η₃) of the second form ≤ c0 + (m−1) log φ ≤ a2 log n
    let hf = &ln(u64::from(k) + 1)? + &ln(4)?;
    let c0 = match eq {
        Equation::Balancing => &(&hf + &(&ln(32)? * &dec("0.5", prec))) + &c.log2,
        Equation::Lucas => &hf + &c.log2.mul_int(2),
    };
    let a2 = &c0.div(&log_n_min)? + &a1;

    // second application: (n−1) log φ < log λ2 + T2 log² n
    let t2 = &(&core_without_b3 * &(&two_k * &a2)) * &dec(c_n, prec);
    let log_phi_low = log(&ApproxReal::from_bounds(
        &bracket_low(k),
        &bracket_low(k),
        prec,
    ))?;
    let s =
        &(&one + &ln(lam2)?.div(&log_phi_low)?).div(&log_n_min.powi(2))? + t2.div(&log_phi_low)?;
    sanchez_bound(2, &s)
}

/// Coefficient `c` in `k < c log n` from the two- or three-term linear form
/// in `log γ`, `log 2` (and `log √2`) used for large `k`.
pub fn large_k_log_coefficient(eq: Equation, prec: u32) -> Result<ApproxReal> {
    let c = AlgebraicConstants::new(prec)?;
    let b = match eq {
        Equation::Balancing => vec![c.log_gamma.clone(), c.log2.mul_int(2), c.log2.clone()],
        Equation::Lucas => vec![c.log_gamma.clone(), c.log2.mul_int(2)],
    };
    let core = matveev_core(b.len() as u32, 2, &b, prec)?;
    let (slack, n_min) = match eq {
        Equation::Balancing => ("2.1", 5),
        Equation::Lucas => ("2.3", 4),
    };
    // (k/2) log 2 < log 4 + core (1 + log 2n)
    let per_log_n =
        &(&core * &dec(slack, prec)) + &log(&int(4, prec))?.div(&log(&int(n_min, prec))?)?;
    per_log_n.mul_int(2).div(&c.log2)
}

/// Packaged coefficient of `k < c log n` used for the large-`k` bounds.
pub fn packaged_log_coefficient(eq: Equation, prec: u32) -> ApproxReal {
    match eq {
        Equation::Balancing => dec("1.1e13", prec),
        Equation::Lucas => dec("8.52e10", prec),
    }
}

/// Initial `M` of the large-`k` reduction (twice the a-priori `n` bound).
pub fn large_k_initial_m(eq: Equation) -> BigInt {
    let (m, e) = match eq {
        Equation::Balancing => (972u32, 171u32),
        Equation::Lucas => (394, 156),
    };
    BigInt::from(m) * num_traits::pow(BigInt::from(10u32), e as usize)
}

#[derive(Clone, Debug)]
pub struct LargeKApriori {
    pub equation: Equation,
    pub log_coefficient: ApproxReal,
    pub packaged_coefficient: ApproxReal,
    pub k_bound: ApproxReal,
    pub n_bound: ApproxReal,
}

/// `k` and `n` bounds for large `k` before any reduction.
pub fn large_k_apriori(eq: Equation, prec: u32) -> Result<LargeKApriori> {
    let ours = large_k_log_coefficient(eq, prec)?;
    let packaged = packaged_log_coefficient(eq, prec);
    if !ours.lt(&packaged)? {
        return Err(Error::invariant(format!(
            "computed k/log n coefficient {} exceeds the packaged {}",
            ours.to_sci(6),
            packaged.to_sci(6)
        )));
    }
    let log_n_per_log_k = match eq {
        Equation::Balancing => "75",
        Equation::Lucas => "114",
    };
    // k < c log n < c · K log k
    let s = &packaged * &dec(log_n_per_log_k, prec);
    let k_bound = sanchez_bound(1, &s)?;
    let n_bound = n_bound_real(eq, &k_bound)?;
    Ok(LargeKApriori {
        equation: eq,
        log_coefficient: ours,
        packaged_coefficient: packaged,
        k_bound,
        n_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 160;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    #[test]
    fn matveev_examples() {
        let c = matveev_constant(3, P).unwrap();
        assert!(c.to_f64() > 1.431e11 && c.to_f64() < 1.433e11);
        assert_eq!(c.to_sci(4), "1.432e11");
        let inst = MatveevInstance {
            s: 1,
            degree: 1,
            b_list: vec![0.16],
            d_cap: 1.0,
        };
        assert!((matveev_lower_bound(&inst).unwrap() - 181_440.0).abs() < 1e-6);
    }

    #[test]
    fn matveev_is_monotone() {
        let base = MatveevInstance {
            s: 3,
            degree: 6,
            b_list: vec![1.0, 2.0, 3.0],
            d_cap: 100.0,
        };
        let v = matveev_lower_bound(&base).unwrap();
        for j in 0..3 {
            let mut up = base.clone();
            up.b_list[j] *= 1.01;
            assert!(matveev_lower_bound(&up).unwrap() > v);
        }
        let mut up = base.clone();
        up.d_cap = 101.0;
        assert!(matveev_lower_bound(&up).unwrap() > v);
        let mut up = base.clone();
        up.degree = 7;
        assert!(matveev_lower_bound(&up).unwrap() > v);
    }

    #[test]
    fn matveev_rejects_bad_input() {
        let bad = MatveevInstance {
            s: 2,
            degree: 2,
            b_list: vec![1.0, -1.0],
            d_cap: 10.0,
        };
        assert!(matches!(matveev_lower_bound(&bad), Err(Error::Domain(_))));
        let small = MatveevInstance {
            s: 1,
            degree: 2,
            b_list: vec![0.1],
            d_cap: 10.0,
        };
        assert!(matches!(
            matveev_lower_bound(&small),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn l_bounds() {
        assert_eq!(l_upper_bound(Equation::Balancing, 409), 327);
        assert_eq!(l_upper_bound(Equation::Lucas, 568), 454);
        assert_eq!(l_upper_bound(Equation::Balancing, 1), 1);
        assert_eq!(l_upper_bound(Equation::Lucas, 1), 0);
    }

    /// Largest `x` below `limit` with `x / log^m x < S`, by direct scan.
    fn scan_max_x(m: i32, s: f64, limit: u64) -> u64 {
        let mut last = 0;
        for x in 2..limit {
            let xf = x as f64;
            if xf / xf.ln().powi(m) < s {
                last = x;
            }
        }
        last
    }

    #[test]
    fn sanchez_examples_and_contract() {
        let b = sanchez_bound(1, &int(16, P)).unwrap();
        assert_eq!(b.to_decimal(2), "88.72");
        let b2 = sanchez_bound(2, &int(256, P)).unwrap();
        assert_eq!(b2.to_decimal(1), "31487.0");
        for (m, s) in [
            (1, 16u64),
            (1, 100),
            (1, 5000),
            (2, 256),
            (2, 300),
            (3, 46_656),
        ] {
            let bound = sanchez_bound(m, &int(s, P)).unwrap().to_f64();
            if bound <= 1e7 {
                let limit = (bound as u64 + 1) * 2;
                let worst = scan_max_x(m as i32, s as f64, limit.min(10_000_000));
                assert!((worst as f64) < bound, "m={m} S={s}");
            }
        }
        assert!(matches!(
            sanchez_bound(2, &int(255, P)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn sanchez_reproduces_packaged_constant() {
        // S = 2.91e27 k^8 log^3 k at k = 3
        let k = int(3, P);
        let lk = log(&k).unwrap();
        let s = &(&dec("2.91e27", P) * &k.powi(8)) * &lk.powi(3);
        let b = sanchez_bound(2, &s).unwrap();
        let packaged = n_bound_real(Equation::Balancing, &k).unwrap();
        assert!(b.lt(&packaged).unwrap());
    }

    #[test]
    fn n_bounds() {
        let b3 = derive_n_bound(Equation::Balancing, 3, &ctx()).unwrap();
        let v = b3.to_string();
        assert_eq!(v.len(), 36);
        assert!(v.starts_with("535"));
        let l2 = derive_n_bound(Equation::Lucas, 2, &ctx()).unwrap();
        assert!(l2.to_string().starts_with("134") && l2.to_string().len() == 35);
        assert!(derive_n_bound(Equation::Balancing, 2, &ctx()).is_err());
        let mut prev = BigInt::from(0);
        for k in 3..=600 {
            let b = derive_n_bound(Equation::Balancing, k, &ctx()).unwrap();
            assert!(b > prev);
            prev = b;
        }
    }

    #[test]
    fn smoothing_constants() {
        let c = log_smoothing_constant(&dec("0.64", P)).unwrap();
        assert_eq!(c.to_decimal(4), "1.5963");
        assert!(c.mul_int(6).lt(&dec("9.6", P)).unwrap());
        let c = log_smoothing_constant(&dec("0.01", P)).unwrap();
        assert_eq!(c.to_decimal(5), "1.00503");
        assert!(c.mul_int(4).lt(&dec("4.1", P)).unwrap());
        let tiny = log_smoothing_constant(&dec("1e-9", P)).unwrap();
        assert!((tiny.to_f64() - 1.0).abs() < 1e-8);
        assert!(log_smoothing_constant(&dec("1.5", P)).is_err());
        assert!(log_smoothing_constant(&ApproxReal::zero(P)).is_err());
    }

    #[test]
    fn smoothing_constants_behind_reduction_inputs() {
        // 9.6/log φ < 17.2 and the other A values, with the worst φ = 2(1 − 2^−k)
        let cases = [
            ("0.64", 6u64, 3u32, "17.2"),
            ("0.98", 3, 3, "21.45"),
            ("0.98", 5, 2, "49.23"),
            ("0.89", 2, 2, "12.26"),
        ];
        for (a, num, k, a_red) in cases {
            let c = log_smoothing_constant(&dec(a, P)).unwrap().mul_int(num);
            let phi_low = ApproxReal::from_bounds(&bracket_low(k), &bracket_low(k), P);
            let a_needed = c.div(&log(&phi_low).unwrap()).unwrap();
            assert!(a_needed.lt(&dec(a_red, P)).unwrap(), "a={a}: {a_needed}");
        }
        let l2 = crate::numerics::ln2(P);
        let c = log_smoothing_constant(&dec("0.01", P)).unwrap().mul_int(4);
        assert!(c.div(&l2).unwrap().lt(&dec("5.92", P)).unwrap());
        let g = AlgebraicConstants::new(P).unwrap();
        assert!(dec("4.1", P)
            .div(&g.log_gamma)
            .unwrap()
            .lt(&dec("2.33", P))
            .unwrap());
    }

    #[test]
    fn height_budgets() {
        for k in [3, 4, 10, 450, 100_000] {
            HeightBudget::new(Equation::Balancing, k, &ctx()).unwrap();
        }
        for k in [2, 3, 500, 100_000] {
            HeightBudget::new(Equation::Lucas, k, &ctx()).unwrap();
        }
        assert!(HeightBudget::new(Equation::Balancing, 2, &ctx()).is_err());
    }

    #[test]
    fn slack_facts_hold() {
        for eq in Equation::ALL {
            for fact in SlackFact::all(eq) {
                assert_eq!(
                    fact.first_failure(3000, &ctx()).unwrap(),
                    None,
                    "{}",
                    fact.name
                );
                let big = ApproxReal::from_decimal("1e200", 1024).unwrap();
                assert!(fact.holds_at(&big).unwrap(), "{}", fact.name);
            }
        }
        // the n-facts fail just below their stated range
        let f = SlackFact::all(Equation::Balancing)[1];
        assert!(!f.holds_at(&int(4, P)).unwrap());
    }

    #[test]
    fn raw_chain_is_dominated_by_packaged_bound() {
        for eq in Equation::ALL {
            for k in [eq.min_k(), 3, 10, 100, 450] {
                let chain = chain_n_bound(eq, k, P).unwrap();
                let packaged = n_bound_real(eq, &int(u64::from(k), P)).unwrap();
                let slack = &packaged * &dec("1.01", P);
                assert!(
                    chain.lt(&slack).unwrap(),
                    "{eq} k={k}: {} vs {}",
                    chain.to_sci(4),
                    packaged.to_sci(4)
                );
            }
        }
    }

    #[test]
    fn large_k_coefficients() {
        let b = large_k_log_coefficient(Equation::Balancing, P).unwrap();
        assert!(b.to_f64() < 1.1e13 * 1.05 && b.to_f64() > 9e12, "{b}");
        let l = large_k_log_coefficient(Equation::Lucas, P).unwrap();
        assert!((l.to_f64() / 8.52e10 - 1.0).abs() < 0.02, "{l}");
        let inst = MatveevInstance {
            s: 2,
            degree: 2,
            b_list: vec![1.762747174039086, 2.0 * std::f64::consts::LN_2],
            d_cap: 1.0,
        };
        let f = matveev_lower_bound(&inst).unwrap() * 2.3 * 2.0 / std::f64::consts::LN_2;
        assert!((f / l.to_f64() - 1.0).abs() < 0.01);
    }

    #[test]
    fn large_k_apriori_bounds() {
        let b = large_k_apriori(Equation::Balancing, 256).unwrap();
        assert!(b.k_bound.to_f64() < 5.7e16 && b.k_bound.to_f64() > 5.6e16);
        assert!(b.n_bound.to_f64() < 4.86e173 && b.n_bound.to_f64() > 4.5e173);
        let twice = ApproxReal::from_int(large_k_initial_m(Equation::Balancing), 256);
        assert!(b.n_bound.mul_int(2).lt(&twice).unwrap());

        let l = large_k_apriori(Equation::Lucas, 256).unwrap();
        assert!(l.k_bound.to_f64() < 5.82e14 && l.k_bound.to_f64() > 5.7e14);
        assert!(l.n_bound.to_f64() < 1.97e158 && l.n_bound.to_f64() > 1.8e158);
        let twice = ApproxReal::from_int(large_k_initial_m(Equation::Lucas), 256);
        assert!(l.n_bound.mul_int(2).lt(&twice).unwrap());
    }
}
