//! Exhaustive search for `B_l = F_n F_m` and `C_l = F_n F_m` inside a box.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::sequences::{six_table, KFibTable, SequenceKind};
use crate::Equation;

/// `2^61 − 1`, the modulus of the residue prefilter.
const P61: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(P61)) as u64
}

fn residue(x: &BigInt) -> u64 {
    (x % BigInt::from(P61))
        .to_u64()
        .expect("non-negative residue")
}

fn kind(eq: Equation) -> SequenceKind {
    match eq {
        Equation::Balancing => SequenceKind::Balancing,
        Equation::Lucas => SequenceKind::LucasBalancing,
    }
}

/// Sorted targets `x_1 < x_2 < ⋯ < x_{l_max}` with exact lookup.
#[derive(Clone, Debug)]
pub struct TargetIndex {
    equation: Equation,
    values: Vec<BigInt>,
    residues: HashSet<u64>,
}

impl TargetIndex {
    pub fn new(equation: Equation, l_max: u64) -> Self {
        let values: Vec<BigInt> = six_table(kind(equation), l_max)
            .into_iter()
            .skip(1)
            .collect();
        let residues = values.iter().map(residue).collect();
        TargetIndex {
            equation,
            values,
            residues,
        }
    }

    pub fn equation(&self) -> Equation {
        self.equation
    }

    pub fn l_max(&self) -> u64 {
        self.values.len() as u64
    }

    pub fn max_value(&self) -> Option<&BigInt> {
        self.values.last()
    }

    /// The `l` with `x_l = v`, if any.
    pub fn lookup(&self, v: &BigInt) -> Option<u64> {
        self.values.binary_search(v).ok().map(|i| i as u64 + 1)
    }

    /// `false` only if no target can equal a number with this residue.
    fn may_contain(&self, r: u64) -> bool {
        self.residues.contains(&r)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SolutionRecord {
    pub equation: Equation,
    pub l: u64,
    pub k: u32,
    pub n: u32,
    pub m: u32,
    pub value: BigInt,
}

#[derive(Serialize, Deserialize)]
struct SolutionJson {
    equation: Equation,
    l: u64,
    k: u32,
    n: u32,
    m: u32,
    value: String,
}

impl Serialize for SolutionRecord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SolutionJson {
            equation: self.equation,
            l: self.l,
            k: self.k,
            n: self.n,
            m: self.m,
            value: self.value.to_string(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SolutionRecord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = SolutionJson::deserialize(d)?;
        let value = j.value.parse().map_err(serde::de::Error::custom)?;
        Ok(SolutionRecord {
            equation: j.equation,
            l: j.l,
            k: j.k,
            n: j.n,
            m: j.m,
            value,
        })
    }
}

impl SolutionRecord {
    /// `B_6 = F_1^(5) F_15^(5)`.
    pub fn display(&self) -> String {
        format!(
            "{}_{} = F_{}^({}) F_{}^({})",
            self.equation.letter(),
            self.l,
            self.m,
            self.k,
            self.n,
            self.k
        )
    }
}

fn search_k(targets: &TargetIndex, k: u32, n_max: u32) -> Vec<SolutionRecord> {
    let table = KFibTable::with_len(k, n_max as usize).expect("k >= 2");
    let f = table.terms();
    let res: Vec<u64> = f.iter().map(residue).collect();
    let Some(top) = targets.max_value() else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for n in 1..=n_max as usize {
        if &f[n] > top {
            break;
        }
        for m in 1..=n {
            if !targets.may_contain(mulmod(res[n], res[m])) {
                continue;
            }
            let prod = &f[n] * &f[m];
            if &prod > top {
                break;
            }
            if let Some(l) = targets.lookup(&prod) {
                out.push(SolutionRecord {
                    equation: targets.equation,
                    l,
                    k,
                    n: n as u32,
                    m: m as u32,
                    value: prod,
                });
            }
        }
    }
    out
}

/// All `(l, k, n, m)` with `1 ≤ m ≤ n ≤ n_max`, `1 ≤ l ≤ l_max`,
/// `k_lo ≤ k ≤ k_hi` solving the equation, sorted by `(k, n, m, l)`.
///
/// `k` below 2 is skipped. An empty or reversed range gives no results.
pub fn brute_force_box(
    eq: Equation,
    k_lo: u32,
    k_hi: u32,
    n_max: u32,
    l_max: u64,
) -> Vec<SolutionRecord> {
    let targets = TargetIndex::new(eq, l_max);
    let mut out: Vec<SolutionRecord> = (k_lo.max(2)..=k_hi)
        .into_par_iter()
        .flat_map_iter(|k| search_k(&targets, k, n_max))
        .collect();
    out.sort_by_key(|r| (r.k, r.n, r.m, r.l));
    out
}

/// The known solutions for `k` in `[k_lo, k_hi]`.
pub fn expected_solutions(eq: Equation, k_lo: u32, k_hi: u32) -> Vec<SolutionRecord> {
    let mut out = Vec::new();
    let rec = |l: u64, k: u32, n: u32, m: u32, v: u32| SolutionRecord {
        equation: eq,
        l,
        k,
        n,
        m,
        value: BigInt::from(v),
    };
    for k in k_lo.max(eq.min_k())..=k_hi {
        match eq {
            Equation::Balancing => {
                out.extend([rec(1, k, 1, 1, 1), rec(1, k, 2, 1, 1), rec(1, k, 2, 2, 1)]);
                if k == 5 {
                    out.extend([rec(6, 5, 15, 1, 6930), rec(6, 5, 15, 2, 6930)]);
                }
            }
            Equation::Lucas => {
                if k == 2 {
                    out.extend([rec(1, 2, 4, 1, 3), rec(1, 2, 4, 2, 3)]);
                }
            }
        }
    }
    out.sort_by_key(|r| (r.k, r.n, r.m, r.l));
    out
}

/// One way of writing a target as `F_n F_m = 2^e` with `n ≤ k + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrefixHit {
    pub k: u32,
    pub l: u64,
    pub n: u32,
    pub m: u32,
    pub exponent: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrefixReport {
    pub equation: Equation,
    pub k_lo: u32,
    pub k_hi: u32,
    /// `(l, e)` with `x_l = 2^e ≤ 2^(2k_hi − 2)`.
    pub powers_of_two: Vec<(u64, u32)>,
    pub hits: Vec<PrefixHit>,
}

impl PrefixReport {
    /// Only `B_1 = 1` for the balancing equation, nothing for Lucas.
    pub fn matches_expected(&self) -> bool {
        match self.equation {
            Equation::Balancing => self.powers_of_two.iter().all(|&(l, e)| l == 1 && e == 0),
            Equation::Lucas => self.powers_of_two.is_empty(),
        }
    }
}

fn power_of_two_exponent(x: &BigInt) -> Option<u32> {
    if x.is_zero() || x.sign() == num_bigint::Sign::Minus {
        return None;
    }
    let tz = x.trailing_zeros()?;
    (x >> tz).is_one().then_some(tz as u32)
}

/// Targets that are powers of two, for `n ≤ k + 1` where
/// `F_n^(k) = 2^(n−2)` (and `F_1 = 1`).
pub fn prefix_case_check(eq: Equation, k_lo: u32, k_hi: u32) -> PrefixReport {
    let k_lo = k_lo.max(2);
    let mut powers = Vec::new();
    let mut hits = Vec::new();
    if k_lo <= k_hi {
        let limit = BigInt::one() << (2 * k_hi as usize - 2);
        // x_l > 5^l, so l ≤ (2k − 2)/2.3 covers every x_l ≤ limit
        let l_cap = u64::from(k_hi) + 2;
        for (l, x) in six_table(kind(eq), l_cap).iter().enumerate().skip(1) {
            if x > &limit {
                break;
            }
            if let Some(e) = power_of_two_exponent(x) {
                powers.push((l as u64, e));
            }
        }
        let exp_of = |i: u32| if i == 1 { 0 } else { i - 2 };
        for k in k_lo..=k_hi {
            for n in 1..=k + 1 {
                for m in 1..=n {
                    let e = exp_of(n) + exp_of(m);
                    for &(l, pe) in &powers {
                        if pe == e && e <= 2 * k - 2 {
                            hits.push(PrefixHit {
                                k,
                                l,
                                n,
                                m,
                                exponent: e,
                            });
                        }
                    }
                }
            }
        }
    }
    PrefixReport {
        equation: eq,
        k_lo,
        k_hi,
        powers_of_two: powers,
        hits,
    }
}

/// `F_n^(k)` from the definition: each term sums the previous `k`.
fn naive_kfib(k: u32, n: u32) -> BigInt {
    let mut v: Vec<BigInt> = vec![BigInt::zero(); k as usize - 1];
    v.push(BigInt::one());
    for _ in 1..n {
        let s: BigInt = v[v.len() - k as usize..].iter().sum();
        v.push(s);
    }
    v.pop().expect("nonempty")
}

/// Recompute both sides independently of the search tables.
///
/// `B_l` comes from `x_{i+1} = 6x_i − x_{i−1}`; `C_l` from the integer
/// square root of `8B_l² + 1`.
pub fn certify_solution(rec: &SolutionRecord) -> bool {
    if rec.k < 2 || rec.m < 1 || rec.m > rec.n || rec.l < 1 {
        return false;
    }
    let lhs = naive_kfib(rec.k, rec.n) * naive_kfib(rec.k, rec.m);
    let (mut a, mut b) = (BigInt::zero(), BigInt::one());
    for _ in 1..rec.l {
        let c = &b * 6u32 - &a;
        a = b;
        b = c;
    }
    let rhs = match rec.equation {
        Equation::Balancing => b,
        Equation::Lucas => {
            let sq = &b * &b * 8u32 + 1u32;
            let c = sq.sqrt();
            if &c * &c != sq {
                return false;
            }
            c
        }
    };
    lhs == rhs && lhs == rec.value
}
