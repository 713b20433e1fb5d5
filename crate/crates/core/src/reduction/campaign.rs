//! Reduction campaigns bounding `m`, `n` and `k` for both equations.

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cf::{ContinuedFraction, Refinable};
use super::dujella::{dujella_petho_reduce, ReductionInstance, ReductionOutcome, ReductionPlan};
use super::legendre::legendre_bound;
use crate::error::{Error, Result};
use crate::linforms::{derive_n_bound, large_k_initial_m};
use crate::numerics::{
    dominant_root, f_k_at_root, ln2, log, AlgebraicConstants, ApproxReal, PrecisionContext,
};
use crate::sequences::KFibTable;
use crate::Equation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Small,
    Large,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Le,
    Lt,
    Eq,
}

impl Relation {
    pub fn holds(self, value: i64, target: i64) -> bool {
        match self {
            Relation::Le => value <= target,
            Relation::Lt => value < target,
            Relation::Eq => value == target,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Lt => "<",
            Relation::Eq => "==",
        }
    }
}

/// One reduced instance, as written to the audit file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CampaignRecord {
    pub k: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub m: Option<u32>,
    pub q_index: usize,
    pub q_digits10: usize,
    pub epsilon: String,
    pub bound: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub k: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub m: Option<u32>,
    pub reason: String,
}

/// Result of one stage or pass, compared against its target.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageSummary {
    pub name: String,
    pub instances: usize,
    /// Largest `log(Aq/ε)/log B`, three decimals.
    pub max_bound: String,
    pub argmax_k: Option<u32>,
    pub argmax_m: Option<u32>,
    /// The integer bound the stage proves.
    pub int_bound: i64,
    pub relation: Relation,
    pub target: i64,
    pub failures: Vec<Failure>,
    pub passed: bool,
}

/// Large-k pass detail.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PassRecord {
    pub pass: u32,
    /// `M` in scientific notation.
    pub m: String,
    pub method: String,
    pub q_index: usize,
    pub q_digits10: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub epsilon: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub a_max: Option<String>,
    pub bound: String,
    pub k_max: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub equation: Equation,
    pub stage: Stage,
    pub summaries: Vec<StageSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub records: Vec<CampaignRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub passes: Vec<PassRecord>,
    pub passed: bool,
}

impl CampaignReport {
    pub fn summary(&self, name: &str) -> Option<&StageSummary> {
        self.summaries.iter().find(|s| s.name == name)
    }

    /// Audit lines, one JSON object per reduced instance.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("record serializes"));
            out.push('\n');
        }
        for p in &self.passes {
            out.push_str(&serde_json::to_string(p).expect("record serializes"));
            out.push('\n');
        }
        out
    }
}

/// Constants of the small-k reductions.
#[derive(Clone, Copy, Debug)]
pub struct SmallKParams {
    pub a1: &'static str,
    pub a2: &'static str,
    /// Targets for the `m` and `n` bounds.
    pub m_target: i64,
    pub n_target: i64,
    pub k_hi: u32,
}

pub fn small_k_params(eq: Equation) -> SmallKParams {
    match eq {
        Equation::Balancing => SmallKParams {
            a1: "17.2",
            a2: "21.45",
            m_target: 443,
            n_target: 409,
            k_hi: 450,
        },
        Equation::Lucas => SmallKParams {
            a1: "49.23",
            a2: "12.26",
            m_target: 554,
            n_target: 568,
            k_hi: 500,
        },
    }
}

/// `log(4√2)` or `log 2`.
fn log_shift(eq: Equation, prec: u32) -> ApproxReal {
    let l2 = ln2(prec);
    match eq {
        Equation::Balancing => {
            &l2.mul_int(5) * &ApproxReal::from_decimal("0.5", prec).expect("literal")
        }
        Equation::Lucas => l2,
    }
}

/// Per-`k` data shared by every instance with that `k`.
struct KData {
    eq: Equation,
    k: u32,
    tau: Refinable,
    m_bound: BigInt,
    cf: ContinuedFraction,
    plan: ReductionPlan,
    phi: ApproxReal,
    log_phi: ApproxReal,
    log_f: ApproxReal,
    shift: ApproxReal,
    ctx: PrecisionContext,
}

fn tau_for(k: u32, ctx: PrecisionContext) -> Refinable {
    Refinable::new(format!("log γ / log φ({k})"), move |bits| {
        let c = AlgebraicConstants::new(bits)?;
        let phi = dominant_root(k, &ctx.at_least(bits))?.with_precision(bits);
        c.log_gamma.div(&log(&phi)?)
    })
}

impl KData {
    fn new(eq: Equation, k: u32, ctx: &PrecisionContext) -> Result<Self> {
        let tau = tau_for(k, *ctx);
        let m_bound = derive_n_bound(eq, k, ctx)?;
        let cf = ReductionPlan::expand(&tau, &m_bound, ctx)?;
        let bits = ReductionPlan::natural_bits(&cf, &m_bound) + 32;
        Self::at_bits(eq, k, tau, m_bound, cf, bits, ctx)
    }

    fn at_bits(
        eq: Equation,
        k: u32,
        tau: Refinable,
        m_bound: BigInt,
        cf: ContinuedFraction,
        bits: u32,
        ctx: &PrecisionContext,
    ) -> Result<Self> {
        if bits > ctx.max_bits {
            return Err(Error::PrecisionExhausted {
                max_bits: ctx.max_bits,
            });
        }
        let plan = ReductionPlan::new(cf.clone(), &tau, &m_bound, bits)?;
        let phi = dominant_root(k, &ctx.at_least(bits + 32))?.with_precision(bits + 32);
        let log_phi = log(&phi)?;
        let log_f = log(&f_k_at_root(k, &phi)?)?;
        Ok(KData {
            eq,
            k,
            tau,
            m_bound,
            cf,
            plan,
            phi,
            log_phi,
            log_f,
            shift: log_shift(eq, bits + 32),
            ctx: *ctx,
        })
    }

    fn refined(&self) -> Result<Self> {
        let bits = self.plan.bits().saturating_mul(self.ctx.escalation_factor);
        Self::at_bits(
            self.eq,
            self.k,
            self.tau.clone(),
            self.m_bound.clone(),
            self.cf.clone(),
            bits,
            &self.ctx,
        )
    }

    fn prec(&self) -> u32 {
        self.phi.precision()
    }

    /// `2 + (−2 log f − log c)/log φ`.
    fn mu1(&self) -> Result<ApproxReal> {
        let p = self.prec();
        let num = -&(&self.log_f.mul_int(2) + &self.shift);
        Ok(&ApproxReal::from_int(2, p) + &num.div(&self.log_phi)?)
    }

    /// `1 + (−log f − log c − log F_m)/log φ`.
    fn mu2(&self, log_fm: &ApproxReal) -> Result<ApproxReal> {
        let p = self.prec();
        let num = -&(&(&self.log_f + &self.shift) + log_fm);
        Ok(&ApproxReal::one(p) + &num.div(&self.log_phi)?)
    }

    fn log_fm(&self, m: u32, fm: &BigInt) -> Result<ApproxReal> {
        let p = self.prec();
        if m <= 2 {
            Ok(ApproxReal::zero(p))
        } else if m <= self.k + 1 {
            Ok(ln2(p).mul_int(m - 2))
        } else {
            log(&ApproxReal::from_int(fm.clone(), p))
        }
    }
}

/// Run `f` on `kd`, refining the per-`k` data while it reports `Undecided`.
fn with_refinement(
    kd: &KData,
    f: impl Fn(&KData) -> Result<ReductionOutcome>,
) -> Result<ReductionOutcome> {
    match f(kd) {
        Err(Error::Undecided { .. }) => {}
        other => return other,
    }
    let mut cur = kd.refined()?;
    loop {
        match f(&cur) {
            Err(Error::Undecided { .. }) => cur = cur.refined()?,
            other => return other,
        }
    }
}

struct Instance {
    k: u32,
    m: Option<u32>,
    outcome: Result<ReductionOutcome>,
}

fn summarize(
    name: &str,
    instances: &[Instance],
    floor: i64,
    relation: Relation,
    target: i64,
) -> (StageSummary, Vec<CampaignRecord>) {
    let mut records = Vec::new();
    let mut failures = Vec::new();
    let mut best: Option<(&ApproxReal, u32, Option<u32>)> = None;
    let mut int_bound = floor;
    for inst in instances {
        match &inst.outcome {
            Ok(out) if out.is_reduced() => {
                let bound = out.bound.as_ref().expect("reduced outcome has a bound");
                let w = out.w_bound.expect("reduced outcome has w_bound");
                int_bound = int_bound.max(w);
                if best.is_none_or(|(b, _, _)| bound.hi() > b.hi()) {
                    best = Some((bound, inst.k, inst.m));
                }
                let r = out.record();
                records.push(CampaignRecord {
                    k: inst.k,
                    m: inst.m,
                    q_index: r.q_index,
                    q_digits10: r.q_digits10,
                    epsilon: r.epsilon,
                    bound: r.bound.unwrap_or_default(),
                });
            }
            Ok(out) => failures.push(Failure {
                k: inst.k,
                m: inst.m,
                reason: format!(
                    "epsilon failed at q index {}: ε = {}",
                    out.q_index,
                    out.epsilon.to_sci(4)
                ),
            }),
            Err(e) => failures.push(Failure {
                k: inst.k,
                m: inst.m,
                reason: e.to_string(),
            }),
        }
    }
    let passed = failures.is_empty() && relation.holds(int_bound, target);
    let summary = StageSummary {
        name: name.to_string(),
        instances: instances.len(),
        max_bound: best.map(|(b, _, _)| b.to_decimal(3)).unwrap_or_default(),
        argmax_k: best.map(|(_, k, _)| k),
        argmax_m: best.and_then(|(_, _, m)| m),
        int_bound,
        relation,
        target,
        failures,
        passed,
    };
    (summary, records)
}

/// Both small-k stages over the given `k` values.
///
/// Stage 1 bounds `m`; stage 2 then runs over every `1 ≤ m ≤` that bound
/// and bounds `n`. Results are ordered by `(k, m)` regardless of
/// scheduling.
pub fn campaign_small_k(
    eq: Equation,
    ks: &[u32],
    ctx: &PrecisionContext,
) -> Result<CampaignReport> {
    let params = small_k_params(eq);
    let mut ks: Vec<u32> = ks.to_vec();
    ks.sort_unstable();
    ks.dedup();
    if let Some(&k) = ks.iter().find(|&&k| k < eq.min_k() || k > params.k_hi) {
        return Err(Error::Precondition(format!(
            "small-k {eq} campaign covers {}..={}, got k = {k}",
            eq.min_k(),
            params.k_hi
        )));
    }
    let kdata: Vec<KData> = ks
        .par_iter()
        .map(|&k| KData::new(eq, k, ctx))
        .collect::<Result<_>>()?;

    let stage1: Vec<Instance> = kdata
        .par_iter()
        .map(|kd| {
            let outcome = with_refinement(kd, |d| {
                let p = d.plan.bits();
                d.plan.reduce_or_fallback(
                    &d.mu1()?,
                    &ApproxReal::from_decimal(params.a1, p)?,
                    &d.phi,
                )
            });
            Instance {
                k: kd.k,
                m: None,
                outcome,
            }
        })
        .collect();
    let (s1, mut records) = summarize("m_bound", &stage1, 4, Relation::Le, params.m_target);
    let m_max = u32::try_from(s1.int_bound).map_err(|_| Error::invariant("negative m bound"))?;

    let pairs: Vec<(usize, u32)> = (0..kdata.len())
        .flat_map(|i| (1..=m_max).map(move |m| (i, m)))
        .collect();
    let tables: Vec<KFibTable> = kdata
        .par_iter()
        .map(|kd| KFibTable::with_len(kd.k, m_max as usize + 1))
        .collect::<Result<_>>()?;
    let stage2: Vec<Instance> = pairs
        .par_iter()
        .map(|&(i, m)| {
            let kd = &kdata[i];
            let fm = &tables[i].terms()[m as usize];
            let outcome = with_refinement(kd, |d| {
                let p = d.plan.bits();
                let mu = d.mu2(&d.log_fm(m, fm)?)?;
                d.plan
                    .reduce_or_fallback(&mu, &ApproxReal::from_decimal(params.a2, p)?, &d.phi)
            });
            Instance {
                k: kd.k,
                m: Some(m),
                outcome,
            }
        })
        .collect();
    let (s2, r2) = summarize("n_bound", &stage2, 2, Relation::Le, params.n_target);
    records.extend(r2);
    let passed = s1.passed && s2.passed;
    Ok(CampaignReport {
        equation: eq,
        stage: Stage::Small,
        summaries: vec![s1, s2],
        records,
        passes: Vec::new(),
        passed,
    })
}

/// Targets for the two large-k passes: pass 1 exactly, pass 2 strictly below.
pub fn large_k_targets(eq: Equation) -> (i64, i64) {
    match eq {
        Equation::Balancing => (1180, 450),
        Equation::Lucas => (1082, 500),
    }
}

fn sci(x: &BigInt) -> String {
    ApproxReal::from_int(x.clone(), 64).to_sci(3)
}

fn log_gamma_over_log2() -> Refinable {
    Refinable::new("log γ / log 2", |bits| {
        let c = AlgebraicConstants::new(bits)?;
        c.log_gamma.div(&c.log2)
    })
}

fn log2_over_log_gamma() -> Refinable {
    Refinable::new("log 2 / log γ", |bits| {
        let c = AlgebraicConstants::new(bits)?;
        c.log2.div(&c.log_gamma)
    })
}

/// One large-k pass: a bound `b` with `k/2 < b`, reported as `k ≤ 2⌈b⌉`.
fn large_k_pass(eq: Equation, pass: u32, m: &BigInt, ctx: &PrecisionContext) -> Result<PassRecord> {
    match eq {
        Equation::Balancing => {
            let inst = ReductionInstance {
                tau: log_gamma_over_log2(),
                mu: Refinable::rational(BigInt::from(-1), BigInt::from(2))?,
                a: Refinable::decimal("5.92")?,
                b: Refinable::decimal("2")?,
                m: m.clone(),
            };
            let out = dujella_petho_reduce(&inst, ctx)?;
            let (Some(bound), Some(w)) = (&out.bound, out.w_bound) else {
                return Err(Error::invariant(format!(
                    "large-k pass {pass}: ε stayed non-positive through q index {}",
                    out.q_index
                )));
            };
            Ok(PassRecord {
                pass,
                m: sci(m),
                method: "dujella_petho".into(),
                q_index: out.q_index,
                q_digits10: out.q_used.to_string().len(),
                epsilon: Some(out.epsilon.to_sci(6)),
                a_max: None,
                bound: bound.to_decimal(3),
                k_max: 2 * w,
            })
        }
        Equation::Lucas => {
            let lb = legendre_bound(&log2_over_log_gamma(), m, ctx)?;
            let (bound, w) = ctx.escalate(|bits| {
                let scale = (lb.a_max.clone() + 2u32) * m;
                let x = ApproxReal::from_decimal("2.33", bits)?.mul_int(scale);
                let b = log(&x)?.div(&ln2(bits))?;
                let w = b.hi().ceil();
                if b.lo().ceil() != w {
                    return Err(Error::Undecided { bits });
                }
                Ok((b, w))
            })?;
            let w = i64::try_from(w).map_err(|_| Error::invariant("large-k bound overflow"))?;
            Ok(PassRecord {
                pass,
                m: sci(m),
                method: "legendre".into(),
                q_index: lb.n_index,
                q_digits10: lb.q_n.to_string().len(),
                epsilon: None,
                a_max: Some(lb.a_max.to_string()),
                bound: bound.to_decimal(3),
                k_max: 2 * w,
            })
        }
    }
}

/// Two passes for `k` beyond the small-k range: the first from the a-priori
/// `M`, the second from the `n`-bound at the first pass's `k`.
pub fn campaign_large_k(eq: Equation, ctx: &PrecisionContext) -> Result<CampaignReport> {
    let (t1, t2) = large_k_targets(eq);
    let m1 = large_k_initial_m(eq);
    let p1 = large_k_pass(eq, 1, &m1, ctx)?;
    let k1 =
        u32::try_from(p1.k_max).map_err(|_| Error::invariant("pass-1 k bound out of range"))?;
    let m2 = derive_n_bound(eq, k1, ctx)? * 2u32;
    let p2 = large_k_pass(eq, 2, &m2, ctx)?;
    let summary = |name: &str, p: &PassRecord, rel: Relation, target: i64| StageSummary {
        name: name.to_string(),
        instances: 1,
        max_bound: p.bound.clone(),
        argmax_k: None,
        argmax_m: None,
        int_bound: p.k_max,
        relation: rel,
        target,
        failures: Vec::new(),
        passed: rel.holds(p.k_max, target),
    };
    let summaries = vec![
        summary("k_bound_pass1", &p1, Relation::Eq, t1),
        summary("k_bound_pass2", &p2, Relation::Lt, t2),
    ];
    let passed = summaries.iter().all(|s| s.passed);
    Ok(CampaignReport {
        equation: eq,
        stage: Stage::Large,
        summaries,
        records: Vec::new(),
        passes: vec![p1, p2],
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn large_k_balancing_reaches_1180() {
        let r = campaign_large_k(Equation::Balancing, &PrecisionContext::default()).unwrap();
        assert_eq!(r.passes[0].k_max, 1180);
        assert!(r.passes[1].k_max < 450);
        assert!(r.passed);
    }

    #[test]
    fn large_k_lucas_reaches_1082() {
        let r = campaign_large_k(Equation::Lucas, &PrecisionContext::default()).unwrap();
        assert_eq!(r.passes[0].a_max.as_deref(), Some("4008"));
        assert_eq!(r.passes[0].k_max, 1082);
        assert!(r.passes[1].k_max < 500);
        assert!(r.passed);
    }

    #[test]
    fn small_k_single_values() {
        let ctx = PrecisionContext::default();
        let r = campaign_small_k(Equation::Balancing, &[3], &ctx).unwrap();
        let s1 = r.summary("m_bound").unwrap();
        assert!(s1.int_bound <= 443 && s1.failures.is_empty());
        let r = campaign_small_k(Equation::Lucas, &[2], &ctx).unwrap();
        assert!(r.passed, "{:?}", r.summaries);
    }

    #[test]
    fn rejects_k_outside_range() {
        let ctx = PrecisionContext::default();
        assert!(campaign_small_k(Equation::Balancing, &[2], &ctx).is_err());
        assert!(campaign_small_k(Equation::Lucas, &[501], &ctx).is_err());
    }
}
