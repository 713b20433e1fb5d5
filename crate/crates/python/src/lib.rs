//! Python bindings. Big integers cross as Python `int`, balls as decimal
//! strings, structured reports as plain dicts.

use kfib_balance::numerics::{dominant_root as root, PrecisionContext};
use kfib_balance::reduction::campaign::{campaign_large_k, campaign_small_k};
use kfib_balance::reduction::{
    cf_expand, dujella_petho_reduce, reduce_with_fallback, CfStop, ReductionInstance,
};
use kfib_balance::{expr, linforms, search, sequences, Equation, Error};
use kfib_balance_cli::config::{KRange, RunConfig};
use kfib_balance_cli::verify::verify_all;
use num_bigint::BigInt;
use pyo3::exceptions::{PyArithmeticError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Undecided { .. } | Error::PrecisionExhausted { .. } => {
            PyArithmeticError::new_err(e.to_string())
        }
        Error::Domain(_) | Error::Precondition(_) | Error::Parse(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn equation(s: &str) -> PyResult<Equation> {
    s.parse()
        .map_err(|e: Error| PyValueError::new_err(e.to_string()))
}

fn context(bits: Option<u32>) -> PyResult<PrecisionContext> {
    match bits {
        None => Ok(PrecisionContext::default()),
        Some(b) => {
            let d = PrecisionContext::default();
            PrecisionContext::new(b, d.max_bits.max(b), d.escalation_factor).map_err(py_err)
        }
    }
}

fn json_to_py(py: Python<'_>, text: &str) -> PyResult<Py<PyAny>> {
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

/// The dominant root of `x^k − x^(k−1) − … − 1` as a decimal string.
#[pyfunction]
#[pyo3(signature = (k, digits = 30, bits = None))]
fn dominant_root(k: u32, digits: usize, bits: Option<u32>) -> PyResult<String> {
    let ctx = context(bits)?.at_least((digits as f64 * 3.33) as u32 + 32);
    Ok(root(k, &ctx).map_err(py_err)?.to_decimal(digits))
}

#[pyfunction]
fn kfib(k: u32, n: i64) -> PyResult<BigInt> {
    sequences::kfib(k, n).map_err(py_err)
}

#[pyfunction]
fn balancing(l: u64) -> BigInt {
    sequences::balancing(l)
}

#[pyfunction]
fn lucas_balancing(l: u64) -> BigInt {
    sequences::lucas_balancing(l)
}

/// Partial quotients and convergents as `(a, p, q)` triples.
#[pyfunction]
#[pyo3(signature = (x, count = None, min_denominator = None, bits = None))]
fn cf(
    x: &str,
    count: Option<usize>,
    min_denominator: Option<BigInt>,
    bits: Option<u32>,
) -> PyResult<Vec<(BigInt, BigInt, BigInt)>> {
    let stop = match (count, min_denominator) {
        (Some(n), None) => CfStop::Count(n),
        (None, Some(q)) => CfStop::min_denominator(q),
        _ => {
            return Err(PyValueError::new_err(
                "give exactly one of count, min_denominator",
            ))
        }
    };
    let x = expr::parse(x).map_err(py_err)?;
    let c = cf_expand(&x, &stop, &context(bits)?).map_err(py_err)?;
    Ok((0..c.len())
        .map(|i| {
            (
                c.partial_quotients[i].clone(),
                c.p(i).clone(),
                c.q(i).clone(),
            )
        })
        .collect())
}

#[pyclass(frozen, get_all, skip_from_py_object, module = "pykfib")]
#[derive(Clone)]
struct ReductionOutcome {
    reduced: bool,
    method: String,
    /// Zero-based convergent index.
    q_index: usize,
    q: BigInt,
    epsilon: String,
    bound: Option<String>,
    w_bound: Option<i64>,
}

#[pymethods]
impl ReductionOutcome {
    fn __repr__(&self) -> String {
        format!(
            "ReductionOutcome(reduced={}, method={:?}, q_index={}, w_bound={:?})",
            self.reduced, self.method, self.q_index, self.w_bound
        )
    }
}

/// Reduce `0 < |uτ − v + μ| < A·B^(−w)` for `u ≤ m`. Expressions use the
/// same syntax as the CLI (`log(2)/log(gamma)`, `sqrt(2)`, `3/7`).
#[pyfunction]
#[pyo3(signature = (tau, mu, a, b, m, fallback = true, bits = None))]
fn reduce(
    tau: &str,
    mu: &str,
    a: &str,
    b: &str,
    m: &str,
    fallback: bool,
    bits: Option<u32>,
) -> PyResult<ReductionOutcome> {
    let inst = ReductionInstance {
        tau: expr::parse(tau).map_err(py_err)?,
        mu: expr::parse(mu).map_err(py_err)?,
        a: expr::parse(a).map_err(py_err)?,
        b: expr::parse(b).map_err(py_err)?,
        m: expr::parse_integer(m).map_err(py_err)?,
    };
    let ctx = context(bits)?;
    let out = if fallback {
        reduce_with_fallback(&inst, &ctx)
    } else {
        dujella_petho_reduce(&inst, &ctx)
    }
    .map_err(py_err)?;
    let rec = out.record();
    Ok(ReductionOutcome {
        reduced: out.is_reduced(),
        method: serde_json::to_value(rec.method)
            .unwrap()
            .as_str()
            .unwrap_or("")
            .to_string(),
        q_index: out.q_index,
        q: out.q_used.clone(),
        epsilon: rec.epsilon,
        bound: rec.bound,
        w_bound: out.w_bound,
    })
}

/// Integer bound on `n` for a fixed `k`.
#[pyfunction]
fn derive_n_bound(equation_: &str, k: u32) -> PyResult<BigInt> {
    linforms::derive_n_bound(equation(equation_)?, k, &PrecisionContext::default()).map_err(py_err)
}

#[pyclass(frozen, skip_from_py_object, module = "pykfib")]
#[derive(Clone)]
struct SolutionRecord {
    #[pyo3(get)]
    equation: String,
    #[pyo3(get)]
    l: u64,
    #[pyo3(get)]
    k: u32,
    #[pyo3(get)]
    n: u32,
    #[pyo3(get)]
    m: u32,
    #[pyo3(get)]
    value: BigInt,
    inner: search::SolutionRecord,
}

#[pymethods]
impl SolutionRecord {
    /// Recheck the product against both sequences from scratch.
    fn certify(&self) -> bool {
        search::certify_solution(&self.inner)
    }

    fn __repr__(&self) -> String {
        self.inner.display()
    }
}

impl From<search::SolutionRecord> for SolutionRecord {
    fn from(r: search::SolutionRecord) -> Self {
        SolutionRecord {
            equation: r.equation.to_string(),
            l: r.l,
            k: r.k,
            n: r.n,
            m: r.m,
            value: r.value.clone(),
            inner: r,
        }
    }
}

#[pyfunction]
fn brute_force_box(
    equation_: &str,
    k_lo: u32,
    k_hi: u32,
    n_max: u32,
    l_max: u64,
) -> PyResult<Vec<SolutionRecord>> {
    let eq = equation(equation_)?;
    Ok(search::brute_force_box(eq, k_lo, k_hi, n_max, l_max)
        .into_iter()
        .map(Into::into)
        .collect())
}

/// Small-k campaign over `ks`, returned as a dict without per-instance records.
#[pyfunction]
fn campaign_small(py: Python<'_>, equation_: &str, ks: Vec<u32>) -> PyResult<Py<PyAny>> {
    let eq = equation(equation_)?;
    let mut r = py
        .detach(|| campaign_small_k(eq, &ks, &PrecisionContext::default()))
        .map_err(py_err)?;
    r.records.clear();
    json_to_py(py, &serde_json::to_string(&r).unwrap())
}

#[pyfunction]
fn campaign_large(py: Python<'_>, equation_: &str) -> PyResult<Py<PyAny>> {
    let eq = equation(equation_)?;
    let r = py
        .detach(|| campaign_large_k(eq, &PrecisionContext::default()))
        .map_err(py_err)?;
    json_to_py(py, &serde_json::to_string(&r).unwrap())
}

/// Run the full check. Returns `(exit_code, manifest)`.
#[pyfunction]
#[pyo3(signature = (smoke = true, k_range = None, jobs = 1))]
fn verify(
    py: Python<'_>,
    smoke: bool,
    k_range: Option<&str>,
    jobs: usize,
) -> PyResult<(i32, Py<PyAny>)> {
    let mut cfg = RunConfig {
        smoke,
        jobs,
        ..RunConfig::default()
    };
    if let Some(r) = k_range {
        cfg.k_range = Some(
            r.parse::<KRange>()
                .map_err(|e| PyValueError::new_err(e.to_string()))?,
        );
    }
    let out = py.detach(|| verify_all(&cfg, None));
    let text = out.manifest.to_json();
    Ok((out.exit_code, json_to_py(py, &text)?))
}

#[pymodule]
fn pykfib(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<ReductionOutcome>()?;
    m.add_class::<SolutionRecord>()?;
    m.add_function(wrap_pyfunction!(dominant_root, m)?)?;
    m.add_function(wrap_pyfunction!(kfib, m)?)?;
    m.add_function(wrap_pyfunction!(balancing, m)?)?;
    m.add_function(wrap_pyfunction!(lucas_balancing, m)?)?;
    m.add_function(wrap_pyfunction!(cf, m)?)?;
    m.add_function(wrap_pyfunction!(reduce, m)?)?;
    m.add_function(wrap_pyfunction!(derive_n_bound, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_box, m)?)?;
    m.add_function(wrap_pyfunction!(campaign_small, m)?)?;
    m.add_function(wrap_pyfunction!(campaign_large, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
