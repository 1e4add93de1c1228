//! Python bindings. Payloads come back as plain dicts and lists with the same
//! shape as the CLI's JSON output; rationals are `"p/q"` strings.
//!
//! Rational arguments accept anything whose `str()` is a rational literal
//! (`int`, `fractions.Fraction`, `"1/3+e"`).

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList, PyString};
use serde::Serialize;
use serde_json::{json, Value};
use wonderful_core::arrangements::{self, AmbientDescriptor, AmbientKind, OrderSpec};
use wonderful_core::git::{self, GitError, PointConfiguration, QuotientPoint};
use wonderful_core::rational::{self, Rational};
use wonderful_core::toric::{self, FanKind};
use wonderful_core::trees::{self, StableTree, TreeError};
use wonderful_core::weights::{self, DomainKind, WeightVector};
use wonderful_core::{engine, oracle, IndexSet};

create_exception!(wonderful, DomainRejected, PyValueError, "Input lies outside the required domain.");

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rejected(e: impl std::fmt::Display) -> PyErr {
    DomainRejected::new_err(e.to_string())
}

fn tree_err(e: TreeError) -> PyErr {
    match e {
        TreeError::Domain { .. } | TreeError::UnstableResult(_) => rejected(e),
        other => err(other),
    }
}

fn git_err(e: GitError) -> PyErr {
    match e {
        GitError::Unstable(_) | GitError::DomainMismatch(_) => rejected(e),
        other => err(other),
    }
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => i.into_pyobject(py)?.into_any(),
            (None, Some(u)) => u.into_pyobject(py)?.into_any(),
            _ => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => PyString::new(py, s).into_any(),
        Value::Array(a) => {
            let items = a.iter().map(|x| to_py(py, x)).collect::<PyResult<Vec<_>>>()?;
            PyList::new(py, items)?.into_any()
        }
        Value::Object(m) => {
            let d = PyDict::new(py);
            for (k, x) in m {
                d.set_item(k, to_py(py, x)?)?;
            }
            d.into_any()
        }
    })
}

fn ser<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &serde_json::to_value(v).map_err(err)?)
}

/// A JSON document given either as a string or as a Python object.
fn json_arg(obj: &Bound<'_, PyAny>) -> PyResult<Value> {
    let text: String = match obj.cast::<PyString>() {
        Ok(s) => s.to_str()?.to_owned(),
        Err(_) => obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()?,
    };
    serde_json::from_str(&text).map_err(err)
}

fn epsilon(raw: &str) -> PyResult<Rational> {
    let e = rational::parse(raw).map_err(err)?;
    if !rational::is_positive(&e) {
        return Err(err(format!("epsilon must be positive, got {raw}")));
    }
    Ok(e)
}

fn literals(items: &Bound<'_, PyAny>) -> PyResult<Vec<String>> {
    items.try_iter()?.map(|x| x?.str()?.to_str().map(str::to_owned)).collect()
}

fn weight_vector(d: usize, items: &Bound<'_, PyAny>, eps: &Rational) -> PyResult<WeightVector> {
    let entries = literals(items)?
        .iter()
        .map(|s| rational::parse_with_epsilon(s.trim(), eps))
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    WeightVector::new(d, entries).map_err(err)
}

fn index_set(labels: Vec<usize>) -> PyResult<IndexSet> {
    IndexSet::try_from_labels(labels.iter().copied()).ok_or_else(|| err(format!("bad index set {labels:?}")))
}

fn domain_kind(kind: &str) -> PyResult<DomainKind> {
    kind.parse().map_err(err)
}

fn fan_kind(kind: &str) -> PyResult<FanKind> {
    kind.parse().map_err(err)
}

fn instance(
    kind: &str,
    d: usize,
    n: Option<usize>,
    weights: Option<&Bound<'_, PyAny>>,
    eps: &str,
) -> PyResult<(AmbientDescriptor, WeightVector)> {
    let w = match (weights, n) {
        (Some(items), n) => {
            let w = weight_vector(d, items, &epsilon(eps)?)?;
            if n.is_some_and(|n| n != w.n()) {
                return Err(err(format!("n = {} but {} weights", n.unwrap(), w.n())));
            }
            w
        }
        (None, Some(n)) => WeightVector::ones(d, n),
        (None, None) => return Err(err("give n or weights")),
    };
    let amb_kind = match domain_kind(kind)? {
        DomainKind::T => AmbientKind::TSpace,
        DomainKind::P => AmbientKind::PSpace,
        DomainKind::FM => AmbientKind::FMSpace,
    };
    Ok((AmbientDescriptor::new(amb_kind, d, w.n()).map_err(err)?, w))
}

/// Domain membership report for `kind` in {"FM", "T", "P"}.
#[pyfunction]
#[pyo3(signature = (kind, d, weights, epsilon = "1/1000"))]
fn check_weights<'py>(
    py: Python<'py>,
    kind: &str,
    d: usize,
    weights: &Bound<'py, PyAny>,
    epsilon: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let w = weight_vector(d, weights, &self::epsilon(epsilon)?)?;
    ser(py, &weights::validate_domain(&w, domain_kind(kind)?).map_err(err)?)
}

#[pyfunction]
fn git_weights(py: Python<'_>, d: usize, n: usize) -> PyResult<Bound<'_, PyAny>> {
    ser(py, &weights::git_weights(d, n).map_err(err)?)
}

/// Heavy index sets in ascending-dimension order.
#[pyfunction]
#[pyo3(signature = (kind, d, n = None, weights = None, epsilon = "1/1000"))]
fn building_set<'py>(
    py: Python<'py>,
    kind: &str,
    d: usize,
    n: Option<usize>,
    weights: Option<&Bound<'py, PyAny>>,
    epsilon: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let (amb, w) = instance(kind, d, n, weights, epsilon)?;
    ser(py, &arrangements::heavy_sets(&w, amb).map_err(err)?.elements)
}

/// Engine run: poincare, euler, b2 and the per-center records.
#[pyfunction]
#[pyo3(signature = (kind, d, n = None, weights = None, relative = None, epsilon = "1/1000"))]
fn betti<'py>(
    py: Python<'py>,
    kind: &str,
    d: usize,
    n: Option<usize>,
    weights: Option<&Bound<'py, PyAny>>,
    relative: Option<Vec<usize>>,
    epsilon: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let (amb, w) = instance(kind, d, n, weights, epsilon)?;
    let order = match relative {
        Some(r) => OrderSpec::Relative(index_set(r)?),
        None => OrderSpec::AscendingDimension,
    };
    ser(py, &engine::run(amb, &w, &order).map_err(err)?)
}

/// Poincaré polynomial of the boundary divisor `D_I`.
#[pyfunction]
#[pyo3(signature = (kind, d, set, n = None, weights = None, epsilon = "1/1000"))]
fn divisor<'py>(
    py: Python<'py>,
    kind: &str,
    d: usize,
    set: Vec<usize>,
    n: Option<usize>,
    weights: Option<&Bound<'py, PyAny>>,
    epsilon: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let (amb, w) = instance(kind, d, n, weights, epsilon)?;
    ser(py, &engine::divisor_poincare(amb, &w, index_set(set)?).map_err(err)?)
}

/// Number of centers strictly containing `set`.
#[pyfunction]
#[pyo3(signature = (kind, d, set, n = None, weights = None, epsilon = "1/1000"))]
fn twist(
    kind: &str,
    d: usize,
    set: Vec<usize>,
    n: Option<usize>,
    weights: Option<&Bound<'_, PyAny>>,
    epsilon: &str,
) -> PyResult<usize> {
    let (amb, w) = instance(kind, d, n, weights, epsilon)?;
    engine::twist_report(amb, &w, index_set(set)?).map_err(err)
}

#[pyfunction]
fn euler_oracle(d: usize, n: usize) -> i128 {
    oracle::euler_oracle(d, n)
}

#[pyfunction]
fn sha_dimensions(n: usize, m: usize) -> PyResult<(i64, i64, bool)> {
    arrangements::sha_dimensions(n, m).map_err(err)
}

fn configuration(points: &Bound<'_, PyAny>) -> PyResult<PointConfiguration> {
    let rows = points.try_iter()?.map(|r| literals(&r?)).collect::<PyResult<Vec<_>>>()?;
    serde_json::from_value(json!(rows)).map_err(err)
}

/// Stability report plus the direct frame conditions (GIT weights when
/// `weights` is omitted).
#[pyfunction]
#[pyo3(signature = (points, weights = None))]
fn is_stable<'py>(
    py: Python<'py>,
    points: &Bound<'py, PyAny>,
    weights: Option<&Bound<'py, PyAny>>,
) -> PyResult<Bound<'py, PyAny>> {
    let c = configuration(points)?;
    let w = match weights {
        Some(items) => literals(items)?.iter().map(|s| rational::parse(s)).collect::<Result<Vec<_>, _>>().map_err(err)?,
        None => weights::git_weights(c.d(), c.n()).map_err(err)?.entries,
    };
    let report = git::is_stable(&c, &w).map_err(git_err)?;
    let conditions = weights.is_none().then(|| git::direct_conditions(&c));
    to_py(py, &json!({ "stability": report, "conditions": conditions }))
}

#[pyfunction]
fn normalize<'py>(py: Python<'py>, points: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    ser(py, &git::normalize(&configuration(points)?).map_err(git_err)?)
}

/// Index sets forced to coincide at the quotient point given by its rows.
#[pyfunction]
fn classify<'py>(py: Python<'py>, rows: &Bound<'py, PyAny>, weights: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    let rows = rows.try_iter()?.map(|r| literals(&r?)).collect::<PyResult<Vec<_>>>()?;
    let d = rows.len();
    let n = rows.first().map_or(0, Vec::len) + d + 1;
    let qp = QuotientPoint::from_strings(n, &rows).map_err(git_err)?;
    let w = literals(weights)?.iter().map(|s| rational::parse(s)).collect::<Result<Vec<_>, _>>().map_err(err)?;
    let w = WeightVector::new(d, w).map_err(err)?;
    ser(py, &git::classify_coincidence(&qp, &w).map_err(git_err)?)
}

fn load_tree(tree: &Bound<'_, PyAny>, eps: &str) -> PyResult<StableTree> {
    StableTree::from_json(&json_arg(tree)?, &epsilon(eps)?).map_err(tree_err)
}

#[pyfunction]
#[pyo3(signature = (tree, epsilon = "1/1000"))]
fn tree_validate<'py>(py: Python<'py>, tree: &Bound<'py, PyAny>, epsilon: &str) -> PyResult<Bound<'py, PyAny>> {
    ser(py, &load_tree(tree, epsilon)?.validate().map_err(tree_err)?)
}

#[pyfunction]
#[pyo3(signature = (tree, epsilon = "1/1000"))]
fn tree_canonicalize<'py>(py: Python<'py>, tree: &Bound<'py, PyAny>, epsilon: &str) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &load_tree(tree, epsilon)?.canonicalize().map_err(tree_err)?.to_json())
}

#[pyfunction]
#[pyo3(signature = (tree, weights, epsilon = "1/1000"))]
fn tree_reduce<'py>(
    py: Python<'py>,
    tree: &Bound<'py, PyAny>,
    weights: &Bound<'py, PyAny>,
    epsilon: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let t = load_tree(tree, epsilon)?;
    let b = weight_vector(t.d(), weights, &self::epsilon(epsilon)?)?;
    to_py(py, &t.reduce(&b).map_err(tree_err)?.to_json())
}

#[pyfunction]
#[pyo3(signature = (tree, keep, epsilon = "1/1000"))]
fn tree_forget<'py>(
    py: Python<'py>,
    tree: &Bound<'py, PyAny>,
    keep: Vec<usize>,
    epsilon: &str,
) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &load_tree(tree, epsilon)?.forget(index_set(keep)?).map_err(tree_err)?.to_json())
}

#[pyfunction]
#[pyo3(signature = (tree, k, epsilon = "1/1000"))]
fn tree_profile<'py>(py: Python<'py>, tree: &Bound<'py, PyAny>, k: usize, epsilon: &str) -> PyResult<Bound<'py, PyAny>> {
    let p = load_tree(tree, epsilon)?.forgetful_profile(k).map_err(tree_err)?;
    to_py(py, &trees::profile_json(&p))
}

#[pyfunction]
fn lm_rays<'py>(py: Python<'py>, kind: &str, d: usize, n: usize) -> PyResult<Bound<'py, PyAny>> {
    ser(py, &toric::lm_rays(fan_kind(kind)?, d, n).map_err(err)?)
}

/// `{"lattice_rank", "rays", "max_cones"}` with 0-based ray indices.
#[pyfunction]
fn build_fan<'py>(py: Python<'py>, kind: &str, d: usize, n: usize) -> PyResult<Bound<'py, PyAny>> {
    ser(py, &toric::build_fan(fan_kind(kind)?, d, n).map_err(err)?)
}

fn fan_arg(fan: &Bound<'_, PyAny>) -> PyResult<toric::Fan> {
    let f: toric::Fan = serde_json::from_value(json_arg(fan)?).map_err(err)?;
    f.validate_shape().map_err(err)?;
    Ok(f)
}

#[pyfunction]
#[pyo3(signature = (fan, seed = 0))]
fn check_fan<'py>(py: Python<'py>, fan: &Bound<'py, PyAny>, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    ser(py, &toric::check_fan(&fan_arg(fan)?, seed).map_err(err)?)
}

#[pyfunction]
fn h_polynomial<'py>(py: Python<'py>, fan: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
    ser(py, &toric::h_polynomial(&fan_arg(fan)?).map_err(err)?)
}

#[pymodule]
pub fn wonderful(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("DomainRejected", m.py().get_type::<DomainRejected>())?;
    m.add_function(wrap_pyfunction!(check_weights, m)?)?;
    m.add_function(wrap_pyfunction!(git_weights, m)?)?;
    m.add_function(wrap_pyfunction!(building_set, m)?)?;
    m.add_function(wrap_pyfunction!(betti, m)?)?;
    m.add_function(wrap_pyfunction!(divisor, m)?)?;
    m.add_function(wrap_pyfunction!(twist, m)?)?;
    m.add_function(wrap_pyfunction!(euler_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(sha_dimensions, m)?)?;
    m.add_function(wrap_pyfunction!(is_stable, m)?)?;
    m.add_function(wrap_pyfunction!(normalize, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(tree_validate, m)?)?;
    m.add_function(wrap_pyfunction!(tree_canonicalize, m)?)?;
    m.add_function(wrap_pyfunction!(tree_reduce, m)?)?;
    m.add_function(wrap_pyfunction!(tree_forget, m)?)?;
    m.add_function(wrap_pyfunction!(tree_profile, m)?)?;
    m.add_function(wrap_pyfunction!(lm_rays, m)?)?;
    m.add_function(wrap_pyfunction!(build_fan, m)?)?;
    m.add_function(wrap_pyfunction!(check_fan, m)?)?;
    m.add_function(wrap_pyfunction!(h_polynomial, m)?)?;
    Ok(())
}
