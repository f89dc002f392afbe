// Copyright 2026 the Kolmoverify Authors
// SPDX-License-Identifier: Apache-2.0

//! Python bindings. Bit strings cross the boundary as `"0110"`, the empty
//! outcome as `None`. Structured results come back as plain dicts.

use std::collections::BTreeMap;

use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;

use kolmoverify::bitvm::{universal_distribution as ud, Mode, VmBudget, VmOutcome};
use kolmoverify::experiments::{self, goldens::Goldens, RunOptions};
use kolmoverify::joint::Flavor;
use kolmoverify::samplers::Corpus;
use kolmoverify::verify::{make_oracle, qas_verify, ver, ver_star, OracleTarget, QasConfigV, VerConfig};
use kolmoverify::{BitTape, Error};

fn err(e: Error) -> PyErr {
    match e {
        Error::UnknownSampler(_) | Error::UnknownExperiment(_) => PyKeyError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, v: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let s = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (s,))
}

fn from_py(obj: &Bound<'_, PyAny>) -> PyResult<serde_json::Value> {
    let s: String = obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()?;
    serde_json::from_str(&s).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn outcome(s: Option<&str>) -> PyResult<VmOutcome> {
    match s {
        None => Ok(VmOutcome::Bottom),
        Some(b) => Ok(VmOutcome::Bits(b.parse::<BitTape>().map_err(err)?)),
    }
}

fn outcome_str(o: &VmOutcome) -> Option<String> {
    o.bits().map(|b| b.to_string())
}

fn budget(x: &BitTape, t: u32, m: Option<u32>, n: u32) -> PyResult<VmBudget> {
    VmBudget::new(n, t, m.unwrap_or(x.len() as u32)).map_err(err)
}

/// Classical time-bounded complexity of `x` in bits (`inf` if unreachable).
#[pyfunction]
#[pyo3(signature = (x, t, m=None, n=4))]
fn ukt(x: &str, t: u32, m: Option<u32>, n: u32) -> PyResult<f64> {
    let x: BitTape = x.parse().map_err(err)?;
    kolmoverify::ukt(&x, &budget(&x, t, m, n)?).map_err(err)
}

/// Quantum time-bounded complexity of `x` in bits.
#[pyfunction]
#[pyo3(signature = (x, t, m=None, n=4))]
fn qukt(x: &str, t: u32, m: Option<u32>, n: u32) -> PyResult<f64> {
    let x: BitTape = x.parse().map_err(err)?;
    kolmoverify::qukt(&x, &budget(&x, t, m, n)?).map_err(err)
}

/// Exact output distribution of the classical machine at budget `t`, keyed
/// by outcome.
#[pyfunction]
#[pyo3(signature = (t, m, n=4))]
fn universal_distribution(t: u32, m: u32, n: u32) -> PyResult<BTreeMap<Option<String>, f64>> {
    let b = VmBudget::new(n, t, m).map_err(err)?;
    let d = ud(&b, Mode::Exact).map_err(err)?;
    Ok(d.to_f64().iter().map(|(o, p)| (outcome_str(o), *p)).collect())
}

#[pyfunction]
fn corpus_labels() -> Vec<String> {
    Corpus::v1().samplers().iter().map(|s| s.label.clone()).collect()
}

/// Exact (or float) distribution of a corpus sampler.
#[pyfunction]
fn distribution(label: &str) -> PyResult<BTreeMap<Option<String>, f64>> {
    let s = Corpus::v1().get(label).map_err(err)?;
    Ok(s.distribution().map_err(err)?.iter().map(|(o, p)| (outcome_str(o), *p)).collect())
}

/// `count` samples from a corpus sampler; reproducible from `seed`.
#[pyfunction]
#[pyo3(signature = (label, count, seed=0))]
fn sample(label: &str, count: u64, seed: u64) -> PyResult<Vec<Option<String>>> {
    let s = Corpus::v1().get(label).map_err(err)?;
    let mut rng = kolmoverify::rng::derived_rng(seed, &[0x73_616d_706c_6573]);
    (0..count).map(|_| s.sample_with(&mut rng).map(|o| outcome_str(&o)).map_err(err)).collect()
}

/// Default verifier parameters (`alpha`, `s`, ...) for the given security
/// settings.
#[pyfunction]
#[pyo3(signature = (n, c, eps, t=20))]
fn ver_config<'py>(py: Python<'py>, n: u32, c: f64, eps: f64, t: u32) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &VerConfig::defaults(n, c, eps, t, Flavor::Classical).map_err(err)?)
}

/// Runs a verifier on explicit samples against a corpus target and returns
/// the verdict as a dict.
#[pyfunction]
#[pyo3(signature = (samples, target, verifier="ver", n=None, c=1.0, eps=0.25, t=None, m_oracle="exact", approx="exact", nonce=0))]
#[allow(clippy::too_many_arguments)]
fn verify<'py>(
    py: Python<'py>,
    samples: Vec<Option<String>>,
    target: &str,
    verifier: &str,
    n: Option<u32>,
    c: f64,
    eps: f64,
    t: Option<u32>,
    m_oracle: &str,
    approx: &str,
    nonce: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let samples: Vec<VmOutcome> = samples.iter().map(|s| outcome(s.as_deref())).collect::<PyResult<_>>()?;
    let corpus = Corpus::v1();
    let tgt = corpus.get(target).map_err(err)?;
    let m_spec = m_oracle.parse().map_err(err)?;
    let a_spec = approx.parse().map_err(err)?;
    let verdict = match verifier {
        "ver" | "ver-star" => {
            let t = t.unwrap_or(20);
            let cfg = VerConfig::defaults(n.unwrap_or(4), c, eps, t, Flavor::Classical).map_err(err)?;
            let mo = make_oracle(OracleTarget::Ukt { t }, m_spec).map_err(err)?;
            let ao = make_oracle(OracleTarget::ProbabilityOf(tgt.clone()), a_spec).map_err(err)?;
            if verifier == "ver" {
                ver(&samples, &tgt, &cfg, &mo, &ao, nonce)
            } else {
                ver_star(&samples, &tgt, &cfg, &mo, &ao, nonce)
            }
        }
        "qas" => {
            let t_c = match t.or(corpus.descriptor(target).map_err(err)?.classical_budget) {
                Some(t) => t,
                None => return Err(PyValueError::new_err(format!("`{target}` names no classical budget; pass t"))),
            };
            let cfg = QasConfigV { n: n.unwrap_or(samples.len() as u32), c, m: tgt.budget.m };
            let mc = make_oracle(OracleTarget::Ukt { t: t_c }, m_spec).map_err(err)?;
            let mq = make_oracle(OracleTarget::Qukt { t: tgt.budget.t }, a_spec).map_err(err)?;
            qas_verify(&samples, &cfg, &mc, &mq, nonce)
        }
        other => return Err(PyValueError::new_err(format!("unknown verifier `{other}`; use ver, ver-star or qas"))),
    }
    .map_err(err)?;
    to_py(py, &verdict)
}

#[pyfunction]
fn experiment_ids() -> Vec<String> {
    experiments::experiment_ids().map(str::to_string).collect()
}

/// Runs an experiment and returns its report as a dict. `params` overrides
/// the defaults; unknown keys raise.
#[pyfunction]
#[pyo3(signature = (id, params=None, seed=0))]
fn run_experiment<'py>(py: Python<'py>, id: &str, params: Option<&Bound<'py, PyAny>>, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let overrides: BTreeMap<String, serde_json::Value> = match params {
        None => BTreeMap::new(),
        Some(p) => match from_py(p)? {
            serde_json::Value::Object(m) => m.into_iter().collect(),
            _ => return Err(PyValueError::new_err("params must be a dict")),
        },
    };
    let report = py
        .detach(|| experiments::run_experiment(id, &overrides, RunOptions { seed, timestamps: false }))
        .map_err(err)?;
    to_py(py, &report)
}

/// Recomputed golden constants next to the frozen ones.
#[pyfunction]
fn golden_check<'py>(py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
    let frozen = Goldens::shipped().map_err(err)?;
    let fresh = py.detach(Goldens::compute).map_err(err)?;
    let drift = frozen.drift(&fresh);
    to_py(py, &serde_json::json!({"frozen": frozen, "computed": fresh, "drift": drift}))
}

#[pymodule]
fn kolmoverify_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(ukt, m)?)?;
    m.add_function(wrap_pyfunction!(qukt, m)?)?;
    m.add_function(wrap_pyfunction!(universal_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(corpus_labels, m)?)?;
    m.add_function(wrap_pyfunction!(distribution, m)?)?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(ver_config, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(experiment_ids, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(golden_check, m)?)?;
    Ok(())
}
