// Copyright 2026 the Kolmoverify Authors
// SPDX-License-Identifier: Apache-2.0

//! Seeded, repeatable experiments with machine-readable reports.
//!
//! Each experiment returns rows of the form `statistic cmp bound`. Sampled
//! rows carry a Wilson interval at [`Z_SIGMA`] and are judged on the
//! interval; exact rows are judged on the statistic with [`LINK_TOL`] slack
//! for float logarithms.

pub mod goldens;
mod theory;
mod verification;

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::io::csv_field;
use crate::stats::{wilson_interval, Z_SIGMA};

/// Relative slack for exact rows whose sides pass through `f64` logarithms.
pub const LINK_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cmp {
    /// `stat <= bound` (sampled: the interval reaches down to the bound).
    Le,
    /// `stat >= bound` (sampled: the interval reaches up to the bound).
    Ge,
    /// Bit-for-bit equality.
    Eq,
    /// `stat > bound` (sampled: the whole interval lies above the bound).
    Exceeds,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub param: String,
    #[serde(with = "crate::extreal::json")]
    pub stat: f64,
    #[serde(with = "crate::extreal::json")]
    pub bound: f64,
    pub cmp: Cmp,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ci: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub successes: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    pub pass: bool,
}

fn slack(bound: f64) -> f64 {
    if bound.is_finite() {
        LINK_TOL * bound.abs().max(1.0)
    } else {
        0.0
    }
}

impl Row {
    fn exact(param: impl Into<String>, stat: f64, bound: f64, cmp: Cmp) -> Self {
        let mut r = Row { param: param.into(), stat, bound, cmp, ci: None, successes: None, trials: None, pass: false };
        r.pass = r.judge();
        r
    }

    pub fn le(param: impl Into<String>, stat: f64, bound: f64) -> Self {
        Self::exact(param, stat, bound, Cmp::Le)
    }

    pub fn ge(param: impl Into<String>, stat: f64, bound: f64) -> Self {
        Self::exact(param, stat, bound, Cmp::Ge)
    }

    pub fn eq(param: impl Into<String>, stat: f64, bound: f64) -> Self {
        Self::exact(param, stat, bound, Cmp::Eq)
    }

    pub fn exceeds(param: impl Into<String>, stat: f64, bound: f64) -> Self {
        Self::exact(param, stat, bound, Cmp::Exceeds)
    }

    /// A sampled rate with its Wilson interval.
    pub fn rate(param: impl Into<String>, successes: u64, trials: u64, bound: f64, cmp: Cmp) -> Self {
        let (lo, hi) = wilson_interval(successes, trials, Z_SIGMA);
        let stat = if trials == 0 { f64::NAN } else { successes as f64 / trials as f64 };
        let mut r = Row {
            param: param.into(),
            stat,
            bound,
            cmp,
            ci: Some([lo, hi]),
            successes: Some(successes),
            trials: Some(trials),
            pass: false,
        };
        r.pass = r.judge();
        r
    }

    /// Recomputes the verdict from the statistic, bound and interval.
    pub fn judge(&self) -> bool {
        if self.stat.is_nan() || self.bound.is_nan() {
            return false;
        }
        match (self.cmp, self.ci) {
            (Cmp::Le, Some([lo, _])) => lo <= self.bound,
            (Cmp::Ge, Some([_, hi])) => hi >= self.bound,
            (Cmp::Exceeds, Some([lo, _])) => lo > self.bound,
            (Cmp::Le, None) => self.stat <= self.bound + slack(self.bound),
            (Cmp::Ge, None) => self.stat >= self.bound - slack(self.bound),
            (Cmp::Exceeds, None) => self.stat > self.bound,
            (Cmp::Eq, _) => self.stat == self.bound,
        }
    }
}

/// What an experiment body produces.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub trials: u64,
    pub rows: Vec<Row>,
    pub observed: serde_json::Map<String, Value>,
}

impl Outcome {
    fn note(&mut self, key: &str, v: impl Serialize) {
        self.observed.insert(key.to_string(), serde_json::to_value(v).expect("observations serialize"));
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment_id: String,
    pub parameters: BTreeMap<String, Value>,
    pub trials: u64,
    pub rows: Vec<Row>,
    pub observed: serde_json::Map<String, Value>,
    pub pass: bool,
    /// Omitted in no-timestamp mode so reports are byte-stable.
    pub runtime_ms: Option<u64>,
    pub seed: u64,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Whether `pass` agrees with every row's recomputed verdict.
    pub fn recheck(&self) -> bool {
        self.rows.iter().all(|r| r.pass == r.judge()) && self.pass == (!self.rows.is_empty() && self.rows.iter().all(|r| r.pass))
    }

    pub fn failing_rows(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| !r.pass)
    }

    /// Rows without the header line.
    pub fn csv_rows(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                csv_field(&self.experiment_id),
                csv_field(&r.param),
                fmt_num(r.stat),
                fmt_num(r.bound),
                r.pass
            ));
        }
        out
    }

    pub fn to_csv(&self) -> String {
        format!("{CSV_HEADER}\n{}", self.csv_rows())
    }
}

pub const CSV_HEADER: &str = "experiment,param,trial_stat,bound,pass";

fn fmt_num(v: f64) -> String {
    match crate::extreal::json::to_value(v) {
        Value::String(s) => s,
        other => other.to_string(),
    }
}

/// Resolved experiment parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Params(BTreeMap<String, Value>);

impl Params {
    fn from_defaults(v: Value) -> Self {
        match v {
            Value::Object(m) => Params(m.into_iter().collect()),
            _ => unreachable!("defaults are objects"),
        }
    }

    fn raw(&self, key: &str) -> &Value {
        self.0.get(key).unwrap_or_else(|| panic!("experiment reads undeclared parameter `{key}`"))
    }

    fn bad(&self, key: &str, want: &str) -> Error {
        Error::InvalidArgument(format!("parameter `{key}` must be {want}, got {}", self.raw(key)))
    }

    pub fn u64(&self, key: &str) -> Result<u64> {
        self.raw(key).as_u64().ok_or_else(|| self.bad(key, "a nonnegative integer"))
    }

    pub fn u32(&self, key: &str) -> Result<u32> {
        self.u64(key)?.try_into().map_err(|_| self.bad(key, "a 32-bit integer"))
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        self.raw(key).as_f64().ok_or_else(|| self.bad(key, "a number"))
    }

    pub fn str(&self, key: &str) -> Result<&str> {
        self.raw(key).as_str().ok_or_else(|| self.bad(key, "a string"))
    }

    /// A list parameter; a scalar is read as a one-element list.
    fn list<T>(&self, key: &str, want: &str, f: impl Fn(&Value) -> Option<T>) -> Result<Vec<T>> {
        match self.raw(key) {
            Value::Array(a) => a.iter().map(|v| f(v).ok_or_else(|| self.bad(key, want))).collect(),
            v => f(v).map(|x| vec![x]).ok_or_else(|| self.bad(key, want)),
        }
    }

    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>> {
        self.list(key, "a number or list of numbers", Value::as_f64)
    }

    pub fn u32_list(&self, key: &str) -> Result<Vec<u32>> {
        self.list(key, "an integer or list of integers", |v| v.as_u64().and_then(|x| x.try_into().ok()))
    }

    pub fn str_list(&self, key: &str) -> Result<Vec<String>> {
        self.list(key, "a string or list of strings", |v| v.as_str().map(str::to_string))
    }

    pub fn as_map(&self) -> &BTreeMap<String, Value> {
        &self.0
    }
}

/// Parses a command-line value: JSON when it parses, otherwise a string.
/// A comma-separated list becomes an array.
pub fn parse_param_value(s: &str) -> Value {
    if let Ok(v) = serde_json::from_str::<Value>(s) {
        return v;
    }
    if s.contains(',') {
        return Value::Array(s.split(',').map(|p| parse_param_value(p.trim())).collect());
    }
    Value::String(s.to_string())
}

type Runner = fn(&Params, u64) -> Result<Outcome>;

/// One registry entry.
pub struct ExperimentDef {
    pub id: &'static str,
    pub summary: &'static str,
    defaults: fn() -> Value,
}

impl ExperimentDef {
    pub fn defaults(&self) -> Value {
        (self.defaults)()
    }
}

pub static REGISTRY: &[ExperimentDef] = &[
    ExperimentDef { id: "normalization", summary: "Kraft sums and exact mass of the output distributions", defaults: theory::normalization_defaults },
    ExperimentDef { id: "coding", summary: "classical coding constant c_univ over the corpus", defaults: theory::coding_defaults },
    ExperimentDef { id: "coding-quantum", summary: "quantum coding constant c_q over the circuit corpus", defaults: theory::coding_quantum_defaults },
    ExperimentDef { id: "embedding", summary: "cost C_embed of running gate-free circuits on the quantum machine", defaults: theory::embedding_defaults },
    ExperimentDef { id: "incompressibility", summary: "tail of complexity below -log2 p - alpha", defaults: theory::incompressibility_defaults },
    ExperimentDef { id: "marginal", summary: "every link of the marginal-distance chain on small exact joints", defaults: theory::marginal_defaults },
    ExperimentDef { id: "fannes", summary: "entropy continuity on random pairs", defaults: theory::fannes_defaults },
    ExperimentDef { id: "prg-stretch", summary: "entropy collapse and distance of seed-stretched samplers", defaults: theory::prg_stretch_defaults },
    ExperimentDef { id: "qas-gap", summary: "classical minus quantum complexity on toy QAS samples", defaults: verification::qas_gap_defaults },
    ExperimentDef { id: "qas-verify", summary: "QAS verifier on the toy QAS and on every classical sampler of the budget", defaults: verification::qas_verify_defaults },
    ExperimentDef { id: "curves", summary: "Ver acceptance rates of honest and adversarial samplers over a config grid", defaults: verification::curves_defaults },
    ExperimentDef { id: "one-sided-regression", summary: "estimator-aware adversary against one-sided and two-sided probability oracles", defaults: verification::one_sided_defaults },
    ExperimentDef { id: "amplification", summary: "Ver* honest acceptance and adversary rejection", defaults: verification::amplification_defaults },
    ExperimentDef { id: "far-close", summary: "far pair against a collision baseline and against Ver", defaults: verification::far_close_defaults },
];

fn implementation(id: &str) -> Option<Runner> {
    Some(match id {
        "normalization" => theory::normalization,
        "coding" => theory::coding,
        "coding-quantum" => theory::coding_quantum,
        "embedding" => theory::embedding,
        "incompressibility" => theory::incompressibility,
        "marginal" => theory::marginal,
        "fannes" => theory::fannes,
        "prg-stretch" => theory::prg_stretch_exp,
        "qas-gap" => verification::qas_gap,
        "qas-verify" => verification::qas_verify_exp,
        "curves" => verification::curves,
        "one-sided-regression" => verification::one_sided_regression,
        "amplification" => verification::amplification,
        "far-close" => verification::far_close,
        _ => return None,
    })
}

pub fn experiment_ids() -> impl Iterator<Item = &'static str> {
    REGISTRY.iter().map(|d| d.id)
}

fn lookup(id: &str) -> Result<&'static ExperimentDef> {
    REGISTRY.iter().find(|d| d.id == id).ok_or_else(|| Error::UnknownExperiment(id.to_string()))
}

/// All experiment ids with their parameter defaults. Fails if a registered
/// id has no implementation.
pub fn manifest() -> Result<Value> {
    let mut out = vec![];
    for d in REGISTRY {
        if implementation(d.id).is_none() {
            return Err(Error::UnknownExperiment(format!("{} is registered but not implemented", d.id)));
        }
        out.push(serde_json::json!({"id": d.id, "summary": d.summary, "defaults": d.defaults()}));
    }
    Ok(Value::Array(out))
}

/// Merges `overrides` into the defaults of `id`; unknown keys are errors.
pub fn resolve_params(id: &str, overrides: &BTreeMap<String, Value>) -> Result<Params> {
    let def = lookup(id)?;
    let mut p = Params::from_defaults(def.defaults());
    for (k, v) in overrides {
        match p.0.get_mut(k) {
            Some(slot) => *slot = v.clone(),
            None => {
                let known: Vec<&str> = p.0.keys().map(String::as_str).collect();
                return Err(Error::InvalidArgument(format!("experiment `{id}` has no parameter `{k}` (known: {})", known.join(", "))));
            }
        }
    }
    Ok(p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub seed: u64,
    /// Record wall-clock runtime in the report.
    pub timestamps: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { seed: 0, timestamps: true }
    }
}

pub fn run_experiment(id: &str, overrides: &BTreeMap<String, Value>, opts: RunOptions) -> Result<ExperimentReport> {
    let params = resolve_params(id, overrides)?;
    let run = implementation(id).ok_or_else(|| Error::UnknownExperiment(id.to_string()))?;
    let start = Instant::now();
    let out = run(&params, opts.seed)?;
    let pass = !out.rows.is_empty() && out.rows.iter().all(|r| r.pass);
    Ok(ExperimentReport {
        experiment_id: id.to_string(),
        parameters: params.0,
        trials: out.trials,
        rows: out.rows,
        observed: out.observed,
        pass,
        runtime_ms: opts.timestamps.then(|| start.elapsed().as_millis() as u64),
        seed: opts.seed,
    })
}

/// Shorthand for a single override.
pub fn overrides<const N: usize>(pairs: [(&str, Value); N]) -> BTreeMap<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_judge_by_interval() {
        assert!(Row::rate("x", 0, 100, 0.01, Cmp::Le).pass);
        assert!(!Row::rate("x", 50, 100, 0.1, Cmp::Le).pass);
        assert!(Row::rate("x", 99, 100, 0.999, Cmp::Ge).pass);
        assert!(Row::rate("x", 100, 100, 0.75, Cmp::Exceeds).pass);
        assert!(!Row::rate("x", 76, 100, 0.75, Cmp::Exceeds).pass);
        assert!(Row::le("x", 1.0 + 1e-12, 1.0).pass);
        assert!(!Row::le("x", 1.0 + 1e-6, 1.0).pass);
        assert!(Row::le("x", f64::INFINITY, f64::INFINITY).pass);
        assert!(!Row::eq("x", 1.0, f64::NAN).pass);
    }

    #[test]
    fn param_values_parse() {
        assert_eq!(parse_param_value("20"), serde_json::json!(20));
        assert_eq!(parse_param_value("uniform8"), serde_json::json!("uniform8"));
        assert_eq!(parse_param_value("2,4,6"), serde_json::json!([2, 4, 6]));
        assert_eq!(parse_param_value("[0.25,0.5]"), serde_json::json!([0.25, 0.5]));
    }

    #[test]
    fn manifest_covers_the_registry() {
        let m = manifest().unwrap();
        assert_eq!(m.as_array().unwrap().len(), REGISTRY.len());
        for d in REGISTRY {
            assert!(d.defaults().is_object(), "{}", d.id);
        }
    }

    #[test]
    fn unknown_ids_and_keys_are_errors() {
        assert!(matches!(run_experiment("nosuch", &BTreeMap::new(), RunOptions::default()), Err(Error::UnknownExperiment(_))));
        let bad = overrides([("nosuch", serde_json::json!(1))]);
        assert!(matches!(resolve_params("coding", &bad), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn reports_roundtrip_and_recheck() {
        let r = ExperimentReport {
            experiment_id: "demo".into(),
            parameters: BTreeMap::new(),
            trials: 10,
            rows: vec![Row::rate("a", 9, 10, 0.5, Cmp::Ge), Row::le("b", f64::INFINITY, f64::INFINITY)],
            observed: Default::default(),
            pass: true,
            runtime_ms: None,
            seed: 3,
        };
        assert!(r.recheck());
        let back = ExperimentReport::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(r.to_csv().starts_with("experiment,param,trial_stat,bound,pass\ndemo,a,0.9,0.5,true\ndemo,b,inf,inf,true"));
        let mut forged = r.clone();
        forged.rows[0].stat = 0.1;
        forged.rows[0].ci = Some([0.0, 0.2]);
        assert!(!forged.recheck());
    }
}
