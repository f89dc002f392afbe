// Copyright 2026 the Kolmoverify Authors
// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines are always printed. Every
//! criterion is evaluated at full strength. The process fails when a
//! criterion's outcome differs from `EXPECTED_FAILURES`: an unexpected FAIL,
//! or a listed criterion that starts passing. With `KOLMOVERIFY_STRICT=1`
//! any FAIL fails the process.
//!
//! Pass criterion numbers as arguments to run a subset, e.g.
//! `cargo test --test acceptance -- 2 8`.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_traits::One;
use serde_json::{json, Value};

use kolmoverify::bitvm::{universal_distribution, Mode, VmBudget};
use kolmoverify::experiments::{self, goldens::Goldens, overrides, ExperimentReport, RunOptions};
use kolmoverify::samplers::Corpus;
use kolmoverify::verify::{make_oracle, ver, OracleTarget, VerConfig};
use kolmoverify::{Flavor, Result, VmOutcome};

const SEED: u64 = 20_260_101;

/// Criteria known to fail at full strength. 8: the entropy-distance bound in
/// its stated form has counterexamples on small outcome spaces, and the
/// stretch bound built from it fails for short seeds.
const EXPECTED_FAILURES: &[u32] = &[8];

struct Check {
    pass: bool,
    detail: String,
}

impl Check {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }

    fn and(self, other: Check) -> Check {
        Check::new(self.pass && other.pass, format!("{}; {}", self.detail, other.detail))
    }
}

fn run(id: &str, ov: BTreeMap<String, Value>) -> Result<ExperimentReport> {
    experiments::run_experiment(id, &ov, RunOptions { seed: SEED, timestamps: false })
}

/// Pass flag plus a short account of the failing rows.
fn report_check(r: &ExperimentReport) -> Check {
    let failing: Vec<String> = r
        .failing_rows()
        .take(4)
        .map(|row| format!("[{}: {} {:?} {}]", row.param, row.stat, row.cmp, row.bound))
        .collect();
    let n_fail = r.failing_rows().count();
    let mut detail = format!("{}: {}/{} rows hold", r.experiment_id, r.rows.len() - n_fail, r.rows.len());
    if n_fail > 0 {
        detail.push_str(&format!(", failing {}", failing.join(" ")));
        if n_fail > failing.len() {
            detail.push_str(" ...");
        }
    }
    Check::new(r.pass && r.recheck(), detail)
}

fn c1() -> Result<Check> {
    let t: Vec<u32> = (1..=20).collect();
    let r = run("normalization", overrides([("t", json!(t))]))?;
    let mut check = report_check(&r);
    // Exact tallies are dyadic: the counts over 2^t tapes add up to 2^t.
    let mut exact_ok = true;
    for t in [4, 12, 20] {
        for m in 1..=4 {
            let d = universal_distribution(&VmBudget::new(4, t, m)?, Mode::Exact)?;
            exact_ok &= d.to_exact().total_mass().is_one();
        }
    }
    check = check.and(Check::new(exact_ok, format!("dyadic tallies exact: {exact_ok}")));
    Ok(check)
}

fn c2() -> Result<Check> {
    let golden = Goldens::shipped()?;
    let a = run("coding", BTreeMap::new())?;
    let b = run("coding", BTreeMap::new())?;
    let qa = run("coding-quantum", BTreeMap::new())?;
    let qb = run("coding-quantum", BTreeMap::new())?;
    let c_univ = a.observed["c_univ"].as_f64();
    let c_q = qa.observed["c_q"].as_f64();
    let stable = a.observed["c_univ"] == b.observed["c_univ"] && qa.observed["c_q"] == qb.observed["c_q"];
    let exact = c_univ.is_some_and(|c| c.is_finite() && golden.c_univ.map(f64::to_bits) == Some(c.to_bits()))
        && c_q.is_some_and(|c| c.is_finite() && golden.c_q.map(f64::to_bits) == Some(c.to_bits()));
    Ok(report_check(&a).and(report_check(&qa)).and(Check::new(
        stable && exact,
        format!("c_univ={c_univ:?} c_q={c_q:?} golden ({:?}, {:?}) rerun-stable={stable}", golden.c_univ, golden.c_q),
    )))
}

fn c3() -> Result<Check> {
    let r = run("incompressibility", BTreeMap::new())?;
    let shape = r.parameters["alpha"] == json!([2, 4, 6]) && r.parameters["trials"] == json!(100_000) && r.parameters["sampler"] == json!("all");
    Ok(report_check(&r).and(Check::new(shape, format!("alpha {} trials {}", r.parameters["alpha"], r.parameters["trials"]))))
}

fn c4() -> Result<Check> {
    let r = run("marginal", BTreeMap::new())?;
    let joints = r.observed["joint_count"].as_u64().unwrap_or(0);
    Ok(report_check(&r).and(Check::new(joints >= 20, format!("{joints} joints"))))
}

fn c5() -> Result<Check> {
    let r = run("curves", BTreeMap::new())?;
    let judged = r.rows.iter().filter(|row| row.param.contains(" posing as ")).count();
    let grid = r.parameters["n"] == json!([4, 8]) && r.parameters["eps"] == json!([0.25, 0.5]) && r.parameters["trials"] == json!(2000);
    Ok(report_check(&r).and(Check::new(grid, format!("{judged} adversary rows at n {} eps {}", r.parameters["n"], r.parameters["eps"]))))
}

fn c6() -> Result<Check> {
    let r = run("one-sided-regression", BTreeMap::new())?;
    let violation = r.rows.iter().any(|row| row.param.contains("two-sided probability oracle") && row.pass);
    Ok(report_check(&r).and(Check::new(violation, format!("two-sided oracle exceeds the bound: {violation}"))))
}

fn c7() -> Result<Check> {
    Ok(report_check(&run("amplification", BTreeMap::new())?))
}

fn c8() -> Result<Check> {
    let f = run("fannes", BTreeMap::new())?;
    let p = run("prg-stretch", BTreeMap::new())?;
    let by_m = f.observed.get("one_over_e_violations_by_m").cloned().unwrap_or(Value::Null);
    Ok(report_check(&f).and(Check::new(true, format!("stated-form violations by m {by_m}"))).and(report_check(&p)))
}

fn c9() -> Result<Check> {
    Ok(report_check(&run("qas-verify", BTreeMap::new())?))
}

/// Small settings so every experiment runs twice within the time limit.
fn quick(id: &str) -> BTreeMap<String, Value> {
    match id {
        "incompressibility" => overrides([("trials", json!(2000))]),
        "marginal" => overrides([("random_joints", json!(3))]),
        "fannes" => overrides([("pairs", json!(100))]),
        "qas-gap" => overrides([("trials", json!(300))]),
        "qas-verify" => overrides([("trials", json!(40)), ("member_trials", json!(2))]),
        "curves" => overrides([("trials", json!(30)), ("n", json!([4])), ("eps", json!([0.5]))]),
        "one-sided-regression" | "amplification" => overrides([("trials", json!(40))]),
        "far-close" => overrides([("trials", json!(30)), ("baseline_samples", json!(60))]),
        _ => BTreeMap::new(),
    }
}

fn c10() -> Result<Check> {
    let mut differing = vec![];
    let ids: Vec<&str> = experiments::experiment_ids().collect();
    for id in &ids {
        let a = run(id, quick(id))?.to_json();
        let b = run(id, quick(id))?.to_json();
        if a != b {
            differing.push(id.to_string());
        }
    }
    let target = Corpus::v1().get("uniform4")?;
    let cfg = VerConfig::defaults(4, 1.0, 0.25, 20, Flavor::Classical)?;
    let verdict = || -> Result<String> {
        let samples: Vec<VmOutcome> = (0..cfg.s).map(|i| target.sample(SEED ^ i)).collect::<Result<_>>()?;
        let m = make_oracle(OracleTarget::Ukt { t: 20 }, "two-sided:0.1@3".parse()?)?;
        let a = make_oracle(OracleTarget::ProbabilityOf(target.clone()), "one-sided:0.1@4".parse()?)?;
        Ok(serde_json::to_string(&ver(&samples, &target, &cfg, &m, &a, SEED)?)?)
    };
    if verdict()? != verdict()? {
        differing.push("ver".into());
    }
    Ok(Check::new(
        differing.is_empty(),
        format!("{} experiments and one verification rerun; differing: {differing:?}", ids.len()),
    ))
}

type Criterion = (u32, &'static str, u64, fn() -> Result<Check>);

const CRITERIA: &[Criterion] = &[
    (1, "subprobability and normalization", 60, c1),
    (2, "coding constants match the frozen goldens", 300, c2),
    (3, "incompressibility tails", 300, c3),
    (4, "marginal distance chain", 120, c4),
    (5, "Ver correctness and security", 600, c5),
    (6, "one-sided oracle is load-bearing", 120, c6),
    (7, "Ver* amplification", 600, c7),
    (8, "entropy-distance bound and seed-stretch attack", 120, c8),
    (9, "QAS verifier", 600, c9),
    (10, "byte-identical reruns", 60, c10),
];

fn main() {
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let strict = std::env::var("KOLMOVERIFY_STRICT").is_ok_and(|v| v == "1");
    let mut unexpected = vec![];
    for &(id, name, limit, f) in CRITERIA {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let check = f().unwrap_or_else(|e| Check::new(false, format!("error: {e}")));
        let took = start.elapsed();
        let in_time = took <= Duration::from_secs(limit);
        let pass = check.pass && in_time;
        let time_note = if in_time { String::new() } else { format!(" over the {limit}s limit;") };
        println!(
            "criterion {id:>2} {}: {name} ({:.2}s){time_note} {}",
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            check.detail
        );
        let expected_fail = EXPECTED_FAILURES.contains(&id) && !strict;
        if pass == expected_fail {
            unexpected.push(id);
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: outcomes as expected (expected failures: {EXPECTED_FAILURES:?}, strict: {strict})");
    } else {
        println!("acceptance: unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
