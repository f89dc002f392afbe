// Copyright 2026 the Kolmoverify Authors
// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use proptest::prelude::*;
use serde_json::json;

use kolmoverify::bitvm::{run_vm, VmBudget};
use kolmoverify::experiments::{self, overrides, ExperimentReport, RunOptions};
use kolmoverify::io::SamplesFile;
use kolmoverify::samplers::Corpus;
use kolmoverify::verify::{make_oracle, ver, ver_star, OracleTarget, VerConfig};
use kolmoverify::{ukt, BitTape, Error, Flavor, VmOutcome};

/// -log2 of the fraction of all 2^t tapes on which the machine prints `x`.
fn brute_ukt(x: &BitTape, budget: &VmBudget) -> f64 {
    let hits = (0..1u64 << budget.t)
        .filter(|&code| run_vm(&BitTape::from_u64(code, budget.t as usize), budget).unwrap() == VmOutcome::Bits(x.clone()))
        .count();
    if hits == 0 {
        f64::INFINITY
    } else {
        budget.t as f64 - (hits as f64).log2()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn complexity_matches_tape_count(t in 4u32..=14, m in 1u32..=3, v in 0u64..8) {
        let budget = VmBudget::new(4, t, m).unwrap();
        let x = BitTape::from_u64(v % (1 << m), m as usize);
        let fast = ukt(&x, &budget).unwrap();
        let slow = brute_ukt(&x, &budget);
        prop_assert!(fast == slow || (fast - slow).abs() < 1e-12, "{fast} vs {slow}");
    }
}

fn exact_oracles(label: &str, t: u32) -> (kolmoverify::ComplexityOracle, kolmoverify::ComplexityOracle) {
    let target = Corpus::v1().get(label).unwrap();
    (
        make_oracle(OracleTarget::Ukt { t }, Default::default()).unwrap(),
        make_oracle(OracleTarget::ProbabilityOf(target), Default::default()).unwrap(),
    )
}

#[test]
fn samples_file_round_trip_feeds_the_verifier() {
    let corpus = Corpus::v1();
    let target = corpus.get("uniform4").unwrap();
    let cfg = VerConfig::defaults(4, 1.0, 0.25, 20, Flavor::Classical).unwrap();
    let samples: Vec<VmOutcome> = (0..cfg.s).map(|i| target.sample(i).unwrap()).collect();
    let text = SamplesFile::single(4, samples.clone()).render();
    let back = SamplesFile::parse(&text).unwrap().flatten();
    assert_eq!(back, samples);
    let (m, a) = exact_oracles("uniform4", 20);
    assert!(ver(&back, &target, &cfg, &m, &a, 0).unwrap().accepted);

    let fake = corpus.get("uniform4-prg1").unwrap();
    let forged: Vec<VmOutcome> = (0..cfg.s).map(|i| fake.sample(i).unwrap()).collect();
    assert!(!ver(&forged, &target, &cfg, &m, &a, 0).unwrap().accepted);
}

#[test]
fn verifier_rejects_malformed_inputs() {
    let target = Corpus::v1().get("uniform4").unwrap();
    let cfg = VerConfig::defaults(4, 1.0, 0.25, 20, Flavor::Classical).unwrap();
    let (m, a) = exact_oracles("uniform4", 20);
    let short: Vec<VmOutcome> = (0..10).map(|i| target.sample(i).unwrap()).collect();
    assert!(matches!(ver(&short, &target, &cfg, &m, &a, 0), Err(Error::WrongArity { .. })));
    assert!(matches!(ver_star(&short, &target, &cfg, &m, &a, 0), Err(Error::WrongArity { .. })));

    let narrow = vec![VmOutcome::Bits("01".parse().unwrap()); cfg.s as usize];
    assert!(matches!(ver(&narrow, &target, &cfg, &m, &a, 0), Err(Error::LengthMismatch { .. })));

    let (_, other) = exact_oracles("uniform1", 20);
    let good: Vec<VmOutcome> = (0..cfg.s).map(|i| target.sample(i).unwrap()).collect();
    assert!(matches!(ver(&good, &target, &cfg, &m, &other, 0), Err(Error::OracleMismatch(_))));
    let (wrong_t, _) = exact_oracles("uniform4", 16);
    assert!(matches!(ver(&good, &target, &cfg, &wrong_t, &a, 0), Err(Error::OracleMismatch(_))));
}

#[test]
fn reports_round_trip_and_recheck() {
    let quick: BTreeMap<&str, BTreeMap<String, serde_json::Value>> = [
        ("fannes", overrides([("pairs", json!(40))])),
        ("marginal", overrides([("random_joints", json!(1))])),
        ("qas-verify", overrides([("trials", json!(20)), ("member_trials", json!(1))])),
        ("embedding", BTreeMap::new()),
        ("normalization", overrides([("t", json!([8])), ("m", json!([1, 2]))])),
    ]
    .into_iter()
    .collect();
    for (id, ov) in quick {
        let r = experiments::run_experiment(id, &ov, RunOptions { seed: 3, timestamps: true }).unwrap();
        assert!(r.runtime_ms.is_some());
        assert!(r.recheck(), "{id}");
        let back = ExperimentReport::from_json(&r.to_json()).unwrap();
        assert_eq!(back.to_json(), r.to_json(), "{id}");
        let csv = r.to_csv();
        assert_eq!(csv.lines().count(), r.rows.len() + 1, "{id}");
    }
}

#[test]
fn seeds_change_sampled_results() {
    let ov = overrides([("pairs", json!(60))]);
    let a = experiments::run_experiment("fannes", &ov, RunOptions { seed: 1, timestamps: false }).unwrap();
    let b = experiments::run_experiment("fannes", &ov, RunOptions { seed: 2, timestamps: false }).unwrap();
    assert_ne!(a.to_json(), b.to_json());
}
