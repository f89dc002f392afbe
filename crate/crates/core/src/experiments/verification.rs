// Copyright 2026 the Kolmoverify Authors
// SPDX-License-Identifier: Apache-2.0

//! Experiments that run the verifiers against honest and adversarial
//! samplers.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::ToPrimitive;
use serde_json::{json, Value};

use super::theory::{label_stream, quk, uk};
use super::{Cmp, Outcome, Params, Row};
use crate::bitvm::{assemble_str, VmBudget, VmOutcome};
use crate::dist::{tv_distance, ExplicitDistribution, Histogram, JointDistribution};
use crate::error::{Error, Result};
use crate::joint::Flavor;
use crate::rng::{derive_seed, derived_rng};
use crate::samplers::{classical_family, far_close_pair, toy_qas, Corpus, DescribedSampler, TupleAdversary, TupleStrategy};
use crate::stats::{binomial_upper_tail, Categorical};
use crate::verify::{
    collision_baseline, make_oracle, qas_verify, ver_histogram, ver_star_blocks, ComplexityOracle, OracleSpec, OracleTarget,
    QasConfigV, VerConfig,
};

fn o(s: &str) -> VmOutcome {
    s.parse().expect("literal outcomes parse")
}

/// Exact distance between the adversary's marginal and the target.
fn adversary_delta(target: &DescribedSampler, adv: &TupleAdversary, s: u64) -> Result<f64> {
    if let TupleStrategy::Iid(a) = &adv.strategy {
        if let (Some(p), Some(q)) = (target.exact_distribution()?, a.exact_distribution()?) {
            return Ok(tv_distance(p, q).to_f64().unwrap_or(f64::NAN));
        }
    }
    Ok(tv_distance(target.distribution()?, &adv.marginal(s)?))
}

struct Oracles {
    m: ComplexityOracle,
    approx: ComplexityOracle,
}

fn oracles(target: &Arc<DescribedSampler>, cfg: &VerConfig, approx: &OracleSpec) -> Result<Oracles> {
    Ok(Oracles {
        m: ComplexityOracle::exact(OracleTarget::Ukt { t: cfg.t }),
        approx: make_oracle(OracleTarget::ProbabilityOf(target.clone()), *approx)?,
    })
}

/// Ver acceptances out of `trials` tuples drawn from `adv`.
fn ver_acceptances(
    target: &DescribedSampler,
    adv: &TupleAdversary,
    cfg: &VerConfig,
    or: &Oracles,
    trials: u64,
    seed: u64,
    stream: &str,
) -> Result<u64> {
    let mut rng = derived_rng(seed, &[label_stream(stream)]);
    let mut accepted = 0;
    for i in 0..trials {
        let h = adv.sample_histogram(cfg.s, &mut rng)?;
        accepted += ver_histogram(&h, target, cfg, &or.m, &or.approx, i)?.accepted as u64;
    }
    Ok(accepted)
}

pub(super) fn curves_defaults() -> Value {
    json!({
        "n": [4, 8],
        "c": 1.0,
        "eps": [0.25, 0.5],
        "T": 20,
        "trials": 2000,
        "approx": "exact",
        "targets": ["emit01", "ones4", "tail-m2", "free-m1", "free-m2", "pre01-m4", "uniform1", "uniform4", "biased2"],
    })
}

/// The shipped adversaries, each with the target it impersonates.
fn shipped_adversaries() -> Result<Vec<(&'static str, TupleAdversary)>> {
    let c = Corpus::v1();
    let iid = |l: &str| -> Result<TupleAdversary> { Ok(TupleAdversary::iid(c.get(l)?)) };
    let swap = JointDistribution::from_entries(2, [(vec![o("0000"), o("1111")], 0.5), (vec![o("1111"), o("0000")], 0.5)])?;
    let anti = JointDistribution::from_entries(2, [(vec![o("0"), o("1")], 0.5), (vec![o("1"), o("0")], 0.5)])?;
    Ok(vec![
        ("uniform4", iid("uniform4-prg1")?),
        ("uniform4", iid("uniform4-prg2")?),
        ("uniform1", iid("uniform1-prg0")?),
        ("biased2", iid("tail-m2")?),
        ("free-m2", iid("tail-m2")?),
        ("tail-m2", iid("free-m2")?),
        ("uniform4", TupleAdversary { label: "swap-0000-1111".into(), strategy: TupleStrategy::Correlated(swap), m: 4 }),
        ("uniform1", TupleAdversary { label: "anti-correlated-bits".into(), strategy: TupleStrategy::Correlated(anti), m: 1 }),
        (
            "biased2",
            TupleAdversary {
                label: "shared-emit0".into(),
                strategy: TupleStrategy::ProgramBacked {
                    prefix: assemble_str("0")?,
                    budget: VmBudget::new(4, 20, 2)?,
                    shared_opcodes: 2,
                },
                m: 2,
            },
        ),
    ])
}

pub(super) fn curves(p: &Params, seed: u64) -> Result<Outcome> {
    let (c, t, trials) = (p.f64("c")?, p.u32("T")?, p.u64("trials")?);
    let approx: OracleSpec = p.str("approx")?.parse()?;
    let corpus = Corpus::v1();
    let targets = p.str_list("targets")?;
    let adversaries = shipped_adversaries()?;
    let mut out = Outcome::default();
    let mut skipped = vec![];
    let mut deltas = BTreeMap::new();
    for &n in &p.u32_list("n")? {
        for &eps in &p.f64_list("eps")? {
            let cfg = VerConfig::defaults(n, c, eps, t, Flavor::Classical)?;
            let slack = cfg.correctness_slack();
            let grid = format!("n={n} eps={eps}");
            for label in &targets {
                let target = corpus.get(label)?;
                let or = oracles(&target, &cfg, &approx)?;
                let honest = TupleAdversary::iid(target.clone());
                let acc = ver_acceptances(&target, &honest, &cfg, &or, trials, seed, &format!("honest {label} {grid}"))?;
                out.rows.push(Row::rate(format!("honest {label} {grid}"), acc, trials, 1.0 - slack, Cmp::Ge));
                out.trials += trials;
                for (tl, adv) in adversaries.iter().filter(|(tl, _)| tl == label) {
                    let delta = adversary_delta(&target, adv, cfg.s)?;
                    deltas.insert(format!("{} vs {tl}", adv.label), delta);
                    let name = format!("{} posing as {tl} {grid}", adv.label);
                    if delta < eps {
                        skipped.push(format!("{name} (distance {delta:.4} below eps)"));
                        continue;
                    }
                    let acc = ver_acceptances(&target, adv, &cfg, &or, trials, seed, &name)?;
                    out.rows.push(Row::rate(name, acc, trials, 1.0 - eps + slack, Cmp::Le));
                    out.trials += trials;
                }
            }
            out.note(&format!("s at {grid}"), json!({"s": cfg.s, "alpha": cfg.alpha, "scaled": cfg.scaled}));
        }
    }
    out.note("adversary_distance", deltas);
    out.note("not_judged", skipped);
    Ok(out)
}

pub(super) fn one_sided_defaults() -> Value {
    json!({
        "target": "uniform4",
        "base": "uniform4-prg1",
        "n": 4,
        "c": 1.0,
        "eps": 0.5,
        "T": 20,
        "delta": 0.1,
        "oracle_seed": 7,
        "trials": 2000,
    })
}

pub(super) fn one_sided_regression(p: &Params, seed: u64) -> Result<Outcome> {
    let corpus = Corpus::v1();
    let (target, base) = (corpus.get(p.str("target")?)?, corpus.get(p.str("base")?)?);
    let (delta, oracle_seed, trials) = (p.f64("delta")?, p.u64("oracle_seed")?, p.u64("trials")?);
    let cfg = VerConfig::defaults(p.u32("n")?, p.f64("c")?, p.f64("eps")?, p.u32("T")?, Flavor::Classical)?;
    let bound = 1.0 - cfg.eps + cfg.correctness_slack();
    let adv = TupleAdversary {
        label: format!("{}-estimator-aware", base.label),
        strategy: TupleStrategy::EstimatorAware { base: base.clone(), oracle_seed, delta },
        m: base.budget.m,
    };
    let mut out = Outcome::default();
    let d = adversary_delta(&target, &TupleAdversary::iid(base.clone()), cfg.s)?;
    out.rows.push(Row::ge("distance of the base from the target", d, cfg.eps));
    let specs = [
        ("exact", "exact".to_string(), Cmp::Le),
        ("one-sided", format!("one-sided:{delta}@{oracle_seed}"), Cmp::Le),
        ("two-sided", format!("two-sided:{delta}@{oracle_seed}"), Cmp::Exceeds),
    ];
    for (name, spec, cmp) in specs {
        let or = oracles(&target, &cfg, &spec.parse()?)?;
        let acc = ver_acceptances(&target, &adv, &cfg, &or, trials, seed, &format!("{name} regression"))?;
        out.rows.push(Row::rate(format!("{} against {name} probability oracle", adv.label), acc, trials, bound, cmp));
        out.trials += trials;
    }
    out.note("security_bound", bound);
    out.note("s", cfg.s);
    Ok(out)
}

pub(super) fn amplification_defaults() -> Value {
    json!({"target": "uniform1", "adversary": "uniform1-prg0", "n": 4, "c": 1.0, "eps": 0.5, "T": 20, "trials": 2000})
}

pub(super) fn amplification(p: &Params, seed: u64) -> Result<Outcome> {
    let corpus = Corpus::v1();
    let target = corpus.get(p.str("target")?)?;
    let adv = TupleAdversary::iid(corpus.get(p.str("adversary")?)?);
    let trials = p.u64("trials")?;
    let cfg = VerConfig::defaults(p.u32("n")?, p.f64("c")?, p.f64("eps")?, p.u32("T")?, Flavor::Classical)?;
    let or = oracles(&target, &cfg, &OracleSpec::default())?;
    let blocks = cfg.star_blocks();
    let run = |who: &TupleAdversary, stream: &str| -> Result<u64> {
        let mut rng = derived_rng(seed, &[label_stream(stream)]);
        let mut acc = 0;
        for i in 0..trials {
            let hs: Vec<Histogram> = (0..blocks).map(|_| who.sample_histogram(cfg.s, &mut rng)).collect::<Result<_>>()?;
            acc += ver_star_blocks(&hs, &target, &cfg, &or.m, &or.approx, i)?.accepted as u64;
        }
        Ok(acc)
    };
    let mut out = Outcome { trials: 2 * trials, ..Default::default() };
    out.rows.push(Row::ge("adversary distance", adversary_delta(&target, &adv, cfg.s)?, cfg.eps));
    let honest = run(&TupleAdversary::iid(target.clone()), "honest")?;
    out.rows.push(Row::rate(format!("honest {} acceptance", target.label), honest, trials, 0.999, Cmp::Ge));
    let bad = run(&adv, "adversary")?;
    out.rows.push(Row::rate(
        format!("{} rejection", adv.label),
        trials - bad,
        trials,
        1.0 - cfg.correctness_slack(),
        Cmp::Ge,
    ));
    out.note("blocks", blocks);
    out.note("s", cfg.s);
    out.note("samples_per_run", blocks * cfg.s);
    Ok(out)
}

pub(super) fn qas_gap_defaults() -> Value {
    json!({"sampler": "qas6", "n": 16, "c": 1.05, "trials": 10_000, "thresholds": [0, 2, 4, 6, 8, 10, 12, 14, 16]})
}

/// A classical sampler that emits zeros, used as a negative control.
fn emit_control(t_c: u32, m: u32) -> Result<DescribedSampler> {
    DescribedSampler::classical_vm("emit-control", assemble_str("000D")?, VmBudget::new(4, t_c, m)?)
}

/// `uK^{t_c}(x) - quK^{t_q}(x)`; `None` when both are infinite.
fn gap(t_c: u32, t_q: u32, m: u32, x: &VmOutcome) -> Result<Option<f64>> {
    let (kc, kq) = (uk(t_c, m, x)?, quk(t_q, m, x)?);
    Ok((kc.is_finite() || kq.is_finite()).then_some(kc - kq))
}

fn gap_counts(h: &Histogram, t_c: u32, t_q: u32, m: u32) -> Result<Vec<(Option<f64>, u64)>> {
    h.iter().filter(|(x, _)| !x.is_bottom()).map(|(x, n)| Ok((gap(t_c, t_q, m, x)?, n))).collect()
}

fn above(gaps: &[(Option<f64>, u64)], thr: f64) -> u64 {
    gaps.iter().filter(|(g, _)| g.is_some_and(|g| g >= thr)).map(|(_, n)| n).sum()
}

pub(super) fn qas_gap(p: &Params, seed: u64) -> Result<Outcome> {
    let cfg = Corpus::v1().qas_config(p.str("sampler")?)?;
    let (n, c, trials) = (p.u32("n")?, p.f64("c")?, p.u64("trials")?);
    let thr = 3.0 * c * (n as f64).log2();
    let slack = (n as f64).powf(-c);
    let (qas, cert) = toy_qas(&cfg)?;
    let h = qas.categorical()?.sample_histogram(trials, &mut derived_rng(seed, &[label_stream("qas")]));
    let gaps = gap_counts(&h, cfg.t_c, cfg.t_q, cfg.m)?;
    let mut out = Outcome { trials: 2 * trials, ..Default::default() };
    out.rows.push(Row::rate(format!("fraction with gap >= {thr:.4}"), above(&gaps, thr), trials, 1.0 - slack, Cmp::Ge));
    let mut sorted: Vec<f64> = gaps.iter().flat_map(|(g, k)| std::iter::repeat_n(g.unwrap_or(f64::NAN), *k as usize)).collect();
    sorted.sort_by(f64::total_cmp);
    let median = sorted.get(sorted.len() / 2).copied().unwrap_or(f64::NAN);
    out.rows.push(Row::exceeds("median gap", median, 0.0));
    let mut thresholds = p.f64_list("thresholds")?;
    thresholds.sort_by(f64::total_cmp);
    let fractions: Vec<u64> = thresholds.iter().map(|&t| above(&gaps, t)).collect();
    let rises = fractions.windows(2).filter(|w| w[1] > w[0]).count();
    out.rows.push(Row::le("increases of the fraction along the thresholds", rises as f64, 0.0));
    let control = emit_control(cfg.t_c, cfg.m)?;
    let hc = control.categorical()?.sample_histogram(trials, &mut derived_rng(seed, &[label_stream("control")]));
    let cg = gap_counts(&hc, cfg.t_c, cfg.t_q, cfg.m)?;
    out.rows.push(Row::rate("classical-emit control fraction", above(&cg, thr), trials, slack, Cmp::Le));
    let dist: BTreeMap<String, u64> = gaps
        .iter()
        .map(|(g, k)| (g.map_or("undefined".to_string(), |g| format!("{g:.4}")), *k))
        .fold(BTreeMap::new(), |mut m, (g, k)| {
            *m.entry(g).or_default() += k;
            m
        });
    out.note("gap_threshold", thr);
    out.note("gap_distribution", dist);
    out.note("fractions", thresholds.iter().zip(&fractions).map(|(t, f)| json!([t, *f as f64 / trials as f64])).collect::<Vec<_>>());
    out.note("certificate", &cert);
    Ok(out)
}

pub(super) fn qas_verify_defaults() -> Value {
    json!({"sampler": "qas6", "n": 16, "c": 1.05, "trials": 500, "member_trials": 20})
}

fn draw(cat: &Categorical, n: u32, rng: &mut impl rand::Rng) -> Vec<VmOutcome> {
    (0..n).map(|_| cat.sample(rng).clone()).collect()
}

pub(super) fn qas_verify_exp(p: &Params, seed: u64) -> Result<Outcome> {
    let qc = Corpus::v1().qas_config(p.str("sampler")?)?;
    let (n, c, trials, member_trials) = (p.u32("n")?, p.f64("c")?, p.u64("trials")?, p.u64("member_trials")?);
    let cfg = QasConfigV { n, c, m: qc.m };
    let m_c = ComplexityOracle::exact(OracleTarget::Ukt { t: qc.t_c });
    let m_q = ComplexityOracle::exact(OracleTarget::Qukt { t: qc.t_q });
    let (qas, cert) = toy_qas(&qc)?;
    let run = |cat: &Categorical, k: u64, stream: u64| -> Result<u64> {
        let mut rng = derived_rng(seed, &[stream]);
        let mut acc = 0;
        for i in 0..k {
            acc += qas_verify(&draw(cat, n, &mut rng), &cfg, &m_c, &m_q, derive_seed(stream, &[i]))?.accepted as u64;
        }
        Ok(acc)
    };
    let mut out = Outcome::default();
    let acc = run(qas.categorical()?, trials, label_stream("qas"))?;
    out.rows.push(Row::rate(format!("{} acceptance", qas.label), acc, trials, 0.95, Cmp::Ge));
    let family = classical_family(qc.t_c, qc.m)?;
    let thr = cfg.gap_threshold();
    let need = n.div_ceil(2) as u64;
    let (mut pooled, mut worst) = (0u64, (0.0f64, String::new()));
    for (j, mem) in family.iter().enumerate() {
        let d = mem.distribution.to_f64();
        let mut q = 0.0;
        for (x, px) in d.iter() {
            let h = Histogram::from_outcomes([x]);
            let (kc, kq) = (m_c.truth(&h, qc.m)?, m_q.truth(&h, qc.m)?);
            if kq.is_finite() && kq <= kc - thr {
                q += px;
            }
        }
        let exact = binomial_upper_tail(n as u64, q, need);
        if exact > worst.0 {
            worst = (exact, mem.prefix.clone());
        }
        pooled += run(&Categorical::new(&d), member_trials, derive_seed(label_stream("family"), &[j as u64]))?;
    }
    let total = family.len() as u64 * member_trials;
    out.rows.push(Row::rate("classical family acceptance (sampled)", pooled, total, 0.01, Cmp::Le));
    out.rows.push(Row::le("classical family acceptance (exact, worst member)", worst.0, 0.01));
    let control = emit_control(qc.t_c, qc.m)?;
    let ctl = run(control.categorical()?, trials, label_stream("control"))?;
    out.rows.push(Row::rate("classical-emit control acceptance", ctl, trials, 0.01, Cmp::Le));
    out.trials = 2 * trials + total;
    out.note("family_size", family.len());
    out.note("worst_member", json!({"prefix": worst.1, "acceptance": worst.0}));
    out.note("gap_threshold", thr);
    out.note("certificate", &cert);
    Ok(out)
}

pub(super) fn far_close_defaults() -> Value {
    json!({"n_scale": 10, "baseline_samples": 200, "trials": 500, "n": 4, "c": 1.0, "eps": 0.25, "T": 20})
}

pub(super) fn far_close(p: &Params, seed: u64) -> Result<Outcome> {
    let (a, b) = far_close_pair(p.u32("n_scale")?)?;
    let (a, b) = (Arc::new(a), Arc::new(b));
    let (bs, trials) = (p.u64("baseline_samples")?, p.u64("trials")?);
    let cfg = VerConfig::defaults(p.u32("n")?, p.f64("c")?, p.f64("eps")?, p.u32("T")?, Flavor::Classical)?;
    let mut out = Outcome { trials: 4 * trials, ..Default::default() };
    let tv = tv_distance(
        a.exact_distribution()?.ok_or_else(|| Error::InvalidArgument("far pair is exact".into()))?,
        b.exact_distribution()?.ok_or_else(|| Error::InvalidArgument("far pair is exact".into()))?,
    );
    out.rows.push(Row::ge("distance between the pair", tv.to_f64().unwrap_or(f64::NAN), 0.9));
    let target: &ExplicitDistribution<f64> = a.distribution()?;
    let baseline = |s: &DescribedSampler, stream: &str| -> Result<u64> {
        let mut rng = derived_rng(seed, &[label_stream(stream)]);
        let cat = s.categorical()?;
        Ok((0..trials).filter(|_| collision_baseline(&cat.sample_histogram(bs, &mut rng), target)).count() as u64)
    };
    let (ba, bb) = (baseline(&a, "baseline even")?, baseline(&b, "baseline odd")?);
    out.rows.push(Row::le("collision baseline acceptance gap", (ba as f64 - bb as f64).abs() / trials as f64, 0.05));
    let or = oracles(&a, &cfg, &OracleSpec::default())?;
    let va = ver_acceptances(&a, &TupleAdversary::iid(a.clone()), &cfg, &or, trials, seed, "ver even")?;
    let vb = ver_acceptances(&a, &TupleAdversary::iid(b.clone()), &cfg, &or, trials, seed, "ver odd")?;
    out.rows.push(Row::rate(format!("Ver acceptance of {}", a.label), va, trials, 1.0 - cfg.correctness_slack(), Cmp::Ge));
    out.rows.push(Row::rate(
        format!("Ver acceptance of {}", b.label),
        vb,
        trials,
        1.0 - cfg.eps + cfg.correctness_slack(),
        Cmp::Le,
    ));
    out.note("baseline_acceptance", json!({"even": ba as f64 / trials as f64, "odd": bb as f64 / trials as f64}));
    out.note("ver_acceptance", json!({"even": va as f64 / trials as f64, "odd": vb as f64 / trials as f64}));
    Ok(out)
}
