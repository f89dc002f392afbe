// Copyright 2026 the Kolmoverify Authors
// SPDX-License-Identifier: Apache-2.0

//! Experiments on the complexity measures and on distribution inequalities.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde_json::{json, Value};

use super::{goldens::Goldens, Outcome, Params, Row};
use crate::bits::BitTape;
use crate::bitvm::{cached_universal, VmBudget, VmOutcome};
use crate::dist::{
    condition_on, joint_kl_divergence, kl_divergence, marginal_lemma_bound, marginal_mixture, product_power, shannon_entropy,
    sharp_entropy_continuity_bound, tv_distance, ExplicitDistribution, Histogram, JointDistribution, Prob,
};
use crate::error::{Error, Result};
use crate::extreal::neg_log2;
use crate::joint::{histogram_complexity, Flavor};
use crate::qsim::cached_quantum_universal;
use crate::rng::{derived_rng, splitmix64};
use crate::samplers::{self, exact_entropy, Corpus, DescribedSampler, Expander, SamplerKind};

/// Probabilities below this are simulator noise, not support.
const SUPPORT_FLOOR: f64 = 1e-12;

pub(super) fn uk(t: u32, m: u32, x: &VmOutcome) -> Result<f64> {
    Ok(cached_universal(t, m)?.neg_log2(x))
}

pub(super) fn quk(t: u32, m: u32, x: &VmOutcome) -> Result<f64> {
    Ok(neg_log2(cached_quantum_universal(t, m)?.prob(x)))
}

/// A stable stream index for a label, so a sampler sees the same random
/// stream whether it runs alone or with the whole corpus.
pub(super) fn label_stream(label: &str) -> u64 {
    label.bytes().fold(0x6b76_7269_6679u64, |acc, b| splitmix64(acc ^ b as u64))
}

fn o(s: &str) -> VmOutcome {
    s.parse().expect("literal outcomes parse")
}

fn rat(n: u64, d: u64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn f(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub(super) fn normalization_defaults() -> Value {
    json!({"t": [4, 8, 12, 16, 20], "m": [1, 2, 3, 4, 5, 6, 7, 8]})
}

pub(super) fn normalization(p: &Params, _seed: u64) -> Result<Outcome> {
    let mut out = Outcome::default();
    for &t in &p.u32_list("t")? {
        for &m in &p.u32_list("m")? {
            let u = cached_universal(t, m)?;
            let tag = format!("t={t} m={m}");
            let kraft: f64 = u.counts().keys().filter(|x| !x.is_bottom()).map(|x| (-u.neg_log2(x)).exp2()).sum();
            out.rows.push(Row::le(format!("classical kraft sum {tag}"), kraft, 1.0));
            let exact_one = u.total() == 1u128 << t && u.to_exact().total_mass() == BigRational::one();
            out.rows.push(Row::eq(format!("classical exact mass is 1 {tag}"), if exact_one { 1.0 } else { 0.0 }, 1.0));
            out.rows.push(Row::le(format!("classical float mass error {tag}"), (u.to_f64().total_mass() - 1.0).abs(), crate::TOL_P));
            let q = cached_quantum_universal(t, m)?;
            let qkraft: f64 = q.iter().filter(|(x, _)| !x.is_bottom()).map(|(_, p)| (-neg_log2(*p)).exp2()).sum();
            out.rows.push(Row::le(format!("quantum kraft sum {tag}"), qkraft, 1.0));
            out.rows.push(Row::le(format!("quantum float mass error {tag}"), (q.total_mass() - 1.0).abs(), crate::TOL_P));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Default)]
pub struct ConstantReport {
    pub per_sampler: BTreeMap<String, f64>,
    pub excluded: Vec<String>,
}

fn fold_max(per: &BTreeMap<String, f64>) -> f64 {
    per.values().fold(f64::NEG_INFINITY, |a, &b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) })
}

/// `max_x uK^T(x) + log2 p(x) - 2|D|` over the classical corpus.
pub fn coding_constant(t: u32) -> Result<(f64, ConstantReport)> {
    let mut rep = ConstantReport::default();
    for s in Corpus::v1().samplers().iter().filter(|s| !s.is_quantum()) {
        if s.budget.t > t {
            rep.excluded.push(s.label.clone());
            continue;
        }
        let d = s.exact_distribution()?.expect("classical samplers are exact");
        let mut worst = f64::NEG_INFINITY;
        for (x, px) in d.iter().filter(|(x, _)| !x.is_bottom()) {
            worst = worst.max(uk(t, s.budget.m, x)? - px.neg_log2() - 2.0 * s.description_length as f64);
        }
        rep.per_sampler.insert(s.label.clone(), worst);
    }
    Ok((fold_max(&rep.per_sampler), rep))
}

/// The quantum twin of [`coding_constant`] over the circuit corpus.
pub fn quantum_coding_constant(t_q: u32) -> Result<(f64, ConstantReport)> {
    let mut rep = ConstantReport::default();
    for s in Corpus::v1().samplers().iter().filter(|s| s.is_quantum()) {
        if s.budget.t > t_q {
            rep.excluded.push(s.label.clone());
            continue;
        }
        let mut worst = f64::NEG_INFINITY;
        for (x, &px) in s.distribution()?.iter().filter(|(x, p)| !x.is_bottom() && **p > SUPPORT_FLOOR) {
            worst = worst.max(quk(t_q, s.budget.m, x)? - neg_log2(px) - 2.0 * s.description_length as f64);
        }
        rep.per_sampler.insert(s.label.clone(), worst);
    }
    Ok((fold_max(&rep.per_sampler), rep))
}

/// Largest extra cost, in bits, of producing a gate-free circuit's output on
/// the quantum machine. A circuit without gates leaves every qubit at `|0>`,
/// so its only output is `0^m`; `m` is limited to 1 and 2.
pub fn embedding_constant(t: u32) -> Result<(f64, BTreeMap<String, f64>)> {
    let mut per = BTreeMap::new();
    for m in 1..=2u32 {
        let x = VmOutcome::Bits(BitTape::zeros(m as usize));
        per.insert(format!("m={m}"), quk(t, m, &x)? - uk(t, m, &x)?);
    }
    Ok((fold_max(&per), per))
}

fn coding_rows(out: &mut Outcome, name: &str, first: &(f64, ConstantReport), second: f64, golden: Option<f64>) {
    let (c, rep) = first;
    for (label, v) in &rep.per_sampler {
        out.rows.push(Row::le(format!("{name} slack of {label}"), *v, *c));
    }
    out.rows.push(Row::le(format!("{name} is finite"), if c.is_finite() { 0.0 } else { 1.0 }, 0.0));
    out.rows.push(Row::eq(format!("{name} rerun"), second, *c));
    out.rows.push(Row::eq(format!("{name} equals the frozen golden"), *c, golden.unwrap_or(f64::NAN)));
    out.note(name, crate::extreal::json::to_value(*c));
    out.note("per_sampler", rep.per_sampler.iter().map(|(k, v)| (k.clone(), crate::extreal::json::to_value(*v))).collect::<BTreeMap<_, _>>());
    out.note("excluded_by_budget", &rep.excluded);
}

pub(super) fn coding_defaults() -> Value {
    json!({"T": super::goldens::CODING_T})
}

pub(super) fn coding(p: &Params, _seed: u64) -> Result<Outcome> {
    let t = p.u32("T")?;
    let mut out = Outcome::default();
    let first = coding_constant(t)?;
    let second = coding_constant(t)?.0;
    let golden = if t == super::goldens::CODING_T { Goldens::shipped()?.c_univ } else { None };
    coding_rows(&mut out, "c_univ", &first, second, golden);
    Ok(out)
}

pub(super) fn coding_quantum_defaults() -> Value {
    json!({"T_q": super::goldens::CODING_T_Q})
}

pub(super) fn coding_quantum(p: &Params, _seed: u64) -> Result<Outcome> {
    let t = p.u32("T_q")?;
    let mut out = Outcome::default();
    let first = quantum_coding_constant(t)?;
    let second = quantum_coding_constant(t)?.0;
    let golden = if t == super::goldens::CODING_T_Q { Goldens::shipped()?.c_q } else { None };
    coding_rows(&mut out, "c_q", &first, second, golden);
    Ok(out)
}

pub(super) fn embedding_defaults() -> Value {
    json!({"T": super::goldens::EMBED_T})
}

pub(super) fn embedding(p: &Params, _seed: u64) -> Result<Outcome> {
    let t = p.u32("T")?;
    let mut out = Outcome::default();
    let (c, per) = embedding_constant(t)?;
    for (k, v) in &per {
        out.rows.push(Row::le(format!("extra cost {k}"), *v, c));
    }
    out.rows.push(Row::le("c_embed is finite", if c.is_finite() { 0.0 } else { 1.0 }, 0.0));
    let golden = if t == super::goldens::EMBED_T { Goldens::shipped()?.c_embed } else { None };
    out.rows.push(Row::eq("c_embed equals the frozen golden", c, golden.unwrap_or(f64::NAN)));
    out.note("c_embed", c);
    out.note("per_length", per);
    Ok(out)
}

pub(super) fn incompressibility_defaults() -> Value {
    json!({"sampler": "all", "alpha": [2, 4, 6], "trials": 100_000, "T": 20, "T_q": 28})
}

fn selected(p: &Params) -> Result<Vec<Arc<DescribedSampler>>> {
    let labels = p.str_list("sampler")?;
    if labels.iter().any(|l| l == "all") {
        return Ok(Corpus::v1().samplers().to_vec());
    }
    labels.iter().map(|l| Corpus::v1().get(l)).collect()
}

pub(super) fn incompressibility(p: &Params, seed: u64) -> Result<Outcome> {
    let (alphas, trials) = (p.f64_list("alpha")?, p.u64("trials")?);
    let (t, t_q) = (p.u32("T")?, p.u32("T_q")?);
    let mut out = Outcome::default();
    let mut lengths = BTreeMap::new();
    for s in selected(p)? {
        let m = s.budget.m;
        let (flavor, tt) = if s.is_quantum() { ("quK", t_q) } else { ("uK", t) };
        let k = |x: &VmOutcome| if s.is_quantum() { quk(tt, m, x) } else { uk(tt, m, x) };
        // m + c: the longest finite code length among m-bit strings.
        let all: Vec<VmOutcome> = if s.is_quantum() {
            cached_quantum_universal(tt, m)?.iter().filter(|(_, p)| **p > 0.0).map(|(x, _)| x.clone()).collect()
        } else {
            cached_universal(tt, m)?.counts().keys().cloned().collect()
        };
        let mut longest = 0.0f64;
        for x in all.iter().filter(|x| !x.is_bottom()) {
            longest = longest.max(k(x)?.ceil());
        }
        lengths.insert(s.label.clone(), longest);
        let d = s.distribution()?;
        let h = s.categorical()?.sample_histogram(trials, &mut derived_rng(seed, &[label_stream(&s.label)]));
        let scored: Vec<(f64, f64, u64)> = h
            .iter()
            .filter(|(x, _)| !x.is_bottom())
            .map(|(x, n)| Ok((k(x)?, neg_log2(d.prob(x)), n)))
            .collect::<Result<_>>()?;
        for &a in &alphas {
            let hits: u64 = scored.iter().filter(|(kx, nl, _)| *kx <= nl - a).map(|(_, _, n)| n).sum();
            let bound = longest * (1.0 - a).exp2();
            out.rows.push(Row::rate(format!("{} {flavor}@{tt} alpha={a}", s.label), hits, trials, bound, super::Cmp::Le));
        }
        out.trials += trials;
    }
    out.note("m_plus_c", lengths);
    Ok(out)
}

pub(super) fn marginal_defaults() -> Value {
    json!({"T": 16, "alpha": 4.0, "random_joints": 12})
}

type Joint = JointDistribution<BigRational>;

fn product(parts: &[&ExplicitDistribution<BigRational>]) -> Result<Joint> {
    let mut entries: Vec<(Vec<VmOutcome>, BigRational)> = vec![(vec![], BigRational::one())];
    for d in parts {
        entries = entries
            .iter()
            .flat_map(|(t, w)| {
                d.iter().map(move |(x, q)| {
                    let mut t2 = t.clone();
                    t2.push(x.clone());
                    (t2, w * q)
                })
            })
            .collect();
    }
    Joint::from_entries(parts.len(), entries)
}

fn mix_half(a: &Joint, b: &Joint) -> Result<Joint> {
    let h = rat(1, 2);
    Joint::from_entries(a.arity(), a.entries().iter().chain(b.entries()).map(|(t, p)| (t.clone(), p * &h)))
}

fn copies(d: &ExplicitDistribution<BigRational>, s: usize) -> Result<Joint> {
    Joint::from_entries(s, d.iter().map(|(x, p)| (vec![x.clone(); s], p.clone())))
}

fn random_joint(rng: &mut impl Rng, arity: usize, m: u32) -> Result<Joint> {
    let space = 1usize << (m as usize * arity);
    let support = rng.random_range(1..=space.min(64));
    let mut picked = BTreeMap::new();
    while picked.len() < support {
        let code = rng.random_range(0..space) as u64;
        let tuple: Vec<VmOutcome> = (0..arity)
            .map(|i| VmOutcome::Bits(BitTape::from_u64((code >> (i as u32 * m)) & ((1 << m) - 1), m as usize)))
            .collect();
        picked.insert(tuple, rng.random_range(1..=16u64));
    }
    let total: u64 = picked.values().sum();
    Joint::from_entries(arity, picked.into_iter().map(|(t, w)| (t, rat(w, total))))
}

/// The family of small joints paired with a single-sample target.
fn marginal_family(seed: u64, randoms: u64) -> Result<Vec<(String, Joint, ExplicitDistribution<BigRational>)>> {
    let corpus = Corpus::v1();
    let exact = |l: &str| -> Result<ExplicitDistribution<BigRational>> {
        Ok(corpus.get(l)?.exact_distribution()?.expect("classical corpus entries are exact").clone())
    };
    let (u1, b2) = (exact("uniform1")?, exact("biased2")?);
    let (tail, free1) = (exact("tail-m2")?, exact("free-m1")?);
    let mut fam: Vec<(String, Joint, ExplicitDistribution<BigRational>)> = vec![];
    for (name, d, s) in [("uniform1", &u1, 2), ("uniform1", &u1, 3), ("uniform1", &u1, 4), ("biased2", &b2, 2), ("biased2", &b2, 3)] {
        fam.push((format!("{name}^{s}"), product_power(d, s)?, d.clone()));
    }
    fam.push(("point 0110".into(), Joint::point_mass(vec![o("0"), o("1"), o("1"), o("0")])?, u1.clone()));
    fam.push(("point 11,01,10".into(), Joint::point_mass(vec![o("11"), o("01"), o("10")])?, b2.clone()));
    fam.push(("point 00,00".into(), Joint::point_mass(vec![o("00"), o("00")])?, b2.clone()));
    for (name, d, s) in [("uniform1", &u1, 2), ("uniform1", &u1, 4), ("biased2", &b2, 2), ("biased2", &b2, 3)] {
        fam.push((format!("copies of {name} x{s}"), copies(d, s)?, d.clone()));
    }
    fam.push((
        "half uniform1^3, half 111".into(),
        mix_half(&product_power(&u1, 3)?, &Joint::point_mass(vec![o("1"); 3])?)?,
        u1.clone(),
    ));
    fam.push((
        "half biased2^2, half 11,11".into(),
        mix_half(&product_power(&b2, 2)?, &Joint::point_mass(vec![o("11"); 2])?)?,
        b2.clone(),
    ));
    fam.push(("tail-m2^2 against biased2".into(), product(&[&tail, &tail])?, b2.clone()));
    fam.push(("free-m1^3 against uniform1".into(), product(&[&free1, &free1, &free1])?, u1.clone()));
    let mut rng = derived_rng(seed, &[0x6a6f_696e_74]);
    for i in 0..randoms {
        let m = rng.random_range(1..=2u32);
        let arity = if m == 1 { rng.random_range(2..=4usize) } else { rng.random_range(2..=3usize) };
        let (target, tn) = if m == 1 { (&u1, "uniform1") } else { (&b2, "biased2") };
        fam.push((format!("random #{i} (m={m}, arity {arity}) against {tn}"), random_joint(&mut rng, arity, m)?, target.clone()));
    }
    Ok(fam)
}

/// The chain of inequalities from the tuple-acceptance event to the marginal
/// distance bound, one row per link.
fn marginal_chain(out: &mut Outcome, name: &str, g: &Joint, d: &ExplicitDistribution<BigRational>, t: u32, alpha: f64) -> Result<Value> {
    let s = g.arity();
    let m = d.support().find_map(|x| x.bits().map(|b| b.len())).unwrap_or(1) as u32;
    let budget = VmBudget::new(4, t, m)?;
    let mut info = BTreeMap::new();
    let mut c_g = f64::NEG_INFINITY;
    for (y, q) in g.entries() {
        let k = histogram_complexity(&Histogram::from_outcomes(y), &budget, Flavor::Classical)?;
        let p: BigRational = y.iter().fold(BigRational::one(), |acc, x| acc * d.prob(x));
        c_g = c_g.max(k - q.neg_log2());
        info.insert(y.clone(), (k, p));
    }
    let in_a = |y: &[VmOutcome]| {
        let (k, p) = &info[y];
        let nl = p.neg_log2();
        nl.is_finite() && nl <= k + alpha
    };
    let eps = BigRational::one() - g.event_mass(in_a);
    let marg_g = marginal_mixture(g);
    let delta_g = tv_distance(&marg_g, d);
    let row = |r: Row| Row { param: format!("{name}: {}", r.param), ..r };
    if eps.is_one() {
        out.rows.push(row(Row::le("final bound (vacuous, eps = 1)", f(&delta_g), 1.0)));
        return Ok(json!({"eps": 1.0, "delta": f(&delta_g), "c_g": crate::extreal::json::to_value(c_g)}));
    }
    let b = condition_on(g, in_a)?;
    let one_minus = BigRational::one() - &eps;
    let log_cond = -f(&one_minus).log2();
    let inner = log_cond + c_g + alpha;

    let bayes = b.entries().iter().map(|(y, qt)| qt * &one_minus / g.prob(y)).fold(BigRational::zero(), |a, r| a.max(r));
    out.rows.push(row(Row::le("bayes factor (1-eps)·q~/q", f(&bayes), 1.0)));
    let ratio = |y: &Vec<VmOutcome>, q: &BigRational| info[y].1.neg_log2() - q.neg_log2();
    let max_ratio = b.entries().keys().map(|y| ratio(y, &g.prob(y))).fold(f64::NEG_INFINITY, f64::max);
    out.rows.push(row(Row::le("log2 q/p on A", max_ratio, c_g + alpha)));
    let max_cond = b.entries().iter().map(|(y, qt)| ratio(y, qt)).fold(f64::NEG_INFINITY, f64::max);
    out.rows.push(row(Row::le("log2 q~/p on A", max_cond, inner)));
    let ds = product_power(d, s)?;
    let kl = joint_kl_divergence(&b, &ds);
    out.rows.push(row(Row::le("KL(B || D^s) against the ratio bound", kl, max_cond)));
    let coords: Vec<ExplicitDistribution<BigRational>> = (0..s).map(|i| b.coordinate_marginal(i)).collect();
    let kl_sum: f64 = coords.iter().map(|bi| kl_divergence(bi, d)).sum();
    out.rows.push(row(Row::le("sum of coordinate KLs", kl_sum, kl)));
    let deltas: Vec<BigRational> = coords.iter().map(|bi| tv_distance(bi, d)).collect();
    let sq_sum: f64 = deltas.iter().map(|x| f(x).powi(2)).sum();
    out.rows.push(row(Row::le("pinsker: sum of Δ_i²/2", sq_sum / 2.0, kl_sum)));
    out.rows.push(row(Row::le("pinsker (sharp): sum of 2Δ_i²/ln 2", 2.0 * sq_sum / std::f64::consts::LN_2, kl_sum)));
    let lin_sum: BigRational = deltas.iter().fold(BigRational::zero(), |a, x| a + x);
    out.rows.push(row(Row::le("jensen: sum of Δ_i", f(&lin_sum), (s as f64 * sq_sum).sqrt())));
    let marg_b = marginal_mixture(&b);
    let avg = lin_sum / BigRational::from_integer((s as i64).into());
    out.rows.push(row(Row::le("Δ(Marg_B, D) against the average Δ_i", f(&tv_distance(&marg_b, d)), f(&avg))));
    let two_over_s = (2.0 / s as f64 * inner).sqrt();
    out.rows.push(row(Row::le("average Δ_i against sqrt(2/s·(...))", f(&avg), two_over_s)));
    let cond_gap = tv_distance(&marg_g, &marg_b);
    out.rows.push(row(Row::le("Δ(Marg_G, Marg_B) against eps", f(&cond_gap), f(&eps))));
    let tri = &cond_gap + tv_distance(&marg_b, d);
    out.rows.push(row(Row::le("triangle", f(&delta_g), f(&tri))));
    out.rows.push(row(Row::le("final bound, factor-2 form", f(&delta_g), f(&eps) + two_over_s)));
    let stated = marginal_lemma_bound(f(&eps), alpha, s as u64, c_g);
    out.rows.push(row(Row::le("final bound", f(&delta_g), stated)));
    Ok(json!({
        "eps": f(&eps),
        "delta": f(&delta_g),
        "c_g": crate::extreal::json::to_value(c_g),
        "kl": kl,
        "bound": crate::extreal::json::to_value(stated),
    }))
}

pub(super) fn marginal(p: &Params, seed: u64) -> Result<Outcome> {
    let (t, alpha, randoms) = (p.u32("T")?, p.f64("alpha")?, p.u64("random_joints")?);
    let mut out = Outcome::default();
    let mut joints = serde_json::Map::new();
    for (name, g, d) in marginal_family(seed, randoms)? {
        if g.arity() > 4 || g.support_size() > 64 {
            return Err(Error::ExpansionTooLarge { entries: g.support_size() as u128, cap: 64 });
        }
        joints.insert(name.clone(), marginal_chain(&mut out, &name, &g, &d, t, alpha)?);
    }
    out.note("joint_count", joints.len());
    out.note("joints", joints);
    Ok(out)
}

pub(super) fn fannes_defaults() -> Value {
    json!({"pairs": 1000, "max_m": 4})
}

fn random_distribution(rng: &mut impl Rng, m: u32) -> Result<ExplicitDistribution<f64>> {
    let density: f64 = rng.random_range(0.05..=1.0);
    let mut w: Vec<(VmOutcome, f64)> = vec![];
    for v in 0..1u64 << m {
        if rng.random_bool(density) {
            w.push((VmOutcome::Bits(BitTape::from_u64(v, m as usize)), rng.random_range(1..=64u32) as f64));
        }
    }
    if w.is_empty() {
        w.push((VmOutcome::Bits(BitTape::from_u64(rng.random_range(0..1u64 << m), m as usize)), 1.0));
    }
    let total: f64 = w.iter().map(|(_, x)| x).sum();
    ExplicitDistribution::from_entries(w.into_iter().map(|(o, x)| (o, x / total)))
}

pub(super) fn fannes(p: &Params, seed: u64) -> Result<Outcome> {
    let (pairs, max_m) = (p.u64("pairs")?, p.u32("max_m")?);
    let mut rng = derived_rng(seed, &[0x6661_6e6e_6573]);
    let (mut stated_bad, mut sharp_bad, mut worst) = (0u64, 0u64, 0.0f64);
    let mut by_m: BTreeMap<String, [u64; 2]> = BTreeMap::new();
    for _ in 0..pairs {
        let m = rng.random_range(1..=max_m);
        let (a, b) = (random_distribution(&mut rng, m)?, random_distribution(&mut rng, m)?);
        let u = 1u128 << m;
        let lhs = (shannon_entropy(&a) - shannon_entropy(&b)).abs();
        let delta = tv_distance(&a, &b);
        let stated = delta * (u as f64).log2() + std::f64::consts::E.recip();
        let bad = lhs > stated + crate::TOL_P;
        stated_bad += bad as u64;
        let slot = by_m.entry(format!("m={m}")).or_default();
        slot[0] += bad as u64;
        slot[1] += 1;
        sharp_bad += (lhs > sharp_entropy_continuity_bound(delta, u) + crate::TOL_P) as u64;
        worst = worst.max(lhs / stated);
    }
    let mut out = Outcome { trials: pairs, ..Default::default() };
    out.rows.push(Row::le("violations of Δ·log2|U| + 1/e", stated_bad as f64, 0.0));
    out.rows.push(Row::le("violations of Δ·log2(|U|-1) + h(Δ)", sharp_bad as f64, 0.0));
    out.note("max_lhs_over_bound", worst);
    out.note("one_over_e_violations_by_m", by_m.iter().map(|(k, [b, n])| (k.clone(), format!("{b}/{n}"))).collect::<BTreeMap<_, _>>());
    // A pair outside the random family on which the 1/e form fails: a point
    // mass against half of it spread over the other 15 outcomes.
    let point = ExplicitDistribution::point_mass(o("0000"));
    let spread = ExplicitDistribution::from_entries(
        (0..16u64).map(|v| (VmOutcome::Bits(BitTape::from_u64(v, 4)), if v == 0 { 0.5 } else { 0.5 / 15.0 })),
    )?;
    let lhs = (shannon_entropy(&point) - shannon_entropy(&spread)).abs();
    let d = tv_distance(&point, &spread);
    out.note(
        "known_counterexample",
        json!({
            "pair": "point mass on 0000 vs 1/2 on 0000 + 1/30 on each other 4-bit string",
            "entropy_gap": lhs,
            "delta": d,
            "one_over_e_form": d * 4.0 + std::f64::consts::E.recip(),
            "sharp_form": sharp_entropy_continuity_bound(d, 16),
        }),
    );
    Ok(out)
}

pub(super) fn prg_stretch_defaults() -> Value {
    json!({
        "bases": ["uniform8", "uniform4", "uniform1", "biased2", "tail-m2", "free-m2"],
        "seed_bits": [0, 1, 2, 3, 4, 6, 8],
    })
}

fn stretch_rows(out: &mut Outcome, name: &str, s: &DescribedSampler) -> Result<Value> {
    let sp = s.stretch().expect("stretched sampler");
    let base = sp.base.exact_distribution()?.expect("stretch bases are classical");
    let d = s.exact_distribution()?.expect("stretches are exact");
    let (h_base, h) = (exact_entropy(base), exact_entropy(d));
    let b = sp.seed_bits;
    let delta = f(&tv_distance(base, d));
    let bound = (h_base - b as f64 - std::f64::consts::E.recip()) / s.budget.m as f64;
    out.rows.push(Row::le(format!("{name} support size"), d.support_size() as f64, (1u64 << b) as f64));
    out.rows.push(Row::le(format!("{name} entropy"), h, b as f64));
    out.rows.push(Row::ge(format!("{name} distance from base"), delta, bound));
    Ok(json!({"entropy": h, "base_entropy": h_base, "delta": delta, "distance_bound": bound}))
}

pub(super) fn prg_stretch_exp(p: &Params, _seed: u64) -> Result<Outcome> {
    let mut out = Outcome::default();
    let mut info = serde_json::Map::new();
    let corpus = Corpus::v1();
    for label in p.str_list("bases")? {
        let base = corpus.get(&label)?;
        let ell = base
            .randomness_bits()
            .ok_or_else(|| Error::InvalidArgument(format!("`{label}` does not declare its randomness")))?;
        for &b in p.u32_list("seed_bits")?.iter().filter(|&&b| b < ell) {
            for e in [Expander::Identity, Expander::Xorshift] {
                let s = samplers::prg_stretch(&base, b, e)?;
                let key = format!("{} ({e:?})", s.label);
                let v = stretch_rows(&mut out, &key, &s)?;
                info.insert(key, v);
            }
        }
    }
    for s in corpus.samplers().iter().filter(|s| s.kind == SamplerKind::PrgStretch) {
        let key = format!("{} (corpus)", s.label);
        let v = stretch_rows(&mut out, &key, s)?;
        info.insert(key, v);
    }
    out.note("stretches", info);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedding_measures_zero_strings() {
        let (c, per) = embedding_constant(16).unwrap();
        assert_eq!(per.len(), 2);
        assert!(c.is_finite() && c > 0.0);
    }

    #[test]
    fn marginal_family_is_large_and_small() {
        let fam = marginal_family(0, 12).unwrap();
        assert!(fam.len() >= 20);
        assert!(fam.iter().all(|(_, g, _)| g.arity() <= 4 && g.support_size() <= 64));
    }

    #[test]
    fn point_mass_sampler_has_no_incompressible_tail() {
        let s = DescribedSampler::explicit_table(
            "pm",
            ExplicitDistribution::point_mass(o("01")),
            VmBudget::new(4, 20, 2).unwrap(),
            None,
        )
        .unwrap();
        // p = 1, so the event needs uK <= -alpha < 0.
        let x = o("01");
        assert!(uk(20, 2, &x).unwrap() > -2.0);
        assert_eq!(s.distribution().unwrap().prob(&x), 1.0);
    }
}
