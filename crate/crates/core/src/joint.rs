// Copyright 2026 the Kolmoverify Authors
// SPDX-License-Identifier: Apache-2.0

//! The tuple machine behind joint complexity.
//!
//! Concatenating a tuple into one long string leaves every realistic tuple
//! unreachable at enumerable budgets, so joint complexity is measured
//! against a machine that emits whole tuples:
//!
//! 1. pick a split point `j` uniformly in `0..=t/4` and run `j` random
//!    opcodes once, reaching a shared state;
//! 2. with probability 1/2 every element is an independent run of the
//!    remaining opcodes from that state;
//! 3. otherwise pick a pool size `R` from [`POOL_SIZES`], draw `R`
//!    independent runs from the shared state once, and emit each element as a
//!    uniform pick from that pool.
//!
//! Every element's marginal is the single-string universal distribution, so
//! for one-element tuples the machine coincides with the plain one. The pool
//! step lets the machine cheaply describe any low-entropy sampler whose
//! outputs it can produce, which the plain i.i.d. step cannot.
//!
//! Probabilities depend only on the tuple's histogram.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::bits::BitTape;
use crate::bitvm::{continuation, finish_classical, level_states, LevelState, TraceEngine, VmBudget, VmOutcome, OPCODE_BITS, OPCODE_SPACE, T_MAX};
use crate::dist::Histogram;
use crate::error::{Error, Result};
use crate::extreal::{log2_add, log2_sum_exp};
use crate::qsim::{mix_raw_counts, T_MAX_Q};

pub const POOL_SIZES: [u32; 5] = [1, 2, 4, 8, 16];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flavor {
    Classical,
    Quantum,
}

#[derive(Clone, Debug)]
struct Component {
    log2_weight: f64,
    probs: HashMap<VmOutcome, f64>,
}

#[derive(Debug)]
pub struct TupleMachine {
    pub flavor: Flavor,
    pub t: u32,
    pub m: u32,
    components: Vec<Component>,
    log2_fact: Vec<f64>,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    Continue(BitTape, u32),
    Stopped(LevelState),
}

impl TupleMachine {
    pub fn build(flavor: Flavor, t: u32, m: u32) -> Result<Self> {
        let budget = VmBudget::new(1, t, m)?;
        let cap_t = match flavor {
            Flavor::Classical => T_MAX,
            Flavor::Quantum => T_MAX_Q,
        };
        if t > cap_t {
            return Err(Error::BudgetTooLarge { t, cap: cap_t });
        }
        let cap = match flavor {
            Flavor::Classical => Some(m as usize),
            Flavor::Quantum => None,
        };
        let k = t / OPCODE_BITS;
        let mut weights: BTreeMap<Key, f64> = BTreeMap::new();
        for (j, lvl) in level_states(k, cap).into_iter().enumerate() {
            let scale = 1.0 / (OPCODE_SPACE.pow(j as u32) as f64 * (k + 1) as f64);
            for (st, c) in lvl {
                let key = match st {
                    LevelState::Running(b) => Key::Continue(b, k - j as u32),
                    other => Key::Stopped(other),
                };
                *weights.entry(key).or_default() += c as f64 * scale;
            }
        }
        let mut eng = TraceEngine::new(cap);
        let mut merged: BTreeMap<Vec<(VmOutcome, u64)>, (f64, HashMap<VmOutcome, f64>)> = BTreeMap::new();
        for (key, w) in weights {
            let (st, r) = match key {
                Key::Continue(b, r) => (LevelState::Running(b), r),
                Key::Stopped(s) => (s, 0),
            };
            let counts = continuation(&mut eng, &st, r);
            let probs: HashMap<VmOutcome, f64> = match flavor {
                Flavor::Classical => {
                    let den = OPCODE_SPACE.pow(r) as f64;
                    let mut acc: HashMap<VmOutcome, u128> = HashMap::new();
                    for (raw, c) in counts.iter() {
                        *acc.entry(finish_classical(raw.clone(), m)).or_default() += c;
                    }
                    acc.into_iter().map(|(o, c)| (o, c as f64 / den)).collect()
                }
                Flavor::Quantum => mix_raw_counts(counts.iter(), OPCODE_SPACE.pow(r), &budget)?
                    .iter()
                    .map(|(o, p)| (o.clone(), *p))
                    .collect(),
            };
            let mut sig: Vec<(VmOutcome, u64)> = probs.iter().map(|(o, p)| (o.clone(), p.to_bits())).collect();
            sig.sort();
            let slot = merged.entry(sig).or_insert_with(|| (0.0, probs));
            slot.0 += w;
        }
        let components = merged
            .into_values()
            .map(|(w, probs)| Component { log2_weight: w.log2(), probs })
            .collect();
        let log2_fact = (0..=POOL_SIZES[POOL_SIZES.len() - 1] as usize)
            .scan(0.0, |acc, i| {
                if i > 0 {
                    *acc += (i as f64).log2();
                }
                Some(*acc)
            })
            .collect();
        Ok(Self { flavor, t, m, components, log2_fact })
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    /// `log2` of the machine's probability of emitting a tuple with this
    /// histogram (in any fixed order).
    pub fn log2_prob(&self, h: &Histogram) -> f64 {
        if h.total() == 0 {
            return 0.0;
        }
        let vals: Vec<(&VmOutcome, u64)> = h.iter().collect();
        let terms = self.components.iter().map(|c| {
            let ps: Vec<f64> = vals.iter().map(|(o, _)| c.probs.get(*o).copied().unwrap_or(0.0)).collect();
            if ps.iter().any(|&p| p == 0.0) {
                return f64::NEG_INFINITY;
            }
            let ns: Vec<u64> = vals.iter().map(|(_, n)| *n).collect();
            let iid: f64 = ps.iter().zip(&ns).map(|(p, &n)| n as f64 * p.log2()).sum();
            let mut mix = iid - 1.0;
            let pool_w = -(2.0 * POOL_SIZES.len() as f64).log2();
            for &r in &POOL_SIZES {
                if vals.len() <= r as usize {
                    mix = log2_add(mix, pool_w + self.pool_log2(r, &ps, &ns));
                }
            }
            c.log2_weight + mix
        });
        log2_sum_exp(terms)
    }

    /// Complexity of the tuple in bits.
    pub fn complexity(&self, h: &Histogram) -> f64 {
        -self.log2_prob(h)
    }

    /// `log2 E_pool[prod_i (c_{y_i} / R)]` for a pool of `r` draws from a
    /// component whose probabilities on the tuple's distinct values are `ps`.
    fn pool_log2(&self, r: u32, ps: &[f64], ns: &[u64]) -> f64 {
        let rest = (1.0 - ps.iter().sum::<f64>()).max(0.0);
        let lr = (r as f64).log2();
        let mut acc = f64::NEG_INFINITY;
        let mut cs = vec![0u32; ps.len()];
        self.pool_rec(0, r, r, ps, ns, rest, lr, &mut cs, &mut acc);
        acc
    }

    #[allow(clippy::too_many_arguments)]
    fn pool_rec(&self, i: usize, left: u32, r: u32, ps: &[f64], ns: &[u64], rest: f64, lr: f64, cs: &mut [u32], acc: &mut f64) {
        if i == ps.len() {
            if left > 0 && rest == 0.0 {
                return;
            }
            let mut term = self.log2_fact[r as usize] - self.log2_fact[left as usize];
            if left > 0 {
                term += left as f64 * rest.log2();
            }
            for j in 0..ps.len() {
                let c = cs[j] as f64;
                term += -self.log2_fact[cs[j] as usize] + c * ps[j].log2() + ns[j] as f64 * (c.log2() - lr);
            }
            *acc = log2_add(*acc, term);
            return;
        }
        let need_after = (ps.len() - i - 1) as u32;
        if left < 1 + need_after {
            return;
        }
        for c in 1..=left - need_after {
            cs[i] = c;
            self.pool_rec(i + 1, left - c, r, ps, ns, rest, lr, cs, acc);
        }
    }
}

type MachineCache = HashMap<(Flavor, u32, u32), Arc<TupleMachine>>;

/// The tuple machine for `(flavor, t, m)`, built once per process.
pub fn cached_machine(flavor: Flavor, t: u32, m: u32) -> Result<Arc<TupleMachine>> {
    static CACHE: OnceLock<Mutex<MachineCache>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(mach) = cache.lock().unwrap().get(&(flavor, t, m)) {
        return Ok(mach.clone());
    }
    let mach = Arc::new(TupleMachine::build(flavor, t, m)?);
    cache.lock().unwrap().insert((flavor, t, m), mach.clone());
    Ok(mach)
}

/// Joint complexity of a tuple of `budget.m`-bit strings. One-element tuples
/// get the exact single-string value.
pub fn joint_complexity(tuple: &[BitTape], budget: &VmBudget, flavor: Flavor) -> Result<f64> {
    budget.validate()?;
    if tuple.is_empty() {
        return Err(Error::InvalidArgument("empty tuple".into()));
    }
    for y in tuple {
        if y.len() != budget.m as usize {
            return Err(Error::LengthMismatch { expected: budget.m as usize, actual: y.len() });
        }
    }
    if tuple.len() == 1 {
        return match flavor {
            Flavor::Classical => crate::bitvm::ukt(&tuple[0], budget),
            Flavor::Quantum => crate::qsim::qukt(&tuple[0], budget),
        };
    }
    Ok(cached_machine(flavor, budget.t, budget.m)?.complexity(&Histogram::from_tapes(tuple)))
}

/// Joint complexity of a tuple given by its histogram. Elements may be `⊥`.
pub fn histogram_complexity(h: &Histogram, budget: &VmBudget, flavor: Flavor) -> Result<f64> {
    budget.validate()?;
    for (o, _) in h.iter() {
        if let VmOutcome::Bits(b) = o {
            if b.len() != budget.m as usize {
                return Err(Error::LengthMismatch { expected: budget.m as usize, actual: b.len() });
            }
        }
    }
    match h.total() {
        0 => Err(Error::InvalidArgument("empty tuple".into())),
        1 => {
            let (o, _) = h.iter().next().unwrap();
            match flavor {
                Flavor::Classical => {
                    if budget.t > T_MAX {
                        return Err(Error::BudgetTooLarge { t: budget.t, cap: T_MAX });
                    }
                    Ok(crate::bitvm::cached_universal(budget.t, budget.m)?.neg_log2(o))
                }
                Flavor::Quantum => {
                    if budget.t > T_MAX_Q {
                        return Err(Error::BudgetTooLarge { t: budget.t, cap: T_MAX_Q });
                    }
                    Ok(crate::extreal::neg_log2(crate::qsim::cached_quantum_universal(budget.t, budget.m)?.prob(o)))
                }
            }
        }
        _ => Ok(cached_machine(flavor, budget.t, budget.m)?.complexity(h)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitvm::{cached_universal, enumerate_tapes, run_vm};
    use crate::dist::{product_power, ExplicitDistribution};
    use proptest::prelude::*;

    fn bt(s: &str) -> BitTape {
        s.parse().unwrap()
    }

    /// Brute-force tuple probability straight from the definition: enumerate
    /// split points and shared tapes, then evaluate the element runs by
    /// enumerating their tails.
    fn brute_log2_prob(t: u32, m: u32, tuple: &[BitTape]) -> f64 {
        let k = t / 4;
        let budget = VmBudget::new(1, t, m).unwrap();
        let mut total = 0.0;
        for j in 0..=k {
            let tail_bits = 4 * (k - j);
            for prefix in 0..1u64 << (4 * j) {
                let mut d: BTreeMap<VmOutcome, f64> = BTreeMap::new();
                for tail in 0..1u64 << tail_bits {
                    let tape = BitTape::concat(&[
                        BitTape::from_u64(prefix, 4 * j as usize),
                        BitTape::from_u64(tail, tail_bits as usize),
                        BitTape::zeros((t % 4) as usize),
                    ]);
                    *d.entry(run_vm(&tape, &budget).unwrap()).or_default() += 1.0 / (1u64 << tail_bits) as f64;
                }
                let p = |y: &BitTape| d.get(&VmOutcome::Bits(y.clone())).copied().unwrap_or(0.0);
                let iid: f64 = tuple.iter().map(p).product();
                let mut pools = 0.0;
                let distinct: Vec<&BitTape> = {
                    let mut v: Vec<&BitTape> = tuple.iter().collect();
                    v.sort();
                    v.dedup();
                    v
                };
                let ps: Vec<f64> = distinct.iter().map(|y| p(y)).collect();
                for &r in &POOL_SIZES {
                    if distinct.len() > r as usize {
                        continue;
                    }
                    // Draw the pool one element at a time, tracking how many
                    // copies of each distinct tuple value it holds.
                    let mut states: BTreeMap<Vec<u32>, f64> = BTreeMap::from([(vec![0; ps.len()], 1.0)]);
                    for _ in 0..r {
                        let mut next: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
                        for (cs, w) in &states {
                            let other = 1.0 - ps.iter().sum::<f64>();
                            if other > 0.0 {
                                *next.entry(cs.clone()).or_default() += w * other;
                            }
                            for (i, pi) in ps.iter().enumerate() {
                                let mut c2 = cs.clone();
                                c2[i] += 1;
                                *next.entry(c2).or_default() += w * pi;
                            }
                        }
                        states = next;
                    }
                    let mut e = 0.0;
                    for (cs, w) in &states {
                        let mut v = *w;
                        for y in tuple {
                            let i = distinct.iter().position(|d| *d == y).unwrap();
                            v *= cs[i] as f64 / r as f64;
                        }
                        e += v;
                    }
                    pools += e / (2.0 * POOL_SIZES.len() as f64);
                }
                total += (0.5 * iid + pools) / (1u64 << (4 * j)) as f64 / (k + 1) as f64;
            }
        }
        total.log2()
    }

    #[test]
    fn matches_brute_force_definition() {
        let mach = TupleMachine::build(Flavor::Classical, 8, 1).unwrap();
        for tuple in [vec![bt("0"), bt("1")], vec![bt("1"), bt("1"), bt("1")], vec![bt("0"), bt("0"), bt("1"), bt("0")]] {
            let fast = mach.log2_prob(&Histogram::from_tapes(&tuple));
            let slow = brute_log2_prob(8, 1, &tuple);
            assert!((fast - slow).abs() < 1e-9, "{fast} vs {slow}");
        }
    }

    #[test]
    fn single_elements_reduce_to_the_universal_distribution() {
        let mach = TupleMachine::build(Flavor::Classical, 16, 2).unwrap();
        let u = cached_universal(16, 2).unwrap();
        for v in 0..4 {
            let x = BitTape::from_u64(v, 2);
            let h = Histogram::from_tapes([&x]);
            assert!((mach.complexity(&h) - u.neg_log2(&VmOutcome::Bits(x.clone()))).abs() < 1e-9);
        }
        let budget = VmBudget::new(1, 16, 2).unwrap();
        assert_eq!(joint_complexity(&[bt("01")], &budget, Flavor::Classical).unwrap(), crate::bitvm::ukt(&bt("01"), &budget).unwrap());
    }

    #[test]
    fn infinite_iff_some_element_is_unreachable() {
        let budget = VmBudget::new(1, 16, 8).unwrap();
        let brute = enumerate_tapes(&budget).unwrap();
        let reachable = |x: &BitTape| brute.contains_key(&VmOutcome::Bits(x.clone()));
        for (a, b) in [(0u64, 255u64), (0, 0b0110_1001), (0b1010_1010, 0)] {
            let (a, b) = (BitTape::from_u64(a, 8), BitTape::from_u64(b, 8));
            let k = joint_complexity(&[a.clone(), b.clone()], &budget, Flavor::Classical).unwrap();
            assert_eq!(k == f64::INFINITY, !(reachable(&a) && reachable(&b)));
        }
    }

    #[test]
    fn sums_to_at_most_one_over_pairs() {
        let mach = TupleMachine::build(Flavor::Classical, 12, 2).unwrap();
        let outs: Vec<VmOutcome> = std::iter::once(VmOutcome::Bottom)
            .chain((0..4).map(|v| VmOutcome::Bits(BitTape::from_u64(v, 2))))
            .collect();
        let mut total = 0.0;
        for a in &outs {
            for b in &outs {
                total += mach.log2_prob(&Histogram::from_outcomes([a, b])).exp2();
            }
        }
        assert!((total - 1.0).abs() < 1e-9, "{total}");
    }

    #[test]
    fn low_entropy_tuples_are_cheap() {
        // Many copies of a couple of reachable strings cost far less than
        // their i.i.d. universal probability would suggest.
        let mach = cached_machine(Flavor::Classical, 20, 8).unwrap();
        let u = cached_universal(20, 8).unwrap();
        let a = BitTape::from_u64(0, 8);
        let b = BitTape::from_u64(255, 8);
        let mut h = Histogram::new();
        h.add(VmOutcome::Bits(a.clone()), 500);
        h.add(VmOutcome::Bits(b.clone()), 500);
        let iid = 500.0 * (u.neg_log2(&VmOutcome::Bits(a)) + u.neg_log2(&VmOutcome::Bits(b)));
        assert!(mach.complexity(&h) < 1000.0 + 64.0);
        assert!(iid > 2000.0);
    }

    #[test]
    fn quantum_machine_builds() {
        let mach = TupleMachine::build(Flavor::Quantum, 16, 1).unwrap();
        assert!(mach.component_count() > 0);
        let q = crate::qsim::cached_quantum_universal(16, 1).unwrap();
        let h = Histogram::from_tapes([&bt("0")]);
        assert!((mach.log2_prob(&h) - q.prob(&VmOutcome::Bits(bt("0"))).log2()).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn honest_ratio_has_unit_mean(_seed in 0u8..1) {
            // E_{Y ~ D^s}[U_s(Y) / D^s(Y)] <= 1 for s = 2 over D = U itself.
            let mach = TupleMachine::build(Flavor::Classical, 12, 2).unwrap();
            let d: ExplicitDistribution<f64> = cached_universal(12, 2).unwrap().to_f64();
            let j = product_power(&d, 2).unwrap();
            let mut e = 0.0;
            for (t, p) in j.entries() {
                e += p * (mach.log2_prob(&Histogram::from_outcomes(t.iter())).exp2() / p);
            }
            prop_assert!(e <= 1.0 + 1e-9);
        }
    }
}
