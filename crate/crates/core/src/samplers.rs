// Copyright 2026 the Kolmoverify Authors
// SPDX-License-Identifier: Apache-2.0

//! Samplers and tuple adversaries.
//!
//! A [`DescribedSampler`] pairs an executable sampler with its description
//! length. Program-backed samplers run KVM-1 on `program ‖ r` with `r`
//! uniform, so their exact distributions come from the machine itself.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitTape;
use crate::bitvm::{
    continuation, finish_classical, prefix_distribution, run_vm, step_state, LevelState, Op, TraceEngine, VmBudget,
    VmOutcome, OPCODE_BITS, OPCODE_SPACE, T_MAX,
};
use crate::dist::{as_dyadic, tv_distance, ExplicitDistribution, Histogram, JointDistribution, Prob};
use crate::error::{Error, Result};
use crate::qsim::quantum_prefix_distribution;
use crate::stats::Categorical;

/// Description bits charged for the seed expander of a stretched sampler.
pub const EXPANDER_DESCRIPTION_BITS: u32 = 16;
/// Largest seed that is enumerated exactly.
pub const MAX_SEED_BITS: u32 = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerKind {
    ClassicalVm,
    QuantumCircuitProgram,
    ExplicitTable,
    PrgStretch,
}

/// Seed expanders for [`prg_stretch`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expander {
    /// The seed followed by zeros.
    Identity,
    /// xorshift64 (shifts 13, 7, 17) from a multiplicatively scrambled seed.
    /// Not a cryptographic generator.
    Xorshift,
}

impl Expander {
    pub fn expand(self, seed: u64, seed_bits: u32, len: u32) -> BitTape {
        match self {
            Expander::Identity => {
                let mut t = BitTape::from_u64(seed, seed_bits as usize);
                t.extend_from(&BitTape::zeros((len - seed_bits) as usize));
                t
            }
            Expander::Xorshift => {
                let mut state = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ 0xD1B5_4A32_D192_ED03;
                if state == 0 {
                    state = 0x2545_F491_4F6C_DD1D;
                }
                let mut out = BitTape::new();
                while out.len() < len as usize {
                    for _ in 0..2 {
                        state ^= state << 13;
                        state ^= state >> 7;
                        state ^= state << 17;
                    }
                    let take = (len as usize - out.len()).min(64);
                    out.extend_from(&BitTape::from_u64(state >> (64 - take), take));
                }
                out
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct StretchSpec {
    pub base: Arc<DescribedSampler>,
    pub seed_bits: u32,
    pub expander: Expander,
}

#[derive(Debug)]
pub struct DescribedSampler {
    pub label: String,
    pub kind: SamplerKind,
    pub program: Option<BitTape>,
    pub description_length: u32,
    pub budget: VmBudget,
    table: Option<ExplicitDistribution<BigRational>>,
    stretch: Option<StretchSpec>,
    exact: OnceLock<Option<ExplicitDistribution<BigRational>>>,
    float: OnceLock<ExplicitDistribution<f64>>,
    categorical: OnceLock<Categorical>,
}

impl Clone for DescribedSampler {
    fn clone(&self) -> Self {
        Self {
            label: self.label.clone(),
            kind: self.kind,
            program: self.program.clone(),
            description_length: self.description_length,
            budget: self.budget,
            table: self.table.clone(),
            stretch: self.stretch.clone(),
            exact: self.exact.clone(),
            float: self.float.clone(),
            categorical: self.categorical.clone(),
        }
    }
}

/// Default description length of an explicit table: each entry costs its
/// outcome bits plus twice the bits of its dyadic denominator.
pub fn table_description_bits(table: &ExplicitDistribution<BigRational>, m: u32) -> u32 {
    table
        .iter()
        .map(|(_, p)| m + 2 * as_dyadic(p).map(|(_, k)| k as u32).unwrap_or(64))
        .sum()
}

impl DescribedSampler {
    fn raw(label: &str, kind: SamplerKind, budget: VmBudget, description_length: u32) -> Self {
        Self {
            label: label.to_string(),
            kind,
            program: None,
            description_length,
            budget,
            table: None,
            stretch: None,
            exact: OnceLock::new(),
            float: OnceLock::new(),
            categorical: OnceLock::new(),
        }
    }

    /// KVM-1 on `program ‖ r`, `r` uniform over the remaining bits.
    pub fn classical_vm(label: &str, program: BitTape, budget: VmBudget) -> Result<Self> {
        budget.validate()?;
        if program.len() > budget.t as usize {
            return Err(Error::InvalidArgument(format!("program longer than t={}", budget.t)));
        }
        if budget.t > T_MAX {
            return Err(Error::BudgetTooLarge { t: budget.t, cap: T_MAX });
        }
        let mut s = Self::raw(label, SamplerKind::ClassicalVm, budget, program.len() as u32);
        s.program = Some(program);
        Ok(s)
    }

    /// The quantum pipeline on tapes starting with `program`.
    pub fn quantum_program(label: &str, program: BitTape, budget: VmBudget) -> Result<Self> {
        budget.validate()?;
        if program.len() > budget.t as usize {
            return Err(Error::InvalidArgument(format!("program longer than t={}", budget.t)));
        }
        let mut s = Self::raw(label, SamplerKind::QuantumCircuitProgram, budget, program.len() as u32);
        s.program = Some(program);
        Ok(s)
    }

    pub fn explicit_table(
        label: &str,
        table: ExplicitDistribution<BigRational>,
        budget: VmBudget,
        description_length: Option<u32>,
    ) -> Result<Self> {
        budget.validate()?;
        for o in table.support() {
            if let VmOutcome::Bits(b) = o {
                if b.len() != budget.m as usize {
                    return Err(Error::LengthMismatch { expected: budget.m as usize, actual: b.len() });
                }
            }
        }
        let dl = description_length.unwrap_or_else(|| table_description_bits(&table, budget.m));
        let mut s = Self::raw(label, SamplerKind::ExplicitTable, budget, dl);
        s.table = Some(table);
        Ok(s)
    }

    /// Uniform over all `m`-bit strings.
    pub fn uniform_table(label: &str, budget: VmBudget) -> Result<Self> {
        let m = budget.m as usize;
        if m > 20 {
            return Err(Error::InvalidArgument("uniform tables are limited to 20 bits".into()));
        }
        let t = ExplicitDistribution::uniform((0..1u64 << m).map(|v| VmOutcome::Bits(BitTape::from_u64(v, m))))?;
        Self::explicit_table(label, t, budget, Some(budget.m + 8))
    }

    pub fn table(&self) -> Option<&ExplicitDistribution<BigRational>> {
        self.table.as_ref()
    }

    pub fn stretch(&self) -> Option<&StretchSpec> {
        self.stretch.as_ref()
    }

    pub fn is_program_backed(&self) -> bool {
        matches!(self.kind, SamplerKind::ClassicalVm | SamplerKind::QuantumCircuitProgram)
    }

    pub fn is_quantum(&self) -> bool {
        match self.kind {
            SamplerKind::QuantumCircuitProgram => true,
            SamplerKind::PrgStretch => self.stretch.as_ref().is_some_and(|s| s.base.is_quantum()),
            _ => false,
        }
    }

    /// Number of uniform bits the sampler consumes, when it is a
    /// deterministic function of them.
    pub fn randomness_bits(&self) -> Option<u32> {
        match self.kind {
            SamplerKind::ClassicalVm => Some(self.budget.t - self.program.as_ref().unwrap().len() as u32),
            SamplerKind::QuantumCircuitProgram => None,
            SamplerKind::ExplicitTable => {
                let t = self.table.as_ref().unwrap();
                t.iter().map(|(_, p)| as_dyadic(p).map(|(_, k)| k as u32)).collect::<Option<Vec<_>>>().map(|v| v.into_iter().max().unwrap_or(0))
            }
            SamplerKind::PrgStretch => Some(self.stretch.as_ref().unwrap().seed_bits),
        }
    }

    /// Runs the sampler on an explicit random tape of [`Self::randomness_bits`]
    /// bits.
    pub fn run_on_tape(&self, r: &BitTape) -> Result<VmOutcome> {
        let need = self
            .randomness_bits()
            .ok_or_else(|| Error::InvalidArgument(format!("sampler `{}` is not randomness-explicit", self.label)))?;
        if r.len() != need as usize {
            return Err(Error::LengthMismatch { expected: need as usize, actual: r.len() });
        }
        match self.kind {
            SamplerKind::ClassicalVm => {
                let tape = BitTape::concat(&[self.program.clone().unwrap(), r.clone()]);
                run_vm(&tape, &self.budget)
            }
            SamplerKind::ExplicitTable => {
                // Inverse CDF over the outcomes in order, with r read as an
                // integer in [0, 2^need).
                let v = BigRational::new(
                    num_bigint::BigInt::from(if need == 0 { 0 } else { r.to_u64() }),
                    num_bigint::BigInt::from(1u8) << need,
                );
                let mut acc = BigRational::zero();
                let table = self.table.as_ref().unwrap();
                for (o, p) in table.iter() {
                    acc += p.clone();
                    if v < acc {
                        return Ok(o.clone());
                    }
                }
                Ok(table.support().last().cloned().unwrap())
            }
            SamplerKind::PrgStretch => {
                let sp = self.stretch.as_ref().unwrap();
                let ell = sp.base.randomness_bits().unwrap();
                sp.base.run_on_tape(&sp.expander.expand(r.to_u64(), sp.seed_bits, ell))
            }
            SamplerKind::QuantumCircuitProgram => unreachable!(),
        }
    }

    /// Exact rational distribution, or `None` for quantum samplers.
    pub fn exact_distribution(&self) -> Result<Option<&ExplicitDistribution<BigRational>>> {
        if let Some(d) = self.exact.get() {
            return Ok(d.as_ref());
        }
        let d = match self.kind {
            SamplerKind::ClassicalVm => Some(prefix_distribution(self.program.as_ref().unwrap(), &self.budget)?),
            SamplerKind::ExplicitTable => self.table.clone(),
            SamplerKind::QuantumCircuitProgram => None,
            SamplerKind::PrgStretch => {
                let sp = self.stretch.as_ref().unwrap();
                let b = sp.seed_bits;
                let mut tally: BTreeMap<VmOutcome, u128> = BTreeMap::new();
                for seed in 0..1u64 << b {
                    *tally.entry(self.run_on_tape(&BitTape::from_u64(seed, b as usize))?).or_default() += 1;
                }
                Some(ExplicitDistribution::from_entries(
                    tally.into_iter().map(|(o, c)| (o, BigRational::from_ratio(c, 1u128 << b))),
                )?)
            }
        };
        let _ = self.exact.set(d);
        Ok(self.exact.get().unwrap().as_ref())
    }

    /// Float distribution for every kind.
    pub fn distribution(&self) -> Result<&ExplicitDistribution<f64>> {
        if let Some(d) = self.float.get() {
            return Ok(d);
        }
        let d = match self.kind {
            SamplerKind::QuantumCircuitProgram => quantum_prefix_distribution(self.program.as_ref().unwrap(), &self.budget)?,
            _ => self.exact_distribution()?.unwrap().to_f64(),
        };
        let _ = self.float.set(d);
        Ok(self.float.get().unwrap())
    }

    pub fn categorical(&self) -> Result<&Categorical> {
        if let Some(c) = self.categorical.get() {
            return Ok(c);
        }
        let c = Categorical::new(self.distribution()?);
        let _ = self.categorical.set(c);
        Ok(self.categorical.get().unwrap())
    }

    /// One draw with a caller-owned generator.
    pub fn sample_with(&self, rng: &mut impl Rng) -> Result<VmOutcome> {
        Ok(self.categorical()?.sample(rng).clone())
    }

    /// One draw from a fresh generator seeded with `seed`.
    pub fn sample(&self, seed: u64) -> Result<VmOutcome> {
        self.sample_with(&mut crate::rng::rng_from(seed))
    }
}

/// Runs `base` on expanded short seeds instead of full-length random tapes.
pub fn prg_stretch(base: &Arc<DescribedSampler>, seed_bits: u32, expander: Expander) -> Result<DescribedSampler> {
    let ell = base
        .randomness_bits()
        .ok_or_else(|| Error::InvalidArgument(format!("sampler `{}` is not randomness-explicit", base.label)))?;
    if seed_bits > ell || (seed_bits == ell && expander != Expander::Identity) {
        return Err(Error::SeedTooLarge { seed_bits, tape_bits: ell });
    }
    if seed_bits > MAX_SEED_BITS {
        return Err(Error::SeedTooLarge { seed_bits, tape_bits: MAX_SEED_BITS });
    }
    let label = format!("{}-prg{}", base.label, seed_bits);
    let mut s = DescribedSampler::raw(
        &label,
        SamplerKind::PrgStretch,
        base.budget,
        base.description_length + EXPANDER_DESCRIPTION_BITS,
    );
    s.stretch = Some(StretchSpec { base: base.clone(), seed_bits, expander });
    Ok(s)
}

/// Two uniform distributions on the halves of `{0,1}^m` split by the parity
/// of `<x, key>`. They are at distance 1 yet share every symmetric statistic,
/// so a collision tester cannot tell them apart.
pub fn far_close_pair(n_scale: u32) -> Result<(DescribedSampler, DescribedSampler)> {
    if !(2..=16).contains(&n_scale) {
        return Err(Error::InvalidArgument("far_close_pair supports 2 <= n_scale <= 16".into()));
    }
    let m = n_scale as usize;
    let mut key = crate::rng::splitmix64(0xFA2C_105E ^ n_scale as u64) & ((1u64 << m) - 1);
    if key == 0 {
        key = 1;
    }
    let half = |parity: u32| {
        ExplicitDistribution::<BigRational>::uniform(
            (0..1u64 << m).filter(|x| (x & key).count_ones() % 2 == parity).map(|x| VmOutcome::Bits(BitTape::from_u64(x, m))),
        )
    };
    let budget = VmBudget::new(n_scale, 20, n_scale)?;
    let a = DescribedSampler::explicit_table(&format!("far{n_scale}-even"), half(0)?, budget, Some(n_scale + 16))?;
    let b = DescribedSampler::explicit_table(&format!("far{n_scale}-odd"), half(1)?, budget, Some(n_scale + 16))?;
    Ok((a, b))
}

/// One classical sampler of a given budget: a program prefix (possibly ending
/// mid-opcode) followed by uniform bits.
#[derive(Clone, Debug)]
pub struct ClassicalMember {
    /// Mnemonic of a representative prefix (`0`,`1`,`D`,`H`,`N`), then
    /// `+b:v` for a partial opcode of `b` bits with value `v`.
    pub prefix: String,
    pub distribution: ExplicitDistribution<BigRational>,
}

fn mnemonic(op: Op) -> char {
    match op {
        Op::Halt => 'H',
        Op::Emit0 => '0',
        Op::Emit1 => '1',
        Op::Dbl => 'D',
        Op::Nop => 'N',
    }
}

/// Every distinct output distribution of classical samplers at budget
/// `(t, m)`, over all program prefixes of every length.
pub fn classical_family(t: u32, m: u32) -> Result<Vec<ClassicalMember>> {
    VmBudget::new(1, t, m)?;
    if t > T_MAX {
        return Err(Error::BudgetTooLarge { t, cap: T_MAX });
    }
    let k = t / OPCODE_BITS;
    let cap = Some(m as usize);
    let ops = [Op::Halt, Op::Emit0, Op::Emit1, Op::Dbl, Op::Nop];
    let mut eng = TraceEngine::new(cap);
    let dist_of = |eng: &mut TraceEngine, parts: &[(LevelState, u128)], r: u32| -> ExplicitDistribution<BigRational> {
        let mut tally: BTreeMap<VmOutcome, u128> = BTreeMap::new();
        let mut den = 0u128;
        for (st, w) in parts {
            for (raw, c) in continuation(eng, st, r).iter() {
                *tally.entry(finish_classical(raw.clone(), m)).or_default() += w * c;
            }
            den += w * OPCODE_SPACE.pow(r);
        }
        ExplicitDistribution::from_entries(tally.into_iter().map(|(o, c)| (o, BigRational::from_ratio(c, den))))
            .expect("continuations normalize")
    };
    let mut seen: BTreeMap<Vec<(VmOutcome, BigRational)>, String> = BTreeMap::new();
    let mut level: BTreeMap<LevelState, String> = BTreeMap::from([(LevelState::Running(BitTape::new()), String::new())]);
    for j in 0..=k {
        let r = k - j;
        for (st, name) in &level {
            let d = dist_of(&mut eng, &[(st.clone(), 1)], r);
            seen.entry(d.iter().map(|(o, p)| (o.clone(), p.clone())).collect()).or_insert_with(|| name.clone());
            if r == 0 {
                continue;
            }
            // Prefixes ending 1 to 3 bits into the next opcode.
            for bits in 1..4u32 {
                for head in 0..1u8 << bits {
                    let pad = 4 - bits;
                    let parts: Vec<(LevelState, u128)> = (0..1u8 << pad)
                        .map(|tail| (step_state(st.clone(), Op::from_nibble((head << pad) | tail), cap), 1u128))
                        .collect();
                    let d = dist_of(&mut eng, &parts, r - 1);
                    seen.entry(d.iter().map(|(o, p)| (o.clone(), p.clone())).collect())
                        .or_insert_with(|| format!("{name}+{bits}:{head}"));
                }
            }
        }
        if j == k {
            break;
        }
        let mut next: BTreeMap<LevelState, String> = BTreeMap::new();
        for (st, name) in &level {
            for &op in &ops {
                let ns = step_state(st.clone(), op, cap);
                let nn = format!("{name}{}", mnemonic(op));
                next.entry(ns).or_insert(nn);
            }
        }
        level = next;
    }
    Ok(seen
        .into_iter()
        .map(|(entries, prefix)| ClassicalMember {
            prefix,
            distribution: ExplicitDistribution::from_entries(entries).expect("normalized"),
        })
        .collect())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QasConfig {
    pub label: String,
    pub program: BitTape,
    /// Quantum budget.
    pub t_q: u32,
    pub m: u32,
    /// Classical budget the certificate is relative to.
    pub t_c: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QasCertificate {
    pub t_c: u32,
    /// Minimum distance to any classical sampler of budget `t_c`.
    pub min_distance: f64,
    pub closest_prefix: String,
    pub family_size: usize,
}

/// A circuit-program sampler together with its exact distance to the whole
/// classical family of budget `t_c`.
pub fn toy_qas(cfg: &QasConfig) -> Result<(DescribedSampler, QasCertificate)> {
    let budget = VmBudget::new(1, cfg.t_q, cfg.m)?;
    let s = DescribedSampler::quantum_program(&cfg.label, cfg.program.clone(), budget)?;
    let cert = qas_certificate(s.distribution()?, cfg.t_c, cfg.m)?;
    Ok((s, cert))
}

pub fn qas_certificate(q: &ExplicitDistribution<f64>, t_c: u32, m: u32) -> Result<QasCertificate> {
    let family = classical_family(t_c, m)?;
    let mut best = (f64::INFINITY, String::new());
    for mem in &family {
        let d = tv_distance(q, &mem.distribution.to_f64());
        if d < best.0 {
            best = (d, mem.prefix.clone());
        }
    }
    Ok(QasCertificate { t_c, min_distance: best.0, closest_prefix: best.1, family_size: family.len() })
}

/// How a tuple adversary produces its `s` samples.
#[derive(Clone, Debug)]
pub enum TupleStrategy {
    /// Independent draws from one sampler.
    Iid(Arc<DescribedSampler>),
    /// Independent blocks drawn from a joint. When `s` is not a multiple of
    /// the arity, the last block is cut short.
    Correlated(JointDistribution<f64>),
    /// Per tuple, run `prefix` plus `shared_opcodes` random opcodes once, then
    /// finish every element independently from that shared state.
    ProgramBacked { prefix: BitTape, budget: VmBudget, shared_opcodes: u32 },
    /// Draws i.i.d. tuples from `base` and keeps only those on which a
    /// two-sided estimator with the given seed and failure rate overestimates
    /// the probability. Models an adversary that knows the estimator.
    EstimatorAware { base: Arc<DescribedSampler>, oracle_seed: u64, delta: f64 },
}

#[derive(Clone, Debug)]
pub struct TupleAdversary {
    pub label: String,
    pub strategy: TupleStrategy,
    pub m: u32,
}

impl TupleAdversary {
    pub fn iid(s: Arc<DescribedSampler>) -> Self {
        Self { label: s.label.clone(), m: s.budget.m, strategy: TupleStrategy::Iid(s) }
    }

    /// The uniform-index marginal of the emitted `s`-tuples. For the
    /// estimator-aware strategy this is the base distribution: the filtering
    /// event is a hash of the histogram and does not favour any outcome.
    pub fn marginal(&self, s: u64) -> Result<ExplicitDistribution<f64>> {
        match &self.strategy {
            TupleStrategy::Iid(smp) => Ok(smp.distribution()?.clone()),
            TupleStrategy::Correlated(j) => {
                let a = j.arity() as u64;
                let (full, rem) = (s / a, s % a);
                let mut acc: BTreeMap<VmOutcome, f64> = BTreeMap::new();
                for i in 0..a as usize {
                    let w = (full + (i < rem as usize) as u64) as f64 / s as f64;
                    for (o, p) in j.coordinate_marginal(i).iter() {
                        *acc.entry(o.clone()).or_default() += w * p;
                    }
                }
                ExplicitDistribution::from_entries(acc)
            }
            TupleStrategy::ProgramBacked { prefix, budget, .. } => Ok(prefix_distribution(prefix, budget)?.to_f64()),
            TupleStrategy::EstimatorAware { base, .. } => Ok(base.distribution()?.clone()),
        }
    }

    pub fn sample_histogram(&self, s: u64, rng: &mut impl Rng) -> Result<Histogram> {
        match &self.strategy {
            TupleStrategy::Iid(smp) => Ok(smp.categorical()?.sample_histogram(s, rng)),
            TupleStrategy::Correlated(j) => {
                // Whole blocks, then the leading coordinates of one more block
                // when `s` is not a multiple of the arity.
                let a = j.arity() as u64;
                let blocks: Vec<(Vec<VmOutcome>, f64)> = j.entries().iter().map(|(t, p)| (t.clone(), *p)).collect();
                let idx = ExplicitDistribution::from_entries_unnormalized(
                    blocks.iter().enumerate().map(|(i, (_, p))| (VmOutcome::Bits(BitTape::from_u64(i as u64, 32)), *p)),
                )?;
                let cat = Categorical::new(&idx);
                let picks = cat.sample_histogram(s / a, rng);
                let mut h = Histogram::new();
                for (o, n) in picks.iter() {
                    let i = o.bits().unwrap().to_u64() as usize;
                    for y in &blocks[i].0 {
                        h.add(y.clone(), n);
                    }
                }
                let rem = (s % a) as usize;
                if rem > 0 {
                    let i = cat.sample(rng).bits().unwrap().to_u64() as usize;
                    for y in &blocks[i].0[..rem] {
                        h.add(y.clone(), 1);
                    }
                }
                Ok(h)
            }
            TupleStrategy::ProgramBacked { prefix, budget, shared_opcodes } => {
                let shared_bits = (4 * shared_opcodes) as usize;
                if prefix.len() + shared_bits > budget.t as usize {
                    return Err(Error::InvalidArgument("shared opcodes exceed the budget".into()));
                }
                let shared = BitTape::from_u64(rng.random::<u64>() & mask(shared_bits), shared_bits);
                let full = BitTape::concat(&[prefix.clone(), shared]);
                let d = prefix_distribution(&full, budget)?.to_f64();
                Ok(Categorical::new(&d).sample_histogram(s, rng))
            }
            TupleStrategy::EstimatorAware { base, oracle_seed, delta } => {
                let cat = base.categorical()?;
                for _ in 0..100_000 {
                    let h = cat.sample_histogram(s, rng);
                    if crate::verify::two_sided_fails(*oracle_seed, &h, *delta) {
                        return Ok(h);
                    }
                }
                Err(Error::InvalidArgument("estimator-aware adversary found no failing tuple".into()))
            }
        }
    }
}

fn mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// The frozen sampler corpus shipped with the crate.
pub const CORPUS_V1: &str = include_str!("../corpus/v1.json");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TableSpec {
    /// `"uniform"`: every `m`-bit string.
    Named(String),
    Entries(Vec<crate::io::EntryDoc>),
}

/// One corpus entry as stored on disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerDescriptor {
    pub label: String,
    pub kind: SamplerKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub program_hex: Option<String>,
    pub budget: VmBudget,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<TableSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description_length: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_bits: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expander: Option<Expander>,
    /// For circuit samplers: the classical budget they are compared against.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classical_budget: Option<u32>,
}

#[derive(Debug)]
pub struct Corpus {
    pub descriptors: Vec<SamplerDescriptor>,
    samplers: Vec<Arc<DescribedSampler>>,
}

impl Corpus {
    pub fn from_json(src: &str) -> Result<Self> {
        let descriptors: Vec<SamplerDescriptor> = serde_json::from_str(src)?;
        let mut samplers: Vec<Arc<DescribedSampler>> = Vec::with_capacity(descriptors.len());
        for d in &descriptors {
            if samplers.iter().any(|s| s.label == d.label) {
                return Err(Error::Parse(format!("duplicate corpus label `{}`", d.label)));
            }
            let program = || -> Result<BitTape> {
                BitTape::parse_hex_dump(
                    d.program_hex.as_deref().ok_or_else(|| Error::Parse(format!("`{}` lacks program_hex", d.label)))?,
                )
            };
            let s = match d.kind {
                SamplerKind::ClassicalVm => DescribedSampler::classical_vm(&d.label, program()?, d.budget)?,
                SamplerKind::QuantumCircuitProgram => DescribedSampler::quantum_program(&d.label, program()?, d.budget)?,
                SamplerKind::ExplicitTable => match &d.table {
                    Some(TableSpec::Named(n)) if n == "uniform" => {
                        let mut s = DescribedSampler::uniform_table(&d.label, d.budget)?;
                        if let Some(dl) = d.description_length {
                            s.description_length = dl;
                        }
                        s
                    }
                    Some(TableSpec::Entries(e)) => {
                        let doc = crate::io::DistributionDoc { budget: None, mode: None, entries: e.clone() };
                        DescribedSampler::explicit_table(&d.label, doc.to_exact()?, d.budget, d.description_length)?
                    }
                    _ => return Err(Error::Parse(format!("`{}` needs a table", d.label))),
                },
                SamplerKind::PrgStretch => {
                    let base_label = d.base.as_deref().ok_or_else(|| Error::Parse(format!("`{}` lacks base", d.label)))?;
                    let base = samplers
                        .iter()
                        .find(|s| s.label == base_label)
                        .ok_or_else(|| Error::UnknownSampler(base_label.to_string()))?;
                    let seed_bits = d.seed_bits.ok_or_else(|| Error::Parse(format!("`{}` lacks seed_bits", d.label)))?;
                    let mut s = prg_stretch(base, seed_bits, d.expander.unwrap_or(Expander::Xorshift))?;
                    s.label = d.label.clone();
                    s
                }
            };
            samplers.push(Arc::new(s));
        }
        Ok(Self { descriptors, samplers })
    }

    /// The shipped corpus, parsed once.
    pub fn v1() -> &'static Corpus {
        static V1: OnceLock<Corpus> = OnceLock::new();
        V1.get_or_init(|| Corpus::from_json(CORPUS_V1).expect("the shipped corpus parses"))
    }

    pub fn samplers(&self) -> &[Arc<DescribedSampler>] {
        &self.samplers
    }

    pub fn get(&self, label: &str) -> Result<Arc<DescribedSampler>> {
        self.samplers
            .iter()
            .find(|s| s.label == label)
            .cloned()
            .ok_or_else(|| Error::UnknownSampler(label.to_string()))
    }

    pub fn descriptor(&self, label: &str) -> Result<&SamplerDescriptor> {
        self.descriptors
            .iter()
            .find(|d| d.label == label)
            .ok_or_else(|| Error::UnknownSampler(label.to_string()))
    }

    /// Toy QAS configuration of a circuit sampler with a classical budget.
    pub fn qas_config(&self, label: &str) -> Result<QasConfig> {
        let d = self.descriptor(label)?;
        let s = self.get(label)?;
        match (d.kind, d.classical_budget) {
            (SamplerKind::QuantumCircuitProgram, Some(t_c)) => Ok(QasConfig {
                label: d.label.clone(),
                program: s.program.clone().unwrap(),
                t_q: d.budget.t,
                m: d.budget.m,
                t_c,
            }),
            _ => Err(Error::InvalidArgument(format!("`{label}` is not a circuit sampler with a classical budget"))),
        }
    }
}

/// Exact entropy of a rational distribution, for the entropy-collapse checks.
pub fn exact_entropy(d: &ExplicitDistribution<BigRational>) -> f64 {
    d.iter()
        .map(|(_, p)| {
            let v = p.to_f64().unwrap();
            v * p.neg_log2()
        })
        .sum()
}
