// Copyright 2026 the Kolmoverify Authors
// SPDX-License-Identifier: Apache-2.0

//! KVM-1, the pinned toy universal machine, and its exact output distribution.
//!
//! The tape is read as a stream of 4-bit opcodes:
//!
//! | bits        | opcode | effect                                            |
//! |-------------|--------|---------------------------------------------------|
//! | `0000`      | HALT   | stop                                              |
//! | `0001`      | EMIT0  | append `0` to the output                          |
//! | `0010`      | EMIT1  | append `1`                                        |
//! | `0011`      | DBL    | append a copy of the output (no-op when empty)    |
//! | `0100-1111` | NOP    |                                                   |
//!
//! Each opcode costs four steps, so a `t`-bit tape runs at most `t / 4`
//! opcodes and the trailing `t mod 4` bits are never read. Running off the end
//! of the tape is an implicit HALT. A halt whose output is not exactly `m`
//! bits long yields ⊥.
//!
//! Because only the opcode trace matters, the output distribution over all
//! `2^t` tapes is computed by a memoized recursion over (output so far,
//! opcodes left) rather than by touching every tape. [`enumerate_tapes`] does
//! the literal enumeration and serves as the cross-check.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_rational::BigRational;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitTape;
use crate::dist::ExplicitDistribution;
use crate::error::{Error, Result};
use crate::extreal::neg_log2_dyadic;

/// Largest step budget accepted in exact mode.
pub const T_MAX: u32 = 24;
pub const OPCODE_BITS: u32 = 4;
/// Number of distinct opcode nibbles.
pub const OPCODE_SPACE: u128 = 16;
/// Nibbles that decode to NOP.
pub const NOP_WEIGHT: u128 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Halt,
    Emit0,
    Emit1,
    Dbl,
    Nop,
}

impl Op {
    pub fn from_nibble(n: u8) -> Op {
        match n & 0xf {
            0 => Op::Halt,
            1 => Op::Emit0,
            2 => Op::Emit1,
            3 => Op::Dbl,
            _ => Op::Nop,
        }
    }

    /// The canonical encoding; NOP encodes as `0100`.
    pub fn nibble(self) -> u8 {
        match self {
            Op::Halt => 0,
            Op::Emit0 => 1,
            Op::Emit1 => 2,
            Op::Dbl => 3,
            Op::Nop => 4,
        }
    }
}

/// Assembles a program from opcodes, four bits each.
pub fn assemble(ops: &[Op]) -> BitTape {
    let mut t = BitTape::new();
    for op in ops {
        t.extend_from(&BitTape::from_u64(op.nibble() as u64, 4));
    }
    t
}

/// Assembles a compact mnemonic string: `0` EMIT0, `1` EMIT1, `D` DBL,
/// `H` HALT, `N` NOP.
pub fn assemble_str(src: &str) -> Result<BitTape> {
    let ops = src
        .chars()
        .map(|c| match c {
            '0' => Ok(Op::Emit0),
            '1' => Ok(Op::Emit1),
            'D' => Ok(Op::Dbl),
            'H' => Ok(Op::Halt),
            'N' => Ok(Op::Nop),
            other => Err(Error::Parse(format!("unknown mnemonic `{other}`"))),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(&ops))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VmBudget {
    /// Instance size. The machine never reads it; it only selects schedules.
    pub n: u32,
    /// Step budget, equal to the tape length in bits.
    pub t: u32,
    /// Required output length in bits.
    pub m: u32,
}

impl VmBudget {
    pub fn new(n: u32, t: u32, m: u32) -> Result<Self> {
        if n == 0 || t == 0 || m == 0 {
            return Err(Error::InvalidBudget(format!("n, t and m must be positive (n={n}, t={t}, m={m})")));
        }
        Ok(Self { n, t, m })
    }

    pub fn opcodes(&self) -> u32 {
        self.t / OPCODE_BITS
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.n, self.t, self.m).map(|_| ())
    }
}

/// A machine output: an `m`-bit string or the failure symbol ⊥.
///
/// ⊥ sorts before every string.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VmOutcome {
    Bottom,
    Bits(BitTape),
}

impl VmOutcome {
    pub fn bits(&self) -> Option<&BitTape> {
        match self {
            VmOutcome::Bits(b) => Some(b),
            VmOutcome::Bottom => None,
        }
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, VmOutcome::Bottom)
    }
}

impl fmt::Display for VmOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VmOutcome::Bottom => f.write_str("⊥"),
            VmOutcome::Bits(b) => write!(f, "{b}"),
        }
    }
}

impl fmt::Debug for VmOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for VmOutcome {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "⊥" {
            Ok(VmOutcome::Bottom)
        } else {
            s.parse().map(VmOutcome::Bits)
        }
    }
}

impl Serialize for VmOutcome {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for VmOutcome {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<BitTape> for VmOutcome {
    fn from(b: BitTape) -> Self {
        VmOutcome::Bits(b)
    }
}

/// Result of running the machine without an output-length requirement.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RawRun {
    Output(BitTape),
    /// The output grew past the cap and can no longer match.
    Overflow,
}

fn apply(op: Op, out: &mut BitTape) -> bool {
    match op {
        Op::Halt => return false,
        Op::Emit0 => out.push(false),
        Op::Emit1 => out.push(true),
        Op::Dbl => {
            let copy = out.clone();
            out.extend_from(&copy);
        }
        Op::Nop => {}
    }
    true
}

/// Runs the opcodes of `tape` that fit in a `t`-step budget. Outputs longer
/// than `cap` are reported as [`RawRun::Overflow`] as soon as they appear.
pub fn run_vm_raw(tape: &BitTape, t: u32, cap: Option<usize>) -> RawRun {
    let ops = (t.min(tape.len() as u32) / OPCODE_BITS) as usize;
    let mut out = BitTape::new();
    for i in 0..ops {
        let op = Op::from_nibble(tape.read_uint(4 * i, 4).unwrap() as u8);
        if !apply(op, &mut out) {
            break;
        }
        if cap.is_some_and(|c| out.len() > c) {
            return RawRun::Overflow;
        }
    }
    RawRun::Output(out)
}

/// Runs the machine on a `t`-bit tape and returns the `m`-bit output, or ⊥.
pub fn run_vm(tape: &BitTape, budget: &VmBudget) -> Result<VmOutcome> {
    if tape.len() != budget.t as usize {
        return Err(Error::LengthMismatch { expected: budget.t as usize, actual: tape.len() });
    }
    Ok(finish_classical(run_vm_raw(tape, budget.t, Some(budget.m as usize)), budget.m))
}

pub(crate) fn finish_classical(r: RawRun, m: u32) -> VmOutcome {
    match r {
        RawRun::Output(b) if b.len() == m as usize => VmOutcome::Bits(b),
        _ => VmOutcome::Bottom,
    }
}

/// Packed fast path for exhaustive enumeration: tape and output as integers.
/// Returns the output value or `None` for ⊥. Requires `m <= 62`.
fn run_packed(tape: u64, t: u32, m: u32) -> Option<u64> {
    let ops = t / OPCODE_BITS;
    let (mut val, mut len) = (0u64, 0u32);
    for i in 0..ops {
        let nib = ((tape >> (t - 4 * (i + 1))) & 0xf) as u8;
        match Op::from_nibble(nib) {
            Op::Halt => break,
            Op::Emit0 => {
                val <<= 1;
                len += 1;
            }
            Op::Emit1 => {
                val = (val << 1) | 1;
                len += 1;
            }
            Op::Dbl => {
                if len > 0 {
                    if 2 * len > m {
                        return None;
                    }
                    val = (val << len) | val;
                    len *= 2;
                }
            }
            Op::Nop => {}
        }
        if len > m {
            return None;
        }
    }
    (len == m).then_some(val)
}

/// Literal enumeration of all `2^t` tapes, tallied by outcome.
pub fn enumerate_tapes(budget: &VmBudget) -> Result<BTreeMap<VmOutcome, u128>> {
    if budget.t > T_MAX {
        return Err(Error::BudgetTooLarge { t: budget.t, cap: T_MAX });
    }
    let (t, m) = (budget.t, budget.m);
    let tally: HashMap<Option<u64>, u128> = if m <= 62 {
        (0..1u64 << t)
            .into_par_iter()
            .fold(HashMap::new, |mut acc: HashMap<Option<u64>, u128>, tape| {
                *acc.entry(run_packed(tape, t, m)).or_default() += 1;
                acc
            })
            .reduce(HashMap::new, merge_counts)
    } else {
        let mut acc = HashMap::new();
        for tape in 0..1u64 << t {
            let o = run_vm(&BitTape::from_u64(tape, t as usize), budget)?;
            *acc.entry(o.bits().map(|b| b.to_u64())).or_default() += 1u128;
        }
        acc
    };
    Ok(tally
        .into_iter()
        .map(|(k, c)| {
            let o = match k {
                Some(v) => VmOutcome::Bits(BitTape::from_u64(v, m as usize)),
                None => VmOutcome::Bottom,
            };
            (o, c)
        })
        .collect())
}

fn merge_counts<K: std::hash::Hash + Eq>(mut a: HashMap<K, u128>, b: HashMap<K, u128>) -> HashMap<K, u128> {
    for (k, v) in b {
        *a.entry(k).or_default() += v;
    }
    a
}

pub(crate) type Counts = BTreeMap<RawRun, u128>;

/// Memoized count of opcode sequences by final output.
///
/// `counts(buf, r)` maps each final output to the number of the `16^r`
/// opcode sequences that, started from output `buf`, end there.
pub(crate) struct TraceEngine {
    cap: Option<usize>,
    memo: HashMap<(BitTape, u32), Arc<Counts>>,
}

impl TraceEngine {
    pub(crate) fn new(cap: Option<usize>) -> Self {
        Self { cap, memo: HashMap::new() }
    }

    fn child(&mut self, buf: BitTape, r: u32, scale: u128, into: &mut Counts) {
        if self.cap.is_some_and(|c| buf.len() > c) {
            *into.entry(RawRun::Overflow).or_default() += scale * OPCODE_SPACE.pow(r);
            return;
        }
        let sub = self.counts(&buf, r);
        for (k, v) in sub.iter() {
            *into.entry(k.clone()).or_default() += scale * v;
        }
    }

    pub(crate) fn counts(&mut self, buf: &BitTape, r: u32) -> Arc<Counts> {
        if let Some(c) = self.memo.get(&(buf.clone(), r)) {
            return c.clone();
        }
        let mut out = Counts::new();
        if r == 0 {
            out.insert(RawRun::Output(buf.clone()), 1);
        } else {
            *out.entry(RawRun::Output(buf.clone())).or_default() += OPCODE_SPACE.pow(r - 1);
            let mut b0 = buf.clone();
            b0.push(false);
            self.child(b0, r - 1, 1, &mut out);
            let mut b1 = buf.clone();
            b1.push(true);
            self.child(b1, r - 1, 1, &mut out);
            let dbl = if buf.is_empty() { buf.clone() } else { BitTape::concat(&[buf.clone(), buf.clone()]) };
            self.child(dbl, r - 1, 1, &mut out);
            self.child(buf.clone(), r - 1, NOP_WEIGHT, &mut out);
        }
        let out = Arc::new(out);
        self.memo.insert((buf.clone(), r), out.clone());
        out
    }
}

/// Machine state between opcodes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum LevelState {
    Running(BitTape),
    Halted(BitTape),
    Overflow,
}

/// All states after `j` opcodes from the empty output, for every
/// `j = 0..=levels`, with the number of the `16^j` opcode prefixes reaching
/// each.
pub(crate) fn level_states(levels: u32, cap: Option<usize>) -> Vec<BTreeMap<LevelState, u128>> {
    let mut cur = BTreeMap::from([(LevelState::Running(BitTape::new()), 1u128)]);
    let mut all = vec![cur.clone()];
    for _ in 0..levels {
        let mut next: BTreeMap<LevelState, u128> = BTreeMap::new();
        for (st, c) in &cur {
            match st {
                LevelState::Running(b) => {
                    let mut push = |s: LevelState, w: u128| {
                        let s = match s {
                            LevelState::Running(ref nb) if cap.is_some_and(|cp| nb.len() > cp) => LevelState::Overflow,
                            other => other,
                        };
                        *next.entry(s).or_default() += c * w;
                    };
                    push(LevelState::Halted(b.clone()), 1);
                    let mut b0 = b.clone();
                    b0.push(false);
                    push(LevelState::Running(b0), 1);
                    let mut b1 = b.clone();
                    b1.push(true);
                    push(LevelState::Running(b1), 1);
                    let dbl = if b.is_empty() { b.clone() } else { BitTape::concat(&[b.clone(), b.clone()]) };
                    push(LevelState::Running(dbl), 1);
                    push(LevelState::Running(b.clone()), NOP_WEIGHT);
                }
                other => *next.entry(other.clone()).or_default() += c * OPCODE_SPACE,
            }
        }
        all.push(next.clone());
        cur = next;
    }
    all
}

/// Advances a level state by one opcode.
pub(crate) fn step_state(st: LevelState, op: Op, cap: Option<usize>) -> LevelState {
    match st {
        LevelState::Running(mut b) => {
            if !apply(op, &mut b) {
                LevelState::Halted(b)
            } else if cap.is_some_and(|c| b.len() > c) {
                LevelState::Overflow
            } else {
                LevelState::Running(b)
            }
        }
        other => other,
    }
}

/// Runs a program prefix that may end mid-opcode. Returns the weighted list of
/// states reached after the prefix's last (possibly completed) opcode, with
/// weights in units of `1/2^pad` where `pad` is the number of bits needed to
/// complete the final opcode, together with the number of opcodes consumed.
pub(crate) fn run_prefix(prefix: &BitTape, t: u32, cap: Option<usize>) -> (Vec<(LevelState, u128)>, u32, u32) {
    let total_ops = t / OPCODE_BITS;
    let full = (prefix.len() / 4) as u32;
    let rem = prefix.len() % 4;
    let step = |st: LevelState, op: Op| step_state(st, op, cap);
    let mut st = LevelState::Running(BitTape::new());
    let used_full = full.min(total_ops);
    for i in 0..used_full as usize {
        st = step(st, Op::from_nibble(prefix.read_uint(4 * i, 4).unwrap() as u8));
    }
    if rem == 0 || full >= total_ops {
        return (vec![(st, 1)], used_full, 0);
    }
    let pad = (4 - rem) as u32;
    let head = prefix.read_uint(4 * full as usize, rem).unwrap();
    let mut out: BTreeMap<LevelState, u128> = BTreeMap::new();
    for tail in 0..1u64 << pad {
        let nib = ((head << pad) | tail) as u8;
        *out.entry(step(st.clone(), Op::from_nibble(nib))).or_default() += 1;
    }
    (out.into_iter().collect(), full + 1, pad)
}

/// Counts of final outputs over the `16^r` continuations of `st`.
pub(crate) fn continuation(eng: &mut TraceEngine, st: &LevelState, r: u32) -> Arc<Counts> {
    match st {
        LevelState::Running(b) => eng.counts(b, r),
        LevelState::Halted(b) => Arc::new(Counts::from([(RawRun::Output(b.clone()), OPCODE_SPACE.pow(r))])),
        LevelState::Overflow => Arc::new(Counts::from([(RawRun::Overflow, OPCODE_SPACE.pow(r))])),
    }
}

/// Final-output counts for tapes that start with `prefix`, over the common
/// denominator returned alongside (a power of two).
pub(crate) fn prefix_counts(prefix: &BitTape, t: u32, cap: Option<usize>) -> Result<(Counts, u128)> {
    if prefix.len() > t as usize {
        return Err(Error::InvalidArgument(format!("program of {} bits exceeds the budget t={t}", prefix.len())));
    }
    let (states, used, pad) = run_prefix(prefix, t, cap);
    let r = t / OPCODE_BITS - used;
    let mut eng = TraceEngine::new(cap);
    let mut out = Counts::new();
    for (st, w) in &states {
        for (k, c) in continuation(&mut eng, st, r).iter() {
            *out.entry(k.clone()).or_default() += w * c;
        }
    }
    Ok((out, (1u128 << pad) * OPCODE_SPACE.pow(r)))
}

/// Exact output distribution of the machine on tapes `prefix ‖ r` with `r`
/// uniform over the remaining `t - |prefix|` bits.
pub fn prefix_distribution(prefix: &BitTape, budget: &VmBudget) -> Result<ExplicitDistribution<BigRational>> {
    budget.validate()?;
    let (counts, den) = prefix_counts(prefix, budget.t, Some(budget.m as usize))?;
    let mut tally: BTreeMap<VmOutcome, u128> = BTreeMap::new();
    for (k, c) in counts {
        *tally.entry(finish_classical(k, budget.m)).or_default() += c;
    }
    ExplicitDistribution::from_entries(tally.into_iter().map(|(o, c)| (o, BigRational::new(c.into(), den.into()))))
}

/// Seed policy for sampled mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedPolicy {
    /// Uniform tapes from a ChaCha8 stream.
    Random(u64),
    /// Tape `i mod 2^t` for sample `i`; with `2^t` samples this is exhaustive.
    Enumerate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exact,
    Sampled { samples: u64, seed: SeedPolicy },
}

/// The output distribution of the machine over uniform `t`-bit tapes, held as
/// integer tallies over a common denominator.
#[derive(Clone, Debug, PartialEq)]
pub struct UniversalDistribution {
    pub budget: VmBudget,
    pub mode: Mode,
    counts: BTreeMap<VmOutcome, u128>,
    total: u128,
}

impl UniversalDistribution {
    /// Tallies by outcome. Exact mode counts tapes out of `2^t`; sampled mode
    /// counts draws.
    pub fn counts(&self) -> &BTreeMap<VmOutcome, u128> {
        &self.counts
    }

    pub fn total(&self) -> u128 {
        self.total
    }

    pub fn count(&self, x: &VmOutcome) -> u128 {
        self.counts.get(x).copied().unwrap_or(0)
    }

    pub fn prob_f64(&self, x: &VmOutcome) -> f64 {
        self.count(x) as f64 / self.total as f64
    }

    pub fn prob_exact(&self, x: &VmOutcome) -> BigRational {
        BigRational::new(self.count(x).into(), self.total.into())
    }

    /// `-log2 Pr[x]`, `+inf` if `x` never occurs.
    pub fn neg_log2(&self, x: &VmOutcome) -> f64 {
        let c = self.count(x);
        match self.mode {
            Mode::Exact => neg_log2_dyadic(c, self.budget.t),
            Mode::Sampled { .. } => {
                if c == 0 {
                    f64::INFINITY
                } else {
                    (self.total as f64).log2() - (c as f64).log2()
                }
            }
        }
    }

    pub fn to_exact(&self) -> ExplicitDistribution<BigRational> {
        let entries = self.counts.iter().map(|(o, &c)| (o.clone(), BigRational::new(c.into(), self.total.into())));
        ExplicitDistribution::from_entries(entries).expect("tallies normalize by construction")
    }

    pub fn to_f64(&self) -> ExplicitDistribution<f64> {
        self.to_exact().to_f64()
    }
}

/// Exact distribution from the opcode-trace recursion, in tape counts out of
/// `2^t`.
fn exact_counts(budget: &VmBudget) -> BTreeMap<VmOutcome, u128> {
    let k = budget.opcodes();
    let leftover = 1u128 << (budget.t % OPCODE_BITS);
    let mut eng = TraceEngine::new(Some(budget.m as usize));
    let mut out: BTreeMap<VmOutcome, u128> = BTreeMap::new();
    for (raw, c) in eng.counts(&BitTape::new(), k).iter() {
        *out.entry(finish_classical(raw.clone(), budget.m)).or_default() += c * leftover;
    }
    out
}

pub fn universal_distribution(budget: &VmBudget, mode: Mode) -> Result<UniversalDistribution> {
    budget.validate()?;
    match mode {
        Mode::Exact => {
            if budget.t > T_MAX {
                return Err(Error::BudgetTooLarge { t: budget.t, cap: T_MAX });
            }
            Ok(UniversalDistribution { budget: *budget, mode, counts: exact_counts(budget), total: 1u128 << budget.t })
        }
        Mode::Sampled { samples, seed } => {
            if samples == 0 {
                return Err(Error::InvalidArgument("sampled mode needs at least one sample".into()));
            }
            if budget.t > 64 {
                return Err(Error::BudgetTooLarge { t: budget.t, cap: 64 });
            }
            let t = budget.t;
            let mask = if t == 64 { u64::MAX } else { (1u64 << t) - 1 };
            let tapes: Box<dyn Iterator<Item = u64>> = match seed {
                SeedPolicy::Enumerate => Box::new((0..samples).map(move |i| i & mask)),
                SeedPolicy::Random(s) => {
                    let mut rng = crate::rng::rng_from(s);
                    Box::new((0..samples).map(move |_| rng.random::<u64>() & mask))
                }
            };
            let mut counts: BTreeMap<VmOutcome, u128> = BTreeMap::new();
            for tape in tapes {
                let o = if budget.m <= 62 {
                    match run_packed(tape, t, budget.m) {
                        Some(v) => VmOutcome::Bits(BitTape::from_u64(v, budget.m as usize)),
                        None => VmOutcome::Bottom,
                    }
                } else {
                    run_vm(&BitTape::from_u64(tape, t as usize), budget)?
                };
                *counts.entry(o).or_default() += 1;
            }
            Ok(UniversalDistribution { budget: *budget, mode, counts, total: samples as u128 })
        }
    }
}

type CacheMap = HashMap<(u32, u32), Arc<UniversalDistribution>>;

/// Exact universal distribution, memoized per `(t, m)` for the process.
pub fn cached_universal(t: u32, m: u32) -> Result<Arc<UniversalDistribution>> {
    static CACHE: OnceLock<Mutex<CacheMap>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(d) = cache.lock().unwrap().get(&(t, m)) {
        return Ok(d.clone());
    }
    let d = Arc::new(universal_distribution(&VmBudget::new(1, t, m)?, Mode::Exact)?);
    cache.lock().unwrap().insert((t, m), d.clone());
    Ok(d)
}

/// `-log2 Pr[x <- U^t]`, `+inf` when `x` is unreachable.
pub fn ukt(x: &BitTape, budget: &VmBudget) -> Result<f64> {
    budget.validate()?;
    if x.len() != budget.m as usize {
        return Err(Error::LengthMismatch { expected: budget.m as usize, actual: x.len() });
    }
    if budget.t > T_MAX {
        return Err(Error::BudgetTooLarge { t: budget.t, cap: T_MAX });
    }
    Ok(cached_universal(budget.t, budget.m)?.neg_log2(&VmOutcome::Bits(x.clone())))
}

/// Joint complexity of a tuple of `m`-bit strings, where `budget.m` is the
/// element length. See [`crate::joint`] for the tuple machine.
pub fn joint_ukt(tuple: &[BitTape], budget: &VmBudget) -> Result<f64> {
    crate::joint::joint_complexity(tuple, budget, crate::joint::Flavor::Classical)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use proptest::prelude::*;

    fn b(n: u32, t: u32, m: u32) -> VmBudget {
        VmBudget::new(n, t, m).unwrap()
    }

    fn bits(s: &str) -> BitTape {
        s.parse().unwrap()
    }

    fn pad(p: BitTape, t: usize) -> BitTape {
        let mut p = p;
        while p.len() < t {
            p.push(false);
        }
        p
    }

    #[test]
    fn hand_stepped_programs() {
        let tape = pad(assemble(&[Op::Emit0, Op::Emit1, Op::Halt]), 12);
        assert_eq!(run_vm(&tape, &b(1, 12, 2)).unwrap(), VmOutcome::Bits(bits("01")));
        let tape = pad(assemble(&[Op::Emit1, Op::Dbl, Op::Dbl, Op::Halt]), 16);
        assert_eq!(run_vm(&tape, &b(1, 16, 4)).unwrap(), VmOutcome::Bits(bits("1111")));
        assert_eq!(run_vm(&BitTape::zeros(8), &b(1, 8, 1)).unwrap(), VmOutcome::Bottom);
    }

    #[test]
    fn implicit_halt_and_leftover_bits() {
        // 7 bits: one opcode (EMIT1) and three unread bits.
        let tape = bits("0010111");
        assert_eq!(run_vm(&tape, &b(1, 7, 1)).unwrap(), VmOutcome::Bits(bits("1")));
        // DBL on an empty output does nothing.
        let tape = assemble_str("D1").unwrap();
        assert_eq!(run_vm(&tape, &b(1, 8, 1)).unwrap(), VmOutcome::Bits(bits("1")));
    }

    #[test]
    fn wrong_tape_length_is_rejected() {
        assert!(matches!(run_vm(&bits("0"), &b(1, 4, 1)), Err(Error::LengthMismatch { .. })));
        assert!(VmBudget::new(1, 0, 1).is_err());
    }

    #[test]
    fn exact_t4_m1_is_sixteenths() {
        let d = universal_distribution(&b(1, 4, 1), Mode::Exact).unwrap();
        assert_eq!(d.total(), 16);
        assert!(d.to_exact().total_mass().is_one());
        assert_eq!(d.count(&VmOutcome::Bits(bits("0"))), 1);
        assert_eq!(d.count(&VmOutcome::Bits(bits("1"))), 1);
        assert_eq!(d.count(&VmOutcome::Bottom), 14);
    }

    #[test]
    fn recursion_matches_enumeration() {
        for (t, m) in [(1, 1), (4, 1), (9, 2), (12, 2), (13, 3), (16, 4), (16, 8), (18, 1)] {
            let budget = b(1, t, m);
            let exact = universal_distribution(&budget, Mode::Exact).unwrap();
            let brute = enumerate_tapes(&budget).unwrap();
            assert_eq!(exact.counts(), &brute, "t={t} m={m}");
        }
    }

    #[test]
    fn ukt_00_at_t12() {
        let budget = b(1, 12, 2);
        let brute = enumerate_tapes(&budget).unwrap();
        let c = brute[&VmOutcome::Bits(bits("00"))];
        let v = ukt(&bits("00"), &budget).unwrap();
        assert_eq!(v, 12.0 - (c as f64).log2());
        assert_eq!(brute.values().sum::<u128>(), 4096);
    }

    #[test]
    fn sampled_enumerate_policy_matches_exact() {
        let budget = b(1, 10, 2);
        let exact = universal_distribution(&budget, Mode::Exact).unwrap();
        let sampled =
            universal_distribution(&budget, Mode::Sampled { samples: 1 << 10, seed: SeedPolicy::Enumerate }).unwrap();
        for (o, p) in exact.to_f64().iter() {
            assert!((sampled.prob_f64(o) - p).abs() < crate::TOL_P);
        }
    }

    #[test]
    fn sampled_mode_is_reproducible() {
        let budget = b(1, 16, 2);
        let mode = Mode::Sampled { samples: 5000, seed: SeedPolicy::Random(3) };
        assert_eq!(universal_distribution(&budget, mode).unwrap(), universal_distribution(&budget, mode).unwrap());
    }

    #[test]
    fn over_cap_is_refused() {
        assert!(matches!(
            universal_distribution(&b(1, 25, 2), Mode::Exact),
            Err(Error::BudgetTooLarge { .. })
        ));
    }

    #[test]
    fn unreachable_strings_have_infinite_complexity() {
        // Four opcodes cannot produce eight distinct alternating bits.
        let v = ukt(&bits("01101001"), &b(1, 16, 8)).unwrap();
        assert_eq!(v, f64::INFINITY);
    }

    #[test]
    fn periodic_strings_are_simpler_than_random_ones() {
        let budget = b(1, 24, 8);
        let d = cached_universal(24, 8).unwrap();
        let zeros = ukt(&BitTape::zeros(8), &budget).unwrap();
        let simpler = (0..256u64)
            .filter(|&v| zeros < d.neg_log2(&VmOutcome::Bits(BitTape::from_u64(v, 8))))
            .count();
        assert!(simpler as f64 >= 0.9 * 256.0, "{simpler}");
    }

    #[test]
    fn prefix_runner_splits_partial_opcodes() {
        let (states, used, pad) = run_prefix(&bits("00"), 8, None);
        assert_eq!((used, pad), (1, 2));
        assert_eq!(states.iter().map(|(_, w)| w).sum::<u128>(), 4);
        assert!(states.contains(&(LevelState::Halted(BitTape::new()), 1)));
    }

    #[test]
    fn prefix_distribution_matches_tail_enumeration() {
        for (src, t, m) in [("1", 20, 2), ("01", 16, 4), ("", 12, 2), ("1D", 16, 3)] {
            let prefix = assemble_str(src).unwrap();
            for extra in [0usize, 2] {
                let mut p = prefix.clone();
                for _ in 0..extra {
                    p.push(true);
                }
                let budget = b(1, t, m);
                let d = prefix_distribution(&p, &budget).unwrap();
                let tail = t as usize - p.len();
                let mut tally: BTreeMap<VmOutcome, u128> = BTreeMap::new();
                for r in 0..1u64 << tail {
                    let tape = BitTape::concat(&[p.clone(), BitTape::from_u64(r, tail)]);
                    *tally.entry(run_vm(&tape, &budget).unwrap()).or_default() += 1;
                }
                let brute = ExplicitDistribution::from_entries(
                    tally.into_iter().map(|(o, c)| (o, BigRational::new(c.into(), (1u128 << tail).into()))),
                )
                .unwrap();
                assert_eq!(d, brute, "{src} +{extra}");
            }
        }
    }

    proptest! {
        #[test]
        fn packed_and_general_interpreters_agree(tape in any::<u32>(), t in 1u32..=32, m in 1u32..=12) {
            let tape = if t == 32 { tape as u64 } else { tape as u64 & ((1u64 << t) - 1) };
            let bt = BitTape::from_u64(tape, t as usize);
            let general = run_vm(&bt, &b(1, t, m)).unwrap();
            let packed = run_packed(tape, t, m).map(|v| VmOutcome::Bits(BitTape::from_u64(v, m as usize))).unwrap_or(VmOutcome::Bottom);
            prop_assert_eq!(general.clone(), packed);
            prop_assert_eq!(general, run_vm(&bt, &b(1, t, m)).unwrap());
        }

        #[test]
        fn exact_mode_is_dyadic_and_normalized(t in 1u32..=20, m in 1u32..=6) {
            let d = universal_distribution(&b(1, t, m), Mode::Exact).unwrap();
            prop_assert_eq!(d.total(), 1u128 << t);
            prop_assert_eq!(d.counts().values().sum::<u128>(), 1u128 << t);
            let sub: f64 = (0..1u64 << m).map(|v| d.neg_log2(&VmOutcome::Bits(BitTape::from_u64(v, m as usize)))).map(|k| (-k).exp2()).sum();
            prop_assert!(sub <= 1.0 + crate::TOL_P);
        }

        #[test]
        fn level_states_conserve_mass(levels in 0u32..5, cap in 1usize..6) {
            for (j, lvl) in level_states(levels, Some(cap)).iter().enumerate() {
                prop_assert_eq!(lvl.values().sum::<u128>(), 16u128.pow(j as u32));
            }
        }
    }
}
