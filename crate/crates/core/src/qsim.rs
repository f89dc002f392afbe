// Copyright 2026 the Kolmoverify Authors
// SPDX-License-Identifier: Apache-2.0

//! Statevector simulation of small {H, T, CNOT} circuits and the two-stage
//! quantum universal distribution: uniform tape, KVM-1 run, circuit decode,
//! simulation, full measurement.
//!
//! Circuit encoding: a 3-bit header holding `q - 1`, then records of a 2-bit
//! tag (`00` END, `01` H, `10` T, `11` CNOT) followed by a 3-bit target and,
//! for CNOT only, a 3-bit control. Bits after END are ignored. Running out of
//! bits anywhere after the header also ends the circuit, dropping any
//! incomplete record. Out-of-range indices, `control == target`, a circuit
//! deeper than the step budget, or fewer than 3 bits are decode failures.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitTape;
use crate::bitvm::{continuation, run_prefix, run_vm_raw, Mode, RawRun, SeedPolicy, TraceEngine, VmBudget, VmOutcome, OPCODE_BITS, OPCODE_SPACE};
use crate::dist::ExplicitDistribution;
use crate::error::{Error, Result};

pub const Q_MAX: usize = 8;
/// Largest quantum step budget accepted in exact mode.
pub const T_MAX_Q: u32 = 32;
pub const TOL_AMP: f64 = 1e-9;
/// Probabilities below this are treated as exact cancellations.
const ZERO_CUTOFF: f64 = 1e-20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Gate {
    H(usize),
    T(usize),
    Cnot { control: usize, target: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Circuit {
    pub qubits: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        if qubits == 0 {
            return Err(Error::InvalidArgument("a circuit needs at least one qubit".into()));
        }
        let c = Circuit { qubits, gates };
        if !c.indices_valid() {
            return Err(Error::InvalidArgument("gate index out of range or control == target".into()));
        }
        Ok(c)
    }

    fn indices_valid(&self) -> bool {
        self.gates.iter().all(|g| match *g {
            Gate::H(t) | Gate::T(t) => t < self.qubits,
            Gate::Cnot { control, target } => control < self.qubits && target < self.qubits && control != target,
        })
    }

    /// Number of layers when every gate is scheduled as early as possible.
    pub fn depth(&self) -> usize {
        let mut level = vec![0usize; self.qubits];
        for g in &self.gates {
            match *g {
                Gate::H(t) | Gate::T(t) => level[t] += 1,
                Gate::Cnot { control, target } => {
                    let l = level[control].max(level[target]) + 1;
                    level[control] = l;
                    level[target] = l;
                }
            }
        }
        level.into_iter().max().unwrap_or(0)
    }

    /// Encodes under the pinned grammar, terminated by END.
    pub fn encode(&self) -> BitTape {
        let mut t = BitTape::from_u64(self.qubits as u64 - 1, 3);
        for g in &self.gates {
            let (tag, a, b) = match *g {
                Gate::H(x) => (1, x, None),
                Gate::T(x) => (2, x, None),
                Gate::Cnot { control, target } => (3, target, Some(control)),
            };
            t.extend_from(&BitTape::from_u64(tag, 2));
            t.extend_from(&BitTape::from_u64(a as u64, 3));
            if let Some(c) = b {
                t.extend_from(&BitTape::from_u64(c as u64, 3));
            }
        }
        t.extend_from(&BitTape::from_u64(0, 2));
        t
    }

    /// Parses the fixture text format: `q <count>`, then `h <t>`, `t <t>` or
    /// `cx <c> <t>` lines, then `end`.
    pub fn parse_text(src: &str) -> Result<Circuit> {
        let mut lines = src.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let bad = |l: &str| Error::Parse(format!("bad circuit line `{l}`"));
        let head = lines.next().ok_or_else(|| Error::Parse("empty circuit".into()))?;
        let qubits = match head.split_whitespace().collect::<Vec<_>>()[..] {
            ["q", n] => n.parse::<usize>().map_err(|_| bad(head))?,
            _ => return Err(bad(head)),
        };
        let mut gates = Vec::new();
        let mut ended = false;
        for l in lines {
            let parts: Vec<&str> = l.split_whitespace().collect();
            let num = |s: &str| s.parse::<usize>().map_err(|_| bad(l));
            match parts[..] {
                ["h", t] => gates.push(Gate::H(num(t)?)),
                ["t", t] => gates.push(Gate::T(num(t)?)),
                ["cx", c, t] => gates.push(Gate::Cnot { control: num(c)?, target: num(t)? }),
                ["end"] => {
                    ended = true;
                    break;
                }
                _ => return Err(bad(l)),
            }
        }
        if !ended {
            return Err(Error::Parse("circuit text lacks `end`".into()));
        }
        Circuit::new(qubits, gates)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "q {}", self.qubits)?;
        for g in &self.gates {
            match g {
                Gate::H(t) => writeln!(f, "h {t}")?,
                Gate::T(t) => writeln!(f, "t {t}")?,
                Gate::Cnot { control, target } => writeln!(f, "cx {control} {target}")?,
            }
        }
        write!(f, "end")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitEncoding {
    pub raw: BitTape,
    pub decoded: Option<Circuit>,
}

pub fn decode_circuit(c: &BitTape, budget: &VmBudget) -> CircuitEncoding {
    CircuitEncoding { raw: c.clone(), decoded: decode(c, budget.t as usize) }
}

fn decode(c: &BitTape, max_depth: usize) -> Option<Circuit> {
    let qubits = c.read_uint(0, 3)? as usize + 1;
    let mut pos = 3;
    let mut gates = Vec::new();
    loop {
        let Some(tag) = c.read_uint(pos, 2) else { break };
        pos += 2;
        let gate = match tag {
            0 => break,
            1 | 2 => {
                let Some(t) = c.read_uint(pos, 3) else { break };
                pos += 3;
                let t = t as usize;
                if tag == 1 {
                    Gate::H(t)
                } else {
                    Gate::T(t)
                }
            }
            _ => {
                let (Some(t), Some(ctl)) = (c.read_uint(pos, 3), c.read_uint(pos + 3, 3)) else { break };
                pos += 6;
                Gate::Cnot { control: ctl as usize, target: t as usize }
            }
        };
        gates.push(gate);
    }
    let circ = Circuit { qubits, gates };
    (circ.indices_valid() && circ.depth() <= max_depth).then_some(circ)
}

fn amplitudes(circuit: &Circuit) -> Vec<Complex64> {
    let q = circuit.qubits;
    let mut psi = vec![Complex64::new(0.0, 0.0); 1 << q];
    psi[0] = Complex64::new(1.0, 0.0);
    let mask = |i: usize| 1usize << (q - 1 - i);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let tphase = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    for g in &circuit.gates {
        match *g {
            Gate::H(t) => {
                let bit = mask(t);
                for i in 0..psi.len() {
                    if i & bit == 0 {
                        let (a, b) = (psi[i], psi[i | bit]);
                        psi[i] = (a + b) * h;
                        psi[i | bit] = (a - b) * h;
                    }
                }
            }
            Gate::T(t) => {
                let bit = mask(t);
                for (i, a) in psi.iter_mut().enumerate() {
                    if i & bit != 0 {
                        *a *= tphase;
                    }
                }
            }
            Gate::Cnot { control, target } => {
                let (cb, tb) = (mask(control), mask(target));
                for i in 0..psi.len() {
                    if i & cb != 0 && i & tb == 0 {
                        psi.swap(i, i | tb);
                    }
                }
            }
        }
    }
    psi
}

/// Measures every qubit of the circuit's output state. Qubit 0 is the first
/// bit of the outcome. A circuit whose width differs from `m` yields ⊥.
pub fn simulate(circuit: &Circuit, m: usize) -> Result<ExplicitDistribution<f64>> {
    if circuit.qubits > Q_MAX {
        return Err(Error::TooManyQubits { qubits: circuit.qubits, max: Q_MAX });
    }
    if circuit.qubits != m {
        return Ok(ExplicitDistribution::point_mass(VmOutcome::Bottom));
    }
    let psi = amplitudes(circuit);
    let entries: Vec<_> = psi
        .iter()
        .enumerate()
        .map(|(i, a)| (i, a.norm_sqr()))
        .filter(|&(_, p)| p > ZERO_CUTOFF)
        .map(|(i, p)| (VmOutcome::Bits(BitTape::from_u64(i as u64, m)), p))
        .collect();
    let d = ExplicitDistribution::from_entries_unnormalized(entries)?;
    debug_assert!((d.total_mass() - 1.0).abs() < TOL_AMP);
    Ok(d)
}

/// The outcome distribution contributed by one raw VM output.
pub fn encoding_outcome(raw: &RawRun, budget: &VmBudget) -> Result<ExplicitDistribution<f64>> {
    match raw {
        RawRun::Output(c) => match decode(c, budget.t as usize) {
            Some(circ) => simulate(&circ, budget.m as usize),
            None => Ok(ExplicitDistribution::point_mass(VmOutcome::Bottom)),
        },
        RawRun::Overflow => Ok(ExplicitDistribution::point_mass(VmOutcome::Bottom)),
    }
}

/// The full pipeline for a single tape.
pub fn quantum_tape_outcome(tape: &BitTape, budget: &VmBudget) -> Result<ExplicitDistribution<f64>> {
    if tape.len() != budget.t as usize {
        return Err(Error::LengthMismatch { expected: budget.t as usize, actual: tape.len() });
    }
    encoding_outcome(&run_vm_raw(tape, budget.t, None), budget)
}

/// Neumaier-compensated accumulator for mixing distributions.
#[derive(Default, Clone, Copy)]
struct CompSum {
    sum: f64,
    comp: f64,
}

impl CompSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }
    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Mixes the outcome distributions of weighted raw outputs. `den` is the
/// common denominator of the integer weights.
pub(crate) fn mix_raw_counts<'a>(
    counts: impl Iterator<Item = (&'a RawRun, &'a u128)>,
    den: u128,
    budget: &VmBudget,
) -> Result<ExplicitDistribution<f64>> {
    let mut by_circuit: BTreeMap<Option<Circuit>, u128> = BTreeMap::new();
    for (raw, c) in counts {
        let circ = match raw {
            RawRun::Output(b) => decode(b, budget.t as usize),
            RawRun::Overflow => None,
        };
        *by_circuit.entry(circ).or_default() += c;
    }
    let mut acc: BTreeMap<VmOutcome, CompSum> = BTreeMap::new();
    for (circ, c) in by_circuit {
        let w = c as f64 / den as f64;
        match circ {
            None => acc.entry(VmOutcome::Bottom).or_default().add(w),
            Some(circ) => {
                for (o, p) in simulate(&circ, budget.m as usize)?.iter() {
                    acc.entry(o.clone()).or_default().add(w * p);
                }
            }
        }
    }
    ExplicitDistribution::from_entries_unnormalized(acc.into_iter().map(|(o, s)| (o, s.value())))
}

/// The quantum universal distribution: `Pr[x]` over uniform `t`-bit tapes.
pub fn quantum_universal_distribution(budget: &VmBudget, mode: Mode) -> Result<ExplicitDistribution<f64>> {
    budget.validate()?;
    match mode {
        Mode::Exact => {
            if budget.t > T_MAX_Q {
                return Err(Error::BudgetTooLarge { t: budget.t, cap: T_MAX_Q });
            }
            let k = budget.t / OPCODE_BITS;
            let mut eng = TraceEngine::new(None);
            let counts = eng.counts(&BitTape::new(), k);
            mix_raw_counts(counts.iter(), OPCODE_SPACE.pow(k), budget)
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
            let mut rng = match seed {
                SeedPolicy::Random(s) => Some(crate::rng::rng_from(s)),
                SeedPolicy::Enumerate => None,
            };
            let mut tally: BTreeMap<RawRun, u128> = BTreeMap::new();
            for i in 0..samples {
                let tape = match rng.as_mut() {
                    Some(r) => r.random::<u64>() & mask,
                    None => i & mask,
                };
                *tally.entry(run_vm_raw(&BitTape::from_u64(tape, t as usize), t, None)).or_default() += 1;
            }
            mix_raw_counts(tally.iter(), samples as u128, budget)
        }
    }
}

/// Exact output distribution of the pipeline on tapes that start with
/// `prefix`, the rest uniform.
pub fn quantum_prefix_distribution(prefix: &BitTape, budget: &VmBudget) -> Result<ExplicitDistribution<f64>> {
    budget.validate()?;
    if budget.t > T_MAX_Q {
        return Err(Error::BudgetTooLarge { t: budget.t, cap: T_MAX_Q });
    }
    if prefix.len() > budget.t as usize {
        return Err(Error::InvalidArgument(format!("program of {} bits exceeds t={}", prefix.len(), budget.t)));
    }
    let (states, used, pad) = run_prefix(prefix, budget.t, None);
    let r = budget.t / OPCODE_BITS - used;
    let mut eng = TraceEngine::new(None);
    let mut merged: BTreeMap<RawRun, u128> = BTreeMap::new();
    for (st, w) in &states {
        for (k, c) in continuation(&mut eng, st, r).iter() {
            *merged.entry(k.clone()).or_default() += w * c;
        }
    }
    mix_raw_counts(merged.iter(), (1u128 << pad) * OPCODE_SPACE.pow(r), budget)
}

type QCache = HashMap<(u32, u32), Arc<ExplicitDistribution<f64>>>;

/// Exact quantum universal distribution, memoized per `(t, m)`.
pub fn cached_quantum_universal(t: u32, m: u32) -> Result<Arc<ExplicitDistribution<f64>>> {
    static CACHE: OnceLock<Mutex<QCache>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(d) = cache.lock().unwrap().get(&(t, m)) {
        return Ok(d.clone());
    }
    let d = Arc::new(quantum_universal_distribution(&VmBudget::new(1, t, m)?, Mode::Exact)?);
    cache.lock().unwrap().insert((t, m), d.clone());
    Ok(d)
}

/// `-log2 Pr[x <- Q^t]`, `+inf` on zero probability.
pub fn qukt(x: &BitTape, budget: &VmBudget) -> Result<f64> {
    budget.validate()?;
    if x.len() != budget.m as usize {
        return Err(Error::LengthMismatch { expected: budget.m as usize, actual: x.len() });
    }
    if budget.t > T_MAX_Q {
        return Err(Error::BudgetTooLarge { t: budget.t, cap: T_MAX_Q });
    }
    let d = cached_quantum_universal(budget.t, budget.m)?;
    Ok(crate::extreal::neg_log2(d.prob(&VmOutcome::Bits(x.clone()))))
}
