// Copyright 2026 the Kolmoverify Authors
// SPDX-License-Identifier: Apache-2.0

//! Verifiers and the oracles they query.
//!
//! Every oracle answers in bits: a complexity, or `-log2` of a probability.
//! Tuples are passed as histograms because every quantity involved is
//! symmetric in the order of the samples.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitvm::{VmBudget, VmOutcome};
use crate::dist::Histogram;
use crate::error::{Error, Result};
use crate::joint::{histogram_complexity, Flavor};
use crate::rng::{derive_seed, unit_interval};
use crate::samplers::DescribedSampler;

/// Largest sample count a verifier configuration will use.
pub const DESK_S_CAP: u64 = 1 << 16;

/// What an oracle estimates.
#[derive(Clone, Debug)]
pub enum OracleTarget {
    /// Joint classical complexity at budget `t`.
    Ukt { t: u32 },
    /// Joint quantum complexity at budget `t`.
    Qukt { t: u32 },
    /// `-log2` of the probability of the tuple under `sampler^{⊗s}`.
    ProbabilityOf(Arc<DescribedSampler>),
}

impl OracleTarget {
    pub fn name(&self) -> String {
        match self {
            OracleTarget::Ukt { t } => format!("ukt@t{t}"),
            OracleTarget::Qukt { t } => format!("qukt@t{t}"),
            OracleTarget::ProbabilityOf(s) => format!("probability-of:{}", s.label),
        }
    }
}

/// Error contract of an oracle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Contract {
    Exact,
    /// Within one bit of the truth except on a fixed input set of density
    /// `delta`, where the answer is `0`.
    TwoSided { delta: f64 },
    /// Between the truth and one bit above it (never overestimates a
    /// probability), except with probability `delta` over the oracle's own
    /// coins, where the answer is `0`.
    OneSided { delta: f64 },
}

/// Parsed form of `exact`, `two-sided:δ` or `one-sided:δ`, optionally
/// followed by `@seed`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleSpec {
    pub contract: Contract,
    pub seed: u64,
}

impl Default for OracleSpec {
    fn default() -> Self {
        Self { contract: Contract::Exact, seed: 0 }
    }
}

impl FromStr for OracleSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (body, seed) = match s.split_once('@') {
            Some((b, sd)) => (b, sd.trim().parse::<u64>().map_err(|_| Error::UnsupportedSpec(s.to_string()))?),
            None => (s, 0),
        };
        let body = body.trim();
        let delta = |v: &str| -> Result<f64> {
            let d: f64 = v.trim().parse().map_err(|_| Error::UnsupportedSpec(s.to_string()))?;
            if !(0.0..=1.0).contains(&d) {
                return Err(Error::UnsupportedSpec(format!("failure rate {d} outside [0,1]")));
            }
            Ok(d)
        };
        let contract = if body == "exact" {
            Contract::Exact
        } else if let Some(v) = body.strip_prefix("two-sided:") {
            Contract::TwoSided { delta: delta(v)? }
        } else if let Some(v) = body.strip_prefix("one-sided:") {
            Contract::OneSided { delta: delta(v)? }
        } else {
            return Err(Error::UnsupportedSpec(s.to_string()));
        };
        Ok(Self { contract, seed })
    }
}

impl fmt::Display for OracleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.contract {
            Contract::Exact => write!(f, "exact")?,
            Contract::TwoSided { delta } => write!(f, "two-sided:{delta}")?,
            Contract::OneSided { delta } => write!(f, "one-sided:{delta}")?,
        }
        if self.seed != 0 {
            write!(f, "@{}", self.seed)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct ComplexityOracle {
    pub target: OracleTarget,
    pub contract: Contract,
    pub seed: u64,
}

/// Whether the two-sided oracle with this seed and failure rate fails on
/// this tuple. The failure set depends only on the input.
pub fn two_sided_fails(seed: u64, h: &Histogram, delta: f64) -> bool {
    unit_interval(derive_seed(seed, &[h.digest(), 0])) < delta
}

pub fn make_oracle(target: OracleTarget, spec: OracleSpec) -> Result<ComplexityOracle> {
    if let (Contract::OneSided { .. }, OracleTarget::Ukt { .. } | OracleTarget::Qukt { .. }) = (&spec.contract, &target) {
        return Err(Error::UnsupportedSpec("one-sided contracts apply to probability targets only".into()));
    }
    Ok(ComplexityOracle { target, contract: spec.contract, seed: spec.seed })
}

impl ComplexityOracle {
    pub fn exact(target: OracleTarget) -> Self {
        Self { target, contract: Contract::Exact, seed: 0 }
    }

    /// The exact value, in bits.
    pub fn truth(&self, h: &Histogram, m: u32) -> Result<f64> {
        match &self.target {
            OracleTarget::Ukt { t } => histogram_complexity(h, &VmBudget::new(1, *t, m)?, Flavor::Classical),
            OracleTarget::Qukt { t } => histogram_complexity(h, &VmBudget::new(1, *t, m)?, Flavor::Quantum),
            OracleTarget::ProbabilityOf(s) => {
                if s.budget.m != m {
                    return Err(Error::LengthMismatch { expected: s.budget.m as usize, actual: m as usize });
                }
                Ok(match s.exact_distribution()? {
                    Some(d) => h.iid_neg_log2(d),
                    None => h.iid_neg_log2(s.distribution()?),
                })
            }
        }
    }

    /// The oracle's answer on query number `nonce`.
    pub fn answer(&self, h: &Histogram, m: u32, nonce: u64) -> Result<f64> {
        let truth = self.truth(h, m)?;
        Ok(match self.contract {
            Contract::Exact => truth,
            Contract::TwoSided { delta } => {
                if two_sided_fails(self.seed, h, delta) {
                    0.0
                } else {
                    let off = 2.0 * unit_interval(derive_seed(self.seed, &[h.digest(), 1])) - 1.0;
                    (truth + off).max(0.0)
                }
            }
            Contract::OneSided { delta } => {
                if unit_interval(derive_seed(self.seed, &[nonce, 2])) < delta {
                    0.0
                } else {
                    truth + unit_interval(derive_seed(self.seed, &[nonce, 3]))
                }
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerConfig {
    pub n: u32,
    /// Soundness exponent.
    pub c: f64,
    pub eps: f64,
    /// Budget of the complexity oracle.
    pub t: u32,
    pub alpha: f64,
    pub s: u64,
    pub flavor: Flavor,
    /// Whether `s` was cut down to [`DESK_S_CAP`].
    pub scaled: bool,
}

impl VerConfig {
    /// `α = ⌈(log2 n)²⌉` and `s = ⌈n^{4c}(log2(1/(1-ε)) + 2(log2 n)²)⌉`,
    /// capped at [`DESK_S_CAP`].
    pub fn defaults(n: u32, c: f64, eps: f64, t: u32, flavor: Flavor) -> Result<Self> {
        if n < 2 || !(eps > 0.0 && eps < 1.0) || c <= 0.0 {
            return Err(Error::InvalidArgument(format!("need n >= 2, 0 < eps < 1, c > 0 (got n={n}, eps={eps}, c={c})")));
        }
        let ln = (n as f64).log2();
        let alpha = (ln * ln).ceil();
        let raw = ((n as f64).powf(4.0 * c) * ((1.0 / (1.0 - eps)).log2() + 2.0 * ln * ln)).ceil();
        let scaled = raw > DESK_S_CAP as f64;
        let s = if scaled { DESK_S_CAP } else { raw as u64 };
        Ok(Self { n, c, eps, t, alpha, s, flavor, scaled })
    }

    /// `n^{-c}`.
    pub fn correctness_slack(&self) -> f64 {
        (self.n as f64).powf(-self.c)
    }

    /// Number of blocks Ver* splits its input into.
    pub fn star_blocks(&self) -> u64 {
        (4.0 * (self.n as f64).powi(2) / (self.eps * self.eps)).ceil() as u64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifierKind {
    Ver,
    VerStar,
    Qas,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub verifier: VerifierKind,
    pub accepted: bool,
    #[serde(with = "crate::extreal::json::opt")]
    pub k: Option<f64>,
    #[serde(with = "crate::extreal::json::opt")]
    pub neg_log_p: Option<f64>,
    #[serde(with = "crate::extreal::json::opt")]
    pub alpha: Option<f64>,
    /// Accepting blocks (Ver*) or counted samples (QAS).
    pub count: Option<u64>,
    /// Per-block outcomes of Ver*.
    pub blocks: Vec<bool>,
    /// Per-sample `k_c - k_q` of the QAS verifier.
    #[serde(with = "crate::extreal::json::vec")]
    pub gaps: Vec<f64>,
    /// Oracle seeds followed by the query nonce.
    pub seed: Vec<u64>,
    pub scaled: bool,
}

fn check_target(cfg: &VerConfig, target: &DescribedSampler, m_oracle: &ComplexityOracle, approx: &ComplexityOracle) -> Result<()> {
    match (&m_oracle.target, cfg.flavor) {
        (OracleTarget::Ukt { t }, Flavor::Classical) | (OracleTarget::Qukt { t }, Flavor::Quantum) if *t == cfg.t => {}
        (other, _) => {
            return Err(Error::OracleMismatch(format!(
                "complexity oracle targets {} but the configuration asks for {:?} at t={}",
                other.name(),
                cfg.flavor,
                cfg.t
            )))
        }
    }
    match &approx.target {
        OracleTarget::ProbabilityOf(s) if s.label == target.label => Ok(()),
        other => Err(Error::OracleMismatch(format!(
            "probability oracle targets {} but the verified sampler is {}",
            other.name(),
            target.label
        ))),
    }
}

fn check_lengths(h: &Histogram, m: u32) -> Result<()> {
    for (o, _) in h.iter() {
        if let VmOutcome::Bits(b) = o {
            if b.len() != m as usize {
                return Err(Error::LengthMismatch { expected: m as usize, actual: b.len() });
            }
        }
    }
    Ok(())
}

/// Accepts iff `-log2 p <= k + α`, with `k` from `m_oracle` and `p` from
/// `approx`. An infinite `-log2 p` always rejects.
pub fn ver_histogram(
    h: &Histogram,
    target: &DescribedSampler,
    cfg: &VerConfig,
    m_oracle: &ComplexityOracle,
    approx: &ComplexityOracle,
    nonce: u64,
) -> Result<Verdict> {
    check_target(cfg, target, m_oracle, approx)?;
    let m = target.budget.m;
    check_lengths(h, m)?;
    if h.total() != cfg.s {
        return Err(Error::WrongArity { expected: cfg.s as usize, actual: h.total() as usize });
    }
    let k = m_oracle.answer(h, m, nonce)?;
    let nlp = approx.answer(h, m, nonce)?;
    let accepted = nlp.is_finite() && nlp <= k + cfg.alpha;
    Ok(Verdict {
        verifier: VerifierKind::Ver,
        accepted,
        k: Some(k),
        neg_log_p: Some(nlp),
        alpha: Some(cfg.alpha),
        count: None,
        blocks: vec![],
        gaps: vec![],
        seed: vec![m_oracle.seed, approx.seed, nonce],
        scaled: cfg.scaled,
    })
}

/// [`ver_histogram`] on an explicit tuple.
pub fn ver(
    samples: &[VmOutcome],
    target: &DescribedSampler,
    cfg: &VerConfig,
    m_oracle: &ComplexityOracle,
    approx: &ComplexityOracle,
    nonce: u64,
) -> Result<Verdict> {
    ver_histogram(&Histogram::from_outcomes(samples), target, cfg, m_oracle, approx, nonce)
}

/// Ver* over pre-split blocks of `cfg.s` samples each.
pub fn ver_star_blocks(
    blocks: &[Histogram],
    target: &DescribedSampler,
    cfg: &VerConfig,
    m_oracle: &ComplexityOracle,
    approx: &ComplexityOracle,
    nonce: u64,
) -> Result<Verdict> {
    let want = cfg.star_blocks();
    if blocks.len() as u64 != want {
        let total: u64 = blocks.iter().map(|b| b.total()).sum();
        return Err(Error::WrongArity { expected: (want * cfg.s) as usize, actual: total as usize });
    }
    let results: Vec<bool> = blocks
        .par_iter()
        .enumerate()
        .map(|(i, b)| ver_histogram(b, target, cfg, m_oracle, approx, derive_seed(nonce, &[i as u64])).map(|v| v.accepted))
        .collect::<Result<_>>()?;
    let count = results.iter().filter(|&&a| a).count() as u64;
    let accepted = cfg.eps * cfg.eps / (4.0 * (cfg.n as f64).powi(2)) * count as f64 >= 1.0 - cfg.eps / 2.0;
    Ok(Verdict {
        verifier: VerifierKind::VerStar,
        accepted,
        k: None,
        neg_log_p: None,
        alpha: Some(cfg.alpha),
        count: Some(count),
        blocks: results,
        gaps: vec![],
        seed: vec![m_oracle.seed, approx.seed, nonce],
        scaled: cfg.scaled,
    })
}

/// Ver* on a flat tuple of `s* = s·⌈4n²/ε²⌉` samples, split into consecutive
/// blocks.
pub fn ver_star(
    samples: &[VmOutcome],
    target: &DescribedSampler,
    cfg: &VerConfig,
    m_oracle: &ComplexityOracle,
    approx: &ComplexityOracle,
    nonce: u64,
) -> Result<Verdict> {
    let want = cfg.star_blocks() * cfg.s;
    if samples.len() as u64 != want {
        return Err(Error::WrongArity { expected: want as usize, actual: samples.len() });
    }
    let blocks: Vec<Histogram> = samples.chunks(cfg.s as usize).map(Histogram::from_outcomes).collect();
    ver_star_blocks(&blocks, target, cfg, m_oracle, approx, nonce)
}

/// Estimator-free baseline: accepts iff the empirical pair-collision rate of
/// `h` is within half of the target's collision probability.
pub fn collision_baseline(h: &Histogram, target: &crate::dist::ExplicitDistribution<f64>) -> bool {
    let s = h.total() as f64;
    if s < 2.0 {
        return true;
    }
    let pairs: f64 = h.iter().map(|(_, c)| c as f64 * (c as f64 - 1.0) / 2.0).sum();
    let rate = pairs / (s * (s - 1.0) / 2.0);
    let cp: f64 = target.iter().map(|(_, p)| p * p).sum();
    (rate - cp).abs() <= cp / 2.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QasConfigV {
    pub n: u32,
    pub c: f64,
    pub m: u32,
}

impl QasConfigV {
    /// `3c·log2 n`.
    pub fn gap_threshold(&self) -> f64 {
        3.0 * self.c * (self.n as f64).log2()
    }
}

/// Counts samples whose quantum complexity undercuts the classical one by
/// `3c·log2 n` bits; accepts iff at least half do. A sample unreachable by
/// both machines is not counted.
pub fn qas_verify(samples: &[VmOutcome], cfg: &QasConfigV, m_c: &ComplexityOracle, m_q: &ComplexityOracle, nonce: u64) -> Result<Verdict> {
    if samples.len() != cfg.n as usize {
        return Err(Error::WrongArity { expected: cfg.n as usize, actual: samples.len() });
    }
    if (cfg.n as f64).powf(-cfg.c) * cfg.m as f64 > 1.0 / 3.0 {
        return Err(Error::InvalidArgument(format!("n^-c * m must be at most 1/3 (n={}, c={}, m={})", cfg.n, cfg.c, cfg.m)));
    }
    if !matches!(m_c.target, OracleTarget::Ukt { .. }) || !matches!(m_q.target, OracleTarget::Qukt { .. }) {
        return Err(Error::OracleMismatch("the QAS verifier needs a classical and a quantum complexity oracle".into()));
    }
    let thr = cfg.gap_threshold();
    let pairs: Vec<(f64, f64)> = samples
        .par_iter()
        .enumerate()
        .map(|(i, y)| {
            let h = Histogram::from_outcomes([y]);
            let q = derive_seed(nonce, &[i as u64]);
            Ok((m_c.answer(&h, cfg.m, q)?, m_q.answer(&h, cfg.m, q)?))
        })
        .collect::<Result<_>>()?;
    let count = pairs.iter().filter(|(kc, kq)| kq.is_finite() && *kq <= kc - thr).count() as u64;
    let gaps = pairs.iter().map(|(kc, kq)| if kc == kq { 0.0 } else { kc - kq }).collect();
    Ok(Verdict {
        verifier: VerifierKind::Qas,
        accepted: 2 * count >= cfg.n as u64,
        k: None,
        neg_log_p: None,
        alpha: None,
        count: Some(count),
        blocks: vec![],
        gaps,
        seed: vec![m_c.seed, m_q.seed, nonce],
        scaled: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitTape;
    use crate::bitvm::assemble_str;
    use crate::dist::ExplicitDistribution;
    use crate::stats::{wilson_interval, Z_SIGMA};

    fn budget(t: u32, m: u32) -> VmBudget {
        VmBudget::new(4, t, m).unwrap()
    }

    fn oracles(target: &Arc<DescribedSampler>, t: u32) -> (ComplexityOracle, ComplexityOracle) {
        (
            ComplexityOracle::exact(OracleTarget::Ukt { t }),
            ComplexityOracle::exact(OracleTarget::ProbabilityOf(target.clone())),
        )
    }

    #[test]
    fn spec_strings_roundtrip() {
        for s in ["exact", "two-sided:0.1", "one-sided:0.05@7"] {
            let p: OracleSpec = s.parse().unwrap();
            assert_eq!(p.to_string(), s);
        }
        assert!("fuzzy".parse::<OracleSpec>().is_err());
        assert!("one-sided:2".parse::<OracleSpec>().is_err());
        let one: OracleSpec = "one-sided:0.1".parse().unwrap();
        assert!(matches!(make_oracle(OracleTarget::Ukt { t: 12 }, one), Err(Error::UnsupportedSpec(_))));
    }

    #[test]
    fn default_parameters() {
        let c = VerConfig::defaults(4, 1.0, 0.25, 20, Flavor::Classical).unwrap();
        assert_eq!(c.alpha, 4.0);
        assert_eq!(c.s, 2155);
        assert!(!c.scaled);
        let c = VerConfig::defaults(8, 1.0, 0.25, 20, Flavor::Classical).unwrap();
        assert_eq!((c.alpha, c.s, c.scaled), (9.0, DESK_S_CAP, true));
        let c = VerConfig::defaults(4, 1.0, 0.5, 20, Flavor::Classical).unwrap();
        assert_eq!(c.star_blocks(), 256);
    }

    #[test]
    fn point_mass_target_accepts_its_point() {
        let o: VmOutcome = "0110".parse().unwrap();
        let t = Arc::new(DescribedSampler::explicit_table("pm", ExplicitDistribution::point_mass(o.clone()), budget(20, 4), None).unwrap());
        let mut cfg = VerConfig::defaults(4, 1.0, 0.25, 12, Flavor::Classical).unwrap();
        cfg.s = 5;
        let (mo, ao) = oracles(&t, 12);
        let v = ver(&vec![o; 5], &t, &cfg, &mo, &ao, 0).unwrap();
        assert!(v.accepted);
        assert_eq!(v.neg_log_p, Some(0.0));
        let other: VmOutcome = "1111".parse().unwrap();
        let mut xs = vec!["0110".parse().unwrap(); 4];
        xs.push(other);
        let v = ver(&xs, &t, &cfg, &mo, &ao, 0).unwrap();
        assert!(!v.accepted);
    }

    #[test]
    fn mismatched_oracles_are_refused() {
        let t = Arc::new(DescribedSampler::uniform_table("u1", budget(20, 1)).unwrap());
        let cfg = VerConfig::defaults(4, 1.0, 0.25, 12, Flavor::Classical).unwrap();
        let (_, ao) = oracles(&t, 12);
        let q = ComplexityOracle::exact(OracleTarget::Qukt { t: 12 });
        let h = Histogram::from_outcomes(&vec!["0".parse().unwrap(); cfg.s as usize]);
        assert!(matches!(ver_histogram(&h, &t, &cfg, &q, &ao, 0), Err(Error::OracleMismatch(_))));
        let wrong_t = ComplexityOracle::exact(OracleTarget::Ukt { t: 16 });
        assert!(matches!(ver_histogram(&h, &t, &cfg, &wrong_t, &ao, 0), Err(Error::OracleMismatch(_))));
    }

    #[test]
    fn honest_uniform_bit_accepts() {
        let t = Arc::new(DescribedSampler::uniform_table("u1", budget(20, 1)).unwrap());
        let cfg = VerConfig::defaults(4, 1.0, 0.25, 20, Flavor::Classical).unwrap();
        let (mo, ao) = oracles(&t, 20);
        let cat = t.categorical().unwrap();
        let trials = 2000u64;
        let mut acc = 0;
        for i in 0..trials {
            let mut rng = crate::rng::derived_rng(99, &[i]);
            let h = cat.sample_histogram(cfg.s, &mut rng);
            acc += ver_histogram(&h, &t, &cfg, &mo, &ao, i).unwrap().accepted as u64;
        }
        let (_, hi) = wilson_interval(acc, trials, Z_SIGMA);
        assert!(hi >= 1.0 - cfg.correctness_slack(), "{acc}/{trials}");
    }

    #[test]
    fn ver_star_extremes() {
        let o: VmOutcome = "01".parse().unwrap();
        let t = Arc::new(DescribedSampler::explicit_table("pm", ExplicitDistribution::point_mass(o.clone()), budget(20, 2), None).unwrap());
        let mut cfg = VerConfig::defaults(2, 1.0, 0.5, 12, Flavor::Classical).unwrap();
        cfg.s = 3;
        let (mo, ao) = oracles(&t, 12);
        let n = (cfg.star_blocks() * cfg.s) as usize;
        let v = ver_star(&vec![o; n], &t, &cfg, &mo, &ao, 1).unwrap();
        assert!(v.accepted);
        assert_eq!(v.count, Some(cfg.star_blocks()));
        let v = ver_star(&vec!["11".parse().unwrap(); n], &t, &cfg, &mo, &ao, 1).unwrap();
        assert!(!v.accepted);
        assert_eq!(v.count, Some(0));
        assert!(matches!(ver_star(&vec!["01".parse().unwrap(); n - 1], &t, &cfg, &mo, &ao, 1), Err(Error::WrongArity { .. })));
    }

    #[test]
    fn one_sided_never_overestimates_without_failures() {
        let t = Arc::new(DescribedSampler::classical_vm("tail", assemble_str("1").unwrap(), budget(16, 2)).unwrap());
        let o = make_oracle(OracleTarget::ProbabilityOf(t.clone()), "one-sided:0@3".parse().unwrap()).unwrap();
        let cat = t.categorical().unwrap();
        let mut rng = crate::rng::rng_from(4);
        for q in 0..10_000u64 {
            let h = cat.sample_histogram(1 + q % 5, &mut rng);
            assert!(o.answer(&h, 2, q).unwrap() >= o.truth(&h, 2).unwrap());
        }
    }

    #[test]
    fn two_sided_is_mostly_within_a_bit() {
        let o = make_oracle(OracleTarget::Ukt { t: 16 }, "two-sided:0.1@5".parse().unwrap()).unwrap();
        let mut rng = crate::rng::rng_from(8);
        let mut good = 0;
        for _ in 0..10_000 {
            let x = BitTape::from_u64(rand::Rng::random::<u64>(&mut rng) & 3, 2);
            let y = BitTape::from_u64(rand::Rng::random::<u64>(&mut rng) & 3, 2);
            let h = Histogram::from_tapes(&[x, y]);
            let truth = o.truth(&h, 2).unwrap();
            good += ((o.answer(&h, 2, 0).unwrap() - truth).abs() <= 1.0) as u32;
        }
        assert!(good >= 8800, "{good}");
    }

    #[test]
    fn exact_oracle_matches_joint_complexity() {
        let o = ComplexityOracle::exact(OracleTarget::Ukt { t: 12 });
        let mut rng = crate::rng::rng_from(21);
        let b = budget(12, 2);
        for _ in 0..100 {
            let len = 1 + rand::Rng::random_range(&mut rng, 0..4usize);
            let tup: Vec<BitTape> = (0..len).map(|_| BitTape::from_u64(rand::Rng::random::<u64>(&mut rng) & 3, 2)).collect();
            let a = o.answer(&Histogram::from_tapes(&tup), 2, 0).unwrap();
            let e = crate::bitvm::joint_ukt(&tup, &b).unwrap();
            assert!(a == e || (a - e).abs() < 1e-9, "{a} vs {e}");
        }
    }

    #[test]
    fn qas_extremes() {
        let cfg = QasConfigV { n: 16, c: 1.05, m: 1 };
        let mc = ComplexityOracle::exact(OracleTarget::Ukt { t: 12 });
        let mq = ComplexityOracle::exact(OracleTarget::Qukt { t: 12 });
        let xs = vec!["0".parse().unwrap(); 16];
        let v = qas_verify(&xs, &cfg, &mc, &mq, 0).unwrap();
        assert!(!v.accepted);
        assert_eq!(v.gaps.len(), 16);
        assert!(matches!(qas_verify(&xs[..3], &cfg, &mc, &mq, 0), Err(Error::WrongArity { .. })));
        let bad = QasConfigV { n: 16, c: 0.5, m: 4 };
        assert!(qas_verify(&xs, &bad, &mc, &mq, 0).is_err());
    }

    #[test]
    fn verdicts_serialize_stably() {
        let v = Verdict {
            verifier: VerifierKind::Qas,
            accepted: true,
            k: Some(f64::INFINITY),
            neg_log_p: None,
            alpha: Some(4.0),
            count: Some(3),
            blocks: vec![],
            gaps: vec![f64::INFINITY, 1.5],
            seed: vec![1, 2, 3],
            scaled: false,
        };
        let s = serde_json::to_string(&v).unwrap();
        assert!(s.contains("\"k\":\"inf\""));
        let back: Verdict = serde_json::from_str(&s).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }
}
