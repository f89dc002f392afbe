// Copyright 2026 the Kolmoverify Authors
// SPDX-License-Identifier: Apache-2.0

//! Finite distributions over [`VmOutcome`]s and tuples of them.
//!
//! Probabilities are generic over [`Prob`], implemented for exact rationals
//! and for `f64`. Entropies, divergences and logs always come out as `f64`.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::bitvm::VmOutcome;
use crate::error::{Error, Result};
use crate::extreal::neg_log2_rational;
use crate::TOL_P;

/// Joint supports larger than this are refused; callers must sample.
pub const EXPANSION_CAP: u128 = 1 << 20;

pub trait Prob:
    Clone
    + PartialOrd
    + Debug
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + 'static
{
    const EXACT: bool;
    fn as_f64(&self) -> f64;
    fn from_ratio(num: u128, den: u128) -> Self;
    /// `-log2 p`, `+inf` at zero.
    fn neg_log2(&self) -> f64;
    fn abs_val(&self) -> Self;
}

impl Prob for f64 {
    const EXACT: bool = false;
    fn as_f64(&self) -> f64 {
        *self
    }
    fn from_ratio(num: u128, den: u128) -> Self {
        num as f64 / den as f64
    }
    fn neg_log2(&self) -> f64 {
        crate::extreal::neg_log2(*self)
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
}

impl Prob for BigRational {
    const EXACT: bool = true;
    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn from_ratio(num: u128, den: u128) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn neg_log2(&self) -> f64 {
        neg_log2_rational(self)
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
}

pub type Rational = BigRational;

pub fn dyadic(num: u128, log2den: u32) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(1u8) << log2den)
}

/// Is `r` of the form `num / 2^k`? Returns `(num, k)`.
pub fn as_dyadic(r: &BigRational) -> Option<(BigInt, u64)> {
    let den = r.denom();
    let tz = den.trailing_zeros().unwrap_or(0);
    if (den >> tz as usize) == BigInt::one() {
        Some((r.numer().clone(), tz))
    } else {
        None
    }
}

fn check_mass<P: Prob>(total: &P) -> Result<()> {
    let ok = if P::EXACT { total.is_one() } else { (total.as_f64() - 1.0).abs() <= TOL_P };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("distribution mass is {:?}, expected 1", total.as_f64())))
    }
}

/// A finite distribution over outcomes. Zero-probability entries are never
/// stored.
#[derive(Clone, Debug, PartialEq)]
pub struct ExplicitDistribution<P: Prob> {
    entries: BTreeMap<VmOutcome, P>,
}

impl<P: Prob> ExplicitDistribution<P> {
    /// Builds a distribution, merging repeated outcomes. Fails on negative
    /// weights or mass other than 1 (exactly for rationals, within `TOL_P`
    /// for floats).
    pub fn from_entries(entries: impl IntoIterator<Item = (VmOutcome, P)>) -> Result<Self> {
        let d = Self::from_entries_unnormalized(entries)?;
        check_mass(&d.total_mass())?;
        Ok(d)
    }

    /// Like [`Self::from_entries`] without the mass check, for sub-probability
    /// measures.
    pub fn from_entries_unnormalized(entries: impl IntoIterator<Item = (VmOutcome, P)>) -> Result<Self> {
        let mut map: BTreeMap<VmOutcome, P> = BTreeMap::new();
        for (o, p) in entries {
            if p < P::zero() {
                return Err(Error::InvalidArgument(format!("negative probability for {o}")));
            }
            if p.is_zero() {
                continue;
            }
            let slot = map.entry(o).or_insert_with(P::zero);
            *slot = slot.clone() + p;
        }
        Ok(Self { entries: map })
    }

    pub fn point_mass(o: VmOutcome) -> Self {
        Self { entries: BTreeMap::from([(o, P::one())]) }
    }

    /// Uniform over the given distinct outcomes.
    pub fn uniform(outcomes: impl IntoIterator<Item = VmOutcome>) -> Result<Self> {
        let outs: Vec<_> = outcomes.into_iter().collect();
        if outs.is_empty() {
            return Err(Error::InvalidArgument("uniform over an empty set".into()));
        }
        let w = P::from_ratio(1, outs.len() as u128);
        Self::from_entries(outs.into_iter().map(|o| (o, w.clone())))
    }

    pub fn prob(&self, o: &VmOutcome) -> P {
        self.entries.get(o).cloned().unwrap_or_else(P::zero)
    }

    pub fn entries(&self) -> &BTreeMap<VmOutcome, P> {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VmOutcome, &P)> {
        self.entries.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &VmOutcome> {
        self.entries.keys()
    }

    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    pub fn total_mass(&self) -> P {
        self.entries.values().fold(P::zero(), |acc, p| acc + p.clone())
    }

    pub fn to_f64(&self) -> ExplicitDistribution<f64> {
        ExplicitDistribution { entries: self.entries.iter().map(|(o, p)| (o.clone(), p.as_f64())).collect() }
    }

    pub fn map_probs<Q: Prob>(&self, f: impl Fn(&P) -> Q) -> ExplicitDistribution<Q> {
        ExplicitDistribution {
            entries: self.entries.iter().map(|(o, p)| (o.clone(), f(p))).filter(|(_, q)| !q.is_zero()).collect(),
        }
    }

    /// Push-forward through `f`.
    pub fn map_outcomes(&self, f: impl Fn(&VmOutcome) -> VmOutcome) -> Self {
        let mut map: BTreeMap<VmOutcome, P> = BTreeMap::new();
        for (o, p) in &self.entries {
            let slot = map.entry(f(o)).or_insert_with(P::zero);
            *slot = slot.clone() + p.clone();
        }
        Self { entries: map }
    }
}

/// A finite distribution over `arity`-tuples of outcomes.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution<P: Prob> {
    arity: usize,
    entries: BTreeMap<Vec<VmOutcome>, P>,
}

impl<P: Prob> JointDistribution<P> {
    pub fn from_entries(arity: usize, entries: impl IntoIterator<Item = (Vec<VmOutcome>, P)>) -> Result<Self> {
        if arity == 0 {
            return Err(Error::InvalidArgument("arity must be at least 1".into()));
        }
        let mut map: BTreeMap<Vec<VmOutcome>, P> = BTreeMap::new();
        for (t, p) in entries {
            if t.len() != arity {
                return Err(Error::WrongArity { expected: arity, actual: t.len() });
            }
            if p < P::zero() {
                return Err(Error::InvalidArgument("negative probability".into()));
            }
            if p.is_zero() {
                continue;
            }
            let slot = map.entry(t).or_insert_with(P::zero);
            *slot = slot.clone() + p;
        }
        let total = map.values().fold(P::zero(), |a, p| a + p.clone());
        check_mass(&total)?;
        Ok(Self { arity, entries: map })
    }

    pub fn point_mass(tuple: Vec<VmOutcome>) -> Result<Self> {
        let arity = tuple.len();
        Self::from_entries(arity, [(tuple, P::one())])
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn entries(&self) -> &BTreeMap<Vec<VmOutcome>, P> {
        &self.entries
    }

    pub fn prob(&self, tuple: &[VmOutcome]) -> P {
        self.entries.get(tuple).cloned().unwrap_or_else(P::zero)
    }

    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    pub fn total_mass(&self) -> P {
        self.entries.values().fold(P::zero(), |a, p| a + p.clone())
    }

    /// The distribution of coordinate `i`.
    pub fn coordinate_marginal(&self, i: usize) -> ExplicitDistribution<P> {
        let mut map: BTreeMap<VmOutcome, P> = BTreeMap::new();
        for (t, p) in &self.entries {
            let slot = map.entry(t[i].clone()).or_insert_with(P::zero);
            *slot = slot.clone() + p.clone();
        }
        ExplicitDistribution { entries: map }
    }

    /// Views an arity-1 joint as a plain distribution.
    pub fn into_single(self) -> Option<ExplicitDistribution<P>> {
        (self.arity == 1).then(|| ExplicitDistribution {
            entries: self.entries.into_iter().map(|(mut t, p)| (t.pop().unwrap(), p)).collect(),
        })
    }

    pub fn to_f64(&self) -> JointDistribution<f64> {
        JointDistribution {
            arity: self.arity,
            entries: self.entries.iter().map(|(t, p)| (t.clone(), p.as_f64())).collect(),
        }
    }

    /// Probability of the event `pred`.
    pub fn event_mass(&self, pred: impl Fn(&[VmOutcome]) -> bool) -> P {
        self.entries.iter().filter(|(t, _)| pred(t)).fold(P::zero(), |a, (_, p)| a + p.clone())
    }
}

/// Multiset of outcomes. Every tuple statistic in the crate is symmetric in
/// the tuple's order, so tuples are handled through their histograms.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Histogram {
    counts: BTreeMap<VmOutcome, u64>,
    total: u64,
}

impl Histogram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_outcomes<'a>(it: impl IntoIterator<Item = &'a VmOutcome>) -> Self {
        let mut h = Self::new();
        for o in it {
            h.add(o.clone(), 1);
        }
        h
    }

    pub fn from_tapes<'a>(it: impl IntoIterator<Item = &'a crate::bits::BitTape>) -> Self {
        let mut h = Self::new();
        for b in it {
            h.add(VmOutcome::Bits(b.clone()), 1);
        }
        h
    }

    pub fn add(&mut self, o: VmOutcome, n: u64) {
        if n > 0 {
            *self.counts.entry(o).or_default() += n;
            self.total += n;
        }
    }

    pub fn merge(&mut self, other: &Histogram) {
        for (o, &n) in &other.counts {
            self.add(o.clone(), n);
        }
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VmOutcome, u64)> {
        self.counts.iter().map(|(o, &n)| (o, n))
    }

    pub fn count(&self, o: &VmOutcome) -> u64 {
        self.counts.get(o).copied().unwrap_or(0)
    }

    /// Stable 64-bit digest of the multiset.
    pub fn digest(&self) -> u64 {
        let mut h = crate::rng::splitmix64(self.total);
        for (o, &n) in &self.counts {
            let code = match o {
                VmOutcome::Bottom => 0x5eed_u64,
                VmOutcome::Bits(b) => {
                    let mut x = crate::rng::splitmix64(b.len() as u64 + 1);
                    for chunk in b.bits().chunks(64) {
                        let v = chunk.iter().fold(0u64, |a, &bit| (a << 1) | bit as u64);
                        x = crate::rng::splitmix64(x ^ v);
                    }
                    x
                }
            };
            h = crate::rng::splitmix64(h ^ code);
            h = crate::rng::splitmix64(h ^ n);
        }
        h
    }

    /// `-log2` of the probability of this exact tuple under `d^{⊗s}`.
    pub fn iid_neg_log2<P: Prob>(&self, d: &ExplicitDistribution<P>) -> f64 {
        let mut s = 0.0;
        for (o, &n) in &self.counts {
            let nl = d.prob(o).neg_log2();
            if nl == f64::INFINITY {
                return f64::INFINITY;
            }
            s += n as f64 * nl;
        }
        s
    }
}

/// Total variation distance, half the L1 distance.
pub fn tv_distance<P: Prob>(p: &ExplicitDistribution<P>, q: &ExplicitDistribution<P>) -> P {
    let mut sum = P::zero();
    for (o, a) in &p.entries {
        sum = sum + (a.clone() - q.prob(o)).abs_val();
    }
    for (o, b) in &q.entries {
        if !p.entries.contains_key(o) {
            sum = sum + b.clone();
        }
    }
    sum / (P::one() + P::one())
}

/// Total variation distance between two joints of the same arity.
pub fn joint_tv_distance<P: Prob>(p: &JointDistribution<P>, q: &JointDistribution<P>) -> P {
    let mut sum = P::zero();
    for (t, a) in &p.entries {
        sum = sum + (a.clone() - q.prob(t)).abs_val();
    }
    for (t, b) in &q.entries {
        if !p.entries.contains_key(t) {
            sum = sum + b.clone();
        }
    }
    sum / (P::one() + P::one())
}

/// Shannon entropy in bits.
pub fn shannon_entropy<P: Prob>(p: &ExplicitDistribution<P>) -> f64 {
    p.entries
        .values()
        .map(|x| {
            let v = x.as_f64();
            if v > 0.0 {
                v * x.neg_log2()
            } else {
                0.0
            }
        })
        .sum()
}

fn kl_terms<'a, P: Prob>(pairs: impl Iterator<Item = (&'a P, P)>) -> f64 {
    let mut sum = 0.0;
    for (a, b) in pairs {
        if a.is_zero() {
            continue;
        }
        if b.is_zero() {
            return f64::INFINITY;
        }
        sum += a.as_f64() * (b.neg_log2() - a.neg_log2());
    }
    sum.max(0.0)
}

/// `D(P || Q)` in bits; `+inf` when P charges an outcome Q does not.
pub fn kl_divergence<P: Prob>(p: &ExplicitDistribution<P>, q: &ExplicitDistribution<P>) -> f64 {
    if p == q {
        return 0.0;
    }
    kl_terms(p.entries.iter().map(|(o, a)| (a, q.prob(o))))
}

/// `D(P || Q)` in bits for joints.
pub fn joint_kl_divergence<P: Prob>(p: &JointDistribution<P>, q: &JointDistribution<P>) -> f64 {
    if p == q {
        return 0.0;
    }
    kl_terms(p.entries.iter().map(|(t, a)| (a, q.prob(t))))
}

/// The `s`-fold independent product.
pub fn product_power<P: Prob>(p: &ExplicitDistribution<P>, s: usize) -> Result<JointDistribution<P>> {
    if s == 0 {
        return Err(Error::InvalidArgument("product power needs s >= 1".into()));
    }
    let n = p.support_size() as u128;
    let size = n.checked_pow(s as u32).unwrap_or(u128::MAX);
    if size > EXPANSION_CAP {
        return Err(Error::ExpansionTooLarge { entries: size, cap: EXPANSION_CAP });
    }
    let mut cur: Vec<(Vec<VmOutcome>, P)> = vec![(Vec::new(), P::one())];
    for _ in 0..s {
        let mut next = Vec::with_capacity(cur.len() * p.support_size());
        for (t, w) in &cur {
            for (o, q) in &p.entries {
                let mut t2 = t.clone();
                t2.push(o.clone());
                next.push((t2, w.clone() * q.clone()));
            }
        }
        cur = next;
    }
    Ok(JointDistribution { arity: s, entries: cur.into_iter().collect() })
}

/// The distribution of a uniformly chosen coordinate.
pub fn marginal_mixture<P: Prob>(j: &JointDistribution<P>) -> ExplicitDistribution<P> {
    let s = P::from_ratio(1, j.arity as u128);
    let mut map: BTreeMap<VmOutcome, P> = BTreeMap::new();
    for (t, p) in &j.entries {
        let share = p.clone() * s.clone();
        for o in t {
            let slot = map.entry(o.clone()).or_insert_with(P::zero);
            *slot = slot.clone() + share.clone();
        }
    }
    ExplicitDistribution { entries: map }
}

/// Conditions `j` on the event `pred` (Bayes renormalization).
pub fn condition_on<P: Prob>(j: &JointDistribution<P>, pred: impl Fn(&[VmOutcome]) -> bool) -> Result<JointDistribution<P>> {
    let mass = j.event_mass(&pred);
    if mass.is_zero() {
        return Err(Error::ZeroMassEvent);
    }
    let entries = j
        .entries
        .iter()
        .filter(|(t, _)| pred(t))
        .map(|(t, p)| (t.clone(), p.clone() / mass.clone()))
        .collect();
    Ok(JointDistribution { arity: j.arity, entries })
}

/// Returns `(|H(P) - H(Q)|, Δ(P,Q)·log2|U| + 1/e)`, the two sides of the
/// continuity bound in its textbook-simplified form.
///
/// That form does not hold for all pairs; see [`sharp_entropy_continuity_bound`].
pub fn fannes_gap<P: Prob>(p: &ExplicitDistribution<P>, q: &ExplicitDistribution<P>, universe_size: u128) -> (f64, f64) {
    let lhs = (shannon_entropy(p) - shannon_entropy(q)).abs();
    let d = tv_distance(p, q).as_f64();
    (lhs, d * (universe_size as f64).log2() + std::f64::consts::E.recip())
}

/// The tight continuity bound `Δ·log2(|U|-1) + h(Δ)` for `Δ ≤ 1 - 1/|U|`,
/// and `log2|U|` beyond that.
pub fn sharp_entropy_continuity_bound(delta: f64, universe_size: u128) -> f64 {
    let u = universe_size as f64;
    if universe_size <= 1 {
        return 0.0;
    }
    if delta >= 1.0 - 1.0 / u {
        return u.log2();
    }
    delta * (u - 1.0).log2() + binary_entropy(delta)
}

pub fn binary_entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
    }
}

/// `eps + sqrt((log2(1/(1-eps)) + alpha + c) / s)`.
pub fn marginal_lemma_bound(eps: f64, alpha: f64, s: u64, c: f64) -> f64 {
    assert!((0.0..1.0).contains(&eps), "eps must lie in [0, 1)");
    assert!(s >= 1, "s must be positive");
    let inner = -(1.0 - eps).log2() + alpha + c;
    eps + (inner.max(0.0) / s as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitTape;
    use proptest::prelude::*;
    use rand::Rng;

    fn o(s: &str) -> VmOutcome {
        VmOutcome::Bits(s.parse::<BitTape>().unwrap())
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn coin() -> ExplicitDistribution<BigRational> {
        ExplicitDistribution::uniform([o("0"), o("1")]).unwrap()
    }

    #[test]
    fn tv_examples() {
        let p0 = ExplicitDistribution::<BigRational>::point_mass(o("0"));
        let p1 = ExplicitDistribution::<BigRational>::point_mass(o("1"));
        assert!(tv_distance(&coin(), &coin()).is_zero());
        assert_eq!(tv_distance(&p0, &p1), q(1, 1));
        assert_eq!(tv_distance(&coin(), &p0), q(1, 2));
    }

    #[test]
    fn entropy_examples() {
        let p0 = ExplicitDistribution::<BigRational>::point_mass(o("0"));
        assert_eq!(shannon_entropy(&p0), 0.0);
        let u3 = ExplicitDistribution::<BigRational>::uniform(
            (0..8).map(|v| VmOutcome::Bits(BitTape::from_u64(v, 3))),
        )
        .unwrap();
        assert!((shannon_entropy(&u3) - 3.0).abs() < 1e-12);
        let d = ExplicitDistribution::from_entries([(o("00"), q(1, 2)), (o("01"), q(1, 4)), (o("10"), q(1, 4))]).unwrap();
        assert!((shannon_entropy(&d) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn kl_examples() {
        let skew = ExplicitDistribution::from_entries([(o("0"), q(3, 4)), (o("1"), q(1, 4))]).unwrap();
        let expected = 0.5 * (0.5f64 / 0.75).log2() + 0.5 * (0.5f64 / 0.25).log2();
        assert!((kl_divergence(&coin(), &skew) - expected).abs() < 1e-12);
        assert!((kl_divergence(&coin(), &skew) - 0.2075).abs() < 1e-4);
        let p0 = ExplicitDistribution::<BigRational>::point_mass(o("0"));
        let p1 = ExplicitDistribution::<BigRational>::point_mass(o("1"));
        assert_eq!(kl_divergence(&p0, &p1), f64::INFINITY);
        assert_eq!(kl_divergence(&skew, &skew), 0.0);
    }

    #[test]
    fn product_and_marginal_examples() {
        let j1 = product_power(&coin(), 1).unwrap();
        assert_eq!(j1.clone().into_single().unwrap(), coin());
        let j2 = product_power(&coin(), 2).unwrap();
        assert_eq!(j2.support_size(), 4);
        assert!(j2.entries().values().all(|p| *p == q(1, 4)));
        let pm = ExplicitDistribution::<BigRational>::point_mass(o("1"));
        let j5 = product_power(&pm, 5).unwrap();
        assert_eq!(j5.prob(&vec![o("1"); 5]), q(1, 1));
        let pair = JointDistribution::<BigRational>::point_mass(vec![o("0"), o("1")]).unwrap();
        assert_eq!(marginal_mixture(&pair), coin());
        assert_eq!(marginal_mixture(&j1), coin());
    }

    #[test]
    fn expansion_cap_is_enforced() {
        let big = ExplicitDistribution::<f64>::uniform((0..1024).map(|v| VmOutcome::Bits(BitTape::from_u64(v, 10)))).unwrap();
        assert!(matches!(product_power(&big, 3), Err(Error::ExpansionTooLarge { .. })));
    }

    #[test]
    fn conditioning_examples() {
        let j2 = product_power(&coin(), 2).unwrap();
        assert_eq!(condition_on(&j2, |_| true).unwrap(), j2);
        let pm = condition_on(&j2, |t| t == [o("0"), o("0")]).unwrap();
        assert_eq!(pm.prob(&[o("0"), o("0")]), q(1, 1));
        assert!(matches!(condition_on(&j2, |_| false), Err(Error::ZeroMassEvent)));
    }

    #[test]
    fn fannes_examples() {
        let (l, r) = fannes_gap(&coin(), &coin(), 2);
        assert_eq!(l, 0.0);
        assert!((r - std::f64::consts::E.recip()).abs() < 1e-15);
        let a = ExplicitDistribution::<BigRational>::point_mass(o("0000"));
        let b = ExplicitDistribution::<BigRational>::point_mass(o("1111"));
        let (l, r) = fannes_gap(&a, &b, 16);
        assert_eq!(l, 0.0);
        assert!((r - (4.0 + std::f64::consts::E.recip())).abs() < 1e-12);
    }

    /// The simplified bound fails when one side spreads its displaced mass
    /// uniformly over the rest of the universe.
    #[test]
    fn simplified_continuity_bound_has_counterexamples() {
        let x = ExplicitDistribution::<f64>::point_mass(VmOutcome::Bits(BitTape::from_u64(0, 4)));
        let mut entries = vec![(VmOutcome::Bits(BitTape::from_u64(0, 4)), 0.5)];
        entries.extend((1..16).map(|v| (VmOutcome::Bits(BitTape::from_u64(v, 4)), 0.5 / 15.0)));
        let y = ExplicitDistribution::from_entries(entries).unwrap();
        let (lhs, rhs) = fannes_gap(&x, &y, 16);
        assert!(lhs > rhs, "lhs {lhs} rhs {rhs}");
        assert!(lhs <= sharp_entropy_continuity_bound(0.5, 16) + 1e-12);
    }

    #[test]
    fn lemma_bound_examples() {
        assert_eq!(marginal_lemma_bound(0.0, 0.0, 17, 0.0), 0.0);
        assert!((marginal_lemma_bound(0.0, 1.0, 100, 0.0) - 0.1).abs() < 1e-15);
        let v = marginal_lemma_bound(0.1, 4.0, 600, 2.0);
        let alt = 0.1 + (((1.0f64 / 0.9).ln() / 2f64.ln() + 6.0) / 600.0).powf(0.5);
        assert!((v - alt).abs() < 1e-12);
        assert!((v - 0.2013).abs() < 1e-4);
    }

    fn random_dyadic(rng: &mut impl Rng, m: usize, den_bits: u32) -> ExplicitDistribution<BigRational> {
        let den = 1u128 << den_bits;
        let k = 1usize << m;
        let mut cuts: Vec<u128> = (0..k - 1).map(|_| rng.random_range(0..=den)).collect();
        cuts.push(0);
        cuts.push(den);
        cuts.sort();
        let entries = (0..k).map(|i| (VmOutcome::Bits(BitTape::from_u64(i as u64, m)), dyadic(cuts[i + 1] - cuts[i], den_bits)));
        ExplicitDistribution::from_entries(entries).unwrap()
    }

    proptest! {
        #[test]
        fn pinsker_holds_exactly(seed in any::<u64>()) {
            let mut rng = crate::rng::rng_from(seed);
            let p = random_dyadic(&mut rng, 2, 6);
            let q = random_dyadic(&mut rng, 2, 6);
            let d = tv_distance(&p, &q).as_f64();
            prop_assert!(0.5 * d * d <= kl_divergence(&p, &q) + 1e-12);
        }

        #[test]
        fn jensen_step(v in proptest::collection::vec(0.0f64..1.0, 1..20)) {
            let s = v.len() as f64;
            let sum: f64 = v.iter().sum();
            let sq: f64 = v.iter().map(|x| x * x).sum();
            prop_assert!(sum <= (s * sq).sqrt() + 1e-12);
        }

        #[test]
        fn iid_marginal_is_the_base(seed in any::<u64>(), s in 1usize..4) {
            let mut rng = crate::rng::rng_from(seed);
            let p = random_dyadic(&mut rng, 2, 5);
            prop_assert_eq!(marginal_mixture(&product_power(&p, s).unwrap()), p);
        }

        #[test]
        fn conditioning_inflates_by_at_most_one_over_mass(seed in any::<u64>()) {
            let mut rng = crate::rng::rng_from(seed);
            let p = random_dyadic(&mut rng, 2, 5);
            let j = product_power(&p, 2).unwrap();
            let keep: Vec<bool> = (0..16).map(|_| rng.random_bool(0.6)).collect();
            let keys: Vec<Vec<VmOutcome>> = j.entries().keys().cloned().collect();
            let pred = |t: &[VmOutcome]| keys.iter().position(|k| k == t).map(|i| keep[i]).unwrap_or(false);
            let mass = j.event_mass(pred);
            prop_assume!(!mass.is_zero());
            let c = condition_on(&j, pred).unwrap();
            for (t, pc) in c.entries() {
                prop_assert!(pc.clone() <= j.prob(t) / mass.clone());
            }
            prop_assert!(c.total_mass().is_one());
        }

        #[test]
        fn tv_is_symmetric_and_bounded(seed in any::<u64>()) {
            let mut rng = crate::rng::rng_from(seed);
            let p = random_dyadic(&mut rng, 3, 7);
            let q = random_dyadic(&mut rng, 3, 7);
            let a = tv_distance(&p, &q);
            prop_assert_eq!(a.clone(), tv_distance(&q, &p));
            prop_assert!(a >= BigRational::zero() && a <= BigRational::one());
        }

        #[test]
        fn sharp_bound_holds(seed in any::<u64>()) {
            let mut rng = crate::rng::rng_from(seed);
            let p = random_dyadic(&mut rng, 4, 10);
            let q = random_dyadic(&mut rng, 4, 10);
            let (lhs, _) = fannes_gap(&p, &q, 16);
            let d = tv_distance(&p, &q).as_f64();
            prop_assert!(lhs <= sharp_entropy_continuity_bound(d, 16) + 1e-9);
        }
    }
}
