// Copyright 2026 the Kolmoverify Authors
// SPDX-License-Identifier: Apache-2.0

//! File formats: distribution JSON, samples files and CSV.
//!
//! Distribution JSON:
//!
//! ```text
//! {"budget":{"n":4,"t":12,"m":2},"mode":"exact",
//!  "entries":[{"outcome":"⊥","num":3,"log2den":12}, ...]}
//! ```
//!
//! Entries with a power-of-two denominator carry `log2den`; others (sampled
//! tallies) carry `den`. Every finite `f64` is dyadic, so float
//! distributions round-trip exactly.
//!
//! Samples files start with `m=<bits>` and hold one sample per line as
//! `ceil(m/4)` lowercase hex digits (most significant bit first) or `⊥`.
//! Blank lines separate tuples.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::bits::BitTape;
use crate::bitvm::{Mode, UniversalDistribution, VmBudget, VmOutcome};
use crate::dist::{as_dyadic, ExplicitDistribution};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryDoc {
    pub outcome: VmOutcome,
    pub num: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log2den: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub den: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<VmBudget>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    pub entries: Vec<EntryDoc>,
}

impl DistributionDoc {
    pub fn from_universal(d: &UniversalDistribution) -> Self {
        let entries = d
            .counts()
            .iter()
            .map(|(o, &c)| match d.mode {
                Mode::Exact => EntryDoc { outcome: o.clone(), num: c as u64, log2den: Some(d.budget.t), den: None },
                Mode::Sampled { .. } => EntryDoc { outcome: o.clone(), num: c as u64, log2den: None, den: Some(d.total() as u64) },
            })
            .collect();
        Self { budget: Some(d.budget), mode: Some(d.mode), entries }
    }

    pub fn from_exact(d: &ExplicitDistribution<BigRational>, budget: Option<VmBudget>, mode: Option<Mode>) -> Result<Self> {
        let entries = d
            .iter()
            .map(|(o, p)| {
                let too_big = || Error::InvalidArgument(format!("probability {p} does not fit the entry format"));
                match as_dyadic(p) {
                    Some((num, k)) => Ok(EntryDoc {
                        outcome: o.clone(),
                        num: num.to_u64().ok_or_else(too_big)?,
                        log2den: Some(u32::try_from(k).map_err(|_| too_big())?),
                        den: None,
                    }),
                    None => Ok(EntryDoc {
                        outcome: o.clone(),
                        num: p.numer().to_u64().ok_or_else(too_big)?,
                        log2den: None,
                        den: Some(p.denom().to_u64().ok_or_else(too_big)?),
                    }),
                }
            })
            .collect::<Result<_>>()?;
        Ok(Self { budget, mode, entries })
    }

    /// Exact dyadic encoding of a float distribution.
    pub fn from_f64(d: &ExplicitDistribution<f64>, budget: Option<VmBudget>, mode: Option<Mode>) -> Result<Self> {
        let exact = d.map_probs(|&p| f64_to_rational(p));
        Self::from_exact(&exact, budget, mode)
    }

    fn rational_entries(&self) -> Result<Vec<(VmOutcome, BigRational)>> {
        self.entries
            .iter()
            .map(|e| {
                let den: BigInt = match (e.log2den, e.den) {
                    (Some(k), None) => BigInt::one() << k,
                    (None, Some(d)) if d > 0 => BigInt::from(d),
                    _ => return Err(Error::Parse(format!("entry for {} needs exactly one of log2den or den", e.outcome))),
                };
                Ok((e.outcome.clone(), BigRational::new(BigInt::from(e.num), den)))
            })
            .collect()
    }

    /// The distribution with exact arithmetic; the mass must be exactly 1.
    pub fn to_exact(&self) -> Result<ExplicitDistribution<BigRational>> {
        ExplicitDistribution::from_entries(self.rational_entries()?)
    }

    /// The distribution in floats; the mass must be 1 within tolerance.
    pub fn to_f64(&self) -> Result<ExplicitDistribution<f64>> {
        ExplicitDistribution::from_entries(self.rational_entries()?.into_iter().map(|(o, p)| (o, p.to_f64().unwrap_or(f64::NAN))))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// The exact value of a finite nonnegative float.
pub fn f64_to_rational(p: f64) -> BigRational {
    if p == 0.0 {
        return BigRational::zero();
    }
    BigRational::from_float(p).expect("finite probabilities")
}

/// `outcome,probability` lines for plotting.
pub fn distribution_csv(d: &ExplicitDistribution<f64>) -> String {
    let mut out = String::from("outcome,probability\n");
    for (o, p) in d.iter() {
        out.push_str(&format!("{o},{p:e}\n"));
    }
    out
}

/// A parsed samples file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SamplesFile {
    pub m: u32,
    pub tuples: Vec<Vec<VmOutcome>>,
}

impl SamplesFile {
    pub fn single(m: u32, tuple: Vec<VmOutcome>) -> Self {
        Self { m, tuples: vec![tuple] }
    }

    /// All samples in file order, across tuples.
    pub fn flatten(&self) -> Vec<VmOutcome> {
        self.tuples.iter().flatten().cloned().collect()
    }

    pub fn render(&self) -> String {
        let mut out = format!("m={}\n", self.m);
        for (i, t) in self.tuples.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            for o in t {
                match o {
                    VmOutcome::Bottom => out.push('⊥'),
                    VmOutcome::Bits(b) => out.push_str(&b.hex_digits()),
                }
                out.push('\n');
            }
        }
        out
    }

    pub fn parse(src: &str) -> Result<Self> {
        let mut lines = src.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty samples file".into()))?;
        let m: u32 = header
            .trim()
            .strip_prefix("m=")
            .and_then(|v| v.parse().ok())
            .filter(|&m| m > 0)
            .ok_or_else(|| Error::Parse(format!("bad samples header `{header}`, expected m=<bits>")))?;
        let digits = (m as usize).div_ceil(4);
        let mut tuples = vec![];
        let mut cur = vec![];
        for (no, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() {
                if !cur.is_empty() {
                    tuples.push(std::mem::take(&mut cur));
                }
                continue;
            }
            if line == "⊥" {
                cur.push(VmOutcome::Bottom);
                continue;
            }
            if line.len() != digits {
                return Err(Error::LengthMismatch { expected: m as usize, actual: 4 * line.len() });
            }
            let b = BitTape::from_hex_digits(line, m as usize)
                .map_err(|e| Error::Parse(format!("line {}: {e}", no + 2)))?;
            cur.push(VmOutcome::Bits(b));
        }
        if !cur.is_empty() {
            tuples.push(cur);
        }
        Ok(Self { m, tuples })
    }
}

/// Quotes a CSV field when needed.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
