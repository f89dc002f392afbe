// Copyright 2026 the Kolmoverify Authors
// SPDX-License-Identifier: Apache-2.0

//! Frozen constants. `compute` re-derives them from scratch; `check` compares
//! bit for bit against the shipped file.

use serde::{Deserialize, Serialize};

use crate::bits::BitTape;
use crate::bitvm::{ukt, VmBudget};
use crate::error::Result;
use crate::qsim::qukt;

use super::theory;

pub const SHIPPED: &str = include_str!("../../goldens.json");

/// Budgets at which the constants are measured.
pub const CODING_T: u32 = 20;
pub const CODING_T_Q: u32 = 28;
pub const EMBED_T: u32 = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Goldens {
    #[serde(with = "crate::extreal::json::opt")]
    pub c_univ: Option<f64>,
    #[serde(with = "crate::extreal::json::opt")]
    pub c_q: Option<f64>,
    #[serde(with = "crate::extreal::json::opt")]
    pub c_embed: Option<f64>,
    /// `uK^12("00")` with `m = 2`.
    #[serde(with = "crate::extreal::json::opt")]
    pub ukt_00_t12: Option<f64>,
    /// `quK^16("0")` with `m = 1`.
    #[serde(with = "crate::extreal::json::opt")]
    pub qukt_0_t16: Option<f64>,
}

impl Goldens {
    pub fn shipped() -> Result<Self> {
        Self::from_json(SHIPPED)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("goldens serialize") + "\n"
    }

    pub fn compute() -> Result<Self> {
        let b = |t, m| VmBudget::new(4, t, m);
        Ok(Self {
            c_univ: Some(theory::coding_constant(CODING_T)?.0),
            c_q: Some(theory::quantum_coding_constant(CODING_T_Q)?.0),
            c_embed: Some(theory::embedding_constant(EMBED_T)?.0),
            ukt_00_t12: Some(ukt(&"00".parse::<BitTape>()?, &b(12, 2)?)?),
            qukt_0_t16: Some(qukt(&"0".parse::<BitTape>()?, &b(16, 1)?)?),
        })
    }

    fn fields(&self) -> [(&'static str, Option<f64>); 5] {
        [
            ("c_univ", self.c_univ),
            ("c_q", self.c_q),
            ("c_embed", self.c_embed),
            ("ukt_00_t12", self.ukt_00_t12),
            ("qukt_0_t16", self.qukt_0_t16),
        ]
    }

    /// Names of constants that differ from `fresh` or are not frozen.
    pub fn drift(&self, fresh: &Goldens) -> Vec<String> {
        self.fields()
            .into_iter()
            .zip(fresh.fields())
            .filter(|((_, a), (_, b))| a.is_none() || a.map(f64::to_bits) != b.map(f64::to_bits))
            .map(|((name, a), (_, b))| format!("{name}: frozen {a:?}, computed {b:?}"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_file_parses_and_is_complete() {
        let g = Goldens::shipped().unwrap();
        assert!(g.fields().iter().all(|(_, v)| v.is_some_and(f64::is_finite)));
        assert_eq!(Goldens::from_json(&g.to_json()).unwrap(), g);
    }

    #[test]
    fn drift_reports_unfrozen_and_changed() {
        let g = Goldens::shipped().unwrap();
        assert!(g.drift(&g).is_empty());
        let mut h = g.clone();
        h.c_q = None;
        assert_eq!(h.drift(&g).len(), 1);
        assert_eq!(g.drift(&h).len(), 1);
    }
}
