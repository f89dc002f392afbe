// Copyright 2026 the Kolmoverify Authors
// SPDX-License-Identifier: Apache-2.0

//! Small statistics helpers: Wilson intervals, exact binomial tails, and
//! seeded categorical sampling.

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::bitvm::VmOutcome;
use crate::dist::{ExplicitDistribution, Histogram};

/// Width of every confidence band, in standard deviations.
pub const Z_SIGMA: f64 = 3.0;

/// Wilson score interval for `successes` out of `trials` at `z` sigmas.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let den = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / den;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / den;
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

fn ln_choose(n: u64, k: u64) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// Lanczos approximation of `ln Γ(x)` for `x > 0`.
fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return (std::f64::consts::PI / (std::f64::consts::PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + G + 0.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// `Pr[Bin(n, p) >= k]`.
pub fn binomial_upper_tail(n: u64, p: f64, k: u64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > n {
        return 0.0;
    }
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    (k..=n).map(|i| (ln_choose(n, i) + i as f64 * lp + (n - i) as f64 * lq).exp()).sum::<f64>().min(1.0)
}

/// A categorical sampler over a finite float distribution (inverse CDF).
#[derive(Clone, Debug)]
pub struct Categorical {
    outcomes: Vec<VmOutcome>,
    probs: Vec<f64>,
    cdf: Vec<f64>,
}

impl Categorical {
    pub fn new(d: &ExplicitDistribution<f64>) -> Self {
        let outcomes: Vec<VmOutcome> = d.support().cloned().collect();
        let probs: Vec<f64> = d.iter().map(|(_, p)| *p).collect();
        let total: f64 = probs.iter().sum();
        let mut acc = 0.0;
        let cdf = probs
            .iter()
            .map(|p| {
                acc += p / total;
                acc
            })
            .collect();
        Self { outcomes, probs, cdf }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> &VmOutcome {
        let u: f64 = rng.random();
        let i = self.cdf.partition_point(|&c| c <= u).min(self.outcomes.len() - 1);
        &self.outcomes[i]
    }

    /// Histogram of `s` independent draws, generated by sequential binomial
    /// splitting so the cost is independent of `s`.
    pub fn sample_histogram(&self, s: u64, rng: &mut impl Rng) -> Histogram {
        let mut h = Histogram::new();
        let mut left = s;
        let mut mass_left = 1.0f64;
        let total: f64 = self.probs.iter().sum();
        for (i, o) in self.outcomes.iter().enumerate() {
            if left == 0 {
                break;
            }
            let p = self.probs[i] / total;
            let n = if i + 1 == self.outcomes.len() || mass_left <= p {
                left
            } else {
                let q = (p / mass_left).clamp(0.0, 1.0);
                Binomial::new(left, q).map(|b| b.sample(rng)).unwrap_or(0)
            };
            h.add(o.clone(), n);
            left -= n;
            mass_left -= p;
        }
        h
    }

    pub fn outcomes(&self) -> &[VmOutcome] {
        &self.outcomes
    }
}
