// Copyright 2026 the Kolmoverify Authors
// SPDX-License-Identifier: Apache-2.0

//! Kolmoverify: a desk-scale laboratory for verifying samplable distributions.
//!
//! The crate pins a tiny universal machine ([`bitvm`]) whose t-step output
//! distribution can be computed exactly, builds the quantum analogue on top of
//! a small statevector simulator ([`qsim`]), and uses both to answer
//! time-bounded complexity queries exactly. On top of that sit the verifiers
//! ([`verify`]), a cast of honest and adversarial samplers ([`samplers`]),
//! exact finite-distribution algebra ([`dist`]), and a harness that turns the
//! coding theorem, incompressibility, the marginal-distance lemma and the
//! verifier guarantees into seeded, repeatable experiments ([`experiments`]).

pub mod bits;
pub mod bitvm;
pub mod dist;
pub mod error;
pub mod experiments;
pub mod extreal;
pub mod io;
pub mod joint;
pub mod qsim;
pub mod rng;
pub mod samplers;
pub mod stats;
pub mod verify;

pub use bits::BitTape;
pub use bitvm::{joint_ukt, run_vm, ukt, universal_distribution, Mode, UniversalDistribution, VmBudget, VmOutcome};
pub use dist::{ExplicitDistribution, JointDistribution};
pub use error::{Error, Result};
pub use experiments::{run_experiment, ExperimentReport, RunOptions};
pub use joint::Flavor;
pub use qsim::{decode_circuit, quantum_universal_distribution, qukt, simulate, Circuit, Gate};
pub use samplers::{prg_stretch, Corpus, DescribedSampler, Expander, SamplerKind, TupleAdversary};
pub use verify::{ComplexityOracle, OracleSpec, OracleTarget, VerConfig, Verdict, VerifierKind};

/// Tolerance for any floating-point comparison of probabilities.
pub const TOL_P: f64 = 1e-12;
