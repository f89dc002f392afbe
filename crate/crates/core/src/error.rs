// Copyright 2026 the Kolmoverify Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("budget too large for exact enumeration: t={t} exceeds the cap of {cap}")]
    BudgetTooLarge { t: u32, cap: u32 },
    #[error("invalid budget: {0}")]
    InvalidBudget(String),
    #[error("length mismatch: expected {expected} bits, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("circuit uses {qubits} qubits, more than the supported {max}")]
    TooManyQubits { qubits: usize, max: usize },
    #[error("expansion of {entries} joint entries exceeds the cap of {cap}")]
    ExpansionTooLarge { entries: u128, cap: u128 },
    #[error("conditioning event has zero probability")]
    ZeroMassEvent,
    #[error("seed of {seed_bits} bits cannot be stretched to {tape_bits} bits")]
    SeedTooLarge { seed_bits: u32, tape_bits: u32 },
    #[error("oracle mismatch: {0}")]
    OracleMismatch(String),
    #[error("wrong arity: expected {expected} samples, got {actual}")]
    WrongArity { expected: usize, actual: usize },
    #[error("unsupported oracle spec: {0}")]
    UnsupportedSpec(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown experiment id `{0}`")]
    UnknownExperiment(String),
    #[error("unknown sampler `{0}`")]
    UnknownSampler(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
