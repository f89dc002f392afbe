// Copyright 2026 the Kolmoverify Authors
// SPDX-License-Identifier: Apache-2.0

//! Fixed-length bit strings.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// An ordered, fixed-length sequence of bits. Equality is bit-exact, so
/// `"0"` and `"00"` are different tapes.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitTape {
    bits: Vec<bool>,
}

impl BitTape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn zeros(len: usize) -> Self {
        Self { bits: vec![false; len] }
    }

    /// The low `len` bits of `value`, most significant first.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= 64, "from_u64 supports at most 64 bits");
        let bits = (0..len).map(|i| (value >> (len - 1 - i)) & 1 == 1).collect();
        Self { bits }
    }

    /// Interprets the tape as an unsigned integer, most significant bit first.
    pub fn to_u64(&self) -> u64 {
        assert!(self.bits.len() <= 64, "to_u64 supports at most 64 bits");
        self.bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn push(&mut self, b: bool) {
        self.bits.push(b);
    }

    pub fn extend_from(&mut self, other: &BitTape) {
        self.bits.extend_from_slice(&other.bits);
    }

    pub fn concat(parts: &[BitTape]) -> BitTape {
        let mut out = BitTape::new();
        for p in parts {
            out.extend_from(p);
        }
        out
    }

    pub fn slice(&self, start: usize, end: usize) -> BitTape {
        BitTape { bits: self.bits[start..end].to_vec() }
    }

    /// Reads `width` bits starting at `pos` as an unsigned integer, or `None`
    /// if the tape ends first.
    pub fn read_uint(&self, pos: usize, width: usize) -> Option<u64> {
        if pos + width > self.bits.len() {
            return None;
        }
        Some(self.bits[pos..pos + width].iter().fold(0u64, |acc, &b| (acc << 1) | b as u64))
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Length-prefixed hex dump, e.g. `"12:0x013"`. The value is read most
    /// significant bit first and zero-padded to `ceil(len / 4)` digits.
    pub fn to_hex_dump(&self) -> String {
        format!("{}:0x{}", self.len(), self.hex_digits())
    }

    /// Lowercase hex digits of the tape's integer value, left-padded to
    /// `ceil(len / 4)` digits. Empty for the empty tape.
    pub fn hex_digits(&self) -> String {
        let ndig = self.len().div_ceil(4);
        let pad = ndig * 4 - self.len();
        let mut padded = vec![false; pad];
        padded.extend_from_slice(&self.bits);
        padded
            .chunks(4)
            .map(|c| {
                let v = c.iter().fold(0u32, |acc, &b| (acc << 1) | b as u32);
                std::char::from_digit(v, 16).unwrap()
            })
            .collect()
    }

    /// Parses hex digits into a tape of exactly `len` bits. Fails if the value
    /// does not fit.
    pub fn from_hex_digits(digits: &str, len: usize) -> Result<BitTape> {
        let mut bits = Vec::with_capacity(digits.len() * 4);
        for ch in digits.chars() {
            let v = ch
                .to_digit(16)
                .ok_or_else(|| Error::Parse(format!("invalid hex digit `{ch}`")))?;
            for i in (0..4).rev() {
                bits.push((v >> i) & 1 == 1);
            }
        }
        if bits.len() < len {
            let mut padded = vec![false; len - bits.len()];
            padded.extend(bits);
            bits = padded;
        }
        let extra = bits.len() - len;
        if bits[..extra].iter().any(|&b| b) {
            return Err(Error::Parse(format!("hex value `{digits}` does not fit in {len} bits")));
        }
        Ok(BitTape { bits: bits[extra..].to_vec() })
    }

    pub fn parse_hex_dump(s: &str) -> Result<BitTape> {
        let (len, rest) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("hex dump `{s}` lacks a length prefix")))?;
        let len: usize = len
            .parse()
            .map_err(|_| Error::Parse(format!("bad length prefix in `{s}`")))?;
        let digits = rest
            .strip_prefix("0x")
            .ok_or_else(|| Error::Parse(format!("hex dump `{s}` lacks 0x")))?;
        Self::from_hex_digits(digits, len)
    }
}

impl fmt::Display for BitTape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitTape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitTape(\"{self}\")")
    }
}

impl FromStr for BitTape {
    type Err = Error;

    /// Parses a string of `0`/`1` characters.
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("invalid bit `{other}` in `{s}`"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitTape::from_bits)
    }
}

/// Serialized as its `0`/`1` string.
impl serde::Serialize for BitTape {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for BitTape {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
