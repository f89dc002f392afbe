// Copyright 2026 the Kolmoverify Authors
// SPDX-License-Identifier: Apache-2.0

//! Nonnegative extended reals are plain `f64` values where `+inf` marks
//! an impossible outcome. This module holds the conversions and the JSON
//! encoding, which writes infinities as the string `"inf"`.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// `log2` of an arbitrary-size positive integer, accurate to double precision.
pub fn log2_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap().log2();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap();
    top.log2() + shift as f64
}

/// `-log2(count / 2^log2den)`, or `+inf` when `count` is zero.
pub fn neg_log2_dyadic(count: u128, log2den: u32) -> f64 {
    if count == 0 {
        f64::INFINITY
    } else {
        log2den as f64 - (count as f64).log2()
    }
}

/// `-log2` of an exact nonnegative rational, `+inf` at zero.
pub fn neg_log2_rational(p: &BigRational) -> f64 {
    if p.is_zero() {
        return f64::INFINITY;
    }
    assert!(p.is_positive(), "probabilities are nonnegative");
    let num = p.numer().magnitude();
    let den = p.denom().magnitude();
    log2_biguint(den) - log2_biguint(num)
}

pub fn neg_log2(p: f64) -> f64 {
    if p <= 0.0 {
        f64::INFINITY
    } else {
        -p.log2()
    }
}

/// `log2(2^a + 2^b)` computed stably; `-inf` acts as the additive identity.
pub fn log2_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp2().ln_1p() / std::f64::consts::LN_2
}

/// `log2(sum 2^x_i)`.
pub fn log2_sum_exp(values: impl IntoIterator<Item = f64>) -> f64 {
    let vals: Vec<f64> = values.into_iter().collect();
    let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    let s: f64 = vals.iter().map(|v| (v - hi).exp2()).sum();
    hi + s.log2()
}

/// Serde adapter for `f64` fields that may hold infinities.
pub mod json {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        to_value(*v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        from_value(&v).map_err(serde::de::Error::custom)
    }

    pub fn to_value(v: f64) -> serde_json::Value {
        if v == f64::INFINITY {
            serde_json::Value::String("inf".into())
        } else if v == f64::NEG_INFINITY {
            serde_json::Value::String("-inf".into())
        } else if v.is_nan() {
            serde_json::Value::String("nan".into())
        } else {
            serde_json::json!(v)
        }
    }

    pub fn from_value(v: &serde_json::Value) -> Result<f64, String> {
        match v {
            serde_json::Value::Number(n) => n.as_f64().ok_or_else(|| "bad number".to_string()),
            serde_json::Value::String(s) if s == "inf" => Ok(f64::INFINITY),
            serde_json::Value::String(s) if s == "-inf" => Ok(f64::NEG_INFINITY),
            serde_json::Value::String(s) if s == "nan" => Ok(f64::NAN),
            other => Err(format!("expected a number or \"inf\", got {other}")),
        }
    }

    /// Same encoding for `Option<f64>`, with `None` as `null`.
    pub mod opt {
        use serde::{Deserialize, Deserializer, Serialize, Serializer};

        pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
            v.map(super::to_value).serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
            match serde_json::Value::deserialize(d)? {
                serde_json::Value::Null => Ok(None),
                v => super::from_value(&v).map(Some).map_err(serde::de::Error::custom),
            }
        }
    }

    /// Same encoding for `Vec<f64>`.
    pub mod vec {
        use serde::{Deserialize, Deserializer, Serialize, Serializer};

        pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
            v.iter().map(|&x| super::to_value(x)).collect::<Vec<_>>().serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
            let v = Vec::<serde_json::Value>::deserialize(d)?;
            v.iter()
                .map(super::from_value)
                .collect::<Result<_, _>>()
                .map_err(serde::de::Error::custom)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn dyadic_logs() {
        assert_eq!(neg_log2_dyadic(1, 12), 12.0);
        assert_eq!(neg_log2_dyadic(0, 12), f64::INFINITY);
        let r = BigRational::new(BigInt::from(3), BigInt::from(4096));
        assert!((neg_log2_rational(&r) - (12.0 - 3f64.log2())).abs() < 1e-12);
    }

    #[test]
    fn huge_integers_log_correctly() {
        let x = BigUint::from(1u8) << 5000u32;
        assert_eq!(log2_biguint(&x), 5000.0);
    }

    #[test]
    fn log_sum_matches_direct() {
        let v = [-3.0, -1.0, -10.0];
        let direct: f64 = v.iter().map(|x: &f64| x.exp2()).sum::<f64>().log2();
        assert!((log2_sum_exp(v) - direct).abs() < 1e-12);
        assert!((log2_add(-3.0, -1.0) - (0.125f64 + 0.5).log2()).abs() < 1e-12);
        assert_eq!(log2_sum_exp([f64::NEG_INFINITY]), f64::NEG_INFINITY);
    }
}
