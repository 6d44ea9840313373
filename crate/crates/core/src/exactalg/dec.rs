//! Serde adapter writing a `BigInt` as a decimal string.

use num_bigint::BigInt;
use serde::{Deserialize, Deserializer, Serializer};

use super::matrix::parse_int;

pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
    let s = String::deserialize(d)?;
    parse_int(&s).map_err(serde::de::Error::custom)
}
