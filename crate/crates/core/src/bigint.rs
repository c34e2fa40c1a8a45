//! Serde adapter: big integers as JSON numbers when they fit in `u64`,
//! decimal strings otherwise.

use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{de, Deserialize, Deserializer, Serializer};

pub fn serialize<S: Serializer>(value: &BigUint, serializer: S) -> Result<S::Ok, S::Error> {
    match value.to_u64() {
        Some(v) => serializer.serialize_u64(v),
        None => serializer.serialize_str(&value.to_string()),
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Repr {
    Number(u64),
    Text(String),
}

pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<BigUint, D::Error> {
    match Repr::deserialize(deserializer)? {
        Repr::Number(v) => Ok(BigUint::from(v)),
        Repr::Text(s) => BigUint::from_str(&s).map_err(de::Error::custom),
    }
}
