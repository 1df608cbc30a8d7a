//! Exact rationals serialized as `"p/q"` strings (`"2"` when integral).

use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serializer};

pub fn serialize<S: Serializer>(r: &Ratio<u32>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(r)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Ratio<u32>, D::Error> {
    let text = String::deserialize(d)?;
    Ratio::from_str(&text).map_err(serde::de::Error::custom)
}

/// The same encoding for `Option<Ratio<u32>>`, with `null` for `None`.
pub mod option {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Option<Ratio<u32>>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.collect_str(r),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Ratio<u32>>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|text| Ratio::from_str(&text).map_err(serde::de::Error::custom))
            .transpose()
    }
}
