// JSON numbers for integers that fit in 64 bits, decimal strings otherwise.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Repr {
    Signed(i64),
    Unsigned(u64),
    Text(String),
}

fn to_repr(n: &BigInt) -> Repr {
    if let Some(v) = n.to_i64() {
        Repr::Signed(v)
    } else if let Some(v) = n.to_u64() {
        Repr::Unsigned(v)
    } else {
        Repr::Text(n.to_string())
    }
}

fn from_repr<E: serde::de::Error>(r: Repr) -> Result<BigInt, E> {
    match r {
        Repr::Signed(v) => Ok(BigInt::from(v)),
        Repr::Unsigned(v) => Ok(BigInt::from(v)),
        Repr::Text(s) => s.trim().parse().map_err(E::custom),
    }
}

pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(to_repr).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<Repr>::deserialize(d)?
            .into_iter()
            .map(from_repr::<D::Error>)
            .collect()
    }
}

pub mod matrix_list {
    use super::*;

    pub fn serialize<S: Serializer>(ms: &[Vec<Vec<BigInt>>], s: S) -> Result<S::Ok, S::Error> {
        ms.iter()
            .map(|m| m.iter().map(|row| row.iter().map(to_repr).collect::<Vec<_>>()).collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Vec<BigInt>>>, D::Error> {
        Vec::<Vec<Vec<Repr>>>::deserialize(d)?
            .into_iter()
            .map(|m| {
                m.into_iter()
                    .map(|row| row.into_iter().map(from_repr::<D::Error>).collect())
                    .collect()
            })
            .collect()
    }
}
