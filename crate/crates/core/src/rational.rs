//! Exact rationals and their canonical string form (`"n"` or `"n/d"`).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

pub type Q = BigRational;
pub type Z = BigInt;

pub fn q(n: i64) -> Q {
    Q::from_integer(Z::from(n))
}

pub fn qz(n: Z) -> Q {
    Q::from_integer(n)
}

pub fn parse_q(s: &str) -> Result<Q, String> {
    let t = s.trim();
    match t.split_once('/') {
        Some((n, d)) => {
            let n: Z = n.trim().parse().map_err(|_| format!("bad rational {s:?}"))?;
            let d: Z = d.trim().parse().map_err(|_| format!("bad rational {s:?}"))?;
            if d.is_zero() {
                return Err(format!("zero denominator in {s:?}"));
            }
            Ok(Q::new(n, d))
        }
        None => t
            .parse::<Z>()
            .map(qz)
            .map_err(|_| format!("bad rational {s:?}")),
    }
}

pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Converts an integral rational to an integer.
pub fn to_integer(x: &Q) -> Option<Z> {
    x.is_integer().then(|| x.to_integer())
}

pub mod serde_q {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).map_err(D::Error::custom)
    }
}

pub mod serde_q_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&fmt_q(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_q(s).map_err(D::Error::custom))
            .collect()
    }
}

pub mod serde_q_mat {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(rows: &[Vec<Q>], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(rows.len()))?;
        for r in rows {
            let strs: Vec<String> = r.iter().map(fmt_q).collect();
            seq.serialize_element(&strs)?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Q>>, D::Error> {
        let v = Vec::<Vec<String>>::deserialize(d)?;
        v.iter()
            .map(|r| {
                r.iter()
                    .map(|s| parse_q(s).map_err(D::Error::custom))
                    .collect()
            })
            .collect()
    }
}

/// Integers serialized as decimal strings, so arbitrarily large values
/// survive JSON round trips.
pub mod serde_z_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(xs: &[Z], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&x.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Z>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| s.parse::<Z>().map_err(D::Error::custom))
            .collect()
    }
}

pub mod serde_z_mat {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(rows: &[Vec<Z>], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(rows.len()))?;
        for r in rows {
            let strs: Vec<String> = r.iter().map(Z::to_string).collect();
            seq.serialize_element(&strs)?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Z>>, D::Error> {
        let v = Vec::<Vec<String>>::deserialize(d)?;
        v.iter()
            .map(|r| r.iter().map(|s| s.parse::<Z>().map_err(D::Error::custom)).collect())
            .collect()
    }
}

pub mod serde_z_tensor {
    use super::*;
    use serde::Serialize;

    pub fn serialize<S: Serializer>(t: &[Vec<Vec<Z>>], s: S) -> Result<S::Ok, S::Error> {
        let strs: Vec<Vec<Vec<String>>> = t
            .iter()
            .map(|m| m.iter().map(|r| r.iter().map(Z::to_string).collect()).collect())
            .collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Vec<Z>>>, D::Error> {
        let v = Vec::<Vec<Vec<String>>>::deserialize(d)?;
        v.iter()
            .map(|m| {
                m.iter()
                    .map(|r| r.iter().map(|s| s.parse::<Z>().map_err(D::Error::custom)).collect())
                    .collect()
            })
            .collect()
    }
}

pub mod serde_z {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Z, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Z, D::Error> {
        let s = String::deserialize(d)?;
        s.parse::<Z>().map_err(D::Error::custom)
    }
}
