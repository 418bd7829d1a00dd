//! Exact rationals in instance and report files, written as `"p/q"`.

use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use submod_core::rational;
use submod_core::Rational;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Q(pub Rational);

impl Q {
    pub fn int(n: i64) -> Q {
        Q(rational::int(n))
    }

    pub fn ratio(p: i64, q: i64) -> Q {
        Q(rational::ratio(p, q))
    }

    pub fn to_f64(&self) -> f64 {
        rational::to_f64(&self.0)
    }
}

impl fmt::Debug for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&rational::format(&self.0))
    }
}

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&rational::format(&self.0))
    }
}

impl From<Rational> for Q {
    fn from(q: Rational) -> Q {
        Q(q)
    }
}

pub fn unwrap_all(qs: &[Q]) -> Vec<Rational> {
    qs.iter().map(|q| q.0.clone()).collect()
}

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rational::format(&self.0))
    }
}

struct QVisitor;

impl Visitor<'_> for QVisitor {
    type Value = Q;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a rational as \"p/q\", a decimal string, or an integer")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Q, E> {
        rational::parse(v).map(Q).ok_or_else(|| E::custom(format!("malformed number {v:?}")))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Q, E> {
        Ok(Q::int(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Q, E> {
        Ok(Q(Rational::from_integer(v.into())))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Q, E> {
        Err(E::custom(format!("floating-point number {v} is not exact; write it as a \"p/q\" string")))
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        d.deserialize_any(QVisitor)
    }
}
