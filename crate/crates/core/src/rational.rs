//! Exact rational helpers shared by every module.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        if q.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Exact binary value of a finite float.
pub fn from_f64(x: f64) -> Rational {
    Rational::from_float(x).unwrap_or_else(zero)
}

/// First continued-fraction convergent of `x` within `tol`; falls back to the exact float.
pub fn snap_tol(x: f64, tol: f64) -> Rational {
    if !x.is_finite() {
        return zero();
    }
    let mut den = 1u64;
    while den <= 1 << 40 {
        let q = snap(x, den);
        if (to_f64(&q) - x).abs() <= tol {
            return q;
        }
        den *= 2;
    }
    from_f64(x)
}

/// Closest rational to `x` whose denominator does not exceed `max_den`.
pub fn snap(x: f64, max_den: u64) -> Rational {
    if !x.is_finite() {
        return zero();
    }
    let neg = x < 0.0;
    let target = x.abs();
    // Continued-fraction convergents, keeping the best semiconvergent at the end.
    let (mut p0, mut q0, mut p1, mut q1) = (0u128, 1u128, 1u128, 0u128);
    let mut rest = target;
    loop {
        let a = rest.floor();
        if a > 1e18 {
            break;
        }
        let a = a as u128;
        let p2 = a * p1 + p0;
        let q2 = a * q1 + q0;
        if q2 > max_den as u128 {
            let k = (max_den as u128 - q0) / q1.max(1);
            let (ps, qs) = (k * p1 + p0, k * q1 + q0);
            let err_s = (ps as f64 / qs as f64 - target).abs();
            let err_c = if q1 == 0 { f64::INFINITY } else { (p1 as f64 / q1 as f64 - target).abs() };
            if qs > 0 && err_s < err_c {
                p1 = ps;
                q1 = qs;
            }
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = rest - a as f64;
        if frac < 1e-15 {
            break;
        }
        rest = 1.0 / frac;
    }
    if q1 == 0 {
        return zero();
    }
    let q = Rational::new(BigInt::from(p1), BigInt::from(q1));
    if neg {
        -q
    } else {
        q
    }
}

pub fn format(q: &Rational) -> String {
    if q.denom().is_one() {
        format!("{}/1", q.numer())
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `"p/q"`, `"p"`, or a finite decimal such as `"0.25"`.
pub fn parse(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Rational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let neg = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        let num: BigInt = digits.parse().ok()?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let q = Rational::new(num, den);
        return Some(if neg { -q } else { q });
    }
    let p: BigInt = s.parse().ok()?;
    Some(Rational::from_integer(p))
}

/// Harmonic number H_m = 1 + 1/2 + ... + 1/m as a float.
pub fn harmonic(m: usize) -> f64 {
    (1..=m).map(|i| 1.0 / i as f64).sum()
}

pub fn max_ref<'a>(a: &'a Rational, b: &'a Rational) -> &'a Rational {
    if a >= b {
        a
    } else {
        b
    }
}

pub fn lcm_of_denominators<'a>(qs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    qs.into_iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

/// Serde adapter writing rationals as `"p/q"` strings.
pub mod serde_str {
    use super::Rational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse(&s).ok_or_else(|| D::Error::custom(format!("malformed rational {s:?}")))
    }
}

pub mod serde_str_vec {
    use super::Rational;
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(qs: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        qs.iter().map(super::format).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| super::parse(s).ok_or_else(|| D::Error::custom(format!("malformed rational {s:?}"))))
            .collect()
    }
}

pub mod serde_str_opt {
    use super::Rational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match q {
            Some(q) => s.serialize_some(&super::format(q)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        let v = Option::<String>::deserialize(d)?;
        v.map(|s| super::parse(&s).ok_or_else(|| D::Error::custom(format!("malformed rational {s:?}"))))
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_and_parse_round_trip() {
        for q in [ratio(3, 4), ratio(-7, 2), int(5), zero()] {
            assert_eq!(parse(&format(&q)), Some(q));
        }
        assert_eq!(parse("0.25"), Some(ratio(1, 4)));
        assert_eq!(parse("-1.5"), Some(ratio(-3, 2)));
        assert_eq!(parse("1/0"), None);
        assert_eq!(parse("x"), None);
    }

    #[test]
    fn snap_recovers_small_fractions() {
        assert_eq!(snap(0.5, 1000), ratio(1, 2));
        assert_eq!(snap(1.0 / 3.0, 1000), ratio(1, 3));
        assert_eq!(snap(2.0 / 3.0 + 1e-12, 1000), ratio(2, 3));
        assert_eq!(snap(-0.75, 1000), ratio(-3, 4));
        assert_eq!(snap(0.0, 10), zero());
        assert_eq!(snap(1.0, 10), one());
        assert_eq!(snap(3.14159265, 7), ratio(22, 7));
    }
}
