use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use crate::Error;

/// Angular-momentum quantum number stored exactly as twice its value, so
/// half-integers like 3/2 never touch floating point until physics needs them.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt {
    twice: i32,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { twice: 0 };

    /// Builds from twice the value: `from_twice(3)` is 3/2.
    pub const fn from_twice(twice: i32) -> Self {
        HalfInt { twice }
    }

    pub const fn from_int(v: i32) -> Self {
        HalfInt { twice: 2 * v }
    }

    pub const fn twice(self) -> i32 {
        self.twice
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.twice) / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    /// True when `self - other` is an integer, i.e. both live on the same
    /// (integer or half-odd) ladder.
    pub const fn same_parity(self, other: HalfInt) -> bool {
        (self.twice - other.twice) % 2 == 0
    }

    pub const fn abs(self) -> HalfInt {
        HalfInt {
            twice: self.twice.abs(),
        }
    }

    pub fn is_negative(self) -> bool {
        self.twice < 0
    }

    /// Inclusive ladder `self, self-1, ..., -self`, highest first.
    pub fn ladder_desc(self) -> impl Iterator<Item = HalfInt> {
        let top = self.twice;
        (-top..=top).rev().step_by(2).map(|t| HalfInt { twice: t })
    }

    /// j(j+1), the Casimir eigenvalue.
    pub fn casimir(self) -> f64 {
        let j = self.as_f64();
        j * (j + 1.0)
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt {
            twice: self.twice + rhs.twice,
        }
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt {
            twice: self.twice - rhs.twice,
        }
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt { twice: -self.twice }
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice % 2 == 0 {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl fmt::Debug for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for HalfInt {
    type Err = Error;

    /// Accepts `"2"`, `"-1"`, `"3/2"`, `"-1/2"`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let parse_i32 = |t: &str| {
            t.parse::<i32>()
                .map_err(|_| Error::invalid_argument(format!("cannot parse half-integer `{s}`")))
        };
        if let Some((num, den)) = s.split_once('/') {
            if den.trim() != "2" {
                return Err(Error::invalid_argument(format!(
                    "half-integer `{s}` must have denominator 2"
                )));
            }
            let twice = parse_i32(num)?;
            if twice % 2 == 0 {
                return Err(Error::invalid_argument(format!(
                    "`{s}` is an integer in disguise; write it without the /2"
                )));
            }
            Ok(HalfInt::from_twice(twice))
        } else {
            Ok(HalfInt::from_int(parse_i32(s)?))
        }
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for HalfInt {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for HalfInt {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        struct V;
        impl serde::de::Visitor<'_> for V {
            type Value = HalfInt;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a string like \"3/2\"")
            }
            fn visit_i64<E: serde::de::Error>(self, v: i64) -> Result<HalfInt, E> {
                i32::try_from(v)
                    .map(HalfInt::from_int)
                    .map_err(|_| E::custom("half-integer out of range"))
            }
            fn visit_u64<E: serde::de::Error>(self, v: u64) -> Result<HalfInt, E> {
                i32::try_from(v)
                    .map(HalfInt::from_int)
                    .map_err(|_| E::custom("half-integer out of range"))
            }
            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<HalfInt, E> {
                v.parse().map_err(|e: Error| E::custom(e.to_string()))
            }
        }
        de.deserialize_any(V)
    }
}
