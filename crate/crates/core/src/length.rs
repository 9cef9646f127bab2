//! Exact nonnegative rational lengths.
//!
//! Every length in the crate is a [`Length`]; there is no floating point in
//! any comparison or persisted value. Lengths print as `"p/q"` and parse from
//! `"p/q"`, plain integers or finite decimals (`"0.125"`).

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Length(BigRational);

impl Length {
    pub fn zero() -> Self {
        Length(BigRational::zero())
    }

    pub fn one() -> Self {
        Length(BigRational::one())
    }

    pub fn integer(n: i64) -> Self {
        Length(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num/den`; panics on a zero denominator.
    pub fn ratio(num: i64, den: i64) -> Self {
        Length(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// `1 / 2^k`.
    pub fn dyadic(k: u32) -> Self {
        Length(BigRational::new(BigInt::one(), BigInt::one() << k))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Length(r)
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs_diff(&self, other: &Length) -> Length {
        Length((&self.0 - &other.0).abs())
    }

    pub fn half(&self) -> Length {
        Length(&self.0 / BigRational::from_integer(BigInt::from(2)))
    }

    /// Lossy conversion for human-readable summaries only.
    pub fn to_f64_lossy(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }
}

impl fmt::Display for Length {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for Length {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || Error::input(format!("cannot parse length {s:?}"));
        if s.is_empty() {
            return Err(bad());
        }
        if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            return Ok(Length(BigRational::new(p, q)));
        }
        let (negative, digits) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
        {
            return Err(bad());
        }
        let joined = format!("{int_part}{frac_part}");
        let numer: BigInt = if joined.is_empty() {
            BigInt::zero()
        } else {
            joined.parse().map_err(|_| bad())?
        };
        let denom = num_traits::pow(BigInt::from(10), frac_part.len());
        let value = BigRational::new(numer, denom);
        Ok(Length(if negative { -value } else { value }))
    }
}

impl Serialize for Length {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Length {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Add for Length {
    type Output = Length;
    fn add(self, rhs: Length) -> Length {
        Length(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a Length> for &'a Length {
    type Output = Length;
    fn add(self, rhs: &'a Length) -> Length {
        Length(&self.0 + &rhs.0)
    }
}

impl<'a> Add<&'a Length> for Length {
    type Output = Length;
    fn add(self, rhs: &'a Length) -> Length {
        Length(self.0 + &rhs.0)
    }
}

impl AddAssign<&Length> for Length {
    fn add_assign(&mut self, rhs: &Length) {
        self.0 += &rhs.0;
    }
}

impl AddAssign for Length {
    fn add_assign(&mut self, rhs: Length) {
        self.0 += rhs.0;
    }
}

impl Sub for Length {
    type Output = Length;
    fn sub(self, rhs: Length) -> Length {
        Length(self.0 - rhs.0)
    }
}

impl<'a> Sub<&'a Length> for &'a Length {
    type Output = Length;
    fn sub(self, rhs: &'a Length) -> Length {
        Length(&self.0 - &rhs.0)
    }
}

impl Mul<i64> for &Length {
    type Output = Length;
    fn mul(self, rhs: i64) -> Length {
        Length(&self.0 * BigRational::from_integer(BigInt::from(rhs)))
    }
}

impl Mul<i64> for Length {
    type Output = Length;
    fn mul(self, rhs: i64) -> Length {
        &self * rhs
    }
}

impl Sum for Length {
    fn sum<I: Iterator<Item = Length>>(iter: I) -> Length {
        iter.fold(Length::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Length> for Length {
    fn sum<I: Iterator<Item = &'a Length>>(iter: I) -> Length {
        iter.fold(Length::zero(), |acc, x| acc + x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_integers_and_decimals() {
        assert_eq!("1/2".parse::<Length>().unwrap(), Length::ratio(1, 2));
        assert_eq!("6/4".parse::<Length>().unwrap(), Length::ratio(3, 2));
        assert_eq!("3".parse::<Length>().unwrap(), Length::integer(3));
        assert_eq!("0.125".parse::<Length>().unwrap(), Length::ratio(1, 8));
        assert_eq!("2.5".parse::<Length>().unwrap(), Length::ratio(5, 2));
        assert_eq!(".5".parse::<Length>().unwrap(), Length::ratio(1, 2));
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "1/0", "abc", "1.2.3", "1e5", "/"] {
            assert!(s.parse::<Length>().is_err(), "{s}");
        }
    }

    #[test]
    fn displays_as_fraction() {
        assert_eq!(Length::integer(3).to_string(), "3/1");
        assert_eq!(Length::dyadic(3).to_string(), "1/8");
    }

    #[test]
    fn sixths_sum_to_one() {
        let total: Length = [Length::ratio(1, 2), Length::ratio(1, 3), Length::ratio(1, 6)]
            .iter()
            .sum();
        assert_eq!(total, Length::one());
    }
}
