//! Primitive directions `(p, q)` and the slopes `r = p/q ∈ ℚ ∪ {∞}` they name.
//!
//! A direction `(p, q)` on the torus `T(x, y)` is the class of geodesics
//! parallel to `p(1, 0) + q(x, y)`. Directions are stored in canonical form:
//! `gcd(|p|, |q|) = 1` and either `q > 0` or `(p, q) = (1, 0)` (the slope `∞`).

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Slope {
    pub p: i64,
    pub q: i64,
}

/// A direction and its slope are the same data.
pub type Direction = Slope;

impl Slope {
    pub const INFINITY: Slope = Slope { p: 1, q: 0 };

    /// Canonical direction; rejects non-primitive or non-canonical input.
    pub fn direction(p: i64, q: i64) -> Result<Self> {
        if (p, q) == (0, 0) || p.gcd(&q) != 1 {
            return Err(Error::NotCoprime { p, q });
        }
        if q < 0 || (q == 0 && p != 1) {
            return Err(Error::NonCanonical { p, q });
        }
        Ok(Slope { p, q })
    }

    /// Reduces any nonzero vector to the canonical representative of its slope.
    pub fn from_vector(p: i64, q: i64) -> Result<Self> {
        if (p, q) == (0, 0) {
            return Err(Error::NotCoprime { p, q });
        }
        let g = p.gcd(&q);
        let (mut p, mut q) = (p / g, q / g);
        if q < 0 || (q == 0 && p < 0) {
            p = -p;
            q = -q;
        }
        Ok(Slope { p, q })
    }

    pub fn integer(n: i64) -> Self {
        Slope { p: n, q: 1 }
    }

    pub fn from_ratio(r: Rational) -> Self {
        Slope {
            p: *r.numer(),
            q: *r.denom(),
        }
    }

    pub fn new_ratio(p: i64, q: i64) -> Self {
        Self::from_vector(p, q).expect("nonzero vector")
    }

    pub fn is_infinite(&self) -> bool {
        self.q == 0
    }

    pub fn is_integer(&self) -> bool {
        self.q == 1
    }

    pub fn to_ratio(&self) -> Option<Rational> {
        (self.q != 0).then(|| Rational::new(self.p, self.q))
    }

    pub fn to_f64(&self) -> f64 {
        if self.q == 0 {
            f64::INFINITY
        } else {
            self.p as f64 / self.q as f64
        }
    }

    pub fn neg(&self) -> Self {
        if self.is_infinite() {
            *self
        } else {
            Slope { p: -self.p, q: self.q }
        }
    }

    /// Algebraic intersection `pq' − p'q` of the two torus curves.
    pub fn det(&self, other: &Slope) -> i64 {
        self.p * other.q - other.p * self.q
    }

    /// `max(|p|, |q|)`.
    pub fn height(&self) -> i64 {
        self.p.abs().max(self.q.abs())
    }

    /// Both coordinates odd.
    pub fn is_odd(&self) -> bool {
        self.p.is_odd() && self.q.is_odd()
    }
}

impl Ord for Slope {
    /// Orders finite slopes by value with `∞` last.
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_infinite(), other.is_infinite()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            (false, false) => (self.p as i128 * other.q as i128).cmp(&(other.p as i128 * self.q as i128)),
        }
    }
}

impl PartialOrd for Slope {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.q {
            0 => write!(f, "inf"),
            1 => write!(f, "{}", self.p),
            q => write!(f, "{}/{}", self.p, q),
        }
    }
}

impl FromStr for Slope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if matches!(s, "inf" | "infinity" | "∞") {
            return Ok(Slope::INFINITY);
        }
        let r = parse_rational(s)?;
        Ok(Slope::from_ratio(r))
    }
}

/// Parses `n`, `p/q`, or a finite decimal such as `-0.125` exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((num, den)) = s.split_once('/') {
        let num: i64 = num.trim().parse().map_err(|_| bad())?;
        let den: i64 = den.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let negative = int.starts_with('-');
        if frac.is_empty() || frac.len() > 15 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let int_part: i64 = match int {
            "" | "-" | "+" => 0,
            _ => int.parse().map_err(|_| bad())?,
        };
        let den = 10i64.pow(frac.len() as u32);
        let frac_part: i64 = frac.parse().map_err(|_| bad())?;
        let mag = int_part
            .abs()
            .checked_mul(den)
            .and_then(|v| v.checked_add(frac_part))
            .ok_or_else(bad)?;
        return Ok(Rational::new(if negative { -mag } else { mag }, den));
    }
    let n: i64 = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// All canonical slopes `p/q` with `|p| ≤ bound`, `1 ≤ q ≤ bound`, plus `∞`, sorted.
pub fn slopes_up_to(bound: i64) -> Vec<Slope> {
    let mut out = vec![Slope::INFINITY];
    for q in 1..=bound {
        for p in -bound..=bound {
            if p.gcd(&q) == 1 {
                out.push(Slope { p, q });
            }
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_forms() {
        assert_eq!(Slope::from_vector(-2, -4).unwrap(), Slope { p: 1, q: 2 });
        assert_eq!(Slope::from_vector(-3, 0).unwrap(), Slope::INFINITY);
        assert!(Slope::direction(2, 4).is_err());
        assert!(Slope::direction(1, -2).is_err());
        assert!(Slope::direction(-1, 0).is_err());
        assert!(Slope::direction(0, 0).is_err());
        assert_eq!(Slope::direction(0, 1).unwrap(), Slope::integer(0));
    }

    #[test]
    fn parsing() {
        assert_eq!("9/14".parse::<Slope>().unwrap(), Slope { p: 9, q: 14 });
        assert_eq!("inf".parse::<Slope>().unwrap(), Slope::INFINITY);
        assert_eq!(parse_rational("-0.125").unwrap(), Rational::new(-1, 8));
        assert_eq!(parse_rational("-.5").unwrap(), Rational::new(-1, 2));
        assert_eq!(parse_rational("3").unwrap(), Rational::from_integer(3));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn ordering_puts_infinity_last() {
        let s = slopes_up_to(2);
        assert_eq!(s.first().unwrap().to_string(), "-2");
        assert_eq!(*s.last().unwrap(), Slope::INFINITY);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
    }
}
