//! Exact rational scalars and the extended (possibly infinite) values used
//! for measures and norms.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign};

use num::bigint::BigInt;
use num::rational::Ratio;
use num::traits::{One, Zero};

/// Arbitrary-precision rational number. All quantities in the library that
/// are mathematically rational are carried exactly in this type.
pub type Rational = Ratio<BigInt>;

/// `p/q` as a [`Rational`]. Panics on `q == 0`.
pub fn rat(p: i64, q: i64) -> Rational {
    Ratio::new(BigInt::from(p), BigInt::from(q))
}

/// The integer `p` as a [`Rational`].
pub fn int(p: i64) -> Rational {
    Ratio::from_integer(BigInt::from(p))
}

/// `base^exp` with `exp >= 0`, exact.
pub fn pow_u32(base: &Rational, exp: u32) -> Rational {
    Ratio::new(base.numer().pow(exp), base.denom().pow(exp))
}

/// Parses `"p"` or `"p/q"` (lowest terms not required, `q != 0`).
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let numer: BigInt = num_str
        .parse()
        .map_err(|_| format!("invalid rational `{s}`"))?;
    let denom: BigInt = match den_str {
        Some(d) => d.parse().map_err(|_| format!("invalid rational `{s}`"))?,
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err(format!("zero denominator in `{s}`"));
    }
    Ok(Ratio::new(numer, denom))
}

/// Canonical form: lowest terms, positive denominator, `p` when the
/// denominator is one and `p/q` otherwise.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// A nonnegative-or-infinite quantity: level-set measures, L1-type norms and
/// step widths can all be infinite on these models.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Extended {
    Finite(Rational),
    Infinite,
}

impl Extended {
    pub fn zero() -> Self {
        Extended::Finite(Rational::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinite)
    }

    pub fn as_finite(&self) -> Option<&Rational> {
        match self {
            Extended::Finite(r) => Some(r),
            Extended::Infinite => None,
        }
    }

    /// Larger of the two, with `Infinite` on top.
    pub fn max(self, other: Extended) -> Extended {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl From<Rational> for Extended {
    fn from(r: Rational) -> Self {
        Extended::Finite(r)
    }
}

impl Add for Extended {
    type Output = Extended;

    fn add(self, rhs: Extended) -> Extended {
        match (self, rhs) {
            (Extended::Finite(a), Extended::Finite(b)) => Extended::Finite(a + b),
            _ => Extended::Infinite,
        }
    }
}

impl AddAssign for Extended {
    fn add_assign(&mut self, rhs: Extended) {
        let lhs = std::mem::replace(self, Extended::Infinite);
        *self = lhs + rhs;
    }
}

impl PartialOrd for Extended {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Extended {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => a.cmp(b),
            (Extended::Finite(_), Extended::Infinite) => Ordering::Less,
            (Extended::Infinite, Extended::Finite(_)) => Ordering::Greater,
            (Extended::Infinite, Extended::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(r) => write!(f, "{r}"),
            Extended::Infinite => write!(f, "inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_roundtrip() {
        for s in ["0", "3", "-3", "1/2", "-7/3", "6/8"] {
            let r = parse_rational(s).unwrap();
            let back = parse_rational(&format_rational(&r)).unwrap();
            assert_eq!(r, back);
        }
        assert_eq!(format_rational(&parse_rational("6/8").unwrap()), "3/4");
        assert_eq!(format_rational(&parse_rational("4/2").unwrap()), "2");
        assert_eq!(format_rational(&parse_rational("3/-6").unwrap()), "-1/2");
    }

    #[test]
    fn parse_rejects_zero_denominator() {
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1/2/3").is_err());
    }

    #[test]
    fn extended_ordering() {
        assert!(Extended::Finite(int(1_000_000)) < Extended::Infinite);
        assert!(Extended::Infinite <= Extended::Infinite);
        assert_eq!(
            Extended::Finite(rat(1, 2)) + Extended::Finite(rat(1, 3)),
            Extended::Finite(rat(5, 6))
        );
        assert_eq!(
            Extended::Finite(rat(1, 2)) + Extended::Infinite,
            Extended::Infinite
        );
    }
}
