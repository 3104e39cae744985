//! Scalar parameters: exact rationals, or floats carrying an absolute tolerance.
//!
//! Every class parameter, coordinate and ratio in the crate is a [`Ratio`].
//! Arithmetic between two exact values stays exact; as soon as one operand is
//! approximate the result is approximate and inherits the larger tolerance.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Tolerance attached to decimal literals when none is given explicitly.
pub const DEFAULT_FLOAT_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub enum Ratio {
    Exact(BigRational),
    Approx { value: f64, tol: f64 },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse number {input:?}: {reason}")]
pub struct ParseRatioError {
    pub input: String,
    pub reason: &'static str,
}

impl Ratio {
    pub fn int(n: i64) -> Self {
        Ratio::Exact(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num/den` in lowest terms. Panics on a zero denominator.
    pub fn frac(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Ratio::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn approx(value: f64, tol: f64) -> Self {
        Ratio::Approx {
            value,
            tol: tol.abs(),
        }
    }

    /// The exact rational value of a finite float.
    pub fn from_f64_exact(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(Ratio::Exact)
    }

    pub fn zero() -> Self {
        Ratio::Exact(BigRational::zero())
    }

    pub fn one() -> Self {
        Ratio::Exact(BigRational::one())
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Ratio::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Ratio::Exact(r) => Some(r),
            Ratio::Approx { .. } => None,
        }
    }

    /// Absolute tolerance; zero for exact values.
    pub fn tol(&self) -> f64 {
        match self {
            Ratio::Exact(_) => 0.0,
            Ratio::Approx { tol, .. } => *tol,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Ratio::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Ratio::Approx { value, .. } => *value,
        }
    }

    /// Same value with a different tolerance (exact values become approximate).
    pub fn with_tol(&self, tol: f64) -> Self {
        Ratio::approx(self.to_f64(), tol)
    }

    /// Three-way comparison. Approximate operands within the larger of their
    /// tolerances compare equal.
    pub fn compare(&self, other: &Ratio) -> Ordering {
        match (self, other) {
            (Ratio::Exact(a), Ratio::Exact(b)) => a.cmp(b),
            _ => {
                let tol = self.tol().max(other.tol());
                let (a, b) = (self.to_f64(), other.to_f64());
                if (a - b).abs() <= tol {
                    Ordering::Equal
                } else if a < b {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
        }
    }

    /// `|self - other| <= tol`, exact when all three are exact.
    pub fn within(&self, other: &Ratio, tol: &Ratio) -> bool {
        let diff = (self - other).abs();
        match (&diff, tol) {
            (Ratio::Exact(d), Ratio::Exact(t)) => d <= t,
            _ => diff.to_f64() <= tol.to_f64().max(diff.tol()),
        }
    }

    pub fn signum(&self) -> i32 {
        match self.compare(&Ratio::zero()) {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.signum() == 0
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Ratio {
        match self {
            Ratio::Exact(r) => Ratio::Exact(r.abs()),
            Ratio::Approx { value, tol } => Ratio::approx(value.abs(), *tol),
        }
    }

    pub fn recip(&self) -> Ratio {
        Ratio::one() / self
    }

    pub fn min(a: &Ratio, b: &Ratio) -> Ratio {
        if a.compare(b) == Ordering::Greater {
            b.clone()
        } else {
            a.clone()
        }
    }

    pub fn max(a: &Ratio, b: &Ratio) -> Ratio {
        if a.compare(b) == Ordering::Less {
            b.clone()
        } else {
            a.clone()
        }
    }

    pub fn pow(&self, k: u32) -> Ratio {
        let mut out = Ratio::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Structural identity: same representation and same value. Used for
    /// deduplication, where tolerance-equality would merge distinct members.
    pub fn identical(&self, other: &Ratio) -> bool {
        match (self, other) {
            (Ratio::Exact(a), Ratio::Exact(b)) => a == b,
            (Ratio::Approx { value: a, tol: s }, Ratio::Approx { value: b, tol: t }) => {
                a.to_bits() == b.to_bits() && s.to_bits() == t.to_bits()
            }
            _ => false,
        }
    }

    /// Total order for sorting: exact values by value, approximate values by
    /// float bits; exact sorts before approximate on ties.
    pub fn total_cmp(&self, other: &Ratio) -> Ordering {
        match (self, other) {
            (Ratio::Exact(a), Ratio::Exact(b)) => a.cmp(b),
            _ => self
                .to_f64()
                .total_cmp(&other.to_f64())
                .then_with(|| self.is_exact().cmp(&other.is_exact()).reverse()),
        }
    }

    /// Parses `p/q`, an integer, or a decimal literal. Decimals become
    /// approximate values with the given tolerance.
    pub fn parse_with_tol(s: &str, tol: f64) -> Result<Ratio, ParseRatioError> {
        let t = s.trim();
        let err = |reason| ParseRatioError {
            input: s.to_string(),
            reason,
        };
        if t.is_empty() {
            return Err(err("empty"));
        }
        if let Some((p, q)) = t.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| err("bad numerator"))?;
            let q: BigInt = q.trim().parse().map_err(|_| err("bad denominator"))?;
            if q.is_zero() {
                return Err(err("zero denominator"));
            }
            return Ok(Ratio::Exact(BigRational::new(p, q)));
        }
        if let Ok(n) = t.parse::<BigInt>() {
            return Ok(Ratio::Exact(BigRational::from_integer(n)));
        }
        let v: f64 = t.parse().map_err(|_| err("not a number"))?;
        if !v.is_finite() {
            return Err(err("not finite"));
        }
        Ok(Ratio::approx(v, tol))
    }
}

impl FromStr for Ratio {
    type Err = ParseRatioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ratio::parse_with_tol(s, DEFAULT_FLOAT_TOL)
    }
}

impl fmt::Display for Ratio {
    /// Exact values print as `p/q` (always with a denominator), approximate
    /// values as the shortest decimal that round-trips.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ratio::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Ratio::Approx { value, .. } => write!(f, "{value:?}"),
        }
    }
}

impl PartialEq for Ratio {
    fn eq(&self, other: &Self) -> bool {
        self.compare(other) == Ordering::Equal
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.compare(other))
    }
}

impl From<i64> for Ratio {
    fn from(n: i64) -> Self {
        Ratio::int(n)
    }
}

impl From<BigRational> for Ratio {
    fn from(r: BigRational) -> Self {
        Ratio::Exact(r)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&Ratio> for &Ratio {
            type Output = Ratio;
            fn $method(self, rhs: &Ratio) -> Ratio {
                match (self, rhs) {
                    (Ratio::Exact(a), Ratio::Exact(b)) => Ratio::Exact(a $op b),
                    _ => Ratio::approx(
                        self.to_f64() $op rhs.to_f64(),
                        self.tol().max(rhs.tol()),
                    ),
                }
            }
        }
        impl $trait<Ratio> for Ratio {
            type Output = Ratio;
            fn $method(self, rhs: Ratio) -> Ratio {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Ratio> for Ratio {
            type Output = Ratio;
            fn $method(self, rhs: &Ratio) -> Ratio {
                (&self).$method(rhs)
            }
        }
        impl $trait<Ratio> for &Ratio {
            type Output = Ratio;
            fn $method(self, rhs: Ratio) -> Ratio {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Div<&Ratio> for &Ratio {
    type Output = Ratio;
    fn div(self, rhs: &Ratio) -> Ratio {
        match (self, rhs) {
            (Ratio::Exact(a), Ratio::Exact(b)) => {
                assert!(!b.is_zero(), "division by exact zero");
                Ratio::Exact(a / b)
            }
            _ => Ratio::approx(self.to_f64() / rhs.to_f64(), self.tol().max(rhs.tol())),
        }
    }
}

impl Div<Ratio> for Ratio {
    type Output = Ratio;
    fn div(self, rhs: Ratio) -> Ratio {
        &self / &rhs
    }
}

impl Div<&Ratio> for Ratio {
    type Output = Ratio;
    fn div(self, rhs: &Ratio) -> Ratio {
        &self / rhs
    }
}

impl Div<Ratio> for &Ratio {
    type Output = Ratio;
    fn div(self, rhs: Ratio) -> Ratio {
        self / &rhs
    }
}

impl Neg for &Ratio {
    type Output = Ratio;
    fn neg(self) -> Ratio {
        match self {
            Ratio::Exact(r) => Ratio::Exact(-r),
            Ratio::Approx { value, tol } => Ratio::approx(-value, *tol),
        }
    }
}

impl Neg for Ratio {
    type Output = Ratio;
    fn neg(self) -> Ratio {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_lowest_terms() {
        let r = Ratio::frac(6, -8);
        assert_eq!(r.to_string(), "-3/4");
        assert_eq!(Ratio::int(2).to_string(), "2/1");
    }

    #[test]
    fn parse_forms() {
        assert_eq!("1/5".parse::<Ratio>().unwrap(), Ratio::frac(1, 5));
        assert_eq!("7".parse::<Ratio>().unwrap(), Ratio::int(7));
        let d: Ratio = "0.25".parse().unwrap();
        assert!(!d.is_exact());
        assert!("1/0".parse::<Ratio>().is_err());
        assert!("abc".parse::<Ratio>().is_err());
        assert!("inf".parse::<Ratio>().is_err());
    }

    #[test]
    fn mixed_arithmetic_goes_approximate() {
        let a = Ratio::frac(1, 2);
        let b = Ratio::approx(0.25, 1e-9);
        let c = &a + &b;
        assert!(!c.is_exact());
        assert_eq!(c.tol(), 1e-9);
        assert!((c.to_f64() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn tolerance_equality() {
        let a = Ratio::approx(0.5, 1e-9);
        assert_eq!(a.compare(&Ratio::frac(1, 2)), Ordering::Equal);
        assert_eq!(
            Ratio::approx(0.5 + 1e-6, 1e-9).compare(&Ratio::frac(1, 2)),
            Ordering::Greater
        );
        assert!(Ratio::frac(1, 3).within(&Ratio::frac(1, 3), &Ratio::zero()));
        assert!(!Ratio::frac(1, 3).within(&Ratio::frac(1, 4), &Ratio::zero()));
    }

    #[test]
    fn display_round_trips() {
        for s in ["3/7", "-1/2", "0/1"] {
            assert_eq!(s.parse::<Ratio>().unwrap().to_string(), s);
        }
        let v = Ratio::approx(0.1 + 0.2, 1e-9);
        let back = Ratio::parse_with_tol(&v.to_string(), 1e-9).unwrap();
        assert!(back.identical(&v));
    }
}
