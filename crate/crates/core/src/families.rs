//! The one-parameter families of 3-gc-self-affine non-trapezoids.
//!
//! Family I is every trapezoid and `P`. Families II and III have closed
//! forms; family IV is the graph of the unique root in `(alpha, 1)` of the
//! cubic `h_alpha`, isolated by bisection.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::affine_types::{flip_params, AffineClass};
use crate::ratio::Ratio;

/// Width and residual target of the family IV bisection.
pub const ROOT_TOL: f64 = 1e-12;
const MAX_BISECTIONS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FamilyId {
    I,
    II,
    III,
    IV,
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FamilyId::I => "I",
            FamilyId::II => "II",
            FamilyId::III => "III",
            FamilyId::IV => "IV",
        };
        f.write_str(s)
    }
}

impl FromStr for FamilyId {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "I" | "1" => Ok(FamilyId::I),
            "II" | "2" => Ok(FamilyId::II),
            "III" | "3" => Ok(FamilyId::III),
            "IV" | "4" => Ok(FamilyId::IV),
            other => Err(FamilyError::UnknownId(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FamilyError {
    #[error("alpha must lie in (0, 1), got {0}")]
    AlphaOutOfRange(String),
    #[error("family {0} has no curve parametrized by alpha")]
    NotACurve(FamilyId),
    #[error("unknown family {0:?}; expected I, II, III or IV")]
    UnknownId(String),
    #[error("bisection for alpha={alpha} did not bracket a root: h(lo)={h_lo}, h(hi)={h_hi}")]
    Bracket { alpha: f64, h_lo: f64, h_hi: f64 },
}

/// Result of isolating the family IV root.
#[derive(Clone, Debug, PartialEq)]
pub struct IsolatedRoot {
    pub lo: f64,
    pub hi: f64,
    pub value: f64,
    pub residual: f64,
    pub iterations: usize,
}

fn check_alpha(alpha: &Ratio) -> Result<f64, FamilyError> {
    if !(alpha.is_positive() && *alpha < Ratio::one()) {
        return Err(FamilyError::AlphaOutOfRange(alpha.to_string()));
    }
    Ok(alpha.to_f64())
}

/// `1 + 4a - 4a^2`, positive on `(0, 1)`.
pub fn discriminant_ii(a: f64) -> f64 {
    1.0 + 4.0 * a - 4.0 * a * a
}

/// `1 - 2a + 7a^2 - 6a^3 + a^4`, positive on `(0, 1)`.
pub fn discriminant_iii(a: f64) -> f64 {
    1.0 - 2.0 * a + 7.0 * a * a - 6.0 * a.powi(3) + a.powi(4)
}

fn h_f64(a: f64, b: f64) -> f64 {
    (a - a * a) * b.powi(3)
        + (1.0 - 2.0 * a + 2.0 * a * a) * b * b
        + (-1.0 + 2.0 * a - 4.0 * a * a + a.powi(3)) * b
        + a * a
}

/// Bisection for the root of `h_alpha` in `(alpha, 1)`.
pub fn isolate_iv(alpha: &Ratio) -> Result<IsolatedRoot, FamilyError> {
    let a = check_alpha(alpha)?;
    let (mut lo, mut hi) = (a, 1.0);
    let (h_lo, h_hi) = (h_f64(a, lo), h_f64(a, hi));
    if !(h_lo < 0.0 && h_hi > 0.0) {
        return Err(FamilyError::Bracket {
            alpha: a,
            h_lo,
            h_hi,
        });
    }
    let mut iterations = 0;
    loop {
        let mid = 0.5 * (lo + hi);
        let exhausted = mid <= lo || mid >= hi;
        let hm = h_f64(a, mid);
        if hm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
        let value = 0.5 * (lo + hi);
        let residual = h_f64(a, value).abs();
        let done = hi - lo < ROOT_TOL && residual < ROOT_TOL;
        if done || iterations >= MAX_BISECTIONS || exhausted {
            return Ok(IsolatedRoot {
                lo,
                hi,
                value,
                residual,
                iterations,
            });
        }
    }
}

/// The larger parameter of the family member with smaller parameter `alpha`.
pub fn family_beta(id: FamilyId, alpha: &Ratio) -> Result<Ratio, FamilyError> {
    let a = check_alpha(alpha)?;
    let b = match id {
        FamilyId::I => return Err(FamilyError::NotACurve(id)),
        FamilyId::II => {
            let d = discriminant_ii(a);
            debug_assert!(d > 0.0);
            (-1.0 + d.sqrt()) / (2.0 * a * (1.0 - a))
        }
        FamilyId::III => {
            let d = discriminant_iii(a);
            debug_assert!(d > 0.0);
            (1.0 - 3.0 * a + a * a + d.sqrt()) / (2.0 * (1.0 - a))
        }
        FamilyId::IV => isolate_iv(alpha)?.value,
    };
    Ok(Ratio::approx(b, ROOT_TOL))
}

/// `p_alpha`, `q_alpha` or `h_alpha` at `beta`; exact for exact input.
pub fn family_residual(id: FamilyId, alpha: &Ratio, beta: &Ratio) -> Result<Ratio, FamilyError> {
    let one = Ratio::one();
    let a = alpha;
    let b = beta;
    let om = &one - a;
    Ok(match id {
        FamilyId::I => return Err(FamilyError::NotACurve(id)),
        FamilyId::II => {
            let k = (a * &om).recip();
            b * b + &k * b - k
        }
        FamilyId::III => {
            let c = (&one - Ratio::int(3) * a + a * a) / &om;
            b * b - c * b - a / &om
        }
        FamilyId::IV => {
            let a2 = a * a;
            let c3 = a - &a2;
            let c2 = &one - Ratio::int(2) * a + Ratio::int(2) * &a2;
            let c1 = Ratio::int(-1) + Ratio::int(2) * a - Ratio::int(4) * &a2 + a.pow(3);
            c3 * b.pow(3) + c2 * b * b + c1 * b + a2
        }
    })
}

/// Families containing `c`; Q classes are tested in both parametrizations.
pub fn family_membership(c: &AffineClass, tol: &Ratio) -> BTreeSet<FamilyId> {
    let mut out = BTreeSet::new();
    match c {
        AffineClass::T { .. } | AffineClass::P => {
            out.insert(FamilyId::I);
        }
        AffineClass::Q { alpha, beta } => {
            let (fa, fb) = flip_params(alpha, beta);
            for id in [FamilyId::II, FamilyId::III, FamilyId::IV] {
                for (x, y) in [(alpha, beta), (&fa, &fb)] {
                    let r = family_residual(id, x, y).expect("curve family");
                    if r.abs().within(&Ratio::zero(), tol) {
                        out.insert(id);
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const II_HALF: f64 = 0.828_427_124_746_190_1;
    const III_HALF: f64 = 0.780_776_406_404_415_1;
    const IV_HALF: f64 = 0.804_873_686_318_251_8;

    #[test]
    fn values_at_one_half() {
        let h = Ratio::frac(1, 2);
        let ii = family_beta(FamilyId::II, &h).unwrap().to_f64();
        let iii = family_beta(FamilyId::III, &h).unwrap().to_f64();
        let iv = family_beta(FamilyId::IV, &h).unwrap().to_f64();
        assert!((ii - II_HALF).abs() < 1e-12);
        assert!((iii - III_HALF).abs() < 1e-12);
        assert!((iv - IV_HALF).abs() < 1e-12);
        assert!((ii - 2.0 * (2f64.sqrt() - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn residual_examples() {
        let h = Ratio::frac(1, 2);
        assert_eq!(
            family_residual(FamilyId::II, &h, &Ratio::frac(3, 5)).unwrap(),
            Ratio::frac(-31, 25)
        );
        assert_eq!(
            family_residual(FamilyId::IV, &h, &Ratio::frac(4, 5)).unwrap(),
            Ratio::frac(-1, 500)
        );
        let b = Ratio::approx(0.780_776_406_4, 1e-12);
        assert!(
            family_residual(FamilyId::III, &h, &b)
                .unwrap()
                .to_f64()
                .abs()
                < 1e-9
        );
    }

    #[test]
    fn membership_examples() {
        let tol = Ratio::approx(1e-9, 0.0);
        assert_eq!(
            family_membership(&AffineClass::t_frac(1, 3), &tol),
            [FamilyId::I].into()
        );
        let q = AffineClass::Q {
            alpha: Ratio::frac(1, 2),
            beta: Ratio::approx(0.828_427_124_7, 1e-12),
        };
        assert_eq!(family_membership(&q, &tol), [FamilyId::II].into());
        assert!(family_membership(&AffineClass::q_frac(1, 5, 1, 2), &tol).is_empty());
    }

    #[test]
    fn iv_bracket_signs_exact() {
        for k in 1..100 {
            let a = Ratio::frac(k, 100);
            let lo = family_residual(FamilyId::IV, &a, &a).unwrap();
            let hi = family_residual(FamilyId::IV, &a, &Ratio::one()).unwrap();
            let om = Ratio::one() - &a;
            assert_eq!(lo, -(&a * om.pow(4)));
            assert_eq!(hi, &a * om.pow(2));
        }
    }

    #[test]
    fn alpha_out_of_range() {
        assert!(family_beta(FamilyId::II, &Ratio::zero()).is_err());
        assert!(family_beta(FamilyId::IV, &Ratio::one()).is_err());
        assert!(family_beta(FamilyId::I, &Ratio::frac(1, 2)).is_err());
    }
}
