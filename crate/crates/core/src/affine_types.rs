//! Affine equivalence classes of convex quadrangles.
//!
//! A non-trapezoid is `Q(alpha, beta)` with `0 < alpha < beta < 1`, read off
//! over one of its two closing sides; the other closing side gives the flipped
//! parametrization. Trapezoids are `T(gamma)` (ratio of the parallel sides) and
//! all parallelograms form the single class `P`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::geometry::{cross, is_strictly_convex, line_param, parallel_factor, Point};
use crate::ratio::{Ratio, DEFAULT_FLOAT_TOL};

/// Relative tolerance for side parallelism on approximate coordinates.
pub const PARALLEL_REL_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum AffineClass {
    Q { alpha: Ratio, beta: Ratio },
    T { gamma: Ratio },
    P,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClassError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("flip is defined only for non-trapezoids, got {0}")]
    FlipUndefined(String),
    #[error("cannot parse class {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClassifyError {
    #[error("expected 4 points, got {0}")]
    WrongVertexCount(usize),
    #[error("points are not a strictly convex quadrangle in the given cyclic order")]
    NonConvex,
    #[error(
        "ambiguous trapezoid: sides {0} and {1} are parallel within tolerance but not exactly"
    )]
    AmbiguousTrapezoid(usize, usize),
    #[error("no labeling with two adjacent closing sides was found")]
    NoClosingLabeling,
}

impl AffineClass {
    pub fn q(alpha: Ratio, beta: Ratio) -> Result<Self, ClassError> {
        let zero = Ratio::zero();
        let one = Ratio::one();
        if !(zero < alpha && alpha < beta && beta < one) {
            return Err(ClassError::InvalidParameters(format!(
                "Q needs 0 < alpha < beta < 1, got alpha={alpha}, beta={beta}"
            )));
        }
        Ok(AffineClass::Q { alpha, beta })
    }

    pub fn t(gamma: Ratio) -> Result<Self, ClassError> {
        if !(Ratio::zero() < gamma && gamma < Ratio::one()) {
            return Err(ClassError::InvalidParameters(format!(
                "T needs 0 < gamma < 1, got gamma={gamma}"
            )));
        }
        Ok(AffineClass::T { gamma })
    }

    /// Shorthand for exact `Q(a/b, c/d)`; panics on invalid parameters.
    pub fn q_frac(an: i64, ad: i64, bn: i64, bd: i64) -> Self {
        AffineClass::q(Ratio::frac(an, ad), Ratio::frac(bn, bd)).expect("valid Q parameters")
    }

    pub fn t_frac(n: i64, d: i64) -> Self {
        AffineClass::t(Ratio::frac(n, d)).expect("valid T parameter")
    }

    pub fn is_q(&self) -> bool {
        matches!(self, AffineClass::Q { .. })
    }

    pub fn is_exact(&self) -> bool {
        match self {
            AffineClass::Q { alpha, beta } => alpha.is_exact() && beta.is_exact(),
            AffineClass::T { gamma } => gamma.is_exact(),
            AffineClass::P => true,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            AffineClass::Q { .. } => "Q",
            AffineClass::T { .. } => "T",
            AffineClass::P => "P",
        }
    }

    /// Largest tolerance carried by any parameter.
    pub fn tol(&self) -> f64 {
        match self {
            AffineClass::Q { alpha, beta } => alpha.tol().max(beta.tol()),
            AffineClass::T { gamma } => gamma.tol(),
            AffineClass::P => 0.0,
        }
    }
}

/// The factor `(1 - beta) / ((1 - alpha) beta)` relating the two
/// parametrizations of a non-trapezoid.
pub fn flip_factor(alpha: &Ratio, beta: &Ratio) -> Ratio {
    let one = Ratio::one();
    (&one - beta) / ((&one - alpha) * beta)
}

/// Parameters of the other parametrization of `Q(alpha, beta)`.
pub fn flip_params(alpha: &Ratio, beta: &Ratio) -> (Ratio, Ratio) {
    let f = flip_factor(alpha, beta);
    (&f * alpha, &f * beta)
}

pub fn flip(c: &AffineClass) -> Result<AffineClass, ClassError> {
    match c {
        AffineClass::Q { alpha, beta } => {
            let (a, b) = flip_params(alpha, beta);
            Ok(AffineClass::Q { alpha: a, beta: b })
        }
        other => Err(ClassError::FlipUndefined(other.to_string())),
    }
}

pub fn affine_quotient(c: &AffineClass) -> Ratio {
    match c {
        AffineClass::Q { alpha, beta } => alpha / beta,
        _ => Ratio::one(),
    }
}

/// Affine kites: `Q(alpha, 1/(2 - alpha))` and parallelograms.
pub fn is_affine_kite(c: &AffineClass) -> bool {
    match c {
        AffineClass::Q { alpha, beta } => {
            let expected = Ratio::one() / (Ratio::int(2) - alpha);
            beta.compare(&expected) == Ordering::Equal
        }
        AffineClass::T { .. } => false,
        AffineClass::P => true,
    }
}

/// An affine class with a fixed representative of its flip orbit.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalClass(AffineClass);

impl CanonicalClass {
    pub fn class(&self) -> &AffineClass {
        &self.0
    }

    pub fn into_class(self) -> AffineClass {
        self.0
    }
}

impl fmt::Display for CanonicalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

fn lex_cmp(a: (&Ratio, &Ratio), b: (&Ratio, &Ratio)) -> Ordering {
    a.0.compare(b.0).then_with(|| a.1.compare(b.1))
}

pub fn canonicalize(c: &AffineClass) -> CanonicalClass {
    match c {
        AffineClass::Q { alpha, beta } => {
            let (fa, fb) = flip_params(alpha, beta);
            if lex_cmp((&fa, &fb), (alpha, beta)) == Ordering::Less {
                CanonicalClass(AffineClass::Q {
                    alpha: fa,
                    beta: fb,
                })
            } else {
                CanonicalClass(c.clone())
            }
        }
        other => CanonicalClass(other.clone()),
    }
}

/// Whether two parametrized classes describe the same affine type, with
/// componentwise tolerance `tol` (exact comparison when `tol` is zero).
pub fn same_class(a: &AffineClass, b: &AffineClass, tol: &Ratio) -> bool {
    match (a, b) {
        (AffineClass::Q { alpha, beta }, AffineClass::Q { .. }) => {
            same_params(a, b, tol) || {
                let (fa, fb) = flip_params(alpha, beta);
                same_params(
                    &AffineClass::Q {
                        alpha: fa,
                        beta: fb,
                    },
                    b,
                    tol,
                )
            }
        }
        _ => same_params(a, b, tol),
    }
}

/// Equality of the given parametrizations (no flip), within `tol`.
pub fn same_params(a: &AffineClass, b: &AffineClass, tol: &Ratio) -> bool {
    match (a, b) {
        (
            AffineClass::Q { alpha, beta },
            AffineClass::Q {
                alpha: a2,
                beta: b2,
            },
        ) => alpha.within(a2, tol) && beta.within(b2, tol),
        (AffineClass::T { gamma }, AffineClass::T { gamma: g2 }) => gamma.within(g2, tol),
        (AffineClass::P, AffineClass::P) => true,
        _ => false,
    }
}

/// Result of classifying four points.
#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub class: CanonicalClass,
    /// Indices into the input of the vertices playing roles `a, b, c, d`.
    pub labeling: [usize; 4],
}

/// How near-parallel sides of approximate inputs are treated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NearParallel {
    /// Report [`ClassifyError::AmbiguousTrapezoid`].
    Reject,
    /// Treat sides within the tolerance band as parallel.
    Accept,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Parallel {
    Yes,
    No,
    Ambiguous,
}

fn parallel(u: &Point, v: &Point) -> Parallel {
    let c = cross(u, v);
    match c {
        Ratio::Exact(_) => {
            if c.is_zero() {
                Parallel::Yes
            } else {
                Parallel::No
            }
        }
        Ratio::Approx { value, .. } => {
            if value == 0.0 {
                return Parallel::Yes;
            }
            let nu = u.x.to_f64().hypot(u.y.to_f64());
            let nv = v.x.to_f64().hypot(v.y.to_f64());
            if value.abs() <= PARALLEL_REL_TOL * nu * nv {
                Parallel::Ambiguous
            } else {
                Parallel::No
            }
        }
    }
}

fn dihedral(shift: usize, reflect: bool) -> [usize; 4] {
    let mut out = [0; 4];
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = if reflect {
            (shift + 4 - k) % 4
        } else {
            (shift + k) % 4
        };
    }
    out
}

/// Parameters over side `bc` if `bc` and `cd` are both closing sides of the
/// labeled quadrangle `abcd`.
pub fn closing_params(a: &Point, b: &Point, c: &Point, d: &Point) -> Option<(Ratio, Ratio)> {
    let one = Ratio::one();
    // s = l(ab) ∩ l(dc), beyond b and beyond c
    let t = line_param(a, b, d, c)?;
    let u = line_param(d, c, a, b)?;
    // l(ad) ∩ l(bc), beyond d and beyond c
    let w = line_param(a, d, b, c)?;
    let z = line_param(b, c, a, d)?;
    if !(t > one && u > one && w > one && z > one) {
        return None;
    }
    let alpha = (&t - &one) / &t;
    let beta = (&u - &one) / &u;
    if !(Ratio::zero() < alpha && alpha < beta && beta < one) {
        return None;
    }
    Some((alpha, beta))
}

pub fn classify_quadrangle(points: &[Point]) -> Result<Classification, ClassifyError> {
    classify_quadrangle_with(points, NearParallel::Reject)
}

pub fn classify_quadrangle_with(
    points: &[Point],
    near_parallel: NearParallel,
) -> Result<Classification, ClassifyError> {
    if points.len() != 4 {
        return Err(ClassifyError::WrongVertexCount(points.len()));
    }
    if !is_strictly_convex(points) {
        return Err(ClassifyError::NonConvex);
    }
    let side = |i: usize| points[(i + 1) % 4].sub(&points[i]);
    let resolve = |p: Parallel, i: usize, j: usize| match (p, near_parallel) {
        (Parallel::Yes, _) | (Parallel::Ambiguous, NearParallel::Accept) => Ok(true),
        (Parallel::No, _) => Ok(false),
        (Parallel::Ambiguous, NearParallel::Reject) => Err(ClassifyError::AmbiguousTrapezoid(i, j)),
    };
    let par02 = resolve(parallel(&side(0), &side(2)), 0, 2)?;
    let par13 = resolve(parallel(&side(1), &side(3)), 1, 3)?;

    if par02 && par13 {
        return Ok(Classification {
            class: CanonicalClass(AffineClass::P),
            labeling: [0, 1, 2, 3],
        });
    }
    if par02 || par13 {
        // parallel sides p[o]p[o+1] and p[o+2]p[o+3]
        let o = if par02 { 0 } else { 1 };
        let k = parallel_factor(&side(o), &side(o + 2)).abs();
        let one = Ratio::one();
        let (gamma, labeling) = if k < one {
            // short side is p[o+2]p[o+3]
            (k, [(o + 1) % 4, (o + 2) % 4, (o + 3) % 4, o])
        } else {
            (one / k, [(o + 3) % 4, o, (o + 1) % 4, (o + 2) % 4])
        };
        return Ok(Classification {
            class: CanonicalClass(AffineClass::T { gamma }),
            labeling,
        });
    }

    let mut best: Option<(Ratio, Ratio, [usize; 4])> = None;
    for shift in 0..4 {
        for reflect in [false, true] {
            let lab = dihedral(shift, reflect);
            let Some((alpha, beta)) = closing_params(
                &points[lab[0]],
                &points[lab[1]],
                &points[lab[2]],
                &points[lab[3]],
            ) else {
                continue;
            };
            let better = match &best {
                None => true,
                Some((ba, bb, _)) => lex_cmp((&alpha, &beta), (ba, bb)) == Ordering::Less,
            };
            if better {
                best = Some((alpha, beta, lab));
            }
        }
    }
    let (alpha, beta, labeling) = best.ok_or(ClassifyError::NoClosingLabeling)?;
    Ok(Classification {
        class: CanonicalClass(AffineClass::Q { alpha, beta }),
        labeling,
    })
}

impl fmt::Display for AffineClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AffineClass::Q { alpha, beta } => write!(f, "Q:{alpha},{beta}"),
            AffineClass::T { gamma } => write!(f, "T:{gamma}"),
            AffineClass::P => write!(f, "P"),
        }
    }
}

impl AffineClass {
    /// Parses `Q:a,b`, `T:g` or `P`; decimal parameters carry tolerance `tol`.
    pub fn parse_with_tol(s: &str, tol: f64) -> Result<Self, ClassError> {
        let err = |reason: String| ClassError::Parse {
            input: s.to_string(),
            reason,
        };
        let t = s.trim();
        if t == "P" {
            return Ok(AffineClass::P);
        }
        let (kind, rest) = t
            .split_once(':')
            .ok_or_else(|| err("expected KIND:params".into()))?;
        let nums: Vec<Ratio> = rest
            .split(',')
            .map(|p| Ratio::parse_with_tol(p, tol).map_err(|e| err(e.to_string())))
            .collect::<Result<_, _>>()?;
        match (kind.trim(), nums.as_slice()) {
            ("Q", [a, b]) => AffineClass::q(a.clone(), b.clone()),
            ("T", [g]) => AffineClass::t(g.clone()),
            ("P", []) => Ok(AffineClass::P),
            _ => Err(err(format!(
                "kind {kind:?} with {} parameters is not Q:a,b | T:g | P",
                nums.len()
            ))),
        }
    }
}

impl FromStr for AffineClass {
    type Err = ClassError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AffineClass::parse_with_tol(s, DEFAULT_FLOAT_TOL)
    }
}

/// Parses `"x,y;x,y;x,y;x,y"`.
pub fn parse_points(s: &str, tol: f64) -> Result<Vec<Point>, String> {
    s.split(';')
        .map(|pair| {
            let (x, y) = pair
                .split_once(',')
                .ok_or_else(|| format!("point {pair:?} is not x,y"))?;
            let x = Ratio::parse_with_tol(x, tol).map_err(|e| e.to_string())?;
            let y = Ratio::parse_with_tol(y, tol).map_err(|e| e.to_string())?;
            Ok(Point::new(x, y))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(i64, i64, i64, i64)]) -> Vec<Point> {
        v.iter()
            .map(|&(a, b, c, d)| Point::frac(a, b, c, d))
            .collect()
    }

    #[test]
    fn flip_examples() {
        let q = AffineClass::q_frac(1, 5, 1, 2);
        let f = flip(&q).unwrap();
        assert_eq!(f, AffineClass::q_frac(1, 4, 5, 8));
        assert_eq!(flip(&f).unwrap(), q);
        let kite = AffineClass::q_frac(1, 2, 2, 3);
        assert_eq!(flip(&kite).unwrap(), kite);
        assert!(flip(&AffineClass::P).is_err());
        assert!(flip(&AffineClass::t_frac(1, 2)).is_err());
    }

    #[test]
    fn quotient_examples() {
        assert_eq!(
            affine_quotient(&AffineClass::q_frac(1, 5, 1, 2)),
            Ratio::frac(2, 5)
        );
        assert_eq!(affine_quotient(&AffineClass::t_frac(3, 10)), Ratio::one());
        assert_eq!(affine_quotient(&AffineClass::P), Ratio::one());
    }

    #[test]
    fn kite_examples() {
        assert!(is_affine_kite(&AffineClass::q_frac(1, 2, 2, 3)));
        assert!(!is_affine_kite(&AffineClass::q_frac(1, 5, 1, 2)));
        assert!(is_affine_kite(&AffineClass::P));
        assert!(!is_affine_kite(&AffineClass::t_frac(1, 2)));
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(
            canonicalize(&AffineClass::q_frac(1, 4, 5, 8)).class(),
            &AffineClass::q_frac(1, 5, 1, 2)
        );
        assert_eq!(
            canonicalize(&AffineClass::q_frac(1, 2, 2, 3)).class(),
            &AffineClass::q_frac(1, 2, 2, 3)
        );
        assert_eq!(
            canonicalize(&AffineClass::t_frac(3, 10)).class(),
            &AffineClass::t_frac(3, 10)
        );
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(AffineClass::q(Ratio::frac(1, 2), Ratio::frac(1, 2)).is_err());
        assert!(AffineClass::q(Ratio::zero(), Ratio::frac(1, 2)).is_err());
        assert!(AffineClass::t(Ratio::one()).is_err());
    }

    #[test]
    fn classify_examples() {
        let q = classify_quadrangle(&pts(&[
            (0, 1, 0, 1),
            (4, 5, 0, 1),
            (1, 2, 3, 8),
            (0, 1, 3, 4),
        ]))
        .unwrap();
        assert_eq!(q.class.class(), &AffineClass::q_frac(1, 5, 1, 2));
        let sq = classify_quadrangle(&pts(&[
            (0, 1, 0, 1),
            (1, 1, 0, 1),
            (1, 1, 1, 1),
            (0, 1, 1, 1),
        ]))
        .unwrap();
        assert_eq!(sq.class.class(), &AffineClass::P);
        let t = classify_quadrangle(&pts(&[
            (0, 1, 0, 1),
            (1, 1, 0, 1),
            (3, 4, 1, 1),
            (1, 4, 1, 1),
        ]))
        .unwrap();
        assert_eq!(t.class.class(), &AffineClass::t_frac(1, 2));
    }

    #[test]
    fn classify_labeling_is_closing() {
        let p = pts(&[(0, 1, 0, 1), (4, 5, 0, 1), (1, 2, 3, 8), (0, 1, 3, 4)]);
        let c = classify_quadrangle(&p).unwrap();
        let l = c.labeling;
        let (a, b) = closing_params(&p[l[0]], &p[l[1]], &p[l[2]], &p[l[3]]).unwrap();
        assert_eq!(AffineClass::Q { alpha: a, beta: b }, *c.class.class());
    }

    #[test]
    fn classify_rejects_bad_input() {
        let bow = pts(&[(0, 1, 0, 1), (1, 1, 1, 1), (1, 1, 0, 1), (0, 1, 1, 1)]);
        assert_eq!(classify_quadrangle(&bow), Err(ClassifyError::NonConvex));
        let tri = pts(&[(0, 1, 0, 1), (1, 1, 0, 1), (0, 1, 1, 1)]);
        assert_eq!(
            classify_quadrangle(&tri),
            Err(ClassifyError::WrongVertexCount(3))
        );
        let collinear = pts(&[(0, 1, 0, 1), (1, 1, 0, 1), (2, 1, 0, 1), (0, 1, 1, 1)]);
        assert_eq!(
            classify_quadrangle(&collinear),
            Err(ClassifyError::NonConvex)
        );
    }

    #[test]
    fn near_parallel_float_is_ambiguous() {
        let p = vec![
            Point::new(Ratio::approx(0.0, 1e-9), Ratio::approx(0.0, 1e-9)),
            Point::new(Ratio::approx(1.0, 1e-9), Ratio::approx(0.0, 1e-9)),
            Point::new(Ratio::approx(0.75, 1e-9), Ratio::approx(1.0 + 1e-12, 1e-9)),
            Point::new(Ratio::approx(0.25, 1e-9), Ratio::approx(1.0, 1e-9)),
        ];
        assert!(matches!(
            classify_quadrangle(&p),
            Err(ClassifyError::AmbiguousTrapezoid(0, 2))
        ));
        let c = classify_quadrangle_with(&p, NearParallel::Accept).unwrap();
        assert_eq!(c.class.class().kind(), "T");
    }

    #[test]
    fn parse_classes() {
        assert_eq!(
            "Q:1/5,1/2".parse::<AffineClass>().unwrap(),
            AffineClass::q_frac(1, 5, 1, 2)
        );
        assert_eq!(
            "T:1/10".parse::<AffineClass>().unwrap(),
            AffineClass::t_frac(1, 10)
        );
        assert_eq!("P".parse::<AffineClass>().unwrap(), AffineClass::P);
        assert!("Q:1/2".parse::<AffineClass>().is_err());
        assert!("Q:1/2,1/3".parse::<AffineClass>().is_err());
        assert!("X:1".parse::<AffineClass>().is_err());
        let f: AffineClass = "Q:0.5,0.8284271247".parse().unwrap();
        assert!(!f.is_exact());
    }
}
