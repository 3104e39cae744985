//! Glueing two quadrangles along a common side.
//!
//! [`combine`] evaluates one pair of class terms; [`compose_sets`] lifts it to
//! set-valued operands. Sets are unions of three member shapes:
//!
//! * `Q { ratio, beta }`: the classes `Q(ratio * u, u)` for `u` in `beta`,
//! * `T(J)`: the trapezoids `T(g)` for `g` in `J`,
//! * `P`.
//!
//! A single class is a member whose interval is a closed point. Every table
//! formula is monotone in each parameter, so images of intervals are intervals
//! and the representation is closed under composition.

use std::cmp::Ordering;
use std::fmt;

use crate::affine_types::{flip_params, AffineClass};
use crate::ratio::Ratio;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    Dot,
    Colon,
}

impl Op {
    pub fn symbol(self) -> &'static str {
        match self {
            Op::Dot => "·",
            Op::Colon => ":",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Op::Dot => "dot",
            Op::Colon => "colon",
        }
    }

    pub fn parse(s: &str) -> Option<Op> {
        match s {
            "dot" | "." | "·" => Some(Op::Dot),
            "colon" | ":" => Some(Op::Colon),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CompositionError {
    #[error("no glueing ({row}): {detail}")]
    NoGlueing { row: &'static str, detail: String },
}

fn no_glueing(row: &'static str, detail: impl Into<String>) -> CompositionError {
    CompositionError::NoGlueing {
        row,
        detail: detail.into(),
    }
}

/// A bounded interval of positive reals.
#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    pub lo: Ratio,
    pub hi: Ratio,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn point(x: Ratio) -> Self {
        Interval {
            lo: x.clone(),
            hi: x,
            lo_closed: true,
            hi_closed: true,
        }
    }

    pub fn new(lo: Ratio, hi: Ratio, lo_closed: bool, hi_closed: bool) -> Self {
        Interval {
            lo,
            hi,
            lo_closed,
            hi_closed,
        }
    }

    /// `(lo, 1)` or `[lo, 1)`.
    pub fn up_to_one(lo: Ratio, lo_closed: bool) -> Self {
        Interval::new(lo, Ratio::one(), lo_closed, false)
    }

    pub fn is_point(&self) -> bool {
        self.lo_closed && self.hi_closed && self.lo.identical(&self.hi)
    }

    pub fn as_point(&self) -> Option<&Ratio> {
        self.is_point().then_some(&self.lo)
    }

    /// Elementwise product of two positive intervals.
    pub fn mul(&self, other: &Interval) -> Interval {
        Interval {
            lo: &self.lo * &other.lo,
            hi: &self.hi * &other.hi,
            lo_closed: self.lo_closed && other.lo_closed,
            hi_closed: self.hi_closed && other.hi_closed,
        }
    }

    pub fn scale(&self, k: &Ratio) -> Interval {
        Interval {
            lo: &self.lo * k,
            hi: &self.hi * k,
            lo_closed: self.lo_closed,
            hi_closed: self.hi_closed,
        }
    }

    /// `{x / v : v in self}`.
    pub fn divide_into(&self, x: &Ratio) -> Interval {
        Interval {
            lo: x / &self.hi,
            hi: x / &self.lo,
            lo_closed: self.hi_closed,
            hi_closed: self.lo_closed,
        }
    }

    /// Image under the decreasing map `u -> (1 - u) / (1 - ratio u)`, which
    /// sends the larger parameter of `Q(ratio u, u)` to that of its flip.
    pub fn flip_q(&self, ratio: &Ratio) -> Interval {
        let g = |u: &Ratio| (Ratio::one() - u) / (Ratio::one() - ratio * u);
        Interval {
            lo: g(&self.hi),
            hi: g(&self.lo),
            lo_closed: self.hi_closed,
            hi_closed: self.lo_closed,
        }
    }

    fn lenient(&self, x: &Ratio, tol: &Ratio) -> bool {
        !(tol.is_exact()
            && tol.is_zero()
            && x.is_exact()
            && self.lo.is_exact()
            && self.hi.is_exact())
    }

    /// Membership; with a positive tolerance or approximate data the interval
    /// is closed and widened by `tol`.
    pub fn contains(&self, x: &Ratio, tol: &Ratio) -> bool {
        if self.lenient(x, tol) {
            let t = tol
                .to_f64()
                .max(x.tol())
                .max(self.lo.tol())
                .max(self.hi.tol());
            let v = x.to_f64();
            return self.lo.to_f64() - t <= v && v <= self.hi.to_f64() + t;
        }
        let lo_ok = match x.compare(&self.lo) {
            Ordering::Greater => true,
            Ordering::Equal => self.lo_closed,
            Ordering::Less => false,
        };
        let hi_ok = match x.compare(&self.hi) {
            Ordering::Less => true,
            Ordering::Equal => self.hi_closed,
            Ordering::Greater => false,
        };
        lo_ok && hi_ok
    }

    pub fn is_empty(&self) -> bool {
        match self.lo.compare(&self.hi) {
            Ordering::Less => false,
            Ordering::Equal => !(self.lo_closed && self.hi_closed),
            Ordering::Greater => true,
        }
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let (lo, lo_closed) = match self.lo.compare(&other.lo) {
            Ordering::Greater => (self.lo.clone(), self.lo_closed),
            Ordering::Less => (other.lo.clone(), other.lo_closed),
            Ordering::Equal => (self.lo.clone(), self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.compare(&other.hi) {
            Ordering::Less => (self.hi.clone(), self.hi_closed),
            Ordering::Greater => (other.hi.clone(), other.hi_closed),
            Ordering::Equal => (self.hi.clone(), self.hi_closed && other.hi_closed),
        };
        let out = Interval::new(lo, hi, lo_closed, hi_closed);
        (!out.is_empty()).then_some(out)
    }

    /// A representative element: the point itself, or the midpoint.
    pub fn pick(&self) -> Ratio {
        if self.lo.compare(&self.hi) == Ordering::Equal {
            self.lo.clone()
        } else {
            (&self.lo + &self.hi) / Ratio::int(2)
        }
    }

    /// A representative element strictly below `x` when one exists.
    pub fn pick_below(&self, x: &Ratio) -> Option<Ratio> {
        let below = Interval::new(self.lo.clone(), x.clone(), self.lo_closed, false);
        self.intersect(&below).map(|j| j.pick())
    }

    fn key(&self) -> String {
        format!(
            "{}{},{}{}",
            if self.lo_closed { '[' } else { '(' },
            ratio_key(&self.lo),
            ratio_key(&self.hi),
            if self.hi_closed { ']' } else { ')' }
        )
    }

    /// Merges overlapping or touching intervals (sorted input not required).
    fn merge_all(mut v: Vec<Interval>) -> Vec<Interval> {
        v.sort_by(|a, b| {
            a.lo.total_cmp(&b.lo)
                .then_with(|| b.lo_closed.cmp(&a.lo_closed))
        });
        let mut out: Vec<Interval> = Vec::with_capacity(v.len());
        for iv in v {
            if let Some(last) = out.last_mut() {
                let touches = match iv.lo.compare(&last.hi) {
                    Ordering::Less => true,
                    Ordering::Equal => iv.lo_closed || last.hi_closed,
                    Ordering::Greater => false,
                };
                let both_exact = iv.lo.is_exact() && last.hi.is_exact();
                if touches && (both_exact || iv.lo.compare(&last.hi) == Ordering::Less) {
                    match iv.hi.compare(&last.hi) {
                        Ordering::Greater => {
                            last.hi = iv.hi;
                            last.hi_closed = iv.hi_closed;
                        }
                        Ordering::Equal => last.hi_closed |= iv.hi_closed,
                        Ordering::Less => {}
                    }
                    continue;
                }
            }
            out.push(iv);
        }
        out
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = self.as_point() {
            return write!(f, "{p}");
        }
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

pub(crate) fn ratio_key(r: &Ratio) -> String {
    match r {
        Ratio::Exact(q) => q.to_string(),
        Ratio::Approx { value, tol } => format!("{value:?}~{tol:?}"),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Member {
    /// `{Q(ratio * u, u) : u in beta}`.
    Q {
        ratio: Ratio,
        beta: Interval,
    },
    T(Interval),
    P,
}

impl Member {
    pub fn from_class(c: &AffineClass) -> Member {
        match c {
            AffineClass::Q { alpha, beta } => Member::Q {
                ratio: alpha / beta,
                beta: Interval::point(beta.clone()),
            },
            AffineClass::T { gamma } => Member::T(Interval::point(gamma.clone())),
            AffineClass::P => Member::P,
        }
    }

    /// The single class of a point member.
    pub fn as_class(&self) -> Option<AffineClass> {
        match self {
            Member::Q { ratio, beta } => beta.as_point().map(|b| AffineClass::Q {
                alpha: ratio * b,
                beta: b.clone(),
            }),
            Member::T(j) => j.as_point().map(|g| AffineClass::T { gamma: g.clone() }),
            Member::P => Some(AffineClass::P),
        }
    }

    /// Member class at parameter `u` (ignored for `P`).
    pub fn at(&self, u: &Ratio) -> AffineClass {
        match self {
            Member::Q { ratio, .. } => AffineClass::Q {
                alpha: ratio * u,
                beta: u.clone(),
            },
            Member::T(_) => AffineClass::T { gamma: u.clone() },
            Member::P => AffineClass::P,
        }
    }

    /// Parameter interval (`None` for `P`).
    pub fn interval(&self) -> Option<&Interval> {
        match self {
            Member::Q { beta, .. } => Some(beta),
            Member::T(j) => Some(j),
            Member::P => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Member::Q { .. } => "Q",
            Member::T(_) => "T",
            Member::P => "P",
        }
    }

    /// Same members with the Q parametrization flipped; T and P unchanged.
    pub fn flipped(&self) -> Member {
        match self {
            Member::Q { ratio, beta } => Member::Q {
                ratio: ratio.clone(),
                beta: beta.flip_q(ratio),
            },
            other => other.clone(),
        }
    }

    /// Whether `c` (in its given parametrization) belongs to the member.
    pub fn contains(&self, c: &AffineClass, tol: &Ratio) -> bool {
        match (self, c) {
            (Member::Q { ratio, beta: j }, AffineClass::Q { alpha, beta }) => {
                let q = alpha / beta;
                q.within(ratio, tol) && j.contains(beta, tol)
            }
            (Member::T(j), AffineClass::T { gamma }) => j.contains(gamma, tol),
            (Member::P, AffineClass::P) => true,
            _ => false,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Member::Q { .. } => 0,
            Member::T(_) => 1,
            Member::P => 2,
        }
    }

    fn key(&self) -> String {
        match self {
            Member::Q { ratio, beta } => format!("Q{};{}", ratio_key(ratio), beta.key()),
            Member::T(j) => format!("T{}", j.key()),
            Member::P => "P".into(),
        }
    }
}

impl fmt::Display for Member {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(c) = self.as_class() {
            return c.fmt(f);
        }
        match self {
            Member::Q { ratio, beta } => write!(f, "Q({ratio}·u, u), u ∈ {beta}"),
            Member::T(j) => write!(f, "T(g), g ∈ {j}"),
            Member::P => write!(f, "P"),
        }
    }
}

/// A finite union of members; may be empty.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ClassSet {
    members: Vec<Member>,
}

impl ClassSet {
    pub fn empty() -> Self {
        ClassSet::default()
    }

    pub fn single(c: &AffineClass) -> Self {
        ClassSet {
            members: vec![Member::from_class(c)],
        }
    }

    pub fn from_members(members: Vec<Member>) -> Self {
        let mut s = ClassSet { members };
        s.normalize();
        s
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn has_p(&self) -> bool {
        self.members.iter().any(|m| matches!(m, Member::P))
    }

    /// Q classes that are single points.
    pub fn q_points(&self) -> Vec<AffineClass> {
        self.members
            .iter()
            .filter(|m| matches!(m, Member::Q { .. }))
            .filter_map(Member::as_class)
            .collect()
    }

    /// One-parameter Q families `(ratio, beta interval)`.
    pub fn q_curves(&self) -> Vec<(&Ratio, &Interval)> {
        self.members
            .iter()
            .filter_map(|m| match m {
                Member::Q { ratio, beta } if !beta.is_point() => Some((ratio, beta)),
                _ => None,
            })
            .collect()
    }

    pub fn t_points(&self) -> Vec<&Ratio> {
        self.members
            .iter()
            .filter_map(|m| match m {
                Member::T(j) => j.as_point(),
                _ => None,
            })
            .collect()
    }

    pub fn t_intervals(&self) -> Vec<&Interval> {
        self.members
            .iter()
            .filter_map(|m| match m {
                Member::T(j) if !j.is_point() => Some(j),
                _ => None,
            })
            .collect()
    }

    pub fn member(&self, c: &AffineClass, tol: &Ratio) -> bool {
        self.members.iter().any(|m| m.contains(c, tol))
    }

    /// Members with every Q parametrization flipped.
    pub fn flipped(&self) -> ClassSet {
        ClassSet::from_members(self.members.iter().map(Member::flipped).collect())
    }

    /// Canonical string used to deduplicate equal sets.
    pub fn key(&self) -> String {
        let keys: Vec<String> = self.members.iter().map(Member::key).collect();
        keys.join("|")
    }

    fn normalize(&mut self) {
        let members = std::mem::take(&mut self.members);
        let mut qs: Vec<(Ratio, Vec<Interval>)> = Vec::new();
        let mut ts: Vec<Interval> = Vec::new();
        let mut p = false;
        for m in members {
            match m {
                Member::Q { ratio, beta } => {
                    match qs.iter_mut().find(|(r, _)| r.identical(&ratio)) {
                        Some((_, v)) => v.push(beta),
                        None => qs.push((ratio, vec![beta])),
                    }
                }
                Member::T(j) => ts.push(j),
                Member::P => p = true,
            }
        }
        qs.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (ratio, ivs) in qs {
            for beta in Interval::merge_all(ivs) {
                self.members.push(Member::Q {
                    ratio: ratio.clone(),
                    beta,
                });
            }
        }
        for j in Interval::merge_all(ts) {
            self.members.push(Member::T(j));
        }
        if p {
            self.members.push(Member::P);
        }
    }
}

impl fmt::Display for ClassSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.members.is_empty() {
            return write!(f, "∅");
        }
        let parts: Vec<String> = self.members.iter().map(|m| m.to_string()).collect();
        write!(f, "{{{}}}", parts.join(" ∪ "))
    }
}

/// A class together with the flip mark on its edge.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassTerm {
    pub class: AffineClass,
    pub flipped: bool,
}

impl ClassTerm {
    /// Flips on Q terms are applied to the parameters; on T and P they stay a
    /// flag meaning "glued along a constant side".
    pub fn new(class: AffineClass, flipped: bool) -> Self {
        match (&class, flipped) {
            (AffineClass::Q { alpha, beta }, true) => {
                let (a, b) = flip_params(alpha, beta);
                ClassTerm {
                    class: AffineClass::Q { alpha: a, beta: b },
                    flipped: false,
                }
            }
            _ => ClassTerm { class, flipped },
        }
    }

    pub fn plain(class: AffineClass) -> Self {
        ClassTerm::new(class, false)
    }
}

pub fn combine(left: &ClassTerm, right: &ClassTerm, op: Op) -> Result<ClassSet, CompositionError> {
    let a = Member::from_class(&left.class);
    let b = Member::from_class(&right.class);
    combine_members(&a, left.flipped, &b, right.flipped, op).map(ClassSet::from_members)
}

/// Table lookup on members whose Q flips have already been applied; `fa` and
/// `fb` are the constant-side flags of T and P operands.
pub fn combine_members(
    a: &Member,
    fa: bool,
    b: &Member,
    fb: bool,
    op: Op,
) -> Result<Vec<Member>, CompositionError> {
    if a.rank() > b.rank() {
        return combine_members(b, fb, a, fa, op);
    }
    match (a, b) {
        (
            Member::Q {
                ratio: r1,
                beta: j1,
            },
            Member::Q {
                ratio: r2,
                beta: j2,
            },
        ) => {
            let prod = j1.mul(j2);
            Ok(vec![match op {
                Op::Dot => Member::Q {
                    ratio: r1 * r2,
                    beta: prod,
                },
                Op::Colon => match r1.compare(r2) {
                    Ordering::Less => Member::Q {
                        ratio: r1 / r2,
                        beta: prod.scale(r2),
                    },
                    Ordering::Greater => Member::Q {
                        ratio: r2 / r1,
                        beta: prod.scale(r1),
                    },
                    Ordering::Equal => Member::T(prod.scale(r1)),
                },
            }])
        }
        (Member::Q { ratio, beta }, Member::T(j)) => {
            if op == Op::Colon {
                return Err(no_glueing("ii", "colon is undefined for Q with T"));
            }
            if fb {
                return Err(no_glueing(
                    "ii",
                    "a trapezoid can only be glued to Q without flip",
                ));
            }
            Ok(vec![Member::Q {
                ratio: ratio.clone(),
                beta: beta.mul(j),
            }])
        }
        (Member::Q { .. }, Member::P) => Err(no_glueing("iii", "Q cannot be combined with P")),
        (Member::T(j1), Member::T(j2)) => {
            if op == Op::Colon {
                return Err(no_glueing("iv", "colon is undefined for two trapezoids"));
            }
            match (fa, fb) {
                (false, false) => Ok(vec![Member::T(j1.mul(j2))]),
                (true, true) => {
                    let (m, inf_closed) = match j1.lo.compare(&j2.lo) {
                        Ordering::Less => (j1.lo.clone(), j1.lo_closed),
                        Ordering::Greater => (j2.lo.clone(), j2.lo_closed),
                        Ordering::Equal => (j1.lo.clone(), j1.lo_closed || j2.lo_closed),
                    };
                    // The lower end is attained only by two equal parameters.
                    let closed = inf_closed
                        && j1.contains(&m, &Ratio::zero())
                        && j2.contains(&m, &Ratio::zero());
                    Ok(vec![Member::T(Interval::up_to_one(m, closed)), Member::P])
                }
                _ => Err(no_glueing(
                    "iv",
                    "trapezoids are glued either both along constant sides or neither",
                )),
            }
        }
        (Member::T(j), Member::P) => {
            if op == Op::Colon || !fa || fb {
                return Err(no_glueing(
                    "v",
                    "only T^F · P is defined for a trapezoid with P",
                ));
            }
            Ok(vec![Member::T(Interval::up_to_one(j.lo.clone(), false))])
        }
        (Member::P, Member::P) => {
            if op == Op::Colon || fa || fb {
                return Err(no_glueing(
                    "vi",
                    "the only combination of P with P is P · P",
                ));
            }
            Ok(vec![Member::P])
        }
        _ => unreachable!("operands are ordered by kind"),
    }
}

/// Pointwise union of [`combine_members`] over two flagged sets. Undefined
/// pairs are skipped; the result may be empty.
pub fn compose_sets(left: &ClassSet, lf: bool, right: &ClassSet, rf: bool, op: Op) -> ClassSet {
    let l = if lf { left.flipped() } else { left.clone() };
    let r = if rf { right.flipped() } else { right.clone() };
    compose_prepared(&l, lf, &r, rf, op)
}

/// As [`compose_sets`] with Q flips already applied to the operands.
pub(crate) fn compose_prepared(l: &ClassSet, lf: bool, r: &ClassSet, rf: bool, op: Op) -> ClassSet {
    let mut out = Vec::new();
    for a in l.members() {
        for b in r.members() {
            if let Ok(ms) = combine_members(a, lf, b, rf, op) {
                out.extend(ms);
            }
        }
    }
    ClassSet::from_members(out)
}
