//! Planar primitives over [`Ratio`]: points, orientation, areas, affine maps
//! and convex clipping.

use std::fmt;

use crate::ratio::Ratio;

#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    pub x: Ratio,
    pub y: Ratio,
}

pub type Quad = [Point; 4];

impl Point {
    pub fn new(x: Ratio, y: Ratio) -> Self {
        Point { x, y }
    }

    pub fn frac(xn: i64, xd: i64, yn: i64, yd: i64) -> Self {
        Point::new(Ratio::frac(xn, xd), Ratio::frac(yn, yd))
    }

    pub fn int(x: i64, y: i64) -> Self {
        Point::new(Ratio::int(x), Ratio::int(y))
    }

    pub fn sub(&self, o: &Point) -> Point {
        Point::new(&self.x - &o.x, &self.y - &o.y)
    }

    pub fn add(&self, o: &Point) -> Point {
        Point::new(&self.x + &o.x, &self.y + &o.y)
    }

    pub fn scale(&self, k: &Ratio) -> Point {
        Point::new(&self.x * k, &self.y * k)
    }

    /// `self + t * (to - self)`
    pub fn lerp(&self, to: &Point, t: &Ratio) -> Point {
        self.add(&to.sub(self).scale(t))
    }

    pub fn is_exact(&self) -> bool {
        self.x.is_exact() && self.y.is_exact()
    }

    pub fn identical(&self, o: &Point) -> bool {
        self.x.identical(&o.x) && self.y.identical(&o.y)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

pub fn cross(u: &Point, v: &Point) -> Ratio {
    &u.x * &v.y - &u.y * &v.x
}

/// Twice the signed area of triangle `abc` (positive for counterclockwise).
pub fn orient(a: &Point, b: &Point, c: &Point) -> Ratio {
    cross(&b.sub(a), &c.sub(a))
}

pub fn signed_area(poly: &[Point]) -> Ratio {
    let n = poly.len();
    let mut acc = Ratio::zero();
    for i in 0..n {
        acc = acc + cross(&poly[i], &poly[(i + 1) % n]);
    }
    acc / Ratio::int(2)
}

pub fn area(poly: &[Point]) -> Ratio {
    signed_area(poly).abs()
}

/// Scalar `k` with `v = k * u` when `u` and `v` are parallel (`u` nonzero).
pub fn parallel_factor(u: &Point, v: &Point) -> Ratio {
    if !u.x.is_zero() {
        &v.x / &u.x
    } else {
        &v.y / &u.y
    }
}

/// Intersection of the lines through `p0,p1` and `q0,q1`, as the parameter
/// `t` with `p0 + t (p1 - p0)`. `None` for parallel lines.
pub fn line_param(p0: &Point, p1: &Point, q0: &Point, q1: &Point) -> Option<Ratio> {
    let d = p1.sub(p0);
    let e = q1.sub(q0);
    let den = cross(&d, &e);
    if den.is_zero() {
        return None;
    }
    Some(cross(&q0.sub(p0), &e) / den)
}

/// Strict convexity of a closed polygon in the given order (either
/// orientation): every other vertex lies strictly on the same side of each edge.
pub fn is_strictly_convex(poly: &[Point]) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    let sign = orient(&poly[0], &poly[1], &poly[2]).signum();
    if sign == 0 {
        return false;
    }
    for i in 0..n {
        let (a, b) = (&poly[i], &poly[(i + 1) % n]);
        for (j, p) in poly.iter().enumerate() {
            if j == i || j == (i + 1) % n {
                continue;
            }
            if orient(a, b, p).signum() != sign {
                return false;
            }
        }
    }
    true
}

/// Counterclockwise copy of a polygon.
pub fn ccw(poly: &[Point]) -> Vec<Point> {
    let mut v = poly.to_vec();
    if signed_area(&v).is_negative() {
        v.reverse();
    }
    v
}

/// `x -> m x + t`, with `m` row-major.
#[derive(Clone, Debug)]
pub struct Affine {
    pub m: [[Ratio; 2]; 2],
    pub t: [Ratio; 2],
}

impl Affine {
    pub fn identity() -> Self {
        Affine {
            m: [[Ratio::one(), Ratio::zero()], [Ratio::zero(), Ratio::one()]],
            t: [Ratio::zero(), Ratio::zero()],
        }
    }

    /// Homothety with the given centre and ratio.
    pub fn homothety(centre: &Point, k: &Ratio) -> Self {
        let one_minus = Ratio::one() - k;
        Affine {
            m: [[k.clone(), Ratio::zero()], [Ratio::zero(), k.clone()]],
            t: [&centre.x * &one_minus, &centre.y * &one_minus],
        }
    }

    /// The unique affine map with `src[i] -> dst[i]`; `None` when `src` is
    /// collinear.
    pub fn from_triangles(src: [&Point; 3], dst: [&Point; 3]) -> Option<Self> {
        let u = src[1].sub(src[0]);
        let v = src[2].sub(src[0]);
        let det = cross(&u, &v);
        if det.is_zero() {
            return None;
        }
        let p = dst[1].sub(dst[0]);
        let q = dst[2].sub(dst[0]);
        // M [u v] = [p q]  =>  M = [p q] [u v]^-1
        let inv = [[&v.y / &det, -(&v.x / &det)], [-(&u.y / &det), &u.x / &det]];
        let m = [
            [
                &p.x * &inv[0][0] + &q.x * &inv[1][0],
                &p.x * &inv[0][1] + &q.x * &inv[1][1],
            ],
            [
                &p.y * &inv[0][0] + &q.y * &inv[1][0],
                &p.y * &inv[0][1] + &q.y * &inv[1][1],
            ],
        ];
        let t = [
            &dst[0].x - (&m[0][0] * &src[0].x + &m[0][1] * &src[0].y),
            &dst[0].y - (&m[1][0] * &src[0].x + &m[1][1] * &src[0].y),
        ];
        Some(Affine { m, t })
    }

    pub fn apply(&self, p: &Point) -> Point {
        Point::new(
            &self.m[0][0] * &p.x + &self.m[0][1] * &p.y + &self.t[0],
            &self.m[1][0] * &p.x + &self.m[1][1] * &p.y + &self.t[1],
        )
    }

    pub fn apply_quad(&self, q: &Quad) -> Quad {
        [
            self.apply(&q[0]),
            self.apply(&q[1]),
            self.apply(&q[2]),
            self.apply(&q[3]),
        ]
    }

    pub fn det(&self) -> Ratio {
        &self.m[0][0] * &self.m[1][1] - &self.m[0][1] * &self.m[1][0]
    }
}

/// Points equal within `tol` in both coordinates (exactly when `tol` is zero
/// and the points are exact).
pub fn points_close(a: &Point, b: &Point, tol: &Ratio) -> bool {
    a.x.within(&b.x, tol) && a.y.within(&b.y, tol)
}

/// Affine map taking quadrangle `src` onto quadrangle `dst`, trying every
/// dihedral correspondence of the vertices.
pub fn affine_between_quads(src: &Quad, dst: &Quad, tol: &Ratio) -> Option<Affine> {
    for shift in 0..4 {
        for reflect in [false, true] {
            let idx = |k: usize| {
                if reflect {
                    (shift + 4 - k) % 4
                } else {
                    (shift + k) % 4
                }
            };
            let Some(map) = Affine::from_triangles(
                [&src[0], &src[1], &src[2]],
                [&dst[idx(0)], &dst[idx(1)], &dst[idx(2)]],
            ) else {
                continue;
            };
            if points_close(&map.apply(&src[3]), &dst[idx(3)], tol) {
                return Some(map);
            }
        }
    }
    None
}

/// Intersection polygon of two convex polygons (Sutherland-Hodgman). Both
/// inputs may have either orientation.
pub fn clip_convex(subject: &[Point], clip: &[Point]) -> Vec<Point> {
    let clip = ccw(clip);
    let mut out = subject.to_vec();
    let n = clip.len();
    for i in 0..n {
        if out.is_empty() {
            break;
        }
        let a = &clip[i];
        let b = &clip[(i + 1) % n];
        let input = std::mem::take(&mut out);
        let m = input.len();
        for j in 0..m {
            let cur = &input[j];
            let prev = &input[(j + m - 1) % m];
            let sc = orient(a, b, cur);
            let sp = orient(a, b, prev);
            let cur_in = !sc.is_negative();
            let prev_in = !sp.is_negative();
            if cur_in {
                if !prev_in {
                    out.push(edge_cut(prev, cur, &sp, &sc));
                }
                out.push(cur.clone());
            } else if prev_in {
                out.push(edge_cut(prev, cur, &sp, &sc));
            }
        }
    }
    out
}

fn edge_cut(p: &Point, q: &Point, sp: &Ratio, sq: &Ratio) -> Point {
    let t = sp / (sp - sq);
    p.lerp(q, &t)
}

/// Area of the intersection of two convex polygons.
pub fn convex_intersection_area(a: &[Point], b: &[Point]) -> Ratio {
    let poly = clip_convex(a, b);
    if poly.len() < 3 {
        Ratio::zero()
    } else {
        area(&poly)
    }
}

/// Drops repeated and collinear vertices from a closed polygon.
pub fn simplify(poly: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = Vec::with_capacity(poly.len());
    for p in poly {
        if pts.last().is_some_and(|l| l == p) {
            continue;
        }
        pts.push(p.clone());
    }
    while pts.len() > 1 && pts.first() == pts.last() {
        pts.pop();
    }
    let mut changed = true;
    while changed && pts.len() >= 3 {
        changed = false;
        let n = pts.len();
        for i in 0..n {
            let prev = &pts[(i + n - 1) % n];
            let next = &pts[(i + 1) % n];
            if orient(prev, &pts[i], next).is_zero() {
                pts.remove(i);
                changed = true;
                break;
            }
        }
    }
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(dx: Ratio) -> Vec<Point> {
        vec![
            Point::new(dx.clone(), Ratio::zero()),
            Point::new(&dx + &Ratio::one(), Ratio::zero()),
            Point::new(&dx + &Ratio::one(), Ratio::one()),
            Point::new(dx, Ratio::one()),
        ]
    }

    #[test]
    fn clipping_areas() {
        let s = square(Ratio::zero());
        assert_eq!(convex_intersection_area(&s, &s), Ratio::one());
        assert_eq!(
            convex_intersection_area(&s, &square(Ratio::int(2))),
            Ratio::zero()
        );
        assert_eq!(
            convex_intersection_area(&s, &square(Ratio::frac(1, 2))),
            Ratio::frac(1, 2)
        );
        // shared edge only
        assert_eq!(
            convex_intersection_area(&s, &square(Ratio::one())),
            Ratio::zero()
        );
    }

    #[test]
    fn affine_from_points() {
        let a = Affine::from_triangles(
            [&Point::int(0, 0), &Point::int(1, 0), &Point::int(0, 1)],
            [&Point::int(2, 3), &Point::int(4, 3), &Point::int(2, 6)],
        )
        .unwrap();
        assert_eq!(a.apply(&Point::int(1, 1)), Point::int(4, 6));
        assert_eq!(a.det(), Ratio::int(6));
    }

    #[test]
    fn convexity() {
        let s = square(Ratio::zero());
        assert!(is_strictly_convex(&s));
        let mut rev = s.clone();
        rev.reverse();
        assert!(is_strictly_convex(&rev));
        let bow = vec![s[0].clone(), s[2].clone(), s[1].clone(), s[3].clone()];
        assert!(!is_strictly_convex(&bow));
        let degenerate = vec![
            Point::int(0, 0),
            Point::int(1, 0),
            Point::int(2, 0),
            Point::int(0, 1),
        ];
        assert!(!is_strictly_convex(&degenerate));
    }

    #[test]
    fn simplify_drops_collinear() {
        let p = vec![
            Point::int(0, 0),
            Point::int(1, 0),
            Point::int(2, 0),
            Point::int(2, 2),
            Point::int(2, 2),
            Point::int(0, 2),
        ];
        assert_eq!(simplify(&p).len(), 4);
    }
}
