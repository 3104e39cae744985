//! Coordinates for composition trees and for the named constructions.
//!
//! A tree is realized in two passes. Pinning walks top-down and picks a
//! concrete class for every subtree so that each node's class lies in the
//! combination of its children. Gluing walks bottom-up: each node places its
//! second child against a side of the first so that the two sides adjacent to
//! the cut continue straight, and keeps the candidate whose outline has the
//! pinned class. The finished root is mapped onto the standard placement.

use std::cmp::Ordering;

use crate::affine_types::{
    canonicalize, classify_quadrangle_with, flip, flip_factor, is_affine_kite, same_class,
    AffineClass, ClassifyError, NearParallel,
};
use crate::composition::{combine_members, ClassTerm, Interval, Member, Op};
use crate::geometry::{
    affine_between_quads, clip_convex, cross, is_strictly_convex, parallel_factor, points_close,
    simplify, Affine, Point, Quad,
};
use crate::ratio::{Ratio, DEFAULT_FLOAT_TOL};
use crate::treesearch::{evaluate, match_leaf, ExtTree};

/// Angle-sum type of a side: the adjacent sides meet beyond it (closing),
/// behind it (opening), or are parallel (constant).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SideType {
    Opening,
    Closing,
    Constant,
}

/// Quadrangle `abcd` with the types of sides `ab, bc, cd, da`.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledQuad {
    pub points: Quad,
    pub sides: [SideType; 4],
    pub class: AffineClass,
}

/// The representative of a parametrized class used as the root of every plan.
///
/// `Q(alpha, beta)` has closing sides `bc` and `cd`; `T(gamma)` has its
/// parallel sides `bc` (short) and `da`; `P` is the unit square.
pub fn standard_placement(c: &AffineClass) -> LabeledQuad {
    use SideType::*;
    let one = Ratio::one();
    let zero = Ratio::zero();
    match c {
        AffineClass::Q { alpha, beta } => {
            let f = flip_factor(alpha, beta);
            let fa = &f * alpha;
            let fb = &f * beta;
            LabeledQuad {
                points: [
                    Point::new(zero.clone(), zero.clone()),
                    Point::new(&one - alpha, zero.clone()),
                    Point::new(&one - beta, &one - &fb),
                    Point::new(zero, &one - &fa),
                ],
                sides: [Opening, Closing, Closing, Opening],
                class: c.clone(),
            }
        }
        AffineClass::T { gamma } => LabeledQuad {
            points: [
                Point::new(zero.clone(), zero.clone()),
                Point::new(&one - gamma, zero.clone()),
                Point::new(&one - gamma, gamma.clone()),
                Point::new(zero, one),
            ],
            sides: [Constant, Closing, Constant, Opening],
            class: c.clone(),
        },
        AffineClass::P => LabeledQuad {
            points: [
                Point::int(0, 0),
                Point::int(1, 0),
                Point::int(1, 1),
                Point::int(0, 1),
            ],
            sides: [Constant; 4],
            class: AffineClass::P,
        },
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RealizeError {
    #[error("the tree does not produce {0}")]
    NotInSet(String),
    #[error("no gluing of the pinned children yields {0}")]
    NoGluing(String),
    #[error("{0}")]
    Refused(String),
    #[error("classification failed: {0}")]
    Classify(#[from] ClassifyError),
    #[error("construction failed: {0}")]
    Construction(String),
}

fn refuse<T>(msg: impl Into<String>) -> Result<T, RealizeError> {
    Err(RealizeError::Refused(msg.into()))
}

/// A cut: the segment, and the quadrangle it splits into two quadrangles.
#[derive(Clone, Debug, PartialEq)]
pub struct Cut {
    pub parent: Quad,
    pub segment: [Point; 2],
}

#[derive(Clone, Debug, PartialEq)]
pub enum Provenance {
    Tree(ExtTree),
    Construction {
        name: String,
        params: Vec<(String, Ratio)>,
    },
}

/// An explicit dissection of `root` into affine copies of one class.
#[derive(Clone, Debug, PartialEq)]
pub struct DissectionPlan {
    pub root: Quad,
    pub root_class: AffineClass,
    pub tiles: Vec<Quad>,
    pub tile_class: AffineClass,
    pub provenance: Provenance,
    /// Free parameters fixed during construction.
    pub pinned: Vec<(String, Ratio)>,
    /// Whether `cuts` records a glass-cut sequence.
    pub gc: bool,
    pub cuts: Vec<Cut>,
    /// Zero for exact plans.
    pub tol: Ratio,
}

/// A tree with a concrete class at every node.
#[derive(Clone, Debug, PartialEq)]
pub struct PinnedNode {
    pub class: AffineClass,
    pub children: Option<Box<PinnedChildren>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PinnedChildren {
    pub op: Op,
    pub left: PinnedNode,
    pub left_flip: bool,
    pub right: PinnedNode,
    pub right_flip: bool,
}

impl PinnedNode {
    pub fn leaf(class: AffineClass) -> Self {
        PinnedNode {
            class,
            children: None,
        }
    }

    pub fn node(
        class: AffineClass,
        op: Op,
        left: PinnedNode,
        left_flip: bool,
        right: PinnedNode,
        right_flip: bool,
    ) -> Self {
        PinnedNode {
            class,
            children: Some(Box::new(PinnedChildren {
                op,
                left,
                left_flip,
                right,
                right_flip,
            })),
        }
    }
}

fn plan_tol(exact: bool) -> Ratio {
    if exact {
        Ratio::zero()
    } else {
        Ratio::approx(DEFAULT_FLOAT_TOL, 0.0)
    }
}

/// Looser tolerance for comparing classes of computed approximate outlines.
fn compare_tol(exact: bool) -> Ratio {
    if exact {
        Ratio::zero()
    } else {
        Ratio::approx(1e-7, 0.0)
    }
}

fn rank(m: &Member) -> u8 {
    match m {
        Member::Q { .. } => 0,
        Member::T(_) => 1,
        Member::P => 2,
    }
}

/// `(u, x / u)` with `u` in `j1` and `x / u` in `j2`.
fn split_product(j1: &Interval, j2: &Interval, x: &Ratio) -> (Ratio, Ratio) {
    let u = match j1.intersect(&j2.divide_into(x)) {
        Some(i) => i.pick(),
        None if j1.is_point() => j1.lo.clone(),
        None => x / &j2.pick(),
    };
    let v = x / &u;
    (u, v)
}

fn target_param(target: &AffineClass) -> Option<&Ratio> {
    match target {
        AffineClass::Q { beta, .. } => Some(beta),
        AffineClass::T { gamma } => Some(gamma),
        AffineClass::P => None,
    }
}

/// Classes of the operands (in their flagged parametrization) combining to
/// `target`.
fn split(
    a: &Member,
    fa: bool,
    b: &Member,
    fb: bool,
    op: Op,
    target: &AffineClass,
    tol: &Ratio,
) -> Option<(AffineClass, AffineClass)> {
    if rank(a) > rank(b) {
        return split(b, fb, a, fa, op, target, tol).map(|(x, y)| (y, x));
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
            let t = target_param(target)?;
            let x = match op {
                Op::Dot => t.clone(),
                Op::Colon => match r1.compare(r2) {
                    Ordering::Less => t / r2,
                    _ => t / r1,
                },
            };
            let (u, v) = split_product(j1, j2, &x);
            Some((a.at(&u), b.at(&v)))
        }
        (Member::Q { beta: j1, .. }, Member::T(j2)) => {
            let (u, v) = split_product(j1, j2, target_param(target)?);
            Some((a.at(&u), b.at(&v)))
        }
        (Member::T(j1), Member::T(j2)) => {
            if !fa && !fb {
                let (u, v) = split_product(j1, j2, target_param(target)?);
                return Some((a.at(&u), b.at(&v)));
            }
            let AffineClass::T { gamma } = target else {
                return Some((a.at(&j1.pick()), b.at(&j2.pick())));
            };
            if let Some(g1) = j1.pick_below(gamma) {
                return Some((a.at(&g1), b.at(&j2.pick())));
            }
            if let Some(g2) = j2.pick_below(gamma) {
                return Some((a.at(&j1.pick()), b.at(&g2)));
            }
            if j1.contains(gamma, tol) && j2.contains(gamma, tol) {
                return Some((a.at(gamma), b.at(gamma)));
            }
            None
        }
        (Member::T(j), Member::P) => {
            let gamma = target_param(target)?;
            let g = j.pick_below(gamma).unwrap_or_else(|| j.lo.clone());
            Some((a.at(&g), AffineClass::P))
        }
        (Member::P, Member::P) => Some((AffineClass::P, AffineClass::P)),
        _ => None,
    }
}

fn unflag(c: AffineClass, flagged: bool) -> AffineClass {
    if flagged && c.is_q() {
        flip(&c).expect("Q class")
    } else {
        c
    }
}

/// Pins every node of `t` (all leaves `leaf`) with root class `target`.
pub fn pin_tree(
    t: &ExtTree,
    leaf: &AffineClass,
    target: &AffineClass,
    tol: &Ratio,
) -> Result<PinnedNode, RealizeError> {
    match t {
        ExtTree::Leaf => {
            if same_class(leaf, target, tol) {
                Ok(PinnedNode::leaf(leaf.clone()))
            } else {
                Err(RealizeError::NotInSet(target.to_string()))
            }
        }
        ExtTree::Node {
            op,
            left,
            left_flip,
            right,
            right_flip,
        } => {
            let (lf, rf) = (*left_flip, *right_flip);
            let mut sl = evaluate(left, leaf);
            let mut sr = evaluate(right, leaf);
            if lf {
                sl = sl.flipped();
            }
            if rf {
                sr = sr.flipped();
            }
            for a in sl.members() {
                for b in sr.members() {
                    let Ok(ms) = combine_members(a, lf, b, rf, *op) else {
                        continue;
                    };
                    if !ms.iter().any(|m| m.contains(target, tol)) {
                        continue;
                    }
                    let Some((ca, cb)) = split(a, lf, b, rf, *op, target, tol) else {
                        continue;
                    };
                    let l = pin_tree(left, leaf, &unflag(ca, lf), tol)?;
                    let r = pin_tree(right, leaf, &unflag(cb, rf), tol)?;
                    return Ok(PinnedNode::node(target.clone(), *op, l, lf, r, rf));
                }
            }
            Err(RealizeError::NotInSet(target.to_string()))
        }
    }
}

fn is_parallel(u: &Point, v: &Point) -> bool {
    let c = cross(u, v);
    match c {
        Ratio::Exact(_) => c.is_zero(),
        Ratio::Approx { value, .. } => {
            let nu = u.x.to_f64().hypot(u.y.to_f64());
            let nv = v.x.to_f64().hypot(v.y.to_f64());
            value.abs() <= 1e-9 * nu * nv
        }
    }
}

fn classify_as(q: &Quad, target: &AffineClass) -> Option<AffineClass> {
    let mode = if target.is_q() || target.is_exact() {
        NearParallel::Reject
    } else {
        NearParallel::Accept
    };
    classify_quadrangle_with(q, mode)
        .ok()
        .map(|c| c.class.into_class())
}

struct Glued {
    parent: Quad,
    map: Affine,
    segment: [Point; 2],
    lambda: Option<Ratio>,
}

/// Places `q2` against a side of `q1` so that the union is a quadrangle of
/// class `target`.
fn glue(q1: &Quad, q2: &Quad, target: &AffineClass, tol: &Ratio) -> Option<Glued> {
    let one = Ratio::one();
    for i in 0..4 {
        let x = &q1[i];
        let y = &q1[(i + 1) % 4];
        let my = &q1[(i + 2) % 4];
        let mx = &q1[(i + 3) % 4];
        let ex = x.sub(mx);
        let d = y.sub(my);
        let par1 = is_parallel(&ex, &d);
        for j in 0..4 {
            for rev in [false, true] {
                let (p2, p3, n2, n3) = if rev {
                    (&q2[(j + 1) % 4], &q2[j], &q2[(j + 2) % 4], &q2[(j + 3) % 4])
                } else {
                    (&q2[j], &q2[(j + 1) % 4], &q2[(j + 3) % 4], &q2[(j + 2) % 4])
                };
                let e2 = n2.sub(p2);
                let e3 = n3.sub(p3);
                if par1 != is_parallel(&e2, &e3) {
                    continue;
                }
                let scales: Vec<Ratio> = if par1 {
                    let rho = parallel_factor(&ex, &d);
                    let kappa = parallel_factor(&e2, &e3);
                    let mut v = Vec::new();
                    match target {
                        AffineClass::Q { .. } => {}
                        AffineClass::T { gamma } => {
                            let free = |r: &Ratio| (&rho - r).is_zero() && (&kappa - r).is_zero();
                            if free(gamma) || free(&gamma.recip()) {
                                v.push(one.clone());
                            }
                            if !(&kappa - gamma).is_zero() {
                                v.push((gamma - &rho) / (&kappa - gamma));
                            }
                            let den = &one - gamma * &kappa;
                            if !den.is_zero() {
                                v.push((gamma * &rho - &one) / den);
                            }
                        }
                        AffineClass::P => {
                            if !(&kappa - &one).is_zero() {
                                v.push((&one - &rho) / (&kappa - &one));
                            } else if (&rho - &one).is_zero() {
                                v.push(one.clone());
                            }
                        }
                    }
                    v
                } else {
                    let b1 = p3.sub(p2);
                    let b2 = e2.clone();
                    let w = n3.sub(p2);
                    let det = cross(&b1, &b2);
                    if det.is_zero() {
                        continue;
                    }
                    let u = cross(&w, &b2) / &det;
                    let v = cross(&b1, &w) / &det;
                    let den = &v * cross(&ex, &d);
                    if den.is_zero() {
                        continue;
                    }
                    vec![(&one - &u) * cross(&y.sub(x), &d) / den]
                };
                for s in scales {
                    if !s.is_positive() {
                        continue;
                    }
                    let an2 = x.add(&ex.scale(&s));
                    let Some(map) = Affine::from_triangles([p2, p3, n2], [x, y, &an2]) else {
                        continue;
                    };
                    let an3 = map.apply(n3);
                    let ext = an3.sub(y);
                    if !parallel_factor(&d, &ext).is_positive() {
                        continue;
                    }
                    let parent = [mx.clone(), an2, an3, my.clone()];
                    if !is_strictly_convex(&parent) {
                        continue;
                    }
                    let Some(c) = classify_as(&parent, target) else {
                        continue;
                    };
                    if same_class(&c, target, tol) {
                        return Some(Glued {
                            parent,
                            map,
                            segment: [x.clone(), y.clone()],
                            lambda: par1.then_some(s),
                        });
                    }
                }
            }
        }
    }
    None
}

struct Piece {
    quad: Quad,
    tiles: Vec<Quad>,
    cuts: Vec<Cut>,
    lambdas: Vec<Ratio>,
}

fn map_cut(m: &Affine, c: &Cut) -> Cut {
    Cut {
        parent: m.apply_quad(&c.parent),
        segment: [m.apply(&c.segment[0]), m.apply(&c.segment[1])],
    }
}

fn realize_piece(n: &PinnedNode, tol: &Ratio) -> Result<Piece, RealizeError> {
    let Some(ch) = &n.children else {
        let q = standard_placement(&n.class).points;
        return Ok(Piece {
            quad: q.clone(),
            tiles: vec![q],
            cuts: Vec::new(),
            lambdas: Vec::new(),
        });
    };
    let p1 = realize_piece(&ch.left, tol)?;
    let p2 = realize_piece(&ch.right, tol)?;
    let g = glue(&p1.quad, &p2.quad, &n.class, tol)
        .ok_or_else(|| RealizeError::NoGluing(n.class.to_string()))?;
    let mut tiles = p1.tiles;
    tiles.extend(p2.tiles.iter().map(|t| g.map.apply_quad(t)));
    let mut cuts = p1.cuts;
    cuts.extend(p2.cuts.iter().map(|c| map_cut(&g.map, c)));
    cuts.push(Cut {
        parent: g.parent.clone(),
        segment: g.segment,
    });
    let mut lambdas = p1.lambdas;
    lambdas.extend(p2.lambdas);
    lambdas.extend(g.lambda);
    Ok(Piece {
        quad: g.parent,
        tiles,
        cuts,
        lambdas,
    })
}

/// Root, tiles, cuts (coarsest last) and the gluing parameters pinned on the way.
pub type Realized = (Quad, Vec<Quad>, Vec<Cut>, Vec<Ratio>);

/// Realizes a pinned tree with its root on the standard placement of its
/// class.
pub fn realize_pinned(n: &PinnedNode, tol: &Ratio) -> Result<Realized, RealizeError> {
    let piece = realize_piece(n, tol)?;
    let std = standard_placement(&n.class).points;
    let exact = tol.is_zero();
    let map = affine_between_quads(&piece.quad, &std, &compare_tol(exact))
        .ok_or_else(|| RealizeError::NoGluing(n.class.to_string()))?;
    let root = align(map.apply_quad(&piece.quad), &std, &compare_tol(exact));
    let tiles = piece.tiles.iter().map(|t| map.apply_quad(t)).collect();
    let mut cuts: Vec<Cut> = piece.cuts.iter().map(|c| map_cut(&map, c)).collect();
    cuts.reverse();
    Ok((root, tiles, cuts, piece.lambdas))
}

/// `q` cyclically relabeled to match the vertex order of `reference`.
fn align(q: Quad, reference: &Quad, tol: &Ratio) -> Quad {
    for shift in 0..4 {
        for reflect in [false, true] {
            let idx = |k: usize| {
                if reflect {
                    (shift + 4 - k) % 4
                } else {
                    (shift + k) % 4
                }
            };
            if (0..4).all(|k| points_close(&q[idx(k)], &reference[k], tol)) {
                return [0, 1, 2, 3].map(|k| q[idx(k)].clone());
            }
        }
    }
    q
}

/// Splits the standard placement of `parent` into a copy of `left` and a copy
/// of `right` glued by `op` with the given flip marks.
pub fn realize_cut(
    parent: &AffineClass,
    op: Op,
    left: (&AffineClass, bool),
    right: (&AffineClass, bool),
) -> Result<[Quad; 3], RealizeError> {
    let exact = parent.is_exact() && left.0.is_exact() && right.0.is_exact();
    let tol = plan_tol(exact);
    let a = ClassTerm::new(left.0.clone(), left.1);
    let b = ClassTerm::new(right.0.clone(), right.1);
    let ms = combine_members(
        &Member::from_class(&a.class),
        a.flipped,
        &Member::from_class(&b.class),
        b.flipped,
        op,
    )
    .map_err(|e| RealizeError::Refused(e.to_string()))?;
    if !ms.iter().any(|m| m.contains(parent, &tol)) {
        return Err(RealizeError::NotInSet(parent.to_string()));
    }
    let node = PinnedNode::node(
        parent.clone(),
        op,
        PinnedNode::leaf(left.0.clone()),
        left.1,
        PinnedNode::leaf(right.0.clone()),
        right.1,
    );
    let (root, tiles, _, _) = realize_pinned(&node, &compare_tol(exact))?;
    Ok([root, tiles[0].clone(), tiles[1].clone()])
}

fn lambda_params(lambdas: Vec<Ratio>) -> Vec<(String, Ratio)> {
    lambdas
        .into_iter()
        .enumerate()
        .map(|(k, l)| (format!("lambda{}", k + 1), l))
        .collect()
}

/// Realizes `t` with all leaves of class `leaf`. The root class is `target`
/// or, by default, the parametrization of `leaf` found in the root set.
pub fn realize_tree(
    t: &ExtTree,
    leaf: &AffineClass,
    target: Option<&AffineClass>,
) -> Result<DissectionPlan, RealizeError> {
    let exact = leaf.is_exact() && target.is_none_or(|c| c.is_exact());
    let tol = plan_tol(exact);
    let set = evaluate(t, leaf);
    let target = match target {
        Some(c) => {
            if !set.member(c, &tol) {
                return Err(RealizeError::NotInSet(c.to_string()));
            }
            c.clone()
        }
        None => {
            match_leaf(&set, leaf, &tol)
                .ok_or_else(|| RealizeError::NotInSet(leaf.to_string()))?
                .0
        }
    };
    let pinned = pin_tree(t, leaf, &target, &tol)?;
    let (root, tiles, cuts, lambdas) = realize_pinned(&pinned, &compare_tol(exact))?;
    Ok(DissectionPlan {
        root,
        root_class: canonicalize(&target).into_class(),
        tiles,
        tile_class: canonicalize(leaf).into_class(),
        provenance: Provenance::Tree(t.clone()),
        pinned: lambda_params(lambdas),
        gc: true,
        cuts,
        tol,
    })
}

fn q_params(c: &AffineClass) -> Result<(&Ratio, &Ratio), RealizeError> {
    match c {
        AffineClass::Q { alpha, beta } => Ok((alpha, beta)),
        other => refuse(format!("expected a non-trapezoid Q class, got {other}")),
    }
}

fn leaf_pair(op: Op, flip: bool) -> ExtTree {
    ExtTree::node(op, ExtTree::Leaf, flip, ExtTree::Leaf, flip)
}

/// Tree of `k` leaves (even, at least 2) whose root set is the trapezoid
/// range reached from `leaf`.
pub fn trapezoid_tree(leaf: &AffineClass, k: usize) -> Result<ExtTree, RealizeError> {
    let (alpha, beta) = q_params(leaf)?;
    if k < 2 || k % 2 == 1 {
        return refuse(format!(
            "trapezoid dissections need an even piece count, got {k}"
        ));
    }
    let u = leaf_pair(Op::Colon, flip_factor(alpha, beta) < Ratio::one());
    if k == 2 {
        return Ok(u);
    }
    let m = k / 2 - 1;
    let mut chain = u.clone();
    for _ in 1..m {
        chain = ExtTree::node(Op::Dot, chain, false, u.clone(), false);
    }
    Ok(ExtTree::node(Op::Dot, chain, true, u, true))
}

/// Dissection of `T(gamma)` into `k` copies of the Q class `leaf`.
///
/// With `k = 2` the trapezoid must be `T(alpha beta)` in one of the two
/// parametrizations. For even `k >= 4` every `gamma` in
/// `[alpha beta min(f, 1), 1)` is reached, `f` the flip factor.
pub fn dissect_trapezoid(
    gamma: &Ratio,
    leaf: &AffineClass,
    k: usize,
) -> Result<DissectionPlan, RealizeError> {
    let (alpha, beta) = q_params(leaf)?;
    let one = Ratio::one();
    if !(gamma.is_positive() && *gamma < one) {
        return refuse(format!("gamma must lie in (0, 1), got {gamma}"));
    }
    let target = AffineClass::T {
        gamma: gamma.clone(),
    };
    let tol = compare_tol(leaf.is_exact() && gamma.is_exact());
    if k == 2 {
        let (fa, fb) = crate::affine_types::flip_params(alpha, beta);
        let plain = alpha * beta;
        let flipped = &fa * &fb;
        let t = if gamma.within(&plain, &tol) {
            leaf_pair(Op::Colon, false)
        } else if gamma.within(&flipped, &tol) {
            leaf_pair(Op::Colon, true)
        } else {
            return refuse(format!(
                "two copies of {leaf} only tile T({plain}) or T({flipped}), not T({gamma})"
            ));
        };
        return realize_tree(&t, leaf, Some(&target));
    }
    let f = flip_factor(alpha, beta);
    let bound = alpha * beta * Ratio::min(&f, &one);
    if *gamma < bound && !gamma.within(&bound, &tol) {
        return refuse(format!(
            "T({gamma}) lies below the bound {bound} for {k} copies of {leaf}"
        ));
    }
    let t = trapezoid_tree(leaf, k)?;
    realize_tree(&t, leaf, Some(&target))
}

/// Dissection of a Q class into an odd number `n >= 5` of copies of itself.
/// Affine kites need `n >= 7`.
pub fn dissect_odd(leaf: &AffineClass, n: usize) -> Result<DissectionPlan, RealizeError> {
    let (alpha, beta) = q_params(leaf)?;
    if n.is_multiple_of(2) || n < 5 {
        return refuse(format!("odd constructions need an odd n >= 5, got {n}"));
    }
    if is_affine_kite(leaf) {
        if n == 5 {
            return refuse(format!(
                "{leaf} is an affine kite; kites admit no glass-cut dissection into 5 copies"
            ));
        }
        let head = ExtTree::node(
            Op::Dot,
            ExtTree::Leaf,
            false,
            leaf_pair(Op::Colon, false),
            false,
        );
        let t = ExtTree::node(Op::Dot, head, true, trapezoid_tree(leaf, n - 3)?, false);
        let mut plan = realize_tree(&t, leaf, None)?;
        let one = Ratio::one();
        let gamma = (&one - alpha * alpha * beta) * beta / (&one - alpha * beta * beta);
        plan.pinned.insert(0, ("gamma".into(), gamma));
        return Ok(plan);
    }
    let w = if flip_factor(alpha, beta) < Ratio::one() {
        leaf.clone()
    } else {
        flip(leaf).expect("Q class")
    };
    let t = ExtTree::node(
        Op::Dot,
        ExtTree::Leaf,
        false,
        trapezoid_tree(&w, n - 1)?,
        false,
    );
    let (wa, wb) = q_params(&w)?;
    let target = flip(&w).expect("Q class");
    let mut plan = realize_tree(&t, &w, Some(&target))?;
    plan.pinned.insert(0, ("gamma".into(), flip_factor(wa, wb)));
    Ok(plan)
}

/// `T(gamma)` or `P` cut into `n` strips between its parallel sides.
pub fn dissect_fan(c: &AffineClass, n: usize) -> Result<DissectionPlan, RealizeError> {
    if n < 2 {
        return refuse(format!("a fan needs at least 2 pieces, got {n}"));
    }
    let (right, top) = match c {
        AffineClass::T { gamma } => (Ratio::one() - gamma, gamma.clone()),
        AffineClass::P => (Ratio::one(), Ratio::one()),
        other => return refuse(format!("fans exist only for T and P, got {other}")),
    };
    let nn = Ratio::int(n as i64);
    let zero = Ratio::zero();
    let line = |j: usize| {
        let t = Ratio::int(j as i64) / &nn;
        [
            Point::new(zero.clone(), t.clone()),
            Point::new(right.clone(), &top * &t),
        ]
    };
    let root = standard_placement(c).points;
    let mut tiles = Vec::with_capacity(n);
    let mut cuts = Vec::with_capacity(n - 1);
    for j in 1..=n {
        let [p0, p1] = line(j - 1);
        let [q0, q1] = line(j);
        tiles.push([p0.clone(), p1.clone(), q1.clone(), q0.clone()]);
        if j < n {
            let [t0, t1] = line(n);
            cuts.push(Cut {
                parent: [p0, p1, t1, t0],
                segment: [q0, q1],
            });
        }
    }
    Ok(DissectionPlan {
        root,
        root_class: c.clone(),
        tiles,
        tile_class: c.clone(),
        provenance: Provenance::Construction {
            name: "fan".into(),
            params: vec![("n".into(), Ratio::int(n as i64))],
        },
        pinned: Vec::new(),
        gc: true,
        cuts,
        tol: plan_tol(c.is_exact()),
    })
}

/// Tiles of `sub` carried onto the quadrangle `target`.
fn place_plan(sub: &DissectionPlan, target: &Quad, tol: &Ratio) -> Result<Vec<Quad>, RealizeError> {
    let map = affine_between_quads(&sub.root, target, tol)
        .ok_or_else(|| RealizeError::Construction("trapezoid piece does not match".into()))?;
    Ok(sub.tiles.iter().map(|t| map.apply_quad(t)).collect())
}

fn as_quad(poly: Vec<Point>, what: &str) -> Result<Quad, RealizeError> {
    let n = poly.len();
    poly.try_into()
        .map_err(|_| RealizeError::Construction(format!("{what} has {n} vertices")))
}

/// Five copies of a Q class tiling a larger copy; not glass-cut.
pub fn dissect_por5(leaf: &AffineClass) -> Result<DissectionPlan, RealizeError> {
    let (alpha, beta) = q_params(leaf)?;
    let exact = leaf.is_exact();
    let tol = compare_tol(exact);
    let q = standard_placement(leaf).points;
    let r = alpha * beta;
    let rho = Affine::homothety(&q[0], &r);
    let rq = rho.apply_quad(&q);
    let t1 = [rq[1].clone(), q[1].clone(), q[2].clone(), rq[2].clone()];
    let t2 = [rq[2].clone(), q[2].clone(), q[3].clone(), rq[3].clone()];
    let sub = dissect_trapezoid(&r, leaf, 2)?;
    let mut tiles = vec![rq];
    tiles.extend(place_plan(&sub, &t1, &tol)?);
    tiles.extend(place_plan(&sub, &t2, &tol)?);
    Ok(DissectionPlan {
        root: q,
        root_class: canonicalize(leaf).into_class(),
        tiles,
        tile_class: canonicalize(leaf).into_class(),
        provenance: Provenance::Construction {
            name: "por5".into(),
            params: vec![("rho".into(), r.clone())],
        },
        pinned: vec![("rho".into(), r)],
        gc: false,
        cuts: Vec::new(),
        tol: plan_tol(exact),
    })
}

/// Iteration cap, bracket width and residual target of the search for `nu0`.
const NU_MAX_ITER: usize = 200;
const NU_WIDTH: f64 = 1e-12;

struct EvenFrame {
    q: Quad,
    sigma_q: Quad,
    t1: Vec<Point>,
    t2: Vec<Point>,
    q2: Vec<Point>,
    kappa: Ratio,
}

impl EvenFrame {
    fn new(leaf: &AffineClass) -> Result<Self, RealizeError> {
        let q = standard_placement(leaf).points;
        let [a, b, c, d] = &q;
        let phi = Affine::from_triangles([a, b, d], [c, b, d])
            .ok_or_else(|| RealizeError::Construction("degenerate frame".into()))?;
        let phic = phi.apply(c);
        let kappa = parallel_factor(&phic.sub(a), &c.sub(a));
        if kappa <= Ratio::one() {
            return Err(RealizeError::Construction(format!(
                "contraction centre is not inside the diagonal (kappa = {kappa})"
            )));
        }
        let sigma = Affine::homothety(a, &kappa);
        let sigma_q = sigma.apply_quad(&q);
        let q2 = sigma.apply_quad(&phi.apply_quad(&q)).to_vec();
        let t1 = vec![b.clone(), sigma_q[1].clone(), c.clone()];
        let t2 = vec![c.clone(), sigma_q[3].clone(), d.clone()];
        Ok(EvenFrame {
            q,
            sigma_q,
            t1,
            t2,
            q2,
            kappa,
        })
    }

    fn root(&self, nu: &Ratio) -> Quad {
        Affine::homothety(&self.q[0], nu).apply_quad(&self.sigma_q)
    }

    fn piece(&self, poly: &[Point], nu: &Ratio, what: &str) -> Result<Quad, RealizeError> {
        as_quad(simplify(&clip_convex(poly, &self.root(nu))), what)
    }

    fn mu(&self, nu: &Ratio) -> Result<Ratio, RealizeError> {
        let p = self.piece(&self.t1, nu, "first trapezoid")?;
        match classify_quadrangle_with(&p, NearParallel::Accept)?
            .class
            .into_class()
        {
            AffineClass::T { gamma } => Ok(gamma),
            other => Err(RealizeError::Construction(format!(
                "first trapezoid piece classified as {other}"
            ))),
        }
    }
}

/// Copies of a Q class tiling a larger copy, for even `n >= 6`; not
/// glass-cut. The root scale `nu0` is bracketed by bisection on float
/// midpoints (held as exact rationals) and finished by one secant step, which
/// is exact because the trapezoid ratio is affine in `nu`.
pub fn dissect_even_general(leaf: &AffineClass, n: usize) -> Result<DissectionPlan, RealizeError> {
    let (alpha, beta) = q_params(leaf)?;
    if n < 6 || n % 2 == 1 {
        return refuse(format!(
            "the even construction needs an even n >= 6, got {n}"
        ));
    }
    let exact = leaf.is_exact();
    let tol = compare_tol(exact);
    let frame = EvenFrame::new(leaf)?;
    let target = alpha * beta;
    let exactify =
        |x: f64| Ratio::from_f64_exact(x).ok_or_else(|| RealizeError::Construction("nan".into()));
    let (mut lo, mut hi) = (1.0 / frame.kappa.to_f64(), 1.0);
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    while iterations < NU_MAX_ITER && (hi - lo >= NU_WIDTH || residual >= NU_WIDTH) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let mu = frame.mu(&exactify(mid)?)?;
        residual = (&mu - &target).abs().to_f64();
        if mu > target {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let (nlo, nhi) = (exactify(lo)?, exactify(hi)?);
    let (mlo, mhi) = (frame.mu(&nlo)?, frame.mu(&nhi)?);
    let nu0 = &nlo + (&target - &mlo) * (&nhi - &nlo) / (&mhi - &mlo);
    let mu0 = frame.mu(&nu0)?;
    if !mu0.within(&target, &tol) {
        return Err(RealizeError::Construction(format!(
            "secant step missed: mu(nu0) = {mu0}, expected {target}"
        )));
    }

    let root = frame.root(&nu0);
    let p1 = frame.piece(&frame.t1, &nu0, "first trapezoid")?;
    let p2 = frame.piece(&frame.t2, &nu0, "second trapezoid")?;
    let pq = frame.piece(&frame.q2, &nu0, "second copy")?;
    let mu2 = match classify_quadrangle_with(&p2, NearParallel::Accept)?
        .class
        .into_class()
    {
        AffineClass::T { gamma } => gamma,
        other => {
            return Err(RealizeError::Construction(format!(
                "second trapezoid piece classified as {other}"
            )))
        }
    };
    let mut tiles = vec![frame.q.clone(), pq];
    tiles.extend(place_plan(&dissect_trapezoid(&mu0, leaf, 2)?, &p1, &tol)?);
    tiles.extend(place_plan(
        &dissect_trapezoid(&mu2, leaf, n - 4)?,
        &p2,
        &tol,
    )?);

    // Rescale so the root is the standard placement.
    let std = standard_placement(leaf).points;
    let map = affine_between_quads(&root, &std, &tol)
        .ok_or_else(|| RealizeError::Construction("root is not a copy of the tile".into()))?;
    let tiles = tiles.iter().map(|t| map.apply_quad(t)).collect();
    let params = vec![
        ("kappa".to_string(), frame.kappa.clone()),
        ("nu0".to_string(), nu0.clone()),
    ];
    Ok(DissectionPlan {
        root: align(map.apply_quad(&root), &std, &tol),
        root_class: canonicalize(leaf).into_class(),
        tiles,
        tile_class: canonicalize(leaf).into_class(),
        provenance: Provenance::Construction {
            name: "even".into(),
            params: params.clone(),
        },
        pinned: {
            let mut p = params;
            p.push(("mu2".into(), mu2));
            p.push(("bisection_residual".into(), Ratio::approx(residual, 0.0)));
            p
        },
        gc: false,
        cuts: Vec::new(),
        tol: plan_tol(exact),
    })
}
