//! Coordinate-only checks of a [`DissectionPlan`].

use crate::affine_types::{classify_quadrangle_with, same_class, AffineClass, NearParallel};
use crate::geometry::{area, convex_intersection_area, cross, is_strictly_convex, Point, Quad};
use crate::ratio::Ratio;
use crate::realizer::DissectionPlan;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VerifyError {
    #[error("malformed plan: {0}")]
    Malformed(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub ok: bool,
    pub tiles: usize,
    pub root_area: Ratio,
    /// Tile area sum minus root area.
    pub area_defect: Ratio,
    pub max_overlap: Ratio,
    pub failures: Vec<String>,
}

fn mode(tol: &Ratio) -> NearParallel {
    if tol.is_zero() {
        NearParallel::Reject
    } else {
        NearParallel::Accept
    }
}

fn check_class(q: &Quad, expected: &AffineClass, tol: &Ratio) -> Result<(), String> {
    if !is_strictly_convex(q) {
        return Err("not strictly convex".into());
    }
    let c = classify_quadrangle_with(q, mode(tol))
        .map_err(|e| e.to_string())?
        .class
        .into_class();
    if same_class(&c, expected, tol) {
        Ok(())
    } else {
        Err(format!("classified as {c}, expected {expected}"))
    }
}

/// Whether `x` lies on the open segment `pq` (within `tol` relative to its
/// length when approximate).
fn in_open_segment(x: &Point, p: &Point, q: &Point, tol: &Ratio) -> bool {
    let d = q.sub(p);
    let w = x.sub(p);
    let len2 = &d.x * &d.x + &d.y * &d.y;
    let off = cross(&d, &w);
    let t = (&d.x * &w.x + &d.y * &w.y) / &len2;
    if tol.is_zero() {
        off.is_zero() && t.is_positive() && t < Ratio::one()
    } else {
        let scale = len2.to_f64();
        off.to_f64().abs() <= tol.to_f64() * scale
            && t.to_f64() > tol.to_f64()
            && t.to_f64() < 1.0 - tol.to_f64()
    }
}

/// The side of `q` whose relative interior contains `x`.
fn side_of(x: &Point, q: &Quad, tol: &Ratio) -> Option<usize> {
    (0..4).find(|&i| in_open_segment(x, &q[i], &q[(i + 1) % 4], tol))
}

fn finite(p: &Point) -> bool {
    p.x.to_f64().is_finite() && p.y.to_f64().is_finite()
}

/// Checks tiles against the tile class, the root against the root class,
/// exact (or `tol`-relative) area balance, pairwise overlaps, and for glass-cut
/// plans that every cut joins interior points of opposite sides of its parent.
///
/// A zero `tol` demands exact coordinates and exact equalities.
pub fn verify_plan(plan: &DissectionPlan, tol: &Ratio) -> Result<VerificationReport, VerifyError> {
    if tol.is_negative() {
        return Err(VerifyError::Malformed(format!("negative tolerance {tol}")));
    }
    if plan.tiles.is_empty() {
        return Err(VerifyError::Malformed("no tiles".into()));
    }
    let all_points = plan.tiles.iter().flatten().chain(plan.root.iter()).chain(
        plan.cuts
            .iter()
            .flat_map(|c| c.parent.iter().chain(c.segment.iter())),
    );
    if let Some(p) = all_points.clone().find(|p| !finite(p)) {
        return Err(VerifyError::Malformed(format!("non-finite coordinate {p}")));
    }
    let exact = tol.is_zero();
    if exact && all_points.clone().any(|p| !p.is_exact()) {
        return Err(VerifyError::Malformed(
            "approximate coordinates in a plan with zero tolerance".into(),
        ));
    }

    let mut failures = Vec::new();
    if let Err(e) = check_class(&plan.root, &plan.root_class, tol) {
        failures.push(format!("root: {e}"));
    }
    for (k, t) in plan.tiles.iter().enumerate() {
        if let Err(e) = check_class(t, &plan.tile_class, tol) {
            failures.push(format!("tile {k}: {e}"));
        }
    }

    let root_area = area(&plan.root);
    let slack = tol * &root_area;
    let total = plan
        .tiles
        .iter()
        .fold(Ratio::zero(), |acc, t| acc + area(t));
    let area_defect = &total - &root_area;
    if area_defect.abs() > slack || (exact && !area_defect.is_zero()) {
        failures.push(format!(
            "tile areas sum to {total}, root area is {root_area}"
        ));
    }

    let mut max_overlap = Ratio::zero();
    for (i, t) in plan.tiles.iter().enumerate() {
        let inside = convex_intersection_area(t, &plan.root);
        let outside = area(t) - inside;
        if outside > slack || (exact && !outside.is_zero()) {
            failures.push(format!("tile {i} leaves the root by area {outside}"));
        }
        for (j, u) in plan.tiles.iter().enumerate().skip(i + 1) {
            let o = convex_intersection_area(t, u);
            if o > slack || (exact && !o.is_zero()) {
                failures.push(format!("tiles {i} and {j} overlap by area {o}"));
            }
            if o > max_overlap {
                max_overlap = o;
            }
        }
    }

    if plan.gc {
        if plan.cuts.len() + 1 != plan.tiles.len() {
            failures.push(format!(
                "{} cuts for {} tiles in a glass-cut plan",
                plan.cuts.len(),
                plan.tiles.len()
            ));
        }
        for (k, c) in plan.cuts.iter().enumerate() {
            let s0 = side_of(&c.segment[0], &c.parent, tol);
            let s1 = side_of(&c.segment[1], &c.parent, tol);
            match (s0, s1) {
                (Some(a), Some(b)) if (a + 2) % 4 == b => {}
                _ => failures.push(format!(
                    "cut {k} does not join interior points of opposite sides"
                )),
            }
        }
    }

    Ok(VerificationReport {
        ok: failures.is_empty(),
        tiles: plan.tiles.len(),
        root_area,
        area_defect,
        max_overlap,
        failures,
    })
}
