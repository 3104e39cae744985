//! Deterministic SVG 1.1 drawings of plans.

use std::fmt::Write;

use crate::geometry::Point;
use crate::realizer::DissectionPlan;

const SHADES: [&str; 6] = [
    "#dbe7f3", "#f3e3cf", "#dcefd9", "#eedcef", "#f5f0c8", "#d7eeee",
];

fn xy(p: &Point) -> (f64, f64) {
    // SVG's y axis points down; plans use the usual orientation.
    (p.x.to_f64(), -p.y.to_f64())
}

fn path(points: &[Point]) -> String {
    let mut s = String::new();
    for (k, p) in points.iter().enumerate() {
        let (x, y) = xy(p);
        let _ = write!(s, "{}{x:.6},{y:.6} ", if k == 0 { "M" } else { "L" });
    }
    s.push('Z');
    s
}

/// Root outline, shaded tiles and (for glass-cut plans) the cut segments.
/// The viewBox is the root's bounding box with a 5% margin.
pub fn render_svg(plan: &DissectionPlan) -> String {
    let pts: Vec<(f64, f64)> = plan.root.iter().map(xy).collect();
    let min_x = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let max_x = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let min_y = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let max_y = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let (w, h) = (max_x - min_x, max_y - min_y);
    let (mx, my) = (0.05 * w, 0.05 * h);
    let stroke = 0.004 * w.max(h);

    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"600\" height=\"{:.0}\" viewBox=\"{:.6} {:.6} {:.6} {:.6}\">",
        600.0 * (h + 2.0 * my) / (w + 2.0 * mx),
        min_x - mx,
        min_y - my,
        w + 2.0 * mx,
        h + 2.0 * my
    );
    let _ = writeln!(
        s,
        "<title>{} tiles of {}</title>",
        plan.tiles.len(),
        plan.tile_class
    );
    let _ = writeln!(
        s,
        "<g stroke=\"#555555\" stroke-width=\"{stroke:.6}\" stroke-linejoin=\"round\">"
    );
    for (k, t) in plan.tiles.iter().enumerate() {
        let _ = writeln!(
            s,
            "<path d=\"{}\" fill=\"{}\"/>",
            path(t),
            SHADES[k % SHADES.len()]
        );
    }
    s.push_str("</g>\n");
    if plan.gc && !plan.cuts.is_empty() {
        let _ = writeln!(
            s,
            "<g stroke=\"#b03a2e\" stroke-width=\"{:.6}\">",
            1.5 * stroke
        );
        for c in &plan.cuts {
            let (x1, y1) = xy(&c.segment[0]);
            let (x2, y2) = xy(&c.segment[1]);
            let _ = writeln!(
                s,
                "<line x1=\"{x1:.6}\" y1=\"{y1:.6}\" x2=\"{x2:.6}\" y2=\"{y2:.6}\"/>"
            );
        }
        s.push_str("</g>\n");
    }
    let _ = writeln!(
        s,
        "<path d=\"{}\" fill=\"none\" stroke=\"#000000\" stroke-width=\"{:.6}\"/>",
        path(&plan.root),
        2.0 * stroke
    );
    s.push_str("</svg>\n");
    s
}
