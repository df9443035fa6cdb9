//! SVG 1.1 rendering of the base plane for `q = 2`.

use std::fmt::Write;

use anyhow::Result;
use syz_core::syz::CatalogMatch;
use syz_core::tropical::tailored_amoeba_contains_closed;
use syz_core::BasePoint;

use crate::commands::axis;
use crate::config::RunConfig;
use crate::envelope::round_sig;

const MARGIN: f64 = 40.0;

struct Frame {
    lo: f64,
    hi: f64,
    width: f64,
    height: f64,
}

impl Frame {
    fn x(&self, xi1: f64) -> f64 {
        MARGIN + (xi1 - self.lo) / (self.hi - self.lo) * (self.width - 2.0 * MARGIN)
    }

    fn y(&self, xi2: f64) -> f64 {
        self.height - MARGIN - (xi2 - self.lo) / (self.hi - self.lo) * (self.height - 2.0 * MARGIN)
    }
}

fn px(v: f64) -> String {
    format!("{v:.2}")
}

/// Convex hull by the monotone chain, counterclockwise.
fn convex_hull(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut hull: Vec<[f64; 2]> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

fn in_hull(hull: &[[f64; 2]], p: [f64; 2]) -> bool {
    if hull.len() < 3 {
        return false;
    }
    (0..hull.len()).all(|i| {
        let (a, b) = (hull[i], hull[(i + 1) % hull.len()]);
        (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) >= -1e-12
    })
}

/// Emits run-length merged cell rectangles for one raster.
fn raster_rects(out: &mut String, frame: &Frame, axis: &[f64], cell: impl Fn(usize, usize) -> bool) {
    let n = axis.len();
    let half = 0.5 * (axis[1] - axis[0]);
    for j in 0..n {
        let mut i = 0;
        while i < n {
            if !cell(i, j) {
                i += 1;
                continue;
            }
            let start = i;
            while i < n && cell(i, j) {
                i += 1;
            }
            let (x0, x1) = (frame.x(axis[start] - half), frame.x(axis[i - 1] + half));
            let (y0, y1) = (frame.y(axis[j] + half), frame.y(axis[j] - half));
            let _ = writeln!(
                out,
                r#"    <rect x="{}" y="{}" width="{}" height="{}"/>"#,
                px(x0),
                px(y0),
                px(x1 - x0),
                px(y1 - y0)
            );
        }
    }
}

fn marker(out: &mut String, frame: &Frame, class: &str, fill: &str, subset: &[usize], xi: &[f64]) {
    let label: Vec<String> = subset.iter().map(|i| i.to_string()).collect();
    let _ = writeln!(
        out,
        r#"    <circle class="{class}" cx="{}" cy="{}" r="6" fill="{fill}" stroke="black" stroke-width="1" data-subset="{{{}}}" data-xi1="{}" data-xi2="{}"/>"#,
        px(frame.x(xi[0])),
        px(frame.y(xi[1])),
        label.join(","),
        round_sig(xi[0]),
        round_sig(xi[1]),
    );
}

/// Amoeba raster, spine, skeleton-projection shading and critical markers.
pub fn render(cfg: &RunConfig, matched: &CatalogMatch) -> Result<String> {
    let params = cfg.model_shape().params;
    let axis = axis(cfg);
    let n = axis.len();
    let frame = Frame {
        lo: cfg.grid.xi_min,
        hi: cfg.grid.xi_max,
        width: f64::from(cfg.output.figure_width),
        height: f64::from(cfg.output.figure_height),
    };
    let mut inside = vec![false; n * n];
    for j in 0..n {
        for i in 0..n {
            let xi = BasePoint::new(vec![axis[i], axis[j]])?;
            inside[j * n + i] = tailored_amoeba_contains_closed(&xi, &params, 0.0)?;
        }
    }

    let found: Vec<(&[usize], &Vec<f64>)> = matched
        .rows
        .iter()
        .filter_map(|r| r.found_xi.as_ref().map(|x| (r.subset.as_slice(), x)))
        .collect();
    let hull = convex_hull(found.iter().map(|(_, x)| [x[0], x[1]]).collect());

    let mut s = String::new();
    let (w, h) = (cfg.output.figure_width, cfg.output.figure_height);
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(
        s,
        "  <title>Base plane of X({}, 2): tailored amoeba, spine and critical loci</title>",
        cfg.shape.p
    );
    let _ = writeln!(s, r#"  <rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#);

    let _ = writeln!(s, r##"  <g id="amoeba" fill="#b3b3b3" stroke="none">"##);
    raster_rects(&mut s, &frame, &axis, |i, j| inside[j * n + i]);
    let _ = writeln!(s, "  </g>");

    let _ = writeln!(s, r#"  <g id="skeleton-region" fill="blue" fill-opacity="0.35" stroke="none">"#);
    raster_rects(&mut s, &frame, &axis, |i, j| {
        !inside[j * n + i] && in_hull(&hull, [axis[i], axis[j]])
    });
    let _ = writeln!(s, "  </g>");

    // Spine of max(0, xi_1, xi_2): three rays from the origin.
    let (lo, hi) = (frame.lo, frame.hi);
    let _ = writeln!(s, r#"  <g id="spine" stroke="black" stroke-width="1.5" fill="none">"#);
    for (a, b) in [([0.0, 0.0], [0.0, lo]), ([0.0, 0.0], [lo, 0.0]), ([0.0, 0.0], [hi, hi])] {
        let _ = writeln!(
            s,
            r#"    <line x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
            px(frame.x(a[0])),
            px(frame.y(a[1])),
            px(frame.x(b[0])),
            px(frame.y(b[1]))
        );
    }
    let _ = writeln!(s, "  </g>");

    let _ = writeln!(
        s,
        r#"  <g id="axes" stroke="gray" stroke-width="1" fill="none" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        s,
        r#"    <rect x="{m}" y="{m}" width="{}" height="{}"/>"#,
        px(frame.width - 2.0 * MARGIN),
        px(frame.height - 2.0 * MARGIN),
        m = MARGIN
    );
    let _ = writeln!(
        s,
        r#"    <text x="{}" y="{}" stroke="none" fill="black" text-anchor="middle">xi_1</text>"#,
        px(frame.width / 2.0),
        px(frame.height - 10.0)
    );
    let _ = writeln!(
        s,
        r#"    <text x="12" y="{}" stroke="none" fill="black" text-anchor="middle">xi_2</text>"#,
        px(frame.height / 2.0)
    );
    let _ = writeln!(s, "  </g>");

    let _ = writeln!(s, r#"  <g id="critical-points">"#);
    for (subset, xi) in &found {
        if subset.is_empty() {
            marker(&mut s, &frame, "base", "red", subset, xi);
        } else {
            marker(&mut s, &frame, "catalog", "green", subset, xi);
        }
    }
    let _ = writeln!(s, "  </g>");
    let _ = writeln!(s, "</svg>");
    Ok(s)
}
