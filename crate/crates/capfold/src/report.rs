//! JSON and SVG output for unfoldings. Everything here is a pure function
//! of its inputs, so the same run always produces the same bytes.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use crate::forest::{QuadrantSystem, SpanningForest};
use crate::geom::Vec2;
use crate::mesh::{ConvexCap, PlanarCap};
use crate::pipeline::{boundary_image, Unfolding, SCHEMA_VERSION};

/// Side length of the square SVG canvas, in user units.
pub const CANVAS: f64 = 1000.0;

const STYLE: &str = "\
.face{fill:#f4f1ea;stroke:none}
.fold{stroke:#c8c8c8;stroke-width:0.6;fill:none}
.rim{stroke:#404040;stroke-width:1.2;fill:none}
.cut{stroke:#d62828;stroke-width:1.6;fill:none}
.strip-boundary{stroke:#1d4e89;stroke-width:0.9;fill:none;stroke-dasharray:6 4}
.quadrant-line{stroke:#2a9d8f;stroke-width:0.8;stroke-dasharray:2 3}
.forest-edge{stroke:#d62828;stroke-width:1.8}
.mesh-edge{stroke:#c8c8c8;stroke-width:0.6}
.origin{fill:#2a9d8f}";

/// Maps a bounding box plus a 5% margin onto the canvas, y up.
#[derive(Debug, Clone, Copy)]
pub struct Viewport {
    lo: Vec2,
    scale: f64,
}

impl Viewport {
    pub fn fit(lo: Vec2, hi: Vec2) -> Self {
        let ext = (hi.x - lo.x).max(hi.y - lo.y).max(f64::MIN_POSITIVE);
        let pad = 0.05 * ext;
        Viewport { lo: Vec2::new(lo.x - pad, lo.y - pad), scale: CANVAS / (ext + 2.0 * pad) }
    }

    pub fn map(&self, p: Vec2) -> Vec2 {
        Vec2::new((p.x - self.lo.x) * self.scale, CANVAS - (p.y - self.lo.y) * self.scale)
    }
}

fn header(s: &mut String) {
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{c}" height="{c}" viewBox="0 0 {c} {c}">"#,
        c = CANVAS
    );
    let _ = writeln!(s, "<style>\n{STYLE}\n</style>");
}

fn line(s: &mut String, class: &str, a: Vec2, b: Vec2) {
    let _ = writeln!(
        s,
        r#"<line class="{class}" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"/>"#,
        a.x, a.y, b.x, b.y
    );
}

fn polyline(s: &mut String, class: &str, attrs: &str, pts: &[Vec2]) {
    let mut d = String::new();
    for (i, p) in pts.iter().enumerate() {
        let _ = write!(d, "{}{:.3},{:.3}", if i == 0 { "" } else { " " }, p.x, p.y);
    }
    let _ = writeln!(s, r#"<polyline class="{class}"{attrs} points="{d}"/>"#);
}

/// Rays from `o` along the four quadrant axes, long enough to leave the
/// canvas.
fn quadrant_lines(s: &mut String, vp: &Viewport, qs: &QuadrantSystem, o: Vec2, rotate: f64) {
    let len = 2.0 * CANVAS / vp.scale;
    let _ = writeln!(s, r#"<g class="quadrant-lines">"#);
    for i in 0..4 {
        let d = Vec2::from_angle(qs.beta(i) + rotate);
        line(s, "quadrant-line", vp.map(o), vp.map(o + d * len));
    }
    let _ = writeln!(s, "</g>");
}

/// The net: faces, fold edges light, cut and rim edges drawn strong, strip
/// boundaries dashed and grouped by quadrant, and the quadrant lines through
/// the image of the origin.
pub fn net_svg(pc: &PlanarCap, u: &Unfolding) -> String {
    let cap = pc.cap;
    let net = &u.net;
    let (lo, hi) = net.bbox();
    let vp = Viewport::fit(lo, hi);
    let mut s = String::new();
    header(&mut s);

    let _ = writeln!(s, r#"<g class="faces">"#);
    for (f, t) in net.faces.iter().enumerate() {
        let p = t.map(|x| vp.map(x));
        let _ = writeln!(
            s,
            r#"<polygon class="face" data-face="{f}" points="{:.3},{:.3} {:.3},{:.3} {:.3},{:.3}"/>"#,
            p[0].x, p[0].y, p[1].x, p[1].y, p[2].x, p[2].y
        );
    }
    let _ = writeln!(s, "</g>");

    // Every face draws its own copy of cut and rim edges; a fold edge is
    // drawn once, from the face where it runs a → b with a < b.
    let (mut folds, mut strong) = (String::new(), String::new());
    for (f, t) in cap.triangles().iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            let (pa, pb) = (vp.map(net.faces[f][k]), vp.map(net.faces[f][(k + 1) % 3]));
            if u.forest.is_cut(a, b) {
                line(&mut strong, "cut", pa, pb);
            } else if cap.is_rim_edge(a, b) {
                line(&mut strong, "rim", pa, pb);
            } else if a < b {
                line(&mut folds, "fold", pa, pb);
            }
        }
    }
    let _ = write!(s, "<g class=\"folds\">\n{folds}</g>\n<g class=\"edges\">\n{strong}</g>\n");

    if let Some(sp) = &u.strips {
        let images: Vec<Option<Vec<Vec2>>> =
            (0..sp.boundaries.len()).map(|k| boundary_image(pc, net, sp, k)).collect();
        for i in 0..4 {
            let mut members = BTreeSet::new();
            for st in sp.strips.iter().filter(|st| st.quadrant == Some(i)) {
                members.insert(st.right);
                members.insert(st.left);
            }
            let _ = writeln!(s, r#"<g class="strip-boundaries" data-quadrant="{i}">"#);
            for k in members {
                if let Some(img) = &images[k] {
                    let pts: Vec<Vec2> = img.iter().map(|&p| vp.map(p)).collect();
                    polyline(&mut s, "strip-boundary", &format!(r#" data-boundary="{k}""#), &pts);
                }
            }
            let _ = writeln!(s, "</g>");
        }
    }

    if let Some(qs) = &u.diagnostics.quadrants {
        let f = cap.star(qs.origin).faces[0];
        let o = net.vertex_image(cap, f, qs.origin);
        // The net is rigidly moved off the plane around the root face; turn
        // the axes with it.
        let t = cap.triangles()[net.root_face];
        let rotate = (net.faces[net.root_face][1] - net.faces[net.root_face][0]).angle()
            - (pc.point(t[1]) - pc.point(t[0])).angle();
        quadrant_lines(&mut s, &vp, qs, o, rotate);
        let c = vp.map(o);
        let _ = writeln!(s, r#"<circle class="origin" cx="{:.3}" cy="{:.3}" r="3"/>"#, c.x, c.y);
    }
    s.push_str("</svg>\n");
    s
}

/// The forest drawn over the projected cap, one `forest-edge` line per
/// forest edge.
pub fn forest_svg(pc: &PlanarCap, forest: &SpanningForest, qs: Option<&QuadrantSystem>) -> String {
    let cap = pc.cap;
    let rim = pc.rim_polygon();
    let (mut lo, mut hi) = (rim[0], rim[0]);
    for p in &pc.points {
        lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let vp = Viewport::fit(lo, hi);
    let mut s = String::new();
    header(&mut s);
    let _ = writeln!(s, r#"<g class="mesh">"#);
    for (a, b) in cap.edges() {
        if !forest.is_cut(a, b) {
            let class = if cap.is_rim_edge(a, b) { "rim" } else { "mesh-edge" };
            line(&mut s, class, vp.map(pc.point(a)), vp.map(pc.point(b)));
        }
    }
    let _ = writeln!(s, "</g>\n<g class=\"forest\">");
    for (a, b) in forest.edges() {
        line(&mut s, "forest-edge", vp.map(pc.point(a)), vp.map(pc.point(b)));
    }
    let _ = writeln!(s, "</g>");
    if let Some(qs) = qs {
        quadrant_lines(&mut s, &vp, qs, qs.origin_point, 0.0);
        let c = vp.map(qs.origin_point);
        let _ = writeln!(s, r#"<circle class="origin" cx="{:.3}" cy="{:.3}" r="3"/>"#, c.x, c.y);
    }
    s.push_str("</svg>\n");
    s
}

#[derive(Serialize)]
struct ForestPath {
    leaf: usize,
    root: usize,
    quadrant: usize,
    vertices: Vec<usize>,
    beta_deg: Option<f64>,
}

/// Parent map, roots, per-path monotonicity directions and per-tree
/// curvature.
pub fn forest_json(forest: &SpanningForest) -> Value {
    let parent: Vec<Value> = forest.parent.iter().map(|p| json!(p)).collect();
    let paths: Vec<ForestPath> = forest
        .paths
        .iter()
        .map(|p| ForestPath {
            leaf: p.leaf,
            root: *p.vertices.last().unwrap_or(&p.leaf),
            quadrant: p.quadrant,
            vertices: p.vertices.clone(),
            beta_deg: p.beta.map(f64::to_degrees),
        })
        .collect();
    let trees: Vec<Value> = forest
        .trees
        .iter()
        .map(|t| {
            json!({
                "root": t.root,
                "quadrant": t.quadrant,
                "members": t.members,
                "leaves": t.leaves,
                "omega_deg": t.omega.to_degrees(),
                "cone_deg": t.cone.to_degrees(),
            })
        })
        .collect();
    json!({
        "theta_deg": forest.theta.to_degrees(),
        "parent": parent,
        "roots": forest.roots,
        "edges": forest.edges(),
        "paths": paths,
        "trees": trees,
    })
}

/// Full diagnostics of a run: verdict, metrics, every certificate, the
/// forest and the overlap report.
pub fn unfolding_json(u: &Unfolding) -> Value {
    let v = u.verdict();
    json!({
        "schema_version": SCHEMA_VERSION,
        "verdict": v,
        "exit_code": v.exit_code(),
        "metrics": u.metrics,
        "diagnostics": u.diagnostics,
        "forest": forest_json(&u.forest),
    })
}

/// Certificates only.
pub fn certificates_json(u: &Unfolding) -> Value {
    let v = u.verdict();
    json!({
        "schema_version": SCHEMA_VERSION,
        "verdict": v,
        "exit_code": v.exit_code(),
        "all_passed": u.diagnostics.all_passed(),
        "overlap_clean": u.diagnostics.overlap.clean,
        "certificates": u.diagnostics.certificates,
    })
}

/// Wraps a pipeline error the same way, so failed runs still leave a
/// readable report.
pub fn error_json(stage: &str, message: &str) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "verdict": "error",
        "exit_code": 2,
        "stage": stage,
        "error": message,
    })
}

/// Cut edges as `(a, b)` pairs with `a < b`, for tagging mesh files.
pub fn cut_edges(cap: &ConvexCap, forest: &SpanningForest) -> Vec<(usize, usize)> {
    let mut e: Vec<(usize, usize)> =
        forest.edges().into_iter().filter(|&(a, b)| cap.adjacent(a, b)).map(|(a, b)| (a.min(b), a.max(b))).collect();
    e.sort_unstable();
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::gen::{generate_cap, GenConfig};
    use crate::geom::rad;
    use crate::mesh::project;
    use crate::pipeline::{cut_and_unfold, UnfoldOptions};

    fn count(s: &str, needle: &str) -> usize {
        s.matches(needle).count()
    }

    #[test]
    fn viewport_keeps_a_five_percent_margin() {
        let vp = Viewport::fit(Vec2::new(0.0, 0.0), Vec2::new(2.0, 1.0));
        let a = vp.map(Vec2::new(0.0, 0.0));
        let b = vp.map(Vec2::new(2.0, 1.0));
        assert!((a.x - CANVAS * 0.05 / 1.1).abs() < 1e-9);
        assert!((b.x - CANVAS * 1.05 / 1.1).abs() < 1e-9);
        assert!(b.y < a.y);
    }

    #[test]
    fn forest_overlay_draws_every_forest_edge_once() {
        let cap = generate_cap(&GenConfig::new(80, rad(15.0), 3)).unwrap();
        let u = cut_and_unfold(&cap, &UnfoldOptions::default()).unwrap();
        let pc = project(&cap).unwrap();
        let svg = forest_svg(&pc, &u.forest, u.diagnostics.quadrants.as_ref());
        assert_eq!(count(&svg, r#"class="forest-edge""#), u.forest.edges().len());
        assert_eq!(count(&svg, r#"class="quadrant-line""#), 4);
    }

    #[test]
    fn strip_boundaries_per_quadrant() {
        let cap = generate_cap(&GenConfig::new(120, rad(10.0), 11)).unwrap();
        let u = cut_and_unfold(&cap, &UnfoldOptions::default()).unwrap();
        let pc = project(&cap).unwrap();
        let svg = net_svg(&pc, &u);
        let sp = u.strips.as_ref().unwrap();
        for (i, group) in svg.split(r#"<g class="strip-boundaries" data-quadrant=""#).skip(1).enumerate() {
            let body = &group[..group.find("</g>").unwrap()];
            let strips = sp.strips.iter().filter(|st| st.quadrant == Some(i)).count();
            assert_eq!(count(body, "strip-boundary"), strips + 1, "quadrant {i}");
        }
        assert_eq!(count(&svg, r#"class="face""#), cap.num_faces());
        assert_eq!(count(&svg, r#"class="cut""#), 2 * u.forest.edges().len());
    }

    #[test]
    fn reports_are_deterministic_and_versioned() {
        let cap = fixtures::icosahedron_cap();
        let a = cut_and_unfold(&cap, &UnfoldOptions::default()).unwrap();
        let b = cut_and_unfold(&cap, &UnfoldOptions::default()).unwrap();
        let (ja, jb) = (unfolding_json(&a).to_string(), unfolding_json(&b).to_string());
        assert_eq!(ja, jb);
        let v: Value = serde_json::from_str(&ja).unwrap();
        assert_eq!(v["schema_version"], SCHEMA_VERSION);
        assert_eq!(v["exit_code"], 1);
        let pc = project(&cap).unwrap();
        assert_eq!(net_svg(&pc, &a), net_svg(&pc, &b));
    }
}
