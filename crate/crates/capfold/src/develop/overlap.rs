//! Pairwise overlap of placed triangles.

use serde::Serialize;

use crate::geom::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OverlapPair {
    pub a: usize,
    pub b: usize,
    /// Smallest separating-axis overlap of the two interiors.
    pub depth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapReport {
    /// Sorted by `(a, b)`.
    pub pairs: Vec<OverlapPair>,
    pub clean: bool,
    pub tolerance: f64,
    /// Pairs whose bounding boxes met and were tested exactly.
    pub tested: usize,
}

impl OverlapReport {
    fn new(mut pairs: Vec<OverlapPair>, tolerance: f64, tested: usize) -> Self {
        pairs.sort_by_key(|x| (x.a, x.b));
        OverlapReport { clean: pairs.is_empty(), pairs, tolerance, tested }
    }

    pub fn max_depth(&self) -> f64 {
        self.pairs.iter().map(|p| p.depth).fold(0.0, f64::max)
    }
}

fn project_onto(t: &[Vec2; 3], axis: Vec2) -> (f64, f64) {
    let d = [axis.dot(t[0]), axis.dot(t[1]), axis.dot(t[2])];
    (d[0].min(d[1]).min(d[2]), d[0].max(d[1]).max(d[2]))
}

/// Penetration depth of two triangles by separating axes: the smallest
/// projection overlap over the six edge normals. Non-positive values mean
/// the interiors are disjoint (touching counts as disjoint).
pub fn triangle_penetration(a: &[Vec2; 3], b: &[Vec2; 3]) -> f64 {
    let mut depth = f64::INFINITY;
    for t in [a, b] {
        for k in 0..3 {
            let e = t[(k + 1) % 3] - t[k];
            let len = e.norm();
            if len == 0.0 {
                continue;
            }
            let n = e.perp() / len;
            let (a0, a1) = project_onto(a, n);
            let (b0, b1) = project_onto(b, n);
            depth = depth.min(a1.min(b1) - a0.max(b0));
            if depth <= 0.0 {
                return depth;
            }
        }
    }
    depth
}

/// All overlapping pairs, with a sweep over x-extents to skip pairs whose
/// bounding boxes are apart. Same result as [`check_overlap_exhaustive`].
pub fn check_overlap(tris: &[[Vec2; 3]], tol: f64) -> OverlapReport {
    let bb: Vec<(Vec2, Vec2)> = tris
        .iter()
        .map(|t| {
            let lo = Vec2::new(t[0].x.min(t[1].x).min(t[2].x), t[0].y.min(t[1].y).min(t[2].y));
            let hi = Vec2::new(t[0].x.max(t[1].x).max(t[2].x), t[0].y.max(t[1].y).max(t[2].y));
            (lo, hi)
        })
        .collect();
    let mut order: Vec<usize> = (0..tris.len()).collect();
    order.sort_by(|&i, &j| bb[i].0.x.total_cmp(&bb[j].0.x).then(i.cmp(&j)));
    let mut active: Vec<usize> = Vec::new();
    let mut pairs = Vec::new();
    let mut tested = 0;
    for &i in &order {
        let (lo, hi) = bb[i];
        active.retain(|&j| bb[j].1.x > lo.x);
        for &j in &active {
            if bb[j].0.y >= hi.y || lo.y >= bb[j].1.y {
                continue;
            }
            tested += 1;
            let depth = triangle_penetration(&tris[i], &tris[j]);
            if depth > tol {
                pairs.push(OverlapPair { a: i.min(j), b: i.max(j), depth });
            }
        }
        active.push(i);
    }
    OverlapReport::new(pairs, tol, tested)
}

/// Every pair tested directly; quadratic.
pub fn check_overlap_exhaustive(tris: &[[Vec2; 3]], tol: f64) -> OverlapReport {
    let mut pairs = Vec::new();
    let mut tested = 0;
    for i in 0..tris.len() {
        for j in i + 1..tris.len() {
            tested += 1;
            let depth = triangle_penetration(&tris[i], &tris[j]);
            if depth > tol {
                pairs.push(OverlapPair { a: i, b: j, depth });
            }
        }
    }
    OverlapReport::new(pairs, tol, tested)
}

/// Coarse second opinion: samples a `grid × grid` lattice over the bounding
/// box and reports pairs of triangles that both contain some sample point
/// at least `margin` inside their edges.
pub fn raster_overlap(tris: &[[Vec2; 3]], grid: usize, margin: f64) -> Vec<(usize, usize)> {
    if tris.is_empty() || grid == 0 {
        return Vec::new();
    }
    let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in tris.iter().flatten() {
        lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let step = Vec2::new((hi.x - lo.x) / grid as f64, (hi.y - lo.y) / grid as f64);
    let inside = |t: &[Vec2; 3], p: Vec2| {
        (0..3).all(|k| {
            let e = t[(k + 1) % 3] - t[k];
            e.cross(p - t[k]) / e.norm() > margin
        })
    };
    let mut cells: Vec<Vec<usize>> = vec![Vec::new(); grid * grid];
    for (i, t) in tris.iter().enumerate() {
        let tl = Vec2::new(t[0].x.min(t[1].x).min(t[2].x), t[0].y.min(t[1].y).min(t[2].y));
        let th = Vec2::new(t[0].x.max(t[1].x).max(t[2].x), t[0].y.max(t[1].y).max(t[2].y));
        let cx = |x: f64| (((x - lo.x) / step.x - 0.5).floor().max(0.0) as usize).min(grid - 1);
        let cy = |y: f64| (((y - lo.y) / step.y - 0.5).floor().max(0.0) as usize).min(grid - 1);
        for gy in cy(tl.y)..=cy(th.y) {
            for gx in cx(tl.x)..=cx(th.x) {
                let p = Vec2::new(lo.x + (gx as f64 + 0.5) * step.x, lo.y + (gy as f64 + 0.5) * step.y);
                if inside(t, p) {
                    cells[gy * grid + gx].push(i);
                }
            }
        }
    }
    let mut out: Vec<(usize, usize)> = Vec::new();
    for c in &cells {
        for x in 0..c.len() {
            for y in x + 1..c.len() {
                out.push((c[x].min(c[y]), c[x].max(c[y])));
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}
