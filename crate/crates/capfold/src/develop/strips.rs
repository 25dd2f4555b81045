//! The waterfall partition of the projected cap into angle-monotone strips
//! around the quadrant origin.
//!
//! Every forest leaf gets a boundary path from the origin `q`: a radial
//! segment out to a small circle, then a copy of the previous boundary
//! shifted by `ε` toward the counterclockwise side, then a drop up to the
//! leaf, then the leaf's forest path to the rim. The shift is taken along
//! `e₂ − e₁`, where `e₁`, `e₂` point along the quadrant's two axes; it keeps
//! every direction of the copied path inside the quadrant wedge and pushes
//! copied rim pieces into the cap. The axes are boundaries too, so the
//! strips tile the cap counterclockwise starting right after `q`'s own path.

use serde::Serialize;

use super::DevelopError;
use crate::forest::{QuadrantSystem, SpanningForest};
use crate::geom::{ccw_from, eps_geom, point_in_polygon, point_segment_dist, segment_params, segments_cross, Vec2};
use crate::mesh::PlanarCap;
use crate::monotone::Chain2D;
use crate::surface::Waypoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    /// The ray at `βᵢ`, `i ∈ 0..=4`; `β₄` closes the last quadrant.
    Axis(usize),
    /// The path ending with this leaf's forest path.
    Leaf(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Boundary {
    pub kind: BoundaryKind,
    /// Quadrant of the leaf, or the quadrant an axis opens (`None` for `β₄`).
    pub quadrant: Option<usize>,
    /// Planar polyline from `q` to the rim.
    pub points: Vec<Vec2>,
    /// Mesh vertex under each point, when there is one.
    pub pinned: Vec<Option<usize>>,
    /// Index of the leaf in `points`; `points.len()` for axes.
    pub forest_start: usize,
    /// The leaf's drop missed both the previous boundary and the rim and a
    /// straight segment from `q` was used instead.
    pub fallback: bool,
}

impl Boundary {
    pub fn chain(&self) -> Chain2D {
        Chain2D::new(self.points.clone())
    }

    pub fn waypoints(&self) -> Vec<Waypoint> {
        self.points
            .iter()
            .zip(&self.pinned)
            .map(|(&p, &v)| Waypoint { p, vertex: v })
            .collect()
    }

    pub fn end(&self) -> Vec2 {
        *self.points.last().expect("boundary has points")
    }

    /// Forest vertices from the leaf to the root.
    pub fn forest_vertices(&self) -> Vec<usize> {
        self.pinned[self.forest_start.min(self.pinned.len())..].iter().flatten().copied().collect()
    }
}

/// The region between two consecutive boundaries.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Strip {
    /// Clockwise boundary (the strip lies on its left).
    pub right: usize,
    /// Counterclockwise boundary (the strip lies on its right).
    pub left: usize,
    /// `None` for the strip filling the quadrant gap.
    pub quadrant: Option<usize>,
    pub faces: Vec<usize>,
    /// Forest vertex where the two boundaries join; beyond it the strip is a
    /// zero-width tail.
    pub merge: Option<usize>,
    /// Area of the planar region between the boundaries.
    pub region_area: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StripPartition {
    /// Counterclockwise from `q`'s own path, which is boundary 0.
    pub boundaries: Vec<Boundary>,
    /// Strip `k` lies between boundaries `k` and `k + 1` (cyclically).
    pub strips: Vec<Strip>,
    pub strip_of_face: Vec<usize>,
    pub radius: f64,
    pub epsilon: f64,
}

impl StripPartition {
    /// Consecutive boundary pairs that properly cross.
    pub fn crossings(&self, tol: f64) -> Vec<(usize, usize)> {
        let k = self.boundaries.len();
        let mut out = Vec::new();
        for i in 0..k {
            let j = (i + 1) % k;
            if i == j {
                continue;
            }
            if chains_cross(&self.boundaries[i].points, &self.boundaries[j].points, tol) {
                out.push((i, j));
            }
        }
        out
    }

    /// `|Σ region areas − area(C)| / area(C)`.
    pub fn area_residual(&self, pc: &PlanarCap) -> f64 {
        let total: f64 = (0..pc.cap.num_faces()).map(|f| pc.area(f)).sum();
        let sum: f64 = self.strips.iter().map(|s| s.region_area).sum();
        (sum - total).abs() / total
    }

    /// Boundary points up to and including the merge vertex of strip `s`,
    /// as `(right, left)`.
    pub fn strip_body(&self, s: usize) -> (Vec<usize>, Vec<usize>) {
        let st = &self.strips[s];
        let cut = |b: &Boundary| -> Vec<usize> {
            let n = b.points.len();
            let end = match st.merge {
                Some(m) => (b.forest_start..n).find(|&i| b.pinned[i] == Some(m)).unwrap_or(n - 1),
                None => n - 1,
            };
            (0..=end).collect()
        };
        (cut(&self.boundaries[st.right]), cut(&self.boundaries[st.left]))
    }
}

/// Whether two polylines properly cross somewhere.
pub fn chains_cross(a: &[Vec2], b: &[Vec2], tol: f64) -> bool {
    let bb = |p: &[Vec2]| {
        p.windows(2)
            .map(|w| (w[0].x.min(w[1].x), w[0].x.max(w[1].x), w[0].y.min(w[1].y), w[0].y.max(w[1].y)))
            .collect::<Vec<_>>()
    };
    let (ba, bbx) = (bb(a), bb(b));
    for (i, wa) in a.windows(2).enumerate() {
        for (j, wb) in b.windows(2).enumerate() {
            let (x, y) = (ba[i], bbx[j]);
            if x.1 < y.0 || y.1 < x.0 || x.3 < y.2 || y.3 < x.2 {
                continue;
            }
            if segments_cross(wa[0], wa[1], wb[0], wb[1], tol) {
                return true;
            }
        }
    }
    false
}

/// First point where the segment `a → b` meets the rim polygon: the point,
/// the rim edge index and the parameter along the segment.
fn rim_hit(rim: &[Vec2], a: Vec2, b: Vec2) -> Option<(Vec2, usize, f64)> {
    let m = rim.len();
    let mut best: Option<(Vec2, usize, f64)> = None;
    for e in 0..m {
        let (c, d) = (rim[e], rim[(e + 1) % m]);
        if let Some((s, t)) = segment_params(a, b, c, d) {
            if (1e-12..=1.0).contains(&s) && (-1e-12..=1.0 + 1e-12).contains(&t) && best.is_none_or(|x| s < x.2) {
                best = Some((a.lerp(b, s), e, s));
            }
        }
    }
    best
}

/// Position along the rim: vertex index plus fraction along the next edge.
fn rim_param(rim: &[Vec2], p: Vec2) -> f64 {
    let m = rim.len();
    let mut best = (f64::INFINITY, 0.0);
    for e in 0..m {
        let (c, d) = (rim[e], rim[(e + 1) % m]);
        let dist = point_segment_dist(p, c, d);
        if dist < best.0 {
            let t = ((p - c).dot(d - c) / (d - c).norm2()).clamp(0.0, 1.0);
            best = (dist, e as f64 + t);
        }
    }
    best.1 % m as f64
}

/// Rim vertices strictly between two rim positions, walking
/// counterclockwise.
fn rim_walk(rim: &[Vec2], from: f64, to: f64) -> Vec<Vec2> {
    let m = rim.len() as f64;
    let span = (to - from).rem_euclid(m);
    let mut out = Vec::new();
    let mut k = from.floor() + 1.0;
    while k - from < span - 1e-12 {
        if k - from > 1e-12 {
            out.push(rim[(k.rem_euclid(m)) as usize]);
        }
        k += 1.0;
    }
    out
}

fn polygon_area(p: &[Vec2]) -> f64 {
    let n = p.len();
    (0..n).map(|i| p[i].cross(p[(i + 1) % n])).sum::<f64>() / 2.0
}

struct Ctx<'a> {
    pc: &'a PlanarCap<'a>,
    qs: &'a QuadrantSystem,
    rim: Vec<Vec2>,
    rim_ids: Vec<usize>,
    radius: f64,
    epsilon: f64,
}

impl Ctx<'_> {
    fn axis(&self, i: usize) -> Result<Boundary, DevelopError> {
        let o = self.qs.origin_point;
        let far = o + Vec2::from_angle(self.qs.beta(i)) * (4.0 * self.pc.cap.scale() + 1.0);
        let (x, _, _) = rim_hit(&self.rim, o, far)
            .ok_or_else(|| DevelopError::Degenerate(format!("axis {i} does not reach the rim")))?;
        Ok(Boundary {
            kind: BoundaryKind::Axis(i),
            quadrant: (i < 4).then_some(i),
            points: vec![o, x],
            pinned: vec![Some(self.qs.origin), None],
            forest_start: 2,
            fallback: false,
        })
    }

    fn forest_boundary(&self, leaf: usize, quadrant: usize, path: &[usize]) -> Boundary {
        Boundary {
            kind: BoundaryKind::Leaf(leaf),
            quadrant: Some(quadrant),
            points: path.iter().map(|&v| self.pc.point(v)).collect(),
            pinned: path.iter().map(|&v| Some(v)).collect(),
            forest_start: 0,
            fallback: false,
        }
    }

    /// The lower guide for a drop: the previous boundary shifted by `d`,
    /// starting where it crosses the circle, continued along the rim once it
    /// leaves the cap.
    fn guide(&self, prev: &Boundary, d: Vec2, quadrant: usize) -> Result<Vec<(Vec2, Option<usize>)>, DevelopError> {
        let o = self.qs.origin_point;
        let r = self.radius;
        let g: Vec<Vec2> = prev.points.iter().map(|&p| p + d).collect();
        if g[0].dist(o) >= r {
            return Err(DevelopError::Degenerate("shift exceeds the circle radius".into()));
        }
        let s = (0..g.len() - 1)
            .find(|&s| g[s].dist(o) < r && g[s + 1].dist(o) >= r)
            .ok_or_else(|| DevelopError::Degenerate("shifted boundary never leaves the circle".into()))?;
        // Circle crossing on segment s.
        let (a, b) = (g[s], g[s + 1]);
        let (f, e) = (a - o, b - a);
        let (qa, qb, qc) = (e.norm2(), 2.0 * f.dot(e), f.norm2() - r * r);
        let t = (-qb + (qb * qb - 4.0 * qa * qc).max(0.0).sqrt()) / (2.0 * qa);
        let c = a.lerp(b, t.clamp(0.0, 1.0));
        let mut out = vec![(c, None)];
        let mut exit = None;
        let mut cur = c;
        for &next in &g[s + 1..] {
            if let Some((x, edge, _)) = rim_hit(&self.rim, cur, next) {
                exit = Some((x, edge));
                break;
            }
            out.push((next, None));
            cur = next;
        }
        if exit.is_none() {
            // Still inside: run on in the last direction to the rim.
            let n = out.len();
            let dir = if n >= 2 { out[n - 1].0 - out[n - 2].0 } else { Vec2::from_angle(self.qs.beta(quadrant)) };
            let far = cur + dir.normalized() * (4.0 * self.pc.cap.scale() + 1.0);
            exit = rim_hit(&self.rim, cur, far).map(|(x, e, _)| (x, e));
        }
        let Some((x, edge)) = exit else {
            return Err(DevelopError::Degenerate("guide does not reach the rim".into()));
        };
        out.push((x, None));
        // Counterclockwise along the rim while inside the quadrant.
        let m = self.rim.len();
        let width = self.qs.theta;
        for k in 1..=m {
            let idx = (edge + k) % m;
            let p = self.rim[idx];
            let rel = ccw_from(self.qs.beta(quadrant), (p - o).angle());
            if rel > width + 1e-9 {
                break;
            }
            out.push((p, Some(self.rim_ids[idx])));
        }
        Ok(out)
    }

    fn waterfall(&self, prev: &Boundary, leaf: usize, quadrant: usize, path: &[usize]) -> Result<Boundary, DevelopError> {
        let o = self.qs.origin_point;
        let e1 = Vec2::from_angle(self.qs.beta(quadrant));
        let e2 = Vec2::from_angle(self.qs.beta(quadrant + 1));
        let d = (e2 - e1) * self.epsilon;
        let guide = self.guide(prev, d, quadrant)?;
        let l = self.pc.point(leaf);
        let reach = 4.0 * self.pc.cap.scale() + 1.0;
        let drop_end = l - e2 * reach;
        // Nearest hit of the drop ray with the guide.
        let mut hit: Option<(f64, usize, Vec2)> = None;
        for (i, w) in guide.windows(2).enumerate() {
            if let Some((s, t)) = segment_params(l, drop_end, w[0].0, w[1].0) {
                if s > 0.0 && (-1e-12..=1.0 + 1e-12).contains(&t) && hit.is_none_or(|h| s < h.0) {
                    hit = Some((s, i, l.lerp(drop_end, s)));
                }
            }
        }
        let mut b = Boundary {
            kind: BoundaryKind::Leaf(leaf),
            quadrant: Some(quadrant),
            points: vec![o],
            pinned: vec![Some(self.qs.origin)],
            forest_start: 0,
            fallback: false,
        };
        match hit {
            Some((_, i, h)) => {
                for &(p, v) in &guide[..=i] {
                    b.points.push(p);
                    b.pinned.push(v);
                }
                if h.dist(*b.points.last().unwrap()) > eps_geom() * self.pc.cap.scale() {
                    b.points.push(h);
                    b.pinned.push(None);
                }
            }
            None => b.fallback = true,
        }
        b.forest_start = b.points.len();
        for &v in path {
            b.points.push(self.pc.point(v));
            b.pinned.push(Some(v));
        }
        Ok(b)
    }
}

/// Smallest distance from a vertex to an edge not incident to it: the
/// smallest triangle altitude.
pub fn min_vertex_edge_gap(pc: &PlanarCap) -> f64 {
    let mut best = f64::INFINITY;
    for t in pc.cap.triangles() {
        for k in 0..3 {
            let p = pc.point(t[k]);
            best = best.min(point_segment_dist(p, pc.point(t[(k + 1) % 3]), pc.point(t[(k + 2) % 3])));
        }
    }
    best
}

/// Builds the boundaries, strips and face assignment.
pub fn waterfall_strips(
    pc: &PlanarCap,
    forest: &SpanningForest,
    qs: &QuadrantSystem,
) -> Result<StripPartition, DevelopError> {
    let o = qs.origin_point;
    let q = qs.origin;
    let rim = pc.rim_polygon();
    let rim_ids = pc.cap.rim().to_vec();

    // Circle radius: well inside the cap, clear of all other vertices and of
    // the axes as seen from every leaf.
    let ray_dist = |p: Vec2, angle: f64| {
        let u = Vec2::from_angle(angle);
        let w = p - o;
        if w.dot(u) <= 0.0 {
            w.norm()
        } else {
            w.cross(u).abs()
        }
    };
    let mut r = pc.dist_to_rim(o).0;
    for v in 0..pc.points.len() {
        if v != q {
            r = r.min(pc.point(v).dist(o));
        }
    }
    for lp in &forest.paths {
        if lp.leaf != q {
            let p = pc.point(lp.leaf);
            r = r.min(ray_dist(p, qs.beta(lp.quadrant))).min(ray_dist(p, qs.beta(lp.quadrant + 1)));
        }
    }
    let radius = 0.5 * r;
    if radius <= eps_geom() * pc.cap.scale() {
        return Err(DevelopError::Degenerate(format!("circle radius {radius:.3e} (a leaf lies on an axis)")));
    }
    let delta = min_vertex_edge_gap(pc);
    let epsilon = delta.min(radius) / (forest.paths.len() as f64 + 2.0) / 2.0;
    let ctx = Ctx { pc, qs, rim: rim.clone(), rim_ids, radius, epsilon };

    // Per quadrant: axis, then one boundary per leaf.
    let mut per_q: Vec<Vec<Boundary>> = Vec::with_capacity(4);
    for i in 0..4 {
        let mut seq = vec![ctx.axis(i)?];
        for lp in forest.leaves_in_quadrant(i) {
            let b = if lp.leaf == q {
                ctx.forest_boundary(q, i, &lp.vertices)
            } else {
                ctx.waterfall(seq.last().unwrap(), lp.leaf, i, &lp.vertices)?
            };
            seq.push(b);
        }
        per_q.push(seq);
    }
    let axis4 = ctx.axis(4)?;

    // Global counterclockwise order starting at q's own path.
    let q0 = &per_q[0];
    let qpos = q0.iter().position(|b| b.kind == BoundaryKind::Leaf(q));
    let mut boundaries = Vec::new();
    match qpos {
        Some(k) => {
            boundaries.extend(q0[k..].iter().cloned());
            for seq in &per_q[1..] {
                boundaries.extend(seq.iter().cloned());
            }
            boundaries.push(axis4);
            boundaries.extend(q0[..k].iter().cloned());
        }
        None => {
            for seq in &per_q {
                boundaries.extend(seq.iter().cloned());
            }
            boundaries.push(axis4);
        }
    }

    let nb = boundaries.len();
    let ends: Vec<f64> = boundaries.iter().map(|b| rim_param(&rim, b.end())).collect();
    let region = |i: usize, j: usize| -> Vec<Vec2> {
        let mut poly = boundaries[i].points.clone();
        poly.extend(rim_walk(&rim, ends[i], ends[j]));
        poly.extend(boundaries[j].points.iter().rev());
        poly
    };
    let mut strips = Vec::with_capacity(nb);
    for i in 0..nb {
        let j = (i + 1) % nb;
        let (bi, bj) = (&boundaries[i], &boundaries[j]);
        let merge = common_suffix_start(&bi.forest_vertices(), &bj.forest_vertices());
        let quadrant = match bi.kind {
            BoundaryKind::Axis(4) => None,
            _ => bi.quadrant,
        };
        strips.push(Strip { right: i, left: j, quadrant, faces: Vec::new(), merge, region_area: polygon_area(&region(i, j)) });
    }

    // Faces by centroid: the cumulative regions from boundary 0 grow
    // monotonically, so binary search for the first one holding it.
    let cumulative = |k: usize| -> Vec<Vec2> {
        let mut poly = boundaries[0].points.clone();
        if k < nb {
            poly.extend(rim_walk(&rim, ends[0], ends[k]));
            poly.extend(boundaries[k].points.iter().rev());
        } else {
            poly.extend(rim_walk(&rim, ends[0], ends[0] + rim.len() as f64 - 1e-9));
            poly.extend(boundaries[0].points.iter().rev());
        }
        poly
    };
    let polys: Vec<Vec<Vec2>> = (1..=nb).map(cumulative).collect();
    let mut strip_of_face = vec![0; pc.cap.num_faces()];
    for f in 0..pc.cap.num_faces() {
        let c = pc.centroid(f);
        // Smallest k in 1..=nb with c inside polys[k-1]; the last is all of C.
        let (mut lo, mut hi) = (1usize, nb);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if point_in_polygon(c, &polys[mid - 1]) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        strip_of_face[f] = lo - 1;
        strips[lo - 1].faces.push(f);
    }

    Ok(StripPartition { boundaries, strips, strip_of_face, radius, epsilon })
}

/// First vertex of the longest common suffix.
fn common_suffix_start(a: &[usize], b: &[usize]) -> Option<usize> {
    let mut k = 0;
    while k < a.len() && k < b.len() && a[a.len() - 1 - k] == b[b.len() - 1 - k] {
        k += 1;
    }
    (k > 0).then(|| a[a.len() - k])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::forest::{build_forest, choose_origin, OriginMode};
    use crate::gen::{generate_cap, GenConfig};
    use crate::geom::rad;
    use crate::mesh::project;
    use crate::monotone::verify_angle_monotone;

    #[test]
    fn rim_walk_counts() {
        let rim: Vec<Vec2> = (0..6).map(|k| Vec2::from_angle(k as f64)).collect();
        assert_eq!(rim_walk(&rim, 0.5, 2.5).len(), 2);
        assert_eq!(rim_walk(&rim, 5.5, 0.5).len(), 1);
        assert_eq!(rim_walk(&rim, 1.0, 2.0).len(), 0);
        assert_eq!(rim_walk(&rim, 1.0, 1.0).len(), 0);
    }

    #[test]
    fn pyramid_strips() {
        let cap = fixtures::icosahedron_cap();
        let pc = project(&cap).unwrap();
        let qs = choose_origin(&pc, OriginMode::ClosestToBoundary).unwrap();
        let f = build_forest(&pc, &qs).unwrap();
        let sp = waterfall_strips(&pc, &f, &qs).unwrap();
        // q's path plus five axes; one strip per quadrant side plus the gap.
        assert_eq!(sp.boundaries.len(), 6);
        assert_eq!(sp.strips.len(), 6);
        assert!(sp.area_residual(&pc) < 1e-12);
        assert!(sp.crossings(1e-12).is_empty());
        let assigned: usize = sp.strips.iter().map(|s| s.faces.len()).sum();
        assert_eq!(assigned, 5);
    }

    #[test]
    fn generated_strips_tile_and_do_not_cross() {
        for seed in 0..3 {
            let cap = generate_cap(&GenConfig::new(120, rad(15.0), seed)).unwrap();
            let pc = project(&cap).unwrap();
            let qs = choose_origin(&pc, OriginMode::ClosestToBoundary).unwrap();
            let f = build_forest(&pc, &qs).unwrap();
            let sp = waterfall_strips(&pc, &f, &qs).unwrap();
            assert_eq!(sp.strips.len(), f.paths.len() + 5);
            assert!(sp.area_residual(&pc) < 1e-9, "{}", sp.area_residual(&pc));
            assert!(sp.crossings(1e-12).is_empty(), "{:?}", sp.crossings(1e-12));
            for s in &sp.strips {
                assert!(s.region_area > -1e-12);
            }
            for b in &sp.boundaries {
                assert!(verify_angle_monotone(&b.chain(), qs.theta).is_ok(), "{:?}", b.kind);
            }
        }
    }
}
