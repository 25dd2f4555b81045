//! Quadrant origin selection and the boundary-rooted spanning forest of
//! θ-monotone edge paths on the projected cap.
//!
//! Four quadrants of width θ (the largest projected face angle) fan out
//! counterclockwise from the origin `q`, leaving a gap of `2π − 4θ`. Every
//! interior vertex grows a path whose edges all point into its quadrant's
//! wedge; since consecutive neighbors of an interior vertex are at most θ
//! apart, such an edge always exists.

use std::cmp::Ordering;
use std::f64::consts::{FRAC_PI_2, TAU};

use serde::{Deserialize, Serialize};

use crate::geom::{ccw_from, eps_geom, wrap_pi, Vec2, Wedge};
use crate::mesh::PlanarCap;
use crate::monotone::{cone_of_all, verify_angle_monotone, Chain2D};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OriginMode {
    #[default]
    ClosestToBoundary,
    Central,
}

#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum ForestError {
    #[error("the cap has no interior vertices; the forest is empty")]
    NoInterior,
    #[error("largest projected angle {0:.4}° exceeds 90°; four quadrants do not fit")]
    ObtuseProjection(f64),
    #[error("could not rotate the quadrant axes off every vertex")]
    AxisCollision,
    #[error("interior vertex {0} lies in the quadrant gap")]
    GapNotEmpty(usize),
    #[error("no edge from vertex {vertex} points into quadrant {quadrant}; neighbor directions (deg): {star:?}")]
    NoAdmissibleEdge {
        vertex: usize,
        quadrant: usize,
        star: Vec<(usize, f64)>,
    },
    #[error("path from vertex {0} ran into a vertex of another quadrant")]
    CrossQuadrant(usize),
}

/// Quadrants `Q₀ … Q₃` around the origin: `Qᵢ` spans angles
/// `[βᵢ, βᵢ + θ)` with `βᵢ = axis_rotation + iθ`; the gap fills the rest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadrantSystem {
    pub origin: usize,
    pub origin_point: Vec2,
    pub axis_rotation: f64,
    pub theta: f64,
    pub gap_direction: f64,
    pub gap_angle: f64,
    /// Central mode found no empty gap and fell back to the closest vertex.
    pub fallback: bool,
}

impl QuadrantSystem {
    /// Start angle of quadrant `i` (`i = 4` is the far side of `Q₃`).
    pub fn beta(&self, i: usize) -> f64 {
        self.axis_rotation + i as f64 * self.theta
    }

    pub fn wedge(&self, i: usize) -> Wedge {
        Wedge { apex: self.origin_point, beta: self.beta(i), width: self.theta }
    }

    /// Quadrant holding direction angle `a` from the origin, `None` in the gap.
    pub fn quadrant_of_angle(&self, a: f64) -> Option<usize> {
        let rel = ccw_from(self.axis_rotation, a);
        let i = (rel / self.theta).floor() as usize;
        (i < 4).then_some(i)
    }

    pub fn quadrant_of(&self, p: Vec2) -> Option<usize> {
        self.quadrant_of_angle((p - self.origin_point).angle())
    }

    /// Whether direction angle `a` lies strictly inside the gap.
    pub fn in_gap(&self, a: f64) -> bool {
        let rel = ccw_from(self.beta(4), a);
        rel > 0.0 && rel < self.gap_angle
    }
}

/// Largest planar face angle.
pub fn quadrant_width(pc: &PlanarCap) -> Result<f64, ForestError> {
    let theta = pc.max_angle();
    if theta > FRAC_PI_2 + eps_geom() {
        return Err(ForestError::ObtuseProjection(theta.to_degrees()));
    }
    Ok(theta.min(FRAC_PI_2))
}

/// Picks the origin and orients the quadrants.
pub fn choose_origin(pc: &PlanarCap, mode: OriginMode) -> Result<QuadrantSystem, ForestError> {
    let interior: Vec<usize> = pc.cap.interior_vertices().collect();
    if interior.is_empty() {
        return Err(ForestError::NoInterior);
    }
    let theta = quadrant_width(pc)?;
    let gap = (TAU - 4.0 * theta).max(0.0);
    let dist = |v: usize| pc.dist_to_rim(pc.point(v));
    let closest = || {
        let q = *interior
            .iter()
            .min_by(|&&a, &&b| dist(a).0.total_cmp(&dist(b).0).then(a.cmp(&b)))
            .unwrap();
        let (_, foot) = dist(q);
        (q, (foot - pc.point(q)).angle())
    };
    let (q, gamma, fallback) = match mode {
        OriginMode::ClosestToBoundary => {
            let (q, g) = closest();
            (q, g, false)
        }
        OriginMode::Central => {
            let q = *interior
                .iter()
                .max_by(|&&a, &&b| dist(a).0.total_cmp(&dist(b).0).then(b.cmp(&a)))
                .unwrap();
            match emptiest_gap(pc, q, gap, &interior) {
                Some(g) => (q, g, false),
                None => {
                    let (q, g) = closest();
                    (q, g, true)
                }
            }
        }
    };
    let mut qs = QuadrantSystem {
        origin: q,
        origin_point: pc.point(q),
        axis_rotation: gamma + gap / 2.0,
        theta,
        gap_direction: gamma,
        gap_angle: gap,
        fallback,
    };
    // Nudge the axes off every vertex.
    const STEP: f64 = 1e-6;
    let mut tries = 0;
    while let Some(_v) = vertex_on_axis(pc, &qs) {
        tries += 1;
        if tries > 200 {
            return Err(ForestError::AxisCollision);
        }
        let s = if tries % 2 == 1 { tries as f64 } else { -(tries as f64) } * STEP;
        qs.axis_rotation = gamma + gap / 2.0 + s;
        qs.gap_direction = gamma + s;
    }
    qs.axis_rotation = wrap_pi(qs.axis_rotation);
    qs.gap_direction = wrap_pi(qs.gap_direction);
    if let Some(v) = gap_intruder(pc, &qs) {
        return Err(ForestError::GapNotEmpty(v));
    }
    Ok(qs)
}

/// Gap direction with the most angular clearance from every interior vertex
/// seen from `q`, if any leaves the gap empty.
fn emptiest_gap(pc: &PlanarCap, q: usize, gap: f64, interior: &[usize]) -> Option<f64> {
    let mut dirs: Vec<f64> = interior
        .iter()
        .filter(|&&v| v != q)
        .map(|&v| (pc.point(v) - pc.point(q)).angle().rem_euclid(TAU))
        .collect();
    if dirs.is_empty() {
        return Some(0.0);
    }
    dirs.sort_by(f64::total_cmp);
    // The widest empty angular interval between consecutive directions.
    let m = dirs.len();
    let (mut best, mut at) = (-1.0, 0.0);
    for k in 0..m {
        let next = if k + 1 < m { dirs[k + 1] } else { dirs[0] + TAU };
        if next - dirs[k] > best {
            best = next - dirs[k];
            at = dirs[k] + best / 2.0;
        }
    }
    (best > gap).then_some(at)
}

fn vertex_on_axis(pc: &PlanarCap, qs: &QuadrantSystem) -> Option<usize> {
    let tol = eps_geom() * pc.cap.scale();
    (0..pc.points.len()).filter(|&v| v != qs.origin).find(|&v| {
        let d = pc.point(v) - qs.origin_point;
        let a = d.angle();
        (0..=4).any(|i| {
            let off = wrap_pi(a - qs.beta(i));
            off.abs() < FRAC_PI_2 && (off.sin() * d.norm()).abs() <= tol
        })
    })
}

/// An interior vertex strictly inside the gap, if any.
pub fn gap_intruder(pc: &PlanarCap, qs: &QuadrantSystem) -> Option<usize> {
    pc.cap
        .interior_vertices()
        .filter(|&v| v != qs.origin)
        .find(|&v| qs.in_gap((pc.point(v) - qs.origin_point).angle()))
}

/// Grows a path from `v` along edges pointing into `wedge`, stopping at the
/// rim or at a vertex already in the forest. Returns the vertices visited,
/// starting with `v`.
pub fn grow_path(
    pc: &PlanarCap,
    in_forest: &[bool],
    v: usize,
    wedge: &Wedge,
    quadrant: usize,
    origin: usize,
) -> Result<Vec<usize>, ForestError> {
    let mut path = vec![v];
    let mut u = v;
    let bis = wedge.bisector();
    loop {
        if pc.cap.is_rim(u) || (u != v && in_forest[u]) {
            return Ok(path);
        }
        if path.len() > pc.points.len() {
            unreachable!("a wedge-monotone path cannot revisit a vertex");
        }
        let star = &pc.cap.star(u).nbrs;
        let next = star
            .iter()
            .copied()
            .filter(|&w| w != origin)
            .filter_map(|w| {
                let a = (pc.point(w) - pc.point(u)).angle();
                wedge.contains_angle(a).then_some((wrap_pi(a - bis).abs(), w))
            })
            .min_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        match next {
            Some((_, w)) => {
                path.push(w);
                u = w;
            }
            None => {
                let star = star
                    .iter()
                    .map(|&w| (w, (pc.point(w) - pc.point(u)).angle().to_degrees()))
                    .collect();
                return Err(ForestError::NoAdmissibleEdge { vertex: u, quadrant, star });
            }
        }
    }
}

/// A leaf-to-root path with its angle-monotone certificate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeafPath {
    pub leaf: usize,
    pub quadrant: usize,
    /// Leaf first, root last.
    pub vertices: Vec<usize>,
    /// Some `β` with every edge direction in `[β, β + θ]`.
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeInfo {
    pub root: usize,
    pub quadrant: usize,
    /// Interior vertices of the tree.
    pub members: Vec<usize>,
    /// Leaves in depth-first order, clockwise-most first.
    pub leaves: Vec<usize>,
    /// Total curvature of the members.
    pub omega: f64,
    /// Measure of the cone of all tree edges, oriented toward the root.
    pub cone: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpanningForest {
    pub theta: f64,
    /// Next vertex toward the root, for every interior vertex.
    pub parent: Vec<Option<usize>>,
    /// Quadrant of every interior vertex.
    pub quadrant: Vec<Option<usize>>,
    pub roots: Vec<usize>,
    /// Trees per quadrant, counterclockwise by root.
    pub trees: Vec<TreeInfo>,
    /// One path per leaf, in quadrant order then tree order then leaf order.
    pub paths: Vec<LeafPath>,
}

impl SpanningForest {
    pub fn empty(n: usize, theta: f64) -> Self {
        SpanningForest {
            theta,
            parent: vec![None; n],
            quadrant: vec![None; n],
            roots: Vec::new(),
            trees: Vec::new(),
            paths: Vec::new(),
        }
    }

    /// Forest edges as `(child, parent)`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(v, p)| p.map(|p| (v, p)))
            .collect()
    }

    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.parent.len()];
        for (v, p) in self.parent.iter().enumerate() {
            if let Some(p) = *p {
                ch[p].push(v);
            }
        }
        ch
    }

    /// Vertices from `v` to its root.
    pub fn path_to_root(&self, v: usize) -> Vec<usize> {
        let mut out = vec![v];
        let mut u = v;
        while let Some(p) = self.parent[u] {
            out.push(p);
            u = p;
        }
        out
    }

    pub fn is_cut(&self, a: usize, b: usize) -> bool {
        self.parent[a] == Some(b) || self.parent[b] == Some(a)
    }

    pub fn leaves_in_quadrant(&self, i: usize) -> impl Iterator<Item = &LeafPath> {
        self.paths.iter().filter(move |p| p.quadrant == i)
    }
}

/// Grows the forest quadrant by quadrant; within a quadrant vertices are
/// processed by decreasing distance from the origin, which itself goes last
/// in `Q₀`.
pub fn build_forest(pc: &PlanarCap, qs: &QuadrantSystem) -> Result<SpanningForest, ForestError> {
    let n = pc.points.len();
    let q = qs.origin;
    let mut forest = SpanningForest::empty(n, qs.theta);
    let mut quadrant = vec![None; n];
    let mut by_quadrant: [Vec<usize>; 4] = Default::default();
    for v in pc.cap.interior_vertices() {
        let i = if v == q {
            0
        } else {
            qs.quadrant_of(pc.point(v)).ok_or(ForestError::GapNotEmpty(v))?
        };
        quadrant[v] = Some(i);
        by_quadrant[i].push(v);
    }
    let dq = |v: usize| pc.point(v).dist(qs.origin_point);
    let mut in_forest = vec![false; n];
    for (i, verts) in by_quadrant.iter_mut().enumerate() {
        verts.sort_by(|&a, &b| dq(b).total_cmp(&dq(a)).then(a.cmp(&b)));
        let wedge = qs.wedge(i);
        for &v in verts.iter() {
            if in_forest[v] {
                continue;
            }
            let path = grow_path(pc, &in_forest, v, &wedge, i, q)?;
            let last = *path.last().unwrap();
            if !pc.cap.is_rim(last) && quadrant[last] != Some(i) {
                return Err(ForestError::CrossQuadrant(v));
            }
            for w in path.windows(2) {
                forest.parent[w[0]] = Some(w[1]);
                in_forest[w[0]] = true;
                quadrant[w[0]] = Some(i);
            }
        }
    }
    forest.quadrant = quadrant;
    order_trees(pc, qs, &mut forest);
    Ok(forest)
}

fn order_trees(pc: &PlanarCap, qs: &QuadrantSystem, forest: &mut SpanningForest) {
    let children = forest.children();
    let mut roots: Vec<(usize, usize)> = Vec::new();
    for (v, p) in forest.parent.iter().enumerate() {
        if let Some(p) = *p {
            if pc.cap.is_rim(p) && !roots.iter().any(|r| r.0 == p) {
                roots.push((p, forest.quadrant[v].unwrap()));
            }
        }
    }
    let rel = |v: usize, i: usize| ccw_from(qs.beta(i), (pc.point(v) - qs.origin_point).angle());
    roots.sort_by(|a, b| a.1.cmp(&b.1).then(rel(a.0, a.1).total_cmp(&rel(b.0, b.1))).then(a.0.cmp(&b.0)));
    forest.roots = roots.iter().map(|r| r.0).collect();
    forest.roots.sort_unstable();

    let curvature = |v: usize| pc.cap.vertex_curvature(v).unwrap_or(0.0);
    for &(root, i) in &roots {
        let mut members = Vec::new();
        let mut leaves = Vec::new();
        // Iterative in-order DFS; children visited clockwise-most first.
        let mut stack = vec![root];
        while let Some(u) = stack.pop() {
            if u != root {
                members.push(u);
            }
            let out_dir = match forest.parent[u] {
                Some(p) => pc.point(p) - pc.point(u),
                None => Vec2::from_angle(qs.wedge(i).bisector()),
            };
            let mut ch: Vec<usize> = children[u].clone();
            if u != root && ch.is_empty() {
                leaves.push(u);
            }
            ch.sort_by(|&a, &b| {
                let cw = |c: usize| ccw_from((pc.point(c) - pc.point(u)).angle(), out_dir.angle());
                cw(a).partial_cmp(&cw(b)).unwrap_or(Ordering::Equal).then(a.cmp(&b))
            });
            for &c in ch.iter().rev() {
                stack.push(c);
            }
        }
        let omega = members.iter().map(|&v| curvature(v)).sum();
        let chains: Vec<Chain2D> = leaves
            .iter()
            .map(|&l| Chain2D::new(forest.path_to_root(l).iter().map(|&v| pc.point(v)).collect()))
            .collect();
        let refs: Vec<&Chain2D> = chains.iter().collect();
        let cone = cone_of_all(&refs).map(|c| c.measure()).unwrap_or(0.0);
        for (l, chain) in leaves.iter().zip(&chains) {
            forest.paths.push(LeafPath {
                leaf: *l,
                quadrant: i,
                vertices: forest.path_to_root(*l),
                beta: verify_angle_monotone(chain, qs.theta).ok(),
            });
        }
        members.sort_unstable();
        forest.trees.push(TreeInfo { root, quadrant: i, members, leaves, omega, cone });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::gen::{generate_cap, GenConfig};
    use crate::geom::rad;
    use crate::mesh::project;

    #[test]
    fn icosahedron_apex_is_origin_and_reaches_rim_in_one_edge() {
        let cap = fixtures::icosahedron_cap();
        let pc = project(&cap).unwrap();
        let qs = choose_origin(&pc, OriginMode::ClosestToBoundary).unwrap();
        assert_eq!(qs.origin, 0);
        assert!((qs.theta.to_degrees() - 72.0).abs() < 1e-9);
        assert!((qs.gap_angle.to_degrees() - 72.0).abs() < 1e-6);
        let f = build_forest(&pc, &qs).unwrap();
        assert_eq!(f.paths.len(), 1);
        assert_eq!(f.paths[0].vertices.len(), 2);
        assert_eq!(f.trees[0].leaves, vec![0]);
        assert!((f.trees[0].omega.to_degrees() - 60.0).abs() < 1e-9);
    }

    #[test]
    fn generated_forest_spans_and_is_monotone() {
        for seed in 0..4 {
            let cap = generate_cap(&GenConfig::new(80, rad(20.0), seed)).unwrap();
            let pc = project(&cap).unwrap();
            for mode in [OriginMode::ClosestToBoundary, OriginMode::Central] {
                let qs = choose_origin(&pc, mode).unwrap();
                assert!(gap_intruder(&pc, &qs).is_none());
                let f = build_forest(&pc, &qs).unwrap();
                for v in cap.interior_vertices() {
                    let path = f.path_to_root(v);
                    assert!(cap.is_rim(*path.last().unwrap()));
                    assert!(path.len() <= cap.num_vertices());
                }
                for p in &f.paths {
                    assert!(p.beta.is_some(), "path from {} not monotone", p.leaf);
                    let w = qs.wedge(p.quadrant);
                    for &v in &p.vertices[..p.vertices.len() - 1] {
                        assert!(v == qs.origin || w.contains_point(pc.point(v)));
                    }
                }
                let leaves: usize = f.trees.iter().map(|t| t.leaves.len()).sum();
                assert_eq!(leaves, f.paths.len());
                let members: usize = f.trees.iter().map(|t| t.members.len()).sum();
                assert_eq!(members, cap.num_interior());
                // The origin is always a leaf.
                assert!(f.paths.iter().any(|p| p.leaf == qs.origin));
            }
        }
    }

    #[test]
    fn quadrant_lookup() {
        let qs = QuadrantSystem {
            origin: 0,
            origin_point: Vec2::ZERO,
            axis_rotation: 0.0,
            theta: rad(87.0),
            gap_direction: rad(-6.0),
            gap_angle: rad(12.0),
            fallback: false,
        };
        assert_eq!(qs.quadrant_of_angle(rad(10.0)), Some(0));
        assert_eq!(qs.quadrant_of_angle(rad(100.0)), Some(1));
        assert_eq!(qs.quadrant_of_angle(rad(350.0)), None);
        assert!(qs.in_gap(rad(-3.0)));
    }
}
