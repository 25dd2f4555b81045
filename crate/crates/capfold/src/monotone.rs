//! Radial monotonicity, angle monotonicity, cones of chains and the
//! left-of relation between chains sharing a source.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::Serialize;

use crate::geom::{angle_between2, eps_geom, segments_cross, wrap_pi, Vec2};

#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum MonotoneError {
    #[error("chain has coincident consecutive points at index {0}")]
    Coincident(usize),
    #[error("chain is not simple: edges {0} and {1} cross")]
    NotSimple(usize, usize),
    #[error("chain is not radially monotone from its source: {0:?}")]
    NotMonotone(RmWitness),
    #[error("chains do not share a source")]
    NoCommonSource,
    #[error("chain needs at least one edge")]
    TooShort,
}

/// A planar polyline `v₀ … v_k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Chain2D {
    pub points: Vec<Vec2>,
}

impl Chain2D {
    pub fn new(points: Vec<Vec2>) -> Self {
        Chain2D { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
        self.points.windows(2).map(|w| (w[0], w[1]))
    }

    fn scale(&self) -> f64 {
        self.points.iter().map(|p| p.norm()).fold(1.0, f64::max)
    }

    /// Checks consecutive points are distinct and no two non-adjacent edges
    /// cross. Brute force, O(k²).
    pub fn check_simple(&self) -> Result<(), MonotoneError> {
        let tol = eps_geom() * self.scale();
        for (i, w) in self.points.windows(2).enumerate() {
            if w[0].dist(w[1]) <= tol {
                return Err(MonotoneError::Coincident(i));
            }
        }
        let e = self.points.len().saturating_sub(1);
        for i in 0..e {
            for j in i + 2..e {
                let (a, b) = (self.points[i], self.points[i + 1]);
                let (c, d) = (self.points[j], self.points[j + 1]);
                if segments_cross(a, b, c, d, tol) {
                    return Err(MonotoneError::NotSimple(i, j));
                }
            }
        }
        Ok(())
    }
}

/// Where radial monotonicity fails: the chain turns back toward `source`
/// right after vertex `index`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RmWitness {
    pub source: usize,
    pub index: usize,
    /// The angle `∠(v_source, v_index, v_index+1)`, below π/2.
    pub angle: f64,
}

/// Radial monotonicity with respect to every vertex: for all `j < i < k`,
/// `∠(vⱼ, vᵢ, vᵢ₊₁) ≥ π/2` (up to `eps_geom` radians). Returns the first
/// violation in `(j, i)` order. O(k²).
pub fn is_radially_monotone(chain: &Chain2D) -> Result<Option<RmWitness>, MonotoneError> {
    chain.check_simple()?;
    Ok(rm_witness(chain, 0..chain.len()))
}

fn rm_witness(chain: &Chain2D, sources: std::ops::Range<usize>) -> Option<RmWitness> {
    let p = &chain.points;
    let k = p.len();
    for j in sources {
        for i in j + 1..k.saturating_sub(1) {
            let a = angle_between2(p[j] - p[i], p[i + 1] - p[i]);
            if a < FRAC_PI_2 - eps_geom() {
                return Some(RmWitness { source: j, index: i, angle: a });
            }
        }
    }
    None
}

/// Radial monotonicity from the first vertex only.
pub fn is_radially_monotone_from_source(chain: &Chain2D) -> Option<RmWitness> {
    rm_witness(chain, 0..1.min(chain.len()))
}

/// Sorted radii at which to probe a chain around `source`: every vertex
/// distance plus the midpoints between consecutive distinct values.
pub fn sample_radii(chains: &[&Chain2D], source: Vec2) -> Vec<f64> {
    let mut d: Vec<f64> = chains
        .iter()
        .flat_map(|c| c.points.iter().map(|p| p.dist(source)))
        .filter(|&r| r > 0.0)
        .collect();
    d.sort_by(f64::total_cmp);
    d.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * b.max(1.0));
    let mut out = Vec::with_capacity(2 * d.len());
    for i in 0..d.len() {
        if i > 0 {
            out.push(0.5 * (d[i - 1] + d[i]));
        }
        out.push(d[i]);
    }
    out
}

/// Parameters in `[0, 1]` where the segment `a → b` meets the circle of
/// radius `r` about `c`.
fn circle_hits(a: Vec2, b: Vec2, c: Vec2, r: f64) -> Vec<f64> {
    let d = b - a;
    let f = a - c;
    let qa = d.norm2();
    let qb = 2.0 * f.dot(d);
    let qc = f.norm2() - r * r;
    let disc = qb * qb - 4.0 * qa * qc;
    let slack = 1e-12 * (qb * qb).max(4.0 * qa * r * r);
    if disc < -slack {
        return Vec::new();
    }
    let s = disc.max(0.0).sqrt();
    let mut out = Vec::with_capacity(2);
    for t in [(-qb - s) / (2.0 * qa), (-qb + s) / (2.0 * qa)] {
        if (-1e-12..=1.0 + 1e-12).contains(&t) {
            out.push(t.clamp(0.0, 1.0));
        }
    }
    out
}

/// Number of connected pieces in which the chain meets the circle of radius
/// `r` about `source`. Crossings closer than `eps_geom` along the chain are
/// one piece.
pub fn circle_components(chain: &Chain2D, source: Vec2, r: f64) -> usize {
    let tol = eps_geom() * chain.scale();
    let mut hits: Vec<Vec2> = Vec::new();
    for (a, b) in chain.edges() {
        for t in circle_hits(a, b, source, r) {
            let x = a.lerp(b, t);
            if hits.last().is_none_or(|h| h.dist(x) > tol) {
                hits.push(x);
            }
        }
    }
    hits.len()
}

/// Definition by circles: the chain meets every sampled circle about
/// `source` in at most one piece. A test oracle only.
pub fn circle_crossing_oracle(chain: &Chain2D, source: Vec2, radii: &[f64]) -> bool {
    radii.iter().all(|&r| circle_components(chain, source, r) <= 1)
}

/// The circle oracle applied from every vertex to the rest of the chain,
/// with radii sampled at all vertex distances and their midpoints.
pub fn circle_oracle_all_sources(chain: &Chain2D) -> bool {
    (0..chain.len()).all(|j| {
        let sub = Chain2D::new(chain.points[j..].to_vec());
        let radii = sample_radii(&[&sub], chain.points[j]);
        circle_crossing_oracle(&sub, chain.points[j], &radii)
    })
}

/// A failed angle-monotonicity check: the two edges whose directions spread
/// the widest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpreadFailure {
    pub first: usize,
    pub second: usize,
    pub spread: f64,
}

/// Smallest closed arc holding every edge direction: `(start, width, i, j)`
/// with `i`, `j` the edges on its two ends.
fn direction_arc(chain: &Chain2D) -> Option<(f64, f64, usize, usize)> {
    let mut dirs: Vec<(f64, usize)> = chain
        .edges()
        .enumerate()
        .map(|(i, (a, b))| ((b - a).angle().rem_euclid(TAU), i))
        .collect();
    if dirs.is_empty() {
        return None;
    }
    dirs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let m = dirs.len();
    // The arc starts right after the widest empty gap.
    let mut best = (0usize, -1.0);
    for k in 0..m {
        let next = if k + 1 < m { dirs[k + 1].0 } else { dirs[0].0 + TAU };
        let gap = next - dirs[k].0;
        if gap > best.1 {
            best = (k, gap);
        }
    }
    let start_idx = (best.0 + 1) % m;
    let width = TAU - best.1;
    Some((dirs[start_idx].0, width.max(0.0), dirs[start_idx].1, dirs[best.0].1))
}

/// Angle-monotone certificate: some `β` with every edge direction in
/// `[β, β + θ]`. On failure, the two extreme edges.
pub fn verify_angle_monotone(chain: &Chain2D, theta: f64) -> Result<f64, SpreadFailure> {
    let Some((beta, width, i, j)) = direction_arc(chain) else {
        return Err(SpreadFailure { first: 0, second: 0, spread: 0.0 });
    };
    if width <= theta + eps_geom() {
        Ok(wrap_pi(beta))
    } else {
        Err(SpreadFailure { first: i, second: j, spread: width })
    }
}

/// Outcome of instantiating "θ-monotone with θ ≤ π/2 implies radially
/// monotone" on one path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImplicationCheck {
    /// The path is θ-monotone (the premise).
    pub premise: bool,
    pub radially_monotone: bool,
}

impl ImplicationCheck {
    pub fn holds(&self) -> bool {
        !self.premise || self.radially_monotone
    }
}

pub fn angle_monotone_implies_rm(chain: &Chain2D, theta: f64) -> Result<ImplicationCheck, MonotoneError> {
    let premise = theta <= FRAC_PI_2 + eps_geom() && verify_angle_monotone(chain, theta).is_ok();
    let radially_monotone = is_radially_monotone(chain)?.is_none();
    Ok(ImplicationCheck { premise, radially_monotone })
}

/// Union of edge directions of a chain, measured from the first edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cone {
    pub sigma_min: f64,
    pub sigma_max: f64,
}

impl Cone {
    pub fn measure(&self) -> f64 {
        self.sigma_max - self.sigma_min
    }
}

/// Extreme edge directions, unwrapped relative to the first edge.
pub fn cone_of(chain: &Chain2D) -> Result<Cone, MonotoneError> {
    let mut it = chain.edges();
    let (a, b) = it.next().ok_or(MonotoneError::TooShort)?;
    let base = (b - a).angle();
    let (mut lo, mut hi) = (base, base);
    for (a, b) in it {
        let x = base + wrap_pi((b - a).angle() - base);
        lo = lo.min(x);
        hi = hi.max(x);
    }
    Ok(Cone { sigma_min: lo, sigma_max: hi })
}

/// Cone spanned by several chains, all unwrapped against the first edge of
/// the first chain.
pub fn cone_of_all(chains: &[&Chain2D]) -> Result<Cone, MonotoneError> {
    let first = chains.iter().find_map(|c| c.edges().next()).ok_or(MonotoneError::TooShort)?;
    let base = (first.1 - first.0).angle();
    let (mut lo, mut hi) = (base, base);
    for c in chains {
        for (a, b) in c.edges() {
            let x = base + wrap_pi((b - a).angle() - base);
            lo = lo.min(x);
            hi = hi.max(x);
        }
    }
    Ok(Cone { sigma_min: lo, sigma_max: hi })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum LeftOf {
    Holds,
    /// At this radius the counterclockwise arc from `B`'s point to `A`'s
    /// point is `arc` (outside `[0, π)`).
    Violated { radius: f64, arc: f64 },
}

impl LeftOf {
    pub fn holds(&self) -> bool {
        matches!(self, LeftOf::Holds)
    }
}

/// The single point where a chain, radially monotone from its source,
/// meets the circle of radius `r`; `None` beyond its reach.
fn point_at_radius(chain: &Chain2D, dist: &[f64], r: f64) -> Option<Vec2> {
    let p = &chain.points;
    let last = *dist.last()?;
    if r > last * (1.0 + 1e-12) + 1e-300 {
        return None;
    }
    // First vertex at or beyond r.
    let i = dist.partition_point(|&d| d < r);
    if i == 0 {
        return Some(p[0]);
    }
    if i >= p.len() {
        return Some(p[p.len() - 1]);
    }
    let hits = circle_hits(p[i - 1], p[i], p[0], r);
    let t = hits.last().copied().unwrap_or(1.0);
    Some(p[i - 1].lerp(p[i], t))
}

/// `A ⪯ B`: on every sampled circle about the common source that meets
/// both chains, the counterclockwise arc from `B`'s point to `A`'s point
/// lies in `[0, π)`. Touching counts as holding.
pub fn left_of(a: &Chain2D, b: &Chain2D) -> Result<LeftOf, MonotoneError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(MonotoneError::TooShort);
    }
    let src = a.points[0];
    let scale = a.scale().max(b.scale());
    if src.dist(b.points[0]) > eps_geom() * scale * 1e3 {
        return Err(MonotoneError::NoCommonSource);
    }
    for c in [a, b] {
        if let Some(w) = radial_violation(c) {
            return Err(MonotoneError::NotMonotone(w));
        }
    }
    let da: Vec<f64> = a.points.iter().map(|p| p.dist(src)).collect();
    let db: Vec<f64> = b.points.iter().map(|p| p.dist(src)).collect();
    let tol = eps_geom() * scale;
    for r in sample_radii(&[a, b], src) {
        if r <= tol {
            continue;
        }
        let (Some(pa), Some(pb)) = (point_at_radius(a, &da, r), point_at_radius(b, &db, r)) else {
            continue;
        };
        if pa.dist(pb) <= tol {
            continue;
        }
        let arc = wrap_pi((pa - src).angle() - (pb - src).angle());
        // Arcs within tolerance of 0 are contact; arcs near ±π are a wrap.
        if arc * r < -tol || arc >= PI - 1e-12 {
            return Ok(LeftOf::Violated { radius: r, arc });
        }
    }
    Ok(LeftOf::Holds)
}

/// Radial monotonicity from the source with a tolerance scaled to lengths:
/// the distance from the source may dip by at most `eps_geom`·scale.
fn radial_violation(c: &Chain2D) -> Option<RmWitness> {
    let p = &c.points;
    let tol = eps_geom() * c.scale();
    for i in 1..p.len() - 1 {
        let back = p[0] - p[i];
        let out = p[i + 1] - p[i];
        // Projection of the next edge onto the direction back to the source.
        if back.dot(out) > tol * out.norm() {
            return Some(RmWitness { source: 0, index: i, angle: angle_between2(back, out) });
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::rad;

    fn ch(p: &[(f64, f64)]) -> Chain2D {
        Chain2D::new(p.iter().map(|&(x, y)| Vec2::new(x, y)).collect())
    }

    fn staircase(n: usize) -> Chain2D {
        let mut p = vec![(0.0, 0.0)];
        for i in 0..n {
            let (x, y) = p[p.len() - 1];
            p.push(if i % 2 == 0 { (x + 1.0, y) } else { (x, y + 1.0) });
        }
        ch(&p)
    }

    #[test]
    fn straight_and_staircase_are_rm() {
        let s = ch(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (3.0, 0.0)]);
        assert_eq!(is_radially_monotone(&s).unwrap(), None);
        assert!(circle_oracle_all_sources(&s));
        let st = staircase(8);
        assert_eq!(is_radially_monotone(&st).unwrap(), None);
        assert!(circle_oracle_all_sources(&st));
    }

    #[test]
    fn doubling_back_is_caught_by_both_definitions() {
        let c = ch(&[(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (1.0, 1.2)]);
        let w = is_radially_monotone(&c).unwrap().unwrap();
        assert_eq!((w.source, w.index), (0, 2));
        assert!(!circle_oracle_all_sources(&c));
    }

    #[test]
    fn non_simple_chain_is_a_domain_error() {
        let c = ch(&[(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (1.0, -1.0)]);
        assert!(matches!(is_radially_monotone(&c), Err(MonotoneError::NotSimple(0, 2))));
    }

    #[test]
    fn angle_monotone_certificates() {
        let e = ch(&[(0.0, 0.0), (1.0, 1.0)]);
        assert!((verify_angle_monotone(&e, rad(1.0)).unwrap() - rad(45.0)).abs() < 1e-12);
        let st = staircase(6);
        assert!(verify_angle_monotone(&st, rad(90.0)).unwrap().abs() < 1e-12);
        let wide = ch(&[(0.0, 0.0), (1.0, 0.0), (1.0 + rad(91.0).cos(), rad(91.0).sin())]);
        let f = verify_angle_monotone(&wide, rad(90.0)).unwrap_err();
        assert!((f.spread - rad(91.0)).abs() < 1e-12);
        assert_eq!((f.first.min(f.second), f.first.max(f.second)), (0, 1));
    }

    #[test]
    fn cones() {
        let e = ch(&[(0.0, 0.0), (1.0, 1.0)]);
        assert_eq!(cone_of(&e).unwrap().measure(), 0.0);
        let st = staircase(5);
        assert!((cone_of(&st).unwrap().measure() - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn implication_on_87_degree_staircase() {
        let mut p = vec![Vec2::ZERO];
        for i in 0..10 {
            let d = if i % 2 == 0 { Vec2::from_angle(0.0) } else { Vec2::from_angle(rad(87.0)) };
            p.push(p[i] + d * (1.0 + 0.1 * i as f64));
        }
        let c = Chain2D::new(p);
        let chk = angle_monotone_implies_rm(&c, rad(87.0)).unwrap();
        assert!(chk.premise && chk.radially_monotone);
    }

    #[test]
    fn left_of_basics() {
        let b = ch(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]);
        assert!(left_of(&b, &b).unwrap().holds());
        let r = rad(10.0);
        let a = ch(&[(0.0, 0.0), (r.cos(), r.sin()), (2.0 * r.cos(), 2.0 * r.sin())]);
        assert!(left_of(&a, &b).unwrap().holds());
        assert!(!left_of(&b, &a).unwrap().holds());
        let far = ch(&[(1.0, 0.0), (2.0, 0.0)]);
        assert!(matches!(left_of(&a, &far), Err(MonotoneError::NoCommonSource)));
    }

    #[test]
    fn left_of_detects_later_crossing() {
        // A starts counterclockwise of B, then swings across it.
        let b = ch(&[(0.0, 0.0), (3.0, 0.0)]);
        let a = ch(&[(0.0, 0.0), (1.0, 0.5), (2.5, -0.5)]);
        match left_of(&a, &b).unwrap() {
            LeftOf::Violated { radius, .. } => assert!(radius > 1.0),
            LeftOf::Holds => panic!("crossing missed"),
        }
    }
}
