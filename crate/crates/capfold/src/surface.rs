//! Points on the cap addressed through its projection: locating them,
//! measuring surface angles around them and tracing planar polylines
//! across faces.
//!
//! A planar direction `d` at a point of face `f` lifts to the surface
//! direction `(d, ∇h_f · d)`, so every surface angle is a sum of lifted
//! angles taken face by face.

use std::f64::consts::{FRAC_PI_2, TAU};

use crate::geom::{ccw_from, eps_geom, Vec2, Vec3};
use crate::mesh::{lifted_angle, ConvexCap, MeshError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Location {
    Vertex(usize),
    /// The point `a + t(b − a)` strictly inside edge `a–b`.
    Edge(usize, usize, f64),
    /// Strictly inside a face.
    Face(usize),
}

#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum SurfaceError {
    #[error("direction leaves the cap at {0:?}")]
    Outside(Location),
    #[error("tracing did not reach ({x}, {y}) after {steps} steps")]
    Lost { x: f64, y: f64, steps: usize },
    #[error("point ({x}, {y}) is not on the cap")]
    NotFound { x: f64, y: f64 },
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// Planar position of a location.
pub fn position(pts: &[Vec2], loc: Location) -> Vec2 {
    match loc {
        Location::Vertex(v) => pts[v],
        Location::Edge(a, b, t) => pts[a].lerp(pts[b], t),
        Location::Face(f) => panic!("a face location {f} carries no position of its own"),
    }
}

/// Height of the surface above `p`, which lies at `loc`.
pub fn height(cap: &ConvexCap, loc: Location, p: Vec2) -> f64 {
    match loc {
        Location::Vertex(v) => cap.vertex(v).z,
        Location::Edge(a, b, t) => cap.vertex(a).z * (1.0 - t) + cap.vertex(b).z * t,
        Location::Face(f) => cap.face_height(f, p),
    }
}

pub fn lift(cap: &ConvexCap, loc: Location, p: Vec2) -> Vec3 {
    p.extend(height(cap, loc, p))
}

/// Angular sectors around a location: `(start angle, face)` in counterclockwise
/// order, each face spanning up to the next start. `None` marks the outside
/// of the cap.
fn sectors(cap: &ConvexCap, pts: &[Vec2], loc: Location, p: Vec2) -> Vec<(f64, Option<usize>)> {
    match loc {
        Location::Face(f) => vec![(0.0, Some(f))],
        Location::Edge(a, b, _) => vec![
            ((pts[b] - p).angle(), cap.face_left_of(a, b)),
            ((pts[a] - p).angle(), cap.face_left_of(b, a)),
        ],
        Location::Vertex(v) => {
            let star = cap.star(v);
            star.nbrs
                .iter()
                .enumerate()
                .map(|(k, &u)| ((pts[u] - p).angle(), star.faces.get(k).copied()))
                .collect()
        }
    }
}

/// Surface angle swept counterclockwise from planar direction `from` to `to`
/// around the point `p` at `loc`. Equal directions sweep nothing.
pub fn sector_angle(
    cap: &ConvexCap,
    pts: &[Vec2],
    loc: Location,
    p: Vec2,
    from: Vec2,
    to: Vec2,
) -> Result<f64, SurfaceError> {
    let secs = sectors(cap, pts, loc, p);
    let a0 = from.angle();
    let total = ccw_from(a0, to.angle());
    // Sector boundaries relative to `from`, in [0, 2π).
    let m = secs.len();
    let rel: Vec<f64> = secs.iter().map(|s| ccw_from(a0, s.0)).collect();
    // The sector holding `from` is the one whose start is latest at or
    // before it, i.e. with the largest relative offset (or exactly 0).
    let mut k = (0..m)
        .max_by(|&i, &j| {
            let ri = if rel[i] < 1e-15 { TAU } else { rel[i] };
            let rj = if rel[j] < 1e-15 { TAU } else { rel[j] };
            ri.total_cmp(&rj)
        })
        .unwrap_or(0);
    let mut at = 0.0;
    let mut sum = 0.0;
    let mut guard = 0;
    while at < total && guard <= m + 1 {
        let face = secs[k].1.ok_or(SurfaceError::Outside(loc))?;
        let next = (k + 1) % m;
        let end = if m == 1 { TAU } else { rel[next] };
        let end = if end <= at { TAU } else { end };
        let stop = end.min(total);
        sum += lifted_sweep(cap, face, a0 + at, stop - at);
        at = stop;
        k = next;
        guard += 1;
    }
    Ok(sum)
}

/// Lifted angle in face `f` of a planar sweep of `width` from angle `start`,
/// split into pieces no wider than a right angle.
fn lifted_sweep(cap: &ConvexCap, f: usize, start: f64, width: f64) -> f64 {
    if width <= 0.0 {
        return 0.0;
    }
    let pieces = (width / FRAC_PI_2).ceil().max(1.0) as usize;
    let step = width / pieces as f64;
    (0..pieces)
        .map(|i| {
            let a = start + step * i as f64;
            lifted_angle(cap, f, Vec2::from_angle(a), Vec2::from_angle(a + step))
        })
        .sum()
}

/// Length tolerance at the cap's scale.
pub fn length_tol(cap: &ConvexCap) -> f64 {
    eps_geom() * cap.scale()
}

/// Classifies `p` relative to face `f`: a corner, an edge, or the interior.
/// `None` when `p` is outside by more than `tol`.
pub fn classify_in_face(cap: &ConvexCap, pts: &[Vec2], f: usize, p: Vec2, tol: f64) -> Option<Location> {
    let t = cap.triangles()[f];
    for &v in &t {
        if pts[v].dist(p) <= tol {
            return Some(Location::Vertex(v));
        }
    }
    let mut on_edge = None;
    for k in 0..3 {
        let (a, b) = (t[k], t[(k + 1) % 3]);
        let ab = pts[b] - pts[a];
        let h = ab.cross(p - pts[a]) / ab.norm();
        if h < -tol {
            return None;
        }
        if h <= tol {
            let s = ((p - pts[a]).dot(ab) / ab.norm2()).clamp(0.0, 1.0);
            on_edge = Some(Location::Edge(a, b, s));
        }
    }
    Some(on_edge.unwrap_or(Location::Face(f)))
}

/// Finds the location of a planar point by scanning faces.
pub fn locate(cap: &ConvexCap, pts: &[Vec2], p: Vec2) -> Result<Location, SurfaceError> {
    let tol = length_tol(cap);
    for f in 0..cap.num_faces() {
        if let Some(loc) = classify_in_face(cap, pts, f, p, tol) {
            return Ok(loc);
        }
    }
    Err(SurfaceError::NotFound { x: p.x, y: p.y })
}

/// A planar polyline resolved against the mesh: every edge crossing becomes
/// a point, and each piece between consecutive points lies in one face
/// (or along one mesh edge).
#[derive(Debug, Clone, Default)]
pub struct Trace {
    pub points: Vec<Vec2>,
    pub locs: Vec<Location>,
    /// Face containing piece `i` (points `i` to `i + 1`). For pieces along
    /// a mesh edge this is the face on the piece's left, or its right when
    /// the left is outside.
    pub faces: Vec<usize>,
}

impl Trace {
    fn push(&mut self, p: Vec2, loc: Location, face: usize) {
        self.faces.push(face);
        self.points.push(p);
        self.locs.push(loc);
    }

    pub fn lifted(&self, cap: &ConvexCap) -> Vec<Vec3> {
        self.points.iter().zip(&self.locs).map(|(&p, &loc)| lift(cap, loc, p)).collect()
    }

    /// Whether piece `i` runs along a mesh edge.
    pub fn piece_edge(&self, i: usize) -> Option<(usize, usize)> {
        match (self.locs[i], self.locs[i + 1]) {
            (Location::Vertex(a), Location::Vertex(b)) => Some((a, b)),
            _ => None,
        }
    }
}

/// A waypoint of a polyline to trace, optionally pinned to a mesh vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Waypoint {
    pub p: Vec2,
    pub vertex: Option<usize>,
}

impl Waypoint {
    pub fn free(p: Vec2) -> Self {
        Waypoint { p, vertex: None }
    }

    pub fn at(pts: &[Vec2], v: usize) -> Self {
        Waypoint { p: pts[v], vertex: Some(v) }
    }
}

/// Traces a planar polyline across the mesh. The first waypoint must be
/// pinned to a vertex or lie on the cap.
pub fn trace(cap: &ConvexCap, pts: &[Vec2], way: &[Waypoint]) -> Result<Trace, SurfaceError> {
    let tol = length_tol(cap);
    let mut out = Trace::default();
    let Some(first) = way.first() else {
        return Ok(out);
    };
    let mut loc = match first.vertex {
        Some(v) => Location::Vertex(v),
        None => locate(cap, pts, first.p)?,
    };
    let mut p = first.p;
    out.points.push(p);
    out.locs.push(loc);
    let steps_max = 4 * cap.num_faces() + 16;
    for w in &way[1..] {
        let target = w.p;
        if target.dist(p) <= tol {
            continue;
        }
        let mut steps = 0;
        loop {
            steps += 1;
            if steps > steps_max {
                return Err(SurfaceError::Lost { x: target.x, y: target.y, steps });
            }
            let d = target - p;
            // Direct edge to a pinned neighbor.
            if let (Location::Vertex(a), Some(b)) = (loc, w.vertex) {
                if cap.adjacent(a, b) {
                    let f = cap.face_left_of(a, b).or_else(|| cap.face_left_of(b, a)).expect("edge has a face");
                    out.push(target, Location::Vertex(b), f);
                    loc = Location::Vertex(b);
                    p = target;
                    break;
                }
            }
            let f = face_toward(cap, pts, loc, p, d)?;
            // Does the target lie in this face?
            if let Some(end) = classify_in_face(cap, pts, f, target, tol) {
                let end = match w.vertex {
                    Some(v) => Location::Vertex(v),
                    None => end,
                };
                out.push(target, end, f);
                loc = end;
                p = target;
                break;
            }
            let (x, xloc) = exit_point(cap, pts, f, p, d, tol);
            out.push(x, xloc, f);
            p = x;
            loc = xloc;
        }
    }
    Ok(out)
}

/// The face a ray from `p` in direction `d` enters first.
fn face_toward(cap: &ConvexCap, pts: &[Vec2], loc: Location, p: Vec2, d: Vec2) -> Result<usize, SurfaceError> {
    match loc {
        Location::Face(f) => Ok(f),
        Location::Edge(a, b, _) => {
            let e = pts[b] - pts[a];
            let side = e.cross(d);
            let (l, r) = (cap.face_left_of(a, b), cap.face_left_of(b, a));
            let f = if side >= 0.0 { l } else { r };
            // Running along a rim edge: rounding may tip the direction out.
            let along = side.abs() <= 1e-9 * e.norm() * d.norm();
            f.or(if along { l.or(r) } else { None }).ok_or(SurfaceError::Outside(loc))
        }
        Location::Vertex(_) => {
            let secs = sectors(cap, pts, loc, p);
            let a = d.angle();
            let m = secs.len();
            for k in 0..m {
                let start = secs[k].0;
                let width = if m == 1 { TAU } else { ccw_from(start, secs[(k + 1) % m].0) };
                let into = ccw_from(start, a);
                if into <= width {
                    if secs[k].1.is_none() && m > 1 {
                        // Grazing a rim edge from the outside sector.
                        const SNAP: f64 = 1e-9;
                        if into <= SNAP {
                            return secs[(k + m - 1) % m].1.ok_or(SurfaceError::Outside(loc));
                        }
                        if width - into <= SNAP {
                            return secs[(k + 1) % m].1.ok_or(SurfaceError::Outside(loc));
                        }
                    }
                    return secs[k].1.ok_or(SurfaceError::Outside(loc));
                }
            }
            Err(SurfaceError::Outside(loc))
        }
    }
}

/// Where a ray from `p` (inside or on face `f`) leaves the face.
fn exit_point(cap: &ConvexCap, pts: &[Vec2], f: usize, p: Vec2, d: Vec2, tol: f64) -> (Vec2, Location) {
    let t = cap.triangles()[f];
    let mut best = (f64::INFINITY, 0usize);
    for k in 0..3 {
        let (a, b) = (pts[t[k]], pts[t[(k + 1) % 3]]);
        let e = b - a;
        // Outward distance grows at rate `-(e × d)/|e|`.
        let rate = -e.cross(d) / e.norm();
        if rate <= 1e-15 * d.norm() {
            continue;
        }
        let h = e.cross(p - a) / e.norm();
        let s = (h / rate).max(0.0);
        if s < best.0 {
            best = (s, k);
        }
    }
    let (s, k) = best;
    let x = p + d * s.min(1.0);
    let (a, b) = (t[k], t[(k + 1) % 3]);
    if pts[a].dist(x) <= tol {
        return (pts[a], Location::Vertex(a));
    }
    if pts[b].dist(x) <= tol {
        return (pts[b], Location::Vertex(b));
    }
    let e = pts[b] - pts[a];
    let u = ((x - pts[a]).dot(e) / e.norm2()).clamp(0.0, 1.0);
    (pts[a].lerp(pts[b], u), Location::Edge(a, b, u))
}

/// Surface angles on each side of an interior point of a traced path:
/// `(λ, ρ)`, the left and right angles between the incoming and outgoing
/// pieces.
pub fn side_angles(cap: &ConvexCap, pts: &[Vec2], tr: &Trace, i: usize) -> Result<(f64, f64), SurfaceError> {
    let p = tr.points[i];
    let back = tr.points[i - 1] - p;
    let out = tr.points[i + 1] - p;
    let loc = match tr.locs[i] {
        // A face-interior point: use the face of the outgoing piece.
        Location::Face(_) => Location::Face(tr.faces[i]),
        l => l,
    };
    let lambda = sector_angle(cap, pts, loc, p, out, back)?;
    let rho = sector_angle(cap, pts, loc, p, back, out)?;
    Ok((lambda, rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::geom::{deg, rad};
    use crate::mesh::project;
    use std::f64::consts::PI;

    #[test]
    fn sector_at_apex_matches_corner_sums() {
        let cap = fixtures::icosahedron_cap();
        let pc = project(&cap).unwrap();
        let pts = &pc.points;
        let p = pts[0];
        let full = sector_angle(&cap, pts, Location::Vertex(0), p, pts[1] - p, pts[1] - p).unwrap();
        assert_eq!(full, 0.0);
        let two = sector_angle(&cap, pts, Location::Vertex(0), p, pts[1] - p, pts[3] - p).unwrap();
        assert!((deg(two) - 120.0).abs() < 1e-9, "{}", deg(two));
        let almost = sector_angle(&cap, pts, Location::Vertex(0), p, pts[1] - p, (pts[1] - p).rotate(-1e-9))
            .unwrap();
        assert!((deg(almost) - 300.0).abs() < 1e-5);
    }

    #[test]
    fn face_point_has_flat_surroundings() {
        let cap = fixtures::icosahedron_cap();
        let pc = project(&cap).unwrap();
        let c = pc.centroid(0);
        let l = sector_angle(&cap, &pc.points, Location::Face(0), c, Vec2::new(1.0, 0.0), Vec2::new(-1.0, 0.0))
            .unwrap();
        assert!((l - PI).abs() < 1e-12);
    }

    #[test]
    fn rim_vertex_outside_errors() {
        let cap = fixtures::icosahedron_cap();
        let pc = project(&cap).unwrap();
        let p = pc.points[1];
        let out = -(pc.points[0] - p);
        assert!(matches!(
            sector_angle(&cap, &pc.points, Location::Vertex(1), p, pc.points[0] - p, out),
            Err(SurfaceError::Outside(_))
        ));
    }

    #[test]
    fn chord_trace_crosses_two_apex_edges() {
        let cap = fixtures::icosahedron_cap();
        let pc = project(&cap).unwrap();
        let [a, _, _, d] = fixtures::icosahedron_chord(&cap);
        let tr = trace(&cap, &pc.points, &[Waypoint::free(a), Waypoint::free(d)]).unwrap();
        assert_eq!(tr.points.len(), 4);
        assert!(matches!(tr.locs[1], Location::Edge(..)));
        assert!(matches!(tr.locs[2], Location::Edge(..)));
        // The lifted chord develops with a −15.5° turn at each apex edge.
        for i in 1..3 {
            let (l, r) = side_angles(&cap, &pc.points, &tr, i).unwrap();
            assert!((l + r - 2.0 * PI).abs() < 1e-9);
            assert!((deg(PI - l) + 15.52).abs() < 0.01, "{}", deg(PI - l));
        }
    }

    #[test]
    fn trace_along_edges_between_pinned_vertices() {
        let cap = fixtures::flat_disk_cap();
        let pc = project(&cap).unwrap();
        let way = [Waypoint::at(&pc.points, 0), Waypoint::at(&pc.points, 1), Waypoint::at(&pc.points, 7)];
        let tr = trace(&cap, &pc.points, &way).unwrap();
        assert_eq!(tr.locs, vec![Location::Vertex(0), Location::Vertex(1), Location::Vertex(7)]);
        assert_eq!(tr.piece_edge(0), Some((0, 1)));
    }

    #[test]
    fn trace_through_flat_disk_is_straight_and_flat() {
        let cap = fixtures::flat_disk_cap();
        let pc = project(&cap).unwrap();
        let a = Vec2::from_angle(rad(10.0)) * 0.05;
        let b = Vec2::from_angle(rad(200.0)) * 0.9;
        let tr = trace(&cap, &pc.points, &[Waypoint::free(a), Waypoint::free(b)]).unwrap();
        for i in 1..tr.points.len() - 1 {
            let (l, r) = side_angles(&cap, &pc.points, &tr, i).unwrap();
            assert!((l - PI).abs() < 1e-9 && (r - PI).abs() < 1e-9);
        }
        let lifted = tr.lifted(&cap);
        let len: f64 = lifted.windows(2).map(|w| w[0].dist(w[1])).sum();
        assert!((len - a.dist(b)).abs() < 1e-12);
    }

    #[test]
    fn trace_grazing_the_rim_stays_on_the_cap() {
        let cap = fixtures::flat_hex_cap();
        let pc = project(&cap).unwrap();
        // Points on rim edge 1-2 nudged a hair outward, then on to vertex 3.
        let (a, b) = (pc.point(1), pc.point(2));
        let out = (b - a).perp() * -1e-13;
        let way = [
            Waypoint::free(a.lerp(b, 0.25)),
            Waypoint::free(a.lerp(b, 0.75) + out),
            Waypoint::at(&pc.points, 2),
            Waypoint::free(pc.point(2).lerp(pc.point(3), 0.5) + (pc.point(3) - pc.point(2)).perp() * -1e-13),
        ];
        let tr = trace(&cap, &pc.points, &way).unwrap();
        assert_eq!(tr.points.len(), 4);
        assert!(tr.faces.iter().all(|&f| f == 0 || f == 1));
    }
}
