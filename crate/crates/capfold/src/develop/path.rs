//! Cut paths on the surface and their left and right planar developments.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use super::DevelopError;
use crate::geom::{turn_angle, Vec2, Vec3};
use crate::mesh::ConvexCap;
use crate::surface::{side_angles, Location, Trace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

/// A surface path `u₀ … u_k` with the surface angles on each side of it.
/// Angle vectors are indexed like the points and are zero at both ends.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutPath3D {
    /// Mesh vertex at each point, when the point is one.
    pub vertices: Vec<Option<usize>>,
    pub points: Vec<Vec3>,
    pub lambda: Vec<f64>,
    pub rho: Vec<f64>,
    pub omega: Vec<f64>,
}

impl CutPath3D {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn projected(&self) -> Vec<Vec2> {
        self.points.iter().map(|p| p.xy()).collect()
    }

    pub fn edge_lengths(&self) -> Vec<f64> {
        self.points.windows(2).map(|w| w[0].dist(w[1])).collect()
    }

    /// Largest `|λᵢ + ωᵢ + ρᵢ − 2π|` over the inner points.
    pub fn identity_residual(&self) -> f64 {
        (1..self.len().saturating_sub(1))
            .map(|i| (self.lambda[i] + self.omega[i] + self.rho[i] - TAU).abs())
            .fold(0.0, f64::max)
    }

    /// Builds the angles of a traced polyline. Points off vertices carry no
    /// curvature.
    pub fn from_trace(cap: &ConvexCap, pts: &[Vec2], tr: &Trace) -> Result<Self, DevelopError> {
        let k = tr.points.len();
        if k < 2 {
            return Err(DevelopError::ShortPath);
        }
        let mut out = CutPath3D {
            vertices: tr
                .locs
                .iter()
                .map(|l| match l {
                    Location::Vertex(v) => Some(*v),
                    _ => None,
                })
                .collect(),
            points: tr.lifted(cap),
            lambda: vec![0.0; k],
            rho: vec![0.0; k],
            omega: vec![0.0; k],
        };
        for i in 1..k - 1 {
            let (l, r) = side_angles(cap, pts, tr, i)?;
            out.lambda[i] = l;
            out.rho[i] = r;
            out.omega[i] = match tr.locs[i] {
                Location::Vertex(v) if !cap.is_rim(v) => cap.vertex_curvature(v)?,
                _ => TAU - l - r,
            };
        }
        Ok(out)
    }
}

/// Surface angles along an edge path: `λᵢ` sweeps counterclockwise from the
/// outgoing edge to the incoming one, `ρᵢ` the other way round.
pub fn path_angles(cap: &ConvexCap, vertices: &[usize]) -> Result<CutPath3D, DevelopError> {
    let k = vertices.len();
    if k < 2 {
        return Err(DevelopError::ShortPath);
    }
    for w in vertices.windows(2) {
        if !cap.adjacent(w[0], w[1]) {
            return Err(DevelopError::NotEdgePath(w[0], w[1]));
        }
    }
    let mut lambda = vec![0.0; k];
    let mut rho = vec![0.0; k];
    let mut omega = vec![0.0; k];
    for i in 1..k - 1 {
        let (prev, u, next) = (vertices[i - 1], vertices[i], vertices[i + 1]);
        lambda[i] = cap.ccw_angle(u, next, prev)?;
        rho[i] = cap.ccw_angle(u, prev, next)?;
        omega[i] = cap.vertex_curvature(u)?;
    }
    Ok(CutPath3D {
        vertices: vertices.iter().map(|&v| Some(v)).collect(),
        points: vertices.iter().map(|&v| cap.vertex(v)).collect(),
        lambda,
        rho,
        omega,
    })
}

/// A planar unrolling of a cut path. `turns[i]` is the signed turn at point
/// `i` (zero at both ends).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DevelopedChain {
    pub side: Side,
    pub points: Vec<Vec2>,
    pub turns: Vec<f64>,
}

impl DevelopedChain {
    pub fn total_turn(&self) -> f64 {
        self.turns.iter().sum()
    }
}

/// Lays out a chain from `start` with first heading `heading`, the given
/// edge lengths and the turn at each inner point.
pub fn unroll(start: Vec2, heading: f64, lengths: &[f64], turns: &[f64]) -> Vec<Vec2> {
    let mut pts = Vec::with_capacity(lengths.len() + 1);
    pts.push(start);
    let mut h = heading;
    for (i, &l) in lengths.iter().enumerate() {
        if i > 0 {
            h += turns[i];
        }
        let p = pts[i] + Vec2::from_angle(h) * l;
        pts.push(p);
    }
    pts
}

/// Turns of the left (`π − λᵢ`) or right (`ρᵢ − π`) development.
pub fn side_turns(path: &CutPath3D, side: Side) -> Vec<f64> {
    let k = path.len();
    (0..k)
        .map(|i| {
            if i == 0 || i + 1 == k {
                0.0
            } else {
                match side {
                    Side::Left => PI - path.lambda[i],
                    Side::Right => path.rho[i] - PI,
                }
            }
        })
        .collect()
}

/// Isometric unrolling starting at the projection of `u₀`, first edge along
/// its projected direction.
pub fn develop_chain(path: &CutPath3D, side: Side) -> DevelopedChain {
    let turns = side_turns(path, side);
    develop_with_turns(path, side, turns)
}

/// Unrolls with explicit turns, e.g. turns adjusted for subtrees.
pub fn develop_with_turns(path: &CutPath3D, side: Side, turns: Vec<f64>) -> DevelopedChain {
    let proj = path.projected();
    let heading = if proj.len() >= 2 { (proj[1] - proj[0]).angle() } else { 0.0 };
    let start = proj.first().copied().unwrap_or(Vec2::ZERO);
    let points = unroll(start, heading, &path.edge_lengths(), &turns);
    DevelopedChain { side, points, turns }
}

/// Prefix turn differences `Σ_{j≤i} τⱼ(dev) − Σ_{j≤i} τⱼ(planar)` for every
/// inner point `i` of the chain.
pub fn turn_distortion(planar: &[Vec2], dev: &DevelopedChain) -> Result<Vec<f64>, DevelopError> {
    let k = planar.len();
    let mut out = Vec::with_capacity(k.saturating_sub(2));
    let (mut sp, mut sd) = (0.0, 0.0);
    for i in 1..k.saturating_sub(1) {
        sp += turn_angle(planar[i - 1], planar[i], planar[i + 1]).map_err(crate::mesh::MeshError::from)?;
        sd += dev.turns[i];
        out.push(sd - sp);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::geom::{deg, rad};
    use crate::mesh::project;
    use crate::monotone::{left_of, Chain2D};
    use crate::surface::{trace, Waypoint};

    #[test]
    fn flat_path_develops_to_itself() {
        let cap = fixtures::flat_hex_cap();
        // Center 0 to rim vertex 1.
        let p = path_angles(&cap, &[0, 1]).unwrap();
        let l = develop_chain(&p, Side::Left);
        assert!(l.points[1].dist(cap.vertex(1).xy()) < 1e-12);
        let rim = cap.rim().to_vec();
        let p = path_angles(&cap, &[rim[0], 0, rim[3]]).unwrap();
        assert!(p.identity_residual() < 1e-12);
        assert!(p.omega[1].abs() < 1e-12);
        for side in [Side::Left, Side::Right] {
            let d = develop_chain(&p, side);
            for (a, v) in d.points.iter().zip([rim[0], 0, rim[3]]) {
                assert!(a.dist(cap.vertex(v).xy()) < 1e-12);
            }
            assert!(turn_distortion(&p.projected(), &d).unwrap().iter().all(|t| t.abs() < 1e-12));
        }
    }

    #[test]
    fn apex_path_opens_by_its_curvature() {
        let cap = fixtures::icosahedron_cap();
        let p = path_angles(&cap, &[1, 0, 3]).unwrap();
        assert!(p.identity_residual() < 1e-12);
        assert!((deg(p.omega[1]) - 60.0).abs() < 1e-9);
        let l = develop_chain(&p, Side::Left);
        let r = develop_chain(&p, Side::Right);
        assert!((deg(l.total_turn() - r.total_turn()) - 60.0).abs() < 1e-9);
        let (lc, rc) = (Chain2D::new(l.points.clone()), Chain2D::new(r.points.clone()));
        assert!(left_of(&lc, &rc).unwrap().holds());
        assert!(!left_of(&rc, &lc).unwrap().holds());
        // Edge lengths are the 3D ones.
        for (w, len) in l.points.windows(2).zip(p.edge_lengths()) {
            assert!((w[0].dist(w[1]) - len).abs() < 1e-12);
        }
    }

    #[test]
    fn icosahedron_chord_turns() {
        let cap = fixtures::icosahedron_cap();
        let pc = project(&cap).unwrap();
        let ch = fixtures::icosahedron_chord(&cap);
        let way: Vec<Waypoint> = ch.iter().map(|&p| Waypoint::free(p)).collect();
        let tr = trace(&cap, &pc.points, &way).unwrap();
        let p = CutPath3D::from_trace(&cap, &pc.points, &tr).unwrap();
        let l = develop_chain(&p, Side::Left);
        let inner: Vec<f64> = l.turns.iter().copied().filter(|t| t.abs() > 1e-9).collect();
        assert_eq!(inner.len(), 2);
        for t in &inner {
            assert!((deg(*t) + 15.52).abs() < 0.01, "{}", deg(*t));
        }
        let dq = turn_distortion(&p.projected(), &l).unwrap();
        assert!((deg(*dq.last().unwrap()) + 31.05).abs() < 0.01);
        assert!(p.identity_residual() < 1e-9);
        let _ = rad(0.0);
    }
}
