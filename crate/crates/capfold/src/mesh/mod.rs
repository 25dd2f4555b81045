//! Triangulated convex caps: storage, validation, projection, curvature and
//! rim-angle bookkeeping.

pub mod io;

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::geom::{
    self, angle_between, angle_between2, corner_angle, eps_geom, phi_budget, point_in_polygon,
    signed_area, GeomError, Vec2, Vec3,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleMode {
    StrictAcute,
    NonObtuse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RimMode {
    /// The rim must lie in `z = 0` within `eps_geom`.
    Strict,
    /// A non-planar rim is accepted but flagged and excluded from ψ/ψ′ checks.
    Relaxed,
}

#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum MeshError {
    #[error("mesh has no triangles")]
    Empty,
    #[error("triangle {face} references vertex {vertex}, but there are only {count} vertices")]
    BadIndex { face: usize, vertex: usize, count: usize },
    #[error("vertex {0} has a non-finite coordinate")]
    NonFinite(usize),
    #[error("triangle {0} repeats a vertex")]
    RepeatedVertex(usize),
    #[error("edge ({0}, {1}) is used twice in the same direction (inconsistent orientation or non-manifold)")]
    Orientation(usize, usize),
    #[error("not a topological disk: {0}")]
    NotDisk(String),
    #[error("projection is not injective: {0}")]
    NonInjective(String),
    #[error("reflex interior vertex {vertex}: curvature {curvature:.3e} rad")]
    Reflex { vertex: usize, curvature: f64 },
    #[error("edge ({0}, {1}) has a concave dihedral angle")]
    ConcaveEdge(usize, usize),
    #[error("face {face} has a {angle_deg:.4}° angle, not allowed in {mode:?} mode")]
    AngleMode {
        face: usize,
        angle_deg: f64,
        mode: AngleMode,
    },
    #[error("projected face angle {0:.4}° exceeds 90°")]
    ObtuseProjection(f64),
    #[error("rim is not planar: max |z| on the rim is {0:.3e}")]
    NonPlanarRim(f64),
    #[error("projected rim is not convex at vertex {0}")]
    NonConvexRim(usize),
    #[error("vertex {0} is a rim vertex")]
    RimVertex(usize),
    #[error("vertex {0} does not exist")]
    NoSuchVertex(usize),
    #[error("{0} and {1} are not adjacent")]
    NotAdjacent(usize, usize),
    #[error("angular sector at vertex {0} leaves the surface")]
    OpenSector(usize),
    #[error("chain is not closed")]
    OpenChain,
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// Cyclic (interior) or linear (rim) neighbor fan of a vertex, in
/// counterclockwise order seen from above. `faces[k]` lies between
/// `nbrs[k]` and `nbrs[k + 1]` (indices modulo the length when closed).
#[derive(Debug, Clone, PartialEq)]
pub struct Star {
    pub nbrs: Vec<usize>,
    pub faces: Vec<usize>,
    pub closed: bool,
}

/// Triangulated convex cap: a disk-like surface whose triangles are listed
/// counterclockwise as seen from above.
#[derive(Debug, Clone)]
pub struct ConvexCap {
    vertices: Vec<Vec3>,
    triangles: Vec<[usize; 3]>,
    rim: Vec<usize>,
    is_rim: Vec<bool>,
    stars: Vec<Star>,
    halfedges: HashMap<(usize, usize), usize>,
}

impl ConvexCap {
    /// Builds the cap and its adjacency, checking disk topology and
    /// orientation consistency. Geometry is checked by [`validate_cap`].
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        if triangles.is_empty() {
            return Err(MeshError::Empty);
        }
        let n = vertices.len();
        if let Some(v) = vertices.iter().position(|p| !p.is_finite()) {
            return Err(MeshError::NonFinite(v));
        }
        let mut halfedges = HashMap::with_capacity(triangles.len() * 3);
        for (f, t) in triangles.iter().enumerate() {
            for &v in t {
                if v >= n {
                    return Err(MeshError::BadIndex { face: f, vertex: v, count: n });
                }
            }
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(MeshError::RepeatedVertex(f));
            }
            for k in 0..3 {
                let e = (t[k], t[(k + 1) % 3]);
                if halfedges.insert(e, f).is_some() {
                    return Err(MeshError::Orientation(e.0, e.1));
                }
            }
        }
        // Boundary half-edges run counterclockwise around the disk.
        let mut next_rim: HashMap<usize, usize> = HashMap::new();
        for &(a, b) in halfedges.keys() {
            if !halfedges.contains_key(&(b, a)) && next_rim.insert(a, b).is_some() {
                return Err(MeshError::NotDisk(format!("vertex {a} is pinched on the boundary")));
            }
        }
        if next_rim.is_empty() {
            return Err(MeshError::NotDisk("surface has no boundary".into()));
        }
        let start = *next_rim.keys().min().unwrap();
        let mut rim = vec![start];
        let mut cur = next_rim[&start];
        while cur != start {
            if rim.len() > next_rim.len() {
                return Err(MeshError::NotDisk("boundary is not a simple loop".into()));
            }
            rim.push(cur);
            cur = *next_rim
                .get(&cur)
                .ok_or_else(|| MeshError::NotDisk("boundary is not closed".into()))?;
        }
        if rim.len() != next_rim.len() {
            return Err(MeshError::NotDisk("boundary has more than one loop".into()));
        }
        let mut is_rim = vec![false; n];
        for &v in &rim {
            is_rim[v] = true;
        }

        // Per-vertex fans: in face (a, b, c), c follows b counterclockwise around a.
        let mut succ: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); n];
        for (f, t) in triangles.iter().enumerate() {
            for k in 0..3 {
                succ[t[k]].push((t[(k + 1) % 3], t[(k + 2) % 3], f));
            }
        }
        let mut stars = Vec::with_capacity(n);
        for (v, s) in succ.iter().enumerate() {
            if s.is_empty() {
                return Err(MeshError::NotDisk(format!("vertex {v} is isolated")));
            }
            let first = if is_rim[v] {
                // The fan starts at the neighbor that nothing precedes.
                match s.iter().find(|(b, _, _)| !s.iter().any(|(_, c, _)| c == b)) {
                    Some(&(b, _, _)) => b,
                    None => return Err(MeshError::NotDisk(format!("rim vertex {v} has a closed fan"))),
                }
            } else {
                s.iter().map(|x| x.0).min().unwrap()
            };
            let mut nbrs = vec![first];
            let mut faces = Vec::with_capacity(s.len());
            let mut cur = first;
            while let Some(&(_, c, f)) = s.iter().find(|(b, _, _)| *b == cur) {
                faces.push(f);
                if c == first {
                    break;
                }
                nbrs.push(c);
                cur = c;
                if faces.len() > s.len() {
                    break;
                }
            }
            if faces.len() != s.len() {
                return Err(MeshError::NotDisk(format!("vertex {v} is non-manifold")));
            }
            let closed = !is_rim[v];
            if closed != (nbrs.len() == faces.len()) {
                return Err(MeshError::NotDisk(format!("vertex {v} has an inconsistent fan")));
            }
            stars.push(Star { nbrs, faces, closed });
        }

        // Connectivity and Euler characteristic.
        let mut seen = vec![false; n];
        let mut stack = vec![triangles[0][0]];
        seen[triangles[0][0]] = true;
        while let Some(v) = stack.pop() {
            for &u in &stars[v].nbrs {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(MeshError::NotDisk(format!("vertex {v} is disconnected")));
        }
        let edges = (halfedges.len() + rim.len()) / 2;
        let euler = n as i64 - edges as i64 + triangles.len() as i64;
        if euler != 1 {
            return Err(MeshError::NotDisk(format!("Euler characteristic {euler}")));
        }
        Ok(ConvexCap { vertices, triangles, rim, is_rim, stars, halfedges })
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> Vec3 {
        self.vertices[v]
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_faces(&self) -> usize {
        self.triangles.len()
    }

    /// Rim loop, counterclockwise seen from above.
    pub fn rim(&self) -> &[usize] {
        &self.rim
    }

    pub fn is_rim(&self, v: usize) -> bool {
        self.is_rim[v]
    }

    pub fn interior_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.vertices.len()).filter(|&v| !self.is_rim[v])
    }

    pub fn num_interior(&self) -> usize {
        self.vertices.len() - self.rim.len()
    }

    pub fn star(&self, v: usize) -> &Star {
        &self.stars[v]
    }

    /// Face containing the directed edge `a → b`, if any.
    pub fn face_left_of(&self, a: usize, b: usize) -> Option<usize> {
        self.halfedges.get(&(a, b)).copied()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.halfedges.contains_key(&(a, b)) || self.halfedges.contains_key(&(b, a))
    }

    /// Undirected edges as `(min, max)` pairs, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<_> = self
            .halfedges
            .keys()
            .map(|&(a, b)| (a.min(b), a.max(b)))
            .collect();
        e.sort_unstable();
        e.dedup();
        e
    }

    /// Whether the undirected edge lies on the rim.
    pub fn is_rim_edge(&self, a: usize, b: usize) -> bool {
        self.halfedges.contains_key(&(a, b)) != self.halfedges.contains_key(&(b, a))
    }

    /// 3D interior angle of face `f` at its `k`-th corner.
    pub fn corner_angle(&self, f: usize, k: usize) -> f64 {
        let t = self.triangles[f];
        corner_angle(
            self.vertices[t[k]],
            self.vertices[t[(k + 1) % 3]],
            self.vertices[t[(k + 2) % 3]],
        )
    }

    /// 3D angle of face `f` at vertex `v`.
    pub fn angle_at(&self, f: usize, v: usize) -> f64 {
        let k = self.triangles[f].iter().position(|&x| x == v).expect("vertex not in face");
        self.corner_angle(f, k)
    }

    pub fn face_normal(&self, f: usize) -> Vec3 {
        let [a, b, c] = self.triangles[f].map(|i| self.vertices[i]);
        (b - a).cross(c - a).normalized()
    }

    /// Angle between the outward normal of `f` and the vertical axis.
    pub fn face_tilt(&self, f: usize) -> f64 {
        let n = self.face_normal(f);
        n.xy().norm().atan2(n.z)
    }

    /// Gradient of the height over face `f` as a function of `(x, y)`.
    pub fn face_gradient(&self, f: usize) -> Vec2 {
        let [a, b, c] = self.triangles[f].map(|i| self.vertices[i]);
        let (u, v) = ((b - a).xy(), (c - a).xy());
        let (du, dv) = (b.z - a.z, c.z - a.z);
        let det = u.cross(v);
        Vec2::new((du * v.y - dv * u.y) / det, (u.x * dv - v.x * du) / det)
    }

    /// Height of face `f`'s plane above the planar point `p`.
    pub fn face_height(&self, f: usize, p: Vec2) -> f64 {
        let a = self.vertices[self.triangles[f][0]];
        a.z + self.face_gradient(f).dot(p - a.xy())
    }

    /// Sum of incident face angles at `v`.
    pub fn angle_sum(&self, v: usize) -> f64 {
        self.stars[v].faces.iter().map(|&f| self.angle_at(f, v)).sum()
    }

    /// Angle defect `2π − Σ` incident face angles at an interior vertex.
    pub fn vertex_curvature(&self, v: usize) -> Result<f64, MeshError> {
        if v >= self.vertices.len() {
            return Err(MeshError::NoSuchVertex(v));
        }
        if self.is_rim[v] {
            return Err(MeshError::RimVertex(v));
        }
        Ok(TAU - self.angle_sum(v))
    }

    /// Surface angle at `v` swept counterclockwise from neighbor `from` to
    /// neighbor `to`. When `from == to` at an interior vertex the sweep is
    /// the whole angle sum.
    pub fn ccw_angle(&self, v: usize, from: usize, to: usize) -> Result<f64, MeshError> {
        let star = &self.stars[v];
        let k0 = star.nbrs.iter().position(|&u| u == from).ok_or(MeshError::NotAdjacent(v, from))?;
        if !star.nbrs.contains(&to) {
            return Err(MeshError::NotAdjacent(v, to));
        }
        let m = star.nbrs.len();
        let mut sum = 0.0;
        let mut k = k0;
        loop {
            if k >= star.faces.len() {
                return Err(MeshError::OpenSector(v));
            }
            sum += self.angle_at(star.faces[k], v);
            k = (k + 1) % m;
            if star.nbrs[k] == to {
                return Ok(sum);
            }
            if !star.closed && k == 0 {
                return Err(MeshError::OpenSector(v));
            }
        }
    }

    /// Bounding radius of the projected vertex set, used to scale tolerances.
    pub fn scale(&self) -> f64 {
        self.vertices
            .iter()
            .map(|p| p.xy().norm())
            .fold(0.0, f64::max)
            .max(1e-300)
    }

    /// Returns the same cap with heights multiplied by `s`.
    pub fn scaled_heights(&self, s: f64) -> ConvexCap {
        let mut c = self.clone();
        for p in &mut c.vertices {
            p.z *= s;
        }
        c
    }
}

/// Summary measurements of a validated cap.
#[derive(Debug, Clone, Serialize)]
pub struct CapMetrics {
    /// Largest face-normal tilt.
    pub phi_actual: f64,
    /// π/2 minus the largest 3D face angle.
    pub acuteness_gap: f64,
    /// π/2 minus the largest projected face angle.
    pub projected_gap: f64,
    /// Total curvature of interior vertices.
    pub omega: f64,
    pub per_vertex_curvature: BTreeMap<usize, f64>,
    pub rim_planar: bool,
    pub max_face_angle: f64,
    pub max_projected_angle: f64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy)]
pub struct ValidateOptions {
    pub angle_mode: AngleMode,
    pub rim_mode: RimMode,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions { angle_mode: AngleMode::NonObtuse, rim_mode: RimMode::Strict }
    }
}

/// Validates with a strict planar rim.
pub fn validate_cap(cap: &ConvexCap, mode: AngleMode) -> Result<CapMetrics, MeshError> {
    validate_cap_with(cap, ValidateOptions { angle_mode: mode, rim_mode: RimMode::Strict })
}

pub fn validate_cap_with(cap: &ConvexCap, opts: ValidateOptions) -> Result<CapMetrics, MeshError> {
    let eps = eps_geom();
    let scale = cap.scale();
    let pts: Vec<Vec2> = cap.vertices.iter().map(|p| p.xy()).collect();

    // Injective projection: every projected face positively oriented and a
    // simple convex rim polygon.
    for (f, t) in cap.triangles.iter().enumerate() {
        let a = signed_area(pts[t[0]], pts[t[1]], pts[t[2]]);
        if a <= eps * scale * scale {
            return Err(MeshError::NonInjective(format!(
                "face {f} projects with signed area {a:.3e}"
            )));
        }
    }
    let rim_pts: Vec<Vec2> = cap.rim.iter().map(|&v| pts[v]).collect();
    let m = rim_pts.len();
    for i in 0..m {
        let t = geom::turn_angle(rim_pts[(i + m - 1) % m], rim_pts[i], rim_pts[(i + 1) % m])?;
        if t <= 0.0 {
            return Err(MeshError::NonConvexRim(cap.rim[i]));
        }
    }

    let rim_z = cap.rim.iter().map(|&v| cap.vertices[v].z.abs()).fold(0.0, f64::max);
    let rim_planar = rim_z <= eps;
    if !rim_planar && opts.rim_mode == RimMode::Strict {
        return Err(MeshError::NonPlanarRim(rim_z));
    }

    let mut max3 = 0.0f64;
    let mut max2 = 0.0f64;
    let mut phi = 0.0f64;
    for (f, t) in cap.triangles.iter().enumerate() {
        for k in 0..3 {
            let a3 = cap.corner_angle(f, k);
            let a2 = angle_between2(pts[t[(k + 1) % 3]] - pts[t[k]], pts[t[(k + 2) % 3]] - pts[t[k]]);
            let bad = match opts.angle_mode {
                AngleMode::StrictAcute => a3 >= PI / 2.0,
                AngleMode::NonObtuse => a3 > PI / 2.0 + eps,
            };
            if bad {
                return Err(MeshError::AngleMode { face: f, angle_deg: a3.to_degrees(), mode: opts.angle_mode });
            }
            max3 = max3.max(a3);
            max2 = max2.max(a2);
        }
        let n = cap.face_normal(f);
        if n.z <= 0.0 {
            return Err(MeshError::NonInjective(format!("face {f} normal points down")));
        }
        phi = phi.max(cap.face_tilt(f));
    }

    let mut per_vertex = BTreeMap::new();
    let mut omega = 0.0;
    for v in cap.interior_vertices() {
        let w = cap.vertex_curvature(v)?;
        if w < -eps {
            return Err(MeshError::Reflex { vertex: v, curvature: w });
        }
        omega += w;
        per_vertex.insert(v, w);
    }
    for (f, t) in cap.triangles.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            let Some(&g) = cap.halfedges.get(&(b, a)) else { continue };
            if g < f {
                continue;
            }
            let c = t[(k + 2) % 3];
            let d = third(cap.triangles[g], a, b);
            let [pa, pb, pc, pd] = [a, b, c, d].map(|i| cap.vertices[i]);
            let vol = (pb - pa).cross(pc - pa).dot(pd - pa);
            let norm = (pb - pa).norm() * (pc - pa).norm() * (pd - pa).norm();
            if vol > eps * norm {
                return Err(MeshError::ConcaveEdge(a.min(b), a.max(b)));
            }
        }
    }

    let alpha = PI / 2.0 - max3;
    let mut warnings = Vec::new();
    if phi > phi_budget(alpha) {
        warnings.push(format!(
            "Phi_actual {:.4}° exceeds phi_budget(α) = {:.4}°",
            phi.to_degrees(),
            phi_budget(alpha).to_degrees()
        ));
    }
    if !rim_planar {
        warnings.push(format!("rim is not planar (max |z| = {rim_z:.3e}); rim-angle checks skipped"));
    }
    Ok(CapMetrics {
        phi_actual: phi,
        acuteness_gap: alpha,
        projected_gap: PI / 2.0 - max2,
        omega,
        per_vertex_curvature: per_vertex,
        rim_planar,
        max_face_angle: max3,
        max_projected_angle: max2,
        warnings,
    })
}

fn third(t: [usize; 3], a: usize, b: usize) -> usize {
    *t.iter().find(|&&x| x != a && x != b).unwrap()
}

/// Vertical projection of a cap, sharing its combinatorics.
#[derive(Debug, Clone)]
pub struct PlanarCap<'a> {
    pub cap: &'a ConvexCap,
    pub points: Vec<Vec2>,
    /// Largest `|projected − 3D|` face angle.
    pub max_distortion: f64,
    /// Largest face tilt, i.e. Φ.
    pub phi_actual: f64,
}

impl<'a> PlanarCap<'a> {
    pub fn point(&self, v: usize) -> Vec2 {
        self.points[v]
    }

    /// Planar angle of face `f` at its `k`-th corner.
    pub fn corner_angle(&self, f: usize, k: usize) -> f64 {
        let t = self.cap.triangles[f];
        let p = |i: usize| self.points[t[i % 3]];
        angle_between2(p(k + 1) - p(k), p(k + 2) - p(k))
    }

    pub fn max_angle(&self) -> f64 {
        (0..self.cap.num_faces())
            .flat_map(|f| (0..3).map(move |k| (f, k)))
            .map(|(f, k)| self.corner_angle(f, k))
            .fold(0.0, f64::max)
    }

    pub fn rim_polygon(&self) -> Vec<Vec2> {
        self.cap.rim.iter().map(|&v| self.points[v]).collect()
    }

    pub fn centroid(&self, f: usize) -> Vec2 {
        let t = self.cap.triangles[f];
        (self.points[t[0]] + self.points[t[1]] + self.points[t[2]]) / 3.0
    }

    pub fn area(&self, f: usize) -> f64 {
        let t = self.cap.triangles[f];
        signed_area(self.points[t[0]], self.points[t[1]], self.points[t[2]])
    }

    /// Distance from `p` to the rim polygon, with the closest rim point.
    pub fn dist_to_rim(&self, p: Vec2) -> (f64, Vec2) {
        let rim = self.rim_polygon();
        let mut best = (f64::INFINITY, p);
        for i in 0..rim.len() {
            let (a, b) = (rim[i], rim[(i + 1) % rim.len()]);
            let ab = b - a;
            let t = ((p - a).dot(ab) / ab.norm2()).clamp(0.0, 1.0);
            let q = a + ab * t;
            let d = p.dist(q);
            if d < best.0 {
                best = (d, q);
            }
        }
        best
    }
}

/// Drops z-coordinates and checks the plane embedding.
pub fn project(cap: &ConvexCap) -> Result<PlanarCap<'_>, MeshError> {
    let points: Vec<Vec2> = cap.vertices.iter().map(|p| p.xy()).collect();
    let scale = cap.scale();
    let mut max_distortion = 0.0f64;
    let mut phi = 0.0f64;
    for (f, t) in cap.triangles.iter().enumerate() {
        let a = signed_area(points[t[0]], points[t[1]], points[t[2]]);
        if a <= eps_geom() * scale * scale {
            return Err(MeshError::NonInjective(format!(
                "face {f} projects with signed area {a:.3e}"
            )));
        }
        for k in 0..3 {
            let p = |i: usize| points[t[(k + i) % 3]];
            let a2 = angle_between2(p(1) - p(0), p(2) - p(0));
            max_distortion = max_distortion.max((a2 - cap.corner_angle(f, k)).abs());
        }
        phi = phi.max(cap.face_tilt(f));
    }
    Ok(PlanarCap { cap, points, max_distortion, phi_actual: phi })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RimAngle {
    pub vertex: usize,
    /// Sum of incident 3D face angles.
    pub psi: f64,
    /// Interior angle of the projected rim polygon.
    pub psi_planar: f64,
}

/// ψ and ψ′ at every rim vertex, in rim order.
pub fn rim_angles(cap: &ConvexCap) -> Result<Vec<RimAngle>, MeshError> {
    let rim_z = cap.rim.iter().map(|&v| cap.vertices[v].z.abs()).fold(0.0, f64::max);
    if rim_z > eps_geom() {
        return Err(MeshError::NonPlanarRim(rim_z));
    }
    let m = cap.rim.len();
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let v = cap.rim[i];
        let prev = cap.vertices[cap.rim[(i + m - 1) % m]].xy();
        let next = cap.vertices[cap.rim[(i + 1) % m]].xy();
        let here = cap.vertices[v].xy();
        let turn = geom::turn_angle(prev, here, next)?;
        out.push(RimAngle { vertex: v, psi: cap.angle_sum(v), psi_planar: PI - turn });
    }
    Ok(out)
}

/// Sum of signed turns of a planar polyline; closed chains include the
/// turns at the first and last points.
pub fn total_turn_planar(points: &[Vec2], closed: bool) -> Result<f64, MeshError> {
    let n = points.len();
    if closed && n < 3 {
        return Err(MeshError::OpenChain);
    }
    let mut sum = 0.0;
    if closed {
        for i in 0..n {
            sum += geom::turn_angle(points[(i + n - 1) % n], points[i], points[(i + 1) % n])?;
        }
    } else {
        for i in 1..n.saturating_sub(1) {
            sum += geom::turn_angle(points[i - 1], points[i], points[i + 1])?;
        }
    }
    Ok(sum)
}

/// Surface turns `π − (inside angle)` along a closed edge cycle whose inside
/// lies to its left.
pub fn surface_cycle_turns(cap: &ConvexCap, cycle: &[usize]) -> Result<Vec<f64>, MeshError> {
    let n = cycle.len();
    if n < 3 {
        return Err(MeshError::OpenChain);
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let (prev, v, next) = (cycle[(i + n - 1) % n], cycle[i], cycle[(i + 1) % n]);
        if !cap.adjacent(v, next) {
            return Err(MeshError::NotAdjacent(v, next));
        }
        out.push(PI - cap.ccw_angle(v, next, prev)?);
    }
    Ok(out)
}

/// Curvature of interior vertices strictly inside the projected polygon.
pub fn enclosed_curvature(cap: &ConvexCap, polygon: &[Vec2], exclude: &[usize]) -> f64 {
    cap.interior_vertices()
        .filter(|v| !exclude.contains(v))
        .filter(|&v| point_in_polygon(cap.vertices[v].xy(), polygon))
        .map(|v| cap.vertex_curvature(v).unwrap_or(0.0))
        .sum()
}

/// `Σ τ + ω_enclosed − 2π` for a closed edge cycle with its inside on the left.
pub fn gauss_bonnet_residual(cap: &ConvexCap, cycle: &[usize]) -> Result<f64, MeshError> {
    let turns: f64 = surface_cycle_turns(cap, cycle)?.iter().sum();
    let poly: Vec<Vec2> = cycle.iter().map(|&v| cap.vertices[v].xy()).collect();
    Ok(turns + enclosed_curvature(cap, &poly, cycle) - TAU)
}

/// Total 3D rim turn `Σ (π − ψ)` and planar rim turn `Σ (π − ψ′)`.
pub fn rim_turns(cap: &ConvexCap) -> Result<(f64, f64), MeshError> {
    let angles = rim_angles(cap)?;
    let t3 = angles.iter().map(|a| PI - a.psi).sum();
    let t2 = angles.iter().map(|a| PI - a.psi_planar).sum();
    Ok((t3, t2))
}

/// Face-angle sum at a vertex recomputed from raw dot products, as an
/// independent cross-check of [`ConvexCap::angle_sum`].
pub fn angle_sum_by_dot(cap: &ConvexCap, v: usize) -> f64 {
    let p = cap.vertices[v];
    cap.triangles
        .iter()
        .filter(|t| t.contains(&v))
        .map(|t| {
            let o: Vec<Vec3> = t.iter().filter(|&&u| u != v).map(|&u| cap.vertices[u] - p).collect();
            (o[0].dot(o[1]) / (o[0].norm() * o[1].norm())).clamp(-1.0, 1.0).acos()
        })
        .sum()
}

/// 3D angle between two planar directions lifted onto the plane of face `f`.
pub fn lifted_angle(cap: &ConvexCap, f: usize, a: Vec2, b: Vec2) -> f64 {
    let g = cap.face_gradient(f);
    angle_between(a.extend(g.dot(a)), b.extend(g.dot(b)))
}
