//! Laying out the cut surface face by face.

use std::collections::VecDeque;

use serde::Serialize;

use super::DevelopError;
use crate::geom::Vec2;
use crate::mesh::{ConvexCap, PlanarCap};

/// Placed copies of the faces of a cap, indexed like its triangles, with the
/// corners in the same order.
#[derive(Debug, Clone, Serialize)]
pub struct Net {
    pub faces: Vec<[Vec2; 3]>,
    /// Face each face was unfolded from; `None` for the root.
    pub parent: Vec<Option<usize>>,
    pub root_face: usize,
    /// Strip each face belongs to, once strips are known.
    pub strip: Vec<Option<usize>>,
}

impl Net {
    /// Image in the net of the planar point `p`, taken through face `f`.
    pub fn image(&self, pc: &PlanarCap, f: usize, p: Vec2) -> Vec2 {
        let t = pc.cap.triangles()[f];
        let [a, b, c] = t.map(|v| pc.point(v));
        let det = (b - a).cross(c - a);
        let l1 = (p - a).cross(c - a) / det;
        let l2 = (b - a).cross(p - a) / det;
        let [x, y, z] = self.faces[f];
        x + (y - x) * l1 + (z - x) * l2
    }

    /// Image of mesh vertex `v` as a corner of face `f`.
    pub fn vertex_image(&self, cap: &ConvexCap, f: usize, v: usize) -> Vec2 {
        let k = cap.triangles()[f].iter().position(|&x| x == v).expect("vertex of face");
        self.faces[f][k]
    }

    pub fn bbox(&self) -> (Vec2, Vec2) {
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for t in &self.faces {
            for p in t {
                lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
                hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
            }
        }
        (lo, hi)
    }

    /// Largest relative edge-length error against the 3D faces.
    pub fn isometry_residual(&self, cap: &ConvexCap) -> f64 {
        let mut worst: f64 = 0.0;
        for (f, t) in cap.triangles().iter().enumerate() {
            for k in 0..3 {
                let l3 = cap.vertex(t[k]).dist(cap.vertex(t[(k + 1) % 3]));
                let l2 = self.faces[f][k].dist(self.faces[f][(k + 1) % 3]);
                worst = worst.max((l2 - l3).abs() / l3);
            }
        }
        worst
    }

    /// Whether every placed face keeps its counterclockwise orientation.
    pub fn orientation_ok(&self) -> bool {
        self.faces.iter().all(|[a, b, c]| (*b - *a).cross(*c - *a) > 0.0)
    }
}

/// The third corner `C` of a counterclockwise triangle `A B C` with
/// `|AC| = la`, `|BC| = lb`.
pub fn place_third(a: Vec2, b: Vec2, la: f64, lb: f64) -> Vec2 {
    let d = a.dist(b);
    let u = (b - a) / d;
    let x = (la * la - lb * lb + d * d) / (2.0 * d);
    let h = (la * la - x * x).max(0.0).sqrt();
    a + u * x + u.perp() * h
}

/// Places face `f` given the images of two of its corners.
fn place_face(cap: &ConvexCap, f: usize, known: [(usize, Vec2); 2]) -> [Vec2; 3] {
    let t = cap.triangles()[f];
    // Rotate so that corners k, k+1 are the known ones, in face order.
    let k = (0..3).find(|&k| t[k] == known[0].0 && t[(k + 1) % 3] == known[1].0).or_else(|| {
        (0..3).find(|&k| t[k] == known[1].0 && t[(k + 1) % 3] == known[0].0)
    });
    let k = k.expect("known corners share an edge of the face");
    let img = |v: usize| if known[0].0 == v { known[0].1 } else { known[1].1 };
    let (a, b, c) = (t[k], t[(k + 1) % 3], t[(k + 2) % 3]);
    let pa = img(a);
    let pb = img(b);
    let pc = place_third(pa, pb, cap.vertex(a).dist(cap.vertex(c)), cap.vertex(b).dist(cap.vertex(c)));
    let mut out = [Vec2::ZERO; 3];
    out[k] = pa;
    out[(k + 1) % 3] = pb;
    out[(k + 2) % 3] = pc;
    out
}

/// Isometric copy of face `f` with its first corner at its projection and
/// first edge along its projected direction.
fn place_root(cap: &ConvexCap, pc: &PlanarCap, f: usize) -> [Vec2; 3] {
    let t = cap.triangles()[f];
    let a = pc.point(t[0]);
    let dir = (pc.point(t[1]) - a).normalized();
    let b = a + dir * cap.vertex(t[0]).dist(cap.vertex(t[1]));
    place_face(cap, f, [(t[0], a), (t[1], b)])
}

/// Unfolds every face across uncut edges, breadth first from `root_face`.
/// The uncut edges must connect all faces.
pub fn layout_net(
    pc: &PlanarCap,
    is_cut: impl Fn(usize, usize) -> bool,
    root_face: usize,
) -> Result<Net, DevelopError> {
    let cap = pc.cap;
    let nf = cap.num_faces();
    let mut faces = vec![[Vec2::ZERO; 3]; nf];
    let mut placed = vec![false; nf];
    let mut parent = vec![None; nf];
    faces[root_face] = place_root(cap, pc, root_face);
    placed[root_face] = true;
    let mut queue = VecDeque::from([root_face]);
    while let Some(f) = queue.pop_front() {
        let t = cap.triangles()[f];
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            if is_cut(a, b) {
                continue;
            }
            let Some(g) = cap.face_left_of(b, a) else { continue };
            if placed[g] {
                continue;
            }
            faces[g] = place_face(cap, g, [(b, faces[f][(k + 1) % 3]), (a, faces[f][k])]);
            placed[g] = true;
            parent[g] = Some(f);
            queue.push_back(g);
        }
    }
    if let Some(f) = placed.iter().position(|p| !p) {
        return Err(DevelopError::Disconnected(f));
    }
    Ok(Net { faces, parent, root_face, strip: vec![None; nf] })
}

/// One strip laid out on its own: `faces[i]` is the placement of the i-th
/// input face, `component[i]` the edge-connected piece it was reached in.
/// Each piece starts from its own root.
#[derive(Debug, Clone, PartialEq)]
pub struct StripLayout {
    pub faces: Vec<[Vec2; 3]>,
    pub component: Vec<usize>,
    pub components: usize,
}

/// Unfolds one strip's faces on their own, across edges shared inside the
/// strip and not cut.
pub fn develop_strip(
    pc: &PlanarCap,
    faces: &[usize],
    is_cut: impl Fn(usize, usize) -> bool,
    strip: usize,
) -> Result<StripLayout, DevelopError> {
    let cap = pc.cap;
    let index: std::collections::HashMap<usize, usize> = faces.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    if index.len() != faces.len() {
        return Err(DevelopError::Degenerate(format!("strip {strip} lists a face twice")));
    }
    let mut out: Vec<Option<[Vec2; 3]>> = vec![None; faces.len()];
    let mut component = vec![0; faces.len()];
    let mut components = 0;
    for seed in 0..faces.len() {
        if out[seed].is_some() {
            continue;
        }
        out[seed] = Some(place_root(cap, pc, faces[seed]));
        component[seed] = components;
        let mut queue = VecDeque::from([faces[seed]]);
        while let Some(f) = queue.pop_front() {
            let t = cap.triangles()[f];
            let here = out[index[&f]].unwrap();
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                if is_cut(a, b) {
                    continue;
                }
                let Some(g) = cap.face_left_of(b, a) else { continue };
                let Some(&gi) = index.get(&g) else { continue };
                if out[gi].is_some() {
                    continue;
                }
                out[gi] = Some(place_face(cap, g, [(b, here[(k + 1) % 3]), (a, here[k])]));
                component[gi] = components;
                queue.push_back(g);
            }
        }
        components += 1;
    }
    Ok(StripLayout { faces: out.into_iter().map(Option::unwrap).collect(), component, components })
}

impl StripLayout {
    /// Worst rigid mismatch of any piece against `reference`, which holds
    /// placements of the same faces in the same order.
    pub fn mismatch(&self, reference: &[[Vec2; 3]]) -> f64 {
        (0..self.components)
            .map(|c| {
                let pick = |src: &[[Vec2; 3]]| -> Vec<[Vec2; 3]> {
                    src.iter().zip(&self.component).filter(|(_, &k)| k == c).map(|(t, _)| *t).collect()
                };
                rigid_mismatch(&pick(&self.faces), &pick(reference))
            })
            .fold(0.0, f64::max)
    }
}

/// Largest distance between two placements of the same faces after the
/// best rigid motion (rotation and translation, no reflection).
pub fn rigid_mismatch(a: &[[Vec2; 3]], b: &[[Vec2; 3]]) -> f64 {
    let pa: Vec<Vec2> = a.iter().flatten().copied().collect();
    let pb: Vec<Vec2> = b.iter().flatten().copied().collect();
    rigid_mismatch_points(&pa, &pb)
}

/// [`rigid_mismatch`] for matched point lists.
pub fn rigid_mismatch_points(pa: &[Vec2], pb: &[Vec2]) -> f64 {
    if pa.is_empty() {
        return 0.0;
    }
    let n = pa.len() as f64;
    let ca = pa.iter().fold(Vec2::ZERO, |s, p| s + *p) / n;
    let cb = pb.iter().fold(Vec2::ZERO, |s, p| s + *p) / n;
    // Optimal rotation angle from the cross-covariance.
    let (mut sd, mut sc) = (0.0, 0.0);
    for (p, q) in pa.iter().zip(pb) {
        let (u, v) = (*p - ca, *q - cb);
        sd += u.dot(v);
        sc += u.cross(v);
    }
    let ang = sc.atan2(sd);
    pa.iter()
        .zip(pb)
        .map(|(p, q)| ((*p - ca).rotate(ang) + cb).dist(*q))
        .fold(0.0, f64::max)
}
