//! Small closed-form caps used by tests, examples and the CLI.

use std::f64::consts::PI;

use crate::geom::{Vec2, Vec3};
use crate::mesh::ConvexCap;

/// Circumradius of a regular pentagon with unit edges.
pub fn pentagon_radius() -> f64 {
    1.0 / (2.0 * (PI / 5.0).sin())
}

/// Top cap of a regular icosahedron with unit edges: apex 0 over a rim
/// pentagon `1..=5` lying in `z = 0`. Rim vertex `k + 1` sits at angle
/// `−126° + 72°·k`, so the edge `1–2` is horizontal at the bottom.
pub fn icosahedron_cap() -> ConvexCap {
    let r = pentagon_radius();
    let h = (1.0 - r * r).sqrt();
    let mut v = vec![Vec3::new(0.0, 0.0, h)];
    for k in 0..5 {
        let a = (-126.0f64 + 72.0 * k as f64).to_radians();
        v.push(Vec3::new(r * a.cos(), r * a.sin(), 0.0));
    }
    let t = (0..5).map(|k| [0, k + 1, (k + 1) % 5 + 1]).collect();
    ConvexCap::new(v, t).expect("icosahedron cap is a disk")
}

/// The chord `a, b, c, d` across the icosahedron cap's projection: parallel to
/// rim edge `1–2`, halfway between it and the apex. `a` lies on rim edge
/// `5–1`, `b` on apex edge `0–1`, `c` on apex edge `0–2`, `d` on rim edge `2–3`.
pub fn icosahedron_chord(cap: &ConvexCap) -> [Vec2; 4] {
    let p = |i: usize| cap.vertex(i).xy();
    let y0 = p(1).y / 2.0;
    let at = |u: Vec2, w: Vec2| {
        let t = (y0 - u.y) / (w.y - u.y);
        u.lerp(w, t)
    };
    [at(p(5), p(1)), at(p(0), p(1)), at(p(0), p(2)), at(p(2), p(3))]
}

/// Flat regular hexagon with a center vertex: six equilateral triangles.
pub fn flat_hex_cap() -> ConvexCap {
    let mut v = vec![Vec3::ZERO];
    for k in 0..6 {
        let a = PI / 3.0 * k as f64;
        v.push(Vec3::new(a.cos(), a.sin(), 0.0));
    }
    let t = (0..6).map(|k| [0, k + 1, (k + 1) % 6 + 1]).collect();
    ConvexCap::new(v, t).expect("hexagon is a disk")
}

/// Flat square with a center vertex; the four center angles are right angles.
pub fn right_triangle_cap() -> ConvexCap {
    let mut v = vec![Vec3::ZERO];
    for k in 0..4 {
        let a = PI / 2.0 * k as f64;
        v.push(Vec3::new(a.cos(), a.sin(), 0.0));
    }
    let t = (0..4).map(|k| [0, k + 1, (k + 1) % 4 + 1]).collect();
    ConvexCap::new(v, t).expect("square is a disk")
}

/// A flat triangulated disk: a center vertex, a ring of six at radius 1/2 and
/// twelve rim vertices on the unit circle. Every triangle is acute.
pub fn flat_disk_cap() -> ConvexCap {
    let mut v = vec![Vec3::ZERO];
    for k in 0..6 {
        let a = PI / 3.0 * k as f64;
        v.push(Vec3::new(0.5 * a.cos(), 0.5 * a.sin(), 0.0));
    }
    for k in 0..12 {
        let a = PI / 6.0 * k as f64 - PI / 12.0;
        v.push(Vec3::new(a.cos(), a.sin(), 0.0));
    }
    let mut t = Vec::new();
    for k in 0..6 {
        let (i, j) = (k + 1, (k + 1) % 6 + 1);
        t.push([0, i, j]);
        let (r0, r1, r2) = (7 + 2 * k, 7 + 2 * k + 1, 7 + (2 * k + 2) % 12);
        t.push([i, r0, r1]);
        t.push([i, r1, j]);
        t.push([j, r1, r2]);
    }
    ConvexCap::new(v, t).expect("disk")
}
