//! Deterministic synthetic convex caps with a controllable tilt bound, and
//! cap loading.
//!
//! The planar layout starts from concentric rings (one center vertex, ring
//! sizes growing linearly with radius, the outer ring on the unit circle),
//! then minimizes a soft maximum of all triangle angles while periodically
//! re-running Delaunay. Rim vertices slide along the circle. The result is
//! lifted onto a paraboloid or a sphere scaled so the steepest face tilts by
//! exactly the requested angle.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use spade::{DelaunayTriangulation, Point2, Triangulation};

use crate::geom::{Vec2, Vec3};
use crate::mesh::io::{self, IoError, MeshFormat};
use crate::mesh::{validate_cap, AngleMode, CapMetrics, ConvexCap, MeshError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Surface {
    SphericalCap,
    Paraboloid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    /// Number of vertices, at least 4.
    pub n: usize,
    pub surface: Surface,
    /// Largest allowed face tilt, radians in `(0, π/2)`.
    pub target_phi: f64,
    pub seed: u64,
    /// Initial perturbation of interior vertices, as a fraction of the ring
    /// spacing, in `[0, 1)`.
    pub jitter: f64,
}

impl GenConfig {
    pub fn new(n: usize, target_phi: f64, seed: u64) -> Self {
        GenConfig { n, surface: Surface::Paraboloid, target_phi, seed, jitter: 0.3 }
    }
}

#[derive(thiserror::Error, Debug)]
pub enum GenError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("no non-obtuse cap after {attempts} attempts; best largest face angle {best_angle_deg:.3}°: {last}")]
    Exhausted {
        attempts: usize,
        best_angle_deg: f64,
        last: MeshError,
    },
    #[error("triangulation failed: {0}")]
    Triangulation(String),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// What a successful generation run achieved.
#[derive(Debug, Clone, Serialize)]
pub struct GenReport {
    pub attempts: usize,
    pub metrics: CapMetrics,
}

pub const MAX_RETRIES: usize = 20;

pub fn generate_cap(cfg: &GenConfig) -> Result<ConvexCap, GenError> {
    generate_cap_report(cfg).map(|(c, _)| c)
}

pub fn generate_cap_report(cfg: &GenConfig) -> Result<(ConvexCap, GenReport), GenError> {
    if cfg.n < 4 {
        return Err(GenError::Config(format!("n = {} but at least 4 vertices are needed", cfg.n)));
    }
    if !(cfg.target_phi > 0.0 && cfg.target_phi < FRAC_PI_2) {
        return Err(GenError::Config(format!("target Phi {} rad is outside (0, π/2)", cfg.target_phi)));
    }
    if !(0.0..1.0).contains(&cfg.jitter) {
        return Err(GenError::Config(format!("jitter {} is outside [0, 1)", cfg.jitter)));
    }
    let mut last = None;
    let mut best = f64::INFINITY;
    for attempt in 0..=MAX_RETRIES {
        let jitter = (cfg.jitter + 0.04 * attempt as f64).min(0.95);
        let seed = cfg.seed ^ (attempt as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        let (pts, rim_start) = planar_layout(cfg.n, seed, jitter)?;
        let tris = delaunay(&pts)?;
        let cap = lift(&pts, rim_start, tris, cfg.surface, cfg.target_phi)?;
        // The forest needs the projection non-obtuse too; projecting can
        // push a right angle a hair past 90°.
        let checked = validate_cap(&cap, AngleMode::NonObtuse).and_then(|m| {
            if m.projected_gap < 0.0 {
                Err(MeshError::ObtuseProjection(m.max_projected_angle.to_degrees()))
            } else {
                Ok(m)
            }
        });
        match checked {
            Ok(metrics) => {
                return Ok((cap, GenReport { attempts: attempt + 1, metrics }));
            }
            Err(e) => {
                let worst = (0..cap.num_faces())
                    .flat_map(|f| (0..3).map(move |k| (f, k)))
                    .map(|(f, k)| cap.corner_angle(f, k))
                    .fold(0.0, f64::max);
                best = best.min(worst);
                last = Some(e);
            }
        }
    }
    Err(GenError::Exhausted {
        attempts: MAX_RETRIES + 1,
        best_angle_deg: best.to_degrees(),
        last: last.expect("at least one attempt"),
    })
}

/// Reads and validates a cap (non-obtuse mode, planar rim).
pub fn load_cap(path: &Path, format: MeshFormat) -> Result<(ConvexCap, CapMetrics), GenError> {
    let text = std::fs::read_to_string(path).map_err(IoError::from)?;
    let (v, f) = match format {
        MeshFormat::Off => io::parse_off(&text)?,
        MeshFormat::Obj => io::parse_obj(&text)?,
    };
    let cap = io::cap_from_raw(v, f)?;
    let metrics = validate_cap(&cap, AngleMode::NonObtuse)?;
    Ok((cap, metrics))
}

/// Ring sizes for `n` vertices: a center vertex plus `K` rings whose sizes
/// grow roughly by six per ring. The last ring is the rim.
fn ring_counts(n: usize) -> Vec<usize> {
    let mut best: Option<(f64, Vec<usize>)> = None;
    for k in 1..64usize {
        let w = (k * (k + 1) / 2) as f64;
        let c = (n - 1) as f64 / w;
        if c < 3.0 && k > 1 {
            break;
        }
        let mut cnt: Vec<i64> = (1..=k).map(|j| ((c * j as f64).round() as i64).max(3)).collect();
        let mut d = (n - 1) as i64 - cnt.iter().sum::<i64>();
        let mut i = k - 1;
        let mut guard = 0;
        while d != 0 && guard < 10 * k * (n + 1) {
            let s = d.signum();
            if cnt[i] + s >= 3 {
                cnt[i] += s;
                d -= s;
            }
            i = if i == 0 { k - 1 } else { i - 1 };
            guard += 1;
        }
        if d != 0 {
            continue;
        }
        let score = (c - 6.0).abs();
        if best.as_ref().is_none_or(|b| score < b.0) {
            best = Some((score, cnt.into_iter().map(|x| x as usize).collect()));
        }
    }
    best.map(|b| b.1).unwrap_or_else(|| vec![n - 1])
}

/// Optimized planar vertex positions; vertices `rim_start..` lie on the unit
/// circle in counterclockwise order.
pub fn planar_layout(n: usize, seed: u64, jitter: f64) -> Result<(Vec<Vec2>, usize), GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let counts = ring_counts(n);
    let k = counts.len();
    let mut interior = vec![Vec2::ZERO];
    let mut rim_t = Vec::new();
    for (j, &m) in counts.iter().enumerate() {
        let r = (j + 1) as f64 / k as f64;
        let off = rng.gen_range(0.0..TAU);
        for i in 0..m {
            let t = off + TAU * i as f64 / m as f64;
            if j + 1 == k {
                rim_t.push(t);
            } else {
                let dr = jitter * 0.5 / k as f64 * rng.gen_range(-1.0..1.0);
                let dt = jitter * 0.5 * TAU / m as f64 * rng.gen_range(-1.0..1.0);
                interior.push(Vec2::from_angle(t + dt) * (r + dr));
            }
        }
    }
    let ni = interior.len();
    let mut x: Vec<f64> = interior.iter().flat_map(|p| [p.x, p.y]).collect();
    x.extend(&rim_t);

    const ROUNDS: usize = 30;
    const ITERS: usize = 80;
    for round in 0..ROUNDS {
        let pts = unpack(&x, ni);
        let mut tris = delaunay(&pts)?;
        // An interior vertex of degree four or less forces an angle of at
        // least 90°, and the smooth optimizer cannot change the degree.
        // Such vertices are moved into the worst triangle elsewhere.
        if round + 2 < ROUNDS && relocate_low_degree(&mut x, ni, &pts, &tris) {
            tris = delaunay(&unpack(&x, ni))?;
        }
        let beta = if round < 4 { 20.0 } else { 60.0 };
        lbfgs(&mut x, ITERS, |x, g| soft_max_angle(x, ni, &tris, beta, g));
    }
    let pts = unpack(&x, ni);
    Ok((pts, ni))
}

/// Moves interior vertices of degree at most four to the centroid of the
/// interior triangle with the largest angle not touching any moved vertex. Returns
/// whether anything moved.
fn relocate_low_degree(x: &mut [f64], ni: usize, pts: &[Vec2], tris: &[[usize; 3]]) -> bool {
    let mut deg = vec![0usize; pts.len()];
    for t in tris {
        for &v in t {
            deg[v] += 1;
        }
    }
    let mut worst: Vec<(f64, usize)> = tris
        .iter()
        .enumerate()
        .map(|(i, t)| (max_angle_of(pts, t), i))
        .collect();
    worst.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut touched = vec![false; pts.len()];
    let mut slots = worst.into_iter();
    let mut moved = false;
    for v in 0..ni {
        if deg[v] > 4 {
            continue;
        }
        touched[v] = true;
        for t in tris.iter().filter(|t| t.contains(&v)) {
            for &u in t {
                touched[u] = true;
            }
        }
        let Some(t) = slots.by_ref().map(|(_, i)| tris[i]).find(|t| t.iter().all(|&u| u < ni && !touched[u])) else {
            break;
        };
        let c = (pts[t[0]] + pts[t[1]] + pts[t[2]]) * (1.0 / 3.0);
        x[2 * v] = c.x;
        x[2 * v + 1] = c.y;
        for &u in &t {
            touched[u] = true;
        }
        moved = true;
    }
    moved
}

fn max_angle_of(p: &[Vec2], t: &[usize; 3]) -> f64 {
    (0..3)
        .map(|s| {
            let a = p[t[(s + 1) % 3]] - p[t[s]];
            let b = p[t[(s + 2) % 3]] - p[t[s]];
            a.cross(b).abs().atan2(a.dot(b))
        })
        .fold(0.0, f64::max)
}

fn unpack(x: &[f64], ni: usize) -> Vec<Vec2> {
    let mut p: Vec<Vec2> = (0..ni).map(|i| Vec2::new(x[2 * i], x[2 * i + 1])).collect();
    p.extend(x[2 * ni..].iter().map(|&t| Vec2::from_angle(t)));
    p
}

/// `Σ exp(β(A − π/2))` over every triangle corner, with its gradient.
/// Returns `+∞` when a triangle is inverted.
fn soft_max_angle(x: &[f64], ni: usize, tris: &[[usize; 3]], beta: f64, grad: &mut [f64]) -> f64 {
    let p = unpack(x, ni);
    let mut g = vec![Vec2::ZERO; p.len()];
    let mut f = 0.0;
    for t in tris {
        if (p[t[1]] - p[t[0]]).cross(p[t[2]] - p[t[0]]) <= 0.0 {
            return f64::INFINITY;
        }
        for s in 0..3 {
            let (iu, iv, iw) = (t[s], t[(s + 1) % 3], t[(s + 2) % 3]);
            let a = p[iv] - p[iu];
            let b = p[iw] - p[iu];
            let cr = a.cross(b);
            let dt = a.dot(b);
            let ang = cr.atan2(dt);
            let e = (beta * (ang - FRAC_PI_2)).exp();
            f += e;
            let w = beta * e / (cr * cr + dt * dt);
            let da = (Vec2::new(b.y, -b.x) * dt - b * cr) * w;
            let db = (Vec2::new(-a.y, a.x) * dt - a * cr) * w;
            g[iv] += da;
            g[iw] += db;
            g[iu] += -(da + db);
        }
    }
    for i in 0..ni {
        grad[2 * i] = g[i].x;
        grad[2 * i + 1] = g[i].y;
    }
    for (j, &t) in x[2 * ni..].iter().enumerate() {
        let gi = g[ni + j];
        grad[2 * ni + j] = -gi.x * t.sin() + gi.y * t.cos();
    }
    f
}

/// Limited-memory BFGS with a backtracking line search.
fn lbfgs<F>(x: &mut [f64], iters: usize, mut f: F)
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    const M: usize = 7;
    let n = x.len();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
    let mut g = vec![0.0; n];
    let mut fx = f(x, &mut g);
    if !fx.is_finite() {
        return;
    }
    let mut s_hist: Vec<Vec<f64>> = Vec::new();
    let mut y_hist: Vec<Vec<f64>> = Vec::new();
    let mut xn = vec![0.0; n];
    let mut gn = vec![0.0; n];
    for _ in 0..iters {
        // Two-loop recursion.
        let mut d: Vec<f64> = g.iter().map(|v| -v).collect();
        let mut alphas = Vec::with_capacity(s_hist.len());
        for (s, y) in s_hist.iter().zip(&y_hist).rev() {
            let rho = 1.0 / dot(y, s);
            let a = rho * dot(s, &d);
            for (di, yi) in d.iter_mut().zip(y) {
                *di -= a * yi;
            }
            alphas.push((a, rho));
        }
        if let (Some(s), Some(y)) = (s_hist.last(), y_hist.last()) {
            let gamma = dot(s, y) / dot(y, y);
            d.iter_mut().for_each(|v| *v *= gamma);
        } else {
            let gn0 = dot(&g, &g).sqrt().max(1e-300);
            let scale = (1e-3 / gn0).min(1.0);
            d.iter_mut().for_each(|v| *v *= scale);
        }
        for ((s, y), (a, rho)) in s_hist.iter().zip(&y_hist).zip(alphas.into_iter().rev()) {
            let b = rho * dot(y, &d);
            for (di, si) in d.iter_mut().zip(s) {
                *di += (a - b) * si;
            }
        }
        let mut slope = dot(&g, &d);
        if slope >= 0.0 {
            d = g.iter().map(|v| -v * 1e-4).collect();
            slope = dot(&g, &d);
            s_hist.clear();
            y_hist.clear();
        }
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            for i in 0..n {
                xn[i] = x[i] + step * d[i];
            }
            let fnew = f(&xn, &mut gn);
            if fnew.is_finite() && fnew <= fx + 1e-4 * step * slope {
                let s: Vec<f64> = (0..n).map(|i| xn[i] - x[i]).collect();
                let y: Vec<f64> = (0..n).map(|i| gn[i] - g[i]).collect();
                if dot(&s, &y) > 1e-12 * dot(&y, &y).sqrt() * dot(&s, &s).sqrt() {
                    s_hist.push(s);
                    y_hist.push(y);
                    if s_hist.len() > M {
                        s_hist.remove(0);
                        y_hist.remove(0);
                    }
                }
                x.copy_from_slice(&xn);
                g.copy_from_slice(&gn);
                let converged = (fx - fnew).abs() <= 1e-12 * fx.abs();
                fx = fnew;
                accepted = true;
                if converged {
                    return;
                }
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            return;
        }
    }
}

/// Delaunay triangulation; triangles are counterclockwise.
pub fn delaunay(pts: &[Vec2]) -> Result<Vec<[usize; 3]>, GenError> {
    let mut t: DelaunayTriangulation<Point2<f64>> = DelaunayTriangulation::new();
    for (i, p) in pts.iter().enumerate() {
        let h = t
            .insert(Point2::new(p.x, p.y))
            .map_err(|e| GenError::Triangulation(format!("{e:?}")))?;
        if h.index() != i {
            return Err(GenError::Triangulation(format!("duplicate point {i}")));
        }
    }
    let mut out: Vec<[usize; 3]> = t
        .inner_faces()
        .map(|f| f.vertices().map(|v| v.fix().index()))
        .collect();
    for tri in &mut out {
        let (a, b, c) = (pts[tri[0]], pts[tri[1]], pts[tri[2]]);
        if (b - a).cross(c - a) < 0.0 {
            tri.swap(1, 2);
        }
    }
    // Canonical order keeps output byte-stable.
    for tri in &mut out {
        let m = (0..3).min_by_key(|&i| tri[i]).unwrap();
        tri.rotate_left(m);
    }
    out.sort_unstable();
    Ok(out)
}

fn max_tilt(pts: &[Vec2], z: &[f64], tris: &[[usize; 3]]) -> f64 {
    tris.iter()
        .map(|t| {
            let [a, b, c] = t.map(|i| pts[i].extend(z[i]));
            let n = (b - a).cross(c - a);
            n.xy().norm().atan2(n.z)
        })
        .fold(0.0, f64::max)
}

fn lift(
    pts: &[Vec2],
    rim_start: usize,
    tris: Vec<[usize; 3]>,
    surface: Surface,
    target: f64,
) -> Result<ConvexCap, GenError> {
    let (z, tris) = match surface {
        Surface::Paraboloid => {
            let base: Vec<f64> = pts
                .iter()
                .enumerate()
                .map(|(i, p)| if i >= rim_start { 0.0 } else { 1.0 - p.norm2() })
                .collect();
            // Face gradients scale linearly with the height factor.
            let g1 = max_tilt(pts, &base, &tris).tan();
            let c = target.tan() / g1 * (1.0 - 1e-12);
            (base.iter().map(|h| h * c).collect::<Vec<_>>(), tris)
        }
        Surface::SphericalCap => {
            let heights = |radius: f64| -> Vec<f64> {
                let drop = (radius * radius - 1.0).sqrt();
                pts.iter()
                    .enumerate()
                    .map(|(i, p)| if i >= rim_start { 0.0 } else { (radius * radius - p.norm2()).max(0.0).sqrt() - drop })
                    .collect()
            };
            let eval = |radius: f64| {
                let z = heights(radius);
                let t = convexify(pts, &z, tris.clone());
                let tilt = max_tilt(pts, &z, &t);
                (z, t, tilt)
            };
            // Tilt decreases as the sphere grows.
            let (mut lo, mut hi) = (1.0 + 1e-9, 2.0);
            while eval(hi).2 > target {
                lo = hi;
                hi *= 2.0;
            }
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if eval(mid).2 > target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let (z, t, _) = eval(hi);
            (z, t)
        }
    };
    let verts = pts.iter().zip(&z).map(|(p, &h)| p.extend(h)).collect();
    Ok(ConvexCap::new(verts, tris)?)
}

/// Lawson flips until every interior edge is convex for the lifted heights
/// (the upper hull of the lifted points).
pub fn convexify(pts: &[Vec2], z: &[f64], mut tris: Vec<[usize; 3]>) -> Vec<[usize; 3]> {
    let lift = |i: usize| pts[i].extend(z[i]);
    let mut he: HashMap<(usize, usize), usize> = HashMap::new();
    for (f, t) in tris.iter().enumerate() {
        for k in 0..3 {
            he.insert((t[k], t[(k + 1) % 3]), f);
        }
    }
    let mut stack: Vec<(usize, usize)> = tris
        .iter()
        .flat_map(|t| (0..3).map(move |k| (t[k], t[(k + 1) % 3])))
        .filter(|&(a, b)| a < b)
        .collect();
    let mut budget = 50 * tris.len() + 100;
    while let Some((a, b)) = stack.pop() {
        if budget == 0 {
            break;
        }
        budget -= 1;
        let (Some(&f), Some(&g)) = (he.get(&(a, b)), he.get(&(b, a))) else { continue };
        let c = *tris[f].iter().find(|&&v| v != a && v != b).unwrap();
        let d = *tris[g].iter().find(|&&v| v != a && v != b).unwrap();
        let (pa, pb, pc, pd) = (lift(a), lift(b), lift(c), lift(d));
        let vol = (pb - pa).cross(pc - pa).dot(pd - pa);
        if vol <= 1e-14 * (pb - pa).norm() * (pc - pa).norm() * (pd - pa).norm() {
            continue;
        }
        // Quad a, d, b, c must be strictly convex in projection to flip.
        let q = [pts[a], pts[d], pts[b], pts[c]];
        let convex = (0..4).all(|i| (q[(i + 1) % 4] - q[i]).cross(q[(i + 2) % 4] - q[(i + 1) % 4]) > 0.0);
        if !convex {
            continue;
        }
        for t in [tris[f], tris[g]] {
            for k in 0..3 {
                he.remove(&(t[k], t[(k + 1) % 3]));
            }
        }
        tris[f] = [a, d, c];
        tris[g] = [d, b, c];
        for (idx, t) in [(f, tris[f]), (g, tris[g])] {
            for k in 0..3 {
                he.insert((t[k], t[(k + 1) % 3]), idx);
            }
        }
        for e in [(a, d), (d, b), (b, c), (c, a)] {
            stack.push((e.0.min(e.1), e.0.max(e.1)));
        }
    }
    tris
}

/// Largest planar triangle angle of a layout, for diagnostics.
pub fn max_planar_angle(pts: &[Vec2], tris: &[[usize; 3]]) -> f64 {
    tris.iter()
        .flat_map(|t| {
            (0..3).map(move |k| {
                let a = pts[t[(k + 1) % 3]] - pts[t[k]];
                let b = pts[t[(k + 2) % 3]] - pts[t[k]];
                a.cross(b).abs().atan2(a.dot(b))
            })
        })
        .fold(0.0, f64::max)
}

/// Hand-built regular pentagonal pyramid with rim on the unit circle whose
/// faces tilt by `phi`.
pub fn pentagonal_pyramid(phi: f64) -> ConvexCap {
    let inradius = (PI / 5.0).cos();
    let h = inradius * phi.tan();
    let mut v = vec![Vec3::new(0.0, 0.0, h)];
    for k in 0..5 {
        let a = TAU * k as f64 / 5.0;
        v.push(Vec3::new(a.cos(), a.sin(), 0.0));
    }
    let t = (0..5).map(|k| [0, k + 1, (k + 1) % 5 + 1]).collect();
    ConvexCap::new(v, t).expect("pyramid is a disk")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{deg, omega_bound, rad};
    use crate::mesh::{io::to_off, rim_angles};

    #[test]
    fn ring_counts_sum_to_n() {
        for n in 4..300 {
            let c = ring_counts(n);
            assert_eq!(c.iter().sum::<usize>() + 1, n, "n={n}");
            assert!(c.iter().all(|&m| m >= 3));
        }
        assert_eq!(ring_counts(6), vec![5]);
    }

    #[test]
    fn deterministic_in_seed() {
        let cfg = GenConfig::new(40, rad(10.0), 7);
        let a = generate_cap(&cfg).unwrap();
        let b = generate_cap(&cfg).unwrap();
        assert_eq!(to_off(&a, &[]), to_off(&b, &[]));
        let c = generate_cap(&GenConfig { seed: 8, ..cfg }).unwrap();
        assert_ne!(to_off(&a, &[]), to_off(&c, &[]));
    }

    #[test]
    fn generated_caps_are_valid() {
        for (n, surface) in [(20, Surface::Paraboloid), (60, Surface::SphericalCap), (120, Surface::Paraboloid)] {
            let cfg = GenConfig { n, surface, target_phi: rad(20.0), seed: 3, jitter: 0.3 };
            let (cap, rep) = generate_cap_report(&cfg).unwrap();
            assert_eq!(cap.num_vertices(), n);
            let m = &rep.metrics;
            assert!(m.phi_actual <= cfg.target_phi + 1e-12);
            assert!((m.phi_actual - cfg.target_phi).abs() < 1e-6);
            assert!(m.omega <= omega_bound(m.phi_actual).unwrap() + 1e-9);
            for &v in cap.rim() {
                assert_eq!(cap.vertex(v).z, 0.0);
            }
            for r in rim_angles(&cap).unwrap() {
                assert!(r.psi >= r.psi_planar - 1e-9);
            }
        }
    }

    #[test]
    fn n6_spherical_is_the_pyramid() {
        let phi = rad(37.3774);
        let cfg = GenConfig { n: 6, surface: Surface::SphericalCap, target_phi: phi, seed: 1, jitter: 0.0 };
        let (cap, rep) = generate_cap_report(&cfg).unwrap();
        let hand = validate_cap(&pentagonal_pyramid(phi), AngleMode::NonObtuse).unwrap();
        assert!((rep.metrics.phi_actual - hand.phi_actual).abs() < 1e-9);
        assert!((rep.metrics.omega - hand.omega).abs() < 1e-9);
        assert!((deg(rep.metrics.max_face_angle) - deg(hand.max_face_angle)).abs() < 1e-7);
        assert_eq!(cap.num_faces(), 5);
    }

    #[test]
    fn rejects_bad_config() {
        assert!(matches!(generate_cap(&GenConfig::new(3, 0.1, 0)), Err(GenError::Config(_))));
        assert!(matches!(generate_cap(&GenConfig::new(10, 0.0, 0)), Err(GenError::Config(_))));
        assert!(matches!(generate_cap(&GenConfig::new(10, 2.0, 0)), Err(GenError::Config(_))));
    }

    #[test]
    fn layout_is_well_shaped() {
        for n in [30, 100] {
            let (pts, ni) = planar_layout(n, 5, 0.3).unwrap();
            let tris = delaunay(&pts).unwrap();
            assert!(deg(max_planar_angle(&pts, &tris)) < 88.0);
            for p in &pts[ni..] {
                assert!((p.norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn convexify_fixes_a_reflex_edge() {
        // Square with a diagonal that is a valley for these heights.
        let pts = [Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(1.0, 1.0), Vec2::new(0.0, 1.0)];
        let z = [0.0, 1.0, 0.0, 1.0];
        let t = convexify(&pts, &z, vec![[0, 1, 2], [0, 2, 3]]);
        let mut diag: Vec<_> = t.iter().flat_map(|t| t.iter().copied()).collect();
        diag.sort();
        assert_eq!(diag, vec![0, 1, 1, 2, 3, 3]);
    }
}
