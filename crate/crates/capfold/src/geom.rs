//! Vector primitives, angle arithmetic, wedges, and the closed-form
//! distortion and budget formulas.
//!
//! All angles are radians. Degrees appear only at report boundaries.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

/// Environment variable that overrides [`eps_geom`]. Meant for tests.
pub const EPS_ENV: &str = "CAPFOLD_EPS_GEOM";

const DEFAULT_EPS: f64 = 1e-9;

/// Geometric tolerance used for coincidence and degeneracy tests.
///
/// Defaults to `1e-9`; can be overridden once per process through
/// the `CAPFOLD_EPS_GEOM` environment variable.
pub fn eps_geom() -> f64 {
    static EPS: OnceLock<f64> = OnceLock::new();
    *EPS.get_or_init(|| {
        std::env::var(EPS_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .filter(|e| e.is_finite() && *e > 0.0)
            .unwrap_or(DEFAULT_EPS)
    })
}

#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum GeomError {
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("{what} = {value} is outside the domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },
}

pub fn deg(rad: f64) -> f64 {
    rad.to_degrees()
}

pub fn rad(deg: f64) -> f64 {
    deg.to_radians()
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_pi(a: f64) -> f64 {
    let mut x = a.rem_euclid(TAU);
    if x > PI {
        x -= TAU;
    }
    x
}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_tau(a: f64) -> f64 {
    let x = a.rem_euclid(TAU);
    if x >= TAU {
        0.0
    } else {
        x
    }
}

/// Counterclockwise angle from `from` to `to`, in `[0, 2π)`.
pub fn ccw_from(from: f64, to: f64) -> f64 {
    wrap_tau(to - from)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    /// Unit vector at angle `a`.
    pub fn from_angle(a: f64) -> Self {
        Vec2::new(a.cos(), a.sin())
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    pub fn dist(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    /// Direction angle in `(-π, π]`.
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn normalized(self) -> Vec2 {
        self / self.norm()
    }

    /// Rotated by +90°.
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn rotate(self, a: f64) -> Vec2 {
        let (s, c) = a.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn lerp(self, o: Vec2, t: f64) -> Vec2 {
        self + (o - self) * t
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn extend(self, z: f64) -> Vec3 {
        Vec3::new(self.x, self.y, z)
    }
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dist(self, o: Vec3) -> f64 {
        (self - o).norm()
    }

    pub fn normalized(self) -> Vec3 {
        self / self.norm()
    }

    /// Vertical projection to the xy-plane.
    pub fn xy(self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

macro_rules! impl_ops {
    ($t:ident, $($f:ident),+) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, o: $t) -> $t { $t { $($f: self.$f + o.$f),+ } }
        }
        impl AddAssign for $t {
            fn add_assign(&mut self, o: $t) { $(self.$f += o.$f;)+ }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, o: $t) -> $t { $t { $($f: self.$f - o.$f),+ } }
        }
        impl Mul<f64> for $t {
            type Output = $t;
            fn mul(self, s: f64) -> $t { $t { $($f: self.$f * s),+ } }
        }
        impl Div<f64> for $t {
            type Output = $t;
            fn div(self, s: f64) -> $t { $t { $($f: self.$f / s),+ } }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t { $t { $($f: -self.$f),+ } }
        }
    };
}

impl_ops!(Vec2, x, y);
impl_ops!(Vec3, x, y, z);

/// Unsigned angle between two 3D vectors, in `[0, π]`.
pub fn angle_between(a: Vec3, b: Vec3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

/// Unsigned angle between two planar vectors, in `[0, π]`.
pub fn angle_between2(a: Vec2, b: Vec2) -> f64 {
    a.cross(b).abs().atan2(a.dot(b))
}

/// Interior angle of triangle `(a, b, c)` at `a`.
pub fn corner_angle(a: Vec3, b: Vec3, c: Vec3) -> f64 {
    angle_between(b - a, c - a)
}

/// Signed turn at `cur`: the counterclockwise angle from `cur - prev`
/// to `next - cur`, in `(-π, π]`.
pub fn turn_angle(prev: Vec2, cur: Vec2, next: Vec2) -> Result<f64, GeomError> {
    let a = cur - prev;
    let b = next - cur;
    let eps = eps_geom();
    if a.norm() <= eps || b.norm() <= eps {
        return Err(GeomError::Degenerate(format!(
            "coincident consecutive points around ({}, {})",
            cur.x, cur.y
        )));
    }
    Ok(a.cross(b).atan2(a.dot(b)))
}

fn check_tilt(what: &'static str, phi: f64) -> Result<(), GeomError> {
    if !(0.0..FRAC_PI_2).contains(&phi) {
        return Err(GeomError::Domain {
            what,
            value: phi,
            domain: "[0, π/2)",
        });
    }
    Ok(())
}

/// Distortion of a right angle bisected by the steepest direction of a plane
/// tilted by `phi`: `acos(sin²φ / (sin²φ − 2)) − π/2`. This is the bound the
/// budget formulas are built on; see [`max_projection_distortion`] for the
/// true supremum over all angles.
pub fn delta_perp(phi: f64) -> Result<f64, GeomError> {
    check_tilt("phi", phi)?;
    let s2 = phi.sin().powi(2);
    Ok((s2 / (s2 - 2.0)).acos() - FRAC_PI_2)
}

/// Two-term series of [`delta_perp`] about 0: `φ²/2 + φ⁴/12`.
///
/// The quartic coefficient is positive; `φ²/2 − φ⁴/12` drifts away from the
/// exact value at order φ⁴.
pub fn delta_perp_series(phi: f64) -> f64 {
    phi * phi / 2.0 + phi.powi(4) / 12.0
}

/// Angle between the xy-projections of `a` and `b`.
pub fn project_angle(a: Vec3, b: Vec3) -> Result<f64, GeomError> {
    let (pa, pb) = (a.xy(), b.xy());
    let eps = eps_geom();
    if pa.norm() <= eps || pb.norm() <= eps {
        return Err(GeomError::Degenerate(
            "vector projects to a point".to_string(),
        ));
    }
    Ok(angle_between2(pa, pb))
}

/// Direction in a plane tilted by `phi` about the x-axis, at in-plane
/// angle `t` from that axis.
pub fn tilted_direction(phi: f64, t: f64) -> Vec3 {
    Vec3::new(t.cos(), t.sin() * phi.cos(), t.sin() * phi.sin())
}

/// Signed distortion `α′ − α` for an in-plane angle `alpha` whose first ray
/// sits `theta` clockwise of the plane's steepest direction; `theta = α/2`
/// means the angle is bisected by the steepest direction.
pub fn projection_distortion(phi: f64, alpha: f64, theta: f64) -> f64 {
    let a = tilted_direction(phi, FRAC_PI_2 - theta);
    let b = tilted_direction(phi, FRAC_PI_2 - theta + alpha);
    let proj = angle_between2(a.xy(), b.xy());
    proj - angle_between(a, b)
}

/// Exact supremum of `|α′ − α|` over every angle in a plane tilted by `phi`.
///
/// It is `π − 4·atan(√cos φ)`, reached at `tan(α/2) = √cos φ` with the
/// angle bisected by the tilt axis' normal. For φ > 0 it is strictly
/// larger than [`delta_perp`], which is the value at α = 90°.
pub fn max_projection_distortion(phi: f64) -> Result<f64, GeomError> {
    check_tilt("phi", phi)?;
    Ok(PI - 4.0 * phi.cos().sqrt().atan())
}

/// Angle α at which [`max_projection_distortion`] is attained.
pub fn max_projection_distortion_alpha(phi: f64) -> f64 {
    2.0 * phi.cos().sqrt().atan()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepResult {
    pub max_abs: f64,
    pub argmax_alpha: f64,
    pub argmax_theta: f64,
}

/// Brute-force sweep of `|α′ − α|` over α ∈ (0, π) and θ ∈ [0, π) on a grid
/// of `step` radians.
pub fn sweep_distortion(phi: f64, step: f64) -> SweepResult {
    let n = (PI / step).round() as usize;
    let mut best = SweepResult {
        max_abs: -1.0,
        argmax_alpha: 0.0,
        argmax_theta: 0.0,
    };
    for i in 1..n {
        let alpha = i as f64 * step;
        for j in 0..n {
            let theta = j as f64 * step;
            let d = projection_distortion(phi, alpha, theta).abs();
            if d > best.max_abs + 1e-15 {
                best = SweepResult {
                    max_abs: d,
                    argmax_alpha: alpha,
                    argmax_theta: theta,
                };
            }
        }
    }
    best
}

/// For fixed φ and α, the θ on the grid that maximizes `|α′ − α|`.
pub fn sweep_theta(phi: f64, alpha: f64, step: f64) -> (f64, f64) {
    let n = (PI / step).round() as usize;
    let mut best = (0.0, -1.0);
    for j in 0..n {
        let theta = j as f64 * step;
        let d = projection_distortion(phi, alpha, theta).abs();
        if d > best.1 + 1e-15 {
            best = (theta, d);
        }
    }
    best
}

/// Curvature budget of a cap whose faces tilt at most `phi_max`: `2π(1 − cos Φ)`.
pub fn omega_bound(phi_max: f64) -> Result<f64, GeomError> {
    check_tilt("Phi", phi_max)?;
    Ok(TAU * (1.0 - phi_max.cos()))
}

/// Admissible tilt for acuteness gap `alpha`: `√(2/(4π+3))·√α`.
/// Non-positive gaps get a zero budget.
pub fn phi_budget(alpha: f64) -> f64 {
    if alpha <= 0.0 {
        return 0.0;
    }
    (2.0 / (4.0 * PI + 3.0)).sqrt() * alpha.sqrt()
}

/// Small-angle form of the turn-distortion bound: `(2π + 3/2)Φ²`.
pub fn turn_bound_approx(phi_max: f64) -> f64 {
    (TAU + 1.5) * phi_max * phi_max
}

/// Exact prefix turn-distortion bound `3Δ⊥(Φ) + 2Ω`.
pub fn turn_bound(phi_max: f64, omega: f64) -> Result<f64, GeomError> {
    Ok(3.0 * delta_perp(phi_max)? + 2.0 * omega)
}

/// Region bounded by rays at angles `beta` and `beta + width` from `apex`,
/// closed along both rays.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wedge {
    pub apex: Vec2,
    pub beta: f64,
    pub width: f64,
}

impl Wedge {
    pub fn new(apex: Vec2, beta: f64, width: f64) -> Result<Self, GeomError> {
        if !(width > 0.0 && width <= PI) {
            return Err(GeomError::Domain {
                what: "wedge width",
                value: width,
                domain: "(0, π]",
            });
        }
        Ok(Wedge { apex, beta, width })
    }

    pub fn bisector(&self) -> f64 {
        self.beta + self.width / 2.0
    }

    /// Whether the point lies in the wedge (the apex counts as inside).
    pub fn contains_point(&self, p: Vec2) -> bool {
        let d = p - self.apex;
        d.norm() <= eps_geom() || self.contains_angle(d.angle())
    }

    /// Closed-ray membership with `eps_geom` radians of slack.
    pub fn contains_angle(&self, a: f64) -> bool {
        let eps = eps_geom();
        let rel = ccw_from(self.beta, a);
        rel <= self.width + eps || rel >= TAU - eps
    }
}

/// Whether `direction` lies in the wedge's angular range.
pub fn wedge_contains(w: &Wedge, direction: Vec2) -> Result<bool, GeomError> {
    if direction.norm() <= eps_geom() {
        return Err(GeomError::Degenerate("zero direction".to_string()));
    }
    Ok(w.contains_angle(direction.angle()))
}

/// Segment intersection with parameters: returns `(s, t)` such that
/// `a + s(b − a) = c + t(d − c)` when the segments are not parallel.
pub fn segment_params(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> Option<(f64, f64)> {
    let r = b - a;
    let s = d - c;
    let den = r.cross(s);
    if den.abs() <= f64::EPSILON * r.norm() * s.norm() {
        return None;
    }
    let w = c - a;
    Some((w.cross(s) / den, w.cross(r) / den))
}

/// Whether two closed segments properly cross (interiors intersect at a
/// single point away from all endpoints, beyond `tol`).
pub fn segments_cross(a: Vec2, b: Vec2, c: Vec2, d: Vec2, tol: f64) -> bool {
    let o1 = (b - a).cross(c - a);
    let o2 = (b - a).cross(d - a);
    let o3 = (d - c).cross(a - c);
    let o4 = (d - c).cross(b - c);
    let lab = (b - a).norm();
    let lcd = (d - c).norm();
    o1 * o2 < 0.0
        && o3 * o4 < 0.0
        && o1.abs().min(o2.abs()) > tol * lab
        && o3.abs().min(o4.abs()) > tol * lcd
}

/// Distance from `p` to the segment `[a, b]`.
pub fn point_segment_dist(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let l2 = ab.norm2();
    if l2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / l2).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

/// Signed area of the planar triangle (positive when counterclockwise).
pub fn signed_area(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    0.5 * (b - a).cross(c - a)
}

/// Even-odd point-in-polygon test.
pub fn point_in_polygon(p: Vec2, poly: &[Vec2]) -> bool {
    let mut inside = false;
    let n = poly.len();
    let mut j = n.wrapping_sub(1);
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn turn_angle_basic() {
        let o = Vec2::new(0.0, 0.0);
        let a = Vec2::new(1.0, 0.0);
        assert_eq!(turn_angle(o, a, Vec2::new(2.0, 0.0)).unwrap(), 0.0);
        assert!(close(turn_angle(o, a, Vec2::new(1.0, 1.0)).unwrap(), FRAC_PI_2, 1e-15));
        assert!(close(turn_angle(o, a, Vec2::new(1.0, -1.0)).unwrap(), -FRAC_PI_2, 1e-15));
        assert!(matches!(turn_angle(o, o, a), Err(GeomError::Degenerate(_))));
    }

    #[test]
    fn turn_angle_reverses_sign() {
        let p = [Vec2::new(0.3, -1.0), Vec2::new(1.0, 0.2), Vec2::new(1.5, 1.9)];
        let f = turn_angle(p[0], p[1], p[2]).unwrap();
        let b = turn_angle(p[2], p[1], p[0]).unwrap();
        assert!(close(f, -b, 1e-15));
    }

    #[test]
    fn delta_perp_values() {
        assert_eq!(delta_perp(0.0).unwrap(), 0.0);
        assert!(close(deg(delta_perp(rad(10.0)).unwrap()), 0.8771, 1e-4));
        assert!(close(deg(delta_perp(rad(20.0)).unwrap()), 3.5616, 1e-4));
        assert!(close(deg(delta_perp(rad(30.0)).unwrap()), 8.2132, 1e-4));
        assert!(delta_perp(FRAC_PI_2).is_err());
        assert!(delta_perp(-0.1).is_err());
    }

    #[test]
    fn delta_perp_is_value_at_right_angle() {
        for d in [5.0, 15.0, 40.0, 70.0] {
            let phi = rad(d);
            let at90 = projection_distortion(phi, FRAC_PI_2, PI / 4.0).abs();
            assert!(close(at90, delta_perp(phi).unwrap(), 1e-12), "phi={d}");
        }
    }

    #[test]
    fn delta_perp_monotone() {
        let mut prev = 0.0;
        for i in 1..890 {
            let v = delta_perp(rad(i as f64 * 0.1)).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn series_matches_with_positive_quartic() {
        for d in [1.0, 2.0, 5.0] {
            let phi = rad(d);
            let err = (delta_perp(phi).unwrap() - delta_perp_series(phi)).abs();
            assert!(err < 1e-6, "phi={d} err={err}");
        }
        // With the quartic term subtracted the gap at 5° is about 1e-5 rad.
        let phi = rad(5.0);
        let minus = phi * phi / 2.0 - phi.powi(4) / 12.0;
        assert!((delta_perp(phi).unwrap() - minus).abs() > 5e-6);
    }

    #[test]
    fn project_angle_cases() {
        let a = Vec3::new(1.0, 0.0, 0.0);
        let b = Vec3::new(0.0, 2.0, 0.0);
        assert!(close(project_angle(a, b).unwrap(), FRAC_PI_2, 1e-15));
        assert!(project_angle(Vec3::new(0.0, 0.0, 1.0), a).is_err());
        // φ = 30°, α = 70°, bisected by the steepest direction: α′ ≈ 78°.
        let phi = rad(30.0);
        let (theta, _) = sweep_theta(phi, rad(70.0), rad(1.0));
        assert!(close(deg(theta), 35.0, 1e-9));
        let a = tilted_direction(phi, FRAC_PI_2 - theta);
        let b = tilted_direction(phi, FRAC_PI_2 - theta + rad(70.0));
        let ap = deg(project_angle(a, b).unwrap());
        assert!(close(ap, 78.0, 0.2), "{ap}");
    }

    #[test]
    fn sup_distortion_closed_form_matches_sweep() {
        for d in [10.0, 20.0, 30.0] {
            let phi = rad(d);
            let fine = sweep_distortion(phi, rad(0.25));
            let exact = max_projection_distortion(phi).unwrap();
            assert!(fine.max_abs <= exact + 1e-12);
            assert!(exact - fine.max_abs < rad(0.01));
        }
    }

    #[test]
    fn right_angle_is_not_the_worst_case() {
        // At φ = 30° the worst angle is near 85.9°, not 90°, and its
        // distortion exceeds delta_perp.
        let phi = rad(30.0);
        let a = max_projection_distortion_alpha(phi);
        assert!(close(deg(a), 85.9, 0.05));
        let worst = projection_distortion(phi, a, a / 2.0).abs();
        assert!(worst > delta_perp(phi).unwrap() + rad(0.02));
    }

    #[test]
    fn budget_and_omega() {
        assert!(close(deg(phi_budget(rad(4.0))), 5.4264, 1e-3));
        assert!(close(deg(phi_budget(rad(3.0))), 4.6994, 1e-3));
        assert_eq!(phi_budget(0.0), 0.0);
        assert_eq!(omega_bound(0.0).unwrap(), 0.0);
        assert!(close(deg(omega_bound(rad(30.0)).unwrap()), 48.23, 0.01));
        assert!(close(deg(omega_bound(rad(37.3774)).unwrap()), 73.92, 0.01));
    }

    #[test]
    fn omega_bound_below_small_angle_form() {
        for i in 1..90 {
            let phi = rad(i as f64);
            assert!(omega_bound(phi).unwrap() <= PI * phi * phi);
        }
    }

    #[test]
    fn wedge_membership() {
        let w = Wedge::new(Vec2::ZERO, 0.0, FRAC_PI_2).unwrap();
        assert!(wedge_contains(&w, Vec2::new(1.0, 1.0)).unwrap());
        assert!(wedge_contains(&w, Vec2::new(1.0, 0.0)).unwrap());
        assert!(wedge_contains(&w, Vec2::new(0.0, 1.0)).unwrap());
        assert!(!wedge_contains(&w, Vec2::new(-1.0, 0.1)).unwrap());
        let narrow = Wedge::new(Vec2::ZERO, 0.0, rad(87.0)).unwrap();
        assert!(!wedge_contains(&narrow, Vec2::from_angle(rad(88.0))).unwrap());
        assert!(wedge_contains(&w, Vec2::ZERO).is_err());
        assert!(Wedge::new(Vec2::ZERO, 0.0, 0.0).is_err());
        // Wrap-around.
        let w = Wedge::new(Vec2::ZERO, rad(350.0), rad(20.0)).unwrap();
        assert!(w.contains_angle(rad(5.0)));
        assert!(!w.contains_angle(rad(15.0)));
    }

    #[test]
    fn polygon_helpers() {
        let sq = [
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
        ];
        assert!(point_in_polygon(Vec2::new(0.5, 0.5), &sq));
        assert!(!point_in_polygon(Vec2::new(1.5, 0.5), &sq));
        assert!(segments_cross(sq[0], sq[2], sq[1], sq[3], 1e-12));
        assert!(!segments_cross(sq[0], sq[1], sq[1], sq[2], 1e-12));
        assert!(close(point_segment_dist(Vec2::new(0.5, 2.0), sq[2], sq[3]), 1.0, 1e-15));
    }
}
