//! The whole unfolding: project, grow the forest, cut, lay out, certify.

use std::f64::consts::{PI, TAU};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::develop::net::rigid_mismatch_points;
use crate::develop::path::{develop_with_turns, side_turns};
use crate::develop::{
    check_overlap, develop_chain, develop_strip, layout_net, path_angles, turn_distortion, waterfall_strips,
    DevelopError, Net, OverlapReport, Side, StripPartition,
};
use crate::forest::{
    build_forest, choose_origin, gap_intruder, ForestError, OriginMode, QuadrantSystem, SpanningForest,
};
use crate::geom::{delta_perp, eps_geom, max_projection_distortion, omega_bound, phi_budget, turn_bound, Vec2};
use crate::mesh::{
    project, rim_angles, validate_cap_with, AngleMode, CapMetrics, ConvexCap, MeshError, PlanarCap, RimMode,
    ValidateOptions,
};
use crate::monotone::{angle_monotone_implies_rm, left_of, verify_angle_monotone, Chain2D, LeftOf};
use crate::surface::{trace, Location, Trace};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnfoldOptions {
    pub angle_mode: AngleMode,
    pub rim_mode: RimMode,
    pub origin_mode: OriginMode,
    /// Build the waterfall strips and run the per-strip checks.
    pub strips: bool,
}

impl Default for UnfoldOptions {
    fn default() -> Self {
        UnfoldOptions {
            angle_mode: AngleMode::NonObtuse,
            rim_mode: RimMode::Strict,
            origin_mode: OriginMode::ClosestToBoundary,
            strips: true,
        }
    }
}

#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum PipelineError {
    #[error("validate: {0}")]
    Validate(MeshError),
    #[error("project: {0}")]
    Project(MeshError),
    #[error("forest: {0}")]
    Forest(ForestError),
    #[error("layout: {0}")]
    Layout(DevelopError),
}

impl PipelineError {
    pub fn stage(&self) -> &'static str {
        match self {
            PipelineError::Validate(_) => "validate",
            PipelineError::Project(_) => "project",
            PipelineError::Forest(_) => "forest",
            PipelineError::Layout(_) => "layout",
        }
    }
}

/// One checked invariant: a measured value against its bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub name: &'static str,
    pub passed: bool,
    pub measured: f64,
    pub bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Certificate {
    fn le(name: &'static str, measured: f64, bound: f64) -> Self {
        Certificate { name, passed: measured <= bound, measured, bound, detail: None }
    }

    /// A count of failures that must be zero.
    fn count(name: &'static str, failures: usize, detail: Option<String>) -> Self {
        Certificate { name, passed: failures == 0, measured: failures as f64, bound: 0.0, detail }
    }

    fn with(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathReport {
    pub leaf: usize,
    pub root: usize,
    pub quadrant: usize,
    pub edges: usize,
    pub beta: Option<f64>,
    pub identity_residual: f64,
    pub left_of: Option<bool>,
    pub tree_left_of: Option<bool>,
    pub delta_q_max: f64,
    pub developed_monotone: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeReport {
    pub root: usize,
    pub quadrant: usize,
    pub members: usize,
    pub leaves: usize,
    pub omega: f64,
    pub cone: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StripReport {
    pub index: usize,
    pub quadrant: Option<usize>,
    pub faces: usize,
    pub region_area: f64,
    pub left_of: Option<bool>,
    pub apex_angle: f64,
    /// Edge-connected pieces of the strip's faces. Faces are assigned by
    /// centroid, so a thin strip can come apart into several.
    pub pieces: usize,
}

/// Everything measured along the way.
#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics {
    pub schema_version: u32,
    pub vertices: usize,
    pub faces: usize,
    pub phi: f64,
    pub acuteness_gap: f64,
    pub projected_gap: f64,
    pub phi_budget: f64,
    pub within_budget: bool,
    pub omega: f64,
    pub omega_bound: f64,
    pub delta_perp: f64,
    pub max_projection_distortion: f64,
    pub turn_bound: f64,
    pub quadrants: Option<QuadrantSystem>,
    pub trees: Vec<TreeReport>,
    pub paths: Vec<PathReport>,
    pub strips: Vec<StripReport>,
    pub certificates: Vec<Certificate>,
    pub overlap: OverlapReport,
    /// Wall time; left out of serialized output so reports stay
    /// byte-identical across runs.
    #[serde(skip)]
    pub seconds: f64,
}

impl Diagnostics {
    pub fn all_passed(&self) -> bool {
        self.certificates.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> Vec<&Certificate> {
        self.certificates.iter().filter(|c| !c.passed).collect()
    }

    pub fn certificate(&self, name: &str) -> Option<&Certificate> {
        self.certificates.iter().find(|c| c.name == name)
    }
}

/// How far a run got: a certified net, a clean net with failed
/// certificates, or an overlapping net.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Proven,
    Empirical,
    Overlap,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Proven => 0,
            Verdict::Empirical => 1,
            Verdict::Overlap => 2,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Unfolding {
    pub metrics: CapMetrics,
    pub points: Vec<Vec2>,
    pub forest: SpanningForest,
    pub strips: Option<StripPartition>,
    pub net: Net,
    pub diagnostics: Diagnostics,
}

impl Unfolding {
    pub fn verdict(&self) -> Verdict {
        if !self.diagnostics.overlap.clean {
            Verdict::Overlap
        } else if self.diagnostics.all_passed() {
            Verdict::Proven
        } else {
            Verdict::Empirical
        }
    }
}

/// Curvature of each vertex's subtree in the forest.
fn subtree_curvature(cap: &ConvexCap, forest: &SpanningForest) -> Vec<f64> {
    let n = cap.num_vertices();
    let mut depth = vec![0usize; n];
    for v in cap.interior_vertices() {
        depth[v] = forest.path_to_root(v).len();
    }
    let mut order: Vec<usize> = cap.interior_vertices().collect();
    order.sort_by_key(|&v| std::cmp::Reverse(depth[v]));
    let mut w = vec![0.0; n];
    for v in order {
        w[v] += cap.vertex_curvature(v).unwrap_or(0.0);
        if let Some(p) = forest.parent[v] {
            w[p] += w[v];
        }
    }
    w
}

fn left_of_outcome(a: &Chain2D, b: &Chain2D) -> Result<bool, String> {
    match left_of(a, b) {
        Ok(LeftOf::Holds) => Ok(true),
        Ok(LeftOf::Violated { radius, arc }) => {
            Err(format!("violated at radius {radius:.6e} with arc {:.6}°", arc.to_degrees()))
        }
        Err(e) => Err(e.to_string()),
    }
}

/// Face on the requested side of trace piece `i`.
fn side_face(cap: &ConvexCap, tr: &Trace, i: usize, side: Side) -> usize {
    if let Some((a, b)) = tr.piece_edge(i) {
        let (x, y) = match side {
            Side::Left => (cap.face_left_of(a, b), cap.face_left_of(b, a)),
            Side::Right => (cap.face_left_of(b, a), cap.face_left_of(a, b)),
        };
        if let Some(f) = x.or(y) {
            return f;
        }
    }
    tr.faces[i]
}

/// Net image of the first `upto + 1` trace points, through the faces on one
/// side.
fn trace_image(pc: &PlanarCap, net: &Net, tr: &Trace, side: Side, upto: usize) -> Vec<Vec2> {
    let mut out = Vec::with_capacity(upto + 1);
    for i in 0..upto.min(tr.points.len() - 1) {
        let f = side_face(pc.cap, tr, i, side);
        if i == 0 {
            out.push(net.image(pc, f, tr.points[0]));
        }
        out.push(net.image(pc, f, tr.points[i + 1]));
    }
    out
}

/// Net image of strip boundary `k`, seen from its left side, up to where it
/// merges into its left neighbor. `None` when the boundary cannot be traced.
pub fn boundary_image(pc: &PlanarCap, net: &Net, sp: &StripPartition, k: usize) -> Option<Vec<Vec2>> {
    let tr = trace(pc.cap, &pc.points, &sp.boundaries[k].waypoints()).ok()?;
    let upto = trace_index_of(&tr, sp.strips[k % sp.strips.len()].merge);
    Some(trace_image(pc, net, &tr, Side::Left, upto))
}

fn trace_index_of(tr: &Trace, v: Option<usize>) -> usize {
    let last = tr.points.len() - 1;
    match v {
        None => last,
        Some(v) => tr.locs.iter().position(|l| *l == Location::Vertex(v)).unwrap_or(last),
    }
}

/// Runs the full pipeline and collects every certificate.
pub fn cut_and_unfold(cap: &ConvexCap, opts: &UnfoldOptions) -> Result<Unfolding, PipelineError> {
    let start = Instant::now();
    let metrics = validate_cap_with(cap, ValidateOptions { angle_mode: opts.angle_mode, rim_mode: opts.rim_mode })
        .map_err(PipelineError::Validate)?;
    let pc = project(cap).map_err(PipelineError::Project)?;
    let scale = cap.scale();
    let tol = eps_geom() * scale;
    let phi = metrics.phi_actual;
    let omega = metrics.omega;
    let dperp = delta_perp(phi).map_err(|e| PipelineError::Project(e.into()))?;
    let tbound = turn_bound(phi, omega).map_err(|e| PipelineError::Project(e.into()))?;
    let budget = phi_budget(metrics.acuteness_gap);
    let mut certs = Vec::new();

    certs.push(Certificate::le("phi_within_budget", phi, budget));
    let sup = max_projection_distortion(phi).map_err(|e| PipelineError::Project(e.into()))?;
    certs.push(
        Certificate::le("projection_distortion", pc.max_distortion, sup + 1e-9)
            .with(format!("delta_perp(Phi) = {:.6}°", dperp.to_degrees())),
    );
    let obound = omega_bound(phi).map_err(|e| PipelineError::Project(e.into()))?;
    certs.push(Certificate::le("omega_bound", omega, obound + 1e-12));
    if metrics.rim_planar {
        let ra = rim_angles(cap).map_err(PipelineError::Project)?;
        let bad: Vec<usize> =
            ra.iter().filter(|a| a.psi < a.psi_planar - eps_geom()).map(|a| a.vertex).collect();
        let worst = ra.iter().map(|a| a.psi_planar - a.psi).fold(f64::NEG_INFINITY, f64::max);
        certs.push(Certificate {
            name: "rim_angle_lifting",
            passed: bad.is_empty(),
            measured: worst,
            bound: eps_geom(),
            detail: (!bad.is_empty()).then(|| format!("psi < psi' at {bad:?}")),
        });
    }

    // Forest.
    let (qs, forest) = match choose_origin(&pc, opts.origin_mode) {
        Ok(qs) => {
            let f = build_forest(&pc, &qs).map_err(PipelineError::Forest)?;
            (Some(qs), f)
        }
        Err(ForestError::NoInterior) => (None, SpanningForest::empty(cap.num_vertices(), pc.max_angle())),
        Err(e) => return Err(PipelineError::Forest(e)),
    };
    if let Some(qs) = &qs {
        certs.push(Certificate::count("gap_empty", gap_intruder(&pc, qs).map_or(0, |_| 1), None));
    }
    let non_mono: Vec<usize> = forest.paths.iter().filter(|p| p.beta.is_none()).map(|p| p.leaf).collect();
    certs.push(Certificate::count(
        "forest_theta_monotone",
        non_mono.len(),
        (!non_mono.is_empty()).then(|| format!("leaves {non_mono:?}")),
    ));

    // Cut paths.
    let sub_w = subtree_curvature(cap, &forest);
    let mut paths = Vec::new();
    let (mut impl_fail, mut ident_fail, mut lr_fail, mut tree_fail, mut dev_mono_fail) = (0, 0, 0, 0, 0);
    let mut first_lr_detail = None;
    let mut first_tree_detail = None;
    let mut dq_max: f64 = 0.0;
    let mut ident_max: f64 = 0.0;
    for lp in &forest.paths {
        let planar = Chain2D::new(lp.vertices.iter().map(|&v| pc.point(v)).collect());
        match angle_monotone_implies_rm(&planar, forest.theta) {
            Ok(c) if c.holds() => {}
            _ => impl_fail += 1,
        }
        let cp = path_angles(cap, &lp.vertices).map_err(PipelineError::Layout)?;
        let ident = cp.identity_residual();
        ident_max = ident_max.max(ident);
        if ident > 1e-9 {
            ident_fail += 1;
        }
        let l = develop_chain(&cp, Side::Left);
        let r = develop_chain(&cp, Side::Right);
        let (lc, rc) = (Chain2D::new(l.points.clone()), Chain2D::new(r.points.clone()));
        let lr = left_of_outcome(&lc, &rc);
        if let Err(e) = &lr {
            lr_fail += 1;
            first_lr_detail.get_or_insert_with(|| format!("leaf {}: {e}", lp.leaf));
        }
        let proj = cp.projected();
        let mut dq: f64 = 0.0;
        for d in [&l, &r] {
            if let Ok(v) = turn_distortion(&proj, d) {
                dq = v.iter().fold(dq, |m, x| m.max(x.abs()));
            }
        }
        dq_max = dq_max.max(dq);
        let mono = verify_angle_monotone(&lc, PI / 2.0).is_ok() && verify_angle_monotone(&rc, PI / 2.0).is_ok();
        if !mono {
            dev_mono_fail += 1;
        }
        // Tree version: subtrees joining from the left fold their curvature
        // into the left turn.
        let mut turns = side_turns(&cp, Side::Left);
        for i in 1..lp.vertices.len() - 1 {
            let (prev, u, next) = (lp.vertices[i - 1], lp.vertices[i], lp.vertices[i + 1]);
            for &c in &cap.star(u).nbrs {
                if c != prev && forest.parent[c] == Some(u) {
                    let a = cap.ccw_angle(u, next, c).map_err(|e| PipelineError::Layout(e.into()))?;
                    if a < cp.lambda[i] {
                        turns[i] += sub_w[c];
                    }
                }
            }
        }
        let lt = develop_with_turns(&cp, Side::Left, turns);
        let tr = left_of_outcome(&Chain2D::new(lt.points.clone()), &rc);
        if let Err(e) = &tr {
            tree_fail += 1;
            first_tree_detail.get_or_insert_with(|| format!("leaf {}: {e}", lp.leaf));
        }
        paths.push(PathReport {
            leaf: lp.leaf,
            root: *lp.vertices.last().unwrap(),
            quadrant: lp.quadrant,
            edges: lp.vertices.len() - 1,
            beta: lp.beta,
            identity_residual: ident,
            left_of: Some(lr.is_ok()),
            tree_left_of: Some(tr.is_ok()),
            delta_q_max: dq,
            developed_monotone: mono,
        });
    }
    certs.push(Certificate::count("angle_monotone_implies_radially_monotone", impl_fail, None));
    certs.push(Certificate::le("cut_angle_identity", ident_max, 1e-9).with(format!("{ident_fail} paths over")));
    certs.push(Certificate::count("left_of_per_path", lr_fail, first_lr_detail));
    certs.push(Certificate::count("developed_paths_monotone", dev_mono_fail, None));
    certs.push(Certificate::le("turn_distortion", dq_max, tbound + 1e-9));
    certs.push(Certificate::count("left_of_per_tree", tree_fail, first_tree_detail));
    let trees: Vec<TreeReport> = forest
        .trees
        .iter()
        .map(|t| TreeReport {
            root: t.root,
            quadrant: t.quadrant,
            members: t.members.len(),
            leaves: t.leaves.len(),
            omega: t.omega,
            cone: t.cone,
        })
        .collect();
    let w_max = trees.iter().map(|t| t.omega).fold(0.0, f64::max);
    let c_max = trees.iter().map(|t| t.cone).fold(0.0, f64::max);
    certs.push(Certificate { passed: w_max < PI, ..Certificate::le("tree_curvature", w_max, PI) });
    certs.push(Certificate { passed: c_max < PI, ..Certificate::le("tree_cone", c_max, PI) });

    // Net.
    let root_face = qs.map_or(0, |qs| cap.star(qs.origin).faces[0]);
    let mut net = layout_net(&pc, |a, b| forest.is_cut(a, b), root_face).map_err(PipelineError::Layout)?;
    certs.push(Certificate::le("net_isometry", net.isometry_residual(cap), 1e-9));
    certs.push(Certificate::count("net_orientation", usize::from(!net.orientation_ok()), None));

    // Developed cut paths agree with the net wherever no subtree branches
    // off on the side being compared.
    let mut consistency: f64 = 0.0;
    for lp in &forest.paths {
        let cp = path_angles(cap, &lp.vertices).map_err(PipelineError::Layout)?;
        for side in [Side::Left, Side::Right] {
            let dev = develop_chain(&cp, side);
            let mut img = Vec::new();
            let mut end = lp.vertices.len() - 1;
            for i in 0..lp.vertices.len() - 1 {
                let (a, b) = (lp.vertices[i], lp.vertices[i + 1]);
                let f = match side {
                    Side::Left => cap.face_left_of(a, b).or(cap.face_left_of(b, a)),
                    Side::Right => cap.face_left_of(b, a).or(cap.face_left_of(a, b)),
                }
                .expect("edge has a face");
                if i == 0 {
                    img.push(net.vertex_image(cap, f, a));
                }
                img.push(net.vertex_image(cap, f, b));
                let branches = i + 1 < lp.vertices.len() - 1 && {
                    let (u, next) = (b, lp.vertices[i + 2]);
                    let (from, to) = match side {
                        Side::Left => (next, a),
                        Side::Right => (a, next),
                    };
                    let sweep = cap.ccw_angle(u, from, to).unwrap_or(0.0);
                    cap.star(u).nbrs.iter().any(|&c| {
                        c != a && forest.parent[c] == Some(u) && cap.ccw_angle(u, from, c).unwrap_or(TAU) < sweep
                    })
                };
                if branches {
                    end = i + 1;
                    break;
                }
            }
            consistency = consistency.max(rigid_mismatch_points(&img, &dev.points[..=end]));
        }
    }
    certs.push(Certificate::le("developed_paths_match_net", consistency, 1e-7 * scale));

    // Source angle at q.
    let mut strips_report = Vec::new();
    let strips = match (&qs, opts.strips) {
        (Some(qs), true) => match waterfall_strips(&pc, &forest, qs) {
            Ok(sp) => Some(sp),
            Err(e) => {
                certs.push(Certificate::count("strips_built", 1, Some(e.to_string())));
                None
            }
        },
        _ => None,
    };
    if let (Some(qs), Some(sp)) = (&qs, &strips) {
        let q = qs.origin;
        for (f, &s) in sp.strip_of_face.iter().enumerate() {
            net.strip[f] = Some(s);
        }
        let mut apex = vec![0.0; sp.strips.len()];
        for &f in &cap.star(q).faces {
            let k = cap.triangles()[f].iter().position(|&x| x == q).unwrap();
            let t = net.faces[f];
            let (u, v) = (t[(k + 1) % 3] - t[k], t[(k + 2) % 3] - t[k]);
            apex[sp.strip_of_face[f]] += u.cross(v).atan2(u.dot(v));
        }
        let wq = cap.vertex_curvature(q).unwrap_or(0.0);
        let apex_sum: f64 = apex.iter().sum();
        certs.push(Certificate::le("source_angle_sum", (apex_sum - (TAU - wq)).abs(), 1e-9));
        if let Some(p) = forest.parent[q] {
            let fl = cap.face_left_of(q, p).expect("interior edge");
            let fr = cap.face_left_of(p, q).expect("interior edge");
            let o = net.vertex_image(cap, fl, q);
            let (a, b) = (net.vertex_image(cap, fl, p) - o, net.vertex_image(cap, fr, p) - o);
            let open = a.cross(b).atan2(a.dot(b)).abs();
            certs.push(Certificate::le("source_opening", (open - wq).abs(), 1e-9));
        }

        certs.push(Certificate::count(
            "strip_boundaries_noncrossing",
            sp.crossings(tol).len(),
            None,
        ));
        let nm = sp.boundaries.iter().filter(|b| verify_angle_monotone(&b.chain(), qs.theta).is_err()).count();
        certs.push(Certificate::count("strip_boundaries_theta_monotone", nm, None));
        certs.push(Certificate::le("strip_area", sp.area_residual(&pc), 1e-9));

        // Boundary images in the net.
        let traces: Vec<Result<Trace, String>> = sp
            .boundaries
            .iter()
            .map(|b| trace(cap, &pc.points, &b.waypoints()).map_err(|e| e.to_string()))
            .collect();
        let (mut strip_fail, mut order_fail, mut band_fail) = (0, 0, 0);
        let (mut strip_detail, mut order_detail, mut band_detail) = (None, None, None);
        let mut band_mismatch: f64 = 0.0;
        let nb = sp.boundaries.len();
        for (k, st) in sp.strips.iter().enumerate() {
            let mut ok = None;
            if let (Ok(tr), Ok(tl)) = (&traces[st.right], &traces[st.left]) {
                let r_img = trace_image(&pc, &net, tr, Side::Left, trace_index_of(tr, st.merge));
                let l_img = trace_image(&pc, &net, tl, Side::Right, trace_index_of(tl, st.merge));
                let res = left_of_outcome(&Chain2D::new(l_img), &Chain2D::new(r_img));
                if let Err(e) = &res {
                    strip_fail += 1;
                    strip_detail.get_or_insert_with(|| format!("strip {k}: {e}"));
                }
                ok = Some(res.is_ok());
            } else {
                strip_fail += 1;
                let e = [&traces[st.right], &traces[st.left]].into_iter().find_map(|t| t.as_ref().err()).unwrap();
                strip_detail.get_or_insert_with(|| format!("strip {k}: boundary trace failed: {e}"));
            }
            let mut pieces = 0;
            match develop_strip(&pc, &st.faces, |a, b| forest.is_cut(a, b), k) {
                Ok(layout) => {
                    let reference: Vec<[Vec2; 3]> = st.faces.iter().map(|&f| net.faces[f]).collect();
                    band_mismatch = band_mismatch.max(layout.mismatch(&reference));
                    pieces = layout.components;
                }
                Err(e) => {
                    band_fail += 1;
                    band_detail.get_or_insert_with(|| e.to_string());
                }
            }
            strips_report.push(StripReport {
                index: k,
                quadrant: st.quadrant,
                faces: st.faces.len(),
                region_area: st.region_area,
                left_of: ok,
                apex_angle: apex[k],
                pieces,
            });
        }
        // Each boundary seen from the strip on its left lies left of itself
        // seen from the strip on its right.
        for k in 0..nb {
            let tr = match &traces[k] {
                Ok(tr) => tr,
                Err(e) => {
                    order_fail += 1;
                    order_detail.get_or_insert_with(|| format!("boundary {k}: trace failed: {e}"));
                    continue;
                }
            };
            let before = &sp.strips[(k + nb - 1) % nb];
            let after = &sp.strips[k];
            let upto = trace_index_of(tr, before.merge).min(trace_index_of(tr, after.merge));
            let left = trace_image(&pc, &net, tr, Side::Left, upto);
            let right = trace_image(&pc, &net, tr, Side::Right, upto);
            if let Err(e) = left_of_outcome(&Chain2D::new(left), &Chain2D::new(right)) {
                order_fail += 1;
                order_detail.get_or_insert_with(|| format!("boundary {k}: {e}"));
            }
        }
        certs.push(Certificate::count("strip_left_of", strip_fail, strip_detail));
        certs.push(Certificate::count("strip_order", order_fail, order_detail));
        certs.push(Certificate::count("strip_band", band_fail, band_detail));
        certs.push(Certificate::le("strip_development_matches_net", band_mismatch, 1e-7 * scale));
    }

    let overlap = check_overlap(&net.faces, tol);
    certs.push(Certificate::count("overlap", overlap.pairs.len(), None));

    let diagnostics = Diagnostics {
        schema_version: SCHEMA_VERSION,
        vertices: cap.num_vertices(),
        faces: cap.num_faces(),
        phi,
        acuteness_gap: metrics.acuteness_gap,
        projected_gap: metrics.projected_gap,
        phi_budget: budget,
        within_budget: phi <= budget,
        omega,
        omega_bound: obound,
        delta_perp: dperp,
        max_projection_distortion: pc.max_distortion,
        turn_bound: tbound,
        quadrants: qs,
        trees,
        paths,
        strips: strips_report,
        certificates: certs,
        overlap,
        seconds: start.elapsed().as_secs_f64(),
    };
    Ok(Unfolding { metrics, points: pc.points.clone(), forest, strips, net, diagnostics })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn flat_cap_is_certified() {
        let cap = fixtures::flat_hex_cap();
        let u = cut_and_unfold(&cap, &UnfoldOptions::default()).unwrap();
        let failed: Vec<_> = u.diagnostics.failed();
        assert!(failed.is_empty(), "{failed:?}");
        assert_eq!(u.verdict(), Verdict::Proven);
        for (f, t) in cap.triangles().iter().enumerate() {
            for k in 0..3 {
                assert!(u.net.faces[f][k].dist(u.points[t[k]]) < 1e-12);
            }
        }
    }

    #[test]
    fn pyramid_is_clean_but_over_budget() {
        let cap = fixtures::icosahedron_cap();
        let u = cut_and_unfold(&cap, &UnfoldOptions::default()).unwrap();
        assert!(u.diagnostics.overlap.clean);
        assert!(!u.diagnostics.certificate("phi_within_budget").unwrap().passed);
        assert_eq!(u.verdict(), Verdict::Empirical);
        assert!((u.diagnostics.omega.to_degrees() - 60.0).abs() < 1e-6);
        assert!(u.diagnostics.certificate("source_opening").unwrap().passed);
    }

    #[test]
    fn generated_cap_unfolds_cleanly() {
        let cfg = crate::gen::GenConfig::new(60, crate::geom::rad(4.0), 7);
        let cap = crate::gen::generate_cap(&cfg).unwrap();
        let u = cut_and_unfold(&cap, &UnfoldOptions::default()).unwrap();
        assert!(u.diagnostics.overlap.clean);
        assert!(u.strips.is_some());
        for name in ["net_isometry", "cut_angle_identity", "forest_theta_monotone", "strip_area", "source_angle_sum"] {
            assert!(u.diagnostics.certificate(name).unwrap().passed, "{name}");
        }
        let failed: Vec<_> = u.diagnostics.failed().iter().map(|c| (c.name, c.measured, c.bound, c.detail.clone())).collect();
        eprintln!("{failed:?}");
    }
}
