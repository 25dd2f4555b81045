use std::f64::consts::TAU;

use capfold::fixtures;
use capfold::geom::deg;
use capfold::mesh::io::{cap_from_raw, parse_obj, parse_off, to_obj, to_off, IoError};
use capfold::mesh::{
    gauss_bonnet_residual, project, rim_angles, rim_turns, validate_cap, validate_cap_with, AngleMode, MeshError,
    RimMode, ValidateOptions,
};

#[test]
fn icosahedron_metrics() {
    let cap = fixtures::icosahedron_cap();
    let m = validate_cap(&cap, AngleMode::NonObtuse).unwrap();
    assert!((deg(m.phi_actual) - 37.3774).abs() < 1e-3);
    assert!((deg(m.omega) - 60.0).abs() < 1e-9);
    assert!(m.rim_planar);
    let (t3, t2) = rim_turns(&cap).unwrap();
    assert!((deg(t3) - 300.0).abs() < 1e-9);
    assert!((deg(t2) - 360.0).abs() < 1e-9);
    // Turning of the rim plus curvature inside closes the circuit.
    assert!((t3 + m.omega - TAU).abs() < 1e-12);
    assert!(gauss_bonnet_residual(&cap, cap.rim()).unwrap().abs() < 1e-12);
}

#[test]
fn lifting_never_shrinks_rim_angles() {
    for cap in [fixtures::icosahedron_cap(), fixtures::flat_hex_cap()] {
        for r in rim_angles(&cap).unwrap() {
            assert!(r.psi >= r.psi_planar - 1e-12);
        }
    }
}

#[test]
fn off_and_obj_round_trip() {
    let cap = fixtures::icosahedron_cap();
    for text in [to_off(&cap, &[(0, 1)]), to_obj(&cap, &[(0, 1)])] {
        let (v, f) = if text.starts_with("OFF") { parse_off(&text) } else { parse_obj(&text) }.unwrap();
        let back = cap_from_raw(v, f).unwrap();
        assert_eq!(back.triangles(), cap.triangles());
        for (a, b) in back.vertices().iter().zip(cap.vertices()) {
            assert_eq!(a, b);
        }
    }
}

#[test]
fn clockwise_files_are_reoriented() {
    let cap = fixtures::flat_hex_cap();
    let flipped: Vec<[usize; 3]> = cap.triangles().iter().map(|t| [t[0], t[2], t[1]]).collect();
    let back = cap_from_raw(cap.vertices().to_vec(), flipped).unwrap();
    assert_eq!(back.triangles(), cap.triangles());
}

#[test]
fn one_flipped_triangle_is_rejected() {
    let cap = fixtures::flat_hex_cap();
    let mut t = cap.triangles().to_vec();
    t[2].swap(1, 2);
    assert!(matches!(cap_from_raw(cap.vertices().to_vec(), t), Err(IoError::Mesh(MeshError::Orientation(..)))));
}

#[test]
fn quads_and_garbage_are_parse_errors() {
    assert!(matches!(parse_off("OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n"), Err(IoError::NonTriangle { .. })));
    assert!(matches!(parse_off("OFF\n3 1 0\n0 0 zero\n"), Err(IoError::Parse { .. })));
}

#[test]
fn angle_modes() {
    // Four right angles at the center.
    let cap = fixtures::right_triangle_cap();
    assert!(validate_cap(&cap, AngleMode::NonObtuse).is_ok());
    assert!(matches!(validate_cap(&cap, AngleMode::StrictAcute), Err(MeshError::AngleMode { .. })));
    assert!(matches!(validate_cap(&fixtures::flat_disk_cap(), AngleMode::NonObtuse), Err(MeshError::AngleMode { .. })));
}

#[test]
fn lifted_rim_needs_relaxed_mode() {
    let cap = fixtures::icosahedron_cap();
    let raised: Vec<_> = cap
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, p)| if i == 3 { capfold::geom::Vec3::new(p.x, p.y, 0.01) } else { *p })
        .collect();
    let cap = capfold::mesh::ConvexCap::new(raised, cap.triangles().to_vec()).unwrap();
    let strict = ValidateOptions { angle_mode: AngleMode::NonObtuse, rim_mode: RimMode::Strict };
    assert!(matches!(validate_cap_with(&cap, strict), Err(MeshError::NonPlanarRim(_))));
    let relaxed = ValidateOptions { rim_mode: RimMode::Relaxed, ..strict };
    let m = validate_cap_with(&cap, relaxed).unwrap();
    assert!(!m.rim_planar && !m.warnings.is_empty());
}

#[test]
fn flat_projection_is_exact() {
    let cap = fixtures::flat_hex_cap();
    let pc = project(&cap).unwrap();
    assert_eq!(pc.max_distortion, 0.0);
    assert!((deg(pc.max_angle()) - 60.0).abs() < 1e-12);
}
