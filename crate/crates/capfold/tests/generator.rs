use capfold::gen::{generate_cap, generate_cap_report, GenConfig, GenError, Surface};
use capfold::geom::{deg, rad};
use capfold::mesh::io::to_off;
use capfold::mesh::{validate_cap, AngleMode};

#[test]
fn same_seed_same_bytes() {
    let cfg = GenConfig::new(98, rad(33.0), 7);
    let a = to_off(&generate_cap(&cfg).unwrap(), &[]);
    let b = to_off(&generate_cap(&cfg).unwrap(), &[]);
    assert_eq!(a, b);
    let c = to_off(&generate_cap(&GenConfig { seed: 8, ..cfg }).unwrap(), &[]);
    assert_ne!(a, c);
}

#[test]
fn figure_sized_cap_meets_its_target() {
    let (cap, rep) = generate_cap_report(&GenConfig::new(98, rad(33.0), 7)).unwrap();
    assert_eq!(cap.num_vertices(), 98);
    assert!(rep.metrics.phi_actual <= rad(33.0) + 1e-9);
    assert!(deg(rep.metrics.phi_actual) > 30.0);
    assert!(rep.metrics.projected_gap >= 0.0);
}

#[test]
fn both_surfaces_give_valid_caps() {
    for surface in [Surface::Paraboloid, Surface::SphericalCap] {
        for n in [12, 40, 150] {
            let cfg = GenConfig { surface, ..GenConfig::new(n, rad(12.0), n as u64) };
            let cap = generate_cap(&cfg).unwrap_or_else(|e| panic!("{surface:?} n={n}: {e}"));
            let m = validate_cap(&cap, AngleMode::NonObtuse).unwrap();
            assert_eq!(cap.num_vertices(), n);
            assert!(m.phi_actual <= rad(12.0) + 1e-9);
            assert!(m.rim_planar);
        }
    }
}

#[test]
fn bad_configs_are_rejected() {
    assert!(matches!(generate_cap(&GenConfig::new(3, rad(10.0), 0)), Err(GenError::Config(_))));
    assert!(matches!(generate_cap(&GenConfig::new(30, rad(95.0), 0)), Err(GenError::Config(_))));
    assert!(matches!(generate_cap(&GenConfig { jitter: 1.5, ..GenConfig::new(30, rad(10.0), 0) }), Err(GenError::Config(_))));
}
