use capfold::develop::{check_overlap, check_overlap_exhaustive, rigid_mismatch};
use capfold::fixtures;
use capfold::gen::{generate_cap, GenConfig};
use capfold::geom::rad;
use capfold::mesh::project;
use capfold::pipeline::{cut_and_unfold, UnfoldOptions, Verdict};

#[test]
fn flat_hexagon_unfolds_to_itself() {
    let cap = fixtures::flat_hex_cap();
    let u = cut_and_unfold(&cap, &UnfoldOptions::default()).unwrap();
    assert_eq!(u.verdict(), Verdict::Proven);
    assert_eq!(u.verdict().exit_code(), 0);
    let pc = project(&cap).unwrap();
    let planar: Vec<_> = cap.triangles().iter().map(|t| t.map(|v| pc.point(v))).collect();
    assert!(rigid_mismatch(&planar, &u.net.faces) < 1e-9);
}

#[test]
fn icosahedron_is_clean_but_not_certified() {
    let u = cut_and_unfold(&fixtures::icosahedron_cap(), &UnfoldOptions::default()).unwrap();
    assert_eq!(u.verdict(), Verdict::Empirical);
    let d = &u.diagnostics;
    assert!(!d.within_budget);
    assert!(d.certificate("phi_within_budget").is_some_and(|c| !c.passed));
    assert!(d.certificate("omega_bound").is_some_and(|c| c.passed));
    assert!(d.certificate("net_isometry").is_some_and(|c| c.passed));
    assert!((d.omega.to_degrees() - 60.0).abs() < 1e-9);
}

#[test]
fn steep_cap_stays_within_the_curvature_bound() {
    let cap = generate_cap(&GenConfig::new(98, rad(30.0), 7)).unwrap();
    let u = cut_and_unfold(&cap, &UnfoldOptions::default()).unwrap();
    assert!(u.diagnostics.overlap.clean);
    assert!(u.diagnostics.certificate("omega_bound").unwrap().passed);
    assert!(u.diagnostics.certificate("tree_curvature").unwrap().passed);
}

#[test]
fn strips_partition_the_faces() {
    let cap = generate_cap(&GenConfig::new(150, rad(4.0), 3)).unwrap();
    let u = cut_and_unfold(&cap, &UnfoldOptions::default()).unwrap();
    let sp = u.strips.as_ref().unwrap();
    let mut seen = vec![0usize; cap.num_faces()];
    for s in &sp.strips {
        for &f in &s.faces {
            seen[f] += 1;
        }
    }
    assert!(seen.iter().all(|&c| c == 1));
    assert_eq!(sp.boundaries.len(), sp.strips.len());
    assert_eq!(u.verdict(), Verdict::Proven, "{:?}", u.diagnostics.failed());
}

#[test]
fn without_strips_the_net_is_still_checked() {
    let cap = generate_cap(&GenConfig::new(60, rad(4.0), 5)).unwrap();
    let opts = UnfoldOptions { strips: false, ..Default::default() };
    let u = cut_and_unfold(&cap, &opts).unwrap();
    assert!(u.strips.is_none());
    assert!(u.diagnostics.overlap.clean);
}

#[test]
fn sweep_overlap_agrees_with_exhaustive() {
    for seed in 0..5 {
        let cap = generate_cap(&GenConfig::new(80, rad(20.0), seed)).unwrap();
        let u = cut_and_unfold(&cap, &UnfoldOptions::default()).unwrap();
        let (a, b) = (check_overlap(&u.net.faces, 1e-9), check_overlap_exhaustive(&u.net.faces, 1e-9));
        assert_eq!(a.pairs, b.pairs);
    }
    // Deliberately overlapping pair.
    let tris = vec![
        [capfold::geom::Vec2::new(0.0, 0.0), capfold::geom::Vec2::new(1.0, 0.0), capfold::geom::Vec2::new(0.0, 1.0)],
        [capfold::geom::Vec2::new(0.2, 0.2), capfold::geom::Vec2::new(1.2, 0.2), capfold::geom::Vec2::new(0.2, 1.2)],
    ];
    assert_eq!(check_overlap(&tris, 1e-9).pairs, check_overlap_exhaustive(&tris, 1e-9).pairs);
    assert!(!check_overlap(&tris, 1e-9).clean);
}
