use std::f64::consts::FRAC_PI_2;

use capfold::fixtures;
use capfold::forest::{build_forest, choose_origin, gap_intruder, ForestError, OriginMode};
use capfold::gen::{generate_cap, GenConfig};
use capfold::geom::rad;
use capfold::mesh::project;
use capfold::monotone::{verify_angle_monotone, Chain2D};

#[test]
fn forest_spans_every_interior_vertex() {
    for (n, seed) in [(30, 1), (120, 2), (300, 3)] {
        let cap = generate_cap(&GenConfig::new(n, rad(10.0), seed)).unwrap();
        let pc = project(&cap).unwrap();
        for mode in [OriginMode::ClosestToBoundary, OriginMode::Central] {
            let qs = choose_origin(&pc, mode).unwrap();
            assert!(gap_intruder(&pc, &qs).is_none());
            let f = build_forest(&pc, &qs).unwrap();
            for v in cap.interior_vertices() {
                let path = f.path_to_root(v);
                assert!(cap.is_rim(*path.last().unwrap()), "vertex {v} does not reach the rim");
                assert!(path[..path.len() - 1].iter().all(|&u| !cap.is_rim(u)));
            }
            // One forest edge per interior vertex.
            assert_eq!(f.edges().len(), cap.num_interior());
            for p in &f.paths {
                let chain = Chain2D::new(p.vertices.iter().map(|&v| pc.point(v)).collect());
                assert!(verify_angle_monotone(&chain, f.theta).is_ok());
                assert!(p.beta.is_some());
            }
            // The origin is a leaf.
            assert!(f.parent.iter().all(|&p| p != Some(qs.origin)));
        }
    }
}

#[test]
fn paths_stay_in_their_quadrant() {
    let cap = generate_cap(&GenConfig::new(150, rad(8.0), 9)).unwrap();
    let pc = project(&cap).unwrap();
    let qs = choose_origin(&pc, OriginMode::Central).unwrap();
    let f = build_forest(&pc, &qs).unwrap();
    assert!(f.theta <= FRAC_PI_2);
    for p in &f.paths {
        for w in p.vertices.windows(2) {
            let d = pc.point(w[1]) - pc.point(w[0]);
            assert!(qs.wedge(p.quadrant).contains_angle(d.angle()));
        }
    }
}

#[test]
fn obtuse_projection_is_refused() {
    let cap = fixtures::flat_disk_cap();
    let pc = project(&cap).unwrap();
    assert!(matches!(choose_origin(&pc, OriginMode::Central), Err(ForestError::ObtuseProjection(_))));
}

#[test]
fn cap_without_interior_has_no_forest() {
    let cap = capfold::mesh::ConvexCap::new(
        vec![
            capfold::geom::Vec3::new(0.0, 0.0, 0.0),
            capfold::geom::Vec3::new(1.0, 0.0, 0.0),
            capfold::geom::Vec3::new(0.0, 1.0, 0.0),
        ],
        vec![[0, 1, 2]],
    )
    .unwrap();
    let pc = project(&cap).unwrap();
    assert!(matches!(choose_origin(&pc, OriginMode::Central), Err(ForestError::NoInterior)));
}
