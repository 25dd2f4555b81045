use capfold::geom::{rad, Vec2};
use capfold::monotone::{
    angle_monotone_implies_rm, circle_oracle_all_sources, cone_of, is_radially_monotone, left_of, verify_angle_monotone,
    Chain2D, LeftOf, MonotoneError,
};

fn chain(pts: &[(f64, f64)]) -> Chain2D {
    Chain2D::new(pts.iter().map(|&(x, y)| Vec2::new(x, y)).collect())
}

#[test]
fn staircase_is_angle_and_radially_monotone() {
    let c = chain(&[(0.0, 0.0), (1.0, 0.2), (1.3, 1.0), (2.5, 1.4), (2.8, 2.9)]);
    assert!(verify_angle_monotone(&c, rad(90.0)).is_ok());
    assert!(is_radially_monotone(&c).unwrap().is_none());
    assert!(circle_oracle_all_sources(&c));
    assert!(angle_monotone_implies_rm(&c, rad(90.0)).unwrap().holds());
}

#[test]
fn hairpin_is_neither() {
    let c = chain(&[(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (0.5, 1.0)]);
    assert!(verify_angle_monotone(&c, rad(90.0)).is_err());
    assert!(is_radially_monotone(&c).unwrap().is_some());
    assert!(!circle_oracle_all_sources(&c));
}

// Radial monotonicity does not need angle monotonicity: edge directions spread over 100°.
#[test]
fn radially_monotone_but_wide() {
    let c = chain(&[(0.0, 0.0), (1.0, 0.0), (1.6428, 0.766), (1.4691, 1.7509)]);
    assert!(is_radially_monotone(&c).unwrap().is_none());
    assert!(verify_angle_monotone(&c, rad(90.0)).is_err());
}

#[test]
fn cone_spans_edge_directions() {
    let c = chain(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0)]);
    let k = cone_of(&c).unwrap();
    assert!((k.measure() - rad(90.0)).abs() < 1e-12);
}

#[test]
fn left_of_orders_fanned_chains() {
    let a = chain(&[(0.0, 0.0), (1.0, 1.0), (2.0, 2.5)]);
    let b = chain(&[(0.0, 0.0), (1.0, -0.2), (2.5, 0.1)]);
    assert_eq!(left_of(&a, &b).unwrap(), LeftOf::Holds);
    assert!(!left_of(&b, &a).unwrap().holds());
    assert!(left_of(&a, &a).unwrap().holds());
}

#[test]
fn left_of_rejects_bad_inputs() {
    let a = chain(&[(0.0, 0.0), (1.0, 0.0)]);
    let moved = chain(&[(5.0, 5.0), (6.0, 5.0)]);
    let short = chain(&[(0.0, 0.0)]);
    assert!(matches!(left_of(&a, &moved), Err(MonotoneError::NoCommonSource)));
    assert!(matches!(left_of(&a, &short), Err(MonotoneError::TooShort)));
}
