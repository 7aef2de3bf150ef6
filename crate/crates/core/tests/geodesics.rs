mod common;

use std::f64::consts::PI;

use doubled_polygons::geodesics::{over_under_cycle, period4_admissible, trace_from_edge};
use doubled_polygons::{
    distance, half_geodesics, over_under, period4_x3, trace, ClosedGeodesic, Error, Face, PlanePoint, PolygonSpec,
    SurfacePoint, TraceOutcome, UnitDirection,
};
use proptest::prelude::*;

fn unit(n: usize) -> PolygonSpec {
    PolygonSpec::unit(n).unwrap()
}

fn chord_oracle(n: usize, step: usize) -> f64 {
    // distance between edge midpoints `step` apart at unit circumradius
    let apothem = (PI / n as f64).cos();
    2.0 * apothem * (PI * step as f64 / n as f64).sin()
}

fn all_constructed() -> Vec<ClosedGeodesic> {
    let mut out = Vec::new();
    for n in 3..=12 {
        for r in [1.0, 0.37, 4.5] {
            let spec = PolygonSpec::new(n, r).unwrap();
            for step in 1..=n / 2 {
                out.push(over_under(&spec, step).unwrap());
            }
            out.extend(half_geodesics(&spec));
        }
    }
    let tri = unit(3);
    for u in [0.05, 0.2, 0.4, 0.5, 0.61, 0.93] {
        out.push(period4_x3(&tri, u).unwrap());
    }
    out
}

fn assert_geodesic_invariants(c: &ClosedGeodesic) {
    let segs = c.segments();
    let m = segs.len();
    assert_eq!(m, c.period());
    assert!(m.is_multiple_of(2) && m >= 2);
    for i in 0..m {
        let a = &segs[i];
        let b = &segs[(i + 1) % m];
        assert_ne!(a.face, b.face, "faces must alternate");
        assert!(a.end.dist(b.start) < 1e-12);
        assert!(a.length > 0.0);
    }
    assert!(c.max_billiard_mismatch() <= 1e-9);
    let again = c.retrace().unwrap().closed().expect("retrace closes");
    assert_eq!(again.period(), m);
    for (x, y) in again.segments().iter().zip(segs) {
        assert!(x.start.dist(y.start) <= 1e-9 * c.spec().circumradius());
        assert_eq!(x.face, y.face);
    }
}

#[test]
fn constructed_curves_satisfy_invariants() {
    for c in all_constructed() {
        assert_geodesic_invariants(&c);
    }
}

#[test]
fn trace_examples() {
    let sq = unit(4);
    let start = SurfacePoint::top(0.5, 0.5);
    let inward = UnitDirection::new(-1.0, -1.0).unwrap();
    let c = trace(&sq, start, inward, 10).unwrap().closed().unwrap();
    assert_eq!(c.period(), 2);
    assert!((c.length() - 4.0 * (PI / 4.0).cos()).abs() < 1e-12);

    match trace(&sq, SurfacePoint::top(0.0, 0.0), UnitDirection::from_angle(0.0), 5).unwrap() {
        TraceOutcome::VertexHit { vertex, segment_index, .. } => {
            assert_eq!(vertex, 0);
            assert_eq!(segment_index, 0);
        }
        other => panic!("{other:?}"),
    }

    let tri = unit(3);
    let c = trace_from_edge(&tri, 0, 0.5, PI / 6.0, Face::Top, 10).unwrap().closed().unwrap();
    assert_eq!(c.period(), 4);
    assert!((c.length() - 3.0).abs() < 1e-12);
    for s in c.segments() {
        assert!((s.length - 0.75).abs() < 1e-12);
    }
}

#[test]
fn trace_argument_errors() {
    let sq = unit(4);
    let mid = SurfacePoint::top(0.5, 0.5);
    let along = UnitDirection::new(-1.0, 1.0).unwrap();
    assert!(matches!(trace(&sq, mid, along, 4), Err(Error::ParallelLaunch)));
    let outward = UnitDirection::new(1.0, 1.0).unwrap();
    assert!(matches!(trace(&sq, mid, outward, 4), Err(Error::OutwardLaunch)));
    assert!(matches!(trace(&sq, SurfacePoint::top(0.0, 0.0), outward, 0), Err(Error::NoSegments)));
    assert!(matches!(
        trace(&sq, SurfacePoint::top(1.0, 0.0), along, 4),
        Err(Error::StartAtVertex)
    ));
    assert!(trace(&sq, SurfacePoint::top(2.0, 0.0), along, 4).is_err());
}

#[test]
fn truncated_trace_reports_path() {
    // irrational slope on the square never closes
    let sq = unit(4);
    let d = UnitDirection::from_angle(0.3);
    match trace(&sq, SurfacePoint::top(0.01, 0.02), d, 25).unwrap() {
        TraceOutcome::Truncated(path) => {
            assert_eq!(path.segments().len(), 25);
            assert!(!path.is_closed());
            for w in path.segments().windows(2) {
                assert_ne!(w[0].face, w[1].face);
            }
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn over_under_examples() {
    let sq = over_under(&unit(4), 1).unwrap();
    assert_eq!(sq.period(), 4);
    assert!((sq.length() - 4.0).abs() < 1e-12);
    let tri = over_under(&unit(3), 1).unwrap();
    assert_eq!(tri.period(), 6);
    assert!((tri.length() - 3.0 * 3f64.sqrt()).abs() < 1e-12);
    let hex = over_under(&unit(6), 2).unwrap();
    assert_eq!(hex.period(), 6);
    assert!((hex.length() - 9.0).abs() < 1e-12);
    for s in hex.segments() {
        assert!((s.length - 1.5).abs() < 1e-12);
    }
    assert!(matches!(over_under(&unit(6), 0), Err(Error::InvalidStep { step: 0, n: 6 })));
    assert!(matches!(over_under(&unit(6), 4), Err(Error::InvalidStep { step: 4, n: 6 })));
}

#[test]
fn over_under_structure() {
    for n in 3..=16 {
        let spec = unit(n);
        for step in 1..=n / 2 {
            let c = over_under(&spec, step).unwrap();
            let distinct = over_under_cycle(n, step);
            let want = if distinct.is_multiple_of(2) { distinct } else { 2 * distinct };
            assert_eq!(c.period(), want);
            let chord = chord_oracle(n, step);
            assert!((c.length() - want as f64 * chord).abs() < 1e-12 * want as f64);
        }
        let c = over_under(&spec, 1).unwrap();
        assert_eq!(c.period(), if n % 2 == 0 { n } else { 2 * n });
        for j in 0..n {
            let m = spec.edge_midpoint(j);
            assert!(c.segments().iter().any(|s| s.start.dist(m) < 1e-12), "midpoint {j} missed");
        }
    }
}

#[test]
fn half_geodesic_examples() {
    let sq = half_geodesics(&unit(4));
    assert_eq!(sq.len(), 2);
    for c in &sq {
        assert!((c.length() - 2.0 * 2f64.sqrt()).abs() < 1e-12);
    }
    let hex = half_geodesics(&unit(6));
    assert_eq!(hex.len(), 3);
    for c in &hex {
        assert!((c.length() - 2.0 * 3f64.sqrt()).abs() < 1e-12);
        // through the center
        assert!(c.evaluate(c.length() / 4.0).position.norm() < 1e-12);
    }
    assert!(half_geodesics(&unit(5)).is_empty());
}

#[test]
fn period_four_examples() {
    let tri = unit(3);
    let mid = period4_x3(&tri, 0.5).unwrap();
    assert!((mid.length() - 3.0).abs() < 1e-12);
    let traced = trace_from_edge(&tri, 0, 0.5, PI / 6.0, Face::Top, 8).unwrap().closed().unwrap();
    for (a, b) in traced.segments().iter().zip(mid.segments()) {
        assert!(a.start.dist(b.start) < 1e-9 && a.end.dist(b.end) < 1e-9);
    }
    let off = period4_x3(&tri, 0.4).unwrap();
    assert_eq!(off.period(), 4);
    for j in off.junctions() {
        assert!((j.offset - 0.5).abs() > 0.05, "{j:?}");
    }
    let (lo, hi) = period4_admissible(&tri).unwrap();
    assert!(lo > 0.0 && hi < 1.0 && lo < 1e-6 && hi > 1.0 - 1e-6);
    assert!(matches!(period4_x3(&tri, 0.0), Err(Error::InadmissibleOffset { .. })));
    assert!(matches!(period4_x3(&unit(4), 0.5), Err(Error::NotTriangle(4))));
}

#[test]
fn evaluate_examples() {
    let c = over_under(&unit(4), 1).unwrap();
    let p0 = c.evaluate(0.0);
    assert!(p0.position.dist(PlanePoint::new(0.5, 0.5)) < 1e-12);
    let half = c.evaluate(c.length() / 2.0);
    assert!(half.position.dist(PlanePoint::new(-0.5, -0.5)) < 1e-12);
    assert_eq!(half.face, p0.face);
    assert_eq!(c.evaluate(c.length() + 0.25), c.evaluate(0.25));
}

proptest! {
    #[test]
    fn parameterization_is_one_lipschitz(idx in 0usize..200, t in 0.0f64..1.0, s in 0.0f64..1.0) {
        let curves = all_constructed();
        let c = &curves[idx % curves.len()];
        let len = c.length();
        let (t, s) = (t * len, s * len);
        let gap = (t - s).abs();
        let along = gap.min(len - gap);
        let d = distance(c.spec(), &c.evaluate(t), &c.evaluate(s)).unwrap();
        prop_assert!(d <= along + 1e-12 * len.max(1.0));
    }

    #[test]
    fn random_launches_obey_the_billiard_law(n in 3usize..=8, u in 0.01f64..0.99, theta in 0.01f64..3.13) {
        let spec = unit(n);
        match trace_from_edge(&spec, 0, u, theta, Face::Top, 40).unwrap() {
            TraceOutcome::Closed(c) => {
                assert_geodesic_invariants(&c);
            }
            TraceOutcome::Truncated(path) => {
                for w in path.segments().windows(2) {
                    prop_assert_ne!(w[0].face, w[1].face);
                    let mis = doubled_polygons::geodesics::billiard_mismatch(
                        &spec, w[0].exit_edge, w[0].direction(), w[1].direction());
                    prop_assert!(mis.abs() <= 1e-9);
                }
            }
            TraceOutcome::VertexHit { position, vertex, .. } => {
                prop_assert!(position.dist(spec.vertex(vertex)) <= 1e-9);
            }
        }
    }

    #[test]
    fn period_four_family_closes(u in 0.001f64..0.999) {
        let c = period4_x3(&unit(3), u).unwrap();
        // perpendicular drops of 1.5(1-u) and 1.5u, each traversed twice
        prop_assert!((c.length() - 3.0).abs() < 1e-12);
        assert_geodesic_invariants(&c);
    }
}
