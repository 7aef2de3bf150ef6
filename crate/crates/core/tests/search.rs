use std::collections::HashSet;
use std::f64::consts::PI;

use doubled_polygons::geometry::DihedralElement;
use doubled_polygons::search::{
    canonical_key, closure_residual, find_closed_geodesics, find_closed_geodesics_with, minind_evidence, orbit_size,
    FamilyExtent, SearchOptions, ShootingState,
};
use doubled_polygons::{half_geodesics, ClosedGeodesic, CurveKind, Execution, Face, PolygonSpec};

fn unit(n: usize) -> PolygonSpec {
    PolygonSpec::unit(n).unwrap()
}

#[test]
fn residual_examples() {
    let r = closure_residual(&unit(4), &ShootingState::new(0.5, PI / 2.0, 2));
    assert!(r.du.abs() < 1e-12 && r.dtheta.abs() < 1e-12 && r.face_parity_ok);
    let r = closure_residual(&unit(3), &ShootingState::new(0.5, PI / 6.0, 4));
    assert!(r.du.abs() < 1e-12 && r.dtheta.abs() < 1e-12 && r.face_parity_ok);
    // straight from the midpoint lands on the opposite vertex
    let r = closure_residual(&unit(3), &ShootingState::new(0.5, PI / 2.0, 2));
    assert!(r.vertex_hit);
    let r = closure_residual(&unit(3), &ShootingState::new(0.45, PI / 2.0, 2));
    assert!(!r.vertex_hit && r.du.abs() + r.dtheta.abs() > 0.1);
}

#[test]
fn odd_polygons_have_no_period_two_curves() {
    for n in [3, 5, 7, 9] {
        let cat = find_closed_geodesics(&unit(n), 2, (256, 256)).unwrap();
        assert!(cat.is_empty(), "n={n}");
    }
}

#[test]
fn even_polygons_have_half_geodesics_only() {
    for n in [4, 6, 8, 10] {
        let spec = unit(n);
        let cat = find_closed_geodesics(&spec, 2, (256, 256)).unwrap();
        assert_eq!(cat.curve_count(), n / 2, "n={n}");
        assert_eq!(cat.entries.len(), 1);
        let halves: HashSet<_> = half_geodesics(&spec).iter().map(canonical_key).collect();
        assert_eq!(halves.len(), 1);
        for e in &cat.entries {
            assert!(halves.contains(&e.canonical_key));
            assert_eq!(e.minind.index, Some(2));
            assert!((e.representative.theta - PI / 2.0).abs() < 1e-8);
        }
    }
}

#[test]
fn triangle_period_four_family() {
    let cat = find_closed_geodesics(&unit(3), 4, (256, 256)).unwrap();
    assert_eq!(cat.entries.len(), 1);
    let e = &cat.entries[0];
    assert!((e.representative.theta - PI / 6.0).abs() < 1e-8);
    assert!((e.representative.u - 0.5).abs() < 1e-8);
    assert!(matches!(e.extent, FamilyExtent::Interval { .. }));
    assert!(e.members.len() >= 64);
    assert_eq!(e.minind.index, Some(6));
    for r in e.reports() {
        assert!(r.lower_bound() >= 6);
    }
    // members are launched from the grid offsets at the family angle
    for m in &e.members {
        let r = closure_residual(&unit(3), &ShootingState::new(m.u, e.representative.theta, 4));
        assert!(r.du.abs() < 1e-10 && r.dtheta.abs() < 1e-10);
    }
}

fn image(curve: &ClosedGeodesic, g: DihedralElement) -> ClosedGeodesic {
    let spec = curve.spec();
    let junctions: Vec<_> = curve
        .junctions()
        .iter()
        .map(|j| {
            let (e, u) = g.apply_edge(spec.n(), j.edge, j.offset);
            (e, spec.point_on_edge(e, u))
        })
        .collect();
    ClosedGeodesic::from_junctions(spec, &junctions, Face::Top, CurveKind::Search).unwrap()
}

#[test]
fn catalog_entries_are_genuine_and_symmetry_closed() {
    for (n, m) in [(3, 4), (3, 6), (4, 2), (4, 4), (5, 4), (6, 4)] {
        let spec = unit(n);
        let cat = find_closed_geodesics(&spec, m, (128, 128)).unwrap();
        let keys: HashSet<_> = cat.entries.iter().map(|e| e.canonical_key.clone()).collect();
        assert_eq!(keys.len(), cat.entries.len(), "duplicate entries for n={n} m={m}");
        for e in &cat.entries {
            let r = closure_residual(&spec, &e.representative);
            assert!(r.du.abs() < 1e-10 && r.dtheta.abs() < 1e-10);
            assert_eq!(e.geodesic.period(), m);
            assert!(e.geodesic.max_billiard_mismatch() <= 1e-9);
            let again = e.geodesic.retrace().unwrap().closed().expect("entry retraces");
            assert_eq!(again.period(), m);
            assert_eq!(2 * n % e.orbit_size, 0);
            assert_eq!(orbit_size(&e.geodesic), e.orbit_size);
            for g in DihedralElement::all(n) {
                let img = image(&e.geodesic, g);
                assert!(keys.contains(&canonical_key(&img)));
                // launching the image from its own junctions on edge 0 closes too
                for (i, j) in img.junctions().iter().enumerate() {
                    if j.edge != 0 {
                        continue;
                    }
                    let d = img.segments()[i].direction();
                    let theta = spec.edge_tangent(0).cross(d).atan2(spec.edge_tangent(0).dot(d));
                    let r = closure_residual(&spec, &ShootingState::new(j.offset, theta, m));
                    assert!(r.du.abs() < 1e-9 && r.dtheta.abs() < 1e-9, "n={n} m={m} {r:?}");
                }
            }
        }
    }
}

#[test]
fn doubling_the_seed_grid_keeps_every_family() {
    for (n, m) in [(3, 4), (4, 4), (5, 6)] {
        let spec = unit(n);
        let coarse = find_closed_geodesics(&spec, m, (128, 128)).unwrap();
        let fine = find_closed_geodesics(&spec, m, (256, 256)).unwrap();
        let fine_keys: HashSet<_> = fine.entries.iter().map(|e| &e.canonical_key).collect();
        for e in &coarse.entries {
            assert!(fine_keys.contains(&e.canonical_key), "n={n} m={m}: family lost");
        }
        for e in &fine.entries {
            if let Some(c) = coarse.entries.iter().find(|c| c.canonical_key == e.canonical_key) {
                assert!(e.members.len() >= c.members.len());
                assert_eq!(e.minind.index, c.minind.index);
            }
        }
    }
}

#[test]
fn execution_modes_agree() {
    let spec = unit(5);
    let seq = SearchOptions {
        exec: Execution::Sequential,
        ..SearchOptions::with_grid(64, 64)
    };
    let par = SearchOptions {
        exec: Execution::Parallel,
        ..SearchOptions::with_grid(64, 64)
    };
    assert_eq!(
        find_closed_geodesics_with(&spec, 4, &seq).unwrap(),
        find_closed_geodesics_with(&spec, 4, &par).unwrap()
    );
}

#[test]
fn evidence_examples() {
    let t = minind_evidence(&unit(4), 2, 8).unwrap();
    assert_eq!(t.bound, Some(2));
    assert_eq!(t.rows.len(), 1);
    assert!(t.statement.contains("not a proof"));
    let t = minind_evidence(&unit(3), 4, 16).unwrap();
    assert_eq!(t.bound, Some(6));
    assert_eq!(t.rows[0].families, 0);
    assert_eq!(t.rows[1].min_index, Some(6));
    assert!(t.statement.contains(">= 6"));
}
