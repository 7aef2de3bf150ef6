#![allow(dead_code)]

use std::f64::consts::PI;

use doubled_polygons::{Face, PlanePoint, PolygonSpec, SurfacePoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Vertices computed from scratch, not through the library.
pub fn oracle_vertices(n: usize, r: f64) -> Vec<(f64, f64)> {
    (0..n)
        .map(|j| {
            let a = 2.0 * PI * j as f64 / n as f64;
            (r * a.cos(), r * a.sin())
        })
        .collect()
}

fn inside(n: usize, r: f64, x: f64, y: f64) -> bool {
    let apothem = r * (PI / n as f64).cos();
    (0..n).all(|j| {
        let a = (2 * j + 1) as f64 * PI / n as f64;
        x * a.cos() + y * a.sin() <= apothem
    })
}

pub fn random_point(spec: &PolygonSpec, rng: &mut ChaCha8Rng) -> PlanePoint {
    let r = spec.circumradius();
    loop {
        let x = rng.gen_range(-r..r);
        let y = rng.gen_range(-r..r);
        if inside(spec.n(), r, x, y) {
            return PlanePoint::new(x, y);
        }
    }
}

pub fn random_face(rng: &mut ChaCha8Rng) -> Face {
    if rng.gen_bool(0.5) {
        Face::Top
    } else {
        Face::Bottom
    }
}

pub fn random_surface_point(spec: &PolygonSpec, rng: &mut ChaCha8Rng) -> SurfacePoint {
    SurfacePoint {
        face: random_face(rng),
        position: random_point(spec, rng),
    }
}

/// A point on edge `j` at parameter `s`, from the oracle vertices.
pub fn oracle_edge_point(verts: &[(f64, f64)], j: usize, s: f64) -> (f64, f64) {
    let (ax, ay) = verts[j];
    let (bx, by) = verts[(j + 1) % verts.len()];
    (ax + (bx - ax) * s, ay + (by - ay) * s)
}

fn hyp(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

/// Independent distance: chord on one face, otherwise ternary search of the
/// convex per-edge crossing objective.
pub fn ternary_distance(spec: &PolygonSpec, p: &SurfacePoint, q: &SurfacePoint) -> f64 {
    let a = (p.position.x, p.position.y);
    let b = (q.position.x, q.position.y);
    if p.face == q.face {
        return hyp(a, b);
    }
    let verts = oracle_vertices(spec.n(), spec.circumradius());
    let mut best = f64::INFINITY;
    for j in 0..spec.n() {
        let f = |s: f64| {
            let z = oracle_edge_point(&verts, j, s);
            hyp(a, z) + hyp(z, b)
        };
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if f(m1) < f(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        best = best.min(f(0.5 * (lo + hi))).min(f(0.0)).min(f(1.0));
    }
    best
}
