//! Planar primitives for a single face of X_n: the regular n-gon itself.
//!
//! Orientation convention: vertex 0 sits on the positive x-axis and vertices
//! are numbered counterclockwise, so the interior is to the left of every
//! edge `v_j -> v_{j+1}`. Edge `j` has outward normal at angle `(2j+1)π/n`.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default absolute classification tolerance at unit circumradius.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Orbit points closer than this are merged.
const ORBIT_MERGE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PlanePoint {
    pub x: f64,
    pub y: f64,
}

impl PlanePoint {
    pub const ORIGIN: PlanePoint = PlanePoint { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn from_polar(r: f64, angle: f64) -> Self {
        Self::new(r * angle.cos(), r * angle.sin())
    }

    #[inline]
    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3-D cross product.
    #[inline]
    pub fn cross(self, other: Self) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn dist(self, other: Self) -> f64 {
        (self - other).norm()
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Rotation about the origin.
    #[inline]
    pub fn rotated(self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    #[inline]
    pub fn lerp(self, other: Self, t: f64) -> Self {
        self + (other - self) * t
    }
}

impl Add for PlanePoint {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for PlanePoint {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for PlanePoint {
    type Output = Self;
    #[inline]
    fn mul(self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s)
    }
}

impl Neg for PlanePoint {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

impl fmt::Display for PlanePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A unit-length direction vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitDirection {
    dx: f64,
    dy: f64,
}

impl UnitDirection {
    /// Normalizes `(dx, dy)`; `None` for the zero or a non-finite vector.
    pub fn new(dx: f64, dy: f64) -> Option<Self> {
        let n = dx.hypot(dy);
        if !(n.is_finite() && n > 0.0) {
            return None;
        }
        Some(Self { dx: dx / n, dy: dy / n })
    }

    pub fn from_angle(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self { dx: c, dy: s }
    }

    #[inline]
    pub fn dx(self) -> f64 {
        self.dx
    }

    #[inline]
    pub fn dy(self) -> f64 {
        self.dy
    }

    #[inline]
    pub fn as_vector(self) -> PlanePoint {
        PlanePoint::new(self.dx, self.dy)
    }

    pub fn angle(self) -> f64 {
        self.dy.atan2(self.dx)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundaryLocation {
    Interior,
    /// Offset `u` runs from vertex `edge` (u = 0) to vertex `edge + 1` (u = 1).
    OnEdge { edge: usize, offset: f64 },
    AtVertex(usize),
    Outside,
}

impl BoundaryLocation {
    pub fn is_inside(self) -> bool {
        !matches!(self, BoundaryLocation::Outside)
    }

    pub fn is_boundary(self) -> bool {
        matches!(
            self,
            BoundaryLocation::OnEdge { .. } | BoundaryLocation::AtVertex(_)
        )
    }
}

/// Immutable description of a regular n-gon of the given circumradius.
#[derive(Clone, Debug, PartialEq)]
pub struct PolygonSpec {
    n: usize,
    circumradius: f64,
    vertices: Vec<PlanePoint>,
    /// Outward unit normals, one per edge.
    normals: Vec<PlanePoint>,
    /// Unit edge directions `v_j -> v_{j+1}`.
    tangents: Vec<PlanePoint>,
    side_length: f64,
    apothem: f64,
}

impl PolygonSpec {
    pub fn new(n: usize, circumradius: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::TooFewSides(n));
        }
        if !(circumradius.is_finite() && circumradius > 0.0) {
            return Err(Error::BadRadius(circumradius));
        }
        let nf = n as f64;
        let vertices: Vec<_> = (0..n)
            .map(|j| PlanePoint::from_polar(circumradius, 2.0 * PI * j as f64 / nf))
            .collect();
        let normals: Vec<_> = (0..n)
            .map(|j| PlanePoint::from_polar(1.0, (2 * j + 1) as f64 * PI / nf))
            .collect();
        let tangents = normals.iter().map(|nv| PlanePoint::new(-nv.y, nv.x)).collect();
        Ok(Self {
            n,
            circumradius,
            vertices,
            normals,
            tangents,
            side_length: 2.0 * circumradius * (PI / nf).sin(),
            apothem: circumradius * (PI / nf).cos(),
        })
    }

    /// Unit circumradius.
    pub fn unit(n: usize) -> Result<Self> {
        Self::new(n, 1.0)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn circumradius(&self) -> f64 {
        self.circumradius
    }

    #[inline]
    pub fn side_length(&self) -> f64 {
        self.side_length
    }

    #[inline]
    pub fn apothem(&self) -> f64 {
        self.apothem
    }

    #[inline]
    pub fn vertices(&self) -> &[PlanePoint] {
        &self.vertices
    }

    #[inline]
    pub fn vertex(&self, j: usize) -> PlanePoint {
        self.vertices[j % self.n]
    }

    /// Endpoints of edge `j`.
    #[inline]
    pub fn edge(&self, j: usize) -> (PlanePoint, PlanePoint) {
        (self.vertices[j % self.n], self.vertices[(j + 1) % self.n])
    }

    #[inline]
    pub fn edge_normal(&self, j: usize) -> PlanePoint {
        self.normals[j % self.n]
    }

    #[inline]
    pub fn edge_tangent(&self, j: usize) -> PlanePoint {
        self.tangents[j % self.n]
    }

    pub fn edge_midpoint(&self, j: usize) -> PlanePoint {
        self.normals[j % self.n] * self.apothem
    }

    /// Point on edge `j` at normalized offset `u`.
    pub fn point_on_edge(&self, j: usize, u: f64) -> PlanePoint {
        let (a, b) = self.edge(j);
        a.lerp(b, u)
    }

    /// Normalized offset of the orthogonal projection of `p` onto edge `j`'s line.
    pub fn edge_offset(&self, j: usize, p: PlanePoint) -> f64 {
        (p - self.vertex(j)).dot(self.edge_tangent(j)) / self.side_length
    }

    /// Signed distance from `p` to edge `j`'s line, positive on the interior side.
    #[inline]
    pub fn inset(&self, j: usize, p: PlanePoint) -> f64 {
        self.apothem - p.dot(self.normals[j % self.n])
    }

    pub fn check_edge(&self, j: usize) -> Result<()> {
        if j < self.n {
            Ok(())
        } else {
            Err(Error::EdgeIndex { index: j, n: self.n })
        }
    }

    /// Tolerance `tol` expressed at unit circumradius, scaled to this polygon.
    #[inline]
    pub fn scaled(&self, tol: f64) -> f64 {
        tol * self.circumradius
    }

    pub fn classify(&self, p: PlanePoint, tol: f64) -> BoundaryLocation {
        classify_point(self, p, tol)
    }
}

pub fn build_polygon(n: usize, circumradius: f64) -> Result<PolygonSpec> {
    PolygonSpec::new(n, circumradius)
}

/// Locates `p` relative to the polygon. Vertex proximity wins over edge
/// membership so that vertex passages are never mistaken for edge crossings.
pub fn classify_point(spec: &PolygonSpec, p: PlanePoint, tol: f64) -> BoundaryLocation {
    let tol = tol.max(0.0);
    if let Some((j, d)) = spec
        .vertices
        .iter()
        .enumerate()
        .map(|(j, v)| (j, v.dist(p)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
    {
        if d <= tol {
            return BoundaryLocation::AtVertex(j);
        }
    }
    let (edge, inset) = (0..spec.n)
        .map(|j| (j, spec.inset(j, p)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("polygon has edges");
    if inset > tol {
        return BoundaryLocation::Interior;
    }
    if inset < -tol {
        return BoundaryLocation::Outside;
    }
    let offset = spec.edge_offset(edge, p);
    if offset > 0.0 && offset < 1.0 {
        BoundaryLocation::OnEdge { edge, offset }
    } else {
        BoundaryLocation::Outside
    }
}

/// Mirror image of `p` across the line through edge `edge_index`.
pub fn reflect_across_edge(spec: &PolygonSpec, edge_index: usize, p: PlanePoint) -> Result<PlanePoint> {
    spec.check_edge(edge_index)?;
    Ok(reflect_point(spec, edge_index, p))
}

#[inline]
pub(crate) fn reflect_point(spec: &PolygonSpec, j: usize, p: PlanePoint) -> PlanePoint {
    let nv = spec.edge_normal(j);
    let s = p.dot(nv) - spec.apothem;
    p - nv * (2.0 * s)
}

/// Reflects a direction vector across edge `j`'s line (the billiard law in
/// the single-face planar view).
#[inline]
pub(crate) fn reflect_vector(spec: &PolygonSpec, j: usize, d: PlanePoint) -> PlanePoint {
    let nv = spec.edge_normal(j);
    d - nv * (2.0 * d.dot(nv))
}

/// An element of the dihedral group of the polygon: `p -> R^rotation (F^flip p)`
/// where `R` rotates by `2π/n` and `F` mirrors across the x-axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DihedralElement {
    pub rotation: usize,
    pub flip: bool,
}

impl DihedralElement {
    /// All `2n` elements, rotations first.
    pub fn all(n: usize) -> impl Iterator<Item = DihedralElement> {
        (0..2 * n).map(move |i| DihedralElement {
            rotation: i % n,
            flip: i >= n,
        })
    }

    pub fn apply(self, spec: &PolygonSpec, p: PlanePoint) -> PlanePoint {
        let p = if self.flip { PlanePoint::new(p.x, -p.y) } else { p };
        p.rotated(2.0 * PI * self.rotation as f64 / spec.n as f64)
    }

    /// Image of a boundary location `(edge, offset)`.
    pub fn apply_edge(self, n: usize, edge: usize, offset: f64) -> (usize, f64) {
        if self.flip {
            // F maps edge j onto edge -j-1 with its orientation reversed.
            ((self.rotation + 2 * n - edge - 1) % n, 1.0 - offset)
        } else {
            ((edge + self.rotation) % n, offset)
        }
    }
}

/// The distinct images of `p` under the dihedral group, in group order.
pub fn symmetry_orbit(spec: &PolygonSpec, p: PlanePoint) -> Vec<PlanePoint> {
    let merge = spec.scaled(ORBIT_MERGE_TOL);
    let mut out: Vec<PlanePoint> = Vec::with_capacity(2 * spec.n);
    for g in DihedralElement::all(spec.n) {
        let q = g.apply(spec, p);
        if out.iter().all(|o| o.dist(q) > merge) {
            out.push(q);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-12;

    fn close(a: PlanePoint, b: PlanePoint) -> bool {
        a.dist(b) < EPS
    }

    #[test]
    fn square_at_unit_radius() {
        let sq = build_polygon(4, 1.0).unwrap();
        let want = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)];
        for (v, w) in sq.vertices().iter().zip(want) {
            assert!(close(*v, PlanePoint::new(w.0, w.1)), "{v}");
        }
        assert!((sq.side_length() - 2f64.sqrt()).abs() < EPS);
        assert!((sq.apothem() - 2f64.sqrt() / 2.0).abs() < EPS);
    }

    #[test]
    fn triangle_and_hexagon_lengths() {
        let tri = build_polygon(3, 1.0).unwrap();
        assert!((tri.apothem() - 0.5).abs() < EPS);
        assert!((tri.side_length() - 3f64.sqrt()).abs() < EPS);
        let hex = build_polygon(6, 2.0).unwrap();
        assert!((hex.side_length() - 2.0).abs() < EPS);
        assert!((hex.apothem() - 3f64.sqrt()).abs() < EPS);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(build_polygon(2, 1.0), Err(Error::TooFewSides(2))));
        assert!(matches!(build_polygon(5, 0.0), Err(Error::BadRadius(_))));
        assert!(matches!(build_polygon(5, -1.0), Err(Error::BadRadius(_))));
        assert!(build_polygon(5, f64::NAN).is_err());
    }

    #[test]
    fn classify_examples() {
        let sq = PolygonSpec::unit(4).unwrap();
        assert_eq!(sq.classify(PlanePoint::ORIGIN, DEFAULT_TOL), BoundaryLocation::Interior);
        match sq.classify(PlanePoint::new(0.5, 0.5), DEFAULT_TOL) {
            BoundaryLocation::OnEdge { edge, offset } => {
                assert_eq!(edge, 0);
                assert!((offset - 0.5).abs() < EPS);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(sq.classify(PlanePoint::new(0.0, 1.0), DEFAULT_TOL), BoundaryLocation::AtVertex(1));
        assert_eq!(sq.classify(PlanePoint::new(2.0, 0.0), DEFAULT_TOL), BoundaryLocation::Outside);
        // vertex wins over edge within tolerance
        assert_eq!(
            sq.classify(PlanePoint::new(0.0, 1.0 - 5e-10), DEFAULT_TOL),
            BoundaryLocation::AtVertex(1)
        );
    }

    #[test]
    fn midpoints_classify_as_half_offsets() {
        for n in 3..=9 {
            let spec = PolygonSpec::unit(n).unwrap();
            for j in 0..n {
                match spec.classify(spec.edge_midpoint(j), DEFAULT_TOL) {
                    BoundaryLocation::OnEdge { edge, offset } => {
                        assert_eq!(edge, j);
                        assert!((offset - 0.5).abs() < EPS);
                    }
                    other => panic!("n={n} j={j}: {other:?}"),
                }
            }
        }
    }

    #[test]
    fn reflection_examples() {
        let sq = PolygonSpec::unit(4).unwrap();
        let r = reflect_across_edge(&sq, 0, PlanePoint::ORIGIN).unwrap();
        assert!(close(r, PlanePoint::new(1.0, 1.0)));
        let m = PlanePoint::new(0.5, 0.5);
        assert!(close(reflect_across_edge(&sq, 0, m).unwrap(), m));
        let tri = PolygonSpec::unit(3).unwrap();
        // edge 1 joins v1 and v2, on the line x = -1/2
        let r = reflect_across_edge(&tri, 1, PlanePoint::new(0.25, 0.0)).unwrap();
        assert!(close(r, PlanePoint::new(-1.25, 0.0)), "{r}");
        assert!(matches!(
            reflect_across_edge(&tri, 3, PlanePoint::ORIGIN),
            Err(Error::EdgeIndex { index: 3, n: 3 })
        ));
    }

    #[test]
    fn orbit_examples() {
        let sq = PolygonSpec::unit(4).unwrap();
        assert_eq!(symmetry_orbit(&sq, PlanePoint::ORIGIN).len(), 1);
        let mids = symmetry_orbit(&sq, PlanePoint::new(0.5, 0.5));
        assert_eq!(mids.len(), 4);
        for j in 0..4 {
            assert!(mids.iter().any(|p| close(*p, sq.edge_midpoint(j))));
        }
        let tri = PolygonSpec::unit(3).unwrap();
        let mids = symmetry_orbit(&tri, PlanePoint::new(0.25, 3f64.sqrt() / 4.0));
        assert_eq!(mids.len(), 3);
        for j in 0..3 {
            assert!(mids.iter().any(|p| p.dist(tri.edge_midpoint(j)) < 1e-9));
        }
    }

    #[test]
    fn dihedral_edge_action_matches_point_action() {
        for n in 3..=8 {
            let spec = PolygonSpec::unit(n).unwrap();
            for g in DihedralElement::all(n) {
                for j in 0..n {
                    let u = 0.3;
                    let img = g.apply(&spec, spec.point_on_edge(j, u));
                    let (e, v) = g.apply_edge(n, j, u);
                    assert!(img.dist(spec.point_on_edge(e, v)) < 1e-12, "n={n} g={g:?} j={j}");
                }
            }
        }
    }
}
