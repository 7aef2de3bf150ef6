//! Intrinsic distance on the doubled polygon.
//!
//! Points on one face are joined by the straight chord. Points on opposite
//! faces are joined through a single boundary point `z`, minimizing
//! `|p - z| + |z - q|` over the whole boundary. Along one edge that objective
//! is convex, so its minimum is either where the segment from `p` to the
//! mirror image of `q` meets the edge, or the nearer endpoint.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{PlanePoint, PolygonSpec, DEFAULT_TOL};

/// Crossings within this (relative) margin of the best are treated as ties.
const TIE_REL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Face {
    Top,
    Bottom,
}

impl Face {
    #[inline]
    pub fn opposite(self) -> Self {
        match self {
            Face::Top => Face::Bottom,
            Face::Bottom => Face::Top,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfacePoint {
    pub face: Face,
    pub position: PlanePoint,
}

impl SurfacePoint {
    /// Checked constructor: the position must lie inside or on the polygon.
    pub fn new(spec: &PolygonSpec, face: Face, position: PlanePoint) -> Result<Self> {
        let p = Self { face, position };
        p.validate(spec)?;
        Ok(p)
    }

    #[inline]
    pub const fn top(x: f64, y: f64) -> Self {
        Self {
            face: Face::Top,
            position: PlanePoint::new(x, y),
        }
    }

    #[inline]
    pub const fn bottom(x: f64, y: f64) -> Self {
        Self {
            face: Face::Bottom,
            position: PlanePoint::new(x, y),
        }
    }

    pub fn validate(&self, spec: &PolygonSpec) -> Result<()> {
        if self.position.is_finite() && spec.classify(self.position, spec.scaled(DEFAULT_TOL)).is_inside() {
            Ok(())
        } else {
            Err(Error::Outside(self.position))
        }
    }

    /// Same point seen from the other face; boundary points are unchanged by this.
    pub fn flipped(self) -> Self {
        Self {
            face: self.face.opposite(),
            position: self.position,
        }
    }
}

/// The minimizing boundary point for an opposite-face pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingWitness {
    pub edge_index: usize,
    pub crossing_point: PlanePoint,
    pub total_length: f64,
}

/// Best crossing of edge `j` for the pair `(p, q)`; exact up to rounding.
#[inline]
pub(crate) fn crossing_on_edge(spec: &PolygonSpec, j: usize, p: PlanePoint, q: PlanePoint) -> (PlanePoint, f64) {
    let (a, b) = spec.edge(j);
    let side = spec.side_length();
    let hp = spec.inset(j, p).max(0.0);
    let hq = spec.inset(j, q).max(0.0);
    let tangent = spec.edge_tangent(j);
    let sp = (p - a).dot(tangent) / side;
    let sq = (q - a).dot(tangent) / side;
    let h = hp + hq;
    let s = if h > 0.0 { sp + (sq - sp) * (hp / h) } else { sp };
    let z = a.lerp(b, s.clamp(0.0, 1.0));
    (z, p.dist(z) + z.dist(q))
}

/// Single-crossing length minimized over all edges; ties go to the lowest edge.
pub(crate) fn best_crossing(spec: &PolygonSpec, p: PlanePoint, q: PlanePoint) -> CrossingWitness {
    let mut best = CrossingWitness {
        edge_index: 0,
        crossing_point: PlanePoint::ORIGIN,
        total_length: f64::INFINITY,
    };
    for j in 0..spec.n() {
        let (z, len) = crossing_on_edge(spec, j, p, q);
        if len < best.total_length - TIE_REL * best.total_length.min(1e300) {
            best = CrossingWitness {
                edge_index: j,
                crossing_point: z,
                total_length: len,
            };
        }
    }
    best
}

/// Exact minimum over edges, without tie handling.
#[inline]
pub(crate) fn crossing_length(spec: &PolygonSpec, p: PlanePoint, q: PlanePoint) -> f64 {
    (0..spec.n())
        .map(|j| crossing_on_edge(spec, j, p, q).1)
        .fold(f64::INFINITY, f64::min)
}

/// Distance without validating that the points lie on the polygon.
#[inline]
pub(crate) fn distance_unchecked(spec: &PolygonSpec, p: &SurfacePoint, q: &SurfacePoint) -> f64 {
    if p.face == q.face {
        p.position.dist(q.position)
    } else {
        // Boundary points need no special case: crossing at the point itself
        // already realizes the chord. Ordering the pair makes the result
        // bitwise symmetric.
        let (a, b) = (p.position, q.position);
        if (a.x, a.y) <= (b.x, b.y) {
            crossing_length(spec, a, b)
        } else {
            crossing_length(spec, b, a)
        }
    }
}

pub fn distance(spec: &PolygonSpec, p: &SurfacePoint, q: &SurfacePoint) -> Result<f64> {
    p.validate(spec)?;
    q.validate(spec)?;
    Ok(distance_unchecked(spec, p, q))
}

/// Direct discretization: minimum over `samples_per_edge` evenly spaced
/// boundary points per edge, endpoints included.
pub fn distance_bruteforce(
    spec: &PolygonSpec,
    p: &SurfacePoint,
    q: &SurfacePoint,
    samples_per_edge: usize,
) -> Result<f64> {
    if samples_per_edge < 2 {
        return Err(Error::TooFewSamples(samples_per_edge));
    }
    p.validate(spec)?;
    q.validate(spec)?;
    if p.face == q.face {
        return Ok(p.position.dist(q.position));
    }
    let last = (samples_per_edge - 1) as f64;
    let mut best = f64::INFINITY;
    for j in 0..spec.n() {
        let (a, b) = spec.edge(j);
        for i in 0..samples_per_edge {
            let z = a.lerp(b, i as f64 / last);
            best = best.min(p.position.dist(z) + z.dist(q.position));
        }
    }
    Ok(best)
}

pub fn shortest_crossing(spec: &PolygonSpec, p: &SurfacePoint, q: &SurfacePoint) -> Result<CrossingWitness> {
    if p.face == q.face {
        return Err(Error::SameFace);
    }
    p.validate(spec)?;
    q.validate(spec)?;
    Ok(best_crossing(spec, p.position, q.position))
}
