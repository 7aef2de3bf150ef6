//! Billiard geodesics on X_n: the tracer, the closed-curve type, and exact
//! constructors for the over-under, half-geodesic and period-4 families.
//!
//! All curves are stored in the single-face planar view. A segment carries the
//! face it runs on; crossing an edge switches face and mirrors the direction
//! across that edge's line.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{reflect_vector, BoundaryLocation, PlanePoint, PolygonSpec, UnitDirection, DEFAULT_TOL};
use crate::metric::{Face, SurfacePoint};

/// Junctions nearer than this to a vertex (unit circumradius) are vertex hits.
pub const VERTEX_TOL: f64 = 1e-9;
/// Position tolerance for smooth closure (unit circumradius).
pub const CLOSE_POS_TOL: f64 = 1e-9;
/// Direction tolerance for smooth closure, radians.
pub const CLOSE_DIR_TOL: f64 = 1e-9;
/// Largest admissible mismatch between incident and reflected angle.
pub const BILLIARD_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub face: Face,
    pub start: PlanePoint,
    pub end: PlanePoint,
    pub length: f64,
    /// Edge containing `end`.
    pub exit_edge: usize,
}

impl Segment {
    fn new(face: Face, start: PlanePoint, end: PlanePoint, exit_edge: usize) -> Self {
        Self {
            face,
            start,
            end,
            length: start.dist(end),
            exit_edge,
        }
    }

    pub fn direction(&self) -> PlanePoint {
        (self.end - self.start) * (1.0 / self.length)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicPath {
    spec: PolygonSpec,
    segments: Vec<Segment>,
    closed: bool,
    length: f64,
}

impl GeodesicPath {
    fn new(spec: PolygonSpec, segments: Vec<Segment>, closed: bool) -> Self {
        let length = segments.iter().map(|s| s.length).sum();
        Self {
            spec,
            segments,
            closed,
            length,
        }
    }

    pub fn spec(&self) -> &PolygonSpec {
        &self.spec
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn length(&self) -> f64 {
        self.length
    }
}

/// Which construction produced a closed geodesic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum CurveKind {
    OverUnder { step: usize },
    Half { index: usize },
    PeriodFour { offset: f64 },
    Traced,
    Search,
}

/// A boundary point where the curve changes face.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Junction {
    pub edge: usize,
    pub offset: f64,
    pub point: PlanePoint,
    /// Arc-length parameter of the junction.
    pub t: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosedGeodesic {
    path: GeodesicPath,
    kind: CurveKind,
    /// `cumulative[i]` is the parameter where segment `i` starts; the last entry is L.
    cumulative: Vec<f64>,
}

/// Signed incident angle (from the outward normal) minus signed reflected
/// angle (from the inward normal) at a junction on `edge`.
pub fn billiard_mismatch(spec: &PolygonSpec, edge: usize, incoming: PlanePoint, outgoing: PlanePoint) -> f64 {
    let nv = spec.edge_normal(edge);
    let tv = spec.edge_tangent(edge);
    let incident = incoming.dot(tv).atan2(incoming.dot(nv));
    let reflected = outgoing.dot(tv).atan2(-outgoing.dot(nv));
    wrap_angle(incident - reflected)
}

/// Wraps into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

fn angle_between(a: PlanePoint, b: PlanePoint) -> f64 {
    a.cross(b).atan2(a.dot(b)).abs()
}

impl ClosedGeodesic {
    /// Builds the closed curve through the given junctions, in order and
    /// cyclically, with the first segment on `first_face`. Validates the
    /// billiard law, vertex avoidance and even period.
    pub fn from_junctions(
        spec: &PolygonSpec,
        junctions: &[(usize, PlanePoint)],
        first_face: Face,
        kind: CurveKind,
    ) -> Result<Self> {
        let m = junctions.len();
        if m < 2 || !m.is_multiple_of(2) {
            return Err(Error::InvalidCurve(format!("period {m} is not even and >= 2")));
        }
        let vt = spec.scaled(VERTEX_TOL);
        for &(edge, p) in junctions {
            spec.check_edge(edge)?;
            match spec.classify(p, vt) {
                BoundaryLocation::OnEdge { edge: e, .. } if e == edge => {}
                BoundaryLocation::AtVertex(v) => {
                    return Err(Error::InvalidCurve(format!("junction {p} sits at vertex {v}")))
                }
                other => {
                    return Err(Error::InvalidCurve(format!(
                        "junction {p} is not on edge {edge} ({other:?})"
                    )))
                }
            }
        }
        let mut face = first_face;
        let mut segments = Vec::with_capacity(m);
        for i in 0..m {
            let (e0, a) = junctions[i];
            let (e1, b) = junctions[(i + 1) % m];
            if e0 == e1 {
                return Err(Error::InvalidCurve(format!("segment {i} runs along edge {e0}")));
            }
            segments.push(Segment::new(face, a, b, e1));
            face = face.opposite();
        }
        for i in 0..m {
            let s_in = &segments[i];
            let s_out = &segments[(i + 1) % m];
            let mis = billiard_mismatch(spec, s_in.exit_edge, s_in.direction(), s_out.direction());
            if mis.abs() > BILLIARD_TOL {
                return Err(Error::InvalidCurve(format!(
                    "billiard law violated by {mis:e} rad at junction {}",
                    (i + 1) % m
                )));
            }
        }
        Ok(Self::assemble(spec.clone(), segments, kind))
    }

    fn assemble(spec: PolygonSpec, segments: Vec<Segment>, kind: CurveKind) -> Self {
        let mut cumulative = Vec::with_capacity(segments.len() + 1);
        let mut acc = 0.0;
        cumulative.push(0.0);
        for s in &segments {
            acc += s.length;
            cumulative.push(acc);
        }
        Self {
            path: GeodesicPath::new(spec, segments, true),
            kind,
            cumulative,
        }
    }

    /// Rebuilds a curve from stored segments, checking that they chain up.
    pub fn from_segments(spec: &PolygonSpec, segments: &[(Face, PlanePoint, PlanePoint)], kind: CurveKind) -> Result<Self> {
        let m = segments.len();
        if m == 0 {
            return Err(Error::InvalidCurve("no segments".into()));
        }
        let tol = spec.scaled(CLOSE_POS_TOL);
        let mut junctions = Vec::with_capacity(m);
        for i in 0..m {
            let (face, start, _) = segments[i];
            let (prev_face, _, prev_end) = segments[(i + m - 1) % m];
            if prev_end.dist(start) > tol {
                return Err(Error::InvalidCurve(format!("segment {i} does not start where the previous one ends")));
            }
            if prev_face == face {
                return Err(Error::InvalidCurve(format!("faces do not alternate at segment {i}")));
            }
            match spec.classify(start, spec.scaled(DEFAULT_TOL)) {
                BoundaryLocation::OnEdge { edge, .. } => junctions.push((edge, start)),
                other => {
                    return Err(Error::InvalidCurve(format!("segment {i} starts off the boundary ({other:?})")))
                }
            }
        }
        Self::from_junctions(spec, &junctions, segments[0].0, kind)
    }

    pub fn spec(&self) -> &PolygonSpec {
        &self.path.spec
    }

    pub fn path(&self) -> &GeodesicPath {
        &self.path
    }

    pub fn segments(&self) -> &[Segment] {
        &self.path.segments
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn with_kind(mut self, kind: CurveKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn period(&self) -> usize {
        self.path.segments.len()
    }

    pub fn length(&self) -> f64 {
        self.path.length
    }

    /// Parameter at which each segment starts (junction parameters).
    pub fn junction_params(&self) -> &[f64] {
        &self.cumulative[..self.period()]
    }

    pub fn junctions(&self) -> Vec<Junction> {
        let spec = self.spec();
        let m = self.period();
        (0..m)
            .map(|i| {
                let edge = self.segments()[(i + m - 1) % m].exit_edge;
                let point = self.segments()[i].start;
                Junction {
                    edge,
                    offset: spec.edge_offset(edge, point),
                    point,
                    t: self.cumulative[i],
                }
            })
            .collect()
    }

    /// Index of the segment containing parameter `t` (already reduced to `[0, L)`).
    pub(crate) fn segment_at(&self, t: f64) -> usize {
        let i = self.cumulative.partition_point(|&c| c <= t);
        i.saturating_sub(1).min(self.period() - 1)
    }

    /// Constant-speed point at arc length `t`, wrapping modulo L.
    pub fn evaluate(&self, t: f64) -> SurfacePoint {
        let t = t.rem_euclid(self.length());
        let i = self.segment_at(t);
        let s = &self.segments()[i];
        let local = ((t - self.cumulative[i]) / s.length).clamp(0.0, 1.0);
        SurfacePoint {
            face: s.face,
            position: s.start.lerp(s.end, local),
        }
    }

    /// Launch data at the first junction: `(edge, point, direction, face)`.
    pub fn departure(&self) -> (usize, PlanePoint, UnitDirection, Face) {
        let first = &self.segments()[0];
        let last = &self.segments()[self.period() - 1];
        let d = first.direction();
        (
            last.exit_edge,
            first.start,
            UnitDirection::new(d.x, d.y).expect("segments have positive length"),
            first.face,
        )
    }

    /// Traces again from the first junction for one period.
    pub fn retrace(&self) -> Result<TraceOutcome> {
        let (_, start, dir, face) = self.departure();
        trace(self.spec(), SurfacePoint { face, position: start }, dir, self.period())
    }

    /// Largest billiard-law mismatch over all junctions.
    pub fn max_billiard_mismatch(&self) -> f64 {
        let m = self.period();
        (0..m)
            .map(|i| {
                let a = &self.segments()[i];
                let b = &self.segments()[(i + 1) % m];
                billiard_mismatch(self.spec(), a.exit_edge, a.direction(), b.direction()).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Result of following a billiard trajectory.
#[derive(Clone, Debug, PartialEq)]
pub enum TraceOutcome {
    /// Smooth closure was detected.
    Closed(ClosedGeodesic),
    /// The trajectory ran into a vertex at the end of segment `segment_index`.
    VertexHit {
        position: PlanePoint,
        vertex: usize,
        segment_index: usize,
        partial: GeodesicPath,
    },
    /// `max_segments` were traced without closing.
    Truncated(GeodesicPath),
}

impl TraceOutcome {
    pub fn closed(self) -> Option<ClosedGeodesic> {
        match self {
            TraceOutcome::Closed(c) => Some(c),
            _ => None,
        }
    }
}

/// Where a straight run from `p` along `d` leaves the polygon.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Exit {
    Edge { edge: usize, offset: f64, point: PlanePoint },
    Vertex { vertex: usize, point: PlanePoint },
}

pub(crate) fn next_exit(spec: &PolygonSpec, p: PlanePoint, d: PlanePoint, from_edge: Option<usize>) -> Exit {
    let mut best_t = f64::INFINITY;
    let mut best_edge = 0;
    for j in 0..spec.n() {
        if Some(j) == from_edge {
            continue;
        }
        let dn = d.dot(spec.edge_normal(j));
        if dn <= 0.0 {
            continue;
        }
        let t = spec.inset(j, p).max(0.0) / dn;
        if t < best_t {
            best_t = t;
            best_edge = j;
        }
    }
    let raw = p + d * best_t;
    let offset = spec.edge_offset(best_edge, raw);
    let vt = spec.scaled(VERTEX_TOL) / spec.side_length();
    if offset < vt {
        Exit::Vertex {
            vertex: best_edge,
            point: raw,
        }
    } else if offset > 1.0 - vt {
        Exit::Vertex {
            vertex: (best_edge + 1) % spec.n(),
            point: raw,
        }
    } else {
        Exit::Edge {
            edge: best_edge,
            offset,
            point: spec.point_on_edge(best_edge, offset),
        }
    }
}

/// Follows the billiard trajectory from `start` in direction `dir`.
///
/// Starts may be interior points or edge points with `dir` pointing into the
/// face. Stops on smooth closure, at a vertex, or after `max_segments`.
pub fn trace(spec: &PolygonSpec, start: SurfacePoint, dir: UnitDirection, max_segments: usize) -> Result<TraceOutcome> {
    if max_segments == 0 {
        return Err(Error::NoSegments);
    }
    if !start.position.is_finite() {
        return Err(Error::Outside(start.position));
    }
    let start_edge = match spec.classify(start.position, spec.scaled(DEFAULT_TOL)) {
        BoundaryLocation::Outside => return Err(Error::Outside(start.position)),
        BoundaryLocation::AtVertex(_) => return Err(Error::StartAtVertex),
        BoundaryLocation::Interior => None,
        BoundaryLocation::OnEdge { edge, .. } => {
            let dn = dir.as_vector().dot(spec.edge_normal(edge));
            if dn.abs() < 1e-12 {
                return Err(Error::ParallelLaunch);
            }
            if dn > 0.0 {
                return Err(Error::OutwardLaunch);
            }
            Some(edge)
        }
    };
    let pos_tol = spec.scaled(CLOSE_POS_TOL);
    let d0 = dir.as_vector();
    let s = start.position;

    let mut segments: Vec<Segment> = Vec::new();
    let mut p = s;
    let mut d = d0;
    let mut face = start.face;
    let mut from = start_edge;
    for i in 0..max_segments {
        let (edge, z) = match next_exit(spec, p, d, from) {
            Exit::Vertex { vertex, point } => {
                segments.push(Segment::new(face, p, point, vertex));
                return Ok(TraceOutcome::VertexHit {
                    position: point,
                    vertex,
                    segment_index: i,
                    partial: GeodesicPath::new(spec.clone(), segments, false),
                });
            }
            Exit::Edge { edge, point, .. } => (edge, point),
        };

        if start_edge.is_none() && i > 0 && face == start.face && angle_between(d, d0) < CLOSE_DIR_TOL {
            let along = (s - p).dot(d);
            if (s - p).cross(d).abs() < pos_tol && along >= 0.0 && along <= p.dist(z) {
                // The closing segment passes through the interior start; the
                // curve's junctions are the exits recorded so far.
                let junctions: Vec<_> = segments.iter().map(|sg| (sg.exit_edge, sg.end)).collect();
                return ClosedGeodesic::from_junctions(spec, &junctions, start.face.opposite(), CurveKind::Traced)
                    .map(TraceOutcome::Closed);
            }
        }

        segments.push(Segment::new(face, p, z, edge));
        d = reflect_vector(spec, edge, d);
        face = face.opposite();
        p = z;
        from = Some(edge);

        if Some(edge) == start_edge && face == start.face && z.dist(s) < pos_tol && angle_between(d, d0) < CLOSE_DIR_TOL {
            let start_e = edge;
            let mut junctions = Vec::with_capacity(segments.len());
            junctions.push((start_e, s));
            junctions.extend(segments[..segments.len() - 1].iter().map(|sg| (sg.exit_edge, sg.end)));
            return ClosedGeodesic::from_junctions(spec, &junctions, start.face, CurveKind::Traced)
                .map(TraceOutcome::Closed);
        }
    }
    Ok(TraceOutcome::Truncated(GeodesicPath::new(spec.clone(), segments, false)))
}

/// Launch from edge `edge` at offset `u`, at angle `theta` measured from the
/// edge direction toward the interior.
pub fn trace_from_edge(
    spec: &PolygonSpec,
    edge: usize,
    u: f64,
    theta: f64,
    face: Face,
    max_segments: usize,
) -> Result<TraceOutcome> {
    spec.check_edge(edge)?;
    let d = spec.edge_tangent(edge).rotated(theta);
    let dir = UnitDirection::new(d.x, d.y).ok_or(Error::ParallelLaunch)?;
    trace(
        spec,
        SurfacePoint {
            face,
            position: spec.point_on_edge(edge, u),
        },
        dir,
        max_segments,
    )
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Distinct midpoints visited by the step-`step` over-under curve.
pub fn over_under_cycle(n: usize, step: usize) -> usize {
    n / gcd(n, step)
}

/// The closed geodesic through the midpoints of every `step`-th edge.
pub fn over_under(spec: &PolygonSpec, step: usize) -> Result<ClosedGeodesic> {
    let n = spec.n();
    if step == 0 || step > n / 2 {
        return Err(Error::InvalidStep { step, n });
    }
    let c = over_under_cycle(n, step);
    let period = if c.is_multiple_of(2) { c } else { 2 * c };
    let junctions: Vec<_> = (0..period)
        .map(|i| {
            let e = (i * step) % n;
            (e, spec.edge_midpoint(e))
        })
        .collect();
    ClosedGeodesic::from_junctions(spec, &junctions, Face::Top, CurveKind::OverUnder { step })
}

/// The period-2 curves bouncing perpendicularly between parallel edges
/// through the center; empty for odd `n`.
pub fn half_geodesics(spec: &PolygonSpec) -> Vec<ClosedGeodesic> {
    let n = spec.n();
    if !n.is_multiple_of(2) {
        return Vec::new();
    }
    (0..n / 2)
        .map(|j| {
            let opp = j + n / 2;
            ClosedGeodesic::from_junctions(
                spec,
                &[(j, spec.edge_midpoint(j)), (opp, spec.edge_midpoint(opp))],
                Face::Top,
                CurveKind::Half { index: j },
            )
            .expect("perpendicular bounce between parallel edges is a closed geodesic")
        })
        .collect()
}

/// Launch angle of the period-4 family on the doubled triangle.
pub const PERIOD_FOUR_ANGLE: f64 = PI / 6.0;

/// Perpendicular feet of the point at offset `u` on edge 0 onto edges 1 and 2,
/// as offsets along those edges.
fn period_four_feet(spec: &PolygonSpec, u: f64) -> (f64, f64) {
    let p = spec.point_on_edge(0, u);
    (spec.edge_offset(1, p), spec.edge_offset(2, p))
}

/// Open interval of launch offsets whose period-4 curve keeps every junction
/// away from the vertices. Derived from the foot offsets, which are affine in `u`.
pub fn period4_admissible(spec: &PolygonSpec) -> Result<(f64, f64)> {
    if spec.n() != 3 {
        return Err(Error::NotTriangle(spec.n()));
    }
    let margin = spec.scaled(VERTEX_TOL) / spec.side_length();
    let (a0, b0) = period_four_feet(spec, 0.0);
    let (a1, b1) = period_four_feet(spec, 1.0);
    let mut lo: f64 = margin;
    let mut hi: f64 = 1.0 - margin;
    // foot(u) = f0 + (f1 - f0) u must stay in (margin, 1 - margin)
    for (f0, f1) in [(a0, a1), (b0, b1)] {
        let slope = f1 - f0;
        if slope.abs() < 1e-15 {
            if f0 <= margin || f0 >= 1.0 - margin {
                return Ok((0.0, 0.0));
            }
            continue;
        }
        let ua = (margin - f0) / slope;
        let ub = (1.0 - margin - f0) / slope;
        lo = lo.max(ua.min(ub));
        hi = hi.min(ua.max(ub));
    }
    Ok((lo, hi))
}

/// The period-4 closed geodesic on the doubled triangle launched from edge 0
/// at offset `u` and angle π/6: it meets edge 1 perpendicularly, returns to
/// the launch point on the other face, meets edge 2 perpendicularly, and closes.
pub fn period4_x3(spec: &PolygonSpec, u: f64) -> Result<ClosedGeodesic> {
    let (lo, hi) = period4_admissible(spec)?;
    if !(u > lo && u < hi) {
        return Err(Error::InadmissibleOffset { u, lo, hi });
    }
    let p = spec.point_on_edge(0, u);
    let (f1, f2) = period_four_feet(spec, u);
    let junctions = [
        (0, p),
        (1, spec.point_on_edge(1, f1)),
        (0, p),
        (2, spec.point_on_edge(2, f2)),
    ];
    ClosedGeodesic::from_junctions(spec, &junctions, Face::Top, CurveKind::PeriodFour { offset: u })
}
