//! Shooting search for closed geodesics of a fixed period.
//!
//! Candidates launch from edge 0 (every closed geodesic crosses some edge, and
//! rotations carry that edge to edge 0) at offset `u` and angle `θ` from the
//! edge direction. After `m` segments the closure residual compares the final
//! boundary data with the launch data.
//!
//! The direction after `m` reflections is the launch direction turned by a
//! rotation that depends only on the sequence of edges crossed, so `Δθ` is
//! piecewise constant over the seed grid and the residual Jacobian has rank at
//! most one. Every closed geodesic therefore sits in a one-parameter family of
//! parallel closed geodesics: a segment `θ = θ*`, `u ∈ (u_lo, u_hi)` bounded
//! by trajectories through a vertex. The catalog reports each family once, by
//! its midline, together with samples across the family.

use std::collections::{BTreeSet, HashSet};
use std::f64::consts::PI;

use crate::analysis::{minimizing_index_with, MinindReport, VerifySettings};
use crate::error::{Error, Result};
use crate::geodesics::{next_exit, trace_from_edge, wrap_angle, ClosedGeodesic, CurveKind, Exit, CLOSE_DIR_TOL, CLOSE_POS_TOL};
use crate::geometry::{reflect_vector, DihedralElement, PlanePoint, PolygonSpec};
use crate::metric::Face;
use crate::par::{map_range, map_slice, Execution};

/// Launch angles closer than this to the edge are rejected.
pub const ANGLE_MARGIN: f64 = 1e-6;
/// Polished residual threshold, both components.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Step of the finite-difference Jacobian.
const FD_STEP: f64 = 1e-7;
/// A seed needs `|Δθ|` below this to be worth polishing.
const SEED_DTHETA: f64 = 1e-6;
/// Offsets are rounded to this resolution in canonical keys.
const KEY_RESOLUTION: f64 = 1e7;
const MIN_SEED_GRID: usize = 16;
pub const DEFAULT_SEED_GRID: (usize, usize) = (256, 256);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShootingState {
    pub start_edge: usize,
    pub u: f64,
    pub theta: f64,
    pub period: usize,
}

impl ShootingState {
    pub fn new(u: f64, theta: f64, period: usize) -> Self {
        Self {
            start_edge: 0,
            u,
            theta,
            period,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosureResidual {
    /// Final minus initial boundary position, in edge lengths along the
    /// perimeter, wrapped to `[-n/2, n/2)`. NaN after a vertex hit.
    pub du: f64,
    /// Final minus initial direction angle, wrapped to `(-π, π]`. NaN after a vertex hit.
    pub dtheta: f64,
    pub face_parity_ok: bool,
    pub vertex_hit: bool,
}

impl ClosureResidual {
    pub fn norm1(&self) -> f64 {
        self.du.abs() + self.dtheta.abs()
    }
}

/// Outcome of one shot, with the edge sequence kept for family detection.
#[derive(Clone, Debug, PartialEq)]
enum Shot {
    Vertex,
    Done {
        du: f64,
        dtheta: f64,
        edges: Vec<usize>,
        /// Smallest proper number of segments after which the shot already closed.
        early: Option<usize>,
    },
}

fn shoot(spec: &PolygonSpec, u: f64, theta: f64, m: usize) -> Shot {
    let n = spec.n();
    let start = spec.point_on_edge(0, u);
    let d0 = spec.edge_tangent(0).rotated(theta);
    let pos_tol = spec.scaled(CLOSE_POS_TOL);
    let mut p = start;
    let mut d = d0;
    let mut from = Some(0);
    let mut edges = Vec::with_capacity(m);
    let mut early = None;
    let mut last = (0, u);
    for i in 0..m {
        match next_exit(spec, p, d, from) {
            Exit::Vertex { .. } => return Shot::Vertex,
            Exit::Edge { edge, offset, point } => {
                edges.push(edge);
                d = reflect_vector(spec, edge, d);
                p = point;
                from = Some(edge);
                last = (edge, offset);
                let count = i + 1;
                if early.is_none()
                    && count < m
                    && count % 2 == 0
                    && edge == 0
                    && point.dist(start) < pos_tol
                    && angle_diff(d, d0) < CLOSE_DIR_TOL
                {
                    early = Some(count);
                }
            }
        }
    }
    let nf = n as f64;
    let perimeter = last.0 as f64 + last.1;
    let du = (perimeter - u + nf / 2.0).rem_euclid(nf) - nf / 2.0;
    let dtheta = wrap_angle(d.y.atan2(d.x) - d0.y.atan2(d0.x));
    Shot::Done { du, dtheta, edges, early }
}

fn angle_diff(a: PlanePoint, b: PlanePoint) -> f64 {
    a.cross(b).atan2(a.dot(b)).abs()
}

/// Traces `s.period` segments and compares the end with the start.
pub fn closure_residual(spec: &PolygonSpec, s: &ShootingState) -> ClosureResidual {
    let face_parity_ok = s.period.is_multiple_of(2);
    match shoot(spec, s.u, s.theta, s.period) {
        Shot::Vertex => ClosureResidual {
            du: f64::NAN,
            dtheta: f64::NAN,
            face_parity_ok,
            vertex_hit: true,
        },
        Shot::Done { du, dtheta, .. } => ClosureResidual {
            du,
            dtheta,
            face_parity_ok,
            vertex_hit: false,
        },
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FamilyExtent {
    /// A closed geodesic with no parallel neighbours (regular Jacobian).
    Isolated,
    /// Launch offsets `(u_lo, u_hi)` at fixed angle that all close up.
    Interval { u_lo: f64, u_hi: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyMember {
    pub u: f64,
    pub minind: MinindReport,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CatalogEntry {
    /// Launch data of the family midline.
    pub representative: ShootingState,
    pub geodesic: ClosedGeodesic,
    pub minind: MinindReport,
    pub extent: FamilyExtent,
    /// Family members at the seed-grid offsets inside the family interval.
    pub members: Vec<FamilyMember>,
    /// Number of distinct curves among the dihedral images of the midline.
    pub orbit_size: usize,
    pub canonical_key: Vec<(usize, i64)>,
}

impl CatalogEntry {
    /// Minimizing-index reports of the midline and every sampled member.
    pub fn reports(&self) -> impl Iterator<Item = &MinindReport> {
        std::iter::once(&self.minind).chain(self.members.iter().map(|m| &m.minind))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicCatalog {
    pub spec: PolygonSpec,
    pub period: usize,
    pub seed_grid: (usize, usize),
    pub k_max: usize,
    pub entries: Vec<CatalogEntry>,
    /// Seed-grid cells whose trace ran into a vertex.
    pub excluded_cells: usize,
}

impl GeodesicCatalog {
    /// Distinct midline curves, counting every dihedral image separately.
    pub fn curve_count(&self) -> usize {
        self.entries.iter().map(|e| e.orbit_size).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchOptions {
    pub seed_grid: (usize, usize),
    /// Cap for the per-curve index search; defaults to four times the period.
    pub k_max: Option<usize>,
    pub verify: VerifySettings,
    pub exec: Execution,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            seed_grid: DEFAULT_SEED_GRID,
            k_max: None,
            verify: VerifySettings::default(),
            exec: Execution::default(),
        }
    }
}

impl SearchOptions {
    pub fn with_grid(nu: usize, ntheta: usize) -> Self {
        Self {
            seed_grid: (nu, ntheta),
            ..Self::default()
        }
    }
}

fn clamp_state(u: f64, theta: f64) -> (f64, f64) {
    (u.clamp(1e-12, 1.0 - 1e-12), theta.clamp(ANGLE_MARGIN, PI - ANGLE_MARGIN))
}

/// Residual vector or `None` on a vertex hit.
fn residual(spec: &PolygonSpec, u: f64, theta: f64, m: usize) -> Option<[f64; 2]> {
    match shoot(spec, u, theta, m) {
        Shot::Vertex => None,
        Shot::Done { du, dtheta, .. } => Some([du, dtheta]),
    }
}

fn jacobian(spec: &PolygonSpec, u: f64, theta: f64, m: usize, r: [f64; 2]) -> Option<[[f64; 2]; 2]> {
    let hu = if u + FD_STEP < 1.0 { FD_STEP } else { -FD_STEP };
    let ht = if theta + FD_STEP < PI { FD_STEP } else { -FD_STEP };
    let ru = residual(spec, u + hu, theta, m)?;
    let rt = residual(spec, u, theta + ht, m)?;
    Some([
        [(ru[0] - r[0]) / hu, (rt[0] - r[0]) / ht],
        [(ru[1] - r[1]) / hu, (rt[1] - r[1]) / ht],
    ])
}

/// True when the Jacobian is numerically rank-deficient.
fn is_degenerate(j: &[[f64; 2]; 2]) -> bool {
    let scale = j.iter().flatten().map(|x| x * x).sum::<f64>();
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    scale == 0.0 || det.abs() <= 1e-8 * scale
}

/// Quasi-Newton on the closure residual with a finite-difference Jacobian.
/// A rank-one Jacobian (the usual case) is inverted in the least-squares
/// sense, which moves the state across the family only.
fn newton_polish(spec: &PolygonSpec, mut u: f64, mut theta: f64, m: usize) -> Option<(f64, f64)> {
    for _ in 0..60 {
        let r = residual(spec, u, theta, m)?;
        if r[0].abs() < 1e-13 && r[1].abs() < 1e-13 {
            break;
        }
        let j = jacobian(spec, u, theta, m, r)?;
        let scale = j.iter().flatten().map(|x| x * x).sum::<f64>();
        if scale == 0.0 {
            return None;
        }
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let (mut su, mut st) = if det.abs() > 1e-8 * scale {
            (
                -(j[1][1] * r[0] - j[0][1] * r[1]) / det,
                -(-j[1][0] * r[0] + j[0][0] * r[1]) / det,
            )
        } else {
            (
                -(j[0][0] * r[0] + j[1][0] * r[1]) / scale,
                -(j[0][1] * r[0] + j[1][1] * r[1]) / scale,
            )
        };
        let step = su.hypot(st);
        if step > 0.05 {
            su *= 0.05 / step;
            st *= 0.05 / step;
        }
        if step < 1e-16 {
            break;
        }
        (u, theta) = clamp_state(u + su, theta + st);
    }
    let r = residual(spec, u, theta, m)?;
    (r[0].abs() < RESIDUAL_TOL && r[1].abs() < RESIDUAL_TOL).then_some((u, theta))
}

/// Bisection on `Δu` along `θ` at fixed `u` (a seed-grid edge).
fn bisect_theta(spec: &PolygonSpec, u: f64, mut lo: f64, mut hi: f64, m: usize) -> Option<f64> {
    let mut f_lo = residual(spec, u, lo, m)?[0];
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let f_mid = residual(spec, u, mid, m)?[0];
        if f_mid == 0.0 {
            return Some(mid);
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

#[derive(Clone, Debug)]
struct Root {
    u: f64,
    theta: f64,
    edges: Vec<usize>,
}

fn polish_seed(spec: &PolygonSpec, m: usize, u: f64, theta: f64, bracket: Option<f64>) -> Option<Root> {
    let start_theta = match bracket {
        Some(other) => bisect_theta(spec, u, theta, other, m)?,
        None => theta,
    };
    let (u, theta) = newton_polish(spec, u, start_theta, m)?;
    match shoot(spec, u, theta, m) {
        Shot::Done {
            du,
            dtheta,
            edges,
            early: None,
        } if du.abs() < RESIDUAL_TOL && dtheta.abs() < RESIDUAL_TOL => Some(Root { u, theta, edges }),
        _ => None,
    }
}

/// Launch offsets at angle `theta` sharing the edge sequence of the root.
fn family_interval(spec: &PolygonSpec, root: &Root, m: usize) -> (f64, f64) {
    let same = |u: f64| matches!(shoot(spec, u, root.theta, m), Shot::Done { ref edges, .. } if *edges == root.edges);
    let edge_of = |mut inside: f64, mut outside: f64| {
        for _ in 0..64 {
            let mid = 0.5 * (inside + outside);
            if same(mid) {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        inside
    };
    (edge_of(root.u, 0.0), edge_of(root.u, 1.0))
}

fn key_of(seq: &[(usize, f64)]) -> Vec<(usize, i64)> {
    seq.iter().map(|&(e, u)| (e, (u * KEY_RESOLUTION).round() as i64)).collect()
}

/// Lexicographically least key over cyclic shifts and reversal.
fn min_over_shifts(seq: &[(usize, f64)]) -> Vec<(usize, i64)> {
    let base = key_of(seq);
    let mut rev = base.clone();
    rev.reverse();
    let m = base.len();
    let mut best: Option<Vec<(usize, i64)>> = None;
    for cand in [&base, &rev] {
        for s in 0..m {
            let rotated: Vec<_> = cand[s..].iter().chain(&cand[..s]).copied().collect();
            if best.as_ref().is_none_or(|b| rotated < *b) {
                best = Some(rotated);
            }
        }
    }
    best.unwrap_or_default()
}

fn image_keys(spec: &PolygonSpec, curve: &ClosedGeodesic) -> Vec<Vec<(usize, i64)>> {
    let seq: Vec<(usize, f64)> = curve.junctions().iter().map(|j| (j.edge, j.offset)).collect();
    DihedralElement::all(spec.n())
        .map(|g| {
            let img: Vec<_> = seq.iter().map(|&(e, u)| g.apply_edge(spec.n(), e, u)).collect();
            min_over_shifts(&img)
        })
        .collect()
}

/// Canonical form of a closed curve's junction sequence: the least
/// `(edge, rounded offset)` sequence over symmetries, shifts and reversal.
/// Faces are ignored, which also identifies a curve with its face-swapped copy.
pub fn canonical_key(curve: &ClosedGeodesic) -> Vec<(usize, i64)> {
    image_keys(curve.spec(), curve).into_iter().min().unwrap_or_default()
}

/// Number of distinct curves among the dihedral images of `curve`.
pub fn orbit_size(curve: &ClosedGeodesic) -> usize {
    image_keys(curve.spec(), curve).into_iter().collect::<BTreeSet<_>>().len()
}

fn build_member(spec: &PolygonSpec, u: f64, theta: f64, m: usize) -> Option<ClosedGeodesic> {
    let c = trace_from_edge(spec, 0, u, theta, Face::Top, m).ok()?.closed()?;
    (c.period() == m).then(|| c.with_kind(CurveKind::Search))
}

pub fn find_closed_geodesics(spec: &PolygonSpec, m: usize, grid: (usize, usize)) -> Result<GeodesicCatalog> {
    find_closed_geodesics_with(spec, m, &SearchOptions::with_grid(grid.0, grid.1))
}

pub fn find_closed_geodesics_with(spec: &PolygonSpec, m: usize, opts: &SearchOptions) -> Result<GeodesicCatalog> {
    if m < 2 || !m.is_multiple_of(2) {
        return Err(Error::InvalidPeriod(m));
    }
    let (nu, nt) = opts.seed_grid;
    if nu < MIN_SEED_GRID || nt < MIN_SEED_GRID {
        return Err(Error::SeedGridTooCoarse { nu, ntheta: nt });
    }
    let k_max = opts.k_max.unwrap_or(4 * m);
    if k_max < 2 {
        return Err(Error::InvalidK(k_max));
    }
    let exec = opts.exec;
    let u_at = |i: usize| (i as f64 + 0.5) / nu as f64;
    let t_at = |j: usize| (j as f64 + 0.5) * PI / nt as f64;

    let cells = map_range(exec, nu * nt, |idx| residual(spec, u_at(idx / nt), t_at(idx % nt), m));
    let excluded_cells = cells.iter().filter(|c| c.is_none()).count();
    let flat = |r: &Option<[f64; 2]>| r.filter(|r| r[1].abs() < SEED_DTHETA);

    let mut seeds: Vec<(f64, f64, Option<f64>)> = Vec::new();
    for i in 0..nu {
        for j in 0..nt {
            let Some(here) = flat(&cells[i * nt + j]) else { continue };
            let bracket = (j + 1 < nt)
                .then(|| flat(&cells[i * nt + j + 1]))
                .flatten()
                .filter(|next| here[0] * next[0] <= 0.0)
                .map(|_| t_at(j + 1));
            seeds.push((u_at(i), t_at(j), bracket));
        }
    }
    let mut roots: Vec<Root> = map_slice(exec, &seeds, |&(u, t, b)| polish_seed(spec, m, u, t, b))
        .into_iter()
        .flatten()
        .collect();
    roots.sort_by(|a, b| a.theta.total_cmp(&b.theta).then(a.u.total_cmp(&b.u)));

    struct Found {
        theta: f64,
        extent: FamilyExtent,
        u_mid: f64,
    }
    let mut found: Vec<Found> = Vec::new();
    for root in &roots {
        let covered = found.iter().any(|f| {
            (f.theta - root.theta).abs() < 1e-8
                && match f.extent {
                    FamilyExtent::Interval { u_lo, u_hi } => root.u > u_lo - 1e-9 && root.u < u_hi + 1e-9,
                    FamilyExtent::Isolated => (root.u - f.u_mid).abs() < 1e-8,
                }
        });
        if covered {
            continue;
        }
        let degenerate = residual(spec, root.u, root.theta, m)
            .and_then(|r| jacobian(spec, root.u, root.theta, m, r))
            .is_none_or(|j| is_degenerate(&j));
        let (extent, u_mid) = if degenerate {
            let (u_lo, u_hi) = family_interval(spec, root, m);
            (FamilyExtent::Interval { u_lo, u_hi }, 0.5 * (u_lo + u_hi))
        } else {
            (FamilyExtent::Isolated, root.u)
        };
        found.push(Found {
            theta: root.theta,
            extent,
            u_mid,
        });
    }

    let mut seen: HashSet<Vec<(usize, i64)>> = HashSet::new();
    let mut kept = Vec::new();
    for f in found {
        let Some(geodesic) = build_member(spec, f.u_mid, f.theta, m) else { continue };
        let key = canonical_key(&geodesic);
        if !seen.insert(key.clone()) {
            continue;
        }
        let orbit = orbit_size(&geodesic);
        kept.push((f, geodesic, key, orbit));
    }

    let settings = VerifySettings { exec, ..opts.verify };
    let mut entries = Vec::with_capacity(kept.len());
    for (f, geodesic, canonical_key, orbit_size) in kept {
        let member_us: Vec<f64> = match f.extent {
            FamilyExtent::Interval { u_lo, u_hi } => (0..nu).map(u_at).filter(|&u| u > u_lo && u < u_hi).collect(),
            FamilyExtent::Isolated => Vec::new(),
        };
        let members: Vec<FamilyMember> = map_slice(exec, &member_us, |&u| {
            let c = build_member(spec, u, f.theta, m)?;
            let minind = minimizing_index_with(&settings, &c, k_max).ok()?;
            Some(FamilyMember { u, minind })
        })
        .into_iter()
        .flatten()
        .collect();
        let minind = minimizing_index_with(&settings, &geodesic, k_max)?;
        entries.push(CatalogEntry {
            representative: ShootingState::new(f.u_mid, f.theta, m),
            geodesic,
            minind,
            extent: f.extent,
            members,
            orbit_size,
            canonical_key,
        });
    }
    Ok(GeodesicCatalog {
        spec: spec.clone(),
        period: m,
        seed_grid: opts.seed_grid,
        k_max,
        entries,
        excluded_cells,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvidenceRow {
    pub period: usize,
    pub families: usize,
    /// Midlines counted over their dihedral orbits.
    pub curves: usize,
    /// Curves whose index was computed or bounded (midlines plus members).
    pub checked: usize,
    /// Smallest index found among checked curves at this period.
    pub min_index: Option<usize>,
    /// Checked curves with no passing k up to `k_max`.
    pub beyond_k_max: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvidenceTable {
    pub n: usize,
    pub period_max: usize,
    pub k_max: usize,
    pub seed_grid: (usize, usize),
    pub rows: Vec<EvidenceRow>,
    /// Every checked curve has index at least this.
    pub bound: Option<usize>,
    pub statement: String,
}

/// Runs the search for every even period up to `period_max` and tabulates
/// the smallest per-curve minimizing index observed.
pub fn minind_evidence(spec: &PolygonSpec, period_max: usize, k_max: usize) -> Result<EvidenceTable> {
    minind_evidence_with(spec, period_max, k_max, &SearchOptions::default())
}

pub fn minind_evidence_with(spec: &PolygonSpec, period_max: usize, k_max: usize, opts: &SearchOptions) -> Result<EvidenceTable> {
    if period_max < 2 {
        return Err(Error::InvalidPeriod(period_max));
    }
    if k_max < 2 {
        return Err(Error::InvalidK(k_max));
    }
    let opts = SearchOptions {
        k_max: Some(k_max),
        ..*opts
    };
    let mut rows = Vec::new();
    for m in (2..=period_max).step_by(2) {
        let cat = find_closed_geodesics_with(spec, m, &opts)?;
        let reports: Vec<&MinindReport> = cat.entries.iter().flat_map(|e| e.reports()).collect();
        rows.push(EvidenceRow {
            period: m,
            families: cat.entries.len(),
            curves: cat.curve_count(),
            checked: reports.len(),
            min_index: reports.iter().filter_map(|r| r.index).min(),
            beyond_k_max: reports.iter().filter(|r| r.index.is_none()).count(),
        });
    }
    let checked: usize = rows.iter().map(|r| r.checked).sum();
    let bound = rows.iter().filter_map(|r| r.min_index).min().or((checked > 0).then_some(k_max + 1));
    let (nu, nt) = opts.seed_grid;
    let statement = match bound {
        Some(b) => format!(
            "every closed geodesic found on X_{} with period <= {period_max} (seed grid {nu}x{nt}, k_max {k_max}) \
             has minimizing index >= {b}; grid-limited numerical evidence, not a proof",
            spec.n()
        ),
        None => format!(
            "no closed geodesic found on X_{} with period <= {period_max} (seed grid {nu}x{nt}); \
             grid-limited numerical evidence, not a proof",
            spec.n()
        ),
    };
    Ok(EvidenceTable {
        n: spec.n(),
        period_max,
        k_max,
        seed_grid: opts.seed_grid,
        rows,
        bound,
        statement,
    })
}
