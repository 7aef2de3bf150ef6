//! 1/k-minimization checks for closed geodesics.
//!
//! For a closed geodesic of length L, the gap function
//! `g(t) = d(γ(t), γ(t + L/k)) - L/k` is never positive, since the arc itself
//! is a competing path. The curve is a 1/k-geodesic exactly when `g` vanishes
//! everywhere. `g` is piecewise smooth: kinks occur only where `t` or
//! `t + L/k` crosses a junction, and those parameters are added to the
//! sampling grid explicitly before local refinement.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodesics::{ClosedGeodesic, CurveKind};
use crate::geometry::{reflect_point, PlanePoint};
use crate::metric::{best_crossing, distance_unchecked, CrossingWitness, SurfacePoint};
use crate::par::{map_range, map_slice, Execution};

/// Default grid is `GRID_FACTOR * period * k` samples.
pub const GRID_FACTOR: usize = 64;
/// Smallest admissible grid is `MIN_GRID_FACTOR * period * k`.
pub const MIN_GRID_FACTOR: usize = 8;
/// Default tolerance, relative to L.
pub const REL_TOL: f64 = 1e-7;
/// Local refinement stops at this bracket width, relative to L.
const REFINE_WIDTH: f64 = 1e-10;
/// At most this many discrete local minima are refined.
const MAX_REFINE: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// A pair of curve points at arc distance L/k joined by something shorter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShortcutWitness {
    pub t: f64,
    pub start: SurfacePoint,
    pub end: SurfacePoint,
    pub distance: f64,
    pub geodesic_arc: f64,
    /// `None` when both points are on one face and the shortcut is the chord.
    pub crossing: Option<CrossingWitness>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub k: usize,
    pub status: Status,
    /// Minimum of the gap function after refinement.
    pub min_gap: f64,
    pub argmin_t: f64,
    pub witness: Option<ShortcutWitness>,
    pub grid: usize,
    pub tolerance: f64,
    /// The minimum lies within a decade of the tolerance on either side.
    pub borderline: bool,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Per-k outcome recorded while searching for the minimizing index.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapEntry {
    pub k: usize,
    pub status: Status,
    pub min_gap: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinindReport {
    /// Smallest passing k, or `None` if none up to `k_max` passes.
    pub index: Option<usize>,
    pub period: usize,
    pub k_max: usize,
    pub gaps: Vec<GapEntry>,
}

impl MinindReport {
    /// Lower bound implied by the report: the index itself, or `k_max + 1`.
    pub fn lower_bound(&self) -> usize {
        self.index.unwrap_or(self.k_max + 1)
    }
}

/// Tunables shared by the verifier and the index search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifySettings {
    pub exec: Execution,
    pub grid_factor: usize,
    pub rel_tol: f64,
}

impl Default for VerifySettings {
    fn default() -> Self {
        Self {
            exec: Execution::default(),
            grid_factor: GRID_FACTOR,
            rel_tol: REL_TOL,
        }
    }
}

impl VerifySettings {
    pub fn grid_for(&self, curve: &ClosedGeodesic, k: usize) -> usize {
        self.grid_factor * curve.period() * k
    }

    pub fn tol_for(&self, curve: &ClosedGeodesic) -> f64 {
        self.rel_tol * curve.length()
    }

    pub fn check(&self, curve: &ClosedGeodesic, k: usize) -> Result<VerificationReport> {
        check_one_over_k_in(self.exec, curve, k, self.grid_for(curve, k), self.tol_for(curve))
    }
}

#[inline]
fn gap(curve: &ClosedGeodesic, arc: f64, t: f64) -> f64 {
    let a = curve.evaluate(t);
    let b = curve.evaluate(t + arc);
    distance_unchecked(curve.spec(), &a, &b) - arc
}

/// Golden-section search for a local minimum of `f` on `[lo, hi]`.
fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, width: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > width {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Checks whether `curve` minimizes on every subarc of length L/k.
pub fn check_one_over_k(curve: &ClosedGeodesic, k: usize, grid: usize, tol: f64) -> Result<VerificationReport> {
    check_one_over_k_in(Execution::default(), curve, k, grid, tol)
}

pub fn check_one_over_k_in(
    exec: Execution,
    curve: &ClosedGeodesic,
    k: usize,
    grid: usize,
    tol: f64,
) -> Result<VerificationReport> {
    if k < 2 {
        return Err(Error::InvalidK(k));
    }
    if !curve.path().is_closed() {
        return Err(Error::NotClosed);
    }
    let min_grid = MIN_GRID_FACTOR * curve.period() * k;
    if grid < min_grid {
        return Err(Error::GridTooSmall { grid, min: min_grid });
    }
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Error::BadTolerance(tol));
    }
    let len = curve.length();
    let arc = len / k as f64;

    let mut params: Vec<f64> = (0..grid).map(|i| len * i as f64 / grid as f64).collect();
    for &c in curve.junction_params() {
        params.push(c);
        params.push((c - arc).rem_euclid(len));
    }
    params.sort_by(f64::total_cmp);
    params.dedup();
    let params: Vec<f64> = params.into_iter().filter(|&t| t < len).collect();
    let values = map_slice(exec, &params, |&t| gap(curve, arc, t));

    let count = params.len();
    let mut minima: Vec<usize> = (0..count)
        .filter(|&i| {
            let prev = values[(i + count - 1) % count];
            let next = values[(i + 1) % count];
            values[i] <= prev && values[i] <= next
        })
        .collect();
    minima.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    minima.truncate(MAX_REFINE);

    let refined = map_slice(exec, &minima, |&i| {
        let lo = if i == 0 { params[count - 1] - len } else { params[i - 1] };
        let hi = if i + 1 == count { params[0] + len } else { params[i + 1] };
        let (t, v) = golden_min(|t| gap(curve, arc, t), lo, hi, REFINE_WIDTH * len);
        if v < values[i] {
            (t.rem_euclid(len), v)
        } else {
            (params[i], values[i])
        }
    });

    let mut best_t = params[0];
    let mut best = values[0];
    for (&t, &v) in params.iter().zip(&values).chain(refined.iter().map(|(t, v)| (t, v))) {
        if v < best {
            best = v;
            best_t = t;
        }
    }

    let status = if best >= -tol { Status::Pass } else { Status::Fail };
    let witness = (status == Status::Fail).then(|| {
        let start = curve.evaluate(best_t);
        let end = curve.evaluate(best_t + arc);
        let crossing = (start.face != end.face).then(|| best_crossing(curve.spec(), start.position, end.position));
        ShortcutWitness {
            t: best_t,
            start,
            end,
            distance: best + arc,
            geodesic_arc: arc,
            crossing,
        }
    });
    Ok(VerificationReport {
        k,
        status,
        min_gap: best,
        argmin_t: best_t,
        witness,
        grid,
        tolerance: tol,
        borderline: best < -0.1 * tol && best >= -10.0 * tol,
    })
}

/// Default cap on k for the index search: four times the period.
pub fn default_k_max(curve: &ClosedGeodesic) -> usize {
    4 * curve.period()
}

/// Smallest k ≤ `k_max` for which the curve is a 1/k-geodesic.
pub fn minimizing_index(curve: &ClosedGeodesic, k_max: usize) -> Result<MinindReport> {
    minimizing_index_with(&VerifySettings::default(), curve, k_max)
}

pub fn minimizing_index_with(settings: &VerifySettings, curve: &ClosedGeodesic, k_max: usize) -> Result<MinindReport> {
    if k_max < 2 {
        return Err(Error::InvalidK(k_max));
    }
    let mut gaps = Vec::new();
    let mut index = None;
    for k in 2..=k_max {
        let report = settings.check(curve, k)?;
        gaps.push(GapEntry {
            k,
            status: report.status,
            min_gap: report.min_gap,
        });
        if report.passed() {
            index = Some(k);
            break;
        }
    }
    Ok(MinindReport {
        index,
        period: curve.period(),
        k_max,
        gaps,
    })
}

/// The two-triangle configuration comparing the arc across junction `p_i`
/// with the straight path through the next edge, in the plane unfolded
/// across that edge. Lengths are named after the vertex they face.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdjacentShortcut {
    pub t: f64,
    pub q1: SurfacePoint,
    pub q2: SurfacePoint,
    pub p_prev: PlanePoint,
    pub p_i: PlanePoint,
    pub p_next: PlanePoint,
    /// Edge containing `p_next`, across which `q2` is mirrored.
    pub far_edge: usize,
    pub r2: PlanePoint,
    pub c: PlanePoint,
    /// Position of `c` along `p_i -> p_next` (0 at `p_i`).
    pub c_offset: f64,
    /// `c` lies on the chord `p_i p_next`. For n ≥ 7 it can fall beyond
    /// `p_i` when `q1` sits near the start of its segment.
    pub c_on_chord: bool,
    /// Signed `|c p_i|`, opposite `q1`; negative when `c` falls beyond `p_i`.
    pub side_q1: f64,
    /// Signed `|c p_next|`, opposite `r2`; negative when `c` falls beyond `p_next`.
    pub side_r2: f64,
    /// `|q1 c|`, opposite `p_i`.
    pub side_p_i: f64,
    /// `|r2 c|`, opposite `p_next`.
    pub side_p_next: f64,
    /// `|q1 p_i|`, opposite `c` in the first triangle.
    pub side_c: f64,
    /// Acute angle between the lines `q1 r2` and `p_i p_next`.
    pub angle_c: f64,
    /// `|q1 r2| = side_p_i + side_p_next`.
    pub shortcut: f64,
    /// Arc length between `q1` and `q2`, i.e. L / period.
    pub arc: f64,
}

/// Builds the adjacent-edge shortcut configuration for the arc
/// `(t, t + L/period)` of an over-under curve.
pub fn adjacent_shortcut(curve: &ClosedGeodesic, t: f64) -> Result<AdjacentShortcut> {
    if !matches!(curve.kind(), CurveKind::OverUnder { .. }) {
        return Err(Error::NotOverUnder);
    }
    let len = curve.length();
    let m = curve.period();
    let arc = len / m as f64;
    let t = t.rem_euclid(len);
    for &c in curve.junction_params().iter().chain(std::iter::once(&len)) {
        if (t - c).abs() < 1e-9 * len {
            return Err(Error::AtJunction(t));
        }
    }
    let i = curve.segment_at(t);
    let seg1 = curve.segments()[i];
    let seg2 = curve.segments()[(i + 1) % m];
    let q1 = curve.evaluate(t);
    let q2 = curve.evaluate(t + arc);
    let (p_prev, p_i, p_next) = (seg1.start, seg1.end, seg2.end);
    let far_edge = seg2.exit_edge;
    let r2 = reflect_point(curve.spec(), far_edge, q2.position);

    let dir_qr = r2 - q1.position;
    let dir_p = p_next - p_i;
    let c_offset = (q1.position - p_i).cross(dir_qr) / dir_p.cross(dir_qr);
    let c = p_i + dir_p * c_offset;

    let chord = p_i.dist(p_next);
    let angle_c = dir_qr.cross(dir_p).abs().atan2(dir_qr.dot(dir_p).abs());
    Ok(AdjacentShortcut {
        t,
        q1,
        q2,
        p_prev,
        p_i,
        p_next,
        far_edge,
        r2,
        c,
        c_offset,
        c_on_chord: (0.0..=1.0).contains(&c_offset),
        side_q1: c_offset * chord,
        side_r2: (1.0 - c_offset) * chord,
        side_p_i: q1.position.dist(c),
        side_p_next: r2.dist(c),
        side_c: q1.position.dist(p_i),
        angle_c,
        shortcut: q1.position.dist(r2),
        arc,
    })
}

/// Lengths from the midpoint period-4 curve on the doubled triangle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Figure7Lengths {
    /// `Q`: where the bisector of the corner the first segment heads into meets that segment.
    pub q: PlanePoint,
    /// `R`: foot of the perpendicular from `Q` to the starting edge.
    pub r: PlanePoint,
    pub qr: f64,
    pub qp3: f64,
    pub l_over_12: f64,
}

/// For the midpoint period-4 curve: the point on the first segment equidistant
/// from the starting edge and the far edge, and the three lengths that
/// coincide there.
pub fn figure7_lengths(curve: &ClosedGeodesic) -> Result<Figure7Lengths> {
    let spec = curve.spec();
    if spec.n() != 3 || curve.period() != 4 {
        return Err(Error::NotMidpointPeriodFour);
    }
    let junctions = curve.junctions();
    let (start, foot) = (junctions[0], junctions[1]);
    let first = curve.segments()[0];
    let d = first.direction();
    let tangent = spec.edge_tangent(start.edge);
    let launch = d.cross(tangent).atan2(d.dot(tangent)).abs();
    let perpendicular = d.cross(spec.edge_normal(foot.edge)).abs();
    let midpoint_start = (start.offset - 0.5).abs() < 1e-9;
    let sixth = (launch - std::f64::consts::PI / 6.0).abs() < 1e-9 || (launch - 5.0 * std::f64::consts::PI / 6.0).abs() < 1e-9;
    if !(midpoint_start && sixth && perpendicular < 1e-9) {
        return Err(Error::NotMidpointPeriodFour);
    }
    // corner shared by the starting edge and the edge met perpendicularly
    let corner = if (start.edge + 1) % 3 == foot.edge { (start.edge + 1) % 3 } else { start.edge };
    let v = spec.vertex(corner);
    let a = spec.vertex(corner + 1);
    let b = spec.vertex(corner + 2);
    let bis = (a - v) * (1.0 / a.dist(v)) + (b - v) * (1.0 / b.dist(v));
    let p2 = start.point;
    let p3 = foot.point;
    let seg = p3 - p2;
    let s = (v - p2).cross(bis) / seg.cross(bis);
    let q = p2 + seg * s;
    let nv = spec.edge_normal(start.edge);
    let r = q + nv * (spec.apothem() - q.dot(nv));
    Ok(Figure7Lengths {
        q,
        r,
        qr: q.dist(r),
        qp3: q.dist(p3),
        l_over_12: curve.length() / 12.0,
    })
}

/// Gap function sampled on a uniform grid, for plotting and diagnostics.
pub fn sample_gaps(exec: Execution, curve: &ClosedGeodesic, k: usize, samples: usize) -> Vec<(f64, f64)> {
    let len = curve.length();
    let arc = len / k as f64;
    map_range(exec, samples, |i| {
        let t = len * i as f64 / samples as f64;
        (t, gap(curve, arc, t))
    })
}
