//! Versioned JSON documents for curves, reports, catalogs and evidence tables.
//!
//! Floats are written in scientific notation with 17 significant digits, so
//! every `f64` survives a write/read cycle bit for bit.

use std::io::{self, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::analysis::{GapEntry, MinindReport, Status, VerificationReport, VerifySettings};
use crate::error::{Error, Result};
use crate::geodesics::{ClosedGeodesic, CurveKind};
use crate::geometry::{PlanePoint, PolygonSpec};
use crate::metric::Face;
use crate::search::{EvidenceRow, EvidenceTable, FamilyExtent, GeodesicCatalog};

pub const SCHEMA_VERSION: u32 = 1;

/// Pretty JSON with round-trip float formatting.
struct ExactFloats<'a>(PrettyFormatter<'a>);

fn write_float<W: ?Sized + Write>(w: &mut W, v: f64) -> io::Result<()> {
    if v.is_finite() {
        write!(w, "{v:.16e}")
    } else {
        w.write_all(b"null")
    }
}

impl Formatter for ExactFloats<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write_float(w, v)
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        write_float(w, v as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes any document with 17-significant-digit floats and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, ExactFloats(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

#[derive(Deserialize)]
struct VersionProbe {
    schema_version: u32,
}

/// Parses a document after checking its schema version.
pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let probe: VersionProbe = serde_json::from_str(text)?;
    if probe.schema_version != SCHEMA_VERSION {
        return Err(Error::Schema(probe.schema_version));
    }
    Ok(serde_json::from_str(text)?)
}

fn xy(p: PlanePoint) -> [f64; 2] {
    [p.x, p.y]
}

fn pt(a: [f64; 2]) -> PlanePoint {
    PlanePoint::new(a[0], a[1])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolygonDocument {
    pub schema_version: u32,
    pub n: usize,
    pub circumradius: f64,
    pub side_length: f64,
    pub apothem: f64,
    pub vertices: Vec<[f64; 2]>,
}

impl PolygonDocument {
    pub fn new(spec: &PolygonSpec) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            n: spec.n(),
            circumradius: spec.circumradius(),
            side_length: spec.side_length(),
            apothem: spec.apothem(),
            vertices: spec.vertices().iter().copied().map(xy).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentDocument {
    pub face: Face,
    pub start: [f64; 2],
    pub end: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveDocument {
    pub schema_version: u32,
    pub n: usize,
    pub circumradius: f64,
    #[serde(flatten)]
    pub kind: CurveKind,
    pub period: usize,
    pub length: f64,
    pub segments: Vec<SegmentDocument>,
    pub closed: bool,
}

impl CurveDocument {
    pub fn new(curve: &ClosedGeodesic) -> Self {
        let spec = curve.spec();
        Self {
            schema_version: SCHEMA_VERSION,
            n: spec.n(),
            circumradius: spec.circumradius(),
            kind: curve.kind(),
            period: curve.period(),
            length: curve.length(),
            segments: curve
                .segments()
                .iter()
                .map(|s| SegmentDocument {
                    face: s.face,
                    start: xy(s.start),
                    end: xy(s.end),
                })
                .collect(),
            closed: curve.path().is_closed(),
        }
    }

    pub fn spec(&self) -> Result<PolygonSpec> {
        PolygonSpec::new(self.n, self.circumradius)
    }

    /// Rebuilds and revalidates the curve.
    pub fn to_curve(&self) -> Result<ClosedGeodesic> {
        if !self.closed {
            return Err(Error::NotClosed);
        }
        if self.period != self.segments.len() {
            return Err(Error::InvalidCurve(format!(
                "period {} does not match {} stored segments",
                self.period,
                self.segments.len()
            )));
        }
        let spec = self.spec()?;
        let segs: Vec<_> = self.segments.iter().map(|s| (s.face, pt(s.start), pt(s.end))).collect();
        ClosedGeodesic::from_segments(&spec, &segs, self.kind)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSet {
    pub schema_version: u32,
    pub curves: Vec<CurveDocument>,
}

impl CurveSet {
    pub fn new(curves: &[ClosedGeodesic]) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            curves: curves.iter().map(CurveDocument::new).collect(),
        }
    }
}

/// Reads either a single curve document or a curve set.
pub fn parse_curves(text: &str) -> Result<Vec<ClosedGeodesic>> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    if value.get("curves").is_some() {
        let set: CurveSet = from_json(text)?;
        set.curves.iter().map(CurveDocument::to_curve).collect()
    } else {
        let doc: CurveDocument = from_json(text)?;
        Ok(vec![doc.to_curve()?])
    }
}

pub fn emit_curve(curve: &ClosedGeodesic) -> Result<String> {
    to_json(&CurveDocument::new(curve))
}

pub fn parse_curve(text: &str) -> Result<ClosedGeodesic> {
    from_json::<CurveDocument>(text)?.to_curve()
}

/// Identifies the curve a report refers to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRef {
    pub n: usize,
    pub circumradius: f64,
    #[serde(flatten)]
    pub kind: CurveKind,
    pub period: usize,
    pub length: f64,
}

impl CurveRef {
    pub fn new(curve: &ClosedGeodesic) -> Self {
        Self {
            n: curve.spec().n(),
            circumradius: curve.spec().circumradius(),
            kind: curve.kind(),
            period: curve.period(),
            length: curve.length(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessDocument {
    pub t: f64,
    pub start: [f64; 2],
    pub start_face: Face,
    pub end: [f64; 2],
    pub end_face: Face,
    /// Edge crossed by the shortcut; absent for same-face chords.
    pub edge: Option<usize>,
    pub crossing_point: Option<[f64; 2]>,
    pub length: f64,
    pub arc: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportKind {
    Verify,
    Minind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub report: ReportKind,
    pub curve: CurveRef,
    /// The checked k for `verify`.
    pub k: Option<usize>,
    /// The minimizing index for `minind`, when found.
    pub k_star: Option<usize>,
    pub k_max: Option<usize>,
    pub status: Status,
    pub min_gap: f64,
    pub argmin_t: Option<f64>,
    pub witness: Option<WitnessDocument>,
    pub grid: usize,
    pub tolerance: f64,
    pub borderline: bool,
    pub gaps: Vec<GapEntry>,
}

impl ReportDocument {
    pub fn verify(curve: &ClosedGeodesic, r: &VerificationReport) -> Self {
        let witness = r.witness.as_ref().map(|w| WitnessDocument {
            t: w.t,
            start: xy(w.start.position),
            start_face: w.start.face,
            end: xy(w.end.position),
            end_face: w.end.face,
            edge: w.crossing.map(|c| c.edge_index),
            crossing_point: w.crossing.map(|c| xy(c.crossing_point)),
            length: w.distance,
            arc: w.geodesic_arc,
        });
        Self {
            schema_version: SCHEMA_VERSION,
            report: ReportKind::Verify,
            curve: CurveRef::new(curve),
            k: Some(r.k),
            k_star: None,
            k_max: None,
            status: r.status,
            min_gap: r.min_gap,
            argmin_t: Some(r.argmin_t),
            witness,
            grid: r.grid,
            tolerance: r.tolerance,
            borderline: r.borderline,
            gaps: vec![GapEntry {
                k: r.k,
                status: r.status,
                min_gap: r.min_gap,
            }],
        }
    }

    /// Summarizes an index search by its last checked k.
    pub fn minind(curve: &ClosedGeodesic, r: &MinindReport, settings: &VerifySettings) -> Self {
        let last = r.gaps.last().copied().unwrap_or(GapEntry {
            k: r.k_max,
            status: Status::Fail,
            min_gap: f64::NAN,
        });
        Self {
            schema_version: SCHEMA_VERSION,
            report: ReportKind::Minind,
            curve: CurveRef::new(curve),
            k: None,
            k_star: r.index,
            k_max: Some(r.k_max),
            status: if r.index.is_some() { Status::Pass } else { Status::Fail },
            min_gap: last.min_gap,
            argmin_t: None,
            witness: None,
            grid: settings.grid_for(curve, last.k),
            tolerance: settings.tol_for(curve),
            borderline: false,
            gaps: r.gaps.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ExtentDocument {
    Isolated,
    Interval { u_lo: f64, u_hi: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemberDocument {
    pub u: f64,
    pub k_star: Option<usize>,
    pub lower_bound: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryDocument {
    pub u: f64,
    pub theta: f64,
    pub extent: ExtentDocument,
    pub orbit_size: usize,
    pub k_star: Option<usize>,
    pub lower_bound: usize,
    pub gaps: Vec<GapEntry>,
    pub members: Vec<MemberDocument>,
    pub curve: CurveDocument,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogDocument {
    pub schema_version: u32,
    pub n: usize,
    pub circumradius: f64,
    pub period: usize,
    pub seed_grid: [usize; 2],
    pub k_max: usize,
    pub excluded_cells: usize,
    pub families: usize,
    pub curve_count: usize,
    pub entries: Vec<EntryDocument>,
    pub note: String,
}

impl CatalogDocument {
    pub fn new(cat: &GeodesicCatalog) -> Self {
        let entries = cat
            .entries
            .iter()
            .map(|e| EntryDocument {
                u: e.representative.u,
                theta: e.representative.theta,
                extent: match e.extent {
                    FamilyExtent::Isolated => ExtentDocument::Isolated,
                    FamilyExtent::Interval { u_lo, u_hi } => ExtentDocument::Interval { u_lo, u_hi },
                },
                orbit_size: e.orbit_size,
                k_star: e.minind.index,
                lower_bound: e.minind.lower_bound(),
                gaps: e.minind.gaps.clone(),
                members: e
                    .members
                    .iter()
                    .map(|m| MemberDocument {
                        u: m.u,
                        k_star: m.minind.index,
                        lower_bound: m.minind.lower_bound(),
                    })
                    .collect(),
                curve: CurveDocument::new(&e.geodesic),
            })
            .collect();
        Self {
            schema_version: SCHEMA_VERSION,
            n: cat.spec.n(),
            circumradius: cat.spec.circumradius(),
            period: cat.period,
            seed_grid: [cat.seed_grid.0, cat.seed_grid.1],
            k_max: cat.k_max,
            excluded_cells: cat.excluded_cells,
            families: cat.entries.len(),
            curve_count: cat.curve_count(),
            entries,
            note: "grid search over launch data on edge 0; completeness is empirical, not certified".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvidenceRowDocument {
    pub period: usize,
    pub families: usize,
    pub curves: usize,
    pub checked: usize,
    pub min_index: Option<usize>,
    pub beyond_k_max: usize,
}

impl From<&EvidenceRow> for EvidenceRowDocument {
    fn from(r: &EvidenceRow) -> Self {
        Self {
            period: r.period,
            families: r.families,
            curves: r.curves,
            checked: r.checked,
            min_index: r.min_index,
            beyond_k_max: r.beyond_k_max,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvidenceDocument {
    pub schema_version: u32,
    pub n: usize,
    pub period_max: usize,
    pub k_max: usize,
    pub seed_grid: [usize; 2],
    pub rows: Vec<EvidenceRowDocument>,
    pub bound: Option<usize>,
    pub statement: String,
}

impl EvidenceDocument {
    pub fn new(t: &EvidenceTable) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            n: t.n,
            period_max: t.period_max,
            k_max: t.k_max,
            seed_grid: [t.seed_grid.0, t.seed_grid.1],
            rows: t.rows.iter().map(EvidenceRowDocument::from).collect(),
            bound: t.bound,
            statement: t.statement.clone(),
        }
    }
}
