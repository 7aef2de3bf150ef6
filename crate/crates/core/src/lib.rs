//! Geometry of doubled regular polygons: intrinsic distance, billiard
//! geodesics, their closed families, and numerical checks of how far along a
//! closed geodesic it stays length-minimizing.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod geodesics;
pub mod geometry;
pub mod io;
pub mod metric;
pub mod par;
pub mod render;
pub mod search;

pub use error::{Error, Result};
pub use geodesics::{
    half_geodesics, over_under, period4_x3, trace, ClosedGeodesic, CurveKind, GeodesicPath, Segment, TraceOutcome,
};
pub use geometry::{build_polygon, classify_point, reflect_across_edge, symmetry_orbit, BoundaryLocation, PlanePoint, PolygonSpec, UnitDirection};
pub use metric::{distance, distance_bruteforce, shortest_crossing, CrossingWitness, Face, SurfacePoint};
pub use par::Execution;
