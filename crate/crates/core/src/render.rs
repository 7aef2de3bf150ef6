//! SVG figures: the polygon with curves drawn in the plane, segments on the
//! top face solid and segments on the bottom face dashed.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::geodesics::ClosedGeodesic;
use crate::geometry::{PlanePoint, PolygonSpec};
use crate::metric::Face;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RenderOptions {
    /// Width and height of the square canvas in pixels.
    pub size: u32,
    pub junction_dots: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            size: 512,
            junction_dots: false,
        }
    }
}

struct View {
    center: f64,
    scale: f64,
}

impl View {
    fn new(spec: &PolygonSpec, size: u32) -> Self {
        let center = size as f64 / 2.0;
        Self {
            center,
            scale: 0.9 * center / spec.circumradius(),
        }
    }

    fn map(&self, p: PlanePoint) -> (f64, f64) {
        // SVG y grows downward
        (self.center + self.scale * p.x, self.center - self.scale * p.y)
    }
}

/// Renders `curves` over the outline of `spec`; every curve must live on `spec`.
pub fn render_svg(spec: &PolygonSpec, curves: &[ClosedGeodesic], opts: &RenderOptions) -> Result<String> {
    if curves.iter().any(|c| c.spec() != spec) {
        return Err(Error::MixedSpecs);
    }
    let view = View::new(spec, opts.size);
    let size = opts.size;
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    let _ = writeln!(out, r#"<rect width="{size}" height="{size}" fill="white"/>"#);
    let outline: Vec<String> = spec
        .vertices()
        .iter()
        .map(|&v| {
            let (x, y) = view.map(v);
            format!("{x:.4},{y:.4}")
        })
        .collect();
    let _ = writeln!(
        out,
        r#"<polygon points="{}" fill="none" stroke="black" stroke-width="2"/>"#,
        outline.join(" ")
    );
    for (i, curve) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(out, r#"<g stroke="{color}" stroke-width="1.5" fill="none">"#);
        for s in curve.segments() {
            let (x1, y1) = view.map(s.start);
            let (x2, y2) = view.map(s.end);
            let dash = match s.face {
                Face::Top => "",
                Face::Bottom => r#" stroke-dasharray="6 4""#,
            };
            let _ = writeln!(out, r#"<line x1="{x1:.4}" y1="{y1:.4}" x2="{x2:.4}" y2="{y2:.4}"{dash}/>"#);
        }
        if opts.junction_dots {
            for s in curve.segments() {
                let (x, y) = view.map(s.start);
                let _ = writeln!(out, r#"<circle cx="{x:.4}" cy="{y:.4}" r="3" fill="{color}" stroke="none"/>"#);
            }
        }
        let _ = writeln!(out, "</g>");
    }
    let _ = writeln!(out, "</svg>");
    Ok(out)
}
