//! The `dpoly` command line.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analysis::{check_one_over_k_in, minimizing_index_with, VerifySettings};
use crate::error::{Error, Result};
use crate::geodesics::{half_geodesics, over_under, period4_x3, trace_from_edge, ClosedGeodesic, CurveKind, TraceOutcome};
use crate::geometry::PolygonSpec;
use crate::io::{
    parse_curves, to_json, CatalogDocument, CurveDocument, CurveSet, EvidenceDocument, PolygonDocument, ReportDocument,
};
use crate::metric::Face;
use crate::par::Execution;
use crate::render::{render_svg, RenderOptions};
use crate::search::{find_closed_geodesics_with, minind_evidence_with, SearchOptions};

#[derive(Debug, Parser)]
#[command(name = "dpoly", version, about = "Geodesics and 1/k-minimization on doubled regular polygons")]
struct Cli {
    /// Run every computation on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct PolygonArgs {
    /// Number of sides.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
}

#[derive(Debug, Args)]
struct OutArg {
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CurveInput {
    /// Curve document or curve set.
    #[arg(long)]
    curve: PathBuf,
    /// Which curve of a set to use.
    #[arg(long, default_value_t = 0)]
    index: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Vertices, side length and apothem of the polygon.
    Polygon {
        #[command(flatten)]
        poly: PolygonArgs,
        #[command(flatten)]
        out: OutArg,
    },
    /// The over-under curve through every step-th edge midpoint.
    OverUnder {
        #[command(flatten)]
        poly: PolygonArgs,
        #[arg(long, default_value_t = 1)]
        step: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// All half-geodesics, as a curve set.
    Half {
        #[command(flatten)]
        poly: PolygonArgs,
        #[command(flatten)]
        out: OutArg,
    },
    /// The period-4 curve on the doubled triangle launched at offset u.
    Period4 {
        #[arg(long, default_value_t = 0.5)]
        u: f64,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Billiard trace from an edge point until it closes.
    Trace {
        #[command(flatten)]
        poly: PolygonArgs,
        #[arg(long, default_value_t = 0)]
        edge: usize,
        #[arg(long)]
        u: f64,
        /// Launch angle from the edge direction; radians, or degrees with a `deg` suffix.
        #[arg(long, value_parser = parse_angle)]
        angle: f64,
        #[arg(long, default_value_t = 64)]
        segments: usize,
        #[arg(long, default_value = "top", value_parser = parse_face)]
        face: Face,
        #[command(flatten)]
        out: OutArg,
    },
    /// Check the 1/k-minimization property.
    Verify {
        #[command(flatten)]
        input: CurveInput,
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        k: u64,
        /// Sample count; defaults to 64 per segment per k.
        #[arg(long)]
        grid: Option<usize>,
        /// Absolute tolerance; defaults to 1e-7 L.
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Smallest k for which the curve is a 1/k-geodesic.
    Minind {
        #[command(flatten)]
        input: CurveInput,
        /// Largest k tried; defaults to four times the period.
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        k_max: Option<u64>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Shooting search for closed geodesics of one period.
    Search {
        #[command(flatten)]
        poly: PolygonArgs,
        #[arg(long)]
        period: usize,
        #[arg(long, value_parser = parse_seed_grid, default_value = "256x256")]
        seed_grid: (usize, usize),
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        k_max: Option<u64>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Minimizing-index evidence over all even periods up to a bound.
    Evidence {
        #[command(flatten)]
        poly: PolygonArgs,
        #[arg(long)]
        period_max: usize,
        /// Largest k tried per curve; defaults to four times period-max.
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        k_max: Option<u64>,
        #[arg(long, value_parser = parse_seed_grid, default_value = "256x256")]
        seed_grid: (usize, usize),
        #[command(flatten)]
        out: OutArg,
    },
    /// Draw curves as SVG.
    Render {
        /// Curve documents or sets; all must share one polygon.
        #[arg(long)]
        curve: Vec<PathBuf>,
        /// Polygon to draw when no curves are given.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long)]
        junctions: bool,
        #[arg(long, default_value_t = 512)]
        size: u32,
        #[command(flatten)]
        out: OutArg,
    },
}

fn parse_angle(s: &str) -> std::result::Result<f64, String> {
    let (num, deg) = match s.strip_suffix("deg") {
        Some(rest) => (rest, true),
        None => (s, false),
    };
    let v: f64 = num.trim().parse().map_err(|_| format!("not an angle: {s}"))?;
    if !v.is_finite() {
        return Err(format!("not an angle: {s}"));
    }
    Ok(if deg { v.to_radians() } else { v })
}

fn parse_face(s: &str) -> std::result::Result<Face, String> {
    match s {
        "top" => Ok(Face::Top),
        "bottom" => Ok(Face::Bottom),
        _ => Err(format!("face must be top or bottom, got {s}")),
    }
}

fn parse_seed_grid(s: &str) -> std::result::Result<(usize, usize), String> {
    let bad = || format!("seed grid must look like NUxNT, got {s}");
    let (a, b) = s.split_once('x').ok_or_else(bad)?;
    Ok((a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?))
}

fn emit(out: &OutArg, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match &out.out {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn read_curves(path: &Path) -> Result<Vec<ClosedGeodesic>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| std::io::Error::new(e.kind(), format!("cannot read {}: {e}", path.display())))?;
    parse_curves(&text)
}

fn pick_curve(input: &CurveInput) -> Result<ClosedGeodesic> {
    let curves = read_curves(&input.curve)?;
    let count = curves.len();
    curves.into_iter().nth(input.index).ok_or_else(|| {
        Error::InvalidCurve(format!("index {} out of range; {} holds {count} curves", input.index, input.curve.display()))
    })
}

fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    let settings = VerifySettings {
        exec,
        ..VerifySettings::default()
    };
    let spec_of = |p: &PolygonArgs| PolygonSpec::new(p.n, p.radius);
    match cli.command {
        Command::Polygon { poly, out } => emit(&out, &to_json(&PolygonDocument::new(&spec_of(&poly)?))?, stdout),
        Command::OverUnder { poly, step, out } => {
            let c = over_under(&spec_of(&poly)?, step)?;
            emit(&out, &to_json(&CurveDocument::new(&c))?, stdout)
        }
        Command::Half { poly, out } => {
            let curves = half_geodesics(&spec_of(&poly)?);
            emit(&out, &to_json(&CurveSet::new(&curves))?, stdout)
        }
        Command::Period4 { u, radius, out } => {
            let c = period4_x3(&PolygonSpec::new(3, radius)?, u)?;
            emit(&out, &to_json(&CurveDocument::new(&c))?, stdout)
        }
        Command::Trace {
            poly,
            edge,
            u,
            angle,
            segments,
            face,
            out,
        } => match trace_from_edge(&spec_of(&poly)?, edge, u, angle, face, segments)? {
            TraceOutcome::Closed(c) => emit(&out, &to_json(&CurveDocument::new(&c.with_kind(CurveKind::Traced)))?, stdout),
            TraceOutcome::VertexHit {
                vertex, segment_index, ..
            } => Err(Error::InvalidCurve(format!("trace hit vertex {vertex} on segment {segment_index}"))),
            TraceOutcome::Truncated(_) => Err(Error::InvalidCurve(format!("trace did not close within {segments} segments"))),
        },
        Command::Verify { input, k, grid, tol, out } => {
            let c = pick_curve(&input)?;
            let k = k as usize;
            let grid = grid.unwrap_or_else(|| settings.grid_for(&c, k));
            let tol = tol.unwrap_or_else(|| settings.tol_for(&c));
            let r = check_one_over_k_in(exec, &c, k, grid, tol)?;
            emit(&out, &to_json(&ReportDocument::verify(&c, &r))?, stdout)
        }
        Command::Minind { input, k_max, out } => {
            let c = pick_curve(&input)?;
            let k_max = k_max.map_or(4 * c.period(), |k| k as usize);
            let r = minimizing_index_with(&settings, &c, k_max)?;
            emit(&out, &to_json(&ReportDocument::minind(&c, &r, &settings))?, stdout)
        }
        Command::Search {
            poly,
            period,
            seed_grid,
            k_max,
            out,
        } => {
            let opts = SearchOptions {
                seed_grid,
                k_max: k_max.map(|k| k as usize),
                verify: settings,
                exec,
            };
            let cat = find_closed_geodesics_with(&spec_of(&poly)?, period, &opts)?;
            emit(&out, &to_json(&CatalogDocument::new(&cat))?, stdout)
        }
        Command::Evidence {
            poly,
            period_max,
            k_max,
            seed_grid,
            out,
        } => {
            let opts = SearchOptions {
                seed_grid,
                k_max: None,
                verify: settings,
                exec,
            };
            let k_max = k_max.map_or(4 * period_max, |k| k as usize);
            let table = minind_evidence_with(&spec_of(&poly)?, period_max, k_max, &opts)?;
            emit(&out, &to_json(&EvidenceDocument::new(&table))?, stdout)
        }
        Command::Render {
            curve,
            n,
            radius,
            junctions,
            size,
            out,
        } => {
            let mut curves = Vec::new();
            for path in &curve {
                curves.extend(read_curves(path)?);
            }
            let spec = match (curves.first(), n) {
                (Some(c), _) => c.spec().clone(),
                (None, Some(n)) => PolygonSpec::new(n, radius)?,
                (None, None) => return Err(Error::InvalidCurve("render needs --curve or --n".into())),
            };
            let opts = RenderOptions {
                size,
                junction_dots: junctions,
            };
            emit(&out, &render_svg(&spec, &curves, &opts)?, stdout)
        }
    }
}

/// Runs the command line; returns 0 on success, 1 on domain errors and 2 on usage errors.
pub fn run_cli<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let text = e.to_string();
            let line = text.lines().next().unwrap_or("usage error").trim_start_matches("error: ");
            let _ = writeln!(stderr, "dpoly: usage error: {line}");
            return 2;
        }
    };
    match execute(cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            let _ = writeln!(stderr, "dpoly: error: {msg}");
            1
        }
    }
}

pub fn main_entry() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
