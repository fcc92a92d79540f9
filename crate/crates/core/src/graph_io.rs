//! Edge-list input and polyline output.
//!
//! Input is a headerless or headed CSV of `x1,y1,x2,y2` rows. Output polylines
//! are written one point per row as `edge_id,point_index,x,y`. Floats are
//! written with the shortest representation that parses back to the same
//! `f64`, so a write/read cycle is lossless.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::geom::Point2;

/// A straight edge drawing `p -> q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    /// Zero-based data-row index in the source file (or caller-chosen id).
    pub id: u64,
    pub p: Point2,
    pub q: Point2,
}

impl Edge {
    pub fn length(&self) -> f64 {
        self.p.distance(self.q)
    }
}

/// Node-link drawing in a `width x height` pixel space.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    pub edges: Vec<Edge>,
    pub width: u32,
    pub height: u32,
    /// Number of zero-length edges removed while building the graph.
    pub dropped: usize,
}

impl Graph {
    /// Builds a graph from coordinates that are already in drawing space.
    ///
    /// Zero-length edges are dropped and counted. Fails if any coordinate
    /// falls outside `[0, width] x [0, height]` or no edge survives.
    pub fn new(segments: &[(Point2, Point2)], width: u32, height: u32) -> Result<Self> {
        let (w, h) = (width as f64, height as f64);
        let inside = |p: Point2| (0.0..=w).contains(&p.x) && (0.0..=h).contains(&p.y);
        if let Some((i, _)) = segments
            .iter()
            .enumerate()
            .find(|(_, (p, q))| !inside(*p) || !inside(*q))
        {
            return Err(Error::InvalidParam(format!(
                "edge {i} lies outside the {width}x{height} drawing"
            )));
        }
        let graph = Self::from_segments(segments.iter().copied(), width, height);
        if graph.edges.is_empty() {
            return Err(Error::InvalidParam(
                "graph has no edges of nonzero length".into(),
            ));
        }
        Ok(graph)
    }

    /// Min-max normalizes arbitrary coordinates into `[0, width] x [0, height]`.
    ///
    /// The scale is uniform (aspect ratio preserved) and the drawing is
    /// centered along the axis with slack. Returns `None` when every edge is
    /// degenerate.
    pub fn normalized(segments: &[(Point2, Point2)], width: u32, height: u32) -> Option<Self> {
        let kept: Vec<(usize, Point2, Point2)> = segments
            .iter()
            .enumerate()
            .filter(|(_, (p, q))| p != q)
            .map(|(i, &(p, q))| (i, p, q))
            .collect();
        if kept.is_empty() {
            return None;
        }

        let (mut lo, mut hi) = (
            Point2::new(f64::INFINITY, f64::INFINITY),
            Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        );
        for &(_, p, q) in &kept {
            for c in [p, q] {
                lo = Point2::new(lo.x.min(c.x), lo.y.min(c.y));
                hi = Point2::new(hi.x.max(c.x), hi.y.max(c.y));
            }
        }
        let (w, h) = (width as f64, height as f64);
        let extent = hi - lo;
        let scale = match (extent.x > 0.0, extent.y > 0.0) {
            (true, true) => (w / extent.x).min(h / extent.y),
            (true, false) => w / extent.x,
            (false, true) => h / extent.y,
            (false, false) => unreachable!("nonzero edge with zero extent"),
        };
        let offset = Point2::new((w - extent.x * scale) / 2.0, (h - extent.y * scale) / 2.0);
        let map = |c: Point2| {
            let m = (c - lo) * scale + offset;
            Point2::new(m.x.clamp(0.0, w), m.y.clamp(0.0, h))
        };

        let edges = kept
            .iter()
            .map(|&(i, p, q)| Edge {
                id: i as u64,
                p: map(p),
                q: map(q),
            })
            .collect();
        Some(Self {
            edges,
            width,
            height,
            dropped: segments.len() - kept.len(),
        })
    }

    fn from_segments(
        segments: impl Iterator<Item = (Point2, Point2)>,
        width: u32,
        height: u32,
    ) -> Self {
        let mut dropped = 0;
        let edges = segments
            .enumerate()
            .filter_map(|(i, (p, q))| {
                if p == q {
                    dropped += 1;
                    None
                } else {
                    Some(Edge { id: i as u64, p, q })
                }
            })
            .collect();
        Self {
            edges,
            width,
            height,
            dropped,
        }
    }

    pub fn min_dimension(&self) -> f64 {
        self.width.min(self.height) as f64
    }

    /// Each edge as a two-point polyline.
    pub fn straight_polylines(&self) -> PolylineSet {
        PolylineSet {
            lines: self
                .edges
                .iter()
                .map(|e| Polyline {
                    edge_id: e.id,
                    points: vec![e.p, e.q],
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub edge_id: u64,
    pub points: Vec<Point2>,
}

/// Per-edge polylines, in graph edge order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PolylineSet {
    pub lines: Vec<Polyline>,
}

impl PolylineSet {
    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn point_count(&self) -> usize {
        self.lines.iter().map(|l| l.points.len()).sum()
    }
}

fn parse_f64(field: &str) -> Option<f64> {
    field.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Reads raw `x1,y1,x2,y2` rows without normalization.
///
/// A first row that does not parse as numbers is treated as a header. Blank
/// lines are ignored.
pub fn read_edge_rows(path: &Path) -> Result<Vec<(Point2, Point2)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::csv(path, e))?;

    let mut rows = Vec::new();
    let mut first = true;
    for record in reader.records() {
        let record = record.map_err(|e| Error::csv(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let is_first = std::mem::take(&mut first);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        let values: Option<Vec<f64>> = record.iter().map(parse_f64).collect();
        match values {
            Some(v) if v.len() == 4 => {
                rows.push((Point2::new(v[0], v[1]), Point2::new(v[2], v[3])));
            }
            None if is_first => continue,
            _ => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    message: format!(
                        "expected 4 decimal numbers `x1,y1,x2,y2`, got {:?}",
                        record.iter().collect::<Vec<_>>()
                    ),
                })
            }
        }
    }
    Ok(rows)
}

/// Loads an edge CSV and normalizes it into a `width x height` drawing.
pub fn load_edge_csv(path: impl AsRef<Path>, width: u32, height: u32) -> Result<Graph> {
    let path = path.as_ref();
    if width == 0 || height == 0 {
        return Err(Error::InvalidParam(format!(
            "resolution must be positive, got {width}x{height}"
        )));
    }
    let rows = read_edge_rows(path)?;
    let graph =
        Graph::normalized(&rows, width, height).ok_or_else(|| Error::EmptyInput(path.into()))?;
    if graph.dropped > 0 {
        log::warn!(
            "{}: dropped {} zero-length edge(s)",
            path.display(),
            graph.dropped
        );
    }
    Ok(graph)
}

/// Writes `x1,y1,x2,y2` rows with a header.
pub fn write_edge_csv(segments: &[(Point2, Point2)], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let write = |out: &mut BufWriter<File>| -> std::io::Result<()> {
        writeln!(out, "x1,y1,x2,y2")?;
        for (p, q) in segments {
            writeln!(out, "{},{},{},{}", p.x, p.y, q.x, q.y)?;
        }
        out.flush()
    };
    write(&mut out).map_err(|e| Error::io(path, e))
}

/// Writes one `edge_id,point_index,x,y` row per polyline point.
pub fn write_polylines_csv(polys: &PolylineSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let write = |out: &mut BufWriter<File>| -> std::io::Result<()> {
        writeln!(out, "edge_id,point_index,x,y")?;
        for line in &polys.lines {
            for (k, p) in line.points.iter().enumerate() {
                writeln!(out, "{},{},{},{}", line.edge_id, k, p.x, p.y)?;
            }
        }
        out.flush()
    };
    write(&mut out).map_err(|e| Error::io(path, e))
}

/// Reads polylines written by [`write_polylines_csv`].
///
/// Rows must be grouped by edge with `point_index` counting up from zero.
pub fn read_polylines_csv(path: impl AsRef<Path>) -> Result<PolylineSet> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::csv(path, e))?;

    let parse_err = |line: u64, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut lines: Vec<Polyline> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::csv(path, e))?;
        let line_no = record.position().map_or(0, |p| p.line());
        if record.len() != 4 {
            return Err(parse_err(
                line_no,
                format!("expected 4 fields, got {}", record.len()),
            ));
        }
        let edge_id: u64 = record[0]
            .parse()
            .map_err(|_| parse_err(line_no, format!("bad edge_id {:?}", &record[0])))?;
        let index: usize = record[1]
            .parse()
            .map_err(|_| parse_err(line_no, format!("bad point_index {:?}", &record[1])))?;
        let (Some(x), Some(y)) = (parse_f64(&record[2]), parse_f64(&record[3])) else {
            return Err(parse_err(line_no, "bad coordinate".into()));
        };

        match lines.last_mut() {
            Some(last) if last.edge_id == edge_id => {
                if index != last.points.len() {
                    return Err(parse_err(
                        line_no,
                        format!("edge {edge_id}: expected point_index {}", last.points.len()),
                    ));
                }
                last.points.push(Point2::new(x, y));
            }
            _ => {
                if index != 0 {
                    return Err(parse_err(
                        line_no,
                        format!("edge {edge_id}: first point_index must be 0"),
                    ));
                }
                lines.push(Polyline {
                    edge_id,
                    points: vec![Point2::new(x, y)],
                });
            }
        }
    }
    Ok(PolylineSet { lines })
}
