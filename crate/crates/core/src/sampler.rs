//! Uniform arc-length discretization of edges into sites.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::geom::Point2;
use crate::graph_io::{Graph, Polyline, PolylineSet};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Site {
    /// Current position; moved by the bundler.
    pub pos: Point2,
    /// Position at sampling time. Never modified.
    pub orig: Point2,
    /// Index of the owning edge in the graph's edge list.
    pub edge: u32,
    pub arc_index: u32,
    pub is_endpoint: bool,
    /// Arc-length parameter along the original edge, 0 at the first site and
    /// 1 at the last.
    pub t: f64,
}

/// All sites of a graph, stored edge after edge.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteCloud {
    pub sites: Vec<Site>,
    edge_offsets: Vec<usize>,
    edge_ids: Vec<u64>,
}

impl SiteCloud {
    /// Total number of sites.
    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_ids.len()
    }

    /// Index range of edge `i`'s sites within [`SiteCloud::sites`].
    pub fn edge_range(&self, i: usize) -> Range<usize> {
        self.edge_offsets[i]..self.edge_offsets[i + 1]
    }

    pub fn edge_sites(&self, i: usize) -> &[Site] {
        &self.sites[self.edge_range(i)]
    }

    /// Source id of edge `i` (the graph's [`crate::Edge::id`]).
    pub fn edge_id(&self, i: usize) -> u64 {
        self.edge_ids[i]
    }

    pub fn positions(&self) -> Vec<Point2> {
        self.sites.iter().map(|s| s.pos).collect()
    }

    /// Overwrites current positions from a parallel array.
    pub fn set_positions(&mut self, positions: &[Point2]) {
        assert_eq!(positions.len(), self.sites.len());
        for (s, &p) in self.sites.iter_mut().zip(positions) {
            s.pos = p;
        }
    }

    /// Per-edge polylines of current positions.
    pub fn current_polylines(&self) -> PolylineSet {
        self.polylines_by(|s| s.pos)
    }

    /// Per-edge polylines of sampling-time positions.
    pub fn original_polylines(&self) -> PolylineSet {
        self.polylines_by(|s| s.orig)
    }

    fn polylines_by(&self, f: impl Fn(&Site) -> Point2) -> PolylineSet {
        PolylineSet {
            lines: (0..self.edge_count())
                .map(|i| Polyline {
                    edge_id: self.edge_ids[i],
                    points: self.edge_sites(i).iter().map(&f).collect(),
                })
                .collect(),
        }
    }

    /// Replaces current positions with the points of `polys`, keeping `orig`.
    ///
    /// Used to rebuild a bundled cloud from a polyline file: the edge count
    /// and every per-edge point count must match.
    pub fn with_positions_from(&self, polys: &PolylineSet) -> Result<SiteCloud> {
        if polys.len() != self.edge_count() {
            return Err(Error::EdgeCountMismatch {
                left: self.edge_count(),
                right: polys.len(),
            });
        }
        let mut out = self.clone();
        for (i, line) in polys.lines.iter().enumerate() {
            let range = self.edge_range(i);
            if line.points.len() != range.len() {
                return Err(Error::PointCountMismatch {
                    edge: i,
                    left: range.len(),
                    right: line.points.len(),
                });
            }
            for (s, &p) in out.sites[range].iter_mut().zip(&line.points) {
                s.pos = p;
            }
        }
        Ok(out)
    }
}

/// Number of sites for an edge of length `length`: enough that no gap
/// exceeds `rho`, and never fewer than the two endpoints.
pub fn site_count(length: f64, rho: f64) -> usize {
    let segments = (length / rho).ceil();
    (segments as usize + 1).max(2)
}

/// Samples every edge with a uniform step no larger than `rho`.
///
/// Panics if `rho` is not positive and finite.
pub fn sample(graph: &Graph, rho: f64) -> SiteCloud {
    assert!(
        rho > 0.0 && rho.is_finite(),
        "rho must be positive, got {rho}"
    );

    let mut sites = Vec::new();
    let mut edge_offsets = Vec::with_capacity(graph.edges.len() + 1);
    let mut edge_ids = Vec::with_capacity(graph.edges.len());
    edge_offsets.push(0);

    for (i, edge) in graph.edges.iter().enumerate() {
        let m = site_count(edge.length(), rho);
        let last = m - 1;
        sites.extend((0..m).map(|k| {
            let (pos, t) = if k == last {
                (edge.q, 1.0)
            } else {
                let t = k as f64 / last as f64;
                (edge.p.lerp(edge.q, t), t)
            };
            Site {
                pos,
                orig: pos,
                edge: i as u32,
                arc_index: k as u32,
                is_endpoint: k == 0 || k == last,
                t,
            }
        }));
        edge_offsets.push(sites.len());
        edge_ids.push(edge.id);
    }

    SiteCloud {
        sites,
        edge_offsets,
        edge_ids,
    }
}
