//! Iterated fit-and-project bundling with a shrinking bandwidth.
//!
//! Each iteration snapshots all site positions, rebuilds the uniform grid,
//! and computes every site's projection from that snapshot. New positions are
//! written to a separate buffer and swapped in at the end of the iteration,
//! so the result does not depend on processing order or thread count.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::Point2;
use crate::graph_io::{Graph, PolylineSet};
use crate::grid::UniformGrid;
use crate::metrics;
use crate::mls;
use crate::sampler::{self, SiteCloud};

/// Cell size policy of the neighbor grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CellMode {
    /// Cell size equal to the bandwidth; the 3x3 scan is exact.
    #[default]
    Exact,
    /// Cell size of two thirds of the bandwidth with a 3x3 scan. Faster,
    /// but can miss neighbors near the edge of the disc.
    Paper,
}

impl CellMode {
    pub fn cell_size(self, bandwidth: f64) -> f64 {
        match self {
            CellMode::Exact => bandwidth,
            CellMode::Paper => bandwidth * 2.0 / 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BundleParams {
    /// Sampling step in pixels.
    pub rho: f64,
    /// Initial bandwidth as a fraction of the smaller drawing dimension.
    pub bandwidth: f64,
    /// Bandwidth reduction factor applied after every iteration.
    pub lambda: f64,
    pub iterations: usize,
    /// Polynomial order of the local regression curve (1 or 2).
    pub order: usize,
    pub resolution: (u32, u32),
    /// Keep edge endpoints at their original positions.
    pub pin_endpoints: bool,
    pub cell_mode: CellMode,
}

impl BundleParams {
    /// Defaults for a `width x height` drawing: step of 5% of the smaller
    /// dimension, bandwidth 10%, lambda 0.7, 5 iterations, quadratic fits.
    pub fn new(width: u32, height: u32) -> Self {
        Self {
            rho: 0.05 * width.min(height) as f64,
            bandwidth: 0.10,
            lambda: 0.7,
            iterations: 5,
            order: 2,
            resolution: (width, height),
            pin_endpoints: true,
            cell_mode: CellMode::Exact,
        }
    }

    pub fn for_graph(graph: &Graph) -> Self {
        Self::new(graph.width, graph.height)
    }

    pub fn min_dimension(&self) -> f64 {
        self.resolution.0.min(self.resolution.1) as f64
    }

    /// Bandwidth in pixels at iteration `u` (zero-based).
    pub fn bandwidth_at(&self, u: usize) -> f64 {
        self.bandwidth * self.min_dimension() * self.lambda.powi(u as i32)
    }

    /// Rejects unusable values and returns warnings for values outside the
    /// recommended ranges (bandwidth 5-20%, lambda 0.5-0.9, 3-10 iterations).
    pub fn validate(&self) -> Result<Vec<String>> {
        let invalid = |msg: String| Err(Error::InvalidParam(msg));
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return invalid(format!("rho must be positive, got {}", self.rho));
        }
        if !(self.bandwidth > 0.0 && self.bandwidth.is_finite()) {
            return invalid(format!(
                "bandwidth must be positive, got {}",
                self.bandwidth
            ));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return invalid(format!("lambda must be positive, got {}", self.lambda));
        }
        if !matches!(self.order, 1 | 2) {
            return invalid(format!("order must be 1 or 2, got {}", self.order));
        }
        if self.resolution.0 == 0 || self.resolution.1 == 0 {
            return invalid(format!(
                "resolution must be positive, got {}x{}",
                self.resolution.0, self.resolution.1
            ));
        }

        let mut warnings = Vec::new();
        if !(0.05..=0.20).contains(&self.bandwidth) {
            warnings.push(format!(
                "bandwidth {} outside the recommended range [0.05, 0.20]",
                self.bandwidth
            ));
        }
        if !(0.5..=0.9).contains(&self.lambda) {
            warnings.push(format!(
                "lambda {} outside the recommended range [0.5, 0.9]",
                self.lambda
            ));
        }
        if !(3..=10).contains(&self.iterations) {
            warnings.push(format!(
                "{} iterations outside the recommended range [3, 10]",
                self.iterations
            ));
        }
        Ok(warnings)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationStats {
    pub iteration: usize,
    pub bandwidth: f64,
    /// Mean over all sites of the distance moved in this iteration.
    pub mean_displacement: f64,
    pub max_displacement: f64,
    /// Sites left in place because no frame could be fitted.
    pub unmoved: usize,
    /// Sites that fell back from order 2 to a linear fit.
    pub linear_fallbacks: usize,
    /// Total distortion (sum of |pos - orig|) after this iteration.
    pub distortion: f64,
    /// Sum of squared displacements after this iteration.
    pub distortion_squared: f64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct BundleOutcome {
    pub cloud: SiteCloud,
    pub stats: Vec<IterationStats>,
}

/// Samples `graph` and runs `params.iterations` bundling iterations.
///
/// Runs on the current rayon pool; wrap the call in
/// [`rayon::ThreadPool::install`] to control parallelism.
pub fn bundle(graph: &Graph, params: &BundleParams) -> Result<BundleOutcome> {
    for w in params.validate()? {
        log::warn!("{w}");
    }
    let mut cloud = sampler::sample(graph, params.rho);
    let stats = (0..params.iterations)
        .map(|u| iterate(&mut cloud, params, u))
        .collect();
    Ok(BundleOutcome { cloud, stats })
}

#[derive(Clone, Copy)]
enum SiteUpdate {
    Fixed,
    Projected { order: usize },
    Unmoved,
}

struct Scratch {
    points: Vec<Point2>,
    weights: Vec<f64>,
}

/// One Jacobi iteration at bandwidth index `u`.
pub fn iterate(cloud: &mut SiteCloud, params: &BundleParams, u: usize) -> IterationStats {
    let start = Instant::now();
    let r = params.bandwidth_at(u);
    let snapshot = cloud.positions();
    let grid = UniformGrid::from_positions(&snapshot, params.cell_mode.cell_size(r));

    let updates: Vec<(Point2, SiteUpdate)> = cloud
        .sites
        .par_iter()
        .map_init(
            || Scratch {
                points: Vec::new(),
                weights: Vec::new(),
            },
            |scratch, site| {
                let here = site.pos;
                if params.pin_endpoints && site.is_endpoint {
                    return (here, SiteUpdate::Fixed);
                }
                scratch.points.clear();
                scratch.weights.clear();
                // Coordinates relative to the site keep the fit well scaled.
                grid.for_each_neighbor(&snapshot, here, r, |j| {
                    let d = snapshot[j] - here;
                    scratch.points.push(d);
                    scratch.weights.push(mls::theta(d.norm(), r));
                });
                match mls::project_site(
                    Point2::ZERO,
                    &scratch.points,
                    &scratch.weights,
                    params.order,
                ) {
                    Some((offset, order)) => (here + offset, SiteUpdate::Projected { order }),
                    None => (here, SiteUpdate::Unmoved),
                }
            },
        )
        .collect();

    let mut total_move = 0.0;
    let mut max_move = 0.0f64;
    let mut unmoved = 0;
    let mut linear_fallbacks = 0;
    for (site, &(next, update)) in cloud.sites.iter_mut().zip(&updates) {
        let moved = next.distance(site.pos);
        total_move += moved;
        max_move = max_move.max(moved);
        match update {
            SiteUpdate::Unmoved => unmoved += 1,
            SiteUpdate::Projected { order } if order < params.order => linear_fallbacks += 1,
            _ => {}
        }
        site.pos = next;
    }

    IterationStats {
        iteration: u,
        bandwidth: r,
        mean_displacement: if cloud.is_empty() {
            0.0
        } else {
            total_move / cloud.len() as f64
        },
        max_displacement: max_move,
        unmoved,
        linear_fallbacks,
        distortion: metrics::distortion(cloud),
        distortion_squared: metrics::distortion_squared(cloud),
        elapsed: start.elapsed(),
    }
}

/// Final per-edge polylines (site positions, no resampling).
pub fn to_polylines(cloud: &SiteCloud) -> PolylineSet {
    cloud.current_polylines()
}
