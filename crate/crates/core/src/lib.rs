//! Moving-least-squares edge bundling.
//!
//! Edges of a node-link drawing are discretized into sites, and every site is
//! repeatedly projected onto a weighted local regression curve fitted through
//! its neighborhood. Nearby edges collapse onto shared skeleton curves while
//! each site stays close to where it started. The crate also provides the
//! clutter/distortion quality assessment used to compare bundled drawings.
//!
//! The pipeline:
//!
//! 1. [`graph_io::load_edge_csv`] reads and normalizes a drawing.
//! 2. [`bundler::bundle`] samples edges ([`sampler::sample`]) and iterates the
//!    fit-and-project operator ([`mls`]) with a shrinking bandwidth, using a
//!    [`grid::UniformGrid`] for fixed-radius neighbor search.
//! 3. [`render`] rasterizes polylines, and [`metrics`] turns pixel counts and
//!    site displacements into a [`metrics::QualityReport`].

pub mod bundler;
pub mod error;
pub mod geom;
pub mod graph_io;
pub mod grid;
pub mod metrics;
pub mod mls;
pub mod render;
pub mod sampler;
pub mod synth;

pub use bundler::{bundle, to_polylines, BundleOutcome, BundleParams, CellMode, IterationStats};
pub use error::{Error, Result};
pub use geom::Point2;
pub use graph_io::{Edge, Graph, Polyline, PolylineSet};
pub use metrics::QualityReport;
pub use sampler::{Site, SiteCloud};
