//! Reproducible synthetic edge sets.
//!
//! All generators work in a `width x height` drawing space and draw from a
//! ChaCha8 stream seeded with the caller's seed, so a given
//! `(generator, n, seed, size)` always yields the same coordinates.
//!
//! - `parallel-pairs`: `n` horizontal edges spanning 10%..90% of the width,
//!   `gap` pixels apart, centered vertically. No randomness.
//! - `radial-hub`: `n` spokes from the drawing center to endpoints at uniform
//!   angle and radius uniform in 20%..48% of the smaller dimension.
//! - `random-uniform`: `n` edges with both endpoints uniform over the drawing.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geom::Point2;

pub type Segment = (Point2, Point2);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    ParallelPairs,
    RadialHub,
    RandomUniform,
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "parallel-pairs" => Ok(Generator::ParallelPairs),
            "radial-hub" => Ok(Generator::RadialHub),
            "random-uniform" => Ok(Generator::RandomUniform),
            other => Err(Error::InvalidParam(format!(
                "unknown generator {other:?} (expected parallel-pairs, radial-hub or random-uniform)"
            ))),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Generator::ParallelPairs => "parallel-pairs",
            Generator::RadialHub => "radial-hub",
            Generator::RandomUniform => "random-uniform",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthSpec {
    pub generator: Generator,
    pub edges: usize,
    pub seed: u64,
    pub width: u32,
    pub height: u32,
    /// Vertical spacing for `parallel-pairs`.
    pub gap: f64,
}

pub fn generate(spec: &SynthSpec) -> Vec<Segment> {
    let (w, h) = (spec.width as f64, spec.height as f64);
    match spec.generator {
        Generator::ParallelPairs => parallel_pairs(spec.edges, spec.gap, w, h),
        Generator::RadialHub => radial_hub(spec.edges, spec.seed, w, h),
        Generator::RandomUniform => random_uniform(spec.edges, spec.seed, w, h),
    }
}

pub fn parallel_pairs(n: usize, gap: f64, width: f64, height: f64) -> Vec<Segment> {
    let y0 = height / 2.0 - gap * (n.saturating_sub(1)) as f64 / 2.0;
    (0..n)
        .map(|i| {
            let y = y0 + gap * i as f64;
            (Point2::new(0.1 * width, y), Point2::new(0.9 * width, y))
        })
        .collect()
}

pub fn radial_hub(n: usize, seed: u64, width: f64, height: f64) -> Vec<Segment> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hub = Point2::new(width / 2.0, height / 2.0);
    let extent = width.min(height);
    (0..n)
        .map(|_| {
            let angle = rng.gen_range(0.0..TAU);
            let radius = rng.gen_range(0.20..0.48) * extent;
            (hub, hub + Point2::new(angle.cos(), angle.sin()) * radius)
        })
        .collect()
}

pub fn random_uniform(n: usize, seed: u64, width: f64, height: f64) -> Vec<Segment> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut point = || Point2::new(rng.gen_range(0.0..width), rng.gen_range(0.0..height));
    (0..n).map(|_| (point(), point())).collect()
}
