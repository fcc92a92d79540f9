use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mlseb::graph_io::{load_edge_csv, read_polylines_csv, write_edge_csv, write_polylines_csv};
use mlseb::render::{bspline, rasterize, write_image, EdgeStyle};
use mlseb::sampler::sample;
use mlseb::synth::{self, Generator, SynthSpec};
use mlseb::{bundle, metrics, BundleParams, CellMode, Polyline, PolylineSet};

#[derive(Parser)]
#[command(name = "mlseb", version, about = "Moving least squares edge bundling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bundle an edge CSV and write the resulting polylines.
    Bundle {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        bundling: Bundling,
    },
    /// Render a polyline CSV to a PPM or PNG image.
    Render {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        canvas: Canvas,
        /// Global opacity of the edges.
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        /// Draw each polyline as a B-spline with this many samples per span
        /// (0 draws the raw polyline).
        #[arg(long, default_value_t = 0)]
        smooth: usize,
    },
    /// Compare a bundled polyline CSV against its original edge CSV.
    Quality {
        /// Original edge CSV.
        #[arg(long)]
        input: PathBuf,
        /// Bundled polyline CSV.
        #[arg(long)]
        bundled: PathBuf,
        /// Report CSV.
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        canvas: Canvas,
        /// Sampling step the bundled file was produced with.
        #[arg(long, default_value_t = 0.05)]
        rho: f64,
    },
    /// Write a reproducible synthetic edge CSV.
    Synth {
        /// parallel-pairs, radial-hub or random-uniform.
        generator: String,
        #[arg(long)]
        output: PathBuf,
        /// Number of edges.
        #[arg(long, default_value_t = 100)]
        n: usize,
        /// Spacing in pixels between parallel-pairs edges.
        #[arg(long, default_value_t = 10.0)]
        gap: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        canvas: Canvas,
    },
}

#[derive(Args)]
struct Io {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct Canvas {
    /// Drawing size in pixels.
    #[arg(long, default_value = "400x400")]
    resolution: Resolution,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct Bundling {
    #[command(flatten)]
    canvas: Canvas,
    /// Sampling step as a fraction of the smaller drawing dimension.
    #[arg(long, default_value_t = 0.05)]
    rho: f64,
    /// Initial bandwidth as a fraction of the smaller drawing dimension.
    #[arg(long, default_value_t = 0.10)]
    bandwidth: f64,
    /// Bandwidth reduction factor per iteration.
    #[arg(long, default_value_t = 0.7)]
    lambda: f64,
    #[arg(long, default_value_t = 5)]
    iterations: usize,
    /// Order of the local regression curve.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
    order: u8,
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pin_endpoints: bool,
    #[arg(long, value_enum, default_value_t = CellModeArg::Exact)]
    cell_mode: CellModeArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum CellModeArg {
    Exact,
    Paper,
}

#[derive(Clone, Copy)]
struct Resolution {
    width: u32,
    height: u32,
}

impl FromStr for Resolution {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parse = |v: &str| v.trim().parse::<u32>().ok().filter(|&n| n > 0);
        match s.split_once(['x', 'X']).map(|(w, h)| (parse(w), parse(h))) {
            Some((Some(width), Some(height))) => Ok(Self { width, height }),
            _ => Err(format!("expected WxH with positive integers, got {s:?}")),
        }
    }
}

impl Canvas {
    fn run<T: Send>(&self, job: impl FnOnce() -> T + Send) -> Result<T> {
        match self.threads {
            Some(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .context("building thread pool")?;
                Ok(pool.install(job))
            }
            None => Ok(job()),
        }
    }
}

impl Bundling {
    fn params(&self) -> BundleParams {
        let Resolution { width, height } = self.canvas.resolution;
        let mut params = BundleParams::new(width, height);
        params.rho = self.rho * params.min_dimension();
        params.bandwidth = self.bandwidth;
        params.lambda = self.lambda;
        params.iterations = self.iterations;
        params.order = self.order as usize;
        params.pin_endpoints = self.pin_endpoints;
        params.cell_mode = match self.cell_mode {
            CellModeArg::Exact => CellMode::Exact,
            CellModeArg::Paper => CellMode::Paper,
        };
        params
    }
}

fn cmd_bundle(io: &Io, bundling: &Bundling) -> Result<()> {
    let Resolution { width, height } = bundling.canvas.resolution;
    let graph = load_edge_csv(&io.input, width, height)?;
    let params = bundling.params();
    let outcome = bundling.canvas.run(|| bundle(&graph, &params))??;
    for s in &outcome.stats {
        eprintln!(
            "iteration {} r={:.3} mean_displacement={:.6} time={:.1}ms",
            s.iteration,
            s.bandwidth,
            s.mean_displacement,
            s.elapsed.as_secs_f64() * 1e3
        );
    }
    write_polylines_csv(&mlseb::to_polylines(&outcome.cloud), &io.output)?;
    Ok(())
}

fn cmd_render(io: &Io, canvas: &Canvas, alpha: f64, smooth: usize) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        bail!("alpha must be in (0, 1], got {alpha}");
    }
    let Resolution { width, height } = canvas.resolution;
    let mut polys = read_polylines_csv(&io.input)?;
    if smooth > 0 {
        polys = PolylineSet {
            lines: polys
                .lines
                .into_iter()
                .map(|l| Polyline {
                    edge_id: l.edge_id,
                    points: bspline(&l.points, smooth),
                })
                .collect(),
        };
    }
    let style = EdgeStyle::for_polylines(alpha, &polys);
    let raster = canvas.run(|| rasterize(&polys, &style, width, height))?;
    write_image(&raster, &io.output)?;
    Ok(())
}

fn cmd_quality(
    input: &PathBuf,
    bundled: &PathBuf,
    output: &PathBuf,
    canvas: &Canvas,
    rho: f64,
) -> Result<()> {
    let Resolution { width, height } = canvas.resolution;
    let graph = load_edge_csv(input, width, height)?;
    let polys = read_polylines_csv(bundled)?;
    let rho_px = rho * width.min(height) as f64;
    if !(rho_px > 0.0 && rho_px.is_finite()) {
        bail!("rho must be positive, got {rho}");
    }
    let cloud = sample(&graph, rho_px)
        .with_positions_from(&polys)
        .with_context(|| format!("{} does not match {}", bundled.display(), input.display()))?;
    let report = canvas.run(|| metrics::assess(&cloud, width, height))??;
    metrics::report_csv(&report, output)?;
    match report.quality {
        Some(q) => println!("Q = {q}"),
        None => println!("Q = nan"),
    }
    Ok(())
}

fn cmd_synth(
    generator: &str,
    output: &PathBuf,
    n: usize,
    gap: f64,
    seed: u64,
    canvas: &Canvas,
) -> Result<()> {
    let generator: Generator = generator.parse()?;
    let Resolution { width, height } = canvas.resolution;
    let segments = synth::generate(&SynthSpec {
        generator,
        edges: n,
        seed,
        width,
        height,
        gap,
    });
    write_edge_csv(&segments, output)?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Bundle { io, bundling } => cmd_bundle(io, bundling),
        Command::Render {
            io,
            canvas,
            alpha,
            smooth,
        } => cmd_render(io, canvas, *alpha, *smooth),
        Command::Quality {
            input,
            bundled,
            output,
            canvas,
            rho,
        } => cmd_quality(input, bundled, output, canvas, *rho),
        Command::Synth {
            generator,
            output,
            n,
            gap,
            seed,
            canvas,
        } => cmd_synth(generator, output, *n, *gap, *seed, canvas),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
