//! Clutter reduction, distortion and the combined quality score.
//!
//! Clutter is measured as used raster pixels, distortion as the summed
//! Euclidean displacement of sites from their sampled positions. The quality
//! score is pixels saved per unit of mean site displacement.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::render;
use crate::sampler::SiteCloud;

/// Total distortion: sum over sites of `|pos - orig|`.
pub fn distortion(cloud: &SiteCloud) -> f64 {
    cloud.sites.iter().map(|s| s.pos.distance(s.orig)).sum()
}

/// Sum over sites of `|pos - orig|^2`. Diagnostic only.
pub fn distortion_squared(cloud: &SiteCloud) -> f64 {
    cloud
        .sites
        .iter()
        .map(|s| (s.pos - s.orig).norm_squared())
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityReport {
    /// `S`: number of sites.
    pub sites: u64,
    /// `P`: used pixels of the original drawing.
    pub pixels_original: u64,
    /// `P'`: used pixels of the bundled drawing.
    pub pixels_bundled: u64,
    /// `delta_P = P - P'`; negative when bundling adds clutter.
    pub delta_pixels: i64,
    /// `T`: total distortion in pixels.
    pub distortion: f64,
    /// `T_bar = T / S`.
    pub mean_distortion: f64,
    /// `Q = delta_P / T_bar`; `None` when there is no distortion.
    pub quality: Option<f64>,
}

/// Assembles a report from pixel counts, total distortion and site count.
pub fn quality(
    pixels_original: u64,
    pixels_bundled: u64,
    distortion: f64,
    sites: u64,
) -> Result<QualityReport> {
    if sites == 0 {
        return Err(Error::InvalidParam("site count must be positive".into()));
    }
    let delta_pixels = pixels_original as i64 - pixels_bundled as i64;
    let mean_distortion = distortion / sites as f64;
    let quality = (mean_distortion != 0.0).then(|| delta_pixels as f64 / mean_distortion);
    Ok(QualityReport {
        sites,
        pixels_original,
        pixels_bundled,
        delta_pixels,
        distortion,
        mean_distortion,
        quality,
    })
}

/// Rasterizes the original and current site polylines of a bundled cloud at
/// `width x height` and scores the result.
pub fn assess(cloud: &SiteCloud, width: u32, height: u32) -> Result<QualityReport> {
    let before = render::coverage(&cloud.original_polylines(), width, height);
    let after = render::coverage(&cloud.current_polylines(), width, height);
    quality(
        render::used_pixels(&before),
        render::used_pixels(&after),
        distortion(cloud),
        cloud.len() as u64,
    )
}

const REPORT_HEADER: &str = "S,P,P_prime,delta_P,T,T_bar,Q";

fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        v.to_string()
    }
}

/// Writes the report as a header plus a single CSV row. An undefined score is
/// written as `nan`.
pub fn report_csv(report: &QualityReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    writeln!(out, "{REPORT_HEADER}")
        .and_then(|_| {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                report.sites,
                report.pixels_original,
                report.pixels_bundled,
                report.delta_pixels,
                format_float(report.distortion),
                format_float(report.mean_distortion),
                format_float(report.quality.unwrap_or(f64::NAN)),
            )
        })
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}

/// Reads a report written by [`report_csv`].
pub fn read_report_csv(path: impl AsRef<Path>) -> Result<QualityReport> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let bad = |line: u64, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines();
    if lines.next() != Some(REPORT_HEADER) {
        return Err(bad(1, format!("expected header `{REPORT_HEADER}`")));
    }
    let row = lines
        .next()
        .ok_or_else(|| bad(2, "missing data row".into()))?;
    let fields: Vec<&str> = row.split(',').collect();
    if fields.len() != 7 {
        return Err(bad(2, format!("expected 7 fields, got {}", fields.len())));
    }
    let int = |i: usize| {
        fields[i]
            .parse::<i64>()
            .map_err(|_| bad(2, format!("bad integer {:?}", fields[i])))
    };
    let float = |i: usize| {
        fields[i]
            .parse::<f64>()
            .map_err(|_| bad(2, format!("bad number {:?}", fields[i])))
    };
    let q = float(6)?;
    Ok(QualityReport {
        sites: int(0)? as u64,
        pixels_original: int(1)? as u64,
        pixels_bundled: int(2)? as u64,
        delta_pixels: int(3)?,
        distortion: float(4)?,
        mean_distortion: float(5)?,
        quality: (!q.is_nan()).then_some(q),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point2;
    use crate::graph_io::Graph;
    use crate::sampler::sample;

    fn cloud() -> SiteCloud {
        let g = Graph::new(
            &[(Point2::new(0.0, 0.0), Point2::new(100.0, 0.0))],
            400,
            400,
        )
        .unwrap();
        sample(&g, 20.0)
    }

    #[test]
    fn unbundled_has_no_distortion() {
        assert_eq!(distortion(&cloud()), 0.0);
        let report = assess(&cloud(), 400, 400).unwrap();
        assert_eq!(report.delta_pixels, 0);
        assert_eq!(report.quality, None);
    }

    #[test]
    fn three_four_five() {
        let mut c = cloud();
        c.sites[0].pos = Point2::new(3.0, 4.0);
        assert_eq!(distortion(&c), 5.0);
        assert_eq!(distortion_squared(&c), 25.0);
    }

    #[test]
    fn no_clutter_change_scores_zero() {
        let r = quality(1000, 1000, 50.0, 10).unwrap();
        assert_eq!(r.delta_pixels, 0);
        assert_eq!(r.quality, Some(0.0));
    }

    #[test]
    fn doubling_distortion_halves_quality() {
        let a = quality(5000, 3000, 120.0, 64).unwrap().quality.unwrap();
        let b = quality(5000, 3000, 240.0, 64).unwrap().quality.unwrap();
        assert_eq!(a, 2.0 * b);
    }

    #[test]
    fn clutter_increase_scores_negative() {
        let r = quality(100, 150, 10.0, 10).unwrap();
        assert_eq!(r.delta_pixels, -50);
        assert_eq!(r.quality, Some(-50.0));
    }

    #[test]
    fn zero_sites_rejected() {
        assert!(quality(1, 1, 0.0, 0).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("q.csv");
        let r = quality(32_017, 19_443, 74_519.123_456_789_1, 84_977).unwrap();
        report_csv(&r, &path).unwrap();
        assert_eq!(read_report_csv(&path).unwrap(), r);

        let zero = quality(0, 0, 0.0, 1).unwrap();
        report_csv(&zero, &path).unwrap();
        assert_eq!(
            std::fs::read_to_string(&path).unwrap(),
            "S,P,P_prime,delta_P,T,T_bar,Q\n1,0,0,0,0,0,nan\n"
        );
        assert_eq!(read_report_csv(&path).unwrap().quality, None);
    }
}
