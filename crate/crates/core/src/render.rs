//! Polyline smoothing, edge shading and software rasterization.
//!
//! Segments are traced with a supercover walk: a pixel `(i, j)` is the
//! half-open square `[i, i+1) x [j, j+1)`, and a segment covers exactly the
//! pixels `floor(p)` for the points `p` on it. Coverage drives the used-pixel
//! count of the quality metric; colors follow an HSVA edge encoding (hue from
//! direction, saturation from length, value/alpha from a parabolic profile
//! along the edge).

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::geom::Point2;
use crate::graph_io::PolylineSet;

/// Clamped uniform B-spline through `points` as control polygon, sampled
/// `samples_per_segment` times per knot span.
///
/// Degree is 3, reduced to `points.len() - 1` for short polygons. The first
/// and last output points are the first and last control points.
pub fn bspline(points: &[Point2], samples_per_segment: usize) -> Vec<Point2> {
    assert!(points.len() >= 2, "need at least 2 control points");
    assert!(samples_per_segment >= 1);
    let n = points.len();
    let degree = (n - 1).min(3);
    let spans = n - degree;
    let knots = clamped_knots(n, degree);

    let total = spans * samples_per_segment;
    let mut out = Vec::with_capacity(total + 1);
    let mut work = [Point2::ZERO; 4];
    for i in 0..=total {
        let u = i as f64 / total as f64;
        out.push(de_boor(points, &knots, degree, u, &mut work));
    }
    // Exact endpoint interpolation regardless of rounding in the recursion.
    out[0] = points[0];
    out[total] = points[n - 1];
    out
}

fn clamped_knots(n: usize, degree: usize) -> Vec<f64> {
    let spans = n - degree;
    let mut knots = vec![0.0; degree + 1];
    knots.extend((1..spans).map(|j| j as f64 / spans as f64));
    knots.extend(std::iter::repeat_n(1.0, degree + 1));
    knots
}

fn de_boor(ctrl: &[Point2], knots: &[f64], p: usize, u: f64, d: &mut [Point2; 4]) -> Point2 {
    let n = ctrl.len();
    // Span k with knots[k] <= u < knots[k + 1]; the last span is closed.
    let k = if u >= 1.0 {
        n - 1
    } else {
        knots.partition_point(|&t| t <= u) - 1
    };
    for j in 0..=p {
        d[j] = ctrl[j + k - p];
    }
    for r in 1..=p {
        for j in (r..=p).rev() {
            let i = j + k - p;
            let denom = knots[i + p + 1 - r] - knots[i];
            let alpha = if denom > 0.0 {
                (u - knots[i]) / denom
            } else {
                0.0
            };
            d[j] = d[j - 1] * (1.0 - alpha) + d[j] * alpha;
        }
    }
    d[p]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hsva {
    /// Hue in degrees, `[0, 360)`.
    pub h: f64,
    pub s: f64,
    pub v: f64,
    pub a: f64,
}

impl Hsva {
    /// RGB in `[0, 1]` by the usual six-sector conversion.
    pub fn to_rgb(&self) -> [f64; 3] {
        let c = self.v * self.s;
        let sector = self.h.rem_euclid(360.0) / 60.0;
        let x = c * (1.0 - (sector % 2.0 - 1.0).abs());
        let (r, g, b) = match sector as u32 {
            0 => (c, x, 0.0),
            1 => (x, c, 0.0),
            2 => (0.0, c, x),
            3 => (0.0, x, c),
            4 => (x, 0.0, c),
            _ => (c, 0.0, x),
        };
        let m = self.v - c;
        [r + m, g + m, b + m]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeStyle {
    /// Global opacity in `(0, 1]`.
    pub alpha: f64,
    /// Length of the longest edge.
    pub l_max: f64,
}

impl EdgeStyle {
    /// Style with `l_max` taken from the chord lengths (first to last point)
    /// of `polys`.
    pub fn for_polylines(alpha: f64, polys: &PolylineSet) -> Self {
        assert!(
            alpha > 0.0 && alpha <= 1.0,
            "alpha must be in (0, 1], got {alpha}"
        );
        let l_max = polys
            .lines
            .iter()
            .map(|l| chord(&l.points).norm())
            .fold(0.0, f64::max);
        Self { alpha, l_max }
    }
}

fn chord(points: &[Point2]) -> Point2 {
    match (points.first(), points.last()) {
        (Some(&a), Some(&b)) => b - a,
        _ => Point2::ZERO,
    }
}

/// Color of an edge point at arc parameter `t` on an edge of length `l`
/// pointing in `direction` (radians).
pub fn edge_color(t: f64, l: f64, style: &EdgeStyle, direction: f64) -> Hsva {
    let ratio = if style.l_max > 0.0 {
        (l / style.l_max).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let profile = (1.0 - 2.0 * (t - 0.5).abs()).max(0.0).sqrt();
    Hsva {
        h: direction.to_degrees().rem_euclid(360.0),
        s: ratio,
        v: ratio + (1.0 - ratio) * profile,
        a: style.alpha * (1.0 - ratio + ratio * profile),
    }
}

/// Visits every pixel the closed segment `a -> b` passes through, in order
/// from `a`. Coordinates may lie outside any raster; no clipping is done.
pub fn supercover(a: Point2, b: Point2, mut visit: impl FnMut(i64, i64)) {
    let (mut cx, mut cy) = (a.x.floor() as i64, a.y.floor() as i64);
    visit(cx, cy);
    let d = b - a;
    let step = |v: f64| (v > 0.0) as i64 - (v < 0.0) as i64;
    let (sx, sy) = (step(d.x), step(d.y));

    // Parameter at which the walk crosses the next cell boundary along one
    // axis, if that crossing is part of the segment. Moving up, the boundary
    // pixel is entered at the crossing; moving down, it is left just after.
    let next_event = |cell: i64, s: i64, start: f64, end: f64, delta: f64| -> Option<f64> {
        match s {
            1 => {
                let boundary = (cell + 1) as f64;
                (boundary <= end).then(|| (boundary - start) / delta)
            }
            -1 => {
                let boundary = cell as f64;
                (boundary > end).then(|| (boundary - start) / delta)
            }
            _ => None,
        }
    };

    loop {
        let tx = next_event(cx, sx, a.x, b.x, d.x);
        let ty = next_event(cy, sy, a.y, b.y, d.y);
        match (tx, ty) {
            (None, None) => break,
            (Some(_), None) => cx += sx,
            (None, Some(_)) => cy += sy,
            (Some(tx), Some(ty)) if tx < ty => cx += sx,
            (Some(tx), Some(ty)) if ty < tx => cy += sy,
            _ => {
                // Through a pixel corner. With mixed directions the corner
                // point itself lies in a third pixel.
                if sx != sy {
                    if sx > 0 {
                        cx += sx;
                    } else {
                        cy += sy;
                    }
                    visit(cx, cy);
                    if sx > 0 {
                        cy += sy;
                    } else {
                        cx += sx;
                    }
                } else {
                    cx += sx;
                    cy += sy;
                }
            }
        }
        visit(cx, cy);
    }
}

/// RGBA accumulation buffer with per-pixel coverage.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    pub width: u32,
    pub height: u32,
    /// Row-major, straight (non-premultiplied) color in `[0, 1]`.
    pub pixels: Vec<[f32; 4]>,
    pub coverage: Vec<bool>,
}

impl Raster {
    pub fn new(width: u32, height: u32) -> Self {
        let n = width as usize * height as usize;
        Self {
            width,
            height,
            pixels: vec![[0.0; 4]; n],
            coverage: vec![false; n],
        }
    }

    #[inline]
    fn index(&self, x: i64, y: i64) -> Option<usize> {
        ((0..self.width as i64).contains(&x) && (0..self.height as i64).contains(&y))
            .then(|| y as usize * self.width as usize + x as usize)
    }

    pub fn is_covered(&self, x: i64, y: i64) -> bool {
        self.index(x, y).is_some_and(|i| self.coverage[i])
    }

    /// 8-bit RGB, row-major, as written to PPM.
    pub fn rgb_bytes(&self) -> Vec<u8> {
        let quantize = |c: f32| (c.clamp(0.0, 1.0) * 255.0).round() as u8;
        self.pixels
            .iter()
            .flat_map(|p| [quantize(p[0]), quantize(p[1]), quantize(p[2])])
            .collect()
    }
}

/// Marks coverage of all segments of `polys` without shading.
pub fn coverage(polys: &PolylineSet, width: u32, height: u32) -> Raster {
    let mut raster = Raster::new(width, height);
    for line in &polys.lines {
        for seg in line.points.windows(2) {
            supercover(seg[0], seg[1], |x, y| {
                if let Some(i) = raster.index(x, y) {
                    raster.coverage[i] = true;
                }
            });
        }
        if let [p] = line.points.as_slice() {
            if let Some(i) = raster.index(p.x.floor() as i64, p.y.floor() as i64) {
                raster.coverage[i] = true;
            }
        }
    }
    raster
}

/// Draws every polyline as 1-pixel segments, alpha-blending in edge order.
///
/// Along a polyline of `n` points the arc parameter is `k / (n - 1)` at point
/// `k` and is interpolated at each pixel center projected onto its segment.
pub fn rasterize(polys: &PolylineSet, style: &EdgeStyle, width: u32, height: u32) -> Raster {
    let mut raster = Raster::new(width, height);
    for line in &polys.lines {
        let pts = &line.points;
        if pts.is_empty() {
            continue;
        }
        let c = chord(pts);
        let (l, direction) = (c.norm(), c.y.atan2(c.x));
        let last = (pts.len() - 1).max(1) as f64;
        let segments: Vec<(usize, Point2, Point2)> = if pts.len() == 1 {
            vec![(0, pts[0], pts[0])]
        } else {
            pts.windows(2)
                .enumerate()
                .map(|(k, w)| (k, w[0], w[1]))
                .collect()
        };
        for (k, a, b) in segments {
            let d = b - a;
            let len2 = d.norm_squared();
            supercover(a, b, |x, y| {
                let Some(i) = raster.index(x, y) else { return };
                let center = Point2::new(x as f64 + 0.5, y as f64 + 0.5);
                let s = if len2 > 0.0 {
                    ((center - a).dot(d) / len2).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                let t = (k as f64 + s) / last;
                let color = edge_color(t, l, style, direction);
                let rgb = color.to_rgb();
                let alpha = color.a as f32;
                let dst = &mut raster.pixels[i];
                for ch in 0..3 {
                    dst[ch] = rgb[ch] as f32 * alpha + dst[ch] * (1.0 - alpha);
                }
                dst[3] = alpha + dst[3] * (1.0 - alpha);
                raster.coverage[i] = true;
            });
        }
    }
    raster
}

/// Number of covered pixels.
pub fn used_pixels(raster: &Raster) -> u64 {
    raster.coverage.iter().filter(|&&c| c).count() as u64
}

/// Binary PPM (P6) encoding of the raster's RGB over a black background.
pub fn encode_ppm(raster: &Raster) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", raster.width, raster.height).into_bytes();
    out.extend(raster.rgb_bytes());
    out
}

/// Writes a PNG when `path` ends in `.png`, binary PPM otherwise.
pub fn write_image(raster: &Raster, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let is_png = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("png"));
    if is_png {
        let img = image::RgbImage::from_raw(raster.width, raster.height, raster.rgb_bytes())
            .expect("buffer matches dimensions");
        return img.save(path).map_err(|source| Error::Image {
            path: path.to_path_buf(),
            source,
        });
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    out.write_all(&encode_ppm(raster))
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}

/// Reads a binary PPM written by [`write_image`]: `(width, height, rgb)`.
pub fn read_ppm(path: impl AsRef<Path>) -> Result<(u32, u32, Vec<u8>)> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    let bad = |message: &str| Error::Parse {
        path: path.to_path_buf(),
        line: 1,
        message: message.to_string(),
    };

    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated PPM header"));
        }
        fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    pos += 1;
    if fields[0] != "P6" || fields[3] != "255" {
        return Err(bad("not an 8-bit binary PPM"));
    }
    let width: u32 = fields[1].parse().map_err(|_| bad("bad width"))?;
    let height: u32 = fields[2].parse().map_err(|_| bad("bad height"))?;
    let payload = bytes.get(pos..).unwrap_or_default();
    if payload.len() != width as usize * height as usize * 3 {
        return Err(bad("payload size does not match dimensions"));
    }
    Ok((width, height, payload.to_vec()))
}
