//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use mlseb::mls::LocalFrame;
use mlseb::Point2;
use nalgebra::{DMatrix, DVector, Matrix2, SymmetricEigen};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Weighted centroid and principal axis from a dense symmetric
/// eigen-decomposition, axis sign normalized like the library's.
pub fn pca_oracle(points: &[Point2], weights: &[f64]) -> (Point2, Point2) {
    let total: f64 = weights.iter().sum();
    let cx = points
        .iter()
        .zip(weights)
        .map(|(p, w)| w * p.x)
        .sum::<f64>()
        / total;
    let cy = points
        .iter()
        .zip(weights)
        .map(|(p, w)| w * p.y)
        .sum::<f64>()
        / total;
    let mut cov = Matrix2::zeros();
    for (p, w) in points.iter().zip(weights) {
        let d = nalgebra::Vector2::new(p.x - cx, p.y - cy);
        cov += d * d.transpose() * (*w / total);
    }
    let eig = SymmetricEigen::new(cov);
    let k = if eig.eigenvalues[0] >= eig.eigenvalues[1] {
        0
    } else {
        1
    };
    let v = eig.eigenvectors.column(k);
    let mut axis = Point2::new(v[0], v[1]);
    axis = axis * (1.0 / axis.norm());
    if axis.x < 0.0 || (axis.x == 0.0 && axis.y < 0.0) {
        axis = -axis;
    }
    (Point2::new(cx, cy), axis)
}

/// Ratio of the two eigenvalues of the weighted covariance (small / large).
pub fn eigen_ratio(points: &[Point2], weights: &[f64]) -> f64 {
    let total: f64 = weights.iter().sum();
    let (c, _) = pca_oracle(points, weights);
    let mut cov = Matrix2::zeros();
    for (p, w) in points.iter().zip(weights) {
        let d = nalgebra::Vector2::new(p.x - c.x, p.y - c.y);
        cov += d * d.transpose() * (*w / total);
    }
    let e = SymmetricEigen::new(cov).eigenvalues;
    e.min() / e.max()
}

/// Normal equations `(A^T W A) c = A^T W v` over raw frame abscissae, solved
/// with a dense LU factorization.
pub fn normal_equations_oracle(
    frame: &LocalFrame,
    points: &[Point2],
    weights: &[f64],
    order: usize,
) -> Vec<f64> {
    let n = order + 1;
    let mut ata = DMatrix::<f64>::zeros(n, n);
    let mut atv = DVector::<f64>::zeros(n);
    for (p, w) in points.iter().zip(weights) {
        let d = *p - frame.centroid;
        let (u, v) = (d.dot(frame.axis), d.dot(frame.normal));
        let row: Vec<f64> = (0..n).map(|k| u.powi(k as i32)).collect();
        for i in 0..n {
            atv[i] += w * row[i] * v;
            for j in 0..n {
                ata[(i, j)] += w * row[i] * row[j];
            }
        }
    }
    ata.lu()
        .solve(&atv)
        .expect("nonsingular")
        .iter()
        .copied()
        .collect()
}

/// Weighted residual `sum w (v - f(u))^2` of coefficients `c` in `frame`.
pub fn weighted_residual(frame: &LocalFrame, points: &[Point2], weights: &[f64], c: &[f64]) -> f64 {
    points
        .iter()
        .zip(weights)
        .map(|(p, w)| {
            let d = *p - frame.centroid;
            let (u, v) = (d.dot(frame.axis), d.dot(frame.normal));
            let f: f64 = c
                .iter()
                .enumerate()
                .map(|(k, ck)| ck * u.powi(k as i32))
                .sum();
            w * (v - f).powi(2)
        })
        .sum()
}

/// Random anisotropic neighborhood of `5..=50` points with random weights.
pub fn random_neighborhood(rng: &mut ChaCha8Rng) -> (Vec<Point2>, Vec<f64>) {
    let n = rng.gen_range(5..=50);
    let angle = rng.gen_range(0.0..std::f64::consts::TAU);
    let (dir, nrm) = (
        Point2::new(angle.cos(), angle.sin()),
        Point2::new(-angle.sin(), angle.cos()),
    );
    let center = Point2::new(rng.gen_range(0.0..400.0), rng.gen_range(0.0..400.0));
    let spread = rng.gen_range(5.0..40.0);
    let thickness = spread * rng.gen_range(0.05..0.5);
    let bend = rng.gen_range(-0.05..0.05);
    let points = (0..n)
        .map(|_| {
            let u: f64 = rng.gen_range(-spread..spread);
            let v = bend * u * u + rng.gen_range(-thickness..thickness);
            center + dir * u + nrm * v
        })
        .collect();
    let weights = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
    (points, weights)
}

/// Pixels `[i, i+1) x [j, j+1)` meeting the closed segment `a -> b`, found
/// by testing every pixel of the bounding box for a nonempty parameter
/// interval.
pub fn supercover_oracle(a: Point2, b: Point2) -> BTreeSet<(i64, i64)> {
    // Closed/open interval of t in [0, 1] where lo <= start + t*delta < hi.
    fn slab(start: f64, delta: f64, lo: f64, hi: f64) -> Option<(f64, bool, f64, bool)> {
        if delta == 0.0 {
            return (lo <= start && start < hi).then_some((0.0, true, 1.0, true));
        }
        let t_lo = (lo - start) / delta;
        let t_hi = (hi - start) / delta;
        if delta > 0.0 {
            Some((t_lo, true, t_hi, false))
        } else {
            Some((t_hi, false, t_lo, true))
        }
    }

    let mut out = BTreeSet::new();
    let (x0, x1) = (a.x.min(b.x).floor() as i64, a.x.max(b.x).floor() as i64);
    let (y0, y1) = (a.y.min(b.y).floor() as i64, a.y.max(b.y).floor() as i64);
    let d = b - a;
    for i in x0..=x1 {
        for j in y0..=y1 {
            let (Some(sx), Some(sy)) = (
                slab(a.x, d.x, i as f64, (i + 1) as f64),
                slab(a.y, d.y, j as f64, (j + 1) as f64),
            ) else {
                continue;
            };
            let mut lo = (0.0, true);
            let mut hi = (1.0, true);
            for (l, lc, h, hc) in [sx, sy] {
                if l > lo.0 {
                    lo = (l, lc);
                } else if l == lo.0 {
                    lo.1 &= lc;
                }
                if h < hi.0 {
                    hi = (h, hc);
                } else if h == hi.0 {
                    hi.1 &= hc;
                }
            }
            if lo.0 < hi.0 || (lo.0 == hi.0 && lo.1 && hi.1) {
                out.insert((i, j));
            }
        }
    }
    out
}

/// Clamped uniform B-spline evaluated through Cox-de Boor basis functions.
pub fn bspline_oracle(ctrl: &[Point2], u: f64) -> Point2 {
    let n = ctrl.len();
    let p = (n - 1).min(3);
    let spans = n - p;
    let mut knots = vec![0.0; p + 1];
    knots.extend((1..spans).map(|j| j as f64 / spans as f64));
    knots.extend(std::iter::repeat_n(1.0, p + 1));

    fn basis(i: usize, p: usize, u: f64, knots: &[f64], last: bool) -> f64 {
        if p == 0 {
            let inside = knots[i] <= u && u < knots[i + 1];
            // Close the final nonempty span at u = 1.
            let at_end = last && u == knots[i + 1] && knots[i] < knots[i + 1];
            return if inside || at_end { 1.0 } else { 0.0 };
        }
        let mut value = 0.0;
        let d1 = knots[i + p] - knots[i];
        if d1 > 0.0 {
            value += (u - knots[i]) / d1 * basis(i, p - 1, u, knots, last);
        }
        let d2 = knots[i + p + 1] - knots[i + 1];
        if d2 > 0.0 {
            value += (knots[i + p + 1] - u) / d2 * basis(i + 1, p - 1, u, knots, last);
        }
        value
    }

    let mut out = Point2::ZERO;
    for (i, c) in ctrl.iter().enumerate() {
        out = out + *c * basis(i, p, u, &knots, u >= 1.0);
    }
    out
}
