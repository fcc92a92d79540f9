//! Moving-least-squares fit and projection for a single site.
//!
//! The local regression curve is expressed in a frame built from the
//! weighted neighborhood: origin at the weighted centroid, `u` along the
//! weighted principal direction, `v` along its normal. A polynomial
//! `v = f(u)` of order 1 or 2 is fitted by weighted least squares through the
//! normal equations, and the site is projected by evaluating `f` at its own
//! `u` coordinate.

use crate::geom::Point2;

/// The neighborhood does not determine a frame or polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("degenerate neighborhood")]
pub struct Degenerate;

/// Compactly supported cubic weight: `2(d/r)^3 - 3(d/r)^2 + 1` for `d < r`,
/// zero beyond.
#[inline]
pub fn theta(d: f64, r: f64) -> f64 {
    debug_assert!(r > 0.0);
    if d >= r {
        return 0.0;
    }
    let s = d / r;
    (2.0 * s - 3.0) * s * s + 1.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFrame {
    pub centroid: Point2,
    /// Unit principal direction, oriented so its first nonzero component is
    /// positive.
    pub axis: Point2,
    /// `axis` rotated by +90 degrees.
    pub normal: Point2,
}

impl LocalFrame {
    /// `(u, v)` coordinates of `p` in this frame.
    #[inline]
    pub fn to_local(&self, p: Point2) -> (f64, f64) {
        let d = p - self.centroid;
        (d.dot(self.axis), d.dot(self.normal))
    }

    #[inline]
    pub fn to_world(&self, u: f64, v: f64) -> Point2 {
        self.centroid + self.axis * u + self.normal * v
    }
}

/// Weighted-PCA frame of a neighborhood.
///
/// Requires at least two points and positive total weight. Fails when the
/// points (effectively) coincide.
pub fn fit_frame(points: &[Point2], weights: &[f64]) -> Result<LocalFrame, Degenerate> {
    assert_eq!(points.len(), weights.len());
    if points.len() < 2 {
        return Err(Degenerate);
    }
    let total: f64 = weights.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(Degenerate);
    }

    let anchor = points[0];
    let mut mean = Point2::ZERO;
    for (&p, &w) in points.iter().zip(weights) {
        mean = mean + (p - anchor) * w;
    }
    mean = mean * (1.0 / total);
    let centroid = anchor + mean;

    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&p, &w) in points.iter().zip(weights) {
        let d = p - anchor - mean;
        sxx += w * d.x * d.x;
        sxy += w * d.x * d.y;
        syy += w * d.y * d.y;
    }
    let (a, b, c) = (sxx / total, sxy / total, syy / total);

    let half_diff = 0.5 * (a - c);
    let disc = half_diff.hypot(b);
    let largest = 0.5 * (a + c) + disc;
    if largest.is_nan() || largest <= 1e-20 * (1.0 + centroid.norm_squared()) {
        return Err(Degenerate);
    }

    let v = if half_diff >= 0.0 {
        Point2::new(half_diff + disc, b)
    } else {
        Point2::new(b, disc - half_diff)
    };
    let len = v.norm();
    let mut axis = if len > 0.0 {
        v * (1.0 / len)
    } else {
        // Isotropic spread; every direction is principal.
        Point2::new(1.0, 0.0)
    };
    if axis.x < 0.0 || (axis.x == 0.0 && axis.y < 0.0) {
        axis = -axis;
    }

    Ok(LocalFrame {
        centroid,
        axis,
        normal: axis.perp(),
    })
}

/// `v = c0 + c1 u (+ c2 u^2)` in a [`LocalFrame`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalPoly {
    order: usize,
    coeffs: [f64; 3],
}

impl LocalPoly {
    /// Panics unless `coeffs.len()` is 2 or 3.
    pub fn new(coeffs: &[f64]) -> Self {
        assert!(
            matches!(coeffs.len(), 2 | 3),
            "order must be 1 or 2, got {} coefficients",
            coeffs.len()
        );
        let mut c = [0.0; 3];
        c[..coeffs.len()].copy_from_slice(coeffs);
        Self {
            order: coeffs.len() - 1,
            coeffs: c,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs[..=self.order]
    }

    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        (self.coeffs[2] * u + self.coeffs[1]) * u + self.coeffs[0]
    }
}

/// Weighted least-squares polynomial `v = f(u)` over the neighborhood's frame
/// coordinates, solved through the `order + 1` normal equations.
///
/// The abscissae are scaled to `[-1, 1]` before assembling the system.
/// Fails on a (numerically) singular normal matrix, e.g. fewer than
/// `order + 1` distinct `u` values.
pub fn fit_poly(
    frame: &LocalFrame,
    points: &[Point2],
    weights: &[f64],
    order: usize,
) -> Result<LocalPoly, Degenerate> {
    assert!(matches!(order, 1 | 2), "order must be 1 or 2, got {order}");
    assert_eq!(points.len(), weights.len());
    let n = order + 1;

    let scale = points
        .iter()
        .zip(weights)
        .filter(|(_, &w)| w > 0.0)
        .map(|(&p, _)| frame.to_local(p).0.abs())
        .fold(0.0, f64::max);
    if scale.is_nan() || scale <= 0.0 {
        return Err(Degenerate);
    }
    let inv_scale = 1.0 / scale;

    // moments[k] = sum w s^k for k in 0..=2*order; rhs[k] = sum w v s^k
    let mut moments = [0.0; 5];
    let mut rhs = [0.0; 3];
    for (&p, &w) in points.iter().zip(weights) {
        let (u, v) = frame.to_local(p);
        let s = u * inv_scale;
        let mut pow = w;
        for k in 0..(2 * order + 1) {
            moments[k] += pow;
            if k < n {
                rhs[k] += pow * v;
            }
            pow *= s;
        }
    }

    let mut m = [[0.0; 3]; 3];
    for (k, row) in m.iter_mut().enumerate().take(n) {
        for (l, entry) in row.iter_mut().enumerate().take(n) {
            *entry = moments[k + l];
        }
    }
    let mut a = solve(&mut m, &mut rhs, n)?;

    let mut unscale = 1.0;
    for c in a.iter_mut().take(n) {
        *c *= unscale;
        unscale *= inv_scale;
    }
    Ok(LocalPoly::new(&a[..n]))
}

/// Gaussian elimination with partial pivoting on the leading `n x n` block.
fn solve(m: &mut [[f64; 3]; 3], b: &mut [f64; 3], n: usize) -> Result<[f64; 3], Degenerate> {
    let norm = m
        .iter()
        .take(n)
        .flat_map(|row| row.iter().take(n))
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    let tol = 1e-12 * norm;

    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        if m[pivot][col].is_nan() || m[pivot][col].abs() <= tol {
            return Err(Degenerate);
        }
        m.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            let (upper, lower) = m.split_at_mut(row);
            for (x, y) in lower[0][col..n].iter_mut().zip(&upper[col][col..n]) {
                *x -= f * y;
            }
            b[row] -= f * b[col];
        }
    }

    let mut x = [0.0; 3];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    Ok(x)
}

/// Basic projection: keep the site's `u`, replace its `v` by `f(u)`.
#[inline]
pub fn project(site: Point2, frame: &LocalFrame, poly: &LocalPoly) -> Point2 {
    let (u, _) = frame.to_local(site);
    frame.to_world(u, poly.eval(u))
}

/// Fits and projects with fallback `order -> 1 -> none`.
///
/// Returns the projected point and the order that succeeded.
pub fn project_site(
    site: Point2,
    points: &[Point2],
    weights: &[f64],
    order: usize,
) -> Option<(Point2, usize)> {
    let frame = fit_frame(points, weights).ok()?;
    (1..=order)
        .rev()
        .find_map(|o| fit_poly(&frame, points, weights, o).ok().map(|p| (p, o)))
        .map(|(poly, o)| (project(site, &frame, &poly), o))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(f64, f64)]) -> Vec<Point2> {
        v.iter().map(|&(x, y)| Point2::new(x, y)).collect()
    }

    fn axis_frame() -> LocalFrame {
        LocalFrame {
            centroid: Point2::ZERO,
            axis: Point2::new(1.0, 0.0),
            normal: Point2::new(0.0, 1.0),
        }
    }

    #[test]
    fn theta_values() {
        let r = 3.7;
        assert_eq!(theta(0.0, r), 1.0);
        assert_eq!(theta(r, r), 0.0);
        assert_eq!(theta(2.0 * r, r), 0.0);
        assert_eq!(theta(0.5, 1.0), 0.5);
    }

    #[test]
    fn theta_is_monotone() {
        let r = 2.0;
        let mut prev = theta(0.0, r);
        for k in 1..=1000 {
            let w = theta(r * k as f64 / 1000.0, r);
            assert!(w <= prev && (0.0..=1.0).contains(&w));
            prev = w;
        }
    }

    #[test]
    fn collinear_frame() {
        let f = fit_frame(&pts(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]), &[1.0; 3]).unwrap();
        assert_eq!(f.centroid, Point2::new(1.0, 0.0));
        assert_eq!(f.axis, Point2::new(1.0, 0.0));
        assert_eq!(f.normal, Point2::new(0.0, 1.0));
    }

    #[test]
    fn vertical_frame() {
        let f = fit_frame(&pts(&[(0.0, 0.0), (0.0, 1.0)]), &[1.0; 2]).unwrap();
        assert_eq!(f.axis, Point2::new(0.0, 1.0));
        let f = fit_frame(&pts(&[(0.0, 1.0), (0.0, 0.0)]), &[1.0; 2]).unwrap();
        assert_eq!(f.axis, Point2::new(0.0, 1.0));
    }

    #[test]
    fn coincident_points_are_degenerate() {
        let p = pts(&[(5.0, 5.0), (5.0, 5.0), (5.0, 5.0)]);
        assert_eq!(fit_frame(&p, &[1.0; 3]), Err(Degenerate));
        assert_eq!(fit_frame(&p[..1], &[1.0]), Err(Degenerate));
        assert_eq!(
            fit_frame(&pts(&[(0.0, 0.0), (1.0, 0.0)]), &[0.0, 0.0]),
            Err(Degenerate)
        );
    }

    #[test]
    fn collinear_poly_is_zero() {
        let p = pts(&[(-2.0, 0.0), (-1.0, 0.0), (0.5, 0.0), (3.0, 0.0)]);
        let w = [0.2, 1.0, 0.7, 0.1];
        let frame = fit_frame(&p, &w).unwrap();
        for order in [1, 2] {
            let poly = fit_poly(&frame, &p, &w, order).unwrap();
            assert!(poly.coeffs().iter().all(|c| c.abs() < 1e-12), "{poly:?}");
        }
    }

    #[test]
    fn order_one_fit_of_parabola_samples() {
        let p = pts(&[(-1.0, 1.0), (0.0, 0.0), (1.0, 1.0)]);
        let poly = fit_poly(&axis_frame(), &p, &[1.0; 3], 1).unwrap();
        assert!((poly.coeffs()[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!(poly.coeffs()[1].abs() < 1e-15);
    }

    #[test]
    fn order_two_interpolates_parabola() {
        let p = pts(&[(-1.0, 1.0), (0.0, 0.0), (1.0, 1.0)]);
        let poly = fit_poly(&axis_frame(), &p, &[1.0; 3], 2).unwrap();
        let c = poly.coeffs();
        assert!(c[0].abs() < 1e-15 && c[1].abs() < 1e-15 && (c[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn too_few_abscissae_is_singular() {
        let p = pts(&[(-1.0, 1.0), (-1.0, 2.0), (1.0, 1.0)]);
        assert_eq!(fit_poly(&axis_frame(), &p, &[1.0; 3], 2), Err(Degenerate));
        assert!(fit_poly(&axis_frame(), &p, &[1.0; 3], 1).is_ok());
        let p = pts(&[(0.0, 1.0), (0.0, 2.0)]);
        assert_eq!(fit_poly(&axis_frame(), &p, &[1.0; 2], 1), Err(Degenerate));
    }

    #[test]
    fn projection_fixed_point_and_drop() {
        let frame = axis_frame();
        let poly = LocalPoly::new(&[0.0, 0.0]);
        assert_eq!(project(Point2::new(0.0, 0.2), &frame, &poly), Point2::ZERO);

        let parabola = LocalPoly::new(&[0.0, 0.0, 1.0]);
        let on_curve = Point2::new(0.3, 0.09);
        let out = project(on_curve, &frame, &parabola);
        assert!((out - on_curve).norm() < 1e-12);
    }

    #[test]
    fn fallback_chain() {
        // Two distinct abscissae: order 2 fails, order 1 succeeds.
        let p = pts(&[(0.0, 0.0), (0.0, 0.1), (4.0, 0.0), (4.0, 0.1)]);
        let (out, order) = project_site(p[1], &p, &[1.0; 4], 2).unwrap();
        assert_eq!(order, 1);
        assert!((out - Point2::new(0.0, 0.05)).norm() < 1e-12);
        // Isolated site: nothing to fit.
        assert_eq!(project_site(p[0], &p[..1], &[1.0], 2), None);
    }
}
