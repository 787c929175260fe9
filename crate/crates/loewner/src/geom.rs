//! Planar geometry shared across the crate: curves, polyline metrics,
//! Mobius maps between the reference domains, and half-plane harmonic
//! measure formulas.

use num_complex::Complex64;
use serde::Serialize;

pub type C64 = Complex64;

/// Parametrization tag carried by a [`Curve`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Parametrization {
    HalfPlaneCapacity,
    ConformalRadius,
    ArcLength,
    Unknown,
}

/// Ambient domain of a [`Curve`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CurveSetting {
    HalfPlane,
    Disk,
    /// The slit plane C \ R+.
    SlitPlane,
    Plane,
}

/// Ordered polyline of complex points with parametrization metadata.
#[derive(Clone, Debug)]
pub struct Curve {
    pub points: Vec<C64>,
    /// Parameter value per vertex (capacity time, conformal-radius time, or
    /// arc length depending on `parametrization`). Empty when unknown.
    pub times: Vec<f64>,
    pub parametrization: Parametrization,
    pub setting: CurveSetting,
}

impl Curve {
    pub fn new(points: Vec<C64>, parametrization: Parametrization, setting: CurveSetting) -> Self {
        Curve {
            points,
            times: Vec::new(),
            parametrization,
            setting,
        }
    }

    pub fn with_times(mut self, times: Vec<f64>) -> Self {
        assert_eq!(times.len(), self.points.len());
        self.times = times;
        self
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        // O(n^2) is fine at the polyline sizes used here; subsample large inputs.
        let stride = (self.points.len() / 512).max(1);
        for (i, &a) in self.points.iter().step_by(stride).enumerate() {
            for &b in self.points.iter().skip(i * stride).step_by(stride) {
                d = d.max((a - b).norm());
            }
        }
        d
    }

    /// Largest |z| over the polyline.
    pub fn max_abs(&self) -> f64 {
        self.points.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Keep only vertices with |z| <= r (the connected prefix is preserved;
    /// the polyline is cut at the first exit).
    pub fn crop_to_disk(&self, r: f64) -> Curve {
        let mut pts = Vec::new();
        let mut ts = Vec::new();
        for (i, &p) in self.points.iter().enumerate() {
            if p.norm() > r {
                break;
            }
            pts.push(p);
            if let Some(&t) = self.times.get(i) {
                ts.push(t);
            }
        }
        Curve {
            points: pts,
            times: ts,
            parametrization: self.parametrization,
            setting: self.setting,
        }
    }

    /// Checks simplicity up to a tolerance: non-adjacent segments must stay
    /// farther apart than `tol`.
    pub fn is_simple(&self, tol: f64) -> bool {
        let n = self.points.len();
        if n < 4 {
            return true;
        }
        for i in 0..n - 1 {
            for j in i + 2..n - 1 {
                if i == 0 && j == n - 2 {
                    // still non-adjacent; keep the check
                }
                let d = segment_segment_distance(
                    self.points[i],
                    self.points[i + 1],
                    self.points[j],
                    self.points[j + 1],
                );
                if d <= tol {
                    return false;
                }
            }
        }
        true
    }

    /// Counts proper self-crossings of the polyline (shared endpoints of
    /// adjacent segments excluded).
    pub fn self_intersections(&self) -> usize {
        let n = self.points.len();
        let mut count = 0;
        for i in 0..n.saturating_sub(1) {
            for j in i + 2..n.saturating_sub(1) {
                if segments_cross(
                    self.points[i],
                    self.points[i + 1],
                    self.points[j],
                    self.points[j + 1],
                ) {
                    count += 1;
                }
            }
        }
        count
    }

    /// Image of the curve under z -> 1/z (vertices at 0 are dropped).
    pub fn inverted(&self) -> Curve {
        let pts: Vec<C64> = self
            .points
            .iter()
            .filter(|z| z.norm() > 1e-300)
            .map(|z| 1.0 / z)
            .collect();
        Curve {
            points: pts,
            times: Vec::new(),
            parametrization: Parametrization::Unknown,
            setting: CurveSetting::Plane,
        }
    }
}

/// Distance from point `p` to segment `[a, b]`.
pub fn point_segment_distance(p: C64, a: C64, b: C64) -> f64 {
    let ab = b - a;
    let denom = ab.norm_sqr();
    if denom == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).re * ab.re + (p - a).im * ab.im) / denom;
    let t = t.clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

fn segment_segment_distance(a: C64, b: C64, c: C64, d: C64) -> f64 {
    if segments_cross(a, b, c, d) {
        return 0.0;
    }
    point_segment_distance(a, c, d)
        .min(point_segment_distance(b, c, d))
        .min(point_segment_distance(c, a, b))
        .min(point_segment_distance(d, a, b))
}

fn orient(a: C64, b: C64, c: C64) -> f64 {
    (b.re - a.re) * (c.im - a.im) - (b.im - a.im) * (c.re - a.re)
}

/// Proper crossing test for open segments.
pub fn segments_cross(a: C64, b: C64, c: C64, d: C64) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    (o1 * o2 < 0.0) && (o3 * o4 < 0.0)
}

/// Directed Hausdorff distance: max over vertices of `a` of the distance to
/// the polyline `b`.
pub fn directed_hausdorff(a: &[C64], b: &[C64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return f64::NAN;
    }
    if b.len() == 1 {
        return a.iter().map(|&p| (p - b[0]).norm()).fold(0.0, f64::max);
    }
    let mut worst: f64 = 0.0;
    for &p in a {
        let mut best = f64::INFINITY;
        for w in b.windows(2) {
            let d = point_segment_distance(p, w[0], w[1]);
            if d < best {
                best = d;
            }
        }
        worst = worst.max(best);
    }
    worst
}

/// Branch of the complex square root with non-negative imaginary part.
pub fn sqrt_upper(w: C64) -> C64 {
    let s = w.sqrt();
    if s.im < 0.0 {
        -s
    } else {
        s
    }
}

/// Mobius map of the upper half-plane fixing 0 and sending `x0` to infinity:
/// `z -> x0 z / (x0 - z)`. Sends infinity to `-x0`.
pub fn mobius_pivot_halfplane(x0: f64, z: C64) -> C64 {
    x0 * z / (x0 - z)
}

/// Conformal map D -> H with 1 -> 0 and -1 -> infinity: `z -> i (1 - z) / (1 + z)`.
pub fn disk_to_halfplane(z: C64) -> C64 {
    C64::new(0.0, 1.0) * (1.0 - z) / (1.0 + z)
}

/// Conformal map D -> H sending 1 -> 0, e^{i v0} -> infinity, and 0 to the
/// interior point e^{i (pi - v0/2)}. Inverse of
/// `z -> e^{i v0} (z - z0) / (z - conj(z0))` with `z0 = e^{i (pi - v0/2)}`.
pub fn disk_to_halfplane_pivot(v0: f64, z: C64) -> C64 {
    let z0 = C64::from_polar(1.0, std::f64::consts::PI - v0 / 2.0);
    let u = z * C64::from_polar(1.0, -v0);
    (u * z0.conj() - z0) / (u - 1.0)
}

/// The interior force point produced by [`disk_to_halfplane_pivot`].
pub fn disk_pivot_force_point(v0: f64) -> C64 {
    C64::from_polar(1.0, std::f64::consts::PI - v0 / 2.0)
}

/// Harmonic measure of the interval [a, b] in H seen from z: the angle the
/// interval subtends at z, divided by pi.
pub fn harmonic_measure_interval(z: C64, a: f64, b: f64) -> f64 {
    ((z - b) / (z - a)).arg() / std::f64::consts::PI
}

/// Boundary harmonic measure of [a, b] in H seen from the boundary point x:
/// `(b-a) / ((x-a)(x-b)) / pi`.
pub fn harmonic_measure_boundary(x: f64, a: f64, b: f64) -> f64 {
    (b - a) / ((x - a) * (x - b)) / std::f64::consts::PI
}

/// Harmonic measure of [a, b] in H seen from infinity: `(b-a)/pi`.
pub fn harmonic_measure_infinity(a: f64, b: f64) -> f64 {
    (b - a) / std::f64::consts::PI
}

/// Least-squares circle through a point cloud (Kasa fit).
/// Returns (center, radius, max residual of | |z-c| - r |).
pub fn circle_fit(points: &[C64]) -> (C64, f64, f64) {
    let n = points.len() as f64;
    // Normal equations for x^2 + y^2 = a x + b y + c.
    let (mut sxx, mut sxy, mut syy, mut sx, mut sy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let (mut sxr, mut syr, mut sr) = (0.0, 0.0, 0.0);
    for p in points {
        let (x, y) = (p.re, p.im);
        let r2 = x * x + y * y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        sx += x;
        sy += y;
        sxr += x * r2;
        syr += y * r2;
        sr += r2;
    }
    // Solve the 3x3 system [sxx sxy sx; sxy syy sy; sx sy n] [a b c]^T = [sxr syr sr]^T.
    let m = [[sxx, sxy, sx], [sxy, syy, sy], [sx, sy, n]];
    let rhs = [sxr, syr, sr];
    let sol = solve3(m, rhs);
    let center = C64::new(sol[0] / 2.0, sol[1] / 2.0);
    let radius = (sol[2] + center.norm_sqr()).max(0.0).sqrt();
    let resid = points
        .iter()
        .map(|&p| ((p - center).norm() - radius).abs())
        .fold(0.0, f64::max);
    (center, radius, resid)
}

fn solve3(mut m: [[f64; 3]; 3], mut b: [f64; 3]) -> [f64; 3] {
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        m.swap(col, piv);
        b.swap(col, piv);
        let d = m[col][col];
        for row in col + 1..3 {
            let f = m[row][col] / d;
            for k in col..3 {
                m[row][k] -= f * m[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let mut acc = b[row];
        for k in row + 1..3 {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    x
}

/// Least-squares line fit y = a + b x. Returns (a, b, max |residual|).
pub fn line_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    let b = (n * sxy - sx * sy) / denom;
    let a = (sy - b * sx) / n;
    let resid = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - a - b * x).abs())
        .fold(0.0, f64::max);
    (a, b, resid)
}

/// Unwraps `raw` (an angle known modulo 2 pi) to the lift closest to `prev`.
pub fn unwrap_near(prev: f64, raw: f64) -> f64 {
    use std::f64::consts::TAU;
    let mut a = raw;
    let k = ((prev - raw) / TAU).round();
    a += k * TAU;
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hausdorff_of_shifted_segment_is_the_shift() {
        let a: Vec<C64> = (0..=10).map(|k| C64::new(k as f64 / 10.0, 0.0)).collect();
        let b: Vec<C64> = a.iter().map(|z| z + C64::new(0.0, 0.25)).collect();
        let d = directed_hausdorff(&a, &b).max(directed_hausdorff(&b, &a));
        assert!((d - 0.25).abs() < 1e-12);
    }

    #[test]
    fn hausdorff_of_curve_with_itself_is_zero() {
        let a: Vec<C64> = (0..50)
            .map(|k| C64::new((k as f64).cos(), 1.0 + (k as f64).sin()))
            .collect();
        assert_eq!(directed_hausdorff(&a, &a), 0.0);
    }

    #[test]
    fn circle_fit_recovers_exact_circle() {
        let c = C64::new(0.3, -1.2);
        let pts: Vec<C64> = (0..100)
            .map(|k| c + C64::from_polar(2.5, k as f64 * 0.06))
            .collect();
        let (center, r, resid) = circle_fit(&pts);
        assert!((center - c).norm() < 1e-9);
        assert!((r - 2.5).abs() < 1e-9);
        assert!(resid < 1e-9);
    }

    #[test]
    fn crossing_detection() {
        let a = C64::new(0.0, 0.0);
        let b = C64::new(1.0, 1.0);
        let c = C64::new(0.0, 1.0);
        let d = C64::new(1.0, 0.0);
        assert!(segments_cross(a, b, c, d));
        assert!(!segments_cross(a, b, c, c + C64::new(0.1, 0.0)));
    }

    #[test]
    fn harmonic_measure_halfplane_formulas_agree_with_geometry() {
        // Seen from i, the interval [-1, 1] subtends the angle pi/2.
        let w = harmonic_measure_interval(C64::new(0.0, 1.0), -1.0, 1.0);
        assert!((w - 0.5).abs() < 1e-12);
        let wb = harmonic_measure_boundary(2.0, -1.0, 1.0);
        assert!((wb - 2.0 / (3.0 * std::f64::consts::PI)).abs() < 1e-12);
        assert!(
            (harmonic_measure_infinity(-1.0, 1.0) - 2.0 / std::f64::consts::PI).abs() < 1e-12
        );
    }

    #[test]
    fn sqrt_upper_branch() {
        let s = sqrt_upper(C64::new(-4.0, 0.0));
        assert!((s - C64::new(0.0, 2.0)).norm() < 1e-12);
        let s2 = sqrt_upper(C64::new(4.0, 0.0));
        assert!((s2 - C64::new(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn disk_pivot_maps_marked_points() {
        let v0 = 2.0;
        // 1 -> 0
        let z = disk_to_halfplane_pivot(v0, C64::new(1.0, 0.0));
        assert!(z.norm() < 1e-12);
        // 0 -> the interior pivot point
        let z = disk_to_halfplane_pivot(v0, C64::new(0.0, 0.0));
        assert!((z - disk_pivot_force_point(v0)).norm() < 1e-12);
        // e^{i v0} -> far away (numerically large)
        let z = disk_to_halfplane_pivot(v0, C64::from_polar(1.0, v0) * 0.999_999);
        assert!(z.norm() > 1e4);
    }
}
