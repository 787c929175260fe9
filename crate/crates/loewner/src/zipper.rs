//! Inverse problem: recover a driving function and capacity parametrization
//! from a polyline by peeling vertices with exact elementary slit maps.

use num_complex::Complex64 as C64;

use crate::driving::{make_sampled, DrivingFunction, Setting};
use crate::error::{Error, Result};
use crate::geom::{directed_hausdorff, unwrap_near, Curve, CurveSetting, Parametrization};
use crate::solve::{
    chordal_slit_forward, radial_capacity_of_tip, radial_slit_forward, trace,
};

/// Driving function and capacity parametrization recovered from a polyline.
#[derive(Clone, Debug)]
pub struct ZipperResult {
    /// Sampled driving function on the recovered capacity grid.
    pub drive: DrivingFunction,
    /// Capacity time per input vertex (strictly increasing, starts at 0).
    pub capacity_times: Vec<f64>,
    /// Driving value per input vertex.
    pub driving_values: Vec<f64>,
    /// Roundtrip Hausdorff distance between the input polyline and the trace
    /// of the recovered driving.
    pub residual: f64,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

/// Peels polyline vertices one at a time with the exact elementary
/// vertical-slit map (chordal) or radial-slit map (disk), accumulating
/// driving values at the induced capacity times.
///
/// The curve must start at the domain base point (0 in H, 1 on the disk
/// boundary); a leading base vertex is tolerated and skipped.
pub fn extract_driving(curve: &Curve, setting: Setting) -> Result<ZipperResult> {
    match setting {
        Setting::ChordalHalfPlane => extract_chordal(curve),
        Setting::RadialDisk => extract_radial(curve),
    }
}

fn extract_chordal(curve: &Curve) -> Result<ZipperResult> {
    let mut pts: Vec<C64> = curve.points.clone();
    if let Some(first) = pts.first() {
        if first.norm() < 1e-12 {
            pts.remove(0);
        }
    }
    if pts.len() < 2 {
        return Err(Error::InvalidParameter(
            "polyline needs at least two non-base vertices".into(),
        ));
    }
    check_consecutive_distinct(&pts)?;
    if let Some(bad) = pts.iter().position(|z| !(z.im > 0.0)) {
        return Err(Error::SelfIntersection { index: bad });
    }
    let n = pts.len();
    let mut w_samples = Vec::with_capacity(n + 1);
    let mut t_samples = Vec::with_capacity(n + 1);
    w_samples.push(0.0);
    t_samples.push(0.0);
    let mut increments = Vec::with_capacity(n);
    let mut t = 0.0;
    for k in 0..n {
        let zhat = pts[k];
        if !zhat.is_finite() {
            return Err(Error::NumericalBlowup { t });
        }
        if zhat.im <= 0.0 {
            return Err(Error::SelfIntersection { index: k });
        }
        let w = zhat.re;
        let dt = zhat.im * zhat.im / 4.0;
        t += dt;
        increments.push(dt);
        w_samples.push(w);
        t_samples.push(t);
        for z in pts.iter_mut().skip(k + 1) {
            *z = chordal_slit_forward(w, dt, *z);
        }
    }
    spacing_guard(&increments)?;
    let samples: Vec<(f64, f64)> = t_samples.iter().copied().zip(w_samples).collect();
    let drive = make_sampled(Setting::ChordalHalfPlane, samples)?;
    let roundtrip = trace(&drive, n, t)?;
    let residual = directed_hausdorff(&curve.points, &roundtrip.points)
        .max(directed_hausdorff(&roundtrip.points, &curve.points));
    Ok(ZipperResult {
        driving_values: drive_values(&drive, &t_samples),
        capacity_times: t_samples,
        drive,
        residual,
    })
}

fn extract_radial(curve: &Curve) -> Result<ZipperResult> {
    let mut pts: Vec<C64> = curve.points.clone();
    if let Some(first) = pts.first() {
        if (first - C64::new(1.0, 0.0)).norm() < 1e-12 {
            pts.remove(0);
        }
    }
    if pts.len() < 2 {
        return Err(Error::InvalidParameter(
            "polyline needs at least two non-base vertices".into(),
        ));
    }
    check_consecutive_distinct(&pts)?;
    if let Some(bad) = pts.iter().position(|z| {
        let r = z.norm();
        !(r > 0.0 && r < 1.0)
    }) {
        return Err(Error::SelfIntersection { index: bad });
    }
    let n = pts.len();
    let mut w_samples = Vec::with_capacity(n + 1);
    let mut t_samples = Vec::with_capacity(n + 1);
    w_samples.push(0.0);
    t_samples.push(0.0);
    let mut increments = Vec::with_capacity(n);
    let mut t = 0.0;
    let mut w_prev = 0.0;
    for k in 0..n {
        let zhat = pts[k];
        let r = zhat.norm();
        if !zhat.is_finite() {
            return Err(Error::NumericalBlowup { t });
        }
        if r >= 1.0 || r <= 0.0 {
            return Err(Error::SelfIntersection { index: k });
        }
        let w = unwrap_near(w_prev, zhat.arg());
        w_prev = w;
        let dt = radial_capacity_of_tip(r);
        t += dt;
        increments.push(dt);
        w_samples.push(w);
        t_samples.push(t);
        for z in pts.iter_mut().skip(k + 1) {
            *z = radial_slit_forward(w, dt, *z);
        }
    }
    spacing_guard(&increments)?;
    let samples: Vec<(f64, f64)> = t_samples.iter().copied().zip(w_samples).collect();
    let drive = make_sampled(Setting::RadialDisk, samples)?;
    let roundtrip = trace(&drive, n, t)?;
    let residual = directed_hausdorff(&curve.points, &roundtrip.points)
        .max(directed_hausdorff(&roundtrip.points, &curve.points));
    Ok(ZipperResult {
        driving_values: drive_values(&drive, &t_samples),
        capacity_times: t_samples,
        drive,
        residual,
    })
}

fn check_consecutive_distinct(pts: &[C64]) -> Result<()> {
    for k in 1..pts.len() {
        if (pts[k] - pts[k - 1]).norm() == 0.0 {
            return Err(Error::DegenerateStep { index: k });
        }
    }
    Ok(())
}

fn drive_values(drive: &DrivingFunction, times: &[f64]) -> Vec<f64> {
    times.iter().map(|&t| drive.value_unchecked(t)).collect()
}

/// Rejects capacity increments more than 10x the median (they corrupt the
/// finite-difference derivative used by the energies).
fn spacing_guard(increments: &[f64]) -> Result<()> {
    if increments.len() < 8 {
        return Ok(());
    }
    let med = median(increments.to_vec());
    for (i, &dt) in increments.iter().enumerate() {
        if dt > 10.0 * med {
            return Err(Error::VertexSpacing {
                index: i,
                increment: dt,
                median: med,
            });
        }
    }
    Ok(())
}

/// Resamples the polyline at uniform capacity increments using the capacity
/// times recovered by [`extract_driving`]. Geometry is interpolated linearly
/// along the original segments.
pub fn capacity_reparametrize(curve: &Curve, setting: Setting) -> Result<Curve> {
    let zip = extract_driving(curve, setting)?;
    // Vertex k of the peeled polyline sits at capacity time zip.capacity_times[k].
    let base = match setting {
        Setting::ChordalHalfPlane => C64::new(0.0, 0.0),
        Setting::RadialDisk => C64::new(1.0, 0.0),
    };
    let mut verts: Vec<C64> = Vec::with_capacity(zip.capacity_times.len());
    verts.push(base);
    let skip_base = match setting {
        Setting::ChordalHalfPlane => curve.points[0].norm() < 1e-12,
        Setting::RadialDisk => (curve.points[0] - base).norm() < 1e-12,
    };
    let tail = if skip_base {
        &curve.points[1..]
    } else {
        &curve.points[..]
    };
    verts.extend_from_slice(tail);

    let t_total = *zip.capacity_times.last().unwrap();
    let n = verts.len() - 1;
    let mut out_pts = Vec::with_capacity(n + 1);
    let mut out_times = Vec::with_capacity(n + 1);
    let mut seg = 0usize;
    for k in 0..=n {
        let t = t_total * k as f64 / n as f64;
        while seg + 1 < zip.capacity_times.len() && zip.capacity_times[seg + 1] < t {
            seg += 1;
        }
        let (ta, tb) = (zip.capacity_times[seg], zip.capacity_times[(seg + 1).min(n)]);
        let frac = if tb > ta { (t - ta) / (tb - ta) } else { 0.0 };
        let z = verts[seg] + (verts[(seg + 1).min(n)] - verts[seg]) * frac.clamp(0.0, 1.0);
        out_pts.push(z);
        out_times.push(t);
    }
    let par = match setting {
        Setting::ChordalHalfPlane => Parametrization::HalfPlaneCapacity,
        Setting::RadialDisk => Parametrization::ConformalRadius,
    };
    let cs = match setting {
        Setting::ChordalHalfPlane => CurveSetting::HalfPlane,
        Setting::RadialDisk => CurveSetting::Disk,
    };
    Ok(Curve::new(out_pts, par, cs).with_times(out_times))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::driving::{make_chordal_sle0, make_zero};
    use crate::solve::trace;
    use std::f64::consts::PI;

    fn vertical_polyline(n: usize) -> Curve {
        let pts = (0..=n)
            .map(|k| {
                let t = k as f64 / n as f64;
                C64::new(0.0, 2.0 * t.sqrt())
            })
            .collect();
        Curve::new(pts, Parametrization::Unknown, CurveSetting::HalfPlane)
    }

    #[test]
    fn vertical_segment_recovers_zero_driving_and_capacity() {
        let curve = vertical_polyline(1000);
        let zip = extract_driving(&curve, Setting::ChordalHalfPlane).unwrap();
        let sup = zip
            .driving_values
            .iter()
            .fold(0.0f64, |m, w| m.max(w.abs()));
        assert!(sup < 1e-3);
        // Vertex k sits at height 2 sqrt(t_k), so its capacity time is t_k.
        let expect: Vec<f64> = (1..=1000).map(|k| k as f64 / 1000.0).collect();
        for (got, want) in zip.capacity_times[1..].iter().zip(expect) {
            assert!((got - want).abs() < 2e-3);
        }
        assert!(zip.residual < 1e-6);
    }

    #[test]
    fn ray_polyline_recovers_sqrt_driving() {
        // The ray at angle 2 pi/3 is driven by -rho sqrt(2t/(rho+2)) with
        // rho = 2, i.e. -sqrt(2) sqrt(t).
        let n = 3000;
        let angle = 2.0 * PI / 3.0;
        let pts: Vec<C64> = (1..=n)
            .map(|k| C64::from_polar((k as f64 / n as f64).sqrt(), angle))
            .collect();
        let curve = Curve::new(pts, Parametrization::Unknown, CurveSetting::HalfPlane);
        let zip = extract_driving(&curve, Setting::ChordalHalfPlane).unwrap();
        let t_total = *zip.capacity_times.last().unwrap();
        let mut worst: f64 = 0.0;
        for (t, w) in zip.capacity_times.iter().zip(&zip.driving_values) {
            let expect = -(2.0 * t).sqrt();
            worst = worst.max((w - expect).abs());
        }
        // Normalize by the driving scale over the window.
        assert!(
            worst / (2.0 * t_total).sqrt() < 1e-2,
            "worst {worst} over scale {}",
            (2.0 * t_total).sqrt()
        );
    }

    #[test]
    fn roundtrip_residual_decreases_under_refinement() {
        let drive = make_chordal_sle0(1.0, 1.0).unwrap();
        let mut residuals = Vec::new();
        for n in [250usize, 500, 1000] {
            let curve = trace(&drive, n, 0.5).unwrap();
            let zip = extract_driving(&curve, Setting::ChordalHalfPlane).unwrap();
            residuals.push(zip.residual);
        }
        assert!(residuals[2] < 1e-2, "residuals {residuals:?}");
        assert!(residuals[2] < residuals[0], "residuals {residuals:?}");
    }

    #[test]
    fn radial_roundtrip() {
        let drive = crate::driving::make_radial_sle0(1.0, PI).unwrap();
        let curve = trace(&drive, 600, 1.0).unwrap();
        let zip = extract_driving(&curve, Setting::RadialDisk).unwrap();
        assert!(zip.residual < 1e-2, "residual {}", zip.residual);
        // Conformal-radius times must reach T = 1.
        assert!((zip.capacity_times.last().unwrap() - 1.0).abs() < 5e-2);
    }

    #[test]
    fn self_intersection_detected() {
        let pts = vec![
            C64::new(0.0, 0.5),
            C64::new(0.1, 1.0),
            C64::new(0.1, -0.2),
        ];
        let curve = Curve::new(pts, Parametrization::Unknown, CurveSetting::HalfPlane);
        match extract_driving(&curve, Setting::ChordalHalfPlane) {
            Err(Error::SelfIntersection { .. }) => {}
            other => panic!("expected SelfIntersection, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_step_detected() {
        let pts = vec![C64::new(0.0, 0.5), C64::new(0.0, 0.5), C64::new(0.0, 1.0)];
        let curve = Curve::new(pts, Parametrization::Unknown, CurveSetting::HalfPlane);
        match extract_driving(&curve, Setting::ChordalHalfPlane) {
            Err(Error::DegenerateStep { .. }) => {}
            other => panic!("expected DegenerateStep, got {other:?}"),
        }
    }

    #[test]
    fn capacity_reparametrization_is_stable_on_capacity_input() {
        let drive = make_zero(Setting::ChordalHalfPlane);
        let curve = trace(&drive, 400, 1.0).unwrap();
        let re = capacity_reparametrize(&curve, Setting::ChordalHalfPlane).unwrap();
        let d = directed_hausdorff(&re.points, &curve.points);
        assert!(d < 1e-3);
    }

    #[test]
    fn arc_length_ray_reparametrizes_to_sqrt_modulus() {
        let n = 1200;
        let angle = crate::driving::ray_angle(2.0);
        let pts: Vec<C64> = (1..=n)
            .map(|k| C64::from_polar(k as f64 / n as f64, angle))
            .collect();
        let curve = Curve::new(pts, Parametrization::ArcLength, CurveSetting::HalfPlane);
        let re = capacity_reparametrize(&curve, Setting::ChordalHalfPlane).unwrap();
        // |gamma(t_k)| proportional to sqrt(t_k) along the ray.
        let t_last = *re.times.last().unwrap();
        let r_last = re.points.last().unwrap().norm();
        for k in (n / 4..=n).step_by(100) {
            let expect = r_last * (re.times[k] / t_last).sqrt();
            assert!((re.points[k].norm() - expect).abs() < 2e-2);
        }
    }

    #[test]
    fn disk_arc_times_monotone() {
        // Circle arc inside the disk starting at 1.
        let n = 400;
        let pts: Vec<C64> = (1..=n)
            .map(|k| {
                let s = k as f64 / n as f64;
                C64::from_polar(1.0 - 0.6 * s, 0.8 * s)
            })
            .collect();
        let curve = Curve::new(pts, Parametrization::Unknown, CurveSetting::Disk);
        let zip = extract_driving(&curve, Setting::RadialDisk).unwrap();
        for w in zip.capacity_times.windows(2) {
            assert!(w[1] > w[0]);
        }
    }
}
