//! Deterministic CSV, SVG, and JSON emitters. All floating-point output is
//! written with 12 significant digits so reruns with the same seed are
//! byte-identical.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::geom::Curve;
use crate::solve::LoewnerTrack;

/// Formats with 12 significant digits (trailing zeros trimmed, `%g`-style).
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let s = format!("{:.*e}", 11, x);
    // Rust prints exponents as "e0", "e-5"; normalize mantissa zeros.
    let (mant, exp) = s.split_once('e').unwrap();
    let mant = mant.trim_end_matches('0').trim_end_matches('.');
    let exp: i32 = exp.parse().unwrap();
    if (-4..=14).contains(&exp) {
        // Plain notation for ordinary magnitudes.
        let v: f64 = format!("{mant}e{exp}").parse().unwrap();
        let digits = (11 - exp).clamp(0, 17) as usize;
        let plain = format!("{v:.*}", digits);
        let trimmed = plain.trim_end_matches('0').trim_end_matches('.');
        trimmed.to_string()
    } else {
        format!("{mant}e{exp}")
    }
}

/// Rounds to 12 significant digits (stabilizes JSON output).
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let mag = x.abs().log10().floor() as i32;
    let scale = 10f64.powi(11 - mag);
    (x * scale).round() / scale
}

/// CSV with header `t,value` for a sampled driving function.
pub fn driving_csv(samples: &[(f64, f64)]) -> String {
    let mut out = String::from("t,value\n");
    for (t, w) in samples {
        out.push_str(&fmt_sig(*t));
        out.push(',');
        out.push_str(&fmt_sig(*w));
        out.push('\n');
    }
    out
}

/// CSV with header `t,re,im` for a curve (missing times become indices).
pub fn curve_csv(curve: &Curve) -> String {
    let mut out = String::from("t,re,im\n");
    for (k, z) in curve.points.iter().enumerate() {
        let t = curve.times.get(k).copied().unwrap_or(k as f64);
        out.push_str(&fmt_sig(t));
        out.push(',');
        out.push_str(&fmt_sig(z.re));
        out.push(',');
        out.push_str(&fmt_sig(z.im));
        out.push('\n');
    }
    out
}

/// CSV for a track: one column per accumulator.
pub fn track_csv(track: &LoewnerTrack) -> String {
    let interior = !track.force_im.is_empty();
    let mut out = String::from(if interior {
        "t,driving,force_re,force_im,log_deriv,theta\n"
    } else {
        "t,driving,force,log_deriv\n"
    });
    for i in 0..track.len() {
        out.push_str(&fmt_sig(track.times[i]));
        out.push(',');
        out.push_str(&fmt_sig(track.driving[i]));
        out.push(',');
        out.push_str(&fmt_sig(track.force_re[i]));
        if interior {
            out.push(',');
            out.push_str(&fmt_sig(track.force_im[i]));
        }
        out.push(',');
        out.push_str(&fmt_sig(track.log_deriv[i]));
        if interior {
            out.push(',');
            out.push_str(&fmt_sig(track.theta[i]));
        }
        out.push('\n');
    }
    out
}

/// SVG polyline of one or more curves in a fixed 800x600 viewport with 5%
/// margins; the origin and an optional marked point are drawn as circles.
pub fn curves_svg(curves: &[&Curve], marked: Option<C64>) -> String {
    let (width, height) = (800.0, 600.0);
    let mut min_x = f64::INFINITY;
    let mut max_x = f64::NEG_INFINITY;
    let mut min_y = f64::INFINITY;
    let mut max_y = f64::NEG_INFINITY;
    let mut track_extent = |z: C64| {
        min_x = min_x.min(z.re);
        max_x = max_x.max(z.re);
        min_y = min_y.min(z.im);
        max_y = max_y.max(z.im);
    };
    for c in curves {
        for &z in &c.points {
            track_extent(z);
        }
    }
    track_extent(C64::new(0.0, 0.0));
    if let Some(m) = marked {
        track_extent(m);
    }
    let span_x = (max_x - min_x).max(1e-12);
    let span_y = (max_y - min_y).max(1e-12);
    let scale = ((width * 0.9) / span_x).min((height * 0.9) / span_y);
    let ox = width / 2.0 - scale * (min_x + max_x) / 2.0;
    let oy = height / 2.0 + scale * (min_y + max_y) / 2.0;
    let to_px = |z: C64| (ox + scale * z.re, oy - scale * z.im);

    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    );
    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
    for (i, c) in curves.iter().enumerate() {
        let mut d = String::new();
        for (k, &z) in c.points.iter().enumerate() {
            let (x, y) = to_px(z);
            d.push_str(if k == 0 { "M" } else { "L" });
            d.push_str(&format!("{:.2} {:.2} ", x, y));
        }
        svg.push_str(&format!(
            "<path d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n",
            d.trim_end(),
            colors[i % colors.len()]
        ));
    }
    let (x0, y0) = to_px(C64::new(0.0, 0.0));
    svg.push_str(&format!(
        "<circle cx=\"{x0:.2}\" cy=\"{y0:.2}\" r=\"4\" fill=\"#444444\"/>\n"
    ));
    if let Some(m) = marked {
        let (mx, my) = to_px(m);
        svg.push_str(&format!(
            "<circle cx=\"{mx:.2}\" cy=\"{my:.2}\" r=\"4\" fill=\"#d62728\"/>\n"
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

/// Serializes any value to pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{CurveSetting, Parametrization};

    #[test]
    fn sig_formatting() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(0.5), "0.5");
        assert_eq!(fmt_sig(-2.0), "-2");
        // 12 significant digits survive.
        assert_eq!(fmt_sig(0.804718956217), "0.804718956217");
        assert!(fmt_sig(1.23456789e-9).starts_with("1.23456789e"));
    }

    #[test]
    fn round_sig_is_idempotent() {
        for &x in &[std::f64::consts::PI, 1e-13, -42.4242424242424242] {
            assert_eq!(round_sig(round_sig(x)), round_sig(x));
        }
    }

    #[test]
    fn csv_and_svg_are_deterministic() {
        let c = Curve::new(
            vec![C64::new(0.0, 0.0), C64::new(0.1, 0.9), C64::new(-0.2, 1.7)],
            Parametrization::Unknown,
            CurveSetting::HalfPlane,
        );
        let a = curve_csv(&c);
        let b = curve_csv(&c);
        assert_eq!(a, b);
        assert!(a.starts_with("t,re,im\n"));
        let s1 = curves_svg(&[&c], Some(C64::new(1.0, 0.0)));
        let s2 = curves_svg(&[&c], Some(C64::new(1.0, 0.0)));
        assert_eq!(s1, s2);
        assert!(s1.contains("<path"));
    }
}
