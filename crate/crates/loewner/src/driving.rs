//! Closed-form driving-function families for SLE_0(rho) in the chordal,
//! radial, and whole-plane settings, plus sampled and combinator-built
//! driving functions.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Reference setting of a driving function.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Setting {
    /// (H; 0, inf), half-plane-capacity parametrization, real driving W_t.
    ChordalHalfPlane,
    /// (D; 1, 0), conformal-radius parametrization, unwrapped angle w_t.
    RadialDisk,
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A time-parametrized real path steering the Loewner flow.
///
/// `eval(0) = 0` in the reference settings. Values are stored unwrapped for
/// radial drivings. Evaluation beyond `horizon` is an error, not a clamp.
#[derive(Clone)]
pub struct DrivingFunction {
    pub setting: Setting,
    /// Maximal time (may be infinite).
    pub horizon: f64,
    eval: RealFn,
    deriv: Option<RealFn>,
    /// Present for sampled drivings; used by the absolute-continuity heuristic.
    samples: Option<Arc<Vec<(f64, f64)>>>,
    pub family_tag: String,
}

impl std::fmt::Debug for DrivingFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DrivingFunction")
            .field("setting", &self.setting)
            .field("horizon", &self.horizon)
            .field("family_tag", &self.family_tag)
            .field("has_deriv", &self.deriv.is_some())
            .finish()
    }
}

impl DrivingFunction {
    pub fn from_closures(
        setting: Setting,
        horizon: f64,
        eval: RealFn,
        deriv: Option<RealFn>,
        family_tag: impl Into<String>,
    ) -> Self {
        DrivingFunction {
            setting,
            horizon,
            eval,
            deriv,
            samples: None,
            family_tag: family_tag.into(),
        }
    }

    /// Sample nodes for sampled drivings (zipper output, CSV input).
    pub fn samples(&self) -> Option<&[(f64, f64)]> {
        self.samples.as_deref().map(|v| v.as_slice())
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if t < -1e-15 || t > self.horizon * (1.0 + 1e-12) + 1e-15 {
            return Err(Error::BeyondHorizon {
                t,
                horizon: self.horizon,
            });
        }
        Ok(())
    }

    /// Driving value at time `t` (errors beyond the horizon).
    pub fn value(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        Ok((self.eval)(t.min(self.horizon)))
    }

    /// Unchecked evaluation for inner loops that already validated the range.
    pub fn value_unchecked(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    pub fn has_derivative(&self) -> bool {
        self.deriv.is_some()
    }

    /// Time derivative: analytic when the family provides one, otherwise a
    /// centered finite difference (one-sided at the endpoints).
    pub fn derivative(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        if let Some(d) = &self.deriv {
            return Ok(d(t.min(self.horizon)));
        }
        Ok(self.fd_derivative(t, 1e-6 * (1.0 + t.abs())))
    }

    fn fd_derivative(&self, t: f64, h: f64) -> f64 {
        let hi = (t + h).min(self.horizon);
        let lo = (t - h).max(0.0);
        ((self.eval)(hi) - (self.eval)(lo)) / (hi - lo)
    }

    /// Restart of the driving at `t_split`: `s -> W(t_split + s) - W(t_split)`.
    /// Used by the additivity identity for the mapped-out remainder.
    pub fn restarted_at(&self, t_split: f64) -> Result<DrivingFunction> {
        self.check_time(t_split)?;
        let base = (self.eval)(t_split);
        let eval = self.eval.clone();
        let deriv = self.deriv.clone();
        Ok(DrivingFunction {
            setting: self.setting,
            horizon: self.horizon - t_split,
            eval: Arc::new(move |s| eval(t_split + s) - base),
            deriv: deriv.map(|d| -> RealFn { Arc::new(move |s| d(t_split + s)) }),
            samples: None,
            family_tag: format!("{}|restart@{t_split}", self.family_tag),
        })
    }

    /// Loewner rescaling of a chordal driving: `t -> lambda W(t / lambda^2)`.
    pub fn scaled(&self, lambda: f64) -> DrivingFunction {
        assert!(lambda > 0.0);
        let eval = self.eval.clone();
        let deriv = self.deriv.clone();
        DrivingFunction {
            setting: self.setting,
            horizon: self.horizon * lambda * lambda,
            eval: Arc::new(move |t| lambda * eval(t / (lambda * lambda))),
            deriv: deriv.map(|d| -> RealFn { Arc::new(move |t| d(t / (lambda * lambda)) / lambda) }),
            samples: None,
            family_tag: format!("{}|scaled{lambda}", self.family_tag),
        }
    }

    /// Pointwise sum of two drivings on the common horizon.
    pub fn plus(&self, other: &DrivingFunction) -> DrivingFunction {
        assert_eq!(self.setting, other.setting);
        let (e1, e2) = (self.eval.clone(), other.eval.clone());
        let deriv = match (self.deriv.clone(), other.deriv.clone()) {
            (Some(d1), Some(d2)) => Some(Arc::new(move |t| d1(t) + d2(t)) as RealFn),
            _ => None,
        };
        DrivingFunction {
            setting: self.setting,
            horizon: self.horizon.min(other.horizon),
            eval: Arc::new(move |t| e1(t) + e2(t)),
            deriv,
            samples: None,
            family_tag: format!("{}+{}", self.family_tag, other.family_tag),
        }
    }

    /// Samples `t, value` on a uniform grid with `n + 1` nodes.
    pub fn sample_uniform(&self, t_max: f64, n: usize) -> Result<Vec<(f64, f64)>> {
        self.check_time(t_max)?;
        Ok((0..=n)
            .map(|k| {
                let t = t_max * k as f64 / n as f64;
                (t, (self.eval)(t.min(self.horizon)))
            })
            .collect())
    }
}

/// Marked point exerting drift rho on the driving process.
#[derive(Clone, Copy, Debug)]
pub enum ForcePoint {
    /// x0 in R \ {0}.
    BoundaryChordal(f64),
    /// z0 in H.
    InteriorChordal(C64),
    /// v0 in (0, 2 pi), the force point being e^{i v0}.
    BoundaryRadial(f64),
}

#[derive(Clone, Copy, Debug)]
pub struct ForcePointSpec {
    pub point: ForcePoint,
    pub rho: f64,
}

impl ForcePointSpec {
    pub fn boundary_chordal(rho: f64, x0: f64) -> Result<Self> {
        if x0 == 0.0 || !x0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "boundary force point must be nonzero real, got {x0}"
            )));
        }
        Ok(ForcePointSpec {
            point: ForcePoint::BoundaryChordal(x0),
            rho,
        })
    }

    pub fn interior_chordal(rho: f64, z0: C64) -> Result<Self> {
        if !(z0.im > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "interior force point must have Im z0 > 0, got {z0}"
            )));
        }
        Ok(ForcePointSpec {
            point: ForcePoint::InteriorChordal(z0),
            rho,
        })
    }

    pub fn boundary_radial(rho: f64, v0: f64) -> Result<Self> {
        if !(v0 > 0.0 && v0 < 2.0 * PI) {
            return Err(Error::InvalidParameter(format!(
                "radial force angle must lie in (0, 2 pi), got {v0}"
            )));
        }
        Ok(ForcePointSpec {
            point: ForcePoint::BoundaryRadial(v0),
            rho,
        })
    }

    pub fn setting(&self) -> Setting {
        match self.point {
            ForcePoint::BoundaryRadial(_) => Setting::RadialDisk,
            _ => Setting::ChordalHalfPlane,
        }
    }
}

/// Orientation of a whole-plane chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Positive,
    Negative,
}

/// Driving function of chordal SLE_0(rho) with boundary force point `x0`.
///
/// `W_t = (rho/(rho+2)) (x0 - sqrt(x0^2 + 2(2+rho)t))` for rho != -2 and
/// `W_t = 2t/x0` for rho = -2, with the reflection `W^{rho,-x0} = -W^{rho,x0}`.
/// The horizon is `-x0^2 / (2(2+rho))` when rho < -2 and infinite otherwise.
pub fn make_chordal_sle0(rho: f64, x0: f64) -> Result<DrivingFunction> {
    if x0 == 0.0 || !x0.is_finite() {
        return Err(Error::InvalidParameter(
            "chordal force point x0 must be nonzero".into(),
        ));
    }
    let sign = x0.signum();
    let a = x0.abs();
    let horizon = if rho < -2.0 {
        -a * a / (2.0 * (2.0 + rho))
    } else {
        f64::INFINITY
    };
    let (eval, deriv): (RealFn, RealFn) = if rho == -2.0 {
        (
            Arc::new(move |t: f64| sign * 2.0 * t / a),
            Arc::new(move |_t: f64| sign * 2.0 / a),
        )
    } else {
        let c = rho / (rho + 2.0);
        (
            Arc::new(move |t: f64| {
                let gap = (a * a + 2.0 * (2.0 + rho) * t).max(0.0).sqrt();
                sign * c * (a - gap)
            }),
            Arc::new(move |t: f64| {
                let gap = (a * a + 2.0 * (2.0 + rho) * t).max(0.0).sqrt();
                -sign * rho / gap
            }),
        )
    };
    Ok(DrivingFunction::from_closures(
        Setting::ChordalHalfPlane,
        horizon,
        eval,
        Some(deriv),
        format!("chordal_sle0(rho={rho},x0={x0})"),
    ))
}

/// Gap `x_t - W_t` of the chordal SLE_0(rho) flow started from `x0 > 0`.
pub fn chordal_sle0_gap(rho: f64, x0: f64, t: f64) -> f64 {
    (x0 * x0 + 2.0 * (2.0 + rho) * t).max(0.0).sqrt()
}

/// Driving function of radial SLE_0(rho) with force point `e^{i v0}`.
///
/// `w_t = -(rho/(rho+2)) (2 arccos(cos(v0/2) e^{-(rho+2)t/4}) - v0)` for
/// rho != -2 and `w_t = t cot(v0/2)` for rho = -2. The horizon is finite iff
/// rho < -2 (first time the arccos argument leaves [-1, 1]).
pub fn make_radial_sle0(rho: f64, v0: f64) -> Result<DrivingFunction> {
    if !(v0 > 0.0 && v0 < 2.0 * PI) {
        return Err(Error::InvalidParameter(format!(
            "radial force angle must lie in (0, 2 pi), got {v0}"
        )));
    }
    let horizon = radial_sle0_horizon(rho, v0);
    let (eval, deriv): (RealFn, RealFn) = if rho == -2.0 {
        let slope = (v0 / 2.0).tan().recip();
        (
            Arc::new(move |t: f64| slope * t),
            Arc::new(move |_t: f64| slope),
        )
    } else {
        (
            Arc::new(move |t: f64| {
                let gap = radial_sle0_gap(rho, v0, t);
                -(rho / (rho + 2.0)) * (gap - v0)
            }),
            Arc::new(move |t: f64| {
                let gap = radial_sle0_gap(rho, v0, t);
                -(rho / 2.0) / (gap / 2.0).tan()
            }),
        )
    };
    Ok(DrivingFunction::from_closures(
        Setting::RadialDisk,
        horizon,
        eval,
        Some(deriv),
        format!("radial_sle0(rho={rho},v0={v0})"),
    ))
}

/// Angle gap `v_t - w_t = 2 arccos(cos(v0/2) e^{-(rho+2)t/4})` of the radial
/// SLE_0(rho) flow (constantly `v0` at rho = -2).
pub fn radial_sle0_gap(rho: f64, v0: f64, t: f64) -> f64 {
    let u = (v0 / 2.0).cos() * (-(rho + 2.0) * t / 4.0).exp();
    2.0 * u.clamp(-1.0, 1.0).acos()
}

fn radial_sle0_horizon(rho: f64, v0: f64) -> f64 {
    let c = (v0 / 2.0).cos();
    if rho < -2.0 && c != 0.0 {
        // First time |cos(v0/2) e^{-(rho+2)t/4}| reaches 1.
        4.0 * c.abs().ln() / (rho + 2.0)
    } else {
        f64::INFINITY
    }
}

/// Driving function of chordal SLE_0(-4) with interior force point `z0`:
/// `W_t = 2 cos(theta0) (|z0| - sqrt(|z0|^2 - 4t))` with horizon `|z0|^2/4`.
/// The trace is a logarithmic spiral approaching `z0`.
pub fn make_chordal_sle0_spiral(z0: C64) -> Result<DrivingFunction> {
    if !(z0.im > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "spiral force point must have Im z0 > 0, got {z0}"
        )));
    }
    let r = z0.norm();
    let cos0 = z0.re / r;
    let horizon = r * r / 4.0;
    Ok(DrivingFunction::from_closures(
        Setting::ChordalHalfPlane,
        horizon,
        Arc::new(move |t: f64| 2.0 * cos0 * (r - (r * r - 4.0 * t).max(0.0).sqrt())),
        Some(Arc::new(move |t: f64| {
            4.0 * cos0 / (r * r - 4.0 * t).max(f64::MIN_POSITIVE).sqrt()
        })),
        format!("chordal_sle0_spiral(z0={z0})"),
    ))
}

/// Unwrapped whole-plane driving angle at chain time `t` (valid for t < T).
pub fn wholeplane_driving_angle(
    rho: f64,
    theta: f64,
    big_t: f64,
    orientation: Orientation,
    v0_for_minus2: Option<f64>,
    t: f64,
) -> f64 {
    let sign = match orientation {
        Orientation::Positive => 1.0,
        Orientation::Negative => -1.0,
    };
    if rho == -2.0 {
        let v0 = v0_for_minus2.expect("whole-plane rho = -2 requires v0");
        sign * t / (v0 / 2.0).tan() + theta
    } else {
        let u = ((rho + 2.0) * (big_t - t) / 4.0).exp().clamp(0.0, 1.0);
        sign * (2.0 * rho / (rho + 2.0)) * u.asin() + theta
    }
}

/// Whole-plane SLE_0(rho) driving, rho <= -2, exposed on the finite window
/// `[T - window, T]` (the chain starts at -infinity; the window start is
/// where `e^{(rho+2)(T-t)/4}` is negligible). The returned driving is a
/// radial-setting function of window time `s = t - (T - window)`.
pub fn make_wholeplane_sle0(
    rho: f64,
    theta: f64,
    big_t: f64,
    orientation: Orientation,
    v0_for_minus2: Option<f64>,
    window: Option<f64>,
) -> Result<DrivingFunction> {
    if rho > -2.0 {
        return Err(Error::InvalidParameter(format!(
            "whole-plane SLE_0(rho) requires rho <= -2, got {rho}"
        )));
    }
    if rho == -2.0 {
        match v0_for_minus2 {
            Some(v0) if v0 > 0.0 && v0 < 2.0 * PI => {}
            _ => {
                return Err(Error::InvalidParameter(
                    "whole-plane rho = -2 requires v0 in (0, 2 pi)".into(),
                ))
            }
        }
    }
    let window = window.unwrap_or(20.0);
    let t_min = big_t - window;
    Ok(DrivingFunction::from_closures(
        Setting::RadialDisk,
        window,
        Arc::new(move |s: f64| {
            wholeplane_driving_angle(rho, theta, big_t, orientation, v0_for_minus2, t_min + s)
        }),
        None,
        format!("wholeplane_sle0(rho={rho},theta={theta},T={big_t},window={window})"),
    ))
}

/// Driving of the SLE_0(rho) ray (force point at 0+), rho > -2:
/// `W_t = -rho sqrt(2t/(rho+2))`. The trace is the ray at angle
/// `pi (2+rho)/(4+rho)`.
pub fn make_ray(rho: f64) -> Result<DrivingFunction> {
    if rho <= -2.0 {
        return Err(Error::InvalidParameter(format!(
            "ray driving requires rho > -2, got {rho}"
        )));
    }
    Ok(DrivingFunction::from_closures(
        Setting::ChordalHalfPlane,
        f64::INFINITY,
        Arc::new(move |t: f64| -rho * (2.0 * t / (rho + 2.0)).sqrt()),
        Some(Arc::new(move |t: f64| {
            -rho / (2.0 * (rho + 2.0) * t.max(f64::MIN_POSITIVE)).sqrt()
        })),
        format!("ray(rho={rho})"),
    ))
}

/// Angle of the SLE_0(rho) ray: `pi (2+rho)/(4+rho)`.
pub fn ray_angle(rho: f64) -> f64 {
    PI * (2.0 + rho) / (4.0 + rho)
}

/// The constant-zero driving (iR+ in the chordal setting, the radial
/// geodesic toward 0 in the disk).
pub fn make_zero(setting: Setting) -> DrivingFunction {
    DrivingFunction::from_closures(
        setting,
        f64::INFINITY,
        Arc::new(|_t: f64| 0.0),
        Some(Arc::new(|_t: f64| 0.0)),
        "zero",
    )
}

/// Band-limited driving `W(t) = sum_j a_j sin(omega_j t)` with the analytic
/// derivative. Used for randomized two-route and certificate tests.
pub fn make_sine_series(setting: Setting, amps: Vec<f64>, freqs: Vec<f64>) -> DrivingFunction {
    assert_eq!(amps.len(), freqs.len());
    let a2 = amps.clone();
    let f2 = freqs.clone();
    DrivingFunction::from_closures(
        setting,
        f64::INFINITY,
        Arc::new(move |t: f64| {
            amps.iter()
                .zip(&freqs)
                .map(|(a, w)| a * (w * t).sin())
                .sum()
        }),
        Some(Arc::new(move |t: f64| {
            a2.iter().zip(&f2).map(|(a, w)| a * w * (w * t).cos()).sum()
        })),
        "sine_series",
    )
}

/// Driving from samples `(t_k, W_k)` with strictly increasing times, linear
/// interpolation between nodes, and finite-difference derivatives (centered
/// in the interior, one-sided at the endpoints).
pub fn make_sampled(setting: Setting, samples: Vec<(f64, f64)>) -> Result<DrivingFunction> {
    if samples.len() < 2 {
        return Err(Error::InvalidParameter(
            "sampled driving needs at least two samples".into(),
        ));
    }
    for w in samples.windows(2) {
        if w[1].0 <= w[0].0 {
            return Err(Error::InvalidParameter(
                "sample times must be strictly increasing".into(),
            ));
        }
    }
    let horizon = samples.last().unwrap().0;
    let t0 = samples[0].0;
    if t0 != 0.0 {
        return Err(Error::InvalidParameter(
            "sampled driving must start at t = 0".into(),
        ));
    }
    let nodes = Arc::new(samples);
    let nodes2 = nodes.clone();
    let nodes3 = nodes.clone();
    let eval = move |t: f64| -> f64 {
        let n = &*nodes;
        let idx = match n.binary_search_by(|p| p.0.total_cmp(&t)) {
            Ok(i) => return n[i].1,
            Err(i) => i,
        };
        if idx == 0 {
            return n[0].1;
        }
        if idx >= n.len() {
            return n[n.len() - 1].1;
        }
        let (ta, wa) = n[idx - 1];
        let (tb, wb) = n[idx];
        wa + (wb - wa) * (t - ta) / (tb - ta)
    };
    let deriv = move |t: f64| -> f64 {
        let n = &*nodes2;
        let idx = n
            .binary_search_by(|p| p.0.total_cmp(&t))
            .unwrap_or_else(|i| i)
            .clamp(1, n.len() - 1);
        let lo = if idx >= 2 { idx - 2 } else { idx - 1 };
        let hi = (idx + 1).min(n.len() - 1);
        // Centered difference across the bracketing nodes; degrades to
        // one-sided at the ends.
        let (ta, wa) = n[lo.min(idx - 1)];
        let (tb, wb) = n[hi];
        (wb - wa) / (tb - ta)
    };
    let mut out = DrivingFunction::from_closures(
        setting,
        horizon,
        Arc::new(eval),
        Some(Arc::new(deriv)),
        "sampled",
    );
    out.samples = Some(nodes3);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd(drive: &DrivingFunction, t: f64, h: f64) -> f64 {
        (drive.value(t + h).unwrap() - drive.value(t - h).unwrap()) / (2.0 * h)
    }

    #[test]
    fn chordal_sle0_minus2_is_linear() {
        let d = make_chordal_sle0(-2.0, 1.0).unwrap();
        for k in 0..10 {
            let t = 0.1 * k as f64;
            assert!((d.value(t).unwrap() - 2.0 * t).abs() < 1e-14);
        }
    }

    #[test]
    fn chordal_sle0_rho0_is_zero() {
        let d = make_chordal_sle0(0.0, 1.0).unwrap();
        assert_eq!(d.value(2.0).unwrap(), 0.0);
    }

    #[test]
    fn chordal_sle0_rho2_value_at_one() {
        // W_t = (1 - sqrt(1 + 8t))/2, so W_1 = -1.
        let d = make_chordal_sle0(2.0, 1.0).unwrap();
        assert!((d.value(1.0).unwrap() + 1.0).abs() < 1e-14);
    }

    #[test]
    fn chordal_reflection_rule() {
        let plus = make_chordal_sle0(1.3, 0.7).unwrap();
        let minus = make_chordal_sle0(1.3, -0.7).unwrap();
        for k in 1..20 {
            let t = 0.05 * k as f64;
            assert!((plus.value(t).unwrap() + minus.value(t).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn chordal_horizon_below_minus2() {
        let d = make_chordal_sle0(-5.0, 1.0).unwrap();
        assert!((d.horizon - 1.0 / 6.0).abs() < 1e-15);
        assert!(d.value(0.2).is_err());
    }

    #[test]
    fn radial_sle0_antipodal_is_zero_for_any_rho() {
        for rho in [-2.0, -1.0, 0.0, 5.0] {
            let d = make_radial_sle0(rho, PI).unwrap();
            for k in 0..8 {
                assert!(d.value(0.3 * k as f64).unwrap().abs() < 1e-12);
            }
        }
    }

    #[test]
    fn radial_sle0_closed_form_value() {
        // rho = 2, v0 = pi/2, t = 1: w_1 = -(1/2)(2 arccos(cos(pi/4) e^{-1}) - pi/2).
        let d = make_radial_sle0(2.0, PI / 2.0).unwrap();
        let expect = -0.5 * (2.0 * ((PI / 4.0).cos() * (-1.0f64).exp()).acos() - PI / 2.0);
        assert!((d.value(1.0).unwrap() - expect).abs() < 1e-14);
    }

    #[test]
    fn radial_minus2_gap_constant() {
        let v0 = 2.0 * PI / 3.0;
        for k in 0..20 {
            let t = 0.1 * k as f64;
            assert!((radial_sle0_gap(-2.0, v0, t) - v0).abs() < 1e-12);
        }
    }

    #[test]
    fn radial_horizon_below_minus2() {
        let d = make_radial_sle0(-3.0, PI / 2.0).unwrap();
        // cos(v0/2) = cos(pi/4); horizon = 4 ln cos(pi/4) / (rho+2).
        let expect = 4.0 * (PI / 4.0).cos().ln() / (-1.0);
        assert!((d.horizon - expect).abs() < 1e-14);
        let g = radial_sle0_gap(-3.0, PI / 2.0, d.horizon);
        assert!(g.abs() < 1e-7);
    }

    #[test]
    fn spiral_examples() {
        // z0 = i: cos(theta0) = 0 so W is identically zero.
        let d = make_chordal_sle0_spiral(C64::new(0.0, 1.0)).unwrap();
        assert_eq!(d.value(0.2).unwrap(), 0.0);

        // z0 = e^{i pi/4}: W_t = sqrt(2)(1 - sqrt(1-4t)), horizon 1/4.
        let d = make_chordal_sle0_spiral(C64::from_polar(1.0, PI / 4.0)).unwrap();
        assert!((d.horizon - 0.25).abs() < 1e-15);
        let t = 0.2_f64;
        let expect = 2.0f64.sqrt() * (1.0 - (1.0 - 4.0 * t).sqrt());
        assert!((d.value(t).unwrap() - expect).abs() < 1e-14);

        // z0 = 2 e^{i pi/3}: W(0) = 0 and dW/dt(0) = 4 cos(pi/3)/|z0| = 1.
        let d = make_chordal_sle0_spiral(C64::from_polar(2.0, PI / 3.0)).unwrap();
        assert_eq!(d.value(0.0).unwrap(), 0.0);
        assert!((d.derivative(0.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wholeplane_endpoint_value() {
        // rho = -6, theta = 0, positive orientation: w_T = 3 arcsin(1) = 3 pi / 2.
        let w = wholeplane_driving_angle(-6.0, 0.0, 0.0, Orientation::Positive, None, 0.0);
        assert!((w - 3.0 * PI / 2.0).abs() < 1e-14);
        // t -> -infinity: w -> theta.
        let w = wholeplane_driving_angle(-4.0, 0.7, 0.0, Orientation::Positive, None, -60.0);
        assert!((w - 0.7).abs() < 1e-12);
        // rho = -2 with v0 = pi is constantly theta.
        let w = wholeplane_driving_angle(-2.0, 0.3, 0.0, Orientation::Positive, Some(PI), -5.0);
        assert!((w - 0.3).abs() < 1e-14);
    }

    #[test]
    fn wholeplane_rejects_rho_above_minus2() {
        assert!(make_wholeplane_sle0(-1.0, 0.0, 0.0, Orientation::Positive, None, None).is_err());
        assert!(make_wholeplane_sle0(-2.0, 0.0, 0.0, Orientation::Positive, None, None).is_err());
        assert!(
            make_wholeplane_sle0(-2.0, 0.0, 0.0, Orientation::Positive, Some(PI), None).is_ok()
        );
    }

    #[test]
    fn ray_driving_and_angle() {
        let d = make_ray(2.0).unwrap();
        for k in 1..10 {
            // -rho sqrt(2t/(rho+2)) at rho = 2 is -sqrt(2t).
            let t = 0.1 * k as f64;
            assert!((d.value(t).unwrap() + (2.0 * t).sqrt()).abs() < 1e-13);
        }
        assert!((ray_angle(2.0) - 2.0 * PI / 3.0).abs() < 1e-15);
        assert!((ray_angle(0.0) - PI / 2.0).abs() < 1e-15);
        assert!(make_ray(-2.0).is_err());
        // The approach angle increases monotonically in rho toward pi.
        let mut last = 0.0;
        for k in 0..60 {
            let a = ray_angle(-1.9 + k as f64);
            assert!(a > last && a < PI);
            last = a;
        }
    }

    #[test]
    fn derivative_matches_finite_difference_linearly_in_dt() {
        let fams = [
            make_chordal_sle0(2.0, 1.0).unwrap(),
            make_chordal_sle0(-5.0, 1.0).unwrap(),
            make_radial_sle0(1.0, 2.0).unwrap(),
            make_chordal_sle0_spiral(C64::from_polar(1.5, 1.0)).unwrap(),
        ];
        for d in &fams {
            let t_hi = if d.horizon.is_finite() {
                0.5 * d.horizon
            } else {
                1.0
            };
            let mut errs = Vec::new();
            for h in [1e-3, 5e-4, 2.5e-4] {
                let mut worst: f64 = 0.0;
                for k in 1..20 {
                    let t = t_hi * k as f64 / 20.0;
                    worst = worst.max((fd(d, t, h) - d.derivative(t).unwrap()).abs());
                }
                errs.push(worst);
            }
            // Centered differences converge at least linearly.
            assert!(
                errs[2] <= errs[0] * 0.6 + 1e-12,
                "family {} errs {errs:?}",
                d.family_tag
            );
        }
    }

    #[test]
    fn restart_and_scale_combinators() {
        let d = make_chordal_sle0(2.0, 1.0).unwrap();
        let r = d.restarted_at(0.5).unwrap();
        assert_eq!(r.value(0.0).unwrap(), 0.0);
        assert!(
            (r.value(0.3).unwrap() - (d.value(0.8).unwrap() - d.value(0.5).unwrap())).abs()
                < 1e-14
        );
        let s = d.scaled(2.0);
        assert!((s.value(4.0 * 0.3).unwrap() - 2.0 * d.value(0.3).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn sampled_driving_interpolates() {
        let d = make_sampled(
            Setting::ChordalHalfPlane,
            vec![(0.0, 0.0), (0.5, 1.0), (1.0, 0.5)],
        )
        .unwrap();
        assert!((d.value(0.25).unwrap() - 0.5).abs() < 1e-14);
        assert!((d.value(0.75).unwrap() - 0.75).abs() < 1e-14);
        assert!(d.value(1.5).is_err());
    }
}
