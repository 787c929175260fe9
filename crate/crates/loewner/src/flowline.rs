//! Harmonic angle fields whose flow-lines are the SLE_0(rho) curves, with
//! continuous branch tracking, plus the polyline distance used by all
//! cross-pipeline comparisons.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::geom::{directed_hausdorff, unwrap_near, Curve, CurveSetting, Parametrization};

use std::f64::consts::PI;

/// Harmonic angle field h with `eta' = e^{i h(eta)}` along flow-lines.
#[derive(Clone, Copy, Debug)]
pub enum FlowField {
    /// Boundary force point x0 (either sign), field on H:
    /// `pi(1 + rho/2) - arg z - (rho/2) arg(z - x0)` for x0 > 0 and
    /// `pi - arg z - (rho/2) arg(z - x0)` for x0 < 0.
    BoundaryChordal { rho: f64, x0: f64 },
    /// Interior force point z0, field on the log-surface lift of H:
    /// `pi - arg z - (rho/4)(arg(z - z0) + arg(z - conj z0))`, with
    /// `arg(z - z0)` continuously lifted from `arg = theta + pi` at the start.
    InteriorChordal { rho: f64, z0: C64 },
    /// Whole-plane field `(6 + rho)/4 arg z + pi` with unwrapped arg.
    WholePlane { rho: f64 },
    /// Whole-plane rho = -2 field `arg z + C`, `C = 3 pi/2 - v0/2`.
    WholePlaneMinus2 { v0: f64 },
}

/// Threaded branch state: the last lifted value of the field's multivalued
/// arg term (absent for fields whose args stay principal).
#[derive(Clone, Copy, Debug, Default)]
pub struct BranchState {
    lifted: Option<f64>,
}

impl BranchState {
    pub fn with(value: f64) -> Self {
        BranchState {
            lifted: Some(value),
        }
    }

    pub fn value(&self) -> Option<f64> {
        self.lifted
    }
}

const BRANCH_GUARD: f64 = 0.9 * PI;

impl FlowField {
    /// The branch state appropriate to a flow-line started at `start` (for
    /// interior fields: the lift with `arg(start - z0) = theta + pi` when
    /// `start` is near 0).
    pub fn initial_branch(&self, start: C64) -> BranchState {
        match self {
            FlowField::BoundaryChordal { .. } => BranchState::default(),
            FlowField::InteriorChordal { z0, .. } => {
                BranchState::with((start - z0).arg() + 2.0 * PI)
            }
            FlowField::WholePlane { .. } | FlowField::WholePlaneMinus2 { .. } => {
                BranchState::with(start.arg())
            }
        }
    }

    fn lifted_term(&self, z: C64) -> Option<f64> {
        match self {
            FlowField::BoundaryChordal { .. } => None,
            FlowField::InteriorChordal { z0, .. } => Some((z - z0).arg()),
            FlowField::WholePlane { .. } | FlowField::WholePlaneMinus2 { .. } => Some(z.arg()),
        }
    }

    /// Field location of the force point, if any (used as a stop condition).
    fn force_location(&self) -> Option<C64> {
        match self {
            FlowField::BoundaryChordal { x0, .. } => Some(C64::new(*x0, 0.0)),
            FlowField::InteriorChordal { z0, .. } => Some(*z0),
            _ => None,
        }
    }

    fn scale(&self) -> f64 {
        match self {
            FlowField::BoundaryChordal { x0, .. } => x0.abs(),
            FlowField::InteriorChordal { z0, .. } => z0.norm(),
            _ => 1.0,
        }
    }
}

/// Evaluates the field at `z`, threading the branch state. Errors with
/// [`Error::BranchJump`] when the lifted term moves by more than the pi
/// guard in one evaluation step.
pub fn field_eval(field: &FlowField, z: C64, state: &BranchState) -> Result<(f64, BranchState)> {
    let (lifted_now, new_state) = match field.lifted_term(z) {
        None => (0.0, *state),
        Some(raw) => {
            let prev = state
                .lifted
                .unwrap_or_else(|| field.initial_branch(z).lifted.unwrap());
            let lifted = unwrap_near(prev, raw);
            if (lifted - prev).abs() >= BRANCH_GUARD {
                return Err(Error::BranchJump {
                    step: 0,
                    jump: (lifted - prev).abs(),
                });
            }
            (lifted, BranchState::with(lifted))
        }
    };
    let h = match field {
        FlowField::BoundaryChordal { rho, x0 } => {
            let base = if *x0 > 0.0 {
                PI * (1.0 + rho / 2.0)
            } else {
                PI
            };
            base - z.arg() - rho / 2.0 * (z - x0).arg()
        }
        FlowField::InteriorChordal { rho, z0 } => {
            PI - z.arg() - rho / 4.0 * (lifted_now + (z - z0.conj()).arg())
        }
        FlowField::WholePlane { rho } => (6.0 + rho) / 4.0 * lifted_now + PI,
        FlowField::WholePlaneMinus2 { v0 } => lifted_now + (1.5 * PI - v0 / 2.0),
    };
    Ok((h, new_state))
}

/// Why a flow-line integration stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlowStop {
    MaxSteps,
    DomainExit,
    ForcePointApproach,
}

/// Integrates `eta' = e^{i h(eta)}` with RK4 in arc length, threading the
/// branch state through the stages. Stops on domain exit, force-point
/// approach (within 1e-6 of the field scale), or `max_steps`.
pub fn integrate_flowline(
    field: &FlowField,
    start: C64,
    ds: f64,
    max_steps: usize,
) -> Result<(Curve, FlowStop)> {
    if ds <= 0.0 {
        return Err(Error::InvalidParameter("ds must be positive".into()));
    }
    let mut state = field.initial_branch(start);
    let mut z = start;
    let mut pts = vec![z];
    let fp = field.force_location();
    let fp_eps = 1e-6 * field.scale();
    let mut stop = FlowStop::MaxSteps;
    for _ in 0..max_steps {
        // RK4 stages, each unwrapped relative to the step-start state.
        let (h1, s1) = field_eval(field, z, &state)?;
        let k1 = C64::from_polar(1.0, h1);
        let (h2, _) = field_eval(field, z + 0.5 * ds * k1, &s1)?;
        let k2 = C64::from_polar(1.0, h2);
        let (h3, _) = field_eval(field, z + 0.5 * ds * k2, &s1)?;
        let k3 = C64::from_polar(1.0, h3);
        let (h4, _) = field_eval(field, z + ds * k3, &s1)?;
        let k4 = C64::from_polar(1.0, h4);
        let z_new = z + ds / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        let in_halfplane = matches!(
            field,
            FlowField::BoundaryChordal { .. } | FlowField::InteriorChordal { .. }
        );
        if in_halfplane && z_new.im <= 0.0 {
            stop = FlowStop::DomainExit;
            break;
        }
        if let Some(p) = fp {
            if (z_new - p).norm() < fp_eps.max(2.0 * ds) {
                pts.push(z_new);
                stop = FlowStop::ForcePointApproach;
                break;
            }
        }
        let (_, s_new) = field_eval(field, z_new, &s1)?;
        state = s_new;
        z = z_new;
        pts.push(z);
    }
    let setting = match field {
        FlowField::BoundaryChordal { .. } | FlowField::InteriorChordal { .. } => {
            CurveSetting::HalfPlane
        }
        _ => CurveSetting::Plane,
    };
    let times: Vec<f64> = (0..pts.len()).map(|k| k as f64 * ds).collect();
    Ok((
        Curve::new(pts, Parametrization::ArcLength, setting).with_times(times),
        stop,
    ))
}

/// Symmetric Hausdorff distance between two polylines (vertices of each
/// against the segments of the other).
pub fn curve_distance(a: &Curve, b: &Curve) -> f64 {
    directed_hausdorff(&a.points, &b.points).max(directed_hausdorff(&b.points, &a.points))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_rho_field_is_vertical() {
        let field = FlowField::BoundaryChordal { rho: 0.0, x0: 1.0 };
        let state = BranchState::default();
        let (h, _) = field_eval(&field, C64::new(0.0, 0.5), &state).unwrap();
        assert!((h - PI / 2.0).abs() < 1e-12);
        let (curve, _) =
            integrate_flowline(&field, C64::new(0.0, 1e-4), 1e-3, 1500).unwrap();
        for &z in &curve.points {
            assert!(z.re.abs() < 1e-3, "stays on the axis, got {z}");
        }
    }

    #[test]
    fn wholeplane_minus2_with_c_equal_pi_flows_along_rays() {
        // C = pi corresponds to v0 = pi; then h = arg z + pi and the flow
        // moves radially toward 0.
        let field = FlowField::WholePlaneMinus2 { v0: PI };
        let start = C64::from_polar(2.0, 0.7);
        let (curve, _) = integrate_flowline(&field, start, 1e-3, 500).unwrap();
        for &z in &curve.points {
            assert!((z.arg() - 0.7).abs() < 1e-6);
            assert!(z.norm() <= 2.0 + 1e-12);
        }
    }

    #[test]
    fn wholeplane_minus6_field_is_constant_pi() {
        let field = FlowField::WholePlane { rho: -6.0 };
        let (h, _) =
            field_eval(&field, C64::new(3.0, 1.0), &BranchState::with(0.2)).unwrap();
        assert!((h - PI).abs() < 1e-12);
    }

    #[test]
    fn branch_guard_trips_on_teleport() {
        let field = FlowField::WholePlane { rho: -3.0 };
        let state = BranchState::with(0.0);
        // Jump across the branch point to arg close to pi: guard must trip
        // (0.95 pi exceeds the 0.9 pi guard).
        let err = field_eval(&field, C64::from_polar(1.0, 0.95 * PI), &state);
        assert!(matches!(err, Err(Error::BranchJump { .. })));
    }

    #[test]
    fn interior_branch_winds_continuously() {
        // Walk a full loop around z0 and check the lifted arg advances 2 pi.
        let z0 = C64::new(0.0, 1.0);
        let field = FlowField::InteriorChordal { rho: -4.0, z0 };
        let mut state = BranchState::with(0.0);
        let n = 200;
        for k in 0..=n {
            let ang = 2.0 * PI * k as f64 / n as f64;
            let z = z0 + C64::from_polar(0.3, ang);
            let (_, s) = field_eval(&field, z, &state).unwrap();
            state = s;
        }
        assert!((state.value().unwrap() - 2.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn curve_distance_examples() {
        let a = Curve::new(
            vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            Parametrization::Unknown,
            CurveSetting::Plane,
        );
        let mut b = a.clone();
        b.points.iter_mut().for_each(|z| *z += C64::new(0.0, 0.3));
        assert!(curve_distance(&a, &a) == 0.0);
        assert!((curve_distance(&a, &b) - 0.3).abs() < 1e-12);
    }
}
