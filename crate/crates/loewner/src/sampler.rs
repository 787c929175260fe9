//! Euler-Maruyama simulation of the SLE_kappa(rho) driving diffusions with
//! co-integrated force-point flow, approach-time detection, and Monte Carlo
//! statistics with Wilson intervals.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::driving::{DrivingFunction, ForcePoint, ForcePointSpec};
use crate::error::{Error, Result};

/// Monte Carlo configuration. Identical seed and config produce identical
/// results regardless of thread count (seeds are derived per path).
#[derive(Clone, Copy, Debug)]
pub struct SimulationConfig {
    /// kappa >= 0; kappa = 0 is the degenerate (noise-free) configuration.
    pub kappa: f64,
    pub fp: ForcePointSpec,
    pub t_end: f64,
    pub dt_max: f64,
    /// Approach threshold epsilon for tau_eps detection.
    pub eps_stop: f64,
    pub seed: u64,
    pub n_paths: usize,
    /// Keep full per-path samples (large; off for big runs).
    pub keep_paths: bool,
}

impl SimulationConfig {
    fn validate(&self) -> Result<()> {
        if self.kappa < 0.0 || self.n_paths == 0 || self.dt_max <= 0.0 || self.t_end <= 0.0 {
            return Err(Error::InvalidParameter(
                "need kappa >= 0, n_paths >= 1, dt_max > 0, t_end > 0".into(),
            ));
        }
        Ok(())
    }
}

/// Per-path outcome record.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PathRecord {
    pub final_value: f64,
    pub hit: bool,
    pub hit_time: f64,
    pub min_gap: f64,
    pub blew_up: bool,
}

/// 95% Wilson score interval for a binomial proportion.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct WilsonInterval {
    pub low: f64,
    pub high: f64,
}

pub fn wilson_interval(hits: usize, n: usize) -> WilsonInterval {
    let z = 1.959963984540054_f64;
    let n_f = n as f64;
    let p = hits as f64 / n_f;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_f;
    let center = (p + z2 / (2.0 * n_f)) / denom;
    let half = z * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt() / denom;
    WilsonInterval {
        low: (center - half).max(0.0),
        high: (center + half).min(1.0),
    }
}

/// Aggregate statistics of a batch of simulated driving paths.
#[derive(Clone, Debug, Serialize)]
pub struct PathStats {
    pub n_paths: usize,
    pub eps_stop: f64,
    pub n_hits: usize,
    pub hit_fraction: f64,
    pub wilson: WilsonInterval,
    pub mean_final: f64,
    pub mean_min_gap: f64,
}

impl PathStats {
    fn from_records(records: &[PathRecord], eps_stop: f64) -> PathStats {
        let n = records.len();
        let n_hits = records.iter().filter(|r| r.hit).count();
        let p = n_hits as f64 / n as f64;
        PathStats {
            n_paths: n,
            eps_stop,
            n_hits,
            hit_fraction: p,
            wilson: wilson_interval(n_hits, n),
            mean_final: records.iter().map(|r| r.final_value).sum::<f64>() / n as f64,
            mean_min_gap: records.iter().map(|r| r.min_gap).sum::<f64>() / n as f64,
        }
    }
}

/// Simulation output: per-path records, aggregate stats, and (optionally)
/// the sampled paths themselves.
#[derive(Clone, Debug)]
pub struct SimulateOutput {
    pub records: Vec<PathRecord>,
    pub stats: PathStats,
    pub paths: Option<Vec<Vec<(f64, f64)>>>,
}

impl SimulateOutput {
    /// Hit fraction for a threshold eps >= cfg.eps_stop (hitting is monotone
    /// in eps, so min-gap records determine every coarser threshold).
    pub fn hit_stats_at(&self, eps: f64) -> PathStats {
        let records: Vec<PathRecord> = self
            .records
            .iter()
            .map(|r| PathRecord {
                hit: r.min_gap < eps,
                ..*r
            })
            .collect();
        PathStats::from_records(&records, eps)
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn path_rng(seed: u64, path: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(path.wrapping_add(0x5be5))))
}

#[derive(Clone, Copy)]
enum DiffusionState {
    Boundary { w: f64, x: f64 },
    Interior { w: f64, z: C64 },
    Radial { w: f64, v: f64 },
}

impl DiffusionState {
    fn init(fp: &ForcePointSpec) -> DiffusionState {
        match fp.point {
            ForcePoint::BoundaryChordal(x0) => DiffusionState::Boundary { w: 0.0, x: x0 },
            ForcePoint::InteriorChordal(z0) => DiffusionState::Interior { w: 0.0, z: z0 },
            ForcePoint::BoundaryRadial(v0) => DiffusionState::Radial { w: 0.0, v: v0 },
        }
    }

    fn gap(&self) -> f64 {
        match *self {
            DiffusionState::Boundary { w, x } => (x - w).abs(),
            DiffusionState::Interior { w, z } => (z - w).norm(),
            DiffusionState::Radial { w, v } => 2.0 * ((v - w) / 2.0).sin().abs(),
        }
    }

    fn advance(&mut self, dt: f64, dw_noise: f64, rho: f64) {
        match self {
            DiffusionState::Boundary { w, x } => {
                let drift = rho / (*w - *x);
                let x_dot = 2.0 / (*x - *w);
                *w += drift * dt + dw_noise;
                *x += x_dot * dt;
            }
            DiffusionState::Interior { w, z } => {
                let d = C64::new(*w, 0.0) - *z;
                let drift = rho * d.re / d.norm_sqr();
                let z_dot = 2.0 / (*z - *w);
                *w += drift * dt + dw_noise;
                *z += z_dot * dt;
            }
            DiffusionState::Radial { w, v } => {
                let half = (*w - *v) / 2.0;
                let drift = rho / 2.0 * half.cos() / half.sin();
                let v_dot = half.cos() / -half.sin();
                // dv/dt = cot((v-w)/2) = -cot((w-v)/2).
                *w += drift * dt + dw_noise;
                *v += v_dot * dt;
            }
        }
    }

    fn value(&self) -> f64 {
        match *self {
            DiffusionState::Boundary { w, .. } => w,
            DiffusionState::Interior { w, .. } => w,
            DiffusionState::Radial { w, .. } => w,
        }
    }

    fn finite(&self) -> bool {
        match *self {
            DiffusionState::Boundary { w, x } => w.is_finite() && x.is_finite(),
            DiffusionState::Interior { w, z } => w.is_finite() && z.is_finite(),
            DiffusionState::Radial { w, v } => w.is_finite() && v.is_finite(),
        }
    }
}

fn adaptive_dt(cfg: &SimulationConfig, gap: f64) -> f64 {
    let rho_cap = 0.01 * gap * gap / cfg.fp.rho.abs().max(1.0);
    let mut dt = cfg.dt_max.min(rho_cap);
    if cfg.kappa > 0.0 {
        dt = dt.min(0.01 * gap * gap / cfg.kappa);
    }
    dt.max(1e-12 * cfg.t_end)
}

fn run_path(
    cfg: &SimulationConfig,
    path_index: u64,
    mut observe: impl FnMut(f64, f64),
) -> PathRecord {
    let mut rng = path_rng(cfg.seed, path_index);
    let mut state = DiffusionState::init(&cfg.fp);
    let rho = cfg.fp.rho;
    let mut t = 0.0;
    let mut min_gap = state.gap();
    let mut hit = false;
    let mut hit_time = f64::NAN;
    let mut blew_up = false;
    observe(t, state.value());
    while t < cfg.t_end {
        let gap = state.gap();
        let dt = adaptive_dt(cfg, gap).min(cfg.t_end - t);
        let noise = if cfg.kappa > 0.0 {
            let g: f64 = rng.sample(rand_distr::StandardNormal);
            (cfg.kappa * dt).sqrt() * g
        } else {
            0.0
        };
        state.advance(dt, noise, rho);
        t += dt;
        if !state.finite() {
            blew_up = true;
            break;
        }
        let gap_now = crossed_gap(&state, gap);
        min_gap = min_gap.min(gap_now);
        observe(t, state.value());
        if gap_now < cfg.eps_stop {
            hit = true;
            hit_time = t;
            break;
        }
    }
    PathRecord {
        final_value: state.value(),
        hit,
        hit_time,
        min_gap,
        blew_up,
    }
}

/// Gap after a step, treating a sign change of the ordered gap as a crossing
/// (the Euler step overshot the singularity).
fn crossed_gap(state: &DiffusionState, _prev_gap: f64) -> f64 {
    match *state {
        DiffusionState::Boundary { w, x } => {
            let signed = x - w;
            if signed <= 0.0 {
                0.0
            } else {
                signed
            }
        }
        DiffusionState::Interior { w, z } => (z - w).norm(),
        DiffusionState::Radial { w, v } => {
            let d = v - w;
            if d <= 0.0 || d >= 2.0 * std::f64::consts::PI {
                0.0
            } else {
                2.0 * (d / 2.0).sin().abs()
            }
        }
    }
}

/// Simulates the driving diffusion `dW = Re(rho/(W - z_t)) dt + sqrt(kappa) dB`
/// (chordal) or `dw = (rho/2) cot((w - v)/2) dt + sqrt(kappa) dB` (radial)
/// with Euler-Maruyama and gap-adaptive steps, stopping each path at
/// tau_eps or `t_end`. Deterministic given the seed.
pub fn simulate_drive(cfg: &SimulationConfig) -> Result<SimulateOutput> {
    cfg.validate()?;
    if cfg.keep_paths {
        let mut records = Vec::with_capacity(cfg.n_paths);
        let mut paths = Vec::with_capacity(cfg.n_paths);
        for i in 0..cfg.n_paths {
            let mut samples = Vec::new();
            let rec = run_path(cfg, i as u64, |t, w| samples.push((t, w)));
            records.push(rec);
            paths.push(samples);
        }
        let stats = PathStats::from_records(&records, cfg.eps_stop);
        Ok(SimulateOutput {
            records,
            stats,
            paths: Some(paths),
        })
    } else {
        let records: Vec<PathRecord> = (0..cfg.n_paths as u64)
            .into_par_iter()
            .map(|i| run_path(cfg, i, |_, _| {}))
            .collect();
        let stats = PathStats::from_records(&records, cfg.eps_stop);
        Ok(SimulateOutput {
            records,
            stats,
            paths: None,
        })
    }
}

/// Tube statistics: fraction of paths with `sup_{[0,T]} |W_t - center(t)|`
/// below `radius` (paths must survive to `t_end`).
pub fn tube_probability(
    cfg: &SimulationConfig,
    center: &DrivingFunction,
    radius: f64,
) -> Result<PathStats> {
    cfg.validate()?;
    if cfg.t_end > center.horizon * (1.0 + 1e-12) {
        return Err(Error::BeyondHorizon {
            t: cfg.t_end,
            horizon: center.horizon,
        });
    }
    let records: Vec<PathRecord> = (0..cfg.n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let mut sup: f64 = 0.0;
            let rec = run_path(cfg, i, |t, w| {
                sup = sup.max((w - center.value_unchecked(t)).abs());
            });
            PathRecord {
                hit: !rec.hit && !rec.blew_up && sup < radius,
                ..rec
            }
        })
        .collect();
    Ok(PathStats::from_records(&records, cfg.eps_stop))
}

/// Hitting exponent of the approach-probability bound: `2 (rho+2)/kappa - 1`.
pub fn hitting_exponent(kappa: f64, rho: f64) -> f64 {
    2.0 * (rho + 2.0) / kappa - 1.0
}

/// Least-squares slope of `log p` against `log eps` over thresholds with at
/// least one hit. Returns `None` when fewer than two thresholds have hits
/// (an empty estimate: the decay is then consistent with any exponent).
pub fn log_log_slope(out: &SimulateOutput, eps_grid: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = eps_grid
        .iter()
        .filter_map(|&eps| {
            let stats = out.hit_stats_at(eps);
            if stats.n_hits > 0 {
                Some((eps.ln(), (stats.hit_fraction).ln()))
            } else {
                None
            }
        })
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let (_, slope, _) = crate::geom::line_fit(&xs, &ys);
    Some(slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::driving::{make_radial_sle0, Setting};
    use std::f64::consts::PI;

    fn radial_cfg(kappa: f64, rho: f64, v0: f64, n: usize, seed: u64) -> SimulationConfig {
        SimulationConfig {
            kappa,
            fp: ForcePointSpec::boundary_radial(rho, v0).unwrap(),
            t_end: 1.0,
            dt_max: 1e-3,
            eps_stop: 1e-3,
            seed,
            n_paths: n,
            keep_paths: false,
        }
    }

    #[test]
    fn kappa_zero_reduces_to_closed_form() {
        let rho = 1.0;
        let v0 = 2.0;
        let mut cfg = radial_cfg(0.0, rho, v0, 1, 1);
        cfg.keep_paths = true;
        cfg.dt_max = 1e-4;
        let out = simulate_drive(&cfg).unwrap();
        let path = &out.paths.as_ref().unwrap()[0];
        let exact = make_radial_sle0(rho, v0).unwrap();
        let mut worst: f64 = 0.0;
        for &(t, w) in path.iter() {
            worst = worst.max((w - exact.value(t).unwrap()).abs());
        }
        assert!(worst < 2e-3, "worst deviation {worst}");
    }

    #[test]
    fn kappa_zero_chordal_matches_closed_form() {
        let rho = 2.0;
        let mut cfg = SimulationConfig {
            kappa: 0.0,
            fp: ForcePointSpec::boundary_chordal(rho, 1.0).unwrap(),
            t_end: 1.0,
            dt_max: 1e-4,
            eps_stop: 1e-6,
            seed: 3,
            n_paths: 1,
            keep_paths: true,
        };
        cfg.keep_paths = true;
        let out = simulate_drive(&cfg).unwrap();
        let exact = crate::driving::make_chordal_sle0(rho, 1.0).unwrap();
        let path = &out.paths.as_ref().unwrap()[0];
        let mut worst: f64 = 0.0;
        for &(t, w) in path.iter() {
            worst = worst.max((w - exact.value(t).unwrap()).abs());
        }
        assert!(worst < 2e-3, "worst deviation {worst}");
    }

    #[test]
    fn driftless_variance_matches_kappa_t() {
        // rho = 0 chordal: W is sqrt(kappa) B. Variance of W_T over paths
        // must sit near kappa T.
        let cfg = SimulationConfig {
            kappa: 1.0,
            fp: ForcePointSpec::boundary_chordal(0.0, 5.0).unwrap(),
            t_end: 1.0,
            dt_max: 1e-3,
            eps_stop: 1e-6,
            seed: 11,
            n_paths: 10_000,
            keep_paths: false,
        };
        let out = simulate_drive(&cfg).unwrap();
        let mean = out.stats.mean_final;
        let var: f64 = out
            .records
            .iter()
            .map(|r| (r.final_value - mean).powi(2))
            .sum::<f64>()
            / (out.records.len() - 1) as f64;
        // 5 sigma of the variance estimator: var * sqrt(2/n) * 5 ~ 0.07.
        assert!((var - 1.0).abs() < 0.08, "variance {var}");
    }

    #[test]
    fn determinism_across_runs() {
        let cfg = radial_cfg(0.7, 1.0, PI, 500, 42);
        let a = simulate_drive(&cfg).unwrap();
        let b = simulate_drive(&cfg).unwrap();
        for (ra, rb) in a.records.iter().zip(&b.records) {
            assert_eq!(ra.final_value.to_bits(), rb.final_value.to_bits());
            assert_eq!(ra.min_gap.to_bits(), rb.min_gap.to_bits());
        }
    }

    #[test]
    fn hit_fraction_monotone_in_eps() {
        let mut cfg = radial_cfg(1.0, 0.0, PI, 4000, 5);
        cfg.eps_stop = 0.05;
        let out = simulate_drive(&cfg).unwrap();
        let p1 = out.hit_stats_at(0.05).hit_fraction;
        let p2 = out.hit_stats_at(0.1).hit_fraction;
        let p3 = out.hit_stats_at(0.2).hit_fraction;
        assert!(p1 <= p2 && p2 <= p3, "{p1} {p2} {p3}");
    }

    #[test]
    fn wilson_interval_contains_proportion() {
        let w = wilson_interval(10, 100);
        assert!(w.low < 0.1 && 0.1 < w.high);
        let w0 = wilson_interval(0, 100);
        assert!(w0.low < 1e-12 && w0.high > 0.0);
    }

    #[test]
    fn tube_probability_is_one_for_huge_radius() {
        let cfg = radial_cfg(0.5, 1.0, PI, 200, 9);
        let center = crate::driving::make_zero(Setting::RadialDisk);
        let stats = tube_probability(&cfg, &center, 1e6).unwrap();
        assert_eq!(stats.n_hits, 200);
    }
}
