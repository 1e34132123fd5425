//! Synthetic tuning curves and IV traces with seeded multiplicative noise.

use crate::curve_fitting::{RunConditions, Sample, TuningCurve, MIN_FIT_SAMPLES};
use crate::error::{precondition, Result};
use crate::junction_iv::{simmons_current, IvPoint, IvTrace};

use super::rng::SeededRng;

/// `n` log-spaced times from `duration / n` to `duration`, endpoints exact.
pub fn log_spaced_times(duration: f64, n: usize) -> Result<Vec<f64>> {
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(precondition(format!("duration {duration} s must be positive")));
    }
    if n < 2 {
        return Err(precondition(format!("need at least 2 samples, got {n}")));
    }
    let lo = duration / n as f64;
    let span = (duration / lo).ln();
    let mut t: Vec<f64> = (0..n)
        .map(|k| lo * (span * k as f64 / (n - 1) as f64).exp())
        .collect();
    t[0] = lo;
    t[n - 1] = duration;
    Ok(t)
}

fn check_counts(n_samples: usize, noise: f64) -> Result<()> {
    if n_samples < MIN_FIT_SAMPLES {
        return Err(precondition(format!(
            "need at least {MIN_FIT_SAMPLES} samples, got {n_samples}"
        )));
    }
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(precondition(format!("noise {noise} must be non-negative")));
    }
    Ok(())
}

/// `r = a·ln(c·t)·(1 + ε)`, ε ~ N(0, noise), at log-spaced times.
pub fn synth_tuning_curve(
    a: f64,
    c: f64,
    duration: f64,
    n_samples: usize,
    noise: f64,
    seed: u64,
    conditions: RunConditions,
) -> Result<TuningCurve> {
    check_counts(n_samples, noise)?;
    let mut rng = SeededRng::new(seed);
    let samples = log_spaced_times(duration, n_samples)?
        .into_iter()
        .map(|t| Sample {
            t,
            r: a * (c * t).ln() * (1.0 + noise * rng.gaussian()),
        })
        .collect();
    TuningCurve::new(samples, conditions, "synthetic")
}

/// `r = 1 + a·tⁿ·(1 + ε)`: the noise scales the increment, not the baseline.
pub fn synth_power_curve(
    a: f64,
    n: f64,
    duration: f64,
    n_samples: usize,
    noise: f64,
    seed: u64,
    conditions: RunConditions,
) -> Result<TuningCurve> {
    check_counts(n_samples, noise)?;
    let mut rng = SeededRng::new(seed);
    let samples = log_spaced_times(duration, n_samples)?
        .into_iter()
        .map(|t| Sample {
            t,
            r: 1.0 + a * t.powf(n) * (1.0 + noise * rng.gaussian()),
        })
        .collect();
    TuningCurve::new(samples, conditions, "synthetic")
}

/// Settings for [`synth_iv_trace`]. Thickness in m, height in eV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IvSynth {
    pub d: f64,
    pub phi: f64,
    pub area: f64,
    pub v_max: f64,
    pub n_points: usize,
    pub noise: f64,
    /// Above this bias the junction conducts through a short of `r_short` Ω.
    pub v_breakdown: Option<f64>,
    pub r_short: f64,
    pub seed: u64,
}

impl IvSynth {
    pub fn new(d: f64, phi: f64, area: f64, v_max: f64) -> Self {
        Self {
            d,
            phi,
            area,
            v_max,
            n_points: 151,
            noise: 0.0,
            v_breakdown: None,
            r_short: 100.0,
            seed: super::rng::DEFAULT_SEED,
        }
    }
}

/// Uniform bias sweep from 0 to `v_max` through the Simmons current.
pub fn synth_iv_trace(s: &IvSynth) -> Result<IvTrace> {
    if s.n_points < 2 {
        return Err(precondition("need at least 2 IV points"));
    }
    if !(s.v_max > 0.0) || !(s.noise >= 0.0) || !(s.r_short > 0.0) {
        return Err(precondition(format!("invalid IV synthesis settings {s:?}")));
    }
    let mut rng = SeededRng::new(s.seed);
    let mut points = Vec::with_capacity(s.n_points);
    for k in 0..s.n_points {
        let v = s.v_max * k as f64 / (s.n_points - 1) as f64;
        let eps = s.noise * rng.gaussian();
        let i = match s.v_breakdown {
            Some(vb) if v >= vb => v / s.r_short,
            _ => simmons_current(v, s.d, s.phi, s.area)? * (1.0 + eps),
        };
        points.push(IvPoint { v, i });
    }
    IvTrace::new(points)
}
