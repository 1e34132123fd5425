//! Room-temperature electrical characterization of tunnel junctions.
//!
//! Covers the potential-divider readout used during tuning, the RC cutoff of
//! the cabling, ohmic and Simmons fits to DC IV sweeps, breakdown detection,
//! and breakdown voltage as the weakest site of a barrier map.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::constants::{ev_to_joule, ELECTRON_MASS, ELEMENTARY_CHARGE, PLANCK};
use crate::error::{domain, precondition, Error, Result};
use crate::lsq::least_squares_fit;

/// Default ohmic window, V.
pub const DEFAULT_OHMIC_WINDOW: f64 = 0.05;
/// Default current ratio between consecutive samples that marks breakdown.
pub const DEFAULT_JUMP_FACTOR: f64 = 5.0;
/// Breakdown jumps below this bias are ignored, V.
pub const BREAKDOWN_GUARD_V: f64 = 0.2;
/// Floor on the denominator of the jump ratio, A.
pub const CURRENT_FLOOR_A: f64 = 1e-12;
/// Condition number of the relative Simmons Jacobian above which a fit is
/// reported as ill-conditioned.
pub const SIMMONS_CONDITION_LIMIT: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IvPoint {
    #[serde(rename = "v_V")]
    pub v: f64,
    #[serde(rename = "i_A")]
    pub i: f64,
}

/// A DC sweep starting at 0 V with strictly increasing bias.
#[derive(Debug, Clone, PartialEq)]
pub struct IvTrace {
    points: Vec<IvPoint>,
}

impl IvTrace {
    pub fn new(points: Vec<IvPoint>) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::Format("IV trace has no points".into()))?;
        if first.v.abs() > 1e-3 {
            return Err(Error::Format(format!("sweep starts at {} V, not 0 V", first.v)));
        }
        if points.iter().any(|p| !p.v.is_finite() || !p.i.is_finite()) {
            return Err(Error::Format("IV trace contains non-finite values".into()));
        }
        if points.windows(2).any(|w| w[1].v <= w[0].v) {
            return Err(Error::Format("sweep voltage must be strictly increasing".into()));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[IvPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn max_voltage(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.v)
    }

    /// The part of the sweep strictly below `v`.
    pub fn truncated_below(&self, v: f64) -> Result<Self> {
        Self::new(self.points.iter().copied().filter(|p| p.v < v).collect())
    }
}

/// Junction resistance from the junction-side voltage of a divider.
pub fn divider_resistance(v_source: f64, v_junction: f64, r_load: f64) -> Result<f64> {
    if !(r_load > 0.0) {
        return Err(domain(format!("load resistance {r_load} Ω must be positive")));
    }
    if !(v_junction > 0.0 && v_junction < v_source) {
        return Err(domain(format!(
            "junction voltage {v_junction} V must lie in (0, {v_source}) V"
        )));
    }
    Ok(r_load * v_junction / (v_source - v_junction))
}

/// Junction resistance from the load-side voltage of a divider.
pub fn divider_resistance_from_load(v_source: f64, v_load: f64, r_load: f64) -> Result<f64> {
    if !(r_load > 0.0) {
        return Err(domain(format!("load resistance {r_load} Ω must be positive")));
    }
    if !(v_load > 0.0 && v_load < v_source) {
        return Err(domain(format!("load voltage {v_load} V must lie in (0, {v_source}) V")));
    }
    Ok(r_load * (v_source - v_load) / v_load)
}

/// First-order RC cutoff `1 / (2π·R·C)`, Hz.
pub fn rc_cutoff(r_series: f64, c: f64) -> Result<f64> {
    if !(r_series > 0.0 && c > 0.0) {
        return Err(domain("series resistance and capacitance must be positive"));
    }
    Ok(1.0 / (2.0 * PI * r_series * c))
}

/// Resistance from a zero-intercept line through the points with `v ≤ v_window`.
/// A window beyond the sweep simply uses every point.
pub fn ohmic_fit(trace: &IvTrace, v_window: f64) -> Result<f64> {
    let window: Vec<&IvPoint> = trace.points.iter().filter(|p| p.v <= v_window).collect();
    if window.len() < 4 {
        return Err(precondition(format!(
            "{} points at or below {v_window} V; need at least 4",
            window.len()
        )));
    }
    let svi: f64 = window.iter().map(|p| p.v * p.i).sum();
    let svv: f64 = window.iter().map(|p| p.v * p.v).sum();
    if svi <= 0.0 {
        return Err(Error::Degenerate("non-positive conductance in ohmic window".into()));
    }
    Ok(svv / svi)
}

struct Barrier {
    /// e/(2πh·d²)
    prefactor: f64,
    /// (4π·d/h)·√(2mₑ), 1/√J
    a: f64,
    /// Mean barrier height φ − |v|/2, J.
    phi_bar: f64,
    /// e·|v|, J.
    ev: f64,
}

fn barrier(v: f64, d: f64, phi: f64) -> Result<Barrier> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(domain(format!("barrier thickness {d} m must be positive")));
    }
    if !(phi > 0.0 && phi.is_finite()) {
        return Err(domain(format!("barrier height {phi} eV must be positive")));
    }
    let bias = v.abs();
    if !(bias < 2.0 * phi) {
        return Err(domain(format!(
            "|v| = {bias} V outside intermediate-voltage validity (< {} V)",
            2.0 * phi
        )));
    }
    Ok(Barrier {
        prefactor: ELEMENTARY_CHARGE / (2.0 * PI * PLANCK * d * d),
        a: 4.0 * PI * d / PLANCK * (2.0 * ELECTRON_MASS).sqrt(),
        phi_bar: ev_to_joule(phi - bias / 2.0),
        ev: ev_to_joule(bias),
    })
}

/// Simmons intermediate-voltage current through a symmetric rectangular
/// barrier (β = 1), A. `d` in metres, `phi` in eV, `area` in m².
pub fn simmons_current(v: f64, d: f64, phi: f64, area: f64) -> Result<f64> {
    if !(area > 0.0) {
        return Err(domain(format!("area {area} m² must be positive")));
    }
    let b = barrier(v, d, phi)?;
    let low = b.phi_bar * (-b.a * b.phi_bar.sqrt()).exp();
    let high = (b.phi_bar + b.ev) * (-b.a * (b.phi_bar + b.ev).sqrt()).exp();
    Ok(v.signum() * b.prefactor * (low - high) * area)
}

/// `ln J` (A/m²) for `v > 0`, evaluated without forming the tiny exponentials.
fn simmons_ln_density(v: f64, d: f64, phi: f64) -> Result<f64> {
    let b = barrier(v, d, phi)?;
    let root_low = b.phi_bar.sqrt();
    let root_high = (b.phi_bar + b.ev).sqrt();
    let ratio = (b.phi_bar + b.ev) / b.phi_bar * (-b.a * (root_high - root_low)).exp();
    Ok(b.prefactor.ln() + b.phi_bar.ln() - b.a * root_low + (-ratio).ln_1p())
}

/// Zero-bias conductance of the Simmons model, S.
pub fn simmons_zero_bias_conductance(d: f64, phi: f64, area: f64) -> Result<f64> {
    let b = barrier(0.0, d, phi)?;
    let root = b.phi_bar.sqrt();
    Ok(b.prefactor * ELEMENTARY_CHARGE * (-b.a * root).exp() * (b.a * root / 2.0 - 1.0) * area)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimmonsFit {
    /// Barrier thickness, m.
    #[serde(rename = "d_m")]
    pub d: f64,
    /// Barrier height, eV.
    #[serde(rename = "phi_eV")]
    pub phi: f64,
    #[serde(rename = "area_m2")]
    pub area: f64,
    /// Residual sum of squares in ln-current.
    pub rss: f64,
    pub converged: bool,
    /// Condition number of ∂ln I/∂(ln d, ln φ) at the solution.
    pub condition_number: f64,
    pub ill_conditioned: bool,
    /// Result lies outside [0.5, 5] nm × [0.5, 5] eV.
    pub suspect: bool,
}

const SIMMONS_D0_NM: f64 = 1.5;
const SIMMONS_PHI0_EV: f64 = 2.0;

/// Fits barrier thickness and height with the junction area held fixed.
///
/// Residuals are differences of ln|i| over points with `v > 0` and `i > 0`,
/// so every decade of current counts equally. The trace must already be cut
/// below breakdown. Internally `d = exp(u)` nm and
/// `φ = v_max/2 + exp(s)` eV, which keeps every trial inside the model's
/// validity range.
pub fn fit_simmons(trace: &IvTrace, area: f64) -> Result<SimmonsFit> {
    if !(area > 0.0) {
        return Err(domain(format!("area {area} m² must be positive")));
    }
    let data: Vec<(f64, f64)> = trace
        .points
        .iter()
        .filter(|p| p.v > 0.0 && p.i > 0.0)
        .map(|p| (p.v, p.i.ln()))
        .collect();
    if data.len() < 3 {
        return Err(precondition("need at least 3 points with positive bias and current"));
    }
    let ln_area = area.ln();
    let v_max = data.iter().map(|p| p.0).fold(0.0, f64::max);
    let phi_floor = 0.5 * v_max * (1.0 + 1e-9);

    let unpack = |q: &[f64]| (q[0].exp() * 1e-9, phi_floor + q[1].exp());
    let model_ln_i = |d: f64, phi: f64, v: f64| {
        simmons_ln_density(v, d, phi).map_or(f64::NAN, |ln_j| ln_j + ln_area)
    };
    let residuals = |q: &[f64]| -> Vec<f64> {
        let (d, phi) = unpack(q);
        data.iter().map(|&(v, ln_i)| model_ln_i(d, phi, v) - ln_i).collect()
    };
    let phi0 = if SIMMONS_PHI0_EV > phi_floor {
        SIMMONS_PHI0_EV
    } else {
        phi_floor + 1.0
    };
    let init = [SIMMONS_D0_NM.ln(), (phi0 - phi_floor).ln()];
    let rep = least_squares_fit(residuals, &init)?;
    let (d, phi) = unpack(&rep.params);

    // Relative sensitivities, independent of the internal parametrization.
    let h = 1e-6;
    let mut jac = DMatrix::zeros(data.len(), 2);
    for (row, &(v, _)) in data.iter().enumerate() {
        let base = model_ln_i(d, phi, v);
        jac[(row, 0)] = (model_ln_i(d * (1.0 + h), phi, v) - base) / h;
        jac[(row, 1)] = (model_ln_i(d, phi * (1.0 + h), v) - base) / h;
    }
    let sv = jac.singular_values();
    let condition_number = if sv.min() > 0.0 {
        sv.max() / sv.min()
    } else {
        f64::INFINITY
    };
    let d_nm = d * 1e9;
    Ok(SimmonsFit {
        d,
        phi,
        area,
        rss: rep.rss,
        converged: rep.converged,
        condition_number,
        ill_conditioned: !(condition_number < SIMMONS_CONDITION_LIMIT),
        suspect: !((0.5..=5.0).contains(&d_nm) && (0.5..=5.0).contains(&phi)),
    })
}

/// Bias at which the current first jumps by more than `jump_factor`
/// between consecutive samples, ignoring jumps that start below 0.2 V.
pub fn detect_breakdown(trace: &IvTrace, jump_factor: f64) -> Result<Option<f64>> {
    if !(jump_factor > 1.0) {
        return Err(precondition(format!("jump factor {jump_factor} must exceed 1")));
    }
    Ok(trace
        .points
        .windows(2)
        .find(|w| w[0].v > BREAKDOWN_GUARD_V && w[1].i / w[0].i.max(CURRENT_FLOOR_A) > jump_factor)
        .map(|w| w[1].v))
}

/// Local barrier thickness (m) and dielectric strength (V/m) maps.
#[derive(Debug, Clone, PartialEq)]
pub struct BarrierMaps {
    thickness: DMatrix<f64>,
    strength: DMatrix<f64>,
}

impl BarrierMaps {
    pub fn new(thickness: DMatrix<f64>, strength: DMatrix<f64>) -> Result<Self> {
        if thickness.is_empty() || strength.is_empty() {
            return Err(precondition("barrier maps are empty"));
        }
        if thickness.shape() != strength.shape() {
            return Err(precondition(format!(
                "map shapes differ: {:?} vs {:?}",
                thickness.shape(),
                strength.shape()
            )));
        }
        if thickness.iter().chain(strength.iter()).any(|x| !(*x > 0.0 && x.is_finite())) {
            return Err(domain("map entries must be finite and positive"));
        }
        Ok(Self {
            thickness,
            strength,
        })
    }

    pub fn thickness(&self) -> &DMatrix<f64> {
        &self.thickness
    }

    pub fn strength(&self) -> &DMatrix<f64> {
        &self.strength
    }
}

/// Breakdown voltage of the weakest site, `min t(x,y)·E_BD(x,y)`, V.
pub fn breakdown_from_maps(maps: &BarrierMaps) -> f64 {
    maps.thickness
        .iter()
        .zip(maps.strength.iter())
        .map(|(t, e)| t * e)
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    const PAPER_AREA: f64 = 8.86e4 * 1e-18;

    fn simmons_trace(d: f64, phi: f64, v_max: f64, step: f64) -> IvTrace {
        let n = (v_max / step).round() as usize;
        let pts = (0..=n)
            .map(|k| {
                let v = k as f64 * step;
                IvPoint {
                    v,
                    i: simmons_current(v, d, phi, PAPER_AREA).unwrap(),
                }
            })
            .collect();
        IvTrace::new(pts).unwrap()
    }

    #[test]
    fn divider_examples() {
        assert!((divider_resistance(1.0, 0.5, 10e3).unwrap() - 10e3).abs() < 1e-9);
        assert!((divider_resistance(1.5, 0.5, 10e3).unwrap() - 5e3).abs() < 1e-9);
        assert!(divider_resistance(1.0, 1.0, 10e3).is_err());
        assert!(divider_resistance(1.0, 1.2, 10e3).is_err());
        assert!((divider_resistance_from_load(1.5, 1.0, 10e3).unwrap() - 5e3).abs() < 1e-9);
    }

    #[test]
    fn rc_examples() {
        let f = rc_cutoff(15e3, 3.0 * 80e-12).unwrap();
        assert!((f - 44_209.706).abs() < 1e-2, "{f}");
        assert!((rc_cutoff(15e3, 480e-12).unwrap() - f / 2.0).abs() < 1e-9);
        assert!((rc_cutoff(1.0, 1.0 / (2.0 * PI)).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ohmic_examples() {
        let pts = (0..=20)
            .map(|k| {
                let v = k as f64 * 0.01;
                IvPoint { v, i: v / 5000.0 }
            })
            .collect();
        let tr = IvTrace::new(pts).unwrap();
        assert!((ohmic_fit(&tr, 0.05).unwrap() - 5000.0).abs() < 1e-9);
        assert!((ohmic_fit(&tr, 10.0).unwrap() - 5000.0).abs() < 1e-9);
        assert!(ohmic_fit(&tr, 0.02).is_err());
    }

    #[test]
    fn simmons_zero_and_odd() {
        assert_eq!(simmons_current(0.0, 1.5e-9, 2.0, PAPER_AREA).unwrap(), 0.0);
        for v in [0.01, 0.3, 0.9, 1.7, 3.5] {
            let pos = simmons_current(v, 1.5e-9, 2.0, PAPER_AREA).unwrap();
            let neg = simmons_current(-v, 1.5e-9, 2.0, PAPER_AREA).unwrap();
            assert_eq!(pos, -neg);
        }
    }

    #[test]
    fn simmons_high_precision_value() {
        // 50-digit mpmath evaluation of the same expression and constants.
        let i = simmons_current(0.5, 1.5e-9, 2.0, PAPER_AREA).unwrap();
        let reference = 5.752_850_824_918_525e-10;
        assert!((i / reference - 1.0).abs() < 1e-10, "{i:e}");
    }

    #[test]
    fn simmons_validity_and_domain() {
        assert!(simmons_current(4.0, 1.5e-9, 2.0, PAPER_AREA).is_err());
        assert!(simmons_current(0.1, 0.0, 2.0, PAPER_AREA).is_err());
        assert!(simmons_current(0.1, 1.5e-9, -1.0, PAPER_AREA).is_err());
    }

    #[test]
    fn log_density_matches_direct_formula() {
        for v in [0.01, 0.2, 0.8, 1.5] {
            let direct = simmons_current(v, 1.2e-9, 1.3, 1.0).unwrap();
            let via_log = simmons_ln_density(v, 1.2e-9, 1.3).unwrap().exp();
            assert!((via_log / direct - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_bias_conductance_matches_slope() {
        let (d, phi) = (1.8e-9, 1.6);
        let g = simmons_zero_bias_conductance(d, phi, PAPER_AREA).unwrap();
        let dv = 1e-4;
        let slope = simmons_current(dv, d, phi, PAPER_AREA).unwrap() / dv;
        assert!((slope / g - 1.0).abs() < 1e-6);
        // mpmath value
        assert!((g / 1.327_544_748_429_98e-10 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn simmons_fit_round_trip() {
        let tr = simmons_trace(1.8e-9, 1.6, 1.5, 0.01);
        let fit = fit_simmons(&tr, PAPER_AREA).unwrap();
        assert!((fit.d / 1.8e-9 - 1.0).abs() < 1e-3, "{fit:?}");
        assert!((fit.phi / 1.6 - 1.0).abs() < 1e-3, "{fit:?}");
        assert!(!fit.suspect);
        assert!(!fit.ill_conditioned, "{fit:?}");
    }

    #[test]
    fn simmons_fit_small_bias_is_ill_conditioned() {
        let tr = simmons_trace(1.8e-9, 1.6, 0.05, 0.001);
        let fit = fit_simmons(&tr, PAPER_AREA).unwrap();
        assert!(fit.ill_conditioned, "{fit:?}");
    }

    #[test]
    fn breakdown_detection() {
        let smooth = simmons_trace(1.0e-9, 1.1, 1.6, 0.01);
        assert_eq!(detect_breakdown(&smooth, 5.0).unwrap(), None);

        let pts: Vec<IvPoint> = (0..=160)
            .map(|k| {
                let v = k as f64 * 0.01;
                let i = v / 5000.0 * if v >= 1.25 - 1e-9 { 100.0 } else { 1.0 };
                IvPoint { v, i }
            })
            .collect();
        let stepped = IvTrace::new(pts).unwrap();
        let vbd = detect_breakdown(&stepped, 5.0).unwrap().unwrap();
        assert!((vbd - 1.25).abs() < 1e-9);
        assert!(detect_breakdown(&stepped, 1.0).is_err());
    }

    #[test]
    fn map_examples() {
        let uniform = BarrierMaps::new(
            DMatrix::from_element(4, 4, 2e-9),
            DMatrix::from_element(4, 4, 0.5e9),
        )
        .unwrap();
        assert!((breakdown_from_maps(&uniform) - 1.0).abs() < 1e-12);

        let mut t = DMatrix::from_element(3, 3, 2e-9);
        t[(1, 2)] = 1e-9;
        let thin = BarrierMaps::new(t, DMatrix::from_element(3, 3, 0.6e9)).unwrap();
        assert!((breakdown_from_maps(&thin) - 0.6).abs() < 1e-12);

        let single = BarrierMaps::new(
            DMatrix::from_element(1, 1, 1.7e-9),
            DMatrix::from_element(1, 1, 0.7e9),
        )
        .unwrap();
        assert_eq!(breakdown_from_maps(&single), 1.7e-9 * 0.7e9);

        assert!(BarrierMaps::new(DMatrix::zeros(0, 0), DMatrix::zeros(0, 0)).is_err());
        assert!(BarrierMaps::new(
            DMatrix::from_element(2, 2, 1e-9),
            DMatrix::from_element(2, 3, 1e9)
        )
        .is_err());
    }

    #[test]
    fn trace_validation() {
        assert!(IvTrace::new(vec![IvPoint { v: 0.1, i: 0.0 }]).is_err());
        assert!(IvTrace::new(vec![IvPoint { v: 0.0, i: 0.0 }, IvPoint { v: 0.0, i: 1.0 }]).is_err());
        assert!(IvTrace::new(vec![]).is_err());
    }
}
