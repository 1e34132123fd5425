//! Joule self-heating of a junction under an oscillating tuning bias.
//!
//! The junction is treated as a linear resistor dissipating the
//! time-averaged power `V²/2R` at a point. The temperature rise of a point
//! source in an infinite solid, `P / (4πkr)`, is volume-averaged over a ball
//! of radius `r_max`, giving `3P / (8πk·r_max)`, and multiplied by a
//! semi-infinite-substrate factor.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatParams {
    /// Substrate thermal conductivity, W/(m·K).
    #[serde(rename = "k_W_per_mK")]
    pub k: f64,
    /// Averaging radius, m.
    #[serde(rename = "r_max_m")]
    pub r_max: f64,
    /// Multiplier for heat flowing into a half-space only.
    pub semi_infinite_factor: f64,
}

impl Default for HeatParams {
    /// Sapphire at room temperature, 100 nm averaging radius, half-space.
    fn default() -> Self {
        Self {
            k: 30.0,
            r_max: 100e-9,
            semi_infinite_factor: 2.0,
        }
    }
}

impl HeatParams {
    pub fn new(k: f64, r_max: f64, semi_infinite_factor: f64) -> Result<Self> {
        let h = Self {
            k,
            r_max,
            semi_infinite_factor,
        };
        h.validate()?;
        Ok(h)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(domain(format!("thermal conductivity {} must be positive", self.k)));
        }
        if !(self.r_max > 0.0 && self.r_max.is_finite()) {
            return Err(domain(format!("averaging radius {} must be positive", self.r_max)));
        }
        if !(self.semi_infinite_factor >= 1.0) {
            return Err(domain(format!(
                "semi-infinite factor {} must be at least 1",
                self.semi_infinite_factor
            )));
        }
        Ok(())
    }
}

/// Time-averaged dissipation `V²/(2R)` for a sinusoid of amplitude `v_amp`.
pub fn heating_power(v_amp: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(domain(format!("resistance {r} Ω must be positive")));
    }
    if !(v_amp >= 0.0) {
        return Err(domain(format!("voltage amplitude {v_amp} V must be non-negative")));
    }
    Ok(v_amp * v_amp / (2.0 * r))
}

/// Mean temperature rise over the averaging ball, K.
pub fn mean_temperature_rise(p: f64, h: &HeatParams) -> Result<f64> {
    h.validate()?;
    if !(p >= 0.0) {
        return Err(domain(format!("power {p} W must be non-negative")));
    }
    Ok(h.semi_infinite_factor * 3.0 * p / (8.0 * PI * h.k * h.r_max))
}

/// Ambient temperature plus the self-heating rise, K.
pub fn effective_temperature(t_ambient: f64, v_amp: f64, r: f64, h: &HeatParams) -> Result<f64> {
    if !(t_ambient > 0.0) {
        return Err(domain(format!("ambient temperature {t_ambient} K must be positive")));
    }
    Ok(t_ambient + mean_temperature_rise(heating_power(v_amp, r)?, h)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Midpoint-rule shell integration of P/(4πkr) over the ball, divided by
    /// its volume, times the half-space factor.
    fn shell_average(p: f64, h: &HeatParams, shells: usize) -> f64 {
        let dr = h.r_max / shells as f64;
        let mut acc = 0.0;
        for i in 0..shells {
            let r = (i as f64 + 0.5) * dr;
            acc += p / (4.0 * PI * h.k * r) * 4.0 * PI * r * r * dr;
        }
        h.semi_infinite_factor * acc / (4.0 / 3.0 * PI * h.r_max.powi(3))
    }

    #[test]
    fn power_examples() {
        assert_eq!(heating_power(1.0, 5000.0).unwrap(), 1.0e-4);
        assert_eq!(heating_power(0.0, 5000.0).unwrap(), 0.0);
        assert_eq!(heating_power(2.0, 10_000.0).unwrap(), 2.0e-4);
        assert!(heating_power(1.0, 0.0).is_err());
        assert!(heating_power(1.0, -5.0).is_err());
    }

    #[test]
    fn rise_matches_point_source_estimate() {
        let h = HeatParams::default();
        let dt = mean_temperature_rise(1e-4, &h).unwrap();
        assert!((dt - 7.957_747_154_594_767).abs() < 1e-12, "{dt}");
        assert_eq!(mean_temperature_rise(0.0, &h).unwrap(), 0.0);
    }

    #[test]
    fn rise_matches_quadrature() {
        let h = HeatParams::default();
        for p in [1e-6, 1e-5, 1e-4, 1e-3, 1e-2] {
            let closed = mean_temperature_rise(p, &h).unwrap();
            let numeric = shell_average(p, &h, 100_000);
            assert!((numeric / closed - 1.0).abs() < 1e-6, "{p}: {numeric} vs {closed}");
        }
    }

    #[test]
    fn scaling_laws() {
        let h = HeatParams::default();
        let base = mean_temperature_rise(1e-4, &h).unwrap();
        assert_eq!(mean_temperature_rise(2e-4, &h).unwrap(), 2.0 * base);
        let k2 = HeatParams { k: 60.0, ..h };
        assert_eq!(mean_temperature_rise(1e-4, &k2).unwrap(), base / 2.0);
        let r2 = HeatParams { r_max: 200e-9, ..h };
        assert_eq!(mean_temperature_rise(1e-4, &r2).unwrap(), base / 2.0);
    }

    #[test]
    fn effective_temperature_examples() {
        let h = HeatParams::default();
        let t = effective_temperature(358.15, 1.0, 5000.0, &h).unwrap();
        assert!((t - 366.107_747_154_594_8).abs() < 1e-9, "{t}");
        assert_eq!(effective_temperature(300.0, 0.0, 5000.0, &h).unwrap(), 300.0);
        let d1 = effective_temperature(300.0, 0.5, 5000.0, &h).unwrap() - 300.0;
        let d2 = effective_temperature(300.0, 1.0, 5000.0, &h).unwrap() - 300.0;
        assert!((d2 / d1 - 4.0).abs() < 1e-12);
        assert!(effective_temperature(0.0, 1.0, 5000.0, &h).is_err());
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(HeatParams::new(0.0, 1e-7, 2.0).is_err());
        assert!(HeatParams::new(30.0, 0.0, 2.0).is_err());
        assert!(HeatParams::new(30.0, 1e-7, 0.5).is_err());
    }
}
