//! Depinning phase boundaries for junction tuning.
//!
//! The running/pinned boundary is
//!
//! ```text
//! T = T_P · (V_th / V) · (1 − V / V_th)^(1/μ)
//! ```
//!
//! and the creep boundary under an oscillating drive at angular frequency
//! `ω₀` is the same curve with `T_P` replaced by `T_P / Λ`, where
//! `Λ = ln(1 / ω₀τ)`. Temperatures are kelvin, voltages volt.

use serde::{Deserialize, Serialize};

use crate::error::{domain, precondition, Error, Result};
use crate::lsq::least_squares_fit;

/// Parameters of the depinning boundary and the creep correction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DepinningParams {
    /// Depinning temperature, K.
    #[serde(rename = "t_p_K")]
    pub t_p: f64,
    /// Zero-temperature threshold voltage, V.
    #[serde(rename = "v_th_V")]
    pub v_th: f64,
    /// Dimensionality exponent μ.
    pub mu: f64,
    /// Characteristic hop timescale τ, s.
    #[serde(rename = "tau_s")]
    pub tau: f64,
}

impl DepinningParams {
    pub const DEFAULT_MU: f64 = 1.0;

    pub fn new(t_p: f64, v_th: f64, mu: f64, tau: f64) -> Result<Self> {
        let p = Self { t_p, v_th, mu, tau };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !(ok(self.t_p) && ok(self.v_th) && ok(self.mu) && ok(self.tau)) {
            return Err(domain(format!(
                "depinning parameters must be finite and positive, got {self:?}"
            )));
        }
        Ok(())
    }

    /// Same boundary with `T_P` divided by `lambda`.
    fn with_reduced_tp(&self, lambda: f64) -> Self {
        Self {
            t_p: self.t_p / lambda,
            ..*self
        }
    }
}

/// Operating regime of a (V, T, ω₀) point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    Pinned,
    Creep,
    Running,
}

/// Straight-line fit `T = slope · V + intercept_t` to a regime boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryLine {
    #[serde(rename = "slope_K_per_V")]
    pub slope: f64,
    #[serde(rename = "intercept_K")]
    pub intercept_t: f64,
    #[serde(rename = "f_drive_Hz")]
    pub frequency: f64,
}

impl BoundaryLine {
    pub fn temperature_at(&self, v: f64) -> f64 {
        self.slope * v + self.intercept_t
    }
}

fn boundary_temperature(v: f64, t_p: f64, v_th: f64, mu: f64) -> f64 {
    t_p * (v_th / v) * (1.0 - v / v_th).powf(1.0 / mu)
}

/// Running-boundary temperature at voltage `v`. Zero at `v = V_th`.
pub fn depinning_temperature(v: f64, p: &DepinningParams) -> Result<f64> {
    if !(v > 0.0 && v <= p.v_th) {
        return Err(domain(format!("voltage {v} V outside (0, {}] V", p.v_th)));
    }
    Ok(boundary_temperature(v, p.t_p, p.v_th, p.mu))
}

const BISECT_MAX_ITER: usize = 200;
const BISECT_REL_TOL: f64 = 1e-12;

/// Inverse of [`depinning_temperature`]: the depinning voltage `V_P(T)`.
///
/// Closed form for μ = 1; otherwise bisection on `(1e-12·V_th, V_th]`,
/// which always brackets because `T(V)` is strictly decreasing.
pub fn depinning_voltage(t: f64, p: &DepinningParams) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(domain(format!("temperature {t} K must be finite and non-negative")));
    }
    if t == 0.0 {
        return Ok(p.v_th);
    }
    if p.mu == 1.0 {
        return Ok(p.v_th / (1.0 + t / p.t_p));
    }
    let mut lo = 1e-12 * p.v_th;
    let mut hi = p.v_th;
    if boundary_temperature(lo, p.t_p, p.v_th, p.mu) < t {
        return Err(domain(format!("temperature {t} K beyond the bracketed range")));
    }
    for _ in 0..BISECT_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if boundary_temperature(mid, p.t_p, p.v_th, p.mu) > t {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= BISECT_REL_TOL * lo {
            return Ok(0.5 * (lo + hi));
        }
    }
    Err(Error::NonConvergence(format!(
        "depinning voltage bisection exceeded {BISECT_MAX_ITER} iterations at T = {t} K"
    )))
}

/// Adiabatic creep factor `Λ = ln(1 / ω₀τ)`; requires `ω₀τ < 1`.
pub fn lambda_factor(omega0: f64, tau: f64) -> Result<f64> {
    if !(omega0 > 0.0 && tau > 0.0) {
        return Err(domain(format!("omega0 = {omega0}, tau = {tau} must both be positive")));
    }
    let x = omega0 * tau;
    if x >= 1.0 {
        return Err(domain(format!("omega0·tau = {x} ≥ 1: outside the adiabatic limit")));
    }
    // -ln(ω₀) - ln(τ) avoids underflow of the product for very small τ.
    Ok(-(omega0.ln() + tau.ln()))
}

/// Creep-boundary temperature `V_ω(T)` evaluated at `v` (T_P → T_P/Λ).
pub fn creep_temperature(v: f64, p: &DepinningParams, omega0: f64) -> Result<f64> {
    let lambda = lambda_factor(omega0, p.tau)?;
    depinning_temperature(v, &p.with_reduced_tp(lambda))
}

/// Classifies a point; `omega0 <= 0` denotes DC drive (no creep band).
/// Points on a boundary go to the more mobile regime.
pub fn classify_point(v: f64, t: f64, omega0: f64, p: &DepinningParams) -> Result<Regime> {
    if !(v > 0.0) {
        return Err(domain(format!("voltage {v} V must be positive")));
    }
    if !(t >= 0.0) {
        return Err(domain(format!("temperature {t} K must be non-negative")));
    }
    if v > p.v_th || t >= depinning_temperature(v, p)? {
        return Ok(Regime::Running);
    }
    if omega0 > 0.0 && t >= creep_temperature(v, p, omega0)? {
        return Ok(Regime::Creep);
    }
    Ok(Regime::Pinned)
}

/// Fits `(T_P, V_th)` of the running boundary to DC breakdown points
/// `(T [K], V_BD [V])` at fixed μ, minimizing temperature residuals.
///
/// The returned `tau` is NaN: breakdown data does not constrain it.
pub fn fit_depinning_boundary(points: &[(f64, f64)], mu: f64) -> Result<DepinningParams> {
    if points.len() < 3 {
        return Err(precondition(format!(
            "need at least 3 breakdown points, got {}",
            points.len()
        )));
    }
    if !(mu > 0.0) {
        return Err(domain(format!("mu = {mu} must be positive")));
    }
    if points.iter().any(|&(t, v)| !(v > 0.0) || !(t >= 0.0)) {
        return Err(precondition("breakdown points need V_BD > 0 and T ≥ 0"));
    }
    let v_max = points.iter().map(|p| p.1).fold(0.0, f64::max);
    let t_max = points.iter().map(|p| p.0).fold(0.0, f64::max);
    let t_p0 = if t_max > 0.0 { t_max } else { 1.0 };
    let v_th0 = 1.05 * v_max;

    // Parameters in log space keep both positive; past V_th the factor
    // (1 − V/V_th)^(1/μ) is continued as a signed power so the residuals
    // stay finite while the optimizer moves V_th through the data.
    let residuals = |q: &[f64]| -> Vec<f64> {
        let t_p = q[0].exp();
        let v_th = q[1].exp();
        points
            .iter()
            .map(|&(t, v)| {
                let u = 1.0 - v / v_th;
                let model = t_p * (v_th / v) * u.signum() * u.abs().powf(1.0 / mu);
                model - t
            })
            .collect()
    };
    let rep = least_squares_fit(residuals, &[t_p0.ln(), v_th0.ln()])?;
    let t_p = rep.params[0].exp();
    let v_th = rep.params[1].exp();
    if !rep.converged {
        return Err(Error::NonConvergence(format!(
            "boundary fit stopped after {} iterations (T_P = {t_p} K, V_th = {v_th} V)",
            rep.iterations
        )));
    }
    if v_th <= v_max {
        return Err(Error::Degenerate(format!(
            "fitted V_th = {v_th} V does not exceed max V_BD = {v_max} V"
        )));
    }
    Ok(DepinningParams {
        t_p,
        v_th,
        mu,
        tau: f64::NAN,
    })
}

/// τ implied by creep-boundary intercepts at two drive frequencies.
///
/// Solves `ln(2π f_high τ) / ln(2π f_low τ) = intercept_low / intercept_high`,
/// i.e. the ratio of the two creep temperatures with all other factors of
/// the boundary taken as unity.
pub fn estimate_tau(f_low: f64, f_high: f64, intercept_low: f64, intercept_high: f64) -> Result<f64> {
    if !(f_low > 0.0 && f_low < f_high) {
        return Err(precondition(format!("need 0 < f_low < f_high, got {f_low}, {f_high}")));
    }
    if !(intercept_low > 0.0 && intercept_high > 0.0) {
        return Err(precondition("intercepts must be positive kelvin values"));
    }
    let r = intercept_low / intercept_high;
    if r == 1.0 {
        return Err(Error::Degenerate("equal intercepts leave τ unconstrained".into()));
    }
    let ln_w_low = (2.0 * std::f64::consts::PI * f_low).ln();
    let ln_w_high = (2.0 * std::f64::consts::PI * f_high).ln();
    let ln_tau = (r * ln_w_low - ln_w_high) / (1.0 - r);
    if ln_w_high + ln_tau >= 0.0 {
        return Err(domain(format!(
            "τ = {:e} s gives 2π·f_high·τ ≥ 1, outside adiabatic validity",
            ln_tau.exp()
        )));
    }
    Ok(ln_tau.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, PI};

    fn params(mu: f64) -> DepinningParams {
        DepinningParams::new(450.0, 1.3, mu, 1e-5).unwrap()
    }

    #[test]
    fn temperature_anchors() {
        let p = params(1.0);
        assert_eq!(depinning_temperature(p.v_th, &p).unwrap(), 0.0);
        assert!((depinning_temperature(p.v_th / 2.0, &p).unwrap() - p.t_p).abs() < 1e-12 * p.t_p);
        assert!(
            (depinning_temperature(p.v_th / 4.0, &p).unwrap() - 3.0 * p.t_p).abs() < 1e-12 * p.t_p
        );
    }

    #[test]
    fn temperature_domain_errors() {
        let p = params(1.0);
        assert!(matches!(depinning_temperature(0.0, &p), Err(Error::Domain(_))));
        assert!(matches!(depinning_temperature(-1.0, &p), Err(Error::Domain(_))));
        assert!(matches!(depinning_temperature(1.31, &p), Err(Error::Domain(_))));
    }

    #[test]
    fn voltage_anchors() {
        let p = params(1.0);
        assert_eq!(depinning_voltage(0.0, &p).unwrap(), p.v_th);
        assert!((depinning_voltage(p.t_p, &p).unwrap() - p.v_th / 2.0).abs() < 1e-15);
        assert!(depinning_voltage(-1.0, &p).is_err());
    }

    #[test]
    fn voltage_mu_two_matches_golden_ratio() {
        // At T = T_P, μ = 2: (1 − x)^(1/2) = x with x = V/V_th, so x = (√5 − 1)/2.
        let p = params(2.0);
        let x = (5f64.sqrt() - 1.0) / 2.0;
        let v = depinning_voltage(p.t_p, &p).unwrap();
        assert!((v / (x * p.v_th) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn lambda_anchors() {
        assert!((lambda_factor(1.0, (-1.0f64).exp()).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(lambda_factor(1.0, 1.0), Err(Error::Domain(_))));
        assert!(lambda_factor(2.0, 1.0).is_err());
        let l = lambda_factor(2.0 * PI * 1000.0, 3e-36).unwrap();
        assert!((l - 73.0488187137).abs() < 1e-8, "{l}");
    }

    #[test]
    fn creep_scales_with_lambda() {
        let p = DepinningParams::new(450.0, 1.3, 1.0, 1.0 / E).unwrap();
        let v = 0.7;
        // ω₀τ = e⁻¹ → Λ = 1
        let same = creep_temperature(v, &p, 1.0).unwrap();
        assert!((same - depinning_temperature(v, &p).unwrap()).abs() < 1e-12);
        // ω₀τ = e⁻² → Λ = 2
        let half = creep_temperature(v, &p, (-1.0f64).exp()).unwrap();
        assert!((half - 0.5 * depinning_temperature(v, &p).unwrap()).abs() < 1e-12);
        assert_eq!(creep_temperature(p.v_th, &p, 0.1).unwrap(), 0.0);
    }

    #[test]
    fn classification_examples() {
        let p = DepinningParams::new(400.0, 1.3, 1.0, (-2.0f64).exp()).unwrap();
        assert_eq!(classify_point(1.01 * p.v_th, 0.0, 1.0, &p).unwrap(), Regime::Running);
        assert_eq!(classify_point(1.01 * p.v_th, 500.0, 0.0, &p).unwrap(), Regime::Running);
        assert_eq!(classify_point(0.65, 399.0, 0.0, &p).unwrap(), Regime::Pinned);
        // Λ = 2 at ω₀ = 1; creep boundary 0.5·T_P and running boundary T_P at V_th/2.
        let v = p.v_th / 2.0;
        assert_eq!(classify_point(v, 0.75 * p.t_p, 1.0, &p).unwrap(), Regime::Creep);
        assert_eq!(classify_point(v, 0.25 * p.t_p, 1.0, &p).unwrap(), Regime::Pinned);
        assert_eq!(classify_point(v, p.t_p, 1.0, &p).unwrap(), Regime::Running);
        assert_eq!(classify_point(v, 0.5 * p.t_p, 1.0, &p).unwrap(), Regime::Creep);
    }

    #[test]
    fn boundary_fit_round_trip() {
        let truth = DepinningParams::new(450.0, 1.3, 1.0, 1.0).unwrap();
        let pts: Vec<(f64, f64)> = (0..12)
            .map(|i| {
                let v = 0.55 + 0.06 * i as f64;
                (depinning_temperature(v, &truth).unwrap(), v)
            })
            .collect();
        let fit = fit_depinning_boundary(&pts, 1.0).unwrap();
        assert!((fit.t_p / 450.0 - 1.0).abs() < 1e-3, "{fit:?}");
        assert!((fit.v_th / 1.3 - 1.0).abs() < 1e-3, "{fit:?}");
        assert!(fit.tau.is_nan());
    }

    #[test]
    fn boundary_fit_needs_three_points() {
        let err = fit_depinning_boundary(&[(300.0, 1.0), (350.0, 0.9)], 1.0).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn tau_from_supplement_intercepts() {
        let tau = estimate_tau(103.0, 1000.0, 424.95, 437.95).unwrap();
        // Independent high-precision evaluation of the closed form.
        assert!((tau / 8.570136106e-37 - 1.0).abs() < 1e-6, "{tau:e}");
        assert!(tau > 3e-37 && tau < 3e-35);
    }

    #[test]
    fn tau_degenerate_and_invalid() {
        assert!(matches!(estimate_tau(103.0, 1000.0, 430.0, 430.0), Err(Error::Degenerate(_))));
        assert!(estimate_tau(1000.0, 103.0, 424.0, 437.0).is_err());
        assert!(estimate_tau(103.0, 1000.0, -1.0, 437.0).is_err());
        // r > 1 pushes τ far out of the adiabatic window.
        assert!(matches!(estimate_tau(103.0, 1000.0, 450.0, 437.95), Err(Error::Domain(_))));
    }

    #[test]
    fn tau_inverts_forward_ratio() {
        let (fl, fh) = (103.0, 1000.0);
        let tau0: f64 = 1e-30;
        // Forward: r = ln(ω_h τ)/ln(ω_l τ) = 0.96369254492991816 (mpmath, 50 digits).
        let r = (2.0 * PI * fh * tau0).ln() / (2.0 * PI * fl * tau0).ln();
        assert!((r - 0.963_692_544_929_918_2).abs() < 1e-15);
        let tau = estimate_tau(fl, fh, r * 400.0, 400.0).unwrap();
        assert!((tau / tau0 - 1.0).abs() < 1e-3);
    }
}
