//! Tuning-curve models: the logarithmic law `r = a·ln(c·t)` and the power
//! law `r = a·tⁿ + 1`, plus in-run failure detection.
//!
//! `r` is the fractional resistance R(t)/R₀ and `t` is seconds since the
//! start of the run. The logarithm is natural; a base change would only
//! rescale `a` and `c`.

use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};
use crate::lsq::least_squares_fit;

/// Minimum number of usable samples for either fit.
pub const MIN_FIT_SAMPLES: usize = 8;

/// Default collapse threshold, as a fraction of R₀, for [`detect_failure`].
pub const DEFAULT_COLLAPSE_FRACTION: f64 = 0.1;

/// One resistance reading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    /// Seconds since the start of the run.
    pub t: f64,
    /// Resistance normalised to its value at the start of the run.
    pub r: f64,
}

/// Conditions of a tuning run. Temperatures are kelvin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConditions {
    #[serde(rename = "v_amp_V")]
    pub v_amp: f64,
    #[serde(rename = "t_set_K")]
    pub t_set: f64,
    #[serde(rename = "f_drive_Hz")]
    pub f_drive: f64,
}

/// Fractional resistance against time for one tuning run.
#[derive(Debug, Clone, PartialEq)]
pub struct TuningCurve {
    samples: Vec<Sample>,
    pub conditions: RunConditions,
    pub junction_id: String,
}

impl TuningCurve {
    /// Validates and builds a curve.
    ///
    /// Timestamps must be finite and strictly increasing and the first
    /// reading must lie in `[0, 10]`. Zero is admitted so that a zero-speed
    /// log-law curve (`a = 0`, identically zero) is representable.
    pub fn new(
        samples: Vec<Sample>,
        conditions: RunConditions,
        junction_id: impl Into<String>,
    ) -> Result<Self> {
        let first = samples
            .first()
            .ok_or_else(|| Error::Format("tuning curve has no samples".into()))?;
        if !(0.0..=10.0).contains(&first.r) {
            return Err(Error::Format(format!(
                "first fractional resistance {} outside [0, 10]",
                first.r
            )));
        }
        if samples.iter().any(|s| !s.t.is_finite() || !s.r.is_finite()) {
            return Err(Error::Format("tuning curve contains non-finite values".into()));
        }
        if samples.windows(2).any(|w| w[1].t <= w[0].t) {
            return Err(Error::Format("timestamps must be strictly increasing".into()));
        }
        Ok(Self {
            samples,
            conditions,
            junction_id: junction_id.into(),
        })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Samples with `t > 0`; the rest cannot enter `ln(c·t)`.
    fn fit_samples(&self) -> Result<Vec<Sample>> {
        let kept: Vec<Sample> = self.samples.iter().copied().filter(|s| s.t > 0.0).collect();
        let dropped = self.samples.len() - kept.len();
        if dropped > 0 {
            log::warn!(
                "junction {}: dropped {dropped} samples at t <= 0 before fitting",
                self.junction_id
            );
        }
        if kept.len() < MIN_FIT_SAMPLES {
            return Err(precondition(format!(
                "need at least {MIN_FIT_SAMPLES} samples with t > 0, got {}",
                kept.len()
            )));
        }
        if kept.first().map(|s| s.t) == kept.last().map(|s| s.t) {
            return Err(precondition("all timestamps identical"));
        }
        Ok(kept)
    }
}

/// Result of fitting `r = a·ln(c·t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogFit {
    pub a: f64,
    /// 1/s. NaN when the curve is flat and `c` is unidentifiable.
    #[serde(rename = "c_per_s", deserialize_with = "nan_from_null")]
    pub c: f64,
    pub rss: f64,
    pub converged: bool,
}

// JSON has no NaN; serde_json writes it as null.
fn nan_from_null<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

/// Result of fitting `r = a·tⁿ + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub a: f64,
    pub n: f64,
    pub rss: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Log,
    Power,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelComparison {
    pub log: LogFit,
    pub power: PowerFit,
    pub preferred: Model,
}

struct Regression {
    slope: f64,
    intercept: f64,
    rss: f64,
}

fn linear_regression(xs: &[f64], ys: &[f64]) -> Regression {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (slope * x + intercept - y).powi(2))
        .sum();
    Regression {
        slope,
        intercept,
        rss,
    }
}

/// Fits the logarithmic tuning law. Negative `a` is reported as found.
///
/// The starting point is the regression of `r` on `ln t`; the engine then
/// refines `(a, ln c)`. When the regression slope is negligible the curve is
/// flat, `c` is unidentifiable, and the fit returns `a` from the regression
/// with `c = NaN` and `converged = false`.
pub fn fit_log_model(curve: &TuningCurve) -> Result<LogFit> {
    let samples = curve.fit_samples()?;
    let ln_t: Vec<f64> = samples.iter().map(|s| s.t.ln()).collect();
    let r: Vec<f64> = samples.iter().map(|s| s.r).collect();
    let reg = linear_regression(&ln_t, &r);

    let span = ln_t[ln_t.len() - 1] - ln_t[0];
    let scale = r.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
    if reg.slope.abs() * span <= 1e-12 * scale {
        return Ok(LogFit {
            a: reg.slope,
            c: f64::NAN,
            rss: reg.rss,
            converged: false,
        });
    }

    let residuals = |p: &[f64]| -> Vec<f64> {
        ln_t.iter()
            .zip(&r)
            .map(|(lt, y)| p[0] * (p[1] + lt) - y)
            .collect()
    };
    let init = [reg.slope, reg.intercept / reg.slope];
    let rep = least_squares_fit(residuals, &init)?;
    Ok(LogFit {
        a: rep.params[0],
        c: rep.params[1].exp(),
        rss: rep.rss,
        converged: rep.converged,
    })
}

/// Fits the power law `r = a·tⁿ + 1`, starting from `n = 0.3` and the `a`
/// that joins the first and last samples.
pub fn fit_power_model(curve: &TuningCurve) -> Result<PowerFit> {
    const N0: f64 = 0.3;
    let samples = curve.fit_samples()?;
    let first = samples[0];
    let last = samples[samples.len() - 1];
    let a0 = (last.r - first.r) / (last.t.powf(N0) - first.t.powf(N0));

    let residuals = |p: &[f64]| -> Vec<f64> {
        samples
            .iter()
            .map(|s| p[0] * s.t.powf(p[1]) + 1.0 - s.r)
            .collect()
    };
    let rep = least_squares_fit(residuals, &[a0, N0])?;
    Ok(PowerFit {
        a: rep.params[0],
        n: rep.params[1],
        rss: rep.rss,
        converged: rep.converged,
    })
}

/// Fits both models; the lower rss wins and ties go to the log law.
pub fn compare_models(curve: &TuningCurve) -> Result<ModelComparison> {
    let log = fit_log_model(curve)?;
    let power = fit_power_model(curve)?;
    let preferred = if log.rss <= power.rss {
        Model::Log
    } else {
        Model::Power
    };
    Ok(ModelComparison {
        log,
        power,
        preferred,
    })
}

/// First timestamp at which `r` falls below `collapse_fraction`.
pub fn detect_failure(curve: &TuningCurve, collapse_fraction: f64) -> Result<Option<f64>> {
    if !(collapse_fraction > 0.0 && collapse_fraction < 1.0) {
        return Err(precondition(format!(
            "collapse fraction {collapse_fraction} outside (0, 1)"
        )));
    }
    Ok(curve
        .samples
        .iter()
        .find(|s| s.r < collapse_fraction)
        .map(|s| s.t))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cond() -> RunConditions {
        RunConditions {
            v_amp: 0.95,
            t_set: 353.15,
            f_drive: 81.0,
        }
    }

    fn log_spaced(n: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..n)
            .map(|i| (lo.ln() + (hi / lo).ln() * i as f64 / (n - 1) as f64).exp())
            .collect()
    }

    fn curve_from(ts: &[f64], f: impl Fn(f64) -> f64) -> TuningCurve {
        let samples = ts.iter().map(|&t| Sample { t, r: f(t) }).collect();
        TuningCurve::new(samples, cond(), "J").unwrap()
    }

    #[test]
    fn curve_validation() {
        let bad_order = vec![Sample { t: 2.0, r: 1.0 }, Sample { t: 1.0, r: 1.0 }];
        assert!(TuningCurve::new(bad_order, cond(), "x").is_err());
        let bad_first = vec![Sample { t: 1.0, r: 11.0 }];
        assert!(TuningCurve::new(bad_first, cond(), "x").is_err());
        assert!(TuningCurve::new(vec![], cond(), "x").is_err());
    }

    #[test]
    fn log_fit_noiseless() {
        let ts = log_spaced(200, 1.0, 150.0);
        let fit = fit_log_model(&curve_from(&ts, |t| 0.05 * (2.0 * t).ln())).unwrap();
        assert!((fit.a / 0.05 - 1.0).abs() < 1e-6, "{fit:?}");
        assert!((fit.c / 2.0 - 1.0).abs() < 1e-6, "{fit:?}");
        assert!(fit.converged);
    }

    #[test]
    fn log_fit_flat_curve() {
        let ts = log_spaced(50, 1.0, 150.0);
        let fit = fit_log_model(&curve_from(&ts, |_| 1.0)).unwrap();
        assert!(fit.a.abs() < 1e-9);
        assert!(fit.rss < 1e-20);
        assert!(!fit.converged);
        assert!(fit.c.is_nan());
    }

    #[test]
    fn log_fit_negative_speed_reported() {
        let ts = log_spaced(60, 1.0, 150.0);
        let fit = fit_log_model(&curve_from(&ts, |t| 1.2 - 0.01 * t.ln())).unwrap();
        assert!((fit.a + 0.01).abs() < 1e-9, "{fit:?}");
    }

    #[test]
    fn fits_need_eight_positive_samples() {
        let ts: Vec<f64> = (0..8).map(|i| i as f64).collect(); // t = 0 is dropped
        let curve = curve_from(&ts, |t| 1.0 + 0.01 * t);
        assert!(matches!(fit_log_model(&curve), Err(Error::Precondition(_))));
        assert!(matches!(fit_power_model(&curve), Err(Error::Precondition(_))));
    }

    #[test]
    fn power_fit_noiseless() {
        let ts = log_spaced(200, 1.0, 150.0);
        let fit = fit_power_model(&curve_from(&ts, |t| 0.02 * t.powf(0.4) + 1.0)).unwrap();
        assert!((fit.a / 0.02 - 1.0).abs() < 1e-5, "{fit:?}");
        assert!((fit.n / 0.4 - 1.0).abs() < 1e-5, "{fit:?}");
    }

    #[test]
    fn power_fit_flat_curve() {
        let ts = log_spaced(50, 1.0, 150.0);
        let fit = fit_power_model(&curve_from(&ts, |_| 1.0)).unwrap();
        assert!(fit.a.abs() < 1e-9);
    }

    #[test]
    fn comparison_prefers_generating_model() {
        let ts = log_spaced(120, 1.0, 150.0);
        let log_curve = curve_from(&ts, |t| 0.04 * (3e10 * t).ln());
        assert_eq!(compare_models(&log_curve).unwrap().preferred, Model::Log);
        let pow_curve = curve_from(&ts, |t| 0.03 * t.powf(0.5) + 1.0);
        assert_eq!(compare_models(&pow_curve).unwrap().preferred, Model::Power);
        let flat = curve_from(&ts, |_| 1.0);
        assert_eq!(compare_models(&flat).unwrap().preferred, Model::Log);
    }

    #[test]
    fn failure_detection() {
        let ts: Vec<f64> = (1..=60).map(f64::from).collect();
        let collapse = curve_from(&ts, |t| if t < 37.0 { 1.0 + 0.005 * t } else { 0.001 });
        assert_eq!(detect_failure(&collapse, 0.1).unwrap(), Some(37.0));

        let rising = curve_from(&ts, |t| 1.0 + 0.01 * t);
        assert_eq!(detect_failure(&rising, 0.1).unwrap(), None);

        let dip = curve_from(&ts, |t| if (20.0..25.0).contains(&t) { 0.5 } else { 1.1 });
        assert_eq!(detect_failure(&dip, DEFAULT_COLLAPSE_FRACTION).unwrap(), None);

        assert!(detect_failure(&rising, 0.0).is_err());
        assert!(detect_failure(&rising, 1.0).is_err());
    }
}
