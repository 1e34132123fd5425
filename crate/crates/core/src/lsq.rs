//! Damped Gauss-Newton (Levenberg-Marquardt) least-squares engine.
//!
//! Shared by the tuning-curve fits, the depinning boundary fit and the
//! Simmons IV fit. Problems here are tiny (two or three parameters, a few
//! hundred residuals), so the normal equations are formed explicitly and the
//! Jacobian is taken by forward differences.

use nalgebra::{DMatrix, DVector};

use crate::error::{precondition, Error, Result};

/// Tuning knobs for [`least_squares_fit_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LsqOptions {
    pub max_iterations: usize,
    pub initial_damping: f64,
    /// Stop when an accepted step lowers rss by less than this fraction.
    pub rss_rel_tol: f64,
    /// Stop when the parameter step norm falls below this.
    pub step_tol: f64,
}

impl Default for LsqOptions {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            initial_damping: 1e-3,
            rss_rel_tol: 1e-10,
            step_tol: 1e-12,
        }
    }
}

/// Outcome of a least-squares run.
#[derive(Debug, Clone)]
pub struct LsqReport {
    pub params: Vec<f64>,
    pub rss: f64,
    pub converged: bool,
    /// Number of Jacobian evaluations performed.
    pub iterations: usize,
    /// rss at the initial point followed by the rss after every accepted step.
    pub rss_history: Vec<f64>,
    /// Forward-difference Jacobian at `params` (rows: residuals).
    pub jacobian: DMatrix<f64>,
}

impl LsqReport {
    /// Ratio of the largest to smallest singular value of the final Jacobian.
    pub fn condition_number(&self) -> f64 {
        let sv = self.jacobian.clone().singular_values();
        let max = sv.iter().cloned().fold(0.0_f64, f64::max);
        let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        if min == 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }
}

const MAX_DAMPING: f64 = 1e30;

fn fd_step(p: f64) -> f64 {
    f64::max(1e-8, 1e-8 * p.abs())
}

fn rss_of(r: &[f64]) -> f64 {
    r.iter().map(|x| x * x).sum()
}

fn all_finite(r: &[f64]) -> bool {
    r.iter().all(|x| x.is_finite())
}

fn jacobian<F>(residual_fn: &F, params: &[f64], base: &[f64]) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let m = base.len();
    let n = params.len();
    let mut jac = DMatrix::zeros(m, n);
    let mut probe = params.to_vec();
    for k in 0..n {
        let h = fd_step(params[k]);
        probe[k] = params[k] + h;
        let shifted = residual_fn(&probe);
        probe[k] = params[k];
        if shifted.len() != m || !all_finite(&shifted) {
            return Err(Error::NonFinite(format!(
                "residuals non-finite while differencing parameter {k} at {params:?}"
            )));
        }
        for i in 0..m {
            jac[(i, k)] = (shifted[i] - base[i]) / h;
        }
    }
    Ok(jac)
}

/// Minimizes `sum(residual_fn(p)^2)` from `init` with default options.
pub fn least_squares_fit<F>(residual_fn: F, init: &[f64]) -> Result<LsqReport>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    least_squares_fit_with(residual_fn, init, &LsqOptions::default())
}

/// Minimizes `sum(residual_fn(p)^2)` from `init`.
///
/// Hitting the iteration cap is not an error: the best parameters found are
/// returned with `converged = false`. A non-finite residual at the starting
/// point is a precondition failure; one encountered later aborts the fit.
pub fn least_squares_fit_with<F>(residual_fn: F, init: &[f64], opts: &LsqOptions) -> Result<LsqReport>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    if init.is_empty() {
        return Err(precondition("no parameters to fit"));
    }
    if !all_finite(init) {
        return Err(precondition(format!("non-finite initial parameters {init:?}")));
    }
    let mut params = init.to_vec();
    let mut resid = residual_fn(&params);
    if resid.is_empty() {
        return Err(precondition("residual function returned no residuals"));
    }
    if !all_finite(&resid) {
        return Err(precondition(format!("residuals non-finite at initial parameters {init:?}")));
    }
    let m = resid.len();
    let n = params.len();
    let mut rss = rss_of(&resid);
    let mut rss_history = vec![rss];
    let mut damping = opts.initial_damping;
    let mut converged = rss == 0.0;
    let mut iterations = 0;

    while !converged && iterations < opts.max_iterations {
        iterations += 1;
        let jac = jacobian(&residual_fn, &params, &resid)?;
        let r = DVector::from_column_slice(&resid);
        let jt = jac.transpose();
        let jtj = &jt * &jac;
        let grad = &jt * &r;
        if grad.iter().all(|g| *g == 0.0) {
            converged = true;
            break;
        }

        loop {
            let mut lhs = jtj.clone();
            for k in 0..n {
                lhs[(k, k)] += damping;
            }
            let step = match lhs.cholesky() {
                Some(ch) => -ch.solve(&grad),
                None => {
                    damping *= 10.0;
                    if damping > MAX_DAMPING {
                        converged = true;
                        break;
                    }
                    continue;
                }
            };
            let step_norm = step.norm();
            let trial: Vec<f64> = params.iter().zip(step.iter()).map(|(p, s)| p + s).collect();
            let trial_resid = residual_fn(&trial);
            if trial_resid.len() != m || !all_finite(&trial_resid) {
                return Err(Error::NonFinite(format!(
                    "residuals non-finite at trial parameters {trial:?} (iteration {iterations})"
                )));
            }
            let trial_rss = rss_of(&trial_resid);
            if trial_rss < rss {
                let rel_change = (rss - trial_rss) / rss;
                params = trial;
                resid = trial_resid;
                rss = trial_rss;
                rss_history.push(rss);
                damping = f64::max(damping / 10.0, f64::MIN_POSITIVE);
                if rss == 0.0 || rel_change < opts.rss_rel_tol || step_norm < opts.step_tol {
                    converged = true;
                }
                break;
            }
            if step_norm < opts.step_tol {
                converged = true;
                break;
            }
            damping *= 10.0;
            if damping > MAX_DAMPING {
                converged = true;
                break;
            }
        }
    }

    let jacobian = jacobian(&residual_fn, &params, &resid)?;
    Ok(LsqReport {
        params,
        rss,
        converged,
        iterations,
        rss_history,
        jacobian,
    })
}
