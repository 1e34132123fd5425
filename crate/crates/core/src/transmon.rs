//! Transmon spectrum in the charge basis.
//!
//! `H = 4·E_C·n̂² − E_J·cos φ̂` is tridiagonal in the charge basis
//! `|n⟩, n = −N..N`: diagonal `4·E_C·n²`, nearest-neighbour coupling
//! `−E_J/2`. All energies are frequencies (E/h) in hertz. Offset charge is
//! taken as zero.

use serde::{Deserialize, Serialize};

use crate::error::{domain, precondition, Error, Result};
use crate::tridiag::smallest_eigenvalues;

/// Largest working charge-basis half-width tried when checking convergence.
pub const MAX_N_CHARGE: usize = 200;

/// Relative agreement required between a basis and its doubled basis.
pub const CONVERGENCE_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmonParams {
    #[serde(rename = "e_c_Hz")]
    pub e_c: f64,
    #[serde(rename = "e_j_Hz")]
    pub e_j: f64,
    pub n_charge: usize,
    pub n_levels: usize,
}

impl TransmonParams {
    pub const DEFAULT_N_CHARGE: usize = 30;
    pub const DEFAULT_N_LEVELS: usize = 6;

    pub fn new(e_c: f64, e_j: f64) -> Result<Self> {
        Self::with_basis(e_c, e_j, Self::DEFAULT_N_CHARGE, Self::DEFAULT_N_LEVELS)
    }

    pub fn with_basis(e_c: f64, e_j: f64, n_charge: usize, n_levels: usize) -> Result<Self> {
        let p = Self {
            e_c,
            e_j,
            n_charge,
            n_levels,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.e_c > 0.0 && self.e_c.is_finite() && self.e_j > 0.0 && self.e_j.is_finite()) {
            return Err(domain(format!(
                "E_C = {} Hz and E_J = {} Hz must be positive",
                self.e_c, self.e_j
            )));
        }
        if self.n_charge < 10 {
            return Err(domain(format!("n_charge = {} below 10", self.n_charge)));
        }
        if self.n_levels < 2 || self.n_levels > self.n_charge {
            return Err(domain(format!(
                "n_levels = {} must be in [2, n_charge = {}]",
                self.n_levels, self.n_charge
            )));
        }
        Ok(())
    }

    pub fn ej_over_ec(&self) -> f64 {
        self.e_j / self.e_c
    }
}

/// Transition frequencies `f(k→k+1)` of the lowest levels, Hz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuditSpectrum {
    #[serde(rename = "transitions_Hz")]
    pub transitions: Vec<f64>,
    /// Basis half-width the reported transitions were computed with.
    pub n_charge: usize,
}

impl QuditSpectrum {
    pub fn f01(&self) -> f64 {
        self.transitions[0]
    }

    /// `f(1→2) − f(0→1)`.
    pub fn anharmonicity(&self) -> f64 {
        self.transitions[1] - self.transitions[0]
    }
}

/// Lowest `k` eigenvalues of the charge-basis Hamiltonian.
pub fn energy_levels(e_c: f64, e_j: f64, n_charge: usize, k: usize) -> Vec<f64> {
    let dim = 2 * n_charge + 1;
    let diag: Vec<f64> = (0..dim)
        .map(|i| {
            let n = i as f64 - n_charge as f64;
            4.0 * e_c * n * n
        })
        .collect();
    let off = vec![-0.5 * e_j; dim - 1];
    smallest_eigenvalues(&diag, &off, k)
}

fn transitions(e_c: f64, e_j: f64, n_charge: usize, n_levels: usize) -> Vec<f64> {
    energy_levels(e_c, e_j, n_charge, n_levels)
        .windows(2)
        .map(|w| w[1] - w[0])
        .collect()
}

/// Transitions of the first `n_levels` levels.
///
/// The basis is doubled until the reported transitions stop moving by more
/// than [`CONVERGENCE_REL_TOL`] of the largest one; the transitions of the
/// smaller basis of the agreeing pair are returned.
pub fn spectrum(p: &TransmonParams) -> Result<QuditSpectrum> {
    p.validate()?;
    let mut n = p.n_charge;
    let mut current = transitions(p.e_c, p.e_j, n, p.n_levels);
    loop {
        let doubled_n = 2 * n;
        let doubled = transitions(p.e_c, p.e_j, doubled_n, p.n_levels);
        let scale = current.iter().fold(0.0_f64, |m, f| m.max(f.abs()));
        let converged = current
            .iter()
            .zip(&doubled)
            .all(|(a, b)| (a - b).abs() <= CONVERGENCE_REL_TOL * scale);
        if converged {
            return Ok(QuditSpectrum {
                transitions: current,
                n_charge: n,
            });
        }
        if doubled_n > MAX_N_CHARGE {
            return Err(Error::NonConvergence(format!(
                "transmon spectrum not converged at n_charge = {n} (E_J/E_C = {})",
                p.ej_over_ec()
            )));
        }
        n = doubled_n;
        current = doubled;
    }
}

const INFER_MAX_ITER: usize = 100;
const INFER_TOL_HZ: f64 = 1.0;

/// Recovers `(E_C, E_J)` whose first two transitions equal `f01` and `f12`.
///
/// Damped Newton on the two residuals, started from the transmon
/// asymptotics `E_C ≈ f01 − f12`, `E_J ≈ (f01 + E_C)² / (8·E_C)`.
pub fn infer_ej_ec(f01: f64, f12: f64, n_charge: usize) -> Result<TransmonParams> {
    if !(f12 > 0.0 && f01 > f12 && f01.is_finite()) {
        return Err(precondition(format!(
            "need f01 > f12 > 0 (negative anharmonicity), got f01 = {f01}, f12 = {f12}"
        )));
    }
    let residual = |e_c: f64, e_j: f64| -> [f64; 2] {
        let t = transitions(e_c, e_j, n_charge, 3);
        [t[0] - f01, t[1] - f12]
    };
    let norm = |r: [f64; 2]| r[0].hypot(r[1]);

    let mut e_c = f01 - f12;
    let mut e_j = (f01 + e_c).powi(2) / (8.0 * e_c);
    TransmonParams::with_basis(e_c, e_j, n_charge, 3)?;
    let mut r = residual(e_c, e_j);

    for _ in 0..INFER_MAX_ITER {
        if r[0].abs() < INFER_TOL_HZ && r[1].abs() < INFER_TOL_HZ {
            let p = TransmonParams::with_basis(
                e_c,
                e_j,
                n_charge,
                TransmonParams::DEFAULT_N_LEVELS.min(n_charge),
            )?;
            spectrum(&p)?;
            return Ok(p);
        }
        let hc = 1e-7 * e_c;
        let hj = 1e-7 * e_j;
        let rc = residual(e_c + hc, e_j);
        let rj = residual(e_c, e_j + hj);
        let j = [
            [(rc[0] - r[0]) / hc, (rj[0] - r[0]) / hj],
            [(rc[1] - r[1]) / hc, (rj[1] - r[1]) / hj],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            return Err(Error::NonConvergence("singular Jacobian in E_J/E_C inference".into()));
        }
        let dc = -(j[1][1] * r[0] - j[0][1] * r[1]) / det;
        let dj = -(-j[1][0] * r[0] + j[0][0] * r[1]) / det;

        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let (c_new, j_new) = (e_c + scale * dc, e_j + scale * dj);
            if c_new > 0.0 && j_new > 0.0 {
                let r_new = residual(c_new, j_new);
                if norm(r_new) < norm(r) {
                    e_c = c_new;
                    e_j = j_new;
                    r = r_new;
                    accepted = true;
                    break;
                }
            }
            scale *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Err(Error::NonConvergence(format!(
        "E_J/E_C inference stalled with residuals {r:?} Hz"
    )))
}

/// Measured minus predicted transition frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Deviation {
    /// Lower level `k` of the `k → k+1` transition.
    pub transition: usize,
    #[serde(rename = "measured_Hz")]
    pub measured: f64,
    #[serde(rename = "predicted_Hz")]
    pub predicted: f64,
    #[serde(rename = "delta_Hz")]
    pub delta: f64,
}

/// Deviations of measured transitions from the ideal-cosine prediction.
pub fn harmonic_deviation_report(measured: &[f64], p: &TransmonParams) -> Result<Vec<Deviation>> {
    if measured.len() + 1 > p.n_levels {
        return Err(precondition(format!(
            "{} measured transitions but only {} levels modelled",
            measured.len(),
            p.n_levels
        )));
    }
    let predicted = spectrum(p)?;
    Ok(measured
        .iter()
        .zip(&predicted.transitions)
        .enumerate()
        .map(|(k, (&m, &f))| Deviation {
            transition: k,
            measured: m,
            predicted: f,
            delta: m - f,
        })
        .collect())
}
