//! Analysis toolkit for voltage-tuned tunnel junctions.
//!
//! Covers the thermally activated depinning boundary, tuning-curve fits and
//! their phase diagrams, Joule self-heating, tunneling IV analysis and the
//! transmon spectrum used to turn resistance tuning into qubit frequencies.
//! The [`workbench`] module adds file formats, synthetic data and the
//! `depinner` command line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod curve_fitting;
pub mod depinning;
pub mod error;
pub mod junction_iv;
pub mod lsq;
pub mod phase_diagram;
pub mod self_heating;
pub mod stats;
pub mod transmon;
mod tridiag;
pub mod workbench;

pub use curve_fitting::{
    compare_models, detect_failure, fit_log_model, fit_power_model, LogFit, Model, ModelComparison,
    PowerFit, RunConditions, Sample, TuningCurve,
};
pub use depinning::{
    classify_point, creep_temperature, depinning_temperature, depinning_voltage, estimate_tau,
    fit_depinning_boundary, lambda_factor, BoundaryLine, DepinningParams, Regime,
};
pub use error::{Error, Result};
pub use junction_iv::{
    detect_breakdown, fit_simmons, ohmic_fit, simmons_current, IvPoint, IvTrace, SimmonsFit,
};
pub use phase_diagram::{
    apply_self_heating, build_grid, cell_speed, extract_contour, failure_fraction_map,
    fit_boundary_line, interpolate_speed, ContourPoint, PhaseGrid, TuningRecord,
};
pub use self_heating::{effective_temperature, mean_temperature_rise, HeatParams};
pub use transmon::{harmonic_deviation_report, infer_ej_ec, spectrum, QuditSpectrum, TransmonParams};
