//! Voltage–temperature phase diagrams of tuning speed and failure.
//!
//! A [`PhaseGrid`] holds, for every (V, T) cell at one drive frequency, the
//! fitted speed parameters of the junctions that tuned and the count of
//! those that failed. Cell summaries are medians of the successful fits.

use serde::{Deserialize, Serialize};

use crate::curve_fitting::{
    detect_failure, fit_log_model, LogFit, RunConditions, Sample, TuningCurve,
    DEFAULT_COLLAPSE_FRACTION,
};
use crate::depinning::BoundaryLine;
use crate::error::{domain, precondition, Error, Result};
use crate::self_heating::{mean_temperature_rise, heating_power, HeatParams};
use crate::stats::median;

/// Runs that collapse before this many seconds count as failures.
pub const FAILURE_CUTOFF_S: f64 = 150.0;

/// Cells with fewer junctions than this are flagged as under-sampled.
pub const MIN_JUNCTIONS_PER_CELL: usize = 3;

/// Speed level whose contour marks the stable/creep boundary.
pub const DEFAULT_CONTOUR_LEVEL: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Outcome {
    Tuned(LogFit),
    Failed {
        #[serde(rename = "t_fail_s")]
        t_fail: f64,
    },
}

/// One junction's tuning run reduced to either a fit or a failure time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningRecord {
    pub junction_id: String,
    pub conditions: RunConditions,
    pub outcome: Outcome,
}

impl TuningRecord {
    /// Reduces a raw curve: a collapse before [`FAILURE_CUTOFF_S`] is a
    /// failure, otherwise the log law is fitted to the samples preceding any
    /// later collapse.
    pub fn from_curve(curve: &TuningCurve) -> Result<Self> {
        let t_fail = detect_failure(curve, DEFAULT_COLLAPSE_FRACTION)?;
        let outcome = match t_fail {
            Some(t) if t < FAILURE_CUTOFF_S => Outcome::Failed { t_fail: t },
            Some(t) => {
                let kept: Vec<Sample> =
                    curve.samples().iter().copied().filter(|s| s.t < t).collect();
                let head = TuningCurve::new(kept, curve.conditions, curve.junction_id.clone())?;
                Outcome::Tuned(fit_log_model(&head)?)
            }
            None => Outcome::Tuned(fit_log_model(curve)?),
        };
        Ok(Self {
            junction_id: curve.junction_id.clone(),
            conditions: curve.conditions,
            outcome,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    /// Speed parameters of the junctions that tuned, ordered by junction id.
    pub a_values: Vec<f64>,
    pub n_failed: usize,
    pub n_total: usize,
}

impl GridCell {
    pub fn under_sampled(&self) -> bool {
        self.n_total < MIN_JUNCTIONS_PER_CELL
    }

    pub fn failure_fraction(&self) -> f64 {
        if self.n_total == 0 {
            0.0
        } else {
            self.n_failed as f64 / self.n_total as f64
        }
    }

    pub fn median_speed(&self) -> Option<f64> {
        median(&self.a_values)
    }
}

/// Rectilinear (V, T) grid at one drive frequency.
///
/// Cells are stored row-major by voltage index: `cells[i * t_axis.len() + j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridDocument", into = "GridDocument")]
pub struct PhaseGrid {
    v_axis: Vec<f64>,
    t_axis: Vec<f64>,
    f_drive: f64,
    cells: Vec<GridCell>,
}

fn strictly_ascending(axis: &[f64]) -> bool {
    axis.iter().all(|x| x.is_finite()) && axis.windows(2).all(|w| w[1] > w[0])
}

fn same_value(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs())
}

fn unique_sorted(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| same_value(*a, *b));
    v
}

fn locate(axis: &[f64], x: f64) -> Option<usize> {
    axis.iter().position(|a| same_value(*a, x))
}

impl PhaseGrid {
    pub fn new(v_axis: Vec<f64>, t_axis: Vec<f64>, f_drive: f64, cells: Vec<GridCell>) -> Result<Self> {
        if v_axis.len() < 2 || t_axis.len() < 2 {
            return Err(precondition("phase grid axes need at least 2 points each"));
        }
        if !strictly_ascending(&v_axis) || !strictly_ascending(&t_axis) {
            return Err(precondition("phase grid axes must be strictly ascending"));
        }
        if cells.len() != v_axis.len() * t_axis.len() {
            return Err(precondition(format!(
                "{} cells for a {}×{} grid",
                cells.len(),
                v_axis.len(),
                t_axis.len()
            )));
        }
        for c in &cells {
            if c.n_failed > c.n_total || c.a_values.len() != c.n_total - c.n_failed {
                return Err(precondition(format!(
                    "inconsistent cell counts: {} speeds, {} failed, {} total",
                    c.a_values.len(),
                    c.n_failed,
                    c.n_total
                )));
            }
        }
        Ok(Self {
            v_axis,
            t_axis,
            f_drive,
            cells,
        })
    }

    pub fn v_axis(&self) -> &[f64] {
        &self.v_axis
    }

    pub fn t_axis(&self) -> &[f64] {
        &self.t_axis
    }

    pub fn f_drive(&self) -> f64 {
        self.f_drive
    }

    pub fn cells(&self) -> &[GridCell] {
        &self.cells
    }

    /// Cell at voltage index `i`, temperature index `j`.
    pub fn cell(&self, i: usize, j: usize) -> &GridCell {
        &self.cells[i * self.t_axis.len() + j]
    }

    /// Cells holding fewer than three junctions, as `(i, j)` indices.
    pub fn under_sampled_cells(&self) -> Vec<(usize, usize)> {
        let nt = self.t_axis.len();
        (0..self.cells.len())
            .filter(|k| self.cells[*k].under_sampled())
            .map(|k| (k / nt, k % nt))
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct GridDocument {
    #[serde(rename = "f_drive_Hz")]
    f_drive: f64,
    #[serde(rename = "v_axis_V")]
    v_axis: Vec<f64>,
    #[serde(rename = "t_axis_K")]
    t_axis: Vec<f64>,
    cells: Vec<CellDocument>,
}

/// Serialized cell; the summary fields are written for readers and
/// recomputed on load.
#[derive(Serialize, Deserialize)]
struct CellDocument {
    #[serde(rename = "v_V")]
    v: f64,
    #[serde(rename = "t_K")]
    t: f64,
    a_values: Vec<f64>,
    n_failed: usize,
    n_total: usize,
    #[serde(default, skip_deserializing)]
    median_a: Option<f64>,
    #[serde(default, skip_deserializing)]
    failure_fraction: f64,
    #[serde(default, skip_deserializing)]
    under_sampled: bool,
}

impl From<PhaseGrid> for GridDocument {
    fn from(g: PhaseGrid) -> Self {
        let nt = g.t_axis.len();
        let cells = g
            .cells
            .iter()
            .enumerate()
            .map(|(k, c)| CellDocument {
                v: g.v_axis[k / nt],
                t: g.t_axis[k % nt],
                a_values: c.a_values.clone(),
                n_failed: c.n_failed,
                n_total: c.n_total,
                median_a: c.median_speed(),
                failure_fraction: c.failure_fraction(),
                under_sampled: c.under_sampled(),
            })
            .collect();
        Self {
            f_drive: g.f_drive,
            v_axis: g.v_axis,
            t_axis: g.t_axis,
            cells,
        }
    }
}

impl TryFrom<GridDocument> for PhaseGrid {
    type Error = Error;

    fn try_from(doc: GridDocument) -> Result<Self> {
        let nt = doc.t_axis.len();
        for (k, c) in doc.cells.iter().enumerate() {
            let (i, j) = (k / nt.max(1), k % nt.max(1));
            if doc.v_axis.get(i) != Some(&c.v) || doc.t_axis.get(j) != Some(&c.t) {
                return Err(Error::Format(format!(
                    "cell {k} at ({} V, {} K) is out of row-major order",
                    c.v, c.t
                )));
            }
        }
        let cells = doc
            .cells
            .into_iter()
            .map(|c| GridCell {
                a_values: c.a_values,
                n_failed: c.n_failed,
                n_total: c.n_total,
            })
            .collect();
        PhaseGrid::new(doc.v_axis, doc.t_axis, doc.f_drive, cells)
    }
}

/// Groups records into a grid; axes are the sorted distinct conditions.
pub fn build_grid(records: &[TuningRecord], f_drive: f64) -> Result<PhaseGrid> {
    if records.is_empty() {
        return Err(precondition("no tuning records"));
    }
    if let Some(r) = records.iter().find(|r| !same_value(r.conditions.f_drive, f_drive)) {
        return Err(precondition(format!(
            "record {} at {} Hz in a {f_drive} Hz grid",
            r.junction_id, r.conditions.f_drive
        )));
    }
    let v_axis = unique_sorted(records.iter().map(|r| r.conditions.v_amp));
    let t_axis = unique_sorted(records.iter().map(|r| r.conditions.t_set));
    let nt = t_axis.len();
    let mut cells = vec![
        GridCell {
            a_values: Vec::new(),
            n_failed: 0,
            n_total: 0,
        };
        v_axis.len() * nt
    ];

    let mut ordered: Vec<&TuningRecord> = records.iter().collect();
    ordered.sort_by(|a, b| a.junction_id.cmp(&b.junction_id));
    for r in ordered {
        let i = locate(&v_axis, r.conditions.v_amp).expect("voltage on axis");
        let j = locate(&t_axis, r.conditions.t_set).expect("temperature on axis");
        let cell = &mut cells[i * nt + j];
        cell.n_total += 1;
        match r.outcome {
            Outcome::Tuned(fit) => cell.a_values.push(fit.a),
            Outcome::Failed { .. } => cell.n_failed += 1,
        }
    }
    if let Some(k) = cells.iter().position(|c| c.n_total == 0) {
        return Err(precondition(format!(
            "no records at V = {} V, T = {} K",
            v_axis[k / nt],
            t_axis[k % nt]
        )));
    }
    let grid = PhaseGrid::new(v_axis, t_axis, f_drive, cells)?;
    for (i, j) in grid.under_sampled_cells() {
        log::warn!(
            "cell V = {} V, T = {} K has fewer than {MIN_JUNCTIONS_PER_CELL} junctions",
            grid.v_axis[i],
            grid.t_axis[j]
        );
    }
    Ok(grid)
}

/// Median speed of a cell; failed runs are excluded.
pub fn cell_speed(grid: &PhaseGrid, i: usize, j: usize) -> Result<f64> {
    if i >= grid.v_axis.len() || j >= grid.t_axis.len() {
        return Err(domain(format!("cell ({i}, {j}) outside the grid")));
    }
    grid.cell(i, j).median_speed().ok_or_else(|| {
        Error::Undefined(format!(
            "every junction failed at V = {} V, T = {} K",
            grid.v_axis[i], grid.t_axis[j]
        ))
    })
}

fn bracket(axis: &[f64], x: f64) -> Option<usize> {
    let last = axis.len() - 1;
    if !(x >= axis[0] && x <= axis[last]) {
        return None;
    }
    Some(axis.partition_point(|a| *a <= x).clamp(1, last) - 1)
}

/// Bilinear interpolation of cell medians.
pub fn interpolate_speed(grid: &PhaseGrid, v: f64, t: f64) -> Result<f64> {
    let (i, j) = match (bracket(&grid.v_axis, v), bracket(&grid.t_axis, t)) {
        (Some(i), Some(j)) => (i, j),
        _ => return Err(domain(format!("({v} V, {t} K) outside the grid"))),
    };
    let f00 = cell_speed(grid, i, j)?;
    let f10 = cell_speed(grid, i + 1, j)?;
    let f01 = cell_speed(grid, i, j + 1)?;
    let f11 = cell_speed(grid, i + 1, j + 1)?;
    let s = (v - grid.v_axis[i]) / (grid.v_axis[i + 1] - grid.v_axis[i]);
    let u = (t - grid.t_axis[j]) / (grid.t_axis[j + 1] - grid.t_axis[j]);
    Ok((1.0 - s) * (1.0 - u) * f00 + s * (1.0 - u) * f10 + (1.0 - s) * u * f01 + s * u * f11)
}

/// A point on a speed contour: voltage in V, temperature in K.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourPoint {
    #[serde(rename = "v_V")]
    pub v: f64,
    #[serde(rename = "t_K")]
    pub t: f64,
}

/// Crossings of `level` along every grid edge whose endpoint medians lie on
/// opposite sides of it, ordered by temperature then voltage.
///
/// An endpoint counts as "above" when its median is `>= level`. Edges touching
/// an all-failed cell are skipped.
pub fn extract_contour(grid: &PhaseGrid, level: f64) -> Result<Vec<ContourPoint>> {
    let nv = grid.v_axis.len();
    let nt = grid.t_axis.len();
    let medians: Vec<Option<f64>> = grid.cells.iter().map(GridCell::median_speed).collect();
    if medians.iter().filter(|m| m.is_some()).count() < 4 {
        return Err(precondition("contour needs at least 4 cells with successful fits"));
    }
    let at = |i: usize, j: usize| medians[i * nt + j];
    let crossing = |f0: f64, f1: f64| -> Option<f64> {
        if (f0 < level) != (f1 < level) {
            Some((level - f0) / (f1 - f0))
        } else {
            None
        }
    };

    let mut points = Vec::new();
    for i in 0..nv {
        for j in 0..nt {
            let Some(f0) = at(i, j) else { continue };
            if i + 1 < nv {
                if let Some(w) = at(i + 1, j).and_then(|f1| crossing(f0, f1)) {
                    let v = grid.v_axis[i] + w * (grid.v_axis[i + 1] - grid.v_axis[i]);
                    points.push(ContourPoint { v, t: grid.t_axis[j] });
                }
            }
            if j + 1 < nt {
                if let Some(w) = at(i, j + 1).and_then(|f1| crossing(f0, f1)) {
                    let t = grid.t_axis[j] + w * (grid.t_axis[j + 1] - grid.t_axis[j]);
                    points.push(ContourPoint { v: grid.v_axis[i], t });
                }
            }
        }
    }
    points.sort_by(|a, b| a.t.total_cmp(&b.t).then(a.v.total_cmp(&b.v)));
    points.dedup();
    Ok(points)
}

/// Ordinary least squares of T against V.
pub fn fit_boundary_line(points: &[ContourPoint], frequency: f64) -> Result<BoundaryLine> {
    if points.len() < 2 {
        return Err(precondition(format!("need at least 2 points, got {}", points.len())));
    }
    let n = points.len() as f64;
    let mv = points.iter().map(|p| p.v).sum::<f64>() / n;
    let mt = points.iter().map(|p| p.t).sum::<f64>() / n;
    let svv: f64 = points.iter().map(|p| (p.v - mv).powi(2)).sum();
    let svt: f64 = points.iter().map(|p| (p.v - mv) * (p.t - mt)).sum();
    if svv <= f64::EPSILON * mv * mv * n {
        return Err(Error::Degenerate("all contour points share one voltage".into()));
    }
    let slope = svt / svv;
    Ok(BoundaryLine {
        slope,
        intercept_t: mt - slope * mv,
        frequency,
    })
}

/// Failed fraction per cell, indexed `[voltage][temperature]`.
pub fn failure_fraction_map(grid: &PhaseGrid) -> Vec<Vec<f64>> {
    let nt = grid.t_axis.len();
    grid.cells
        .chunks(nt)
        .map(|row| row.iter().map(GridCell::failure_fraction).collect())
        .collect()
}

/// A grid cell moved to its self-heated temperature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatedCell {
    #[serde(rename = "v_V")]
    pub v: f64,
    #[serde(rename = "t_set_K")]
    pub t_set: f64,
    #[serde(rename = "t_eff_K")]
    pub t_eff: f64,
    pub a_values: Vec<f64>,
    pub n_failed: usize,
    pub n_total: usize,
}

/// Scattered (V, T_eff) diagram produced by [`apply_self_heating`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeformedDiagram {
    #[serde(rename = "f_drive_Hz")]
    pub f_drive: f64,
    #[serde(rename = "r_nominal_ohm")]
    pub r_nominal: f64,
    pub heat: HeatParams,
    pub cells: Vec<HeatedCell>,
}

/// Shifts every cell to `T_set + ΔT(V, R_nominal)`. Speeds and failure
/// counts are carried over untouched; no re-gridding is attempted.
pub fn apply_self_heating(grid: &PhaseGrid, r_nominal: f64, heat: &HeatParams) -> Result<DeformedDiagram> {
    heat.validate()?;
    let nt = grid.t_axis.len();
    let mut cells = Vec::with_capacity(grid.cells.len());
    for (k, c) in grid.cells.iter().enumerate() {
        let v = grid.v_axis[k / nt];
        let t_set = grid.t_axis[k % nt];
        let rise = mean_temperature_rise(heating_power(v, r_nominal)?, heat)?;
        cells.push(HeatedCell {
            v,
            t_set,
            t_eff: t_set + rise,
            a_values: c.a_values.clone(),
            n_failed: c.n_failed,
            n_total: c.n_total,
        });
    }
    Ok(DeformedDiagram {
        f_drive: grid.f_drive,
        r_nominal,
        heat: *heat,
        cells,
    })
}
