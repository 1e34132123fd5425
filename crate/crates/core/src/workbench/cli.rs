//! The `depinner` command line.
//!
//! Every subcommand reads files or flags, calls one library operation and
//! writes its result as JSON (CSV for `synth`) to stdout or `--out`.
//! Temperatures given as flags are celsius unless the flag name says `-k`.
//! Exit status: 0 success, 1 usage error, 2 data or convergence error.

use std::collections::HashSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgAction, Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use crate::constants::celsius_to_kelvin;
use crate::curve_fitting::{compare_models, fit_log_model, LogFit, RunConditions, TuningCurve};
use crate::depinning::{classify_point, estimate_tau, fit_depinning_boundary, lambda_factor, DepinningParams, Regime};
use crate::error::Error;
use crate::junction_iv::{
    breakdown_from_maps, detect_breakdown, fit_simmons, ohmic_fit, BarrierMaps, IvTrace, SimmonsFit,
    DEFAULT_JUMP_FACTOR, DEFAULT_OHMIC_WINDOW,
};
use crate::phase_diagram::{
    apply_self_heating, build_grid, extract_contour, fit_boundary_line, ContourPoint, PhaseGrid, TuningRecord,
    DEFAULT_CONTOUR_LEVEL,
};
use crate::self_heating::{heating_power, mean_temperature_rise, HeatParams};
use crate::transmon::{harmonic_deviation_report, infer_ej_ec, spectrum, TransmonParams};

use super::campaign::{
    calibrate_overshoot_rate, records_from_runs, simulate_campaign, simulate_targeted_run, CampaignSpec,
    TargetSpec,
};
use super::io;
use super::rng::default_seed;
use super::synth::{synth_iv_trace, synth_power_curve, synth_tuning_curve, IvSynth};

#[derive(Parser, Debug)]
#[command(name = "depinner", version, about = "Junction tuning analysis workbench")]
struct Cli {
    /// JSON object whose keys (flag names) supply flags absent from the command line.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the result to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit the logarithmic law to a tuning-curve CSV.
    FitCurve(CurveArgs),
    /// Fit both the logarithmic and the power law and pick the better one.
    CompareFits(CurveArgs),
    /// Build a speed/failure grid from tuning CSVs, directories of them, or record JSON files.
    PhaseGrid(PhaseGridArgs),
    /// Level crossings of the median speed on a grid.
    Contour(ContourArgs),
    /// Straight line T(V) through the contour of a grid.
    BoundaryLine(ContourArgs),
    /// Fit the depinning boundary to breakdown points (CSV `t_C,v_bd_V`).
    FitBreakdownBoundary(BreakdownBoundaryArgs),
    /// Regime of one operating point.
    Classify(ClassifyArgs),
    /// Joule heating of a junction under drive.
    SelfHeat(SelfHeatArgs),
    /// Move every grid cell to its self-heated temperature.
    DeformGrid(DeformArgs),
    /// Fit barrier thickness and height to an IV CSV.
    SimmonsFit(SimmonsArgs),
    /// Low-bias resistance of an IV CSV.
    OhmicFit(OhmicArgs),
    /// First current jump in an IV CSV.
    DetectBreakdown(JumpArgs),
    /// Breakdown voltage from thickness and strength matrix CSVs.
    BreakdownMap(MapArgs),
    /// Transition frequencies of a transmon.
    TransmonSpectrum(SpectrumArgs),
    /// E_J and E_C from the two lowest transitions.
    InferEjec(InferArgs),
    /// Measured minus predicted transitions.
    HarmonicsReport(HarmonicsArgs),
    /// Hop timescale from boundary intercepts at two frequencies.
    EstimateTau(TauArgs),
    /// Write a synthetic tuning curve or IV trace as CSV.
    Synth(SynthArgs),
    /// Simulate a tuning campaign and write its records as JSON.
    SimulateCampaign(CampaignArgs),
    /// Simulate a run stopped at a target resistance.
    SimulateTarget(TargetArgs),
}

#[derive(Args, Debug)]
struct CurveArgs {
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args, Debug)]
struct PhaseGridArgs {
    #[arg(long, required = true, action = ArgAction::Append)]
    input: Vec<PathBuf>,
    /// Keep only records at this drive frequency.
    #[arg(long)]
    f_hz: Option<f64>,
}

#[derive(Args, Debug)]
struct ContourArgs {
    #[arg(long)]
    grid: PathBuf,
    #[arg(long, default_value_t = DEFAULT_CONTOUR_LEVEL)]
    level: f64,
}

#[derive(Args, Debug)]
struct BreakdownBoundaryArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = DepinningParams::DEFAULT_MU)]
    mu: f64,
}

#[derive(Args, Debug)]
struct DepinningFlags {
    /// Depinning temperature in kelvin.
    #[arg(long)]
    t_p_k: f64,
    /// Threshold voltage in volts.
    #[arg(long)]
    v_th: f64,
    #[arg(long, default_value_t = DepinningParams::DEFAULT_MU)]
    mu: f64,
    /// Hop timescale in seconds.
    #[arg(long)]
    tau: f64,
}

impl DepinningFlags {
    fn params(&self) -> crate::Result<DepinningParams> {
        DepinningParams::new(self.t_p_k, self.v_th, self.mu, self.tau)
    }
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[arg(long)]
    v: f64,
    #[arg(long)]
    t_c: f64,
    /// Drive frequency; 0 means DC.
    #[arg(long)]
    f_hz: f64,
    #[command(flatten)]
    depinning: DepinningFlags,
}

#[derive(Args, Debug)]
struct HeatFlags {
    /// Thermal conductivity, W/(m·K).
    #[arg(long, default_value_t = 30.0)]
    k: f64,
    /// Outer radius of the heated region, m.
    #[arg(long, default_value_t = 100e-9)]
    r_max: f64,
    #[arg(long, default_value_t = 2.0)]
    factor: f64,
}

impl HeatFlags {
    fn params(&self) -> crate::Result<HeatParams> {
        HeatParams::new(self.k, self.r_max, self.factor)
    }
}

#[derive(Args, Debug)]
struct SelfHeatArgs {
    #[arg(long)]
    v: f64,
    #[arg(long)]
    r_ohm: f64,
    #[arg(long)]
    t_ambient_c: Option<f64>,
    #[command(flatten)]
    heat: HeatFlags,
}

#[derive(Args, Debug)]
struct DeformArgs {
    #[arg(long)]
    grid: PathBuf,
    #[arg(long)]
    r_ohm: f64,
    #[command(flatten)]
    heat: HeatFlags,
}

#[derive(Args, Debug)]
struct SimmonsArgs {
    #[arg(long)]
    input: PathBuf,
    /// Junction area, m².
    #[arg(long)]
    area: f64,
    #[arg(long, default_value_t = DEFAULT_JUMP_FACTOR)]
    jump_factor: f64,
}

#[derive(Args, Debug)]
struct OhmicArgs {
    #[arg(long)]
    input: PathBuf,
    /// Bias window, V.
    #[arg(long, default_value_t = DEFAULT_OHMIC_WINDOW)]
    window: f64,
}

#[derive(Args, Debug)]
struct JumpArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_JUMP_FACTOR)]
    jump_factor: f64,
}

#[derive(Args, Debug)]
struct MapArgs {
    /// Matrix CSV of local thickness, m.
    #[arg(long)]
    thickness: PathBuf,
    /// Matrix CSV of local dielectric strength, V/m.
    #[arg(long)]
    strength: PathBuf,
}

#[derive(Args, Debug)]
struct TransmonFlags {
    #[arg(long)]
    ec_hz: f64,
    #[arg(long)]
    ej_hz: f64,
    #[arg(long, default_value_t = TransmonParams::DEFAULT_N_CHARGE)]
    n_charge: usize,
    #[arg(long, default_value_t = TransmonParams::DEFAULT_N_LEVELS)]
    n_levels: usize,
}

impl TransmonFlags {
    fn params(&self) -> crate::Result<TransmonParams> {
        TransmonParams::with_basis(self.ec_hz, self.ej_hz, self.n_charge, self.n_levels)
    }
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[command(flatten)]
    transmon: TransmonFlags,
}

#[derive(Args, Debug)]
struct InferArgs {
    #[arg(long)]
    f01_hz: f64,
    #[arg(long)]
    f12_hz: f64,
    #[arg(long, default_value_t = TransmonParams::DEFAULT_N_CHARGE)]
    n_charge: usize,
}

#[derive(Args, Debug)]
struct HarmonicsArgs {
    #[command(flatten)]
    transmon: TransmonFlags,
    /// Measured transitions f01, f12, ... in Hz, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    measured_hz: Vec<f64>,
}

#[derive(Args, Debug)]
struct TauArgs {
    #[arg(long)]
    f_low: f64,
    #[arg(long)]
    f_high: f64,
    /// Boundary intercept at the low frequency, K.
    #[arg(long)]
    intercept_low: f64,
    /// Boundary intercept at the high frequency, K.
    #[arg(long)]
    intercept_high: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SynthKind {
    Log,
    Power,
    Iv,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long, value_enum, default_value = "log")]
    kind: SynthKind,
    #[arg(long)]
    a: Option<f64>,
    /// Log-law rate constant, 1/s.
    #[arg(long)]
    c: Option<f64>,
    /// Power-law exponent.
    #[arg(long)]
    n: Option<f64>,
    #[arg(long, default_value_t = 150.0)]
    duration: f64,
    #[arg(long, default_value_t = 150)]
    n_samples: usize,
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    v_amp: Option<f64>,
    #[arg(long)]
    t_set_c: Option<f64>,
    #[arg(long)]
    f_hz: Option<f64>,
    #[arg(long, default_value = "synthetic")]
    junction: String,
    /// Barrier thickness, nm.
    #[arg(long)]
    d_nm: Option<f64>,
    /// Barrier height, eV.
    #[arg(long)]
    phi_ev: Option<f64>,
    /// Junction area, m².
    #[arg(long)]
    area: Option<f64>,
    #[arg(long, default_value_t = 1.5)]
    v_max: f64,
    #[arg(long, default_value_t = 151)]
    n_points: usize,
    /// Bias above which the synthetic junction is shorted.
    #[arg(long)]
    v_bd: Option<f64>,
    #[arg(long, default_value_t = 100.0)]
    r_short: f64,
}

#[derive(Args, Debug)]
struct CampaignArgs {
    /// Voltage amplitudes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    v_values: Vec<f64>,
    /// Set temperatures in °C, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    t_values_c: Vec<f64>,
    #[arg(long)]
    f_hz: f64,
    #[arg(long, default_value_t = 3)]
    junctions_per_cell: usize,
    #[command(flatten)]
    depinning: DepinningFlags,
    /// Speed parameter per kelvin above the creep boundary.
    #[arg(long, default_value_t = 1e-3)]
    speed_scale: f64,
    #[arg(long, default_value_t = 0.005)]
    noise: f64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 150.0)]
    duration: f64,
    #[arg(long, default_value_t = 150)]
    n_samples: usize,
    /// Also write every simulated curve as CSV into this directory.
    #[arg(long)]
    curves_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TargetArgs {
    /// Start from the 30 % → 34.6 % overshoot preset; other flags override it.
    #[arg(long)]
    preset: bool,
    #[arg(long)]
    start_r_ohm: Option<f64>,
    #[arg(long)]
    target: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    overshoot_rate: Option<f64>,
    /// Choose the overshoot rate so the run settles at this fraction.
    #[arg(long, conflicts_with = "overshoot_rate")]
    calibrate_to: Option<f64>,
}

enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

type Outcome = std::result::Result<Vec<u8>, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn json<T: Serialize + ?Sized>(value: &T) -> Outcome {
    Ok(io::to_json(value)?.into_bytes())
}

/// Runs the CLI on `args` (program name first). Returns the exit status.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let args = match merge_config(args) {
        Ok(a) => a,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            return 1;
        }
        Err(Failure::Data(e)) => {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let result = dispatch(cli.command).and_then(|bytes| {
        match &cli.out {
            Some(path) => fs::write(path, &bytes).map_err(|e| Failure::Data(e.into()))?,
            None => out.write_all(&bytes).map_err(|e| Failure::Data(e.into()))?,
        }
        Ok(())
    });
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            1
        }
        Err(Failure::Data(e)) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn arg_value<'a>(args: &'a [String], flag: &str) -> Option<&'a str> {
    let eq = format!("{flag}=");
    args.iter().enumerate().find_map(|(k, a)| {
        if a == flag {
            args.get(k + 1).map(String::as_str)
        } else {
            a.strip_prefix(&eq)
        }
    })
}

/// Appends `--key value` for every config key the subcommand accepts and the
/// command line does not already set.
fn merge_config(mut args: Vec<String>) -> std::result::Result<Vec<String>, Failure> {
    let Some(path) = arg_value(&args, "--config").map(PathBuf::from) else {
        return Ok(args);
    };
    let text = io::read_text(&path)?;
    let config: Value = serde_json::from_str(&text).map_err(Error::from)?;
    let Value::Object(map) = config else {
        return Err(usage(format!("{}: config must be a JSON object", path.display())));
    };
    let root = Cli::command();
    let names: HashSet<String> = root.get_subcommands().map(|s| s.get_name().to_string()).collect();
    let Some(sub_name) = args.iter().skip(1).find(|a| names.contains(a.as_str())).cloned() else {
        return Ok(args);
    };
    let sub = root.find_subcommand(&sub_name).expect("known subcommand");
    let present: HashSet<&str> = args
        .iter()
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a))
        .collect();
    let mut extra = Vec::new();
    for (key, value) in &map {
        let long = key.replace('_', "-");
        let found = sub
            .get_arguments()
            .chain(root.get_arguments())
            .find(|a| a.get_long() == Some(long.as_str()));
        let Some(arg) = found else {
            continue;
        };
        if present.contains(long.as_str()) || long == "config" {
            continue;
        }
        let flag = format!("--{long}");
        let scalar = |v: &Value| -> std::result::Result<String, Failure> {
            match v {
                Value::String(s) => Ok(s.clone()),
                Value::Number(n) => Ok(n.to_string()),
                Value::Bool(b) => Ok(b.to_string()),
                _ => Err(usage(format!("config key {key:?}: unsupported value {v}"))),
            }
        };
        match (arg.get_action(), value) {
            (ArgAction::SetTrue, Value::Bool(true)) => extra.push(flag),
            (ArgAction::SetTrue, Value::Bool(false)) => {}
            (ArgAction::SetTrue, v) => return Err(usage(format!("config key {key:?} must be a boolean, got {v}"))),
            (ArgAction::Append, Value::Array(items)) => {
                for item in items {
                    extra.push(flag.clone());
                    extra.push(scalar(item)?);
                }
            }
            (_, Value::Array(items)) => {
                let joined = items.iter().map(scalar).collect::<std::result::Result<Vec<_>, _>>()?;
                extra.push(flag);
                extra.push(joined.join(","));
            }
            (_, v) => {
                extra.push(flag);
                extra.push(scalar(v)?);
            }
        }
    }
    args.extend(extra);
    Ok(args)
}

#[derive(Serialize)]
struct CurveFitReport {
    junction: String,
    conditions: RunConditions,
    fit: LogFit,
}

#[derive(Serialize)]
struct ContourReport {
    level: f64,
    #[serde(rename = "f_drive_Hz")]
    f_drive: f64,
    points: Vec<ContourPoint>,
}

#[derive(Serialize)]
struct BoundaryReport {
    level: f64,
    n_points: usize,
    #[serde(flatten)]
    line: crate::depinning::BoundaryLine,
}

#[derive(Serialize)]
struct DepinningFitReport {
    #[serde(rename = "t_p_K")]
    t_p: f64,
    #[serde(rename = "v_th_V")]
    v_th: f64,
    mu: f64,
    n_points: usize,
}

#[derive(Serialize)]
struct ClassifyReport {
    regime: Regime,
    #[serde(rename = "v_V")]
    v: f64,
    #[serde(rename = "t_K")]
    t: f64,
    #[serde(rename = "omega0_rad_per_s")]
    omega0: f64,
}

#[derive(Serialize)]
struct HeatReport {
    #[serde(rename = "power_W")]
    power: f64,
    #[serde(rename = "delta_t_K")]
    delta_t: f64,
    #[serde(rename = "t_eff_C", skip_serializing_if = "Option::is_none")]
    t_eff_c: Option<f64>,
}

#[derive(Serialize)]
struct SimmonsReport {
    #[serde(rename = "breakdown_V")]
    breakdown: Option<f64>,
    n_points: usize,
    fit: SimmonsFit,
}

#[derive(Serialize)]
struct OhmicReport {
    #[serde(rename = "r_ohm")]
    r: f64,
    #[serde(rename = "window_V")]
    window: f64,
}

#[derive(Serialize)]
struct BreakdownReport {
    #[serde(rename = "v_bd_V")]
    v_bd: Option<f64>,
}

#[derive(Serialize)]
struct SpectrumReport {
    params: TransmonParams,
    #[serde(rename = "transitions_Hz")]
    transitions: Vec<f64>,
    n_charge: usize,
    #[serde(rename = "f01_Hz")]
    f01: f64,
    #[serde(rename = "anharmonicity_Hz")]
    anharmonicity: f64,
}

#[derive(Serialize)]
struct TauReport {
    #[serde(rename = "tau_s")]
    tau: f64,
    lambda_low: f64,
    lambda_high: f64,
}

fn read_records(paths: &[PathBuf]) -> std::result::Result<Vec<TuningRecord>, Failure> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut entries: Vec<PathBuf> = fs::read_dir(p)
                .map_err(Error::from)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "csv"))
                .collect();
            entries.sort();
            files.extend(entries);
        } else {
            files.push(p.clone());
        }
    }
    let mut records = Vec::new();
    for f in files {
        if f.extension().is_some_and(|x| x == "json") {
            records.extend(io::parse_records_json(&io::read_text(&f)?)?);
        } else {
            records.push(TuningRecord::from_curve(&io::read_tuning_csv(&f)?)?);
        }
    }
    Ok(records)
}

fn read_grid(path: &Path) -> std::result::Result<PhaseGrid, Failure> {
    Ok(serde_json::from_str(&io::read_text(path)?).map_err(Error::from)?)
}

fn read_curve(path: &Path) -> std::result::Result<TuningCurve, Failure> {
    Ok(io::read_tuning_csv(path)?)
}

fn read_trace(path: &Path) -> std::result::Result<IvTrace, Failure> {
    Ok(io::read_iv_csv(path)?)
}

fn need<T>(value: Option<T>, flag: &str, why: &str) -> std::result::Result<T, Failure> {
    value.ok_or_else(|| usage(format!("--{flag} is required {why}")))
}

fn seed_or_default(seed: Option<u64>) -> std::result::Result<u64, Failure> {
    match seed {
        Some(s) => Ok(s),
        None => Ok(default_seed()?),
    }
}

fn dispatch(command: Command) -> Outcome {
    match command {
        Command::FitCurve(a) => {
            let curve = read_curve(&a.input)?;
            json(&CurveFitReport {
                junction: curve.junction_id.clone(),
                conditions: curve.conditions,
                fit: fit_log_model(&curve)?,
            })
        }
        Command::CompareFits(a) => json(&compare_models(&read_curve(&a.input)?)?),
        Command::PhaseGrid(a) => {
            let mut records = read_records(&a.input)?;
            if records.is_empty() {
                return Err(Failure::Data(Error::Precondition("no tuning records found".into())));
            }
            let f = match a.f_hz {
                Some(f) => {
                    records.retain(|r| (r.conditions.f_drive - f).abs() <= 1e-9 * f.abs());
                    f
                }
                None => records[0].conditions.f_drive,
            };
            json(&build_grid(&records, f)?)
        }
        Command::Contour(a) => {
            let grid = read_grid(&a.grid)?;
            json(&ContourReport {
                level: a.level,
                f_drive: grid.f_drive(),
                points: extract_contour(&grid, a.level)?,
            })
        }
        Command::BoundaryLine(a) => {
            let grid = read_grid(&a.grid)?;
            let points = extract_contour(&grid, a.level)?;
            json(&BoundaryReport {
                level: a.level,
                n_points: points.len(),
                line: fit_boundary_line(&points, grid.f_drive())?,
            })
        }
        Command::FitBreakdownBoundary(a) => {
            let points = io::read_breakdown_csv(&a.input)?;
            let p = fit_depinning_boundary(&points, a.mu)?;
            json(&DepinningFitReport {
                t_p: p.t_p,
                v_th: p.v_th,
                mu: p.mu,
                n_points: points.len(),
            })
        }
        Command::Classify(a) => {
            let p = a.depinning.params()?;
            let t = celsius_to_kelvin(a.t_c);
            let omega0 = std::f64::consts::TAU * a.f_hz;
            json(&ClassifyReport {
                regime: classify_point(a.v, t, omega0, &p)?,
                v: a.v,
                t,
                omega0,
            })
        }
        Command::SelfHeat(a) => {
            let heat = a.heat.params()?;
            let power = heating_power(a.v, a.r_ohm)?;
            let delta_t = mean_temperature_rise(power, &heat)?;
            json(&HeatReport {
                power,
                delta_t,
                t_eff_c: a.t_ambient_c.map(|t| t + delta_t),
            })
        }
        Command::DeformGrid(a) => {
            let grid = read_grid(&a.grid)?;
            json(&apply_self_heating(&grid, a.r_ohm, &a.heat.params()?)?)
        }
        Command::SimmonsFit(a) => {
            let trace = read_trace(&a.input)?;
            let breakdown = detect_breakdown(&trace, a.jump_factor)?;
            let used = match breakdown {
                Some(v) => trace.truncated_below(v)?,
                None => trace,
            };
            json(&SimmonsReport {
                breakdown,
                n_points: used.len(),
                fit: fit_simmons(&used, a.area)?,
            })
        }
        Command::OhmicFit(a) => json(&OhmicReport {
            r: ohmic_fit(&read_trace(&a.input)?, a.window)?,
            window: a.window,
        }),
        Command::DetectBreakdown(a) => json(&BreakdownReport {
            v_bd: detect_breakdown(&read_trace(&a.input)?, a.jump_factor)?,
        }),
        Command::BreakdownMap(a) => {
            let maps = BarrierMaps::new(io::read_matrix_csv(&a.thickness)?, io::read_matrix_csv(&a.strength)?)?;
            json(&BreakdownReport {
                v_bd: Some(breakdown_from_maps(&maps)),
            })
        }
        Command::TransmonSpectrum(a) => {
            let p = a.transmon.params()?;
            let s = spectrum(&p)?;
            json(&SpectrumReport {
                params: p,
                f01: s.f01(),
                anharmonicity: s.anharmonicity(),
                n_charge: s.n_charge,
                transitions: s.transitions,
            })
        }
        Command::InferEjec(a) => json(&infer_ej_ec(a.f01_hz, a.f12_hz, a.n_charge)?),
        Command::HarmonicsReport(a) => {
            json(&harmonic_deviation_report(&a.measured_hz, &a.transmon.params()?)?)
        }
        Command::EstimateTau(a) => {
            let tau = estimate_tau(a.f_low, a.f_high, a.intercept_low, a.intercept_high)?;
            json(&TauReport {
                tau,
                lambda_low: lambda_factor(std::f64::consts::TAU * a.f_low, tau)?,
                lambda_high: lambda_factor(std::f64::consts::TAU * a.f_high, tau)?,
            })
        }
        Command::Synth(a) => synth(a),
        Command::SimulateCampaign(a) => {
            let spec = CampaignSpec {
                v_values: a.v_values,
                t_values: a.t_values_c.iter().map(|t| celsius_to_kelvin(*t)).collect(),
                f_drive: a.f_hz,
                junctions_per_cell: a.junctions_per_cell,
                depinning: a.depinning.params()?,
                speed_scale: a.speed_scale,
                noise: a.noise,
                seed: seed_or_default(a.seed)?,
                duration: a.duration,
                n_samples: a.n_samples,
            };
            let runs = simulate_campaign(&spec)?;
            if let Some(dir) = &a.curves_dir {
                fs::create_dir_all(dir).map_err(Error::from)?;
                for run in &runs {
                    let path = dir.join(format!("{}.csv", run.curve.junction_id));
                    fs::write(path, io::format_tuning_csv(&run.curve)).map_err(Error::from)?;
                }
            }
            json(&records_from_runs(&runs)?)
        }
        Command::SimulateTarget(a) => {
            let base = a.preset.then(TargetSpec::overshoot_preset);
            let why = "unless --preset is given";
            let pick = |v: Option<f64>, from: Option<f64>, flag: &str| need(v.or(from), flag, why);
            let mut spec = TargetSpec {
                start_r: pick(a.start_r_ohm, base.map(|b| b.start_r), "start-r-ohm")?,
                target_fraction: pick(a.target, base.map(|b| b.target_fraction), "target")?,
                a: pick(a.a, base.map(|b| b.a), "a")?,
                c: pick(a.c, base.map(|b| b.c), "c")?,
                overshoot_rate: 0.0,
            };
            spec.overshoot_rate = match a.calibrate_to {
                Some(obs) => calibrate_overshoot_rate(spec.target_fraction, obs, spec.a, spec.c)?,
                None => pick(a.overshoot_rate, base.map(|b| b.overshoot_rate), "overshoot-rate")?,
            };
            json(&simulate_targeted_run(&spec)?)
        }
    }
}

fn synth(a: SynthArgs) -> Outcome {
    let seed = seed_or_default(a.seed)?;
    match a.kind {
        SynthKind::Iv => {
            let why = "for --kind iv";
            let mut s = IvSynth::new(
                need(a.d_nm, "d-nm", why)? * 1e-9,
                need(a.phi_ev, "phi-ev", why)?,
                need(a.area, "area", why)?,
                a.v_max,
            );
            s.n_points = a.n_points;
            s.noise = a.noise;
            s.v_breakdown = a.v_bd;
            s.r_short = a.r_short;
            s.seed = seed;
            Ok(io::format_iv_csv(&synth_iv_trace(&s)?).into_bytes())
        }
        kind => {
            let why = "for tuning curves";
            let conditions = RunConditions {
                v_amp: need(a.v_amp, "v-amp", why)?,
                t_set: celsius_to_kelvin(need(a.t_set_c, "t-set-c", why)?),
                f_drive: need(a.f_hz, "f-hz", why)?,
            };
            let amp = need(a.a, "a", why)?;
            let mut curve = if matches!(kind, SynthKind::Log) {
                let c = need(a.c, "c", "for --kind log")?;
                synth_tuning_curve(amp, c, a.duration, a.n_samples, a.noise, seed, conditions)?
            } else {
                let n = need(a.n, "n", "for --kind power")?;
                synth_power_curve(amp, n, a.duration, a.n_samples, a.noise, seed, conditions)?
            };
            curve.junction_id = a.junction;
            Ok(io::format_tuning_csv(&curve).into_bytes())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv: Vec<String> = std::iter::once("depinner").chain(args.iter().copied()).map(String::from).collect();
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn unknown_subcommand_is_usage_error() {
        let (code, _, err) = run_capture(&["frobnicate"]);
        assert_eq!(code, 1);
        assert!(err.contains("Usage"), "{err}");
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("estimate-tau"));
    }

    #[test]
    fn estimate_tau_order() {
        let (code, out, _) = run_capture(&[
            "estimate-tau",
            "--f-low",
            "103",
            "--f-high",
            "1000",
            "--intercept-low",
            "424.95",
            "--intercept-high",
            "437.95",
        ]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        let tau = v["tau_s"].as_f64().unwrap();
        assert!(tau > 1e-37 && tau < 1e-35, "{tau}");
    }

    #[test]
    fn data_errors_exit_two() {
        let (code, _, err) = run_capture(&[
            "estimate-tau",
            "--f-low",
            "103",
            "--f-high",
            "1000",
            "--intercept-low",
            "430",
            "--intercept-high",
            "430",
        ]);
        assert_eq!(code, 2, "{err}");
        let (code, _, _) = run_capture(&["fit-curve", "--input", "/nonexistent/curve.csv"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn missing_conditional_flag_is_usage_error() {
        let (code, _, err) = run_capture(&["synth", "--kind", "log", "--a", "0.05"]);
        assert_eq!(code, 1);
        assert!(err.contains("--v-amp"), "{err}");
    }

    #[test]
    fn config_fills_missing_flags() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("cfg.json");
        fs::write(
            &cfg,
            r#"{"f_low": 103, "f_high": 1000, "intercept_low": 424.95, "intercept_high": 999, "unrelated": 1}"#,
        )
        .unwrap();
        let cfg = cfg.to_str().unwrap();
        let (code, from_cfg, err) = run_capture(&["estimate-tau", "--config", cfg, "--intercept-high", "437.95"]);
        assert_eq!(code, 0, "{err}");
        let (_, direct, _) = run_capture(&[
            "estimate-tau",
            "--f-low",
            "103",
            "--f-high",
            "1000",
            "--intercept-low",
            "424.95",
            "--intercept-high",
            "437.95",
        ]);
        assert_eq!(from_cfg, direct);
    }

    #[test]
    fn config_lists_and_booleans() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("cfg.json");
        fs::write(
            &cfg,
            r#"{"preset": true, "measured_hz": [5.5e9, 5.2e9], "ec_hz": 166e6, "ej_hz": 23.2e9}"#,
        )
        .unwrap();
        let cfg = cfg.to_str().unwrap();
        let (code, out, err) = run_capture(&["simulate-target", "--config", cfg]);
        assert_eq!(code, 0, "{err}");
        assert!(out.contains("final_fraction"));
        let (code, out, err) = run_capture(&["harmonics-report", "--config", cfg]);
        assert_eq!(code, 0, "{err}");
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 2);
    }
}
