#![allow(dead_code)]

use std::path::PathBuf;

use depinner::phase_diagram::{build_grid, Outcome, PhaseGrid, TuningRecord};
use depinner::workbench::campaign::CampaignSpec;
use depinner::workbench::cli;
use depinner::workbench::synth::synth_tuning_curve;
use depinner::{fit_log_model, DepinningParams, RunConditions};

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data")
}

pub fn data(rel: &str) -> String {
    data_dir().join(rel).to_string_lossy().into_owned()
}

/// Runs the CLI in-process; returns (exit code, stdout, stderr).
pub fn run_cli(args: &[&str]) -> (i32, Vec<u8>, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("depinner").chain(args.iter().copied());
    let code = cli::run(argv, &mut out, &mut err);
    (code, out, String::from_utf8(err).unwrap())
}

pub fn run_ok(args: &[&str]) -> Vec<u8> {
    let (code, out, err) = run_cli(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    out
}

/// Campaign whose creep band crosses a 20–140 °C, 0.4–1.3 V grid.
pub fn frequency_campaign(f_drive: f64) -> CampaignSpec {
    CampaignSpec {
        v_values: (0..37).map(|k| 0.4 + 0.025 * k as f64).collect(),
        t_values: (0..13).map(|k| 293.15 + 10.0 * k as f64).collect(),
        f_drive,
        junctions_per_cell: 3,
        depinning: DepinningParams::new(1000.0, 1.3, 1.0, 1e-5).unwrap(),
        speed_scale: 1e-3,
        noise: 0.005,
        seed: 2024,
        duration: 150.0,
        n_samples: 150,
    }
}

/// Records whose fitted speeds follow the plane
/// `a = slope_a · (T − (intercept + slope·V)) + level`, so the `level` contour is
/// the line `T = intercept + slope·V`.
pub fn planar_records(intercept: f64, slope: f64, level: f64, noise: f64, seed: u64) -> Vec<TuningRecord> {
    let slope_a = 1e-3;
    let mut records = Vec::new();
    for i in 0..17 {
        let v = 0.4 + 0.05 * i as f64;
        for j in 0..17 {
            let t = 280.0 + 10.0 * j as f64;
            let a = slope_a * (t - (intercept + slope * v)) + level;
            for k in 0..3 {
                let cond = RunConditions {
                    v_amp: v,
                    t_set: t,
                    f_drive: 1000.0,
                };
                let s = seed + ((i * 17 + j) * 3 + k) as u64;
                let curve = synth_tuning_curve(a, 1.0, 150.0, 150, noise, s, cond).unwrap();
                records.push(TuningRecord {
                    junction_id: format!("P{i:02}{j:02}{k}"),
                    conditions: cond,
                    outcome: Outcome::Tuned(fit_log_model(&curve).unwrap()),
                });
            }
        }
    }
    records
}

pub fn planar_grid(intercept: f64, slope: f64, noise: f64) -> PhaseGrid {
    build_grid(&planar_records(intercept, slope, 0.01, noise, 5), 1000.0).unwrap()
}

/// One invocation per subcommand, using bundled data. Intermediate grid and
/// record files are written into `dir` first.
pub fn subcommand_invocations(dir: &std::path::Path) -> Vec<Vec<String>> {
    let p = |name: &str| dir.join(name).to_string_lossy().into_owned();
    let records = p("records.json");
    let grid = p("grid.json");
    run_ok(&["simulate-campaign", "--config", &data("campaign_1000Hz.json"), "--out", &records]);
    run_ok(&["phase-grid", "--input", &records, "--out", &grid]);

    let curve = data("tuning/tuning_80C_0.95V_81Hz.csv");
    let iv = data("iv/iv_A.csv");
    let points = data("breakdown_points.csv");
    let thickness = data("barrier/thickness_m.csv");
    let strength = data("barrier/strength_V_per_m.csv");
    let campaign = data("campaign_103Hz.json");
    let lists: Vec<Vec<&str>> = vec![
        vec!["fit-curve", "--input", &curve],
        vec!["compare-fits", "--input", &curve],
        vec!["phase-grid", "--input", &records],
        vec!["contour", "--grid", &grid, "--level", "0.01"],
        vec!["boundary-line", "--grid", &grid],
        vec!["fit-breakdown-boundary", "--input", &points],
        vec!["classify", "--v", "0.7", "--t-c", "80", "--f-hz", "1000", "--t-p-k", "1000", "--v-th", "1.3", "--tau", "1e-5"],
        vec!["self-heat", "--v", "1", "--r-ohm", "5000", "--t-ambient-c", "80"],
        vec!["deform-grid", "--grid", &grid, "--r-ohm", "5000"],
        vec!["simmons-fit", "--input", &iv, "--area", "8.86e-14"],
        vec!["ohmic-fit", "--input", &iv],
        vec!["detect-breakdown", "--input", &iv],
        vec!["breakdown-map", "--thickness", &thickness, "--strength", &strength],
        vec!["transmon-spectrum", "--ec-hz", "166e6", "--ej-hz", "23.2e9"],
        vec!["infer-ejec", "--f01-hz", "5.385e9", "--f12-hz", "5.2e9"],
        vec!["harmonics-report", "--ec-hz", "166e6", "--ej-hz", "23.2e9", "--measured-hz", "5.38e9,5.2e9,5.0e9"],
        vec!["estimate-tau", "--f-low", "103", "--f-high", "1000", "--intercept-low", "424.95", "--intercept-high", "437.95"],
        vec!["synth", "--kind", "log", "--a", "0.04", "--c", "1e11", "--noise", "0.01", "--seed", "3", "--v-amp", "0.95", "--t-set-c", "80", "--f-hz", "81"],
        vec!["simulate-campaign", "--config", &campaign],
        vec!["simulate-target", "--preset"],
    ];
    lists.into_iter().map(|l| l.into_iter().map(String::from).collect()).collect()
}
