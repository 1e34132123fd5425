//! Regenerates the synthetic files under `data/`.
//!
//! ```text
//! cargo run --example generate_sample_data [-- <output dir>]
//! ```
//!
//! Everything written here is synthetic. The output is byte-identical on
//! every run.

use std::fs;
use std::path::{Path, PathBuf};

use depinner::constants::celsius_to_kelvin;
use depinner::depinning::{depinning_voltage, DepinningParams};
use depinner::workbench::io::{format_breakdown_csv, format_iv_csv, format_matrix_csv, format_tuning_csv};
use depinner::workbench::rng::SeededRng;
use depinner::workbench::synth::{synth_iv_trace, synth_tuning_curve, IvSynth};
use depinner::RunConditions;
use nalgebra::DMatrix;

const BANNER: &str = "# synthetic data written by examples/generate_sample_data.rs\n";
const AREA_M2: f64 = 8.86e-14;

fn write(path: &Path, body: &str) -> std::io::Result<()> {
    fs::create_dir_all(path.parent().unwrap())?;
    fs::write(path, body)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root: PathBuf = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("data"));

    // Tuning at 80 °C and 0.95 V: slower at higher drive frequency.
    for (f_hz, a) in [(8.0, 0.06), (81.0, 0.04), (811.0, 0.02)] {
        let cond = RunConditions {
            v_amp: 0.95,
            t_set: celsius_to_kelvin(80.0),
            f_drive: f_hz,
        };
        let c = (1.0_f64 / a).exp();
        let mut curve = synth_tuning_curve(a, c, 150.0, 150, 0.002, f_hz as u64, cond)?;
        curve.junction_id = format!("S{f_hz}");
        let body = format!("{BANNER}{}", format_tuning_csv(&curve));
        write(&root.join(format!("tuning/tuning_80C_0.95V_{f_hz}Hz.csv")), &body)?;
    }

    // DC sweeps through breakdown.
    for (name, d_nm, phi, v_bd, seed) in [("A", 1.0, 1.1, 1.30, 1), ("B", 0.95, 1.2, 1.45, 2), ("C", 1.05, 1.0, 1.20, 3)] {
        let mut s = IvSynth::new(d_nm * 1e-9, phi, AREA_M2, 1.6);
        s.n_points = 161;
        s.noise = 0.005;
        s.v_breakdown = Some(v_bd);
        s.seed = seed;
        let body = format!("{BANNER}{}", format_iv_csv(&synth_iv_trace(&s)?));
        write(&root.join(format!("iv/iv_{name}.csv")), &body)?;
    }

    // Breakdown voltages from 20 °C to 160 °C on the depinning boundary.
    let p = DepinningParams::new(900.0, 1.6, 1.0, 1e-30)?;
    let mut rng = SeededRng::new(7);
    let mut points = Vec::new();
    for k in 0..15 {
        let t = celsius_to_kelvin(20.0 + 10.0 * k as f64);
        let v = depinning_voltage(t, &p)? * (1.0 + 0.005 * rng.gaussian());
        points.push((t, v));
    }
    write(&root.join("breakdown_points.csv"), &format!("{BANNER}{}", format_breakdown_csv(&points)))?;

    // Barrier maps: 1 nm ± 10 % thickness, 1.4 GV/m ± 5 % strength.
    let mut rng = SeededRng::new(9);
    let thickness = DMatrix::from_fn(16, 16, |_, _| 1.0e-9 * (1.0 + 0.1 * rng.gaussian()).max(0.5));
    let strength = DMatrix::from_fn(16, 16, |_, _| 1.4e9 * (1.0 + 0.05 * rng.gaussian()).max(0.5));
    write(&root.join("barrier/thickness_m.csv"), &format!("{BANNER}{}", format_matrix_csv(&thickness)))?;
    write(&root.join("barrier/strength_V_per_m.csv"), &format!("{BANNER}{}", format_matrix_csv(&strength)))?;

    // Campaign settings in the flag-mirroring config format.
    let v_values: Vec<f64> = (0..37).map(|k| ((0.4 + 0.025 * k as f64) * 1e6).round() / 1e6).collect();
    let t_values_c: Vec<f64> = (0..13).map(|k| 20.0 + 10.0 * k as f64).collect();
    for f_hz in [103.0, 1000.0] {
        let config = serde_json::json!({
            "_note": BANNER.trim_start_matches("# ").trim_end(),
            "v_values": v_values,
            "t_values_c": t_values_c,
            "f_hz": f_hz,
            "junctions_per_cell": 3,
            "t_p_k": 1000.0,
            "v_th": 1.3,
            "mu": 1.0,
            "tau": 1e-5,
            "speed_scale": 1e-3,
            "noise": 0.005,
            "seed": 2024,
        });
        let body = serde_json::to_string_pretty(&config)? + "\n";
        write(&root.join(format!("campaign_{f_hz}Hz.json")), &body)?;
    }
    Ok(())
}
