//! Depinning and creep boundaries, point classification, and a boundary fit
//! to the bundled breakdown points.
//!
//! ```text
//! cargo run --example depinning_boundary
//! ```

use std::f64::consts::TAU;

use depinner::constants::kelvin_to_celsius;
use depinner::workbench::io::read_breakdown_csv;
use depinner::{
    classify_point, creep_temperature, depinning_temperature, fit_depinning_boundary, DepinningParams,
};

fn main() -> depinner::Result<()> {
    let p = DepinningParams::new(1000.0, 1.3, 1.0, 1e-5)?;

    println!("   V    T_dep/K  T_creep(103 Hz)  T_creep(1 kHz)");
    for k in 1..=12 {
        let v = 0.1 * k as f64;
        println!(
            "{v:5.2}  {:8.1}  {:15.1}  {:14.1}",
            depinning_temperature(v, &p)?,
            creep_temperature(v, &p, TAU * 103.0)?,
            creep_temperature(v, &p, TAU * 1000.0)?,
        );
    }

    for (v, t) in [(0.7, 330.0), (0.7, 380.0), (0.9, 300.0), (1.4, 300.0)] {
        let at_dc = classify_point(v, t, 0.0, &p)?;
        let at_1k = classify_point(v, t, TAU * 1000.0, &p)?;
        println!("({v} V, {t} K): DC {at_dc:?}, 1 kHz {at_1k:?}");
    }

    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/breakdown_points.csv");
    let points = read_breakdown_csv(path)?;
    let fit = fit_depinning_boundary(&points, 1.0)?;
    println!(
        "fit to {} breakdown points: T_P = {:.1} K ({:.1} °C), V_th = {:.3} V",
        points.len(),
        fit.t_p,
        kelvin_to_celsius(fit.t_p),
        fit.v_th
    );
    Ok(())
}
