//! Joule heating of a junction under the tuning bias, and how it shifts a
//! phase grid.
//!
//! ```text
//! cargo run --example self_heating
//! ```

use depinner::constants::celsius_to_kelvin;
use depinner::phase_diagram::{GridCell, PhaseGrid};
use depinner::self_heating::heating_power;
use depinner::{apply_self_heating, effective_temperature, mean_temperature_rise, HeatParams};

fn main() -> depinner::Result<()> {
    let heat = HeatParams::default();

    let p = heating_power(1.0, 5000.0)?;
    println!("1 V on 5 kΩ: P = {p:e} W, ΔT = {:.2} K", mean_temperature_rise(p, &heat)?);

    println!("  R/kΩ   ΔT at 0.8 V   ΔT at 1.2 V");
    for r in [1e3, 2e3, 5e3, 10e3, 20e3] {
        let rise = |v: f64| -> depinner::Result<f64> { mean_temperature_rise(heating_power(v, r)?, &heat) };
        println!("  {:5.0}   {:11.2}   {:11.2}", r / 1e3, rise(0.8)?, rise(1.2)?);
    }

    let sapphire_80c = effective_temperature(celsius_to_kelvin(80.0), 1.0, 5000.0, &heat)?;
    println!("80 °C stage, 1 V on 5 kΩ: junction at {sapphire_80c:.2} K");

    let cells = (0..6)
        .map(|_| GridCell {
            a_values: vec![0.02; 3],
            n_failed: 0,
            n_total: 3,
        })
        .collect();
    let grid = PhaseGrid::new(vec![0.6, 0.9, 1.2], vec![330.0, 350.0], 1000.0, cells)?;
    let deformed = apply_self_heating(&grid, 5000.0, &heat)?;
    for c in &deformed.cells {
        println!("  ({:.1} V, {:.0} K) -> {:.2} K", c.v, c.t_set, c.t_eff);
    }
    Ok(())
}
