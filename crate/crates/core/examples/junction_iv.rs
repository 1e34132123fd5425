//! IV characterization: breakdown detection, ohmic and Simmons fits on the
//! bundled traces, breakdown from barrier maps, and the series RC cutoff.
//!
//! ```text
//! cargo run --example junction_iv
//! ```

use std::path::Path;

use depinner::junction_iv::{
    breakdown_from_maps, rc_cutoff, BarrierMaps, DEFAULT_JUMP_FACTOR, DEFAULT_OHMIC_WINDOW,
};
use depinner::workbench::io::{read_iv_csv, read_matrix_csv};
use depinner::{detect_breakdown, fit_simmons, ohmic_fit};

const AREA_M2: f64 = 8.86e-14;

fn main() -> depinner::Result<()> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");

    for name in ["A", "B", "C"] {
        let trace = read_iv_csv(data.join(format!("iv/iv_{name}.csv")))?;
        let r0 = ohmic_fit(&trace, DEFAULT_OHMIC_WINDOW)?;
        let breakdown = detect_breakdown(&trace, DEFAULT_JUMP_FACTOR)?;
        let used = match breakdown {
            Some(v) => trace.truncated_below(v)?,
            None => trace,
        };
        let fit = fit_simmons(&used, AREA_M2)?;
        println!(
            "junction {name}: R0 = {:.1} kΩ, breakdown {}, d = {:.3} nm, φ = {:.3} eV, cond = {:.0}{}",
            r0 / 1e3,
            breakdown.map_or("none".into(), |v| format!("{v:.3} V")),
            fit.d * 1e9,
            fit.phi,
            fit.condition_number,
            if fit.suspect { " (suspect)" } else { "" },
        );
    }

    let maps = BarrierMaps::new(
        read_matrix_csv(data.join("barrier/thickness_m.csv"))?,
        read_matrix_csv(data.join("barrier/strength_V_per_m.csv"))?,
    )?;
    println!("breakdown from barrier maps: {:.3} V", breakdown_from_maps(&maps));

    println!("RC cutoff, 15 kΩ with 240 pF: {:.1} kHz", rc_cutoff(15e3, 240e-12)? / 1e3);
    Ok(())
}
