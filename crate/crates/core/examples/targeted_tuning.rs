//! Tuning a junction to a target resistance change and the overshoot that
//! follows once the drive stops.
//!
//! ```text
//! cargo run --example targeted_tuning [-- <observed fraction>]
//! ```

use depinner::workbench::campaign::{calibrate_overshoot_rate, simulate_targeted_run, TargetSpec};

fn main() -> depinner::Result<()> {
    let preset = TargetSpec::overshoot_preset();
    let run = simulate_targeted_run(&preset)?;
    println!(
        "target {:.1} % reached at {:.0} s, settled at {:.1} % ({:.0} Ω from {:.0} Ω)",
        100.0 * preset.target_fraction,
        run.t_hit,
        100.0 * run.final_fraction,
        run.final_r,
        preset.start_r
    );

    let observed: f64 = match std::env::args().nth(1) {
        Some(s) => s.parse().expect("observed fraction must be a number"),
        None => 0.32,
    };
    let mut spec = preset;
    spec.overshoot_rate = calibrate_overshoot_rate(spec.target_fraction, observed, spec.a, spec.c)?;
    let run = simulate_targeted_run(&spec)?;
    println!(
        "overshoot rate {:.4} settles at {:.1} %",
        spec.overshoot_rate,
        100.0 * run.final_fraction
    );
    let tail = &run.curve[run.curve.len() - 60..];
    for s in tail.iter().step_by(10).chain(tail.last()) {
        println!("  t = {:8.1} s  r = {:.4}", s.t, s.r);
    }
    Ok(())
}
