//! Charge-basis transmon spectra, E_J/E_C inference from two transitions,
//! and deviations of a measured ladder from the model.
//!
//! ```text
//! cargo run --example transmon
//! ```

use depinner::{harmonic_deviation_report, infer_ej_ec, spectrum, TransmonParams};

fn main() -> depinner::Result<()> {
    for (e_c, e_j) in [(166e6, 23.2e9), (168e6, 22.2e9)] {
        let p = TransmonParams::new(e_c, e_j)?;
        let s = spectrum(&p)?;
        println!(
            "E_C = {:.0} MHz, E_J = {:.1} GHz (ratio {:.0}), basis ±{}",
            e_c / 1e6,
            e_j / 1e9,
            p.ej_over_ec(),
            s.n_charge
        );
        for (k, f) in s.transitions.iter().enumerate() {
            println!("  f{}{} = {:.4} GHz", k, k + 1, f / 1e9);
        }
        println!("  anharmonicity {:.1} MHz", s.anharmonicity() / 1e6);

        let back = infer_ej_ec(s.transitions[0], s.transitions[1], TransmonParams::DEFAULT_N_CHARGE)?;
        println!("  inferred back: E_C = {:.3} MHz, E_J = {:.4} GHz", back.e_c / 1e6, back.e_j / 1e9);
    }

    // A made-up measured ladder, slightly off the model.
    let p = TransmonParams::new(166e6, 23.2e9)?;
    let measured = [5.382e9, 5.199e9, 5.004e9, 4.790e9];
    for d in harmonic_deviation_report(&measured, &p)? {
        println!(
            "  transition {}: measured {:.4} GHz, model {:.4} GHz, Δ = {:+.2} MHz",
            d.transition,
            d.measured / 1e9,
            d.predicted / 1e9,
            d.delta / 1e6
        );
    }
    Ok(())
}
