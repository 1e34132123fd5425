//! Log-law and power-law fits of tuning curves, plus failure detection.
//!
//! ```text
//! cargo run --example tuning_fits [-- curve.csv ...]
//! ```

use std::path::PathBuf;

use depinner::curve_fitting::DEFAULT_COLLAPSE_FRACTION;
use depinner::workbench::io::read_tuning_csv;
use depinner::{compare_models, detect_failure};

fn main() -> depinner::Result<()> {
    let mut paths: Vec<PathBuf> = std::env::args().skip(1).map(PathBuf::from).collect();
    if paths.is_empty() {
        let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/tuning");
        paths = ["8", "81", "811"]
            .iter()
            .map(|f| dir.join(format!("tuning_80C_0.95V_{f}Hz.csv")))
            .collect();
    }

    for path in paths {
        let curve = read_tuning_csv(&path)?;
        let cmp = compare_models(&curve)?;
        println!("{} ({} samples, {} Hz)", curve.junction_id, curve.len(), curve.conditions.f_drive);
        println!("  log:   a = {:.4}, c = {:.3e} /s, rss = {:.2e}", cmp.log.a, cmp.log.c, cmp.log.rss);
        println!("  power: a = {:.4}, n = {:.3}, rss = {:.2e}", cmp.power.a, cmp.power.n, cmp.power.rss);
        println!("  preferred: {:?}", cmp.preferred);
        match detect_failure(&curve, DEFAULT_COLLAPSE_FRACTION)? {
            Some(t) => println!("  shorted at {t:.1} s"),
            None => println!("  no failure"),
        }
    }
    Ok(())
}
