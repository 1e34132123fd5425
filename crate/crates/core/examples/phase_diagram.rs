//! Simulated tuning campaigns at two drive frequencies, their speed/failure
//! grids and boundary lines, and the hop timescale recovered from the two
//! intercepts.
//!
//! ```text
//! cargo run --release --example phase_diagram
//! ```

use depinner::constants::celsius_to_kelvin;
use depinner::phase_diagram::DEFAULT_CONTOUR_LEVEL;
use depinner::workbench::campaign::{records_from_runs, simulate_campaign, CampaignSpec};
use depinner::{
    build_grid, cell_speed, estimate_tau, extract_contour, failure_fraction_map, fit_boundary_line,
    BoundaryLine, DepinningParams, PhaseGrid,
};

fn campaign(f_drive: f64) -> depinner::Result<CampaignSpec> {
    Ok(CampaignSpec {
        v_values: (0..37).map(|k| 0.4 + 0.025 * k as f64).collect(),
        t_values: (0..13).map(|k| celsius_to_kelvin(20.0 + 10.0 * k as f64)).collect(),
        f_drive,
        junctions_per_cell: 3,
        depinning: DepinningParams::new(1000.0, 1.3, 1.0, 1e-5)?,
        speed_scale: 1e-3,
        noise: 0.005,
        seed: 2024,
        duration: 150.0,
        n_samples: 150,
    })
}

fn analyse(f_drive: f64) -> depinner::Result<(PhaseGrid, BoundaryLine)> {
    let runs = simulate_campaign(&campaign(f_drive)?)?;
    let grid = build_grid(&records_from_runs(&runs)?, f_drive)?;
    let contour = extract_contour(&grid, DEFAULT_CONTOUR_LEVEL)?;
    let line = fit_boundary_line(&contour, f_drive)?;
    Ok((grid, line))
}

/// One character per cell: `x` failed, `.` pinned, `#` tuning. Rows are
/// temperatures, hottest first.
fn print_map(grid: &PhaseGrid) {
    let failures = failure_fraction_map(grid);
    for j in (0..grid.t_axis().len()).rev() {
        let row: String = (0..grid.v_axis().len())
            .map(|i| match cell_speed(grid, i, j) {
                Err(_) => 'x',
                Ok(a) if a > 0.0 && failures[i][j] < 0.5 => '#',
                Ok(_) => '.',
            })
            .collect();
        println!("  {:6.1} K  {row}", grid.t_axis()[j]);
    }
}

fn main() -> depinner::Result<()> {
    let (grid_low, low) = analyse(103.0)?;
    let (grid_high, high) = analyse(1000.0)?;

    for (grid, line) in [(&grid_low, &low), (&grid_high, &high)] {
        println!("{} Hz: T = {:.1} K {:+.1} K/V · V", line.frequency, line.intercept_t, line.slope);
        print_map(grid);
    }

    // The creep boundary is curved, and the two contours cover different
    // voltage ranges, so straight-line intercepts do not scale exactly as
    // 1/Λ. The estimate is an order-of-magnitude tool at best.
    let tau = estimate_tau(103.0, 1000.0, low.intercept_t, high.intercept_t)?;
    let truth = campaign(103.0)?.depinning.tau;
    println!("hop timescale from intercepts: {tau:.3e} s (campaign generated with {truth:.0e} s)");
    Ok(())
}
