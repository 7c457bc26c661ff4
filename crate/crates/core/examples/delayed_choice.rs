//! Wheeler's delayed choice with a weak laser: which-way marking by the
//! half-wave plate angle, with and without the second beam splitter.
//!
//! ```text
//! cargo run --release --example delayed_choice
//! ```

use std::f64::consts::PI;

use zpf_optics::stats::visibility;
use zpf_optics::studies::{dc_curve, expected_counts_minus_dark, StudyOptions};

fn main() -> zpf_optics::Result<()> {
    let trials = 1_000_000;
    let opts = StudyOptions::new(7, trials);
    let phis: Vec<f64> = (0..=12).map(|k| k as f64 * PI / 6.0).collect();
    for theta_deg in [0.0_f64, 30.0, 45.0] {
        let curve = dc_curve(0.1, theta_deg.to_radians(), true, &phis, &opts)?;
        let counts = expected_counts_minus_dark(&curve, trials, std::f64::consts::FRAC_1_SQRT_2, 1.95)?;
        println!("theta = {theta_deg} deg, visibility of N p1 - N p_d = {:.3}", visibility(&counts));
        for p in &curve {
            println!(
                "  phi = {:6.1} deg  mc = {:.6}  closed = {:.6}",
                p.phi.to_degrees(),
                p.mc.estimate,
                p.closed
            );
        }
    }
    let open = dc_curve(0.1, 0.0, false, &phis[..4], &opts)?;
    println!("without BS2 the closed form is flat: {:?}", open.iter().map(|p| p.closed).collect::<Vec<_>>());
    Ok(())
}
