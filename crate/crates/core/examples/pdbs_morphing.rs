//! Entanglement-assisted delayed choice with a polarization-dependent beam
//! splitter: the interference pattern morphs as the partner's half-wave
//! plate turns. Also reports coincidences and shifted-pair accidentals.
//!
//! ```text
//! cargo run --release --example pdbs_morphing
//! ```

use std::f64::consts::PI;

use zpf_optics::analytics::quantum_q_pdbs;
use zpf_optics::stats::visibility;
use zpf_optics::studies::{pdbs_grid, StudyOptions};

fn main() -> zpf_optics::Result<()> {
    let thetas = [0.0, PI / 8.0, PI / 4.0];
    let phis: Vec<f64> = (0..8).map(|k| k as f64 * PI / 4.0).collect();
    let grid = pdbs_grid(0.25, &thetas, &phis, &StudyOptions::new(5, 5_000_000))?;
    for &theta in &thetas {
        let row: Vec<_> = grid.iter().filter(|p| p.theta == theta).collect();
        println!("theta = {:.1} deg", theta.to_degrees());
        for p in &row {
            println!(
                "  phi = {:5.1}  p = {:.3} [{:.3}, {:.3}]  q = {:.3}  coincidences = {}  accidentals = {}",
                p.phi.to_degrees(),
                p.estimate.estimate,
                p.estimate.ci95.0,
                p.estimate.ci95.1,
                quantum_q_pdbs(theta, p.phi),
                p.coincidences,
                p.accidentals
            );
        }
        let v = visibility(&row.iter().map(|p| (p.phi, p.estimate.estimate)).collect::<Vec<_>>());
        println!("  visibility = {v:.3}");
    }
    let n = grid.len() as f64;
    println!(
        "mean coincidences per run {:.1}, mean accidentals {:.1}",
        grid.iter().map(|p| p.coincidences as f64).sum::<f64>() / n,
        grid.iter().map(|p| p.accidentals as f64).sum::<f64>() / n
    );
    Ok(())
}
