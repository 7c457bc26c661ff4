//! Quantum eraser: fringes lost to which-way marking reappear once the
//! statistics are conditioned on the partner beam's polarizer detector.

use std::f64::consts::PI;

use zpf_optics::stats::visibility;
use zpf_optics::studies::{eraser_curves, StudyOptions};

fn main() -> zpf_optics::Result<()> {
    let phis: Vec<f64> = (0..=12).map(|k| k as f64 * PI / 6.0).collect();
    let pts = eraser_curves(1.0, PI / 4.0, &phis, &StudyOptions::new(3, 500_000))?;
    println!("{:>8} {:>10} {:>10}", "phi/deg", "p'13", "p'1");
    for p in &pts {
        println!("{:>8.1} {:>10.6} {:>10.6}", p.phi.to_degrees(), p.p13.estimate, p.p1.estimate);
    }
    let v13 = visibility(&pts.iter().map(|p| (p.phi, p.p13.estimate)).collect::<Vec<_>>());
    let v1 = visibility(&pts.iter().map(|p| (p.phi, p.p1.estimate)).collect::<Vec<_>>());
    println!("visibility: conditioned {v13:.3}, unconditioned {v1:.3}");
    Ok(())
}
