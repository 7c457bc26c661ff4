//! The Marcum Q-function and the Rician exceedance probability it feeds.

use std::f64::consts::FRAC_1_SQRT_2;

use zpf_optics::analytics::{marcum_q1_pair, rician_f};
use zpf_optics::ComplexAmp;

fn main() -> zpf_optics::Result<()> {
    println!("{:>6} {:>6} {:>22} {:>22}", "a", "b", "Q1(a, b)", "1 - Q1(a, b)");
    for a in [0.0, 0.5, 2.0, 8.0, 20.0] {
        for b in [0.5, 3.9, 10.0] {
            let (q, qc) = marcum_q1_pair(a, b)?;
            println!("{a:>6} {b:>6} {q:>22.15e} {qc:>22.15e}");
        }
    }
    // Probability that one polarization component stays below the threshold.
    println!();
    for alpha in [0.0, 0.1, 1.0, 2.0, 3.0] {
        let f = rician_f(ComplexAmp::new(alpha, 0.0), FRAC_1_SQRT_2, 1.95)?;
        println!("|alpha| = {alpha:<4} F = {f:.9}");
    }
    Ok(())
}
