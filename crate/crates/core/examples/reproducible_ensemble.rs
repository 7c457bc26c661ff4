//! Counter-based sampling makes every trial a pure function of
//! `(seed, trial, draw)`, so ensembles are bit-identical whatever the
//! thread count.

use zpf_optics::ensemble::{run_ensemble_with, RunOptions};
use zpf_optics::rng::{sample_standard_complex_gaussian, DrawAddress};
use zpf_optics::{builtin, CompiledExperiment};

fn main() -> zpf_optics::Result<()> {
    let z = sample_standard_complex_gaussian(DrawAddress::new(42, 1_000_000, 3));
    println!("draw (seed 42, trial 1e6, draw 3) = {z}");

    let spec = builtin("dc")?.with_param("theta", 0.0).with_param("phi", 1.0);
    let exp = CompiledExperiment::compile(&spec)?;
    println!("{} draws per trial", exp.draws_per_trial);
    println!("trial 17 pattern: {:?}", exp.run_trial(42, 17).named(&exp.detector_names));

    let mut reference = None;
    for workers in [1, 2, 4] {
        let opts = RunOptions {
            workers,
            ..RunOptions::new(300_000, 42)
        };
        let stats = run_ensemble_with(&exp, &opts)?;
        println!("{workers} worker(s): {} / {} = {}", stats.numerator, stats.denominator, stats.estimate);
        match &reference {
            None => reference = Some(stats),
            Some(r) => assert_eq!(r, &stats),
        }
    }
    Ok(())
}
