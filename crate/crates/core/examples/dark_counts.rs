//! Dark-count probability of a threshold detector fed only by the zero-point
//! field, in closed form and by Monte Carlo.
//!
//! ```text
//! cargo run --release --example dark_counts
//! ```

use zpf_optics::analytics::dark_click_prob;
use zpf_optics::{parse_str, run_ensemble, CompiledExperiment, GlobalConfig};

fn main() -> zpf_optics::Result<()> {
    let spec = parse_str(
        "experiment \"vacuum\"
         mode a
         source vacuum -> a
         detector D on a
         postselect click(D)",
    )?;
    let exp = CompiledExperiment::compile(&spec)?;
    let stats = run_ensemble(&exp, 1_000_000, 2024, 0)?;
    let GlobalConfig { sigma0, gamma } = spec.config;
    let pd = dark_click_prob(sigma0, gamma)?;
    println!("closed form p_d = {pd:.6}");
    println!(
        "monte carlo     = {:.6}  ({} of {} trials, 95% CI [{:.6}, {:.6}])",
        stats.estimate, stats.numerator, stats.trials, stats.ci95.0, stats.ci95.1
    );
    for gamma in [1.5, 1.75, 1.95, 2.25] {
        println!("gamma = {gamma:<5} p_d = {:.3e}", dark_click_prob(sigma0, gamma)?);
    }
    Ok(())
}
