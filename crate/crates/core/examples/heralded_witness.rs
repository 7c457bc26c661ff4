//! Entanglement-heralded dimension witness: Alice's detectors herald the
//! state Bob measures. Prints the conditionals for the eight bases, the
//! quantum reference and I_DW at several squeezing strengths.
//!
//! ```text
//! cargo run --release --example heralded_witness
//! ```

use zpf_optics::analytics::{quantum_q_herald, HeraldSettings};
use zpf_optics::studies::{herald_witness, StudyOptions, WitnessValue};

fn main() -> zpf_optics::Result<()> {
    let settings = HeraldSettings::default();
    let rows = herald_witness(&[0.25, 0.8, 1.0, 2.8], &StudyOptions::new(13, 1_000_000))?;
    for row in &rows {
        let WitnessValue::Herald { idw, r_min, p1j, .. } = &row.value else {
            continue;
        };
        println!("r = {}: I_DW = {idw:.3}, R_min = {r_min:.3}", row.outer[0].1);
        for (b, p) in settings.bases().iter().zip(p1j) {
            println!(
                "  basis {} (herald D{}, x={}, y={}): p = {p:.3}  q = {:.3}",
                b.index,
                b.herald,
                b.x,
                b.y,
                quantum_q_herald(b.herald, b.x, b.y, &settings)
            );
        }
    }
    Ok(())
}
