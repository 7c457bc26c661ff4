//! Prepare-and-measure dimension witnesses for a laser with the zero-point
//! field: closed-form |det W2|, I_DW and R_min over the intensity, and a
//! Monte-Carlo cross-check at one intensity.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use zpf_optics::analytics::{dw_idw_table, dw_w2_table, r_min, witness_idw, witness_w2};
use zpf_optics::dsl::{SweepRange, WitnessKind};
use zpf_optics::studies::{dw_witness, StudyOptions, WitnessValue};

fn main() -> zpf_optics::Result<()> {
    let (s0, g) = (FRAC_1_SQRT_2, 1.95);
    println!("{:>10} {:>8} {:>8} {:>8}", "|alpha|^2", "det W2", "I_DW", "R_min");
    for a2 in SweepRange::log_spaced(0.01, 100.0, 13).values() {
        let w2 = witness_w2(&dw_w2_table(a2, s0, g)?);
        let idw = witness_idw(&dw_idw_table(a2, s0, g)?);
        println!("{a2:>10.4} {w2:>8.4} {idw:>8.4} {:>8.4}", r_min(idw));
    }

    let opts = StudyOptions::new(9, 400_000);
    let w2 = dw_witness(&[1.3], &[0.0, PI, -FRAC_PI_2, FRAC_PI_2], &[0.0, FRAC_PI_2], WitnessKind::W2, &opts)?;
    if let WitnessValue::W2 { det, .. } = w2[0].value {
        println!("monte carlo |det W2| at 1.3: {det:.4}");
    }
    let idw = dw_witness(
        &[0.58],
        &[7.0 * PI / 4.0, 5.0 * PI / 4.0, FRAC_PI_2],
        &[FRAC_PI_2, 0.0],
        WitnessKind::Idw,
        &opts,
    )?;
    if let WitnessValue::Idw { idw, r_min, .. } = idw[0].value {
        println!("monte carlo I_DW at 0.58: {idw:.4} (R_min {r_min:.4})");
    }
    Ok(())
}
