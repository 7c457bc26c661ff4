//! Exact formulas: Marcum Q, Rician click probabilities, the closed forms of
//! the delayed-choice and Mach-Zehnder witness setups, quantum reference
//! curves and witness algebra.

mod closed_form;
mod marcum;
mod witness;

pub use closed_form::{
    dark_click_prob, dc_single_click_probs, dw_click_probs, dw_idw_table, dw_w2_table, quantum_q_herald,
    quantum_q_pdbs, rician_f, rician_f_pair, DcProbs, DwSettings, HeraldBasis, HeraldSettings,
};
pub use marcum::{marcum_q1, marcum_q1_complement, marcum_q1_pair, TAIL_TOLERANCE};
pub use witness::{r_min, witness_idw, witness_w2, BTable, WitnessTable2};

