//! Closed-form click probabilities and quantum reference predictions.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use num_complex::Complex64;

use super::marcum::marcum_q1_pair;
use super::witness::{BTable, WitnessTable2};
use crate::error::AnalyticsError;
use crate::field::ComplexAmp;

fn check_config(sigma0: f64, gamma: f64) -> Result<(), AnalyticsError> {
    if !(sigma0.is_finite() && sigma0 > 0.0) {
        return Err(AnalyticsError::Domain { name: "sigma0", value: sigma0 });
    }
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(AnalyticsError::Domain { name: "gamma", value: gamma });
    }
    Ok(())
}

/// `(F, 1 - F)` where `F(alpha) = Pr[|alpha + sigma0 z| <= gamma]`.
pub fn rician_f_pair(alpha: ComplexAmp, sigma0: f64, gamma: f64) -> Result<(f64, f64), AnalyticsError> {
    check_config(sigma0, gamma)?;
    if !(alpha.re.is_finite() && alpha.im.is_finite()) {
        return Err(AnalyticsError::Domain { name: "alpha", value: alpha.norm() });
    }
    let (q, qc) = marcum_q1_pair(SQRT_2 * alpha.norm() / sigma0, SQRT_2 * gamma / sigma0)?;
    Ok((qc, q))
}

/// Probability that one polarization component with mean `alpha` stays at
/// or below the threshold.
pub fn rician_f(alpha: ComplexAmp, sigma0: f64, gamma: f64) -> Result<f64, AnalyticsError> {
    rician_f_pair(alpha, sigma0, gamma).map(|(f, _)| f)
}

/// `F(0) = 1 - exp(-gamma²/sigma0²)`.
fn f_zero(sigma0: f64, gamma: f64) -> f64 {
    -(-(gamma * gamma) / (sigma0 * sigma0)).exp_m1()
}

/// Click probability of a detector seeing vacuum on both polarizations.
pub fn dark_click_prob(sigma0: f64, gamma: f64) -> Result<f64, AnalyticsError> {
    check_config(sigma0, gamma)?;
    let f0 = f_zero(sigma0, gamma);
    Ok(1.0 - f0 * f0)
}

/// A detector whose H component has mean `mean` and whose V component is
/// pure vacuum: `(Pr[click], Pr[no click])`.
fn click_pair(mean: ComplexAmp, sigma0: f64, gamma: f64) -> Result<(f64, f64), AnalyticsError> {
    let (f, fc) = rician_f_pair(mean, sigma0, gamma)?;
    let f0 = f_zero(sigma0, gamma);
    let no_click = f * f0;
    // 1 - F·F0 = (1 - F) + F·(1 - F0), without cancellation.
    let click = fc + f * (-(gamma * gamma) / (sigma0 * sigma0)).exp();
    Ok((click, no_click))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DcProbs {
    /// Single click on D1 and not D2.
    pub p1: f64,
    pub pr_d1: f64,
    pub pr_d2: f64,
}

/// Delayed-choice click probabilities with or without the second beam
/// splitter.
pub fn dc_single_click_probs(
    alpha: ComplexAmp,
    theta: f64,
    phi: f64,
    sigma0: f64,
    gamma: f64,
    bs2_present: bool,
) -> Result<DcProbs, AnalyticsError> {
    let c2 = (2.0 * theta).cos();
    let (m1, m2) = if bs2_present {
        let e = Complex64::cis(phi) * c2;
        (alpha * 0.5 * (1.0 + e), alpha * 0.5 * (1.0 - e))
    } else {
        (alpha * FRAC_1_SQRT_2, alpha * FRAC_1_SQRT_2 * c2)
    };
    let (d1, _) = click_pair(m1, sigma0, gamma)?;
    let (d2, nd2) = click_pair(m2, sigma0, gamma)?;
    Ok(DcProbs {
        p1: d1 * nd2,
        pr_d1: d1,
        pr_d2: d2,
    })
}

/// Normalized exclusive-single probabilities `(p1, p2)` of the
/// Mach-Zehnder dimension-witness setup at phase difference `delta`.
pub fn dw_click_probs(alpha: ComplexAmp, delta: f64, sigma0: f64, gamma: f64) -> Result<(f64, f64), AnalyticsError> {
    let e = Complex64::cis(delta);
    let (c1, n1) = click_pair(alpha * 0.5 * (1.0 + e), sigma0, gamma)?;
    let (c2, n2) = click_pair(alpha * 0.5 * (1.0 - e), sigma0, gamma)?;
    let only1 = c1 * n2;
    let only2 = n1 * c2;
    let total = only1 + only2;
    if !(total > 0.0) {
        return Err(AnalyticsError::Domain { name: "exclusive-single probability", value: total });
    }
    let p1 = only1 / total;
    Ok((p1, 1.0 - p1))
}

/// Preparation and measurement phases of the prepare-and-measure witness.
#[derive(Debug, Clone, PartialEq)]
pub struct DwSettings {
    pub phis: Vec<f64>,
    pub sigmas: Vec<f64>,
}

impl DwSettings {
    /// Settings for `W2`: `phi = (0, π, -π/2, π/2)`, `sigma = (0, π/2)`.
    pub fn w2() -> Self {
        Self {
            phis: vec![0.0, PI, -PI / 2.0, PI / 2.0],
            sigmas: vec![0.0, PI / 2.0],
        }
    }

    /// Settings for `I_DW`: `phi = (7π/4, 5π/4, π/2)`, `sigma = (π/2, 0)`.
    pub fn idw() -> Self {
        Self {
            phis: vec![7.0 * PI / 4.0, 5.0 * PI / 4.0, PI / 2.0],
            sigmas: vec![PI / 2.0, 0.0],
        }
    }

    pub fn delta(&self, x: usize, y: usize) -> f64 {
        self.phis[x] + self.sigmas[y]
    }
}

/// Closed-form `p1(x, y)` table for `W2` at mean photon number `alpha2`.
pub fn dw_w2_table(alpha2: f64, sigma0: f64, gamma: f64) -> Result<WitnessTable2, AnalyticsError> {
    let alpha = intensity_to_amplitude(alpha2)?;
    let s = DwSettings::w2();
    let mut p = [[0.0; 2]; 4];
    for (x, row) in p.iter_mut().enumerate() {
        for (y, cell) in row.iter_mut().enumerate() {
            *cell = dw_click_probs(alpha, s.delta(x, y), sigma0, gamma)?.0;
        }
    }
    Ok(WitnessTable2 { p })
}

/// Closed-form `<B>_xy = p1 - p2` table for `I_DW` at mean photon number `alpha2`.
pub fn dw_idw_table(alpha2: f64, sigma0: f64, gamma: f64) -> Result<BTable, AnalyticsError> {
    let alpha = intensity_to_amplitude(alpha2)?;
    let s = DwSettings::idw();
    let mut b = [[0.0; 2]; 3];
    for (x, row) in b.iter_mut().enumerate() {
        for (y, cell) in row.iter_mut().enumerate() {
            let (p1, p2) = dw_click_probs(alpha, s.delta(x, y), sigma0, gamma)?;
            *cell = p1 - p2;
        }
    }
    Ok(BTable::PrepareMeasure(b))
}

fn intensity_to_amplitude(alpha2: f64) -> Result<ComplexAmp, AnalyticsError> {
    if !(alpha2.is_finite() && alpha2 >= 0.0) {
        return Err(AnalyticsError::Domain { name: "alpha2", value: alpha2 });
    }
    Ok(ComplexAmp::new(alpha2.sqrt(), 0.0))
}

/// Single-photon prediction for the PDBS experiment.
pub fn quantum_q_pdbs(theta: f64, phi: f64) -> f64 {
    let s = (2.0 * theta).sin();
    let c = (2.0 * theta).cos();
    (phi / 2.0).cos().powi(2) * s * s + 0.5 * c * c
}

/// One of the eight heralded preparation and measurement bases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeraldBasis {
    /// 1-based basis number.
    pub index: usize,
    /// Heralding detector, 3 or 4.
    pub herald: usize,
    /// 1-based preparation setting.
    pub x: usize,
    /// 1-based measurement setting.
    pub y: usize,
    pub phi: f64,
}

/// Retarder settings of the heralded witness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeraldSettings {
    pub alphas: [f64; 2],
    pub betas: [f64; 2],
}

impl Default for HeraldSettings {
    /// `alpha = (π/2, π/4)`, `beta = (π/2, 0)`, as implied by the tabulated phases.
    fn default() -> Self {
        Self {
            alphas: [PI / 2.0, PI / 4.0],
            betas: [PI / 2.0, 0.0],
        }
    }
}

impl HeraldSettings {
    /// `phi_jxy = alpha_x + beta_y`, plus π for a herald on D4.
    pub fn phi(&self, herald: usize, x: usize, y: usize) -> f64 {
        let extra = if herald == 4 { PI } else { 0.0 };
        self.alphas[x - 1] + extra + self.betas[y - 1]
    }

    /// The eight bases in table order.
    pub fn bases(&self) -> [HeraldBasis; 8] {
        const ROWS: [(usize, usize, usize); 8] =
            [(3, 1, 1), (3, 2, 1), (4, 1, 1), (4, 2, 1), (3, 1, 2), (3, 2, 2), (4, 1, 2), (4, 2, 2)];
        std::array::from_fn(|i| {
            let (herald, x, y) = ROWS[i];
            HeraldBasis {
                index: i + 1,
                herald,
                x,
                y,
                phi: self.phi(herald, x, y),
            }
        })
    }
}

/// `q_1j(x, y) = |1 + e^{i phi_jxy}|² / 4`.
pub fn quantum_q_herald(herald: usize, x: usize, y: usize, settings: &HeraldSettings) -> f64 {
    (1.0 + Complex64::cis(settings.phi(herald, x, y))).norm_sqr() / 4.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::witness::{r_min, witness_idw, witness_w2};

    const S0: f64 = FRAC_1_SQRT_2;
    const G: f64 = 1.95;

    fn a(x: f64) -> ComplexAmp {
        ComplexAmp::new(x, 0.0)
    }

    #[test]
    fn f_at_zero_and_large_gamma() {
        let f0 = rician_f(a(0.0), S0, G).unwrap();
        assert!((f0 - (1.0 - (-G * G / (S0 * S0)).exp())).abs() < 1e-14);
        assert!((rician_f(a(0.3), S0, 50.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dark_counts() {
        let pd = dark_click_prob(S0, G).unwrap();
        // 1 - (1 - e^{-7.605})^2
        assert!((pd - 0.000_995_663).abs() < 1e-8, "{pd}");
        assert_eq!(dark_click_prob(S0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn dc_without_bs2_ignores_phase() {
        for theta in [0.0, 0.3, PI / 4.0] {
            let p0 = dc_single_click_probs(a(0.1), theta, 0.0, S0, G, false).unwrap();
            let pp = dc_single_click_probs(a(0.1), theta, PI, S0, G, false).unwrap();
            assert_eq!(p0, pp);
        }
    }

    #[test]
    fn dc_with_bs2_at_45_degrees_is_flat() {
        let ps: Vec<f64> = (0..12)
            .map(|i| dc_single_click_probs(a(0.1), PI / 4.0, i as f64 * PI / 6.0, S0, G, true).unwrap().p1)
            .collect();
        assert!(ps.iter().all(|p| (p - ps[0]).abs() < 1e-15));
    }

    #[test]
    fn dw_normalization_and_limits() {
        for d in [0.0, 0.4, 2.0, PI] {
            let (p1, p2) = dw_click_probs(a(1.2), d, S0, G).unwrap();
            assert_eq!(p1 + p2, 1.0);
        }
        let (p1, _) = dw_click_probs(a(8.0), 0.0, S0, G).unwrap();
        assert!(p1 > 1.0 - 1e-12);
    }

    // Reference values computed independently from SciPy's noncentral
    // chi-square distribution.
    #[test]
    fn witness_values() {
        let w = witness_w2(&dw_w2_table(1.3, S0, G).unwrap());
        assert!((w - 0.9512).abs() < 5e-4, "{w}");
        let i = witness_idw(&dw_idw_table(0.58, S0, G).unwrap());
        assert!((i - 3.8237).abs() < 5e-4, "{i}");
        let i = witness_idw(&dw_idw_table(0.33, S0, G).unwrap());
        assert!((i - 3.012).abs() < 5e-3, "{i}");
        assert!(r_min(i) >= 0.0);
    }

    #[test]
    fn large_intensity_limits() {
        let w = witness_w2(&dw_w2_table(100.0, S0, G).unwrap());
        assert!(w.is_finite() && (w - 1.0).abs() < 1e-3, "{w}");
        let i = witness_idw(&dw_idw_table(100.0, S0, G).unwrap());
        assert!((i - 5.0).abs() < 1e-3, "{i}");
    }

    #[test]
    fn pdbs_reference() {
        for phi in [0.0, 1.0, PI] {
            assert!((quantum_q_pdbs(0.0, phi) - 0.5).abs() < 1e-15);
        }
        assert!((quantum_q_pdbs(PI / 4.0, 0.0) - 1.0).abs() < 1e-15);
        assert!(quantum_q_pdbs(PI / 4.0, PI).abs() < 1e-15);
    }

    #[test]
    fn herald_table() {
        let s = HeraldSettings::default();
        let bases = s.bases();
        let phis = [PI, 3.0 * PI / 4.0, 2.0 * PI, 7.0 * PI / 4.0, PI / 2.0, PI / 4.0, 3.0 * PI / 2.0, 5.0 * PI / 4.0];
        for (b, want) in bases.iter().zip(phis) {
            assert!((b.phi - want).abs() < 1e-15, "basis {}", b.index);
        }
        assert!(quantum_q_herald(3, 1, 1, &s).abs() < 1e-15);
        assert!((quantum_q_herald(4, 1, 1, &s) - 1.0).abs() < 1e-15);
        assert!((quantum_q_herald(3, 1, 2, &s) - 0.5).abs() < 1e-15);
    }
}
