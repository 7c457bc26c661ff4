//! Sources and optical elements.
//!
//! Sources turn standard complex Gaussian draws into initial Jones vectors;
//! elements are linear maps on the amplitudes of one or two spatial modes.
//! The polarizer is the only element that injects a fresh vacuum amplitude.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::field::{jones_from_basis, jones_in_basis, ComplexAmp, JonesVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaserSourceParams {
    /// Mean amplitude after attenuation.
    pub alpha: ComplexAmp,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntangledSourceParams {
    /// Two-mode squeezing strength, `r >= 0`.
    pub r: f64,
}

/// Horizontally polarized coherent light on top of the zero-point field.
pub fn sample_laser(params: LaserSourceParams, sigma0: f64, draws: [ComplexAmp; 2]) -> JonesVector {
    JonesVector::new(params.alpha + draws[0] * sigma0, draws[1] * sigma0)
}

/// An unoccupied mode: zero-point fluctuations only.
pub fn sample_vacuum(sigma0: f64, draws: [ComplexAmp; 2]) -> JonesVector {
    JonesVector::new(draws[0] * sigma0, draws[1] * sigma0)
}

/// Cross-conjugate two-mode squeezed pair `(a, c)`.
///
/// `draws` holds the mode-`a` vacuum amplitudes `(H, V)` followed by the
/// mode-`c` vacuum amplitudes `(H, V)`.
pub fn sample_entangled_pair(
    params: EntangledSourceParams,
    sigma0: f64,
    draws: [ComplexAmp; 4],
) -> (JonesVector, JonesVector) {
    let (ch, sh) = (params.r.cosh(), params.r.sinh());
    let mix = |own: ComplexAmp, partner: ComplexAmp| (own * ch + partner.conj() * sh) * sigma0;
    let a = JonesVector::new(mix(draws[0], draws[2]), mix(draws[1], draws[3]));
    let c = JonesVector::new(mix(draws[2], draws[0]), mix(draws[3], draws[1]));
    (a, c)
}

/// 50/50 beam splitter: `((a + b)/√2, (a - b)/√2)`.
pub fn apply_beam_splitter(a: JonesVector, b: JonesVector) -> (JonesVector, JonesVector) {
    ((a + b) * FRAC_1_SQRT_2, (a - b) * FRAC_1_SQRT_2)
}

/// Half-wave plate with fast axis at `theta` from horizontal.
pub fn apply_half_wave_plate(v: JonesVector, theta: f64) -> JonesVector {
    let (s2, c2) = (2.0 * theta).sin_cos();
    JonesVector::new(v.h * c2 + v.v * s2, v.h * s2 - v.v * c2)
}

/// Global phase `e^{iφ}` on both polarizations.
pub fn apply_phase_delay(v: JonesVector, phi: f64) -> JonesVector {
    v.scale(Complex64::cis(phi))
}

/// Which polarization components a phase element acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PolarizationAxis {
    #[default]
    Both,
    Horizontal,
    Vertical,
}

impl PolarizationAxis {
    pub fn keyword(self) -> &'static str {
        match self {
            PolarizationAxis::Both => "both",
            PolarizationAxis::Horizontal => "h",
            PolarizationAxis::Vertical => "v",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        match s {
            "both" => Some(PolarizationAxis::Both),
            "h" => Some(PolarizationAxis::Horizontal),
            "v" => Some(PolarizationAxis::Vertical),
            _ => None,
        }
    }
}

/// Phase retarder: `e^{iφ}` on the selected polarization components only.
pub fn apply_retarder(v: JonesVector, phi: f64, axis: PolarizationAxis) -> JonesVector {
    let e = Complex64::cis(phi);
    match axis {
        PolarizationAxis::Both => v.scale(e),
        PolarizationAxis::Horizontal => JonesVector::new(v.h * e, v.v),
        PolarizationAxis::Vertical => JonesVector::new(v.h, v.v * e),
    }
}

/// Polarizer admitting the axis at angle `psi`.
///
/// The orthogonal component is lost through the ignored port of the
/// equivalent polarizing beam splitter and replaced by the vacuum amplitude
/// `sigma0 * fresh` entering its unused input.
pub fn apply_polarizer(v: JonesVector, psi: f64, fresh: ComplexAmp, sigma0: f64) -> JonesVector {
    let kept = jones_in_basis(v, psi).h;
    jones_from_basis(JonesVector::new(kept, fresh * sigma0), psi)
}

/// Polarizing beam splitter: transmits H, reflects V.
pub fn apply_pbs(a: JonesVector, b: JonesVector) -> (JonesVector, JonesVector) {
    (JonesVector::new(a.h, b.v), JonesVector::new(b.h, a.v))
}

pub fn apply_mirror_swap(a: JonesVector, b: JonesVector) -> (JonesVector, JonesVector) {
    (b, a)
}

/// Polarization-dependent beam splitter: 50/50 for H, mode swap for V.
pub fn apply_pdbs(a: JonesVector, b: JonesVector) -> (JonesVector, JonesVector) {
    (
        JonesVector::new((a.h + b.h) * FRAC_1_SQRT_2, b.v),
        JonesVector::new((a.h - b.h) * FRAC_1_SQRT_2, a.v),
    )
}

/// A concrete element with all settings resolved to numbers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Element {
    BeamSplitter,
    HalfWavePlate { theta: f64 },
    PhaseDelay { phi: f64, axis: PolarizationAxis },
    MirrorSwap,
    Polarizer { psi: f64 },
    Pbs,
    Pdbs,
}

/// Row-major 4x4 complex matrix on `(a_H, a_V, b_H, b_V)`.
pub type Matrix4 = [[Complex64; 4]; 4];

impl Element {
    pub fn mode_count(&self) -> usize {
        match self {
            Element::BeamSplitter | Element::MirrorSwap | Element::Pbs | Element::Pdbs => 2,
            Element::HalfWavePlate { .. } | Element::PhaseDelay { .. } | Element::Polarizer { .. } => 1,
        }
    }

    /// Number of fresh vacuum draws consumed per application.
    pub fn vacuum_draws(&self) -> usize {
        matches!(self, Element::Polarizer { .. }) as usize
    }

    /// Matrix of a linear element written out entry by entry. Single-mode
    /// elements occupy the upper-left 2x2 block with identity on mode `b`.
    /// `None` for the polarizer, which is not a linear map on its input alone.
    pub fn matrix(&self) -> Option<Matrix4> {
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let r = |x: f64| Complex64::new(x, 0.0);
        let h = FRAC_1_SQRT_2;
        let m = match *self {
            Element::BeamSplitter => [
                [r(h), z, r(h), z],
                [z, r(h), z, r(h)],
                [r(h), z, r(-h), z],
                [z, r(h), z, r(-h)],
            ],
            Element::HalfWavePlate { theta } => {
                let (s2, c2) = (2.0 * theta).sin_cos();
                [
                    [r(c2), r(s2), z, z],
                    [r(s2), r(-c2), z, z],
                    [z, z, one, z],
                    [z, z, z, one],
                ]
            }
            Element::PhaseDelay { phi, axis } => {
                let e = Complex64::cis(phi);
                let (eh, ev) = match axis {
                    PolarizationAxis::Both => (e, e),
                    PolarizationAxis::Horizontal => (e, one),
                    PolarizationAxis::Vertical => (one, e),
                };
                [[eh, z, z, z], [z, ev, z, z], [z, z, one, z], [z, z, z, one]]
            }
            Element::MirrorSwap => [[z, z, one, z], [z, z, z, one], [one, z, z, z], [z, one, z, z]],
            Element::Pbs => [[one, z, z, z], [z, z, z, one], [z, z, one, z], [z, one, z, z]],
            Element::Pdbs => [
                [r(h), z, r(h), z],
                [z, z, z, one],
                [r(h), z, r(-h), z],
                [z, one, z, z],
            ],
            Element::Polarizer { .. } => return None,
        };
        Some(m)
    }
}

/// Largest entry of `|U†U - I|`.
pub fn unitarity_defect(m: &Matrix4) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = Complex64::new(0.0, 0.0);
            for row in m {
                acc += row[i].conj() * row[j];
            }
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((acc - target).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GlobalConfig;
    use crate::rng::{sample_standard_complex_gaussian, DrawAddress};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI, SQRT_2};

    const SIGMA0: f64 = FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: JonesVector, b: JonesVector, tol: f64) -> bool {
        (a - b).norm_sqr().sqrt() <= tol
    }

    fn all_linear() -> Vec<Element> {
        vec![
            Element::BeamSplitter,
            Element::HalfWavePlate { theta: 0.3 },
            Element::HalfWavePlate { theta: FRAC_PI_8 },
            Element::PhaseDelay { phi: 1.1, axis: PolarizationAxis::Both },
            Element::PhaseDelay { phi: -2.0, axis: PolarizationAxis::Vertical },
            Element::PhaseDelay { phi: 0.7, axis: PolarizationAxis::Horizontal },
            Element::MirrorSwap,
            Element::Pbs,
            Element::Pdbs,
        ]
    }

    fn apply(el: Element, a: JonesVector, b: JonesVector) -> (JonesVector, JonesVector) {
        match el {
            Element::BeamSplitter => apply_beam_splitter(a, b),
            Element::HalfWavePlate { theta } => (apply_half_wave_plate(a, theta), b),
            Element::PhaseDelay { phi, axis } => (apply_retarder(a, phi, axis), b),
            Element::MirrorSwap => apply_mirror_swap(a, b),
            Element::Pbs => apply_pbs(a, b),
            Element::Pdbs => apply_pdbs(a, b),
            Element::Polarizer { .. } => unreachable!(),
        }
    }

    fn mat_apply(m: &Matrix4, a: JonesVector, b: JonesVector) -> (JonesVector, JonesVector) {
        let x = [a.h, a.v, b.h, b.v];
        let y: Vec<Complex64> = m
            .iter()
            .map(|row| row.iter().zip(&x).map(|(m, x)| m * x).sum())
            .collect();
        (JonesVector::new(y[0], y[1]), JonesVector::new(y[2], y[3]))
    }

    #[test]
    fn every_linear_element_is_unitary() {
        for el in all_linear() {
            let m = el.matrix().unwrap();
            assert!(unitarity_defect(&m) <= 1e-12, "{el:?}");
        }
        assert!(Element::Polarizer { psi: 0.0 }.matrix().is_none());
    }

    #[test]
    fn printed_pdbs_fourth_row_is_not_unitary() {
        let mut m = Element::Pdbs.matrix().unwrap();
        m[3] = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        assert!(unitarity_defect(&m) > 0.5);
    }

    #[test]
    fn laser_and_vacuum() {
        let zero = [c(0.0, 0.0); 2];
        let laser = LaserSourceParams { alpha: c(0.0, 0.0) };
        assert_eq!(sample_laser(laser, SIGMA0, zero), JonesVector::ZERO);
        assert_eq!(sample_vacuum(SIGMA0, zero), JonesVector::ZERO);
        let laser = LaserSourceParams { alpha: c(0.1, 0.2) };
        let out = sample_laser(laser, SIGMA0, [c(1.0, 0.0), c(0.0, 1.0)]);
        assert_eq!(out.h, c(0.1 + SIGMA0, 0.2));
        assert_eq!(out.v, c(0.0, SIGMA0));
    }

    #[test]
    fn laser_population_moments() {
        let n = 400_000u64;
        let laser = LaserSourceParams { alpha: c(0.1, 0.0) };
        let (mut mh, mut mv, mut varh, mut varv) = (c(0.0, 0.0), c(0.0, 0.0), 0.0, 0.0);
        for t in 0..n {
            let draw = |k| sample_standard_complex_gaussian(DrawAddress::new(3, t, k));
            let v = sample_laser(laser, SIGMA0, [draw(0), draw(1)]);
            mh += v.h;
            mv += v.v;
            varh += (v.h - laser.alpha).norm_sqr();
            varv += v.v.norm_sqr();
        }
        let nf = n as f64;
        let tol = 5.0 * SIGMA0 / nf.sqrt();
        assert!((mh / nf - laser.alpha).norm() < tol);
        assert!((mv / nf).norm() < tol);
        assert!((varh / nf - 0.5).abs() < 0.005);
        assert!((varv / nf - 0.5).abs() < 0.005);
    }

    #[test]
    fn vacuum_moments_and_independence() {
        let n = 1_000_000u64;
        let (mut e2, mut cross) = (0.0, c(0.0, 0.0));
        for t in 0..n {
            let draw = |k| sample_standard_complex_gaussian(DrawAddress::new(4, t, k));
            let a = sample_vacuum(SIGMA0, [draw(0), draw(1)]);
            let b = sample_vacuum(SIGMA0, [draw(2), draw(3)]);
            e2 += a.h.norm_sqr();
            cross += a.h * b.h.conj() / (SIGMA0 * SIGMA0);
        }
        let nf = n as f64;
        assert!((e2 / nf - 0.5).abs() < 0.005);
        assert!((cross / nf).norm() < 5.0 / nf.sqrt());
    }

    #[test]
    fn entangled_zero_squeezing_is_vacuum() {
        let d = [c(0.3, 0.1), c(-1.0, 0.2), c(0.5, 0.5), c(0.0, -2.0)];
        let (a, cc) = sample_entangled_pair(EntangledSourceParams { r: 0.0 }, SIGMA0, d);
        assert_eq!(a, sample_vacuum(SIGMA0, [d[0], d[1]]));
        assert_eq!(cc, sample_vacuum(SIGMA0, [d[2], d[3]]));
    }

    #[test]
    fn entangled_moments_at_r_one() {
        // Expanding E[|a_H|^2] and E[a_H c_H] over independent standard
        // complex Gaussians (E[z z*] = 1, E[z z] = 0) leaves
        // sigma0^2 (cosh^2 r + sinh^2 r) = sigma0^2 cosh 2r and
        // 2 sigma0^2 cosh r sinh r = sigma0^2 sinh 2r.
        let r = 1.0f64;
        let expected_power = 0.5 * (r.cosh().powi(2) + r.sinh().powi(2));
        let expected_cross = 0.5 * 2.0 * r.cosh() * r.sinh();
        assert!((expected_power - 1.881_097_845_541_816).abs() < 1e-12);
        assert!((expected_cross - 1.813_430_203_923_509).abs() < 1e-12);

        let n = 1_000_000u64;
        let (mut power, mut cross) = (0.0, c(0.0, 0.0));
        for t in 0..n {
            let draw = |k| sample_standard_complex_gaussian(DrawAddress::new(11, t, k));
            let (a, cc) = sample_entangled_pair(
                EntangledSourceParams { r },
                SIGMA0,
                [draw(0), draw(1), draw(2), draw(3)],
            );
            power += a.h.norm_sqr();
            cross += a.h * cc.h;
        }
        let nf = n as f64;
        assert!(((power / nf) / expected_power - 1.0).abs() < 0.02);
        assert!(((cross / nf).re / expected_cross - 1.0).abs() < 0.02);
        assert!((cross / nf).im.abs() < 0.02 * expected_cross);
    }

    #[test]
    fn beam_splitter_examples() {
        let a = JonesVector::new(c(1.0, 0.5), c(-0.2, 0.3));
        let (o1, o2) = apply_beam_splitter(a, JonesVector::ZERO);
        assert!(close(o1, a * FRAC_1_SQRT_2, 1e-15) && close(o2, a * FRAC_1_SQRT_2, 1e-15));
        let (o1, o2) = apply_beam_splitter(a, a);
        assert!(close(o1, a * SQRT_2, 1e-15));
        assert_eq!(o2, JonesVector::ZERO);
    }

    #[test]
    fn half_wave_plate_examples() {
        let v = JonesVector::new(c(0.4, 0.1), c(0.2, -0.7));
        assert!(close(apply_half_wave_plate(v, 0.0), JonesVector::new(v.h, -v.v), 1e-15));
        let h = JonesVector::real(1.0, 0.0);
        assert!(close(
            apply_half_wave_plate(h, FRAC_PI_8),
            JonesVector::real(FRAC_1_SQRT_2, FRAC_1_SQRT_2),
            1e-15
        ));
        assert!(close(apply_half_wave_plate(h, FRAC_PI_4), JonesVector::real(0.0, 1.0), 1e-15));
    }

    #[test]
    fn phase_delay_examples() {
        let v = JonesVector::new(c(0.4, 0.1), c(0.2, -0.7));
        assert_eq!(apply_phase_delay(v, 0.0), v);
        assert!(close(apply_phase_delay(v, PI), -v, 1e-15));
        let r = apply_retarder(v, PI, PolarizationAxis::Vertical);
        assert_eq!(r.h, v.h);
        assert!((r.v + v.v).norm() < 1e-15);
    }

    #[test]
    fn polarizer_examples() {
        let v = JonesVector::new(c(0.4, 0.1), c(0.2, -0.7));
        let z = c(0.9, -0.3);
        let out = apply_polarizer(v, 0.0, z, SIGMA0);
        assert!(close(out, JonesVector::new(v.h, z * SIGMA0), 1e-15));

        // The orthogonal axis at π/4 is (-1, 1)/√2, so the diagonal form
        // ((c_D + σ0 z)/√2, (c_D - σ0 z)/√2) appears with the fresh draw negated.
        let out = apply_polarizer(v, FRAC_PI_4, -z, SIGMA0);
        let cd = (v.h + v.v) * FRAC_1_SQRT_2;
        let want = JonesVector::new((cd + z * SIGMA0) * FRAC_1_SQRT_2, (cd - z * SIGMA0) * FRAC_1_SQRT_2);
        assert!(close(out, want, 1e-15));

        let along = JonesVector::real(0.6, 0.6);
        assert!(close(apply_polarizer(along, FRAC_PI_4, c(0.0, 0.0), SIGMA0), along, 1e-15));
    }

    #[test]
    fn pbs_mirror_pdbs_examples() {
        let a = JonesVector::new(c(0.4, 0.1), c(0.2, -0.7));
        let b = JonesVector::new(c(-0.3, 0.2), c(1.0, 0.5));
        assert_eq!(
            apply_pbs(a, JonesVector::ZERO),
            (JonesVector::new(a.h, c(0.0, 0.0)), JonesVector::new(c(0.0, 0.0), a.v))
        );
        let (ah, bh) = (JonesVector::new(a.h, c(0.0, 0.0)), JonesVector::new(b.h, c(0.0, 0.0)));
        assert_eq!(apply_pbs(ah, bh), (ah, bh));
        assert_eq!(apply_mirror_swap(a, b), (b, a));
        let (x, y) = apply_mirror_swap(a, b);
        assert_eq!(apply_mirror_swap(x, y), (a, b));

        let (av, bv) = (JonesVector::new(c(0.0, 0.0), a.v), JonesVector::new(c(0.0, 0.0), b.v));
        assert_eq!(apply_pdbs(av, bv), (bv, av));
        let (p, q) = apply_pdbs(ah, bh);
        let (s, t) = apply_beam_splitter(ah, bh);
        assert!(close(p, s, 1e-15) && close(q, t, 1e-15));
    }

    #[test]
    fn gaussian_closure_through_chain() {
        // Vacuum through BS, HWP, retarder, PDBS and a mirror swap remains a
        // pair of independent standard complex Gaussians per component.
        let n = 500_000u64;
        let mut sums = [0.0f64; 4];
        let mut means = [c(0.0, 0.0); 4];
        let mut pseudo = [c(0.0, 0.0); 4];
        for t in 0..n {
            let d = |k| sample_standard_complex_gaussian(DrawAddress::new(5, t, k));
            let a = JonesVector::new(d(0), d(1));
            let b = JonesVector::new(d(2), d(3));
            let (a, b) = apply_beam_splitter(a, b);
            let a = apply_half_wave_plate(a, 0.37);
            let a = apply_retarder(a, 1.3, PolarizationAxis::Vertical);
            let (a, b) = apply_pdbs(a, b);
            let (a, b) = apply_mirror_swap(a, b);
            for (k, z) in [a.h, a.v, b.h, b.v].into_iter().enumerate() {
                sums[k] += z.norm_sqr();
                means[k] += z;
                pseudo[k] += z * z;
            }
        }
        let nf = n as f64;
        for k in 0..4 {
            assert!((means[k] / nf).norm() < 5.0 / nf.sqrt());
            assert!((pseudo[k] / nf).norm() < 5.0 / nf.sqrt());
            // Var(|z|^2) = 1 for a standard complex Gaussian.
            assert!((sums[k] / nf - 1.0).abs() < 5.0 / nf.sqrt());
        }
    }

    #[test]
    fn polarizer_idempotent_on_kept_axis() {
        let v = JonesVector::new(c(0.4, 0.1), c(0.2, -0.7));
        let psi = 0.6;
        let once = apply_polarizer(v, psi, c(0.3, 0.2), SIGMA0);
        let twice = apply_polarizer(once, psi, c(-1.1, 0.8), SIGMA0);
        assert!((jones_in_basis(once, psi).h - jones_in_basis(twice, psi).h).norm() < 1e-15);
    }

    #[test]
    fn classical_limit_intensities() {
        // sigma0 = 0: no zero-point field, only the mean amplitude propagates.
        let cfg = GlobalConfig { sigma0: 0.0, gamma: 0.0 };
        let alpha = c(30.0, 0.0);
        for (theta, phi) in [(0.0, 0.0), (0.3, 1.0), (FRAC_PI_4, 2.5), (0.1, PI)] {
            let a = sample_laser(LaserSourceParams { alpha }, cfg.sigma0, [c(1.0, 1.0); 2]);
            let b = sample_vacuum(cfg.sigma0, [c(1.0, 1.0); 2]);
            let (a, b) = apply_beam_splitter(a, b);
            let a = apply_phase_delay(apply_half_wave_plate(a, theta), phi);
            let (a1, b1) = apply_mirror_swap(a, b);
            assert!((a1.h.norm_sqr() - alpha.norm_sqr() / 2.0).abs() < 1e-9);
            let (a2, _) = apply_beam_splitter(a1, b1);
            let fringe = (c(1.0, 0.0) + Complex64::cis(phi) * (2.0 * theta).cos()).norm_sqr();
            assert!((a2.h.norm_sqr() - alpha.norm_sqr() / 4.0 * fringe).abs() < 1e-9);
        }
    }

    fn jones() -> impl Strategy<Value = JonesVector> {
        (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64)
            .prop_map(|(a, b, x, y)| JonesVector::new(c(a, b), c(x, y)))
    }

    proptest! {
        #[test]
        fn functions_match_matrices(a in jones(), b in jones(), theta in -4.0..4.0f64) {
            let mut els = all_linear();
            els.push(Element::HalfWavePlate { theta });
            for el in els {
                let (p, q) = apply(el, a, b);
                let (s, t) = mat_apply(&el.matrix().unwrap(), a, b);
                prop_assert!(close(p, s, 1e-12) && close(q, t, 1e-12), "{:?}", el);
                prop_assert!(((p.norm_sqr() + q.norm_sqr()) - (a.norm_sqr() + b.norm_sqr())).abs() < 1e-12);
            }
        }

        #[test]
        fn phase_preserves_norm(v in jones(), phi in -10.0..10.0f64) {
            prop_assert!((apply_phase_delay(v, phi).norm_sqr() - v.norm_sqr()).abs() < 1e-14);
        }
    }
}
