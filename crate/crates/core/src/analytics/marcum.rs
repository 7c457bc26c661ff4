//! Marcum Q-function of order one.
//!
//! `Q1(a, b) = Pr[K >= M]`-style Poisson mixture: with `K ~ Pois(a²/2)` and
//! `M ~ Pois(b²/2)` independent,
//!
//! ```text
//! Q1(a, b)     = Σ_k Pr[K = k] · Pr[M <= k]
//! 1 - Q1(a, b) = Σ_k Pr[K = k] · Pr[M >  k]
//! ```
//!
//! Both sums are evaluated directly with log-space Poisson weights, so each
//! side keeps full relative precision when the other is close to one.

use statrs::function::gamma::ln_gamma;

use crate::error::AnalyticsError;

/// Bound on the neglected Poisson mass at either end of a window.
pub const TAIL_TOLERANCE: f64 = 1e-13;

/// `[lo, hi]` holding all but a negligible fraction of `Pois(mean)`.
fn window(mean: f64) -> (usize, usize) {
    // Chernoff-style bound: for c = 12 the mass beyond mean ± c·sqrt(mean) + 30
    // is far below TAIL_TOLERANCE for every mean.
    let spread = 12.0 * mean.sqrt() + 30.0;
    let lo = (mean - spread).max(0.0).floor() as usize;
    let hi = (mean + spread).ceil() as usize;
    (lo, hi)
}

fn poisson_pmf(k: usize, mean: f64) -> f64 {
    if mean == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let k = k as f64;
    (k * mean.ln() - mean - ln_gamma(k + 1.0)).exp()
}

fn check(name: &'static str, value: f64) -> Result<(), AnalyticsError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(AnalyticsError::Domain { name, value })
    }
}

/// `(Q1(a, b), 1 - Q1(a, b))`, each computed from its own series.
pub fn marcum_q1_pair(a: f64, b: f64) -> Result<(f64, f64), AnalyticsError> {
    check("a", a)?;
    check("b", b)?;
    if b == 0.0 {
        return Ok((1.0, 0.0));
    }
    let lambda = 0.5 * a * a;
    let mu = 0.5 * b * b;
    let (k_lo, k_hi) = window(lambda);
    let (m_lo, m_hi) = window(mu);

    // cdf[k] = Pr[M <= k], sf[k] = Pr[M > k], for k in k_lo..=k_hi.
    let top = k_hi.max(m_hi);
    let pm: Vec<f64> = (0..=top).map(|m| if m < m_lo { 0.0 } else { poisson_pmf(m, mu) }).collect();
    // Weights are renormalized over their windows, which removes the
    // rounding drift of the log-gamma evaluation from both sums.
    let total: f64 = pm.iter().sum();
    let mut cdf = vec![0.0; top + 1];
    let mut acc = 0.0;
    for m in 0..=top {
        acc += pm[m];
        cdf[m] = acc / total;
    }
    let mut sf = vec![0.0; top + 1];
    let mut acc = 0.0;
    for m in (0..top).rev() {
        acc += pm[m + 1];
        sf[m] = acc / total;
    }

    let (mut q, mut qc, mut wsum) = (0.0, 0.0, 0.0);
    for k in k_lo..=k_hi {
        let w = poisson_pmf(k, lambda);
        wsum += w;
        q += w * cdf[k];
        qc += w * sf[k];
    }
    Ok(((q / wsum).clamp(0.0, 1.0), (qc / wsum).clamp(0.0, 1.0)))
}

/// Marcum Q-function `Q1(a, b)` for `a, b >= 0`.
pub fn marcum_q1(a: f64, b: f64) -> Result<f64, AnalyticsError> {
    marcum_q1_pair(a, b).map(|(q, _)| q)
}

/// `1 - Q1(a, b)`, accurate when `Q1` is close to one.
pub fn marcum_q1_complement(a: f64, b: f64) -> Result<f64, AnalyticsError> {
    marcum_q1_pair(a, b).map(|(_, qc)| qc)
}

#[cfg(test)]
pub(crate) mod oracle {
    //! Independent route: integrate the Rician density numerically.
    //!
    //! `1 - Q1(a, b) = ∫_0^b x exp(-(x - a)²/2) · I0e(a x) dx` where
    //! `I0e(z) = e^{-z} I0(z) = (1/π) ∫_0^π e^{z (cos t - 1)} dt`.

    fn i0e(z: f64) -> f64 {
        // Trapezoid rule on a periodic integrand converges geometrically.
        let n = 600;
        let h = std::f64::consts::PI / n as f64;
        let mut s = 0.5 * (1.0 + (-2.0 * z).exp());
        for i in 1..n {
            s += (z * ((i as f64 * h).cos() - 1.0)).exp();
        }
        s * h / std::f64::consts::PI
    }

    #[allow(clippy::too_many_arguments)]
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }

    pub fn complement_by_quadrature(a: f64, b: f64) -> f64 {
        let f = |x: f64| x * (-(x - a) * (x - a) / 2.0).exp() * i0e(a * x);
        // Split at a few points so the peak near x = a is never skipped.
        let mut cuts = vec![0.0, b];
        for c in [a - 3.0, a, a + 3.0] {
            if c > 0.0 && c < b {
                cuts.push(c);
            }
        }
        cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        cuts.windows(2)
            .map(|w| {
                let (lo, hi) = (w[0], w[1]);
                let (fa, fb, fm) = (f(lo), f(hi), f(0.5 * (lo + hi)));
                let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
                simpson(&f, lo, hi, fa, fm, fb, whole, 1e-13, 40)
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_threshold_is_certain() {
        for a in [0.0, 0.3, 5.0, 40.0] {
            assert_eq!(marcum_q1(a, 0.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn exponential_identity_at_zero_signal() {
        let s0 = std::f64::consts::FRAC_1_SQRT_2;
        for g in [0.5, 1.0, 1.95, 3.0] {
            let q = marcum_q1(0.0, 2f64.sqrt() * g / s0).unwrap();
            let want = (-g * g / (s0 * s0)).exp();
            assert!((q - want).abs() < 1e-12, "gamma={g}: {q} vs {want}");
        }
    }

    #[test]
    fn matches_quadrature_at_1_2() {
        let q = marcum_q1(1.0, 2.0).unwrap();
        let oracle = 1.0 - oracle::complement_by_quadrature(1.0, 2.0);
        assert!((q - oracle).abs() < 1e-9, "{q} vs {oracle}");
    }

    #[test]
    fn pair_sums_to_one() {
        for a in [0.0, 0.5, 2.0, 7.0, 20.0] {
            for b in [0.1, 1.0, 3.9, 8.0, 25.0] {
                let (q, qc) = marcum_q1_pair(a, b).unwrap();
                assert!((q + qc - 1.0).abs() < 1e-12, "a={a} b={b}");
            }
        }
    }

    #[test]
    fn complement_keeps_precision_in_the_far_tail() {
        // a = 20, b = 3.9: Q1 is 1 to double precision while the complement
        // is tiny but positive, so products such as F(alpha) stay meaningful.
        let (q, qc) = marcum_q1_pair(20.0, 3.9).unwrap();
        assert!(1.0 - q < 1e-15, "{q}");
        assert!(qc > 0.0 && qc < 1e-30, "{qc}");
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(marcum_q1(-1.0, 1.0), Err(AnalyticsError::Domain { name: "a", .. })));
        assert!(marcum_q1(1.0, f64::NAN).is_err());
    }
}
