//! Post-processing of counts: confidence intervals, fringe visibility and
//! accidental-coincidence estimates.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::detection::{ClickPattern, CompiledPredicate};

/// Wilson score interval for `successes` out of `n` at the given two-sided
/// confidence level. Returns `(0, 1)` when `n == 0`.
pub fn wilson_interval(successes: u64, n: u64, level: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = Normal::standard().inverse_cdf(0.5 + level / 2.0);
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    let lo = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if successes == n { 1.0 } else { (centre + half).min(1.0) };
    (lo.min(p), hi.max(p))
}

/// 95% Wilson interval.
pub fn wilson95(successes: u64, n: u64) -> (f64, f64) {
    wilson_interval(successes, n, 0.95)
}

/// `(max - min) / (max + min)` of a fringe; zero for an empty or all-zero curve.
pub fn visibility(curve: &[(f64, f64)]) -> f64 {
    let (lo, hi) = curve
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, y)| (lo.min(y), hi.max(y)));
    if curve.is_empty() || hi + lo == 0.0 {
        return 0.0;
    }
    (hi - lo) / (hi + lo)
}

/// Shuffled-pair estimate of accidental coincidences between two detectors:
/// the number of trials `i` where `a` clicks and `b` clicks on trial `i + 1`.
pub fn accidental_estimate(patterns: &[ClickPattern], a: usize, b: usize) -> u64 {
    patterns
        .windows(2)
        .filter(|w| w[0].clicked(a) && w[1].clicked(b))
        .count() as u64
}

/// Shuffled-pair estimate for a multi-detector coincidence predicate.
///
/// Detectors in `group_a` are read from trial `i`, all other detectors from
/// trial `i + 1`; the predicate is evaluated on the spliced pattern.
pub fn accidental_estimate_grouped(
    patterns: &[ClickPattern],
    group_a: u32,
    predicate: &CompiledPredicate,
) -> u64 {
    patterns
        .windows(2)
        .filter(|w| predicate.eval(splice(w[0], w[1], group_a)))
        .count() as u64
}

/// Bits in `group_a` from `first`, the rest from `second`.
#[inline]
pub fn splice(first: ClickPattern, second: ClickPattern, group_a: u32) -> ClickPattern {
    ClickPattern((first.0 & group_a) | (second.0 & !group_a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detection::Predicate;

    // Independent route to the Wilson bounds: the interval is the set of p
    // for which the score statistic |p̂ - p| / sqrt(p(1-p)/n) stays below z.
    fn score_bound(successes: u64, n: u64, z: f64, upper: bool) -> f64 {
        let phat = successes as f64 / n as f64;
        let stat = |p: f64| (phat - p).abs() / (p * (1.0 - p) / n as f64).sqrt();
        let (mut lo, mut hi) = if upper { (phat, 1.0 - 1e-15) } else { (1e-15, phat) };
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let inside = stat(mid) <= z;
            if upper == inside {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn wilson_edges() {
        assert_eq!(wilson95(0, 50).0, 0.0);
        assert_eq!(wilson95(50, 50).1, 1.0);
        assert_eq!(wilson95(0, 0), (0.0, 1.0));
    }

    #[test]
    fn wilson_half() {
        let z = 1.959_963_984_540_054;
        let (lo, hi) = wilson95(50, 100);
        let (olo, ohi) = (score_bound(50, 100, z, false), score_bound(50, 100, z, true));
        assert!((lo - olo).abs() < 1e-9 && (hi - ohi).abs() < 1e-9);
        assert!(lo < 0.5 && hi > 0.5);
        // Width frozen from the score-inversion oracle: 0.40383 .. 0.59617.
        assert!((hi - lo - 0.192_34).abs() < 1e-4, "{}", hi - lo);
    }

    #[test]
    fn wilson_matches_score_inversion() {
        let z = 1.959_963_984_540_054;
        for (k, n) in [(1u64, 20u64), (7, 125), (300, 1000), (999, 1000)] {
            let (lo, hi) = wilson95(k, n);
            assert!((lo - score_bound(k, n, z, false)).abs() < 1e-9, "{k}/{n}");
            assert!((hi - score_bound(k, n, z, true)).abs() < 1e-9, "{k}/{n}");
        }
    }

    #[test]
    fn visibility_examples() {
        assert_eq!(visibility(&[(0.0, 0.3), (1.0, 0.3)]), 0.0);
        assert_eq!(visibility(&[(0.0, 0.0), (1.0, 1.0)]), 1.0);
        assert_eq!(visibility(&[(0.0, 0.0), (1.0, 0.0)]), 0.0);
        assert_eq!(visibility(&[]), 0.0);
    }

    #[test]
    fn accidentals_on_correlated_clicks() {
        // Both detectors click on every 10th trial only.
        let patterns: Vec<ClickPattern> = (0..1000)
            .map(|i| ClickPattern(if i % 10 == 0 { 0b11 } else { 0 }))
            .collect();
        let true_coincidences = patterns.iter().filter(|p| p.0 == 0b11).count() as u64;
        assert_eq!(true_coincidences, 100);
        assert_eq!(accidental_estimate(&patterns, 0, 1), 0);

        let names = vec!["A".to_string(), "B".to_string()];
        let both = Predicate::click("A").and(Predicate::click("B")).compile(&names).unwrap();
        assert_eq!(accidental_estimate_grouped(&patterns, 0b01, &both), 0);
    }

    #[test]
    fn splice_takes_bits_from_each_side() {
        assert_eq!(splice(ClickPattern(0b0101), ClickPattern(0b1010), 0b0011).0, 0b1001);
    }
}
