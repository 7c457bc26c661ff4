//! Threshold detectors, click patterns and post-selection predicates.

use std::fmt;

use crate::field::JonesVector;

/// A detector clicks when either polarization amplitude exceeds `gamma`.
#[inline]
pub fn detector_click(v: JonesVector, gamma: f64) -> bool {
    let g2 = gamma * gamma;
    v.h.norm_sqr() > g2 || v.v.norm_sqr() > g2
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorConfig {
    pub name: String,
    pub mode: String,
    pub gamma: f64,
}

/// Maximum number of detectors in one experiment; patterns are bit masks
/// and ensembles keep a full histogram over them.
pub const MAX_DETECTORS: usize = 16;

/// Outcome of one trial: bit `i` is set when detector `i` clicked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ClickPattern(pub u32);

impl ClickPattern {
    pub fn from_clicks(clicks: &[bool]) -> Self {
        ClickPattern(
            clicks
                .iter()
                .enumerate()
                .fold(0, |acc, (i, &c)| acc | (u32::from(c) << i)),
        )
    }

    #[inline]
    pub fn clicked(self, detector: usize) -> bool {
        self.0 >> detector & 1 == 1
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// Named view, in detector declaration order.
    pub fn named<'a>(self, names: &'a [String]) -> Vec<(&'a str, bool)> {
        names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), self.clicked(i)))
            .collect()
    }
}

/// Boolean expression over detector clicks, referring to detectors by name.
#[derive(Debug, Clone, PartialEq)]
pub enum Predicate {
    True,
    False,
    Click(String),
    NoClick(String),
    Not(Box<Predicate>),
    And(Box<Predicate>, Box<Predicate>),
    Or(Box<Predicate>, Box<Predicate>),
}

impl Predicate {
    pub fn click(name: &str) -> Self {
        Predicate::Click(name.to_string())
    }

    pub fn no_click(name: &str) -> Self {
        Predicate::NoClick(name.to_string())
    }

    pub fn and(self, other: Predicate) -> Self {
        Predicate::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Predicate) -> Self {
        Predicate::Or(Box::new(self), Box::new(other))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        Predicate::Not(Box::new(self))
    }

    /// Conjunction of `click` for every detector in `on` and `noclick` for
    /// every detector in `off`.
    pub fn exactly(on: &[&str], off: &[&str]) -> Self {
        on.iter()
            .map(|d| Predicate::click(d))
            .chain(off.iter().map(|d| Predicate::no_click(d)))
            .reduce(Predicate::and)
            .unwrap_or(Predicate::True)
    }

    /// Every detector name the predicate mentions.
    pub fn detectors(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_detectors(&mut out);
        out
    }

    fn collect_detectors<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Predicate::True | Predicate::False => {}
            Predicate::Click(n) | Predicate::NoClick(n) => out.push(n),
            Predicate::Not(p) => p.collect_detectors(out),
            Predicate::And(a, b) | Predicate::Or(a, b) => {
                a.collect_detectors(out);
                b.collect_detectors(out);
            }
        }
    }

    /// Resolve detector names to indices.
    pub fn compile(&self, names: &[String]) -> Result<CompiledPredicate, String> {
        let index = |n: &str| {
            names
                .iter()
                .position(|d| d == n)
                .ok_or_else(|| format!("predicate refers to undeclared detector `{n}`"))
        };
        Ok(match self {
            Predicate::True => CompiledPredicate::Const(true),
            Predicate::False => CompiledPredicate::Const(false),
            Predicate::Click(n) => CompiledPredicate::Click(index(n)?),
            Predicate::NoClick(n) => CompiledPredicate::Not(Box::new(CompiledPredicate::Click(index(n)?))),
            Predicate::Not(p) => CompiledPredicate::Not(Box::new(p.compile(names)?)),
            Predicate::And(a, b) => {
                CompiledPredicate::And(Box::new(a.compile(names)?), Box::new(b.compile(names)?))
            }
            Predicate::Or(a, b) => {
                CompiledPredicate::Or(Box::new(a.compile(names)?), Box::new(b.compile(names)?))
            }
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Predicate::Or(..) => 1,
            Predicate::And(..) => 2,
            _ => 3,
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, p: &Predicate, min: u8| {
            if p.precedence() < min {
                write!(f, "({p})")
            } else {
                write!(f, "{p}")
            }
        };
        match self {
            Predicate::True => write!(f, "true"),
            Predicate::False => write!(f, "false"),
            Predicate::Click(n) => write!(f, "click({n})"),
            Predicate::NoClick(n) => write!(f, "noclick({n})"),
            Predicate::Not(p) => {
                write!(f, "!")?;
                wrap(f, p, 3)
            }
            // Left operands print at their own level; right operands of the
            // same level are parenthesized so the tree shape survives a reparse.
            Predicate::And(a, b) => {
                wrap(f, a, 2)?;
                write!(f, " & ")?;
                wrap(f, b, 3)
            }
            Predicate::Or(a, b) => {
                wrap(f, a, 1)?;
                write!(f, " | ")?;
                wrap(f, b, 2)
            }
        }
    }
}

/// Predicate over detector indices.
#[derive(Debug, Clone, PartialEq)]
pub enum CompiledPredicate {
    Const(bool),
    Click(usize),
    Not(Box<CompiledPredicate>),
    And(Box<CompiledPredicate>, Box<CompiledPredicate>),
    Or(Box<CompiledPredicate>, Box<CompiledPredicate>),
}

impl CompiledPredicate {
    pub fn eval(&self, p: ClickPattern) -> bool {
        match self {
            CompiledPredicate::Const(b) => *b,
            CompiledPredicate::Click(i) => p.clicked(*i),
            CompiledPredicate::Not(x) => !x.eval(p),
            CompiledPredicate::And(a, b) => a.eval(p) && b.eval(p),
            CompiledPredicate::Or(a, b) => a.eval(p) || b.eval(p),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn names(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("D{i}")).collect()
    }

    #[test]
    fn click_examples() {
        assert!(!detector_click(JonesVector::ZERO, 0.5));
        assert!(detector_click(JonesVector::real(2.0, 0.0), 1.95));
        assert!(detector_click(JonesVector::real(0.0, -2.0), 1.95));
        assert!(!detector_click(JonesVector::real(1.95, 1.95), 1.95));
        assert!(detector_click(JonesVector::new(Complex64::new(0.0, 0.0), Complex64::new(1.5, 1.5)), 1.95));
    }

    #[test]
    fn pattern_bits() {
        let p = ClickPattern::from_clicks(&[true, false, true]);
        assert_eq!(p.bits(), 0b101);
        assert!(p.clicked(0) && !p.clicked(1) && p.clicked(2));
        let n = names(3);
        assert_eq!(p.named(&n), vec![("D1", true), ("D2", false), ("D3", true)]);
    }

    #[test]
    fn undeclared_detector_rejected() {
        let p = Predicate::click("D9");
        assert!(p.compile(&names(2)).is_err());
    }

    #[test]
    fn exactly_builds_conjunction() {
        let n = names(3);
        let p = Predicate::exactly(&["D1"], &["D2", "D3"]).compile(&n).unwrap();
        assert!(p.eval(ClickPattern(0b001)));
        assert!(!p.eval(ClickPattern(0b011)));
        assert!(!p.eval(ClickPattern(0b000)));
    }

    #[test]
    fn display_respects_precedence() {
        let p = Predicate::click("A").or(Predicate::click("B")).and(Predicate::no_click("C").not());
        assert_eq!(p.to_string(), "(click(A) | click(B)) & !noclick(C)");
    }

    fn arb_pred(depth: u32) -> BoxedStrategy<Predicate> {
        let leaf = prop_oneof![
            (0..4usize).prop_map(|i| Predicate::Click(format!("D{}", i + 1))),
            (0..4usize).prop_map(|i| Predicate::NoClick(format!("D{}", i + 1))),
            Just(Predicate::True),
        ];
        leaf.prop_recursive(depth, 32, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Predicate::not),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.and(b)),
                (inner.clone(), inner).prop_map(|(a, b)| a.or(b)),
            ]
        })
        .boxed()
    }

    proptest! {
        #[test]
        fn de_morgan_and_double_negation(a in arb_pred(3), b in arb_pred(3), bits in 0u32..16) {
            let n = names(4);
            let p = ClickPattern(bits);
            let ev = |x: &Predicate| x.compile(&n).unwrap().eval(p);
            prop_assert_eq!(ev(&a.clone().and(b.clone()).not()), ev(&a.clone().not().or(b.clone().not())));
            prop_assert_eq!(ev(&a.clone().or(b.clone()).not()), ev(&a.clone().not().and(b.clone().not())));
            prop_assert_eq!(ev(&a.clone().not().not()), ev(&a));
        }

        #[test]
        fn extra_conjunct_never_adds(a in arb_pred(3), b in arb_pred(3)) {
            let n = names(4);
            let pa = a.compile(&n).unwrap();
            let pab = a.clone().and(b).compile(&n).unwrap();
            let count = |p: &CompiledPredicate| (0..16u32).filter(|&x| p.eval(ClickPattern(x))).count();
            prop_assert!(count(&pab) <= count(&pa));
        }
    }
}
