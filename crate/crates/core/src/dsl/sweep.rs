use super::spec::{ExperimentSpec, ParamValue};

/// One concrete point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    /// Values of the swept parameters, in declaration order.
    pub assignments: Vec<(String, f64)>,
    /// The spec with every swept parameter fixed and no witness.
    pub spec: ExperimentSpec,
}

/// Cartesian product of all sweeps; the first declared sweep varies slowest.
/// A spec without sweeps expands to itself.
pub fn expand_sweeps(spec: &ExperimentSpec) -> Vec<SweepPoint> {
    let axes: Vec<(String, Vec<f64>)> = spec
        .swept_params()
        .into_iter()
        .map(|p| (p.name.clone(), p.value.values()))
        .collect();
    let total: usize = axes.iter().map(|(_, v)| v.len()).product();
    let mut out = Vec::with_capacity(total);
    for flat in 0..total {
        let mut rem = flat;
        let mut assignments = vec![(String::new(), 0.0); axes.len()];
        for (k, (name, values)) in axes.iter().enumerate().rev() {
            assignments[k] = (name.clone(), values[rem % values.len()]);
            rem /= values.len();
        }
        let mut concrete = spec.clone();
        // A witness spans several points, so single points do not carry it.
        concrete.witness = None;
        for (name, v) in &assignments {
            concrete.set_param(name, ParamValue::Fixed(*v));
        }
        out.push(SweepPoint {
            assignments,
            spec: concrete,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::spec::SweepRange;

    fn with_sweeps(sweeps: &[(&str, usize)]) -> ExperimentSpec {
        let mut spec = ExperimentSpec::default();
        spec.set_param("fixed", ParamValue::Fixed(2.0));
        for (name, n) in sweeps {
            spec.set_param(name, ParamValue::Sweep(SweepRange::linear(0.0, 1.0, *n)));
        }
        spec
    }

    #[test]
    fn sizes() {
        assert_eq!(expand_sweeps(&with_sweeps(&[])).len(), 1);
        assert_eq!(expand_sweeps(&with_sweeps(&[("phi", 25)])).len(), 25);
        assert_eq!(expand_sweeps(&with_sweeps(&[("theta", 13), ("phi", 25)])).len(), 325);
    }

    #[test]
    fn first_sweep_is_outermost() {
        let pts = expand_sweeps(&with_sweeps(&[("x", 2), ("y", 3)]));
        let xy: Vec<(f64, f64)> = pts.iter().map(|p| (p.assignments[0].1, p.assignments[1].1)).collect();
        assert_eq!(xy, vec![(0.0, 0.0), (0.0, 0.5), (0.0, 1.0), (1.0, 0.0), (1.0, 0.5), (1.0, 1.0)]);
        assert!(pts.iter().all(|p| p.spec.swept_params().is_empty()));
        assert_eq!(pts[4].spec.param("y").unwrap().value, ParamValue::Fixed(0.5));
    }
}
