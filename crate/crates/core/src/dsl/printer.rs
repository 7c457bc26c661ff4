use std::fmt::Write;

use super::spec::{ElementKind, ExperimentSpec, ParamValue, SourceKind, SweepRange, Value};
use crate::elements::PolarizationAxis;

fn num(x: f64) -> String {
    // `Display` for f64 is the shortest string that parses back exactly.
    format!("{x}")
}

fn value(v: &Value) -> String {
    match v {
        Value::Const(x) => num(*x),
        Value::Param(p) => p.clone(),
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Canonical text for a spec. Angles are written in radians without a unit,
/// so `parse(print(spec)) == spec` holds exactly.
pub fn print(spec: &ExperimentSpec) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "experiment {}", quote(&spec.name));
    let _ = writeln!(s, "config sigma0={}, gamma={}", num(spec.config.sigma0), num(spec.config.gamma));
    for p in &spec.params {
        let rhs = match &p.value {
            ParamValue::Fixed(x) => num(*x),
            ParamValue::Sweep(SweepRange::Range { start, stop, step }) => {
                format!("sweep({}, {}, {})", num(*start), num(*stop), num(*step))
            }
            ParamValue::Sweep(SweepRange::List(v)) => {
                format!("[{}]", v.iter().map(|x| num(*x)).collect::<Vec<_>>().join(", "))
            }
        };
        let _ = writeln!(s, "param {} = {rhs}", p.name);
    }
    if !spec.modes.is_empty() {
        let _ = writeln!(s, "mode {}", spec.modes.join(", "));
    }
    for src in &spec.sources {
        let kind = match &src.kind {
            SourceKind::Laser { alpha } => format!("laser(alpha={})", value(alpha)),
            SourceKind::LaserIntensity { alpha2 } => format!("laser(alpha2={})", value(alpha2)),
            SourceKind::Vacuum => "vacuum".to_string(),
            SourceKind::Entangled { r } => format!("entangled(r={})", value(r)),
        };
        let _ = writeln!(s, "source {kind} -> {}", src.modes.join(", "));
    }
    for e in &spec.elements {
        let mut args = e.modes.join(", ");
        match &e.kind {
            ElementKind::Hwp { theta } => {
                let _ = write!(args, ", theta={}", value(theta));
            }
            ElementKind::Phase { phi, axis } => {
                let _ = write!(args, ", phi={}", value(phi));
                if *axis != PolarizationAxis::Both {
                    let _ = write!(args, ", axis={}", axis.keyword());
                }
            }
            ElementKind::Polarizer { psi } => {
                let _ = write!(args, ", psi={}", value(psi));
            }
            _ => {}
        }
        let when = e.when.as_ref().map(|w| format!(" when {w}")).unwrap_or_default();
        let _ = writeln!(s, "element {}({args}){when}", e.kind.keyword());
    }
    for d in &spec.detectors {
        let gamma = d.gamma.map(|g| format!(" gamma={}", num(g))).unwrap_or_default();
        let _ = writeln!(s, "detector {} on {}{gamma}", d.name, d.mode);
    }
    let _ = writeln!(s, "condition on {}", spec.conditioning);
    let _ = writeln!(s, "postselect {}", spec.selection);
    if let Some(w) = &spec.witness {
        let _ = writeln!(s, "witness {}({}, {})", w.kind.keyword(), w.x, w.y);
    }
    let _ = writeln!(s, "trials {}", spec.trials);
    let _ = writeln!(s, "seed {}", spec.seed);
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_str;

    #[test]
    fn escapes_survive() {
        let spec = ExperimentSpec {
            name: "a \"b\" \\ c".into(),
            ..Default::default()
        };
        assert_eq!(parse_str(&print(&spec)).unwrap(), spec);
    }

    #[test]
    fn awkward_numbers_round_trip() {
        let text = "mode a\nsource laser(alpha=1e-300) -> a\nelement phase(a, phi=-0.1)\n\
                    param x = [1e21, -3.0000000000000004, 0.1]\n";
        let spec = parse_str(text).unwrap();
        assert_eq!(parse_str(&print(&spec)).unwrap(), spec);
    }
}
