use std::collections::HashSet;

use crate::detection::{Predicate, MAX_DETECTORS};
use crate::elements::PolarizationAxis;
use crate::error::{DslError, Pos};
use crate::field::GlobalConfig;

/// Trials per ensemble when an experiment does not say otherwise.
pub const DEFAULT_TRIALS: u64 = 1_000_000;

/// A numeric argument: literal or reference to a declared parameter.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Const(f64),
    Param(String),
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Const(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepRange {
    /// Inclusive arithmetic progression.
    Range { start: f64, stop: f64, step: f64 },
    List(Vec<f64>),
}

impl SweepRange {
    pub fn values(&self) -> Vec<f64> {
        match self {
            SweepRange::List(v) => v.clone(),
            SweepRange::Range { start, stop, step } => {
                if *step == 0.0 || !((stop - start) / step).is_finite() || (stop - start) / step < -1e-9 {
                    return if step == &0.0 && start == stop { vec![*start] } else { Vec::new() };
                }
                let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
                (0..n).map(|i| start + i as f64 * step).collect()
            }
        }
    }

    /// `n` points spaced evenly on a log scale between `start` and `stop`.
    pub fn log_spaced(start: f64, stop: f64, n: usize) -> Self {
        if n == 1 {
            return SweepRange::List(vec![start]);
        }
        let (l0, l1) = (start.ln(), stop.ln());
        SweepRange::List(
            (0..n)
                .map(|i| {
                    if i == 0 {
                        start
                    } else if i == n - 1 {
                        stop
                    } else {
                        (l0 + (l1 - l0) * i as f64 / (n - 1) as f64).exp()
                    }
                })
                .collect(),
        )
    }

    /// `n` evenly spaced points from `start` to `stop` inclusive.
    pub fn linear(start: f64, stop: f64, n: usize) -> Self {
        if n == 1 {
            return SweepRange::List(vec![start]);
        }
        SweepRange::List(
            (0..n)
                .map(|i| if i == n - 1 { stop } else { start + (stop - start) * i as f64 / (n - 1) as f64 })
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    Fixed(f64),
    Sweep(SweepRange),
}

impl ParamValue {
    pub fn values(&self) -> Vec<f64> {
        match self {
            ParamValue::Fixed(v) => vec![*v],
            ParamValue::Sweep(s) => s.values(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamDecl {
    pub name: String,
    pub value: ParamValue,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SourceKind {
    /// Coherent source with real mean amplitude `alpha`.
    Laser { alpha: Value },
    /// Coherent source specified by mean photon number `|alpha|^2`.
    LaserIntensity { alpha2: Value },
    Vacuum,
    Entangled { r: Value },
}

impl SourceKind {
    /// Hidden-variable draws consumed per target mode (pair for entangled).
    pub fn draws(&self, modes: usize) -> usize {
        match self {
            SourceKind::Laser { .. } | SourceKind::LaserIntensity { .. } => 2,
            SourceKind::Vacuum => 2 * modes,
            SourceKind::Entangled { .. } => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceDecl {
    pub kind: SourceKind,
    pub modes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ElementKind {
    Bs,
    Hwp { theta: Value },
    Phase { phi: Value, axis: PolarizationAxis },
    MirrorSwap,
    Polarizer { psi: Value },
    Pbs,
    Pdbs,
}

impl ElementKind {
    pub const KEYWORDS: [&'static str; 7] = ["bs", "hwp", "phase", "mirror_swap", "polarizer", "pbs", "pdbs"];

    pub fn keyword(&self) -> &'static str {
        match self {
            ElementKind::Bs => "bs",
            ElementKind::Hwp { .. } => "hwp",
            ElementKind::Phase { .. } => "phase",
            ElementKind::MirrorSwap => "mirror_swap",
            ElementKind::Polarizer { .. } => "polarizer",
            ElementKind::Pbs => "pbs",
            ElementKind::Pdbs => "pdbs",
        }
    }

    pub fn mode_count(&self) -> usize {
        match self {
            ElementKind::Bs | ElementKind::MirrorSwap | ElementKind::Pbs | ElementKind::Pdbs => 2,
            _ => 1,
        }
    }

    fn values(&self) -> Vec<&Value> {
        match self {
            ElementKind::Hwp { theta } => vec![theta],
            ElementKind::Phase { phi, .. } => vec![phi],
            ElementKind::Polarizer { psi } => vec![psi],
            _ => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementDecl {
    pub kind: ElementKind,
    pub modes: Vec<String>,
    /// Element is present only when this parameter is non-zero.
    pub when: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorDecl {
    pub name: String,
    pub mode: String,
    /// Threshold override; the global `gamma` applies otherwise.
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    /// `|det W2|` over a 4x2 table of estimates.
    W2,
    /// Prepare-and-measure `I_DW` over a 3x2 table, `<B> = 2p - 1`.
    Idw,
    /// Heralded `I_DW` from coincidences of detectors `D1..D4`.
    HeraldIdw,
}

impl WitnessKind {
    pub fn keyword(self) -> &'static str {
        match self {
            WitnessKind::W2 => "w2",
            WitnessKind::Idw => "idw",
            WitnessKind::HeraldIdw => "herald_idw",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        match s {
            "w2" => Some(WitnessKind::W2),
            "idw" => Some(WitnessKind::Idw),
            "herald_idw" => Some(WitnessKind::HeraldIdw),
            _ => None,
        }
    }

    /// Required `(x, y)` setting counts.
    pub fn table_shape(self) -> (usize, usize) {
        match self {
            WitnessKind::W2 => (4, 2),
            WitnessKind::Idw => (3, 2),
            WitnessKind::HeraldIdw => (2, 2),
        }
    }
}

/// Marks two swept parameters as preparation (`x`) and measurement (`y`)
/// settings whose grid feeds a witness.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessDecl {
    pub kind: WitnessKind,
    pub x: String,
    pub y: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub config: GlobalConfig,
    pub params: Vec<ParamDecl>,
    pub modes: Vec<String>,
    pub sources: Vec<SourceDecl>,
    pub elements: Vec<ElementDecl>,
    pub detectors: Vec<DetectorDecl>,
    /// Numerator predicate (evaluated among conditioned trials).
    pub selection: Predicate,
    /// Denominator predicate.
    pub conditioning: Predicate,
    pub witness: Option<WitnessDecl>,
    pub trials: u64,
    pub seed: u64,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            name: String::new(),
            config: GlobalConfig::default(),
            params: Vec::new(),
            modes: Vec::new(),
            sources: Vec::new(),
            elements: Vec::new(),
            detectors: Vec::new(),
            selection: Predicate::True,
            conditioning: Predicate::True,
            witness: None,
            trials: DEFAULT_TRIALS,
            seed: 0,
        }
    }
}

/// Source positions of declarations, used to locate semantic errors.
#[derive(Debug, Clone, Default)]
pub(crate) struct Spans {
    pub params: Vec<Pos>,
    pub modes: Vec<Pos>,
    pub sources: Vec<Pos>,
    pub elements: Vec<Pos>,
    pub detectors: Vec<Pos>,
    pub selection: Pos,
    pub conditioning: Pos,
    pub witness: Pos,
    pub config: Pos,
    pub trials: Pos,
}

impl ExperimentSpec {
    pub fn param(&self, name: &str) -> Option<&ParamDecl> {
        self.params.iter().find(|p| p.name == name)
    }

    pub fn detector_names(&self) -> Vec<String> {
        self.detectors.iter().map(|d| d.name.clone()).collect()
    }

    /// Replace (or declare) a parameter.
    pub fn set_param(&mut self, name: &str, value: ParamValue) {
        match self.params.iter_mut().find(|p| p.name == name) {
            Some(p) => p.value = value,
            None => self.params.push(ParamDecl {
                name: name.to_string(),
                value,
            }),
        }
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Self {
        self.set_param(name, ParamValue::Fixed(value));
        self
    }

    /// Parameters that hold sweeps, in declaration order.
    pub fn swept_params(&self) -> Vec<&ParamDecl> {
        self.params
            .iter()
            .filter(|p| matches!(p.value, ParamValue::Sweep(_)))
            .collect()
    }

    pub fn validate(&self) -> Result<(), DslError> {
        validate_with(self, &Spans::default())
    }
}

pub(crate) fn validate_with(spec: &ExperimentSpec, spans: &Spans) -> Result<(), DslError> {
    let at = |v: &[Pos], i: usize| v.get(i).copied().unwrap_or_default();
    spec.config
        .validate()
        .map_err(|e| DslError::semantic(spans.config, e.to_string()))?;
    if spec.trials == 0 {
        return Err(DslError::semantic(spans.trials, "trials must be at least 1"));
    }

    let mut seen = HashSet::new();
    for (i, p) in spec.params.iter().enumerate() {
        if !seen.insert(p.name.as_str()) {
            return Err(DslError::semantic(at(&spans.params, i), format!("duplicate parameter `{}`", p.name)));
        }
        let values = p.value.values();
        if values.is_empty() {
            return Err(DslError::semantic(at(&spans.params, i), format!("sweep of `{}` is empty", p.name)));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(DslError::semantic(at(&spans.params, i), format!("parameter `{}` is not finite", p.name)));
        }
    }
    let check_value = |v: &Value, pos: Pos| -> Result<(), DslError> {
        match v {
            Value::Const(x) if !x.is_finite() => Err(DslError::semantic(pos, "numeric argument is not finite")),
            Value::Param(name) if spec.param(name).is_none() => {
                Err(DslError::semantic(pos, format!("undeclared parameter `{name}`")))
            }
            _ => Ok(()),
        }
    };

    let mut declared = HashSet::new();
    for (i, m) in spec.modes.iter().enumerate() {
        if !declared.insert(m.as_str()) {
            return Err(DslError::semantic(at(&spans.modes, i), format!("duplicate mode `{m}`")));
        }
    }

    let mut sourced = HashSet::new();
    for (i, s) in spec.sources.iter().enumerate() {
        let pos = at(&spans.sources, i);
        let want = match s.kind {
            SourceKind::Entangled { .. } => Some(2),
            SourceKind::Laser { .. } | SourceKind::LaserIntensity { .. } => Some(1),
            SourceKind::Vacuum => None,
        };
        if s.modes.is_empty() || want.is_some_and(|n| n != s.modes.len()) {
            return Err(DslError::semantic(
                pos,
                format!("source feeds {} mode(s), expected {}", s.modes.len(), want.unwrap_or(1)),
            ));
        }
        for m in &s.modes {
            if !declared.contains(m.as_str()) {
                return Err(DslError::semantic(pos, format!("source targets undeclared mode `{m}`")));
            }
            if !sourced.insert(m.as_str()) {
                return Err(DslError::semantic(pos, format!("duplicate source for mode `{m}`")));
            }
        }
        match &s.kind {
            SourceKind::Laser { alpha } => check_value(alpha, pos)?,
            SourceKind::LaserIntensity { alpha2 } => {
                check_value(alpha2, pos)?;
                if let Value::Const(x) = alpha2 {
                    if *x < 0.0 {
                        return Err(DslError::semantic(pos, "alpha2 must be non-negative"));
                    }
                }
            }
            SourceKind::Entangled { r } => {
                check_value(r, pos)?;
                if let Value::Const(x) = r {
                    if *x < 0.0 {
                        return Err(DslError::semantic(pos, "squeezing strength r must be non-negative"));
                    }
                }
            }
            SourceKind::Vacuum => {}
        }
    }
    for (i, m) in spec.modes.iter().enumerate() {
        if !sourced.contains(m.as_str()) {
            return Err(DslError::semantic(at(&spans.modes, i), format!("unsourced mode `{m}`")));
        }
    }

    let use_mode = |m: &str, pos: Pos| -> Result<(), DslError> {
        if !declared.contains(m) {
            Err(DslError::semantic(pos, format!("undeclared mode `{m}`")))
        } else if !sourced.contains(m) {
            Err(DslError::semantic(pos, format!("unsourced mode `{m}`")))
        } else {
            Ok(())
        }
    };
    for (i, e) in spec.elements.iter().enumerate() {
        let pos = at(&spans.elements, i);
        if e.modes.len() != e.kind.mode_count() {
            return Err(DslError::semantic(
                pos,
                format!("`{}` acts on {} mode(s), got {}", e.kind.keyword(), e.kind.mode_count(), e.modes.len()),
            ));
        }
        if e.modes.len() == 2 && e.modes[0] == e.modes[1] {
            return Err(DslError::semantic(pos, format!("`{}` needs two distinct modes", e.kind.keyword())));
        }
        for m in &e.modes {
            use_mode(m, pos)?;
        }
        for v in e.kind.values() {
            check_value(v, pos)?;
        }
        if let Some(w) = &e.when {
            if spec.param(w).is_none() {
                return Err(DslError::semantic(pos, format!("undeclared parameter `{w}`")));
            }
        }
    }

    if spec.detectors.len() > MAX_DETECTORS {
        return Err(DslError::semantic(
            at(&spans.detectors, MAX_DETECTORS),
            format!("at most {MAX_DETECTORS} detectors are supported"),
        ));
    }
    let mut names = HashSet::new();
    for (i, d) in spec.detectors.iter().enumerate() {
        let pos = at(&spans.detectors, i);
        if !names.insert(d.name.as_str()) {
            return Err(DslError::semantic(pos, format!("duplicate detector `{}`", d.name)));
        }
        use_mode(&d.mode, pos)?;
        if let Some(g) = d.gamma {
            if !(g.is_finite() && g >= 0.0) {
                return Err(DslError::semantic(pos, "detector gamma must be non-negative"));
            }
        }
    }
    for (pred, pos) in [(&spec.selection, spans.selection), (&spec.conditioning, spans.conditioning)] {
        for d in pred.detectors() {
            if !names.contains(d) {
                return Err(DslError::semantic(pos, format!("predicate refers to undeclared detector `{d}`")));
            }
        }
    }

    if let Some(w) = &spec.witness {
        let (nx, ny) = w.kind.table_shape();
        for (axis, want) in [(&w.x, nx), (&w.y, ny)] {
            let Some(p) = spec.param(axis) else {
                return Err(DslError::semantic(spans.witness, format!("undeclared parameter `{axis}`")));
            };
            let got = p.value.values().len();
            if got < want {
                return Err(DslError::semantic(
                    spans.witness,
                    format!("witness `{}` needs {want} values of `{axis}`, got {got}", w.kind.keyword()),
                ));
            }
        }
        if w.x == w.y {
            return Err(DslError::semantic(spans.witness, "witness settings must be two different parameters"));
        }
        if w.kind == WitnessKind::HeraldIdw {
            for d in ["D1", "D2", "D3", "D4"] {
                if !names.contains(d) {
                    return Err(DslError::semantic(spans.witness, format!("herald_idw requires detector `{d}`")));
                }
            }
        }
    }
    Ok(())
}
