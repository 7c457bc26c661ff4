//! Compilation of a concrete [`ExperimentSpec`] into a trial kernel, and the
//! parallel ensemble runner.
//!
//! Trials are grouped into fixed blocks of [`BLOCK_TRIALS`]; each block
//! produces a histogram over click patterns and the histograms are summed.
//! Since every hidden variable is addressed by `(seed, trial, draw)`, the
//! result does not depend on the number of workers.

use rayon::prelude::*;

use crate::detection::{ClickPattern, CompiledPredicate, Predicate, MAX_DETECTORS};
use crate::dsl::{ElementKind, ExperimentSpec, ParamValue, SourceKind, Value};
use crate::elements::{
    apply_beam_splitter, apply_half_wave_plate, apply_mirror_swap, apply_pbs, apply_pdbs, apply_polarizer,
    apply_retarder, sample_entangled_pair, sample_laser, sample_vacuum, Element, EntangledSourceParams,
    LaserSourceParams,
};
use crate::error::RunError;
use crate::field::{ComplexAmp, GlobalConfig, JonesVector};
use crate::rng::{sample_standard_complex_gaussian, DrawAddress};
use crate::stats::{splice, wilson95};

pub const BLOCK_TRIALS: u64 = 1 << 16;

/// Largest number of spatial modes in one experiment.
pub const MAX_MODES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
enum SourceOp {
    Laser { alpha: ComplexAmp, mode: usize, draw: u64 },
    Vacuum { mode: usize, draw: u64 },
    Entangled { r: f64, a: usize, c: usize, draw: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct ElementOp {
    element: Element,
    modes: [usize; 2],
    draw: u64,
    enabled: bool,
}

/// An experiment with every parameter resolved, ready to run.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledExperiment {
    pub name: String,
    pub config: GlobalConfig,
    pub modes: Vec<String>,
    pub detector_names: Vec<String>,
    pub selection: Predicate,
    pub conditioning: Predicate,
    pub trials: u64,
    pub seed: u64,
    /// Hidden-variable draws consumed per trial.
    pub draws_per_trial: u64,
    sources: Vec<SourceOp>,
    elements: Vec<ElementOp>,
    /// `(mode, gamma^2)` per detector.
    detectors: Vec<(usize, f64)>,
    compiled_selection: CompiledPredicate,
    compiled_conditioning: CompiledPredicate,
}

fn resolve(spec: &ExperimentSpec, v: &Value) -> Result<f64, RunError> {
    match v {
        Value::Const(x) => Ok(*x),
        Value::Param(name) => match spec.param(name).map(|p| &p.value) {
            Some(ParamValue::Fixed(x)) => Ok(*x),
            Some(ParamValue::Sweep(_)) => Err(RunError::UnexpandedSweep(name.clone())),
            None => Err(RunError::Invalid(format!("undeclared parameter `{name}`"))),
        },
    }
}

impl CompiledExperiment {
    /// Validate `spec` and resolve it against its (fixed) parameters.
    pub fn compile(spec: &ExperimentSpec) -> Result<Self, RunError> {
        spec.validate().map_err(|e| RunError::Invalid(e.to_string()))?;
        if spec.modes.len() > MAX_MODES {
            return Err(RunError::Invalid(format!("at most {MAX_MODES} modes are supported")));
        }
        let mode = |m: &str| {
            spec.modes
                .iter()
                .position(|x| x == m)
                .ok_or_else(|| RunError::UnsourcedMode(m.to_string()))
        };

        let mut draw = 0u64;
        let mut sources = Vec::new();
        for s in &spec.sources {
            match &s.kind {
                SourceKind::Laser { alpha } => {
                    sources.push(SourceOp::Laser {
                        alpha: ComplexAmp::new(resolve(spec, alpha)?, 0.0),
                        mode: mode(&s.modes[0])?,
                        draw,
                    });
                    draw += 2;
                }
                SourceKind::LaserIntensity { alpha2 } => {
                    let a2 = resolve(spec, alpha2)?;
                    if !(a2 >= 0.0) {
                        return Err(RunError::Invalid(format!("alpha2 must be non-negative, got {a2}")));
                    }
                    sources.push(SourceOp::Laser {
                        alpha: ComplexAmp::new(a2.sqrt(), 0.0),
                        mode: mode(&s.modes[0])?,
                        draw,
                    });
                    draw += 2;
                }
                SourceKind::Vacuum => {
                    for m in &s.modes {
                        sources.push(SourceOp::Vacuum { mode: mode(m)?, draw });
                        draw += 2;
                    }
                }
                SourceKind::Entangled { r } => {
                    let r = resolve(spec, r)?;
                    if !(r >= 0.0) {
                        return Err(RunError::Invalid(format!("r must be non-negative, got {r}")));
                    }
                    sources.push(SourceOp::Entangled {
                        r,
                        a: mode(&s.modes[0])?,
                        c: mode(&s.modes[1])?,
                        draw,
                    });
                    draw += 4;
                }
            }
        }

        let mut elements = Vec::new();
        for e in &spec.elements {
            let element = match &e.kind {
                ElementKind::Bs => Element::BeamSplitter,
                ElementKind::Hwp { theta } => Element::HalfWavePlate { theta: resolve(spec, theta)? },
                ElementKind::Phase { phi, axis } => Element::PhaseDelay {
                    phi: resolve(spec, phi)?,
                    axis: *axis,
                },
                ElementKind::MirrorSwap => Element::MirrorSwap,
                ElementKind::Polarizer { psi } => Element::Polarizer { psi: resolve(spec, psi)? },
                ElementKind::Pbs => Element::Pbs,
                ElementKind::Pdbs => Element::Pdbs,
            };
            let enabled = match &e.when {
                Some(p) => resolve(spec, &Value::Param(p.clone()))? != 0.0,
                None => true,
            };
            let m0 = mode(&e.modes[0])?;
            let m1 = if element.mode_count() == 2 { mode(&e.modes[1])? } else { m0 };
            elements.push(ElementOp {
                element,
                modes: [m0, m1],
                draw,
                enabled,
            });
            // Disabled elements keep their draws so seeds mean the same thing
            // with and without them.
            draw += element.vacuum_draws() as u64;
        }

        let detector_names = spec.detector_names();
        if detector_names.len() > MAX_DETECTORS {
            return Err(RunError::Invalid(format!("at most {MAX_DETECTORS} detectors are supported")));
        }
        let detectors = spec
            .detectors
            .iter()
            .map(|d| {
                let g = d.gamma.unwrap_or(spec.config.gamma);
                Ok((mode(&d.mode)?, g * g))
            })
            .collect::<Result<Vec<_>, RunError>>()?;
        let compiled_selection = spec.selection.compile(&detector_names).map_err(RunError::Invalid)?;
        let compiled_conditioning = spec.conditioning.compile(&detector_names).map_err(RunError::Invalid)?;

        Ok(Self {
            name: spec.name.clone(),
            config: spec.config,
            modes: spec.modes.clone(),
            detector_names,
            selection: spec.selection.clone(),
            conditioning: spec.conditioning.clone(),
            trials: spec.trials,
            seed: spec.seed,
            draws_per_trial: draw,
            sources,
            elements,
            detectors,
            compiled_selection,
            compiled_conditioning,
        })
    }

    pub fn detector_index(&self, name: &str) -> Option<usize> {
        self.detector_names.iter().position(|d| d == name)
    }

    pub fn compile_predicate(&self, p: &Predicate) -> Result<CompiledPredicate, RunError> {
        p.compile(&self.detector_names).map_err(RunError::Invalid)
    }

    /// Bit mask of the named detectors.
    pub fn detector_mask(&self, names: &[&str]) -> Result<u32, RunError> {
        names.iter().try_fold(0u32, |acc, n| {
            self.detector_index(n)
                .map(|i| acc | (1 << i))
                .ok_or_else(|| RunError::Invalid(format!("undeclared detector `{n}`")))
        })
    }

    /// One realization, drawing hidden variable `k` from `draw(k)`.
    pub fn run_trial_with(&self, mut draw: impl FnMut(u64) -> ComplexAmp) -> ClickPattern {
        let mut state = [JonesVector::ZERO; MAX_MODES];
        self.propagate(&mut state, &mut draw)
    }

    /// One realization of trial `trial_index` under `seed`.
    pub fn run_trial(&self, seed: u64, trial_index: u64) -> ClickPattern {
        self.run_trial_with(|k| sample_standard_complex_gaussian(DrawAddress::new(seed, trial_index, k)))
    }

    #[inline]
    fn propagate(&self, state: &mut [JonesVector; MAX_MODES], draw: &mut impl FnMut(u64) -> ComplexAmp) -> ClickPattern {
        let s0 = self.config.sigma0;
        for src in &self.sources {
            match *src {
                SourceOp::Laser { alpha, mode, draw: k } => {
                    state[mode] = sample_laser(LaserSourceParams { alpha }, s0, [draw(k), draw(k + 1)]);
                }
                SourceOp::Vacuum { mode, draw: k } => {
                    state[mode] = sample_vacuum(s0, [draw(k), draw(k + 1)]);
                }
                SourceOp::Entangled { r, a, c, draw: k } => {
                    let z = [draw(k), draw(k + 1), draw(k + 2), draw(k + 3)];
                    let (va, vc) = sample_entangled_pair(EntangledSourceParams { r }, s0, z);
                    state[a] = va;
                    state[c] = vc;
                }
            }
        }
        for op in &self.elements {
            if !op.enabled {
                continue;
            }
            let [i, j] = op.modes;
            let two = |state: &mut [JonesVector; MAX_MODES], f: fn(JonesVector, JonesVector) -> (JonesVector, JonesVector)| {
                let (x, y) = f(state[i], state[j]);
                state[i] = x;
                state[j] = y;
            };
            match op.element {
                Element::BeamSplitter => two(state, apply_beam_splitter),
                Element::MirrorSwap => two(state, apply_mirror_swap),
                Element::Pbs => two(state, apply_pbs),
                Element::Pdbs => two(state, apply_pdbs),
                Element::HalfWavePlate { theta } => state[i] = apply_half_wave_plate(state[i], theta),
                Element::PhaseDelay { phi, axis } => state[i] = apply_retarder(state[i], phi, axis),
                Element::Polarizer { psi } => state[i] = apply_polarizer(state[i], psi, draw(op.draw), s0),
            }
        }
        let mut bits = 0u32;
        for (d, &(mode, g2)) in self.detectors.iter().enumerate() {
            let v = state[mode];
            if v.h.norm_sqr() > g2 || v.v.norm_sqr() > g2 {
                bits |= 1 << d;
            }
        }
        ClickPattern(bits)
    }

    fn block(&self, seed: u64, start: u64, end: u64, trials: u64, group: Option<u32>) -> (Vec<u64>, Vec<u64>) {
        let size = 1usize << self.detector_names.len();
        let mut hist = vec![0u64; size];
        let mut shifted = if group.is_some() { vec![0u64; size] } else { Vec::new() };
        let mut state = [JonesVector::ZERO; MAX_MODES];
        let mut pattern_of = |t: u64| {
            self.propagate(&mut state, &mut |k| sample_standard_complex_gaussian(DrawAddress::new(seed, t, k)))
        };
        let mut prev: Option<ClickPattern> = None;
        for t in start..end {
            let p = pattern_of(t);
            hist[p.0 as usize] += 1;
            if let (Some(g), Some(q)) = (group, prev) {
                shifted[splice(q, p, g).0 as usize] += 1;
            }
            prev = Some(p);
        }
        if let (Some(g), Some(q)) = (group, prev) {
            if end < trials {
                let p = pattern_of(end);
                shifted[splice(q, p, g).0 as usize] += 1;
            }
        }
        (hist, shifted)
    }
}

/// Ensemble settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub trials: u64,
    pub seed: u64,
    /// Worker threads; 0 uses the machine's parallelism.
    pub workers: usize,
    /// When set, also histogram the shifted-pair patterns: bits in this mask
    /// from trial `i`, the remaining bits from trial `i + 1`.
    pub accidental_group: Option<u32>,
}

impl RunOptions {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self {
            trials,
            seed,
            workers: 0,
            accidental_group: None,
        }
    }
}

/// Counts and estimate for one predicate pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub numerator: u64,
    pub denominator: u64,
    pub estimate: f64,
    pub ci95: (f64, f64),
}

impl Estimate {
    pub fn from_counts(numerator: u64, denominator: u64) -> Result<Self, RunError> {
        if denominator == 0 {
            return Err(RunError::DegenerateDenominator { trials: 0 });
        }
        Ok(Self {
            numerator,
            denominator,
            estimate: numerator as f64 / denominator as f64,
            ci95: wilson95(numerator, denominator),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunStats {
    pub trials: u64,
    pub numerator: u64,
    pub denominator: u64,
    pub estimate: f64,
    pub ci95: (f64, f64),
    pub seed: u64,
    pub detector_names: Vec<String>,
    /// Clicks per detector, in declaration order.
    pub singles: Vec<u64>,
    /// Trial counts indexed by click-pattern bits.
    pub histogram: Vec<u64>,
    /// Shifted-pair histogram when an accidental group was requested.
    pub shifted_histogram: Option<Vec<u64>>,
}

fn count(hist: &[u64], p: &CompiledPredicate) -> u64 {
    hist.iter()
        .enumerate()
        .filter(|&(bits, &n)| n > 0 && p.eval(ClickPattern(bits as u32)))
        .map(|(_, &n)| n)
        .sum()
}

impl RunStats {
    fn compile(&self, p: &Predicate) -> Result<CompiledPredicate, RunError> {
        p.compile(&self.detector_names).map_err(RunError::Invalid)
    }

    /// Trials satisfying `p`.
    pub fn count(&self, p: &Predicate) -> Result<u64, RunError> {
        Ok(count(&self.histogram, &self.compile(p)?))
    }

    /// Conditional estimate `#(selection & conditioning) / #conditioning`
    /// from the stored histogram.
    pub fn estimate_for(&self, selection: &Predicate, conditioning: &Predicate) -> Result<Estimate, RunError> {
        let cond = self.compile(conditioning)?;
        let both = self.compile(&selection.clone().and(conditioning.clone()))?;
        Estimate::from_counts(count(&self.histogram, &both), count(&self.histogram, &cond))
            .map_err(|_| RunError::DegenerateDenominator { trials: self.trials })
    }

    /// Shuffled-pair count of `p`, if the run recorded shifted pairs.
    pub fn accidentals(&self, p: &Predicate) -> Result<Option<u64>, RunError> {
        let c = self.compile(p)?;
        Ok(self.shifted_histogram.as_ref().map(|h| count(h, &c)))
    }
}

/// Run `opts.trials` realizations of `exp` and count its predicates.
pub fn run_ensemble_with(exp: &CompiledExperiment, opts: &RunOptions) -> Result<RunStats, RunError> {
    let stats = run_ensemble_counts(exp, opts)?;
    if stats.denominator == 0 {
        return Err(RunError::DegenerateDenominator { trials: stats.trials });
    }
    Ok(stats)
}

/// Like [`run_ensemble_with`], but a run whose conditioning never holds is
/// returned with a NaN estimate and interval instead of an error.
pub fn run_ensemble_counts(exp: &CompiledExperiment, opts: &RunOptions) -> Result<RunStats, RunError> {
    let trials = opts.trials;
    let size = 1usize << exp.detector_names.len();
    let blocks = trials.div_ceil(BLOCK_TRIALS);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| RunError::Pool(e.to_string()))?;
    let add = |mut a: (Vec<u64>, Vec<u64>), b: (Vec<u64>, Vec<u64>)| {
        if a.0.is_empty() {
            return b;
        }
        a.0.iter_mut().zip(&b.0).for_each(|(x, y)| *x += y);
        a.1.iter_mut().zip(&b.1).for_each(|(x, y)| *x += y);
        a
    };
    let (histogram, shifted) = pool.install(|| {
        (0..blocks)
            .into_par_iter()
            .map(|b| {
                let start = b * BLOCK_TRIALS;
                let end = (start + BLOCK_TRIALS).min(trials);
                exp.block(opts.seed, start, end, trials, opts.accidental_group)
            })
            .reduce(|| (Vec::new(), Vec::new()), add)
    });
    let histogram = if histogram.is_empty() { vec![0; size] } else { histogram };
    let shifted_histogram = opts.accidental_group.map(|_| if shifted.is_empty() { vec![0; size] } else { shifted });

    let singles = (0..exp.detector_names.len())
        .map(|d| {
            histogram
                .iter()
                .enumerate()
                .filter(|(bits, _)| bits >> d & 1 == 1)
                .map(|(_, &n)| n)
                .sum()
        })
        .collect();
    let denominator = count(&histogram, &exp.compiled_conditioning);
    let numerator = count(
        &histogram,
        &CompiledPredicate::And(
            Box::new(exp.compiled_selection.clone()),
            Box::new(exp.compiled_conditioning.clone()),
        ),
    );
    let (estimate, ci95) = if denominator == 0 {
        (f64::NAN, (f64::NAN, f64::NAN))
    } else {
        (numerator as f64 / denominator as f64, wilson95(numerator, denominator))
    };
    Ok(RunStats {
        trials,
        numerator,
        denominator,
        estimate,
        ci95,
        seed: opts.seed,
        detector_names: exp.detector_names.clone(),
        singles,
        histogram,
        shifted_histogram,
    })
}

/// Run `trials` realizations with `workers` threads (0 for all cores).
pub fn run_ensemble(exp: &CompiledExperiment, trials: u64, seed: u64, workers: usize) -> Result<RunStats, RunError> {
    run_ensemble_with(
        exp,
        &RunOptions {
            trials,
            seed,
            workers,
            accidental_group: None,
        },
    )
}

/// Seed for point `index` of a sweep run with base seed `seed`.
pub fn point_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add(index as u64)
}
