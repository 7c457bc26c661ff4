//! Sweep execution, witness assembly and the Monte-Carlo versus closed-form
//! checks.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::analytics::{
    dark_click_prob, dc_single_click_probs, dw_click_probs, r_min, witness_idw, witness_w2, BTable, HeraldSettings,
    WitnessTable2,
};
use crate::detection::Predicate;
use crate::dsl::{builtin, expand_sweeps, parse_str, ExperimentSpec, ParamValue, SweepRange, WitnessKind};
use crate::ensemble::{
    point_seed, run_ensemble_counts, run_ensemble_with, CompiledExperiment, Estimate, RunOptions, RunStats,
};
use crate::error::{Error, RunError};
use crate::field::ComplexAmp;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct StudyOptions {
    pub seed: u64,
    /// Overrides the spec's trial count.
    pub trials: Option<u64>,
    /// Worker threads; 0 uses the machine's parallelism.
    pub workers: usize,
    /// Detectors read from trial `i` when estimating accidentals with
    /// shifted pairs; the others come from trial `i + 1`.
    pub accidental_group: Option<Vec<String>>,
    /// Keep points whose conditioning never held, with NaN estimates,
    /// instead of failing the whole study.
    pub keep_degenerate: bool,
}

impl StudyOptions {
    pub fn new(seed: u64, trials: u64) -> Self {
        Self {
            seed,
            trials: Some(trials),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub assignments: Vec<(String, f64)>,
    pub stats: RunStats,
}

impl PointResult {
    pub fn value(&self, name: &str) -> Option<f64> {
        self.assignments.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

/// Run every sweep point of `spec`. Point `k` uses seed `opts.seed + k`.
pub fn run_points(spec: &ExperimentSpec, opts: &StudyOptions) -> Result<Vec<PointResult>, RunError> {
    expand_sweeps(spec)
        .into_iter()
        .enumerate()
        .map(|(k, point)| {
            let exp = CompiledExperiment::compile(&point.spec)?;
            let group = match &opts.accidental_group {
                Some(names) => {
                    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
                    Some(exp.detector_mask(&refs)?)
                }
                None => None,
            };
            let run = RunOptions {
                trials: opts.trials.unwrap_or(exp.trials),
                seed: point_seed(opts.seed, k),
                workers: opts.workers,
                accidental_group: group,
            };
            let stats = if opts.keep_degenerate {
                run_ensemble_counts(&exp, &run)?
            } else {
                run_ensemble_with(&exp, &run)?
            };
            Ok(PointResult {
                assignments: point.assignments,
                stats,
            })
        })
        .collect()
}

/// Fix `name` to a single value.
pub fn fix(spec: &ExperimentSpec, name: &str, value: f64) -> ExperimentSpec {
    spec.clone().with_param(name, value)
}

/// Replace `name` by an explicit list of values.
pub fn sweep(spec: &ExperimentSpec, name: &str, values: &[f64]) -> ExperimentSpec {
    let mut s = spec.clone();
    s.set_param(name, ParamValue::Sweep(SweepRange::List(values.to_vec())));
    s
}

/// `count / trials` for every point when a predicate has no conditioning.
fn rate(stats: &RunStats, p: &Predicate) -> Result<Estimate, RunError> {
    let n = stats.count(p)?;
    Estimate::from_counts(n, stats.trials)
}

#[derive(Debug, Clone, PartialEq)]
pub enum WitnessValue {
    W2 { table: WitnessTable2, det: f64 },
    Idw { table: BTable, idw: f64, r_min: f64 },
    Herald { table: BTable, idw: f64, r_min: f64, p1j: [f64; 8] },
}

/// One witness evaluation: all cells sharing the remaining parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessRow {
    /// Values of the swept parameters other than the witness settings.
    pub outer: Vec<(String, f64)>,
    /// Cell results indexed `[x][y]`.
    pub cells: Vec<Vec<PointResult>>,
    pub value: WitnessValue,
}

impl WitnessRow {
    /// True when some cell had no conditioning events, leaving NaN entries.
    pub fn is_degenerate(&self) -> bool {
        let v = match &self.value {
            WitnessValue::W2 { det, .. } => *det,
            WitnessValue::Idw { idw, .. } | WitnessValue::Herald { idw, .. } => *idw,
        };
        v.is_nan()
    }

    pub fn pooled(&self) -> (u64, u64) {
        self.cells
            .iter()
            .flatten()
            .fold((0, 0), |(n, d), c| (n + c.stats.numerator, d + c.stats.denominator))
    }
}

/// Heralded conditionals `p_ij = #C_ij / #C_i` of one cell, as
/// `[[p13, p14], [p23, p24]]`.
pub fn herald_conditionals(stats: &RunStats) -> Result<[[f64; 2]; 2], RunError> {
    let c = |bob: &str, alice: &str| {
        let (b_off, a_off) = (if bob == "D1" { "D2" } else { "D1" }, if alice == "D3" { "D4" } else { "D3" });
        stats.count(&Predicate::exactly(&[bob, alice], &[b_off, a_off]))
    };
    let (c13, c14, c23, c24) = (c("D1", "D3")?, c("D1", "D4")?, c("D2", "D3")?, c("D2", "D4")?);
    let (c1, c2) = (c13 + c14, c23 + c24);
    if c1 == 0 || c2 == 0 {
        return Err(RunError::DegenerateDenominator { trials: stats.trials });
    }
    let (c1, c2) = (c1 as f64, c2 as f64);
    Ok([[c13 as f64 / c1, c14 as f64 / c1], [c23 as f64 / c2, c24 as f64 / c2]])
}

/// Group sweep points by everything except the witness settings and
/// evaluate the declared witness on each group. Cells without heralds give
/// NaN entries; see [`WitnessRow::is_degenerate`].
pub fn witness_rows(spec: &ExperimentSpec, points: &[PointResult]) -> Result<Vec<WitnessRow>, Error> {
    let Some(w) = &spec.witness else {
        return Ok(Vec::new());
    };
    let (nx, ny) = w.kind.table_shape();
    let values = |name: &str| spec.param(name).map(|p| p.value.values()).unwrap_or_default();
    let (xs, ys) = (values(&w.x), values(&w.y));
    let index = |vals: &[f64], v: f64| vals.iter().position(|&u| u == v);

    let mut rows: Vec<(Vec<(String, f64)>, Vec<Vec<Option<PointResult>>>)> = Vec::new();
    for p in points {
        let outer: Vec<(String, f64)> =
            p.assignments.iter().filter(|(n, _)| n != &w.x && n != &w.y).cloned().collect();
        let (Some(xi), Some(yi)) = (
            p.value(&w.x).and_then(|v| index(&xs, v)).or(if xs.len() == 1 { Some(0) } else { None }),
            p.value(&w.y).and_then(|v| index(&ys, v)).or(if ys.len() == 1 { Some(0) } else { None }),
        ) else {
            continue;
        };
        if xi >= nx || yi >= ny {
            continue;
        }
        let slot = match rows.iter().position(|(o, _)| o == &outer) {
            Some(i) => i,
            None => {
                rows.push((outer, vec![vec![None; ny]; nx]));
                rows.len() - 1
            }
        };
        rows[slot].1[xi][yi] = Some(p.clone());
    }

    rows.into_iter()
        .map(|(outer, grid)| {
            let cells: Vec<Vec<PointResult>> = grid
                .into_iter()
                .enumerate()
                .map(|(x, row)| {
                    row.into_iter()
                        .enumerate()
                        .map(|(y, c)| {
                            c.ok_or_else(|| {
                                crate::error::AnalyticsError::MissingEntry(format!("({}, {})", x + 1, y + 1)).into()
                            })
                        })
                        .collect::<Result<Vec<_>, Error>>()
                })
                .collect::<Result<_, _>>()?;
            let value = match w.kind {
                WitnessKind::W2 => {
                    let mut p = [[0.0; 2]; 4];
                    for (x, row) in cells.iter().enumerate() {
                        for (y, c) in row.iter().enumerate() {
                            p[x][y] = c.stats.estimate;
                        }
                    }
                    let table = WitnessTable2 { p };
                    WitnessValue::W2 {
                        det: witness_w2(&table),
                        table,
                    }
                }
                WitnessKind::Idw => {
                    let mut b = [[0.0; 2]; 3];
                    for (x, row) in cells.iter().enumerate() {
                        for (y, c) in row.iter().enumerate() {
                            b[x][y] = 2.0 * c.stats.estimate - 1.0;
                        }
                    }
                    let table = BTable::PrepareMeasure(b);
                    let idw = witness_idw(&table);
                    WitnessValue::Idw {
                        table,
                        idw,
                        r_min: r_min(idw),
                    }
                }
                WitnessKind::HeraldIdw => {
                    let mut cond = [[[[0.0; 2]; 2]; 2]; 2];
                    for (x, row) in cells.iter().enumerate() {
                        for (y, c) in row.iter().enumerate() {
                            cond[x][y] = herald_conditionals(&c.stats).unwrap_or([[f64::NAN; 2]; 2]);
                        }
                    }
                    let (mut b3, mut b4) = ([[0.0; 2]; 2], [[0.0; 2]; 2]);
                    for x in 0..2 {
                        for y in 0..2 {
                            let p = cond[x][y];
                            b3[x][y] = p[1][0] - p[0][0];
                            b4[x][y] = p[1][1] - p[0][1];
                        }
                    }
                    let p1j = HeraldSettings::default()
                        .bases()
                        .map(|b| cond[b.x - 1][b.y - 1][0][b.herald - 3]);
                    let table = BTable::Herald { b3, b4 };
                    let idw = witness_idw(&table);
                    WitnessValue::Herald {
                        table,
                        idw,
                        r_min: r_min(idw),
                        p1j,
                    }
                }
            };
            Ok(WitnessRow { outer, cells, value })
        })
        .collect()
}

/// Monte-Carlo and closed-form values of one delayed-choice point.
#[derive(Debug, Clone, PartialEq)]
pub struct DcPoint {
    pub phi: f64,
    pub mc: Estimate,
    pub closed: f64,
}

/// Single-click probability of D1 versus `phi` for the delayed-choice setup.
pub fn dc_curve(alpha: f64, theta: f64, bs2: bool, phis: &[f64], opts: &StudyOptions) -> Result<Vec<DcPoint>, Error> {
    let base = builtin("dc")?;
    let spec = sweep(
        &fix(&fix(&fix(&base, "alpha", alpha), "theta", theta), "bs2", f64::from(u8::from(bs2))),
        "phi",
        phis,
    );
    let sel = Predicate::exactly(&["D1"], &["D2"]);
    run_points(&spec, opts)?
        .into_iter()
        .map(|p| {
            let phi = p.value("phi").unwrap_or(phis[0]);
            let closed = dc_single_click_probs(
                ComplexAmp::new(alpha, 0.0),
                theta,
                phi,
                spec.config.sigma0,
                spec.config.gamma,
                bs2,
            )?
            .p1;
            Ok(DcPoint {
                phi,
                mc: rate(&p.stats, &sel)?,
                closed,
            })
        })
        .collect()
}

/// Expected counts minus dark counts, `N p1 - N p_d`, along a closed-form curve.
pub fn expected_counts_minus_dark(points: &[DcPoint], trials: u64, sigma0: f64, gamma: f64) -> Result<Vec<(f64, f64)>, Error> {
    let pd = dark_click_prob(sigma0, gamma)?;
    let n = trials as f64;
    Ok(points.iter().map(|p| (p.phi, n * p.closed - n * pd)).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EraserPoint {
    pub phi: f64,
    /// Single click on D1 given a click on D3.
    pub p13: Estimate,
    /// Single click on D1 without conditioning.
    pub p1: Estimate,
}

pub fn eraser_curves(r: f64, theta: f64, phis: &[f64], opts: &StudyOptions) -> Result<Vec<EraserPoint>, Error> {
    let spec = sweep(&fix(&fix(&builtin("eraser")?, "r", r), "theta", theta), "phi", phis);
    let sel = Predicate::exactly(&["D1"], &["D2"]);
    run_points(&spec, opts)?
        .into_iter()
        .map(|p| {
            Ok(EraserPoint {
                phi: p.value("phi").unwrap_or(phis[0]),
                p13: p.stats.estimate_for(&sel, &Predicate::click("D3"))?,
                p1: rate(&p.stats, &sel)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PdbsPoint {
    pub theta: f64,
    pub phi: f64,
    pub estimate: Estimate,
    /// Heralded coincidences (the conditioning count).
    pub coincidences: u64,
    /// Shuffled-pair estimate of accidental coincidences.
    pub accidentals: u64,
}

/// Interferometer detectors, read from trial `i` in the accidental estimate.
pub const PDBS_INTERFEROMETER: [&str; 4] = ["D1", "D2", "D3", "D4"];

pub fn pdbs_grid(r: f64, thetas: &[f64], phis: &[f64], opts: &StudyOptions) -> Result<Vec<PdbsPoint>, Error> {
    let spec = sweep(&sweep(&fix(&builtin("pdbs")?, "r", r), "theta", thetas), "phi", phis);
    let mut opts = opts.clone();
    opts.accidental_group = Some(PDBS_INTERFEROMETER.iter().map(|s| s.to_string()).collect());
    run_points(&spec, &opts)?
        .into_iter()
        .map(|p| {
            let estimate = Estimate::from_counts(p.stats.numerator, p.stats.denominator)?;
            Ok(PdbsPoint {
                theta: p.value("theta").unwrap_or(thetas[0]),
                phi: p.value("phi").unwrap_or(phis[0]),
                estimate,
                coincidences: p.stats.denominator,
                accidentals: p.stats.accidentals(&spec.conditioning)?.unwrap_or(0),
            })
        })
        .collect()
}

/// Witness rows of the `dw` builtin at the given intensities, with the
/// preparation and measurement phases replaced by `phis` and `sigmas`.
pub fn dw_witness(
    alpha2s: &[f64],
    phis: &[f64],
    sigmas: &[f64],
    kind: WitnessKind,
    opts: &StudyOptions,
) -> Result<Vec<WitnessRow>, Error> {
    let mut spec = sweep(&sweep(&sweep(&builtin("dw")?, "alpha2", alpha2s), "phix", phis), "sigy", sigmas);
    if let Some(w) = spec.witness.as_mut() {
        w.kind = kind;
    }
    let points = run_points(&spec, opts)?;
    checked(witness_rows(&spec, &points)?)
}

/// Heralded witness rows at the given squeezing strengths.
pub fn herald_witness(rs: &[f64], opts: &StudyOptions) -> Result<Vec<WitnessRow>, Error> {
    let spec = sweep(&builtin("herald-dw")?, "r", rs);
    let points = run_points(&spec, opts)?;
    checked(witness_rows(&spec, &points)?)
}

fn checked(rows: Vec<WitnessRow>) -> Result<Vec<WitnessRow>, Error> {
    match rows.iter().find(|r| r.is_degenerate()) {
        Some(r) => Err(RunError::DegenerateDenominator {
            trials: r.cells[0][0].stats.trials,
        }
        .into()),
        None => Ok(rows),
    }
}

/// Outcome of one Monte-Carlo versus closed-form comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub mc: f64,
    pub closed: f64,
    /// Binomial standard deviation of the Monte-Carlo estimate.
    pub sigma: f64,
    pub pass: bool,
}

impl CheckOutcome {
    fn new(name: String, est: &Estimate, closed: f64) -> Self {
        let n = est.denominator as f64;
        let sigma = (closed * (1.0 - closed) / n).sqrt();
        let pass = (est.estimate - closed).abs() <= 4.0 * sigma;
        Self {
            name,
            mc: est.estimate,
            closed,
            sigma,
            pass,
        }
    }
}

const VACUUM: &str = "
experiment \"vacuum\"
mode a
source vacuum -> a
detector D on a
postselect click(D)
";

/// The Monte-Carlo against closed-form oracle suite: dark counts, the
/// delayed-choice probabilities with and without BS2, and the Mach-Zehnder
/// exclusive singles.
pub fn oracle_suite(trials: u64, opts: &StudyOptions) -> Result<Vec<CheckOutcome>, Error> {
    let mut out = Vec::new();
    let opts = StudyOptions {
        trials: Some(trials),
        ..opts.clone()
    };

    let vac = parse_str(VACUUM)?;
    let s = &run_points(&vac, &opts)?[0].stats;
    let pd = dark_click_prob(vac.config.sigma0, vac.config.gamma)?;
    out.push(CheckOutcome::new("dark count rate".into(), &rate(s, &Predicate::click("D"))?, pd));

    let phis: Vec<f64> = (0..4).map(|i| i as f64 * PI / 2.0).collect();
    for (theta, bs2) in [(0.0, true), (PI / 6.0, true), (0.0, false)] {
        for p in dc_curve(0.1, theta, bs2, &phis, &opts)? {
            out.push(CheckOutcome::new(
                format!("dc p1 theta={:.4} phi={:.4} bs2={bs2}", theta, p.phi),
                &p.mc,
                p.closed,
            ));
        }
    }
    // Bright enough that the singles are dominated by signal.
    let dc = builtin("dc")?;
    let bright = fix(&fix(&fix(&dc, "alpha", 3.0), "theta", PI / 8.0), "phi", PI / 3.0);
    let s = &run_points(&bright, &opts)?[0].stats;
    let closed = dc_single_click_probs(ComplexAmp::new(3.0, 0.0), PI / 8.0, PI / 3.0, FRAC_1_SQRT_2, 1.95, true)?;
    out.push(CheckOutcome::new("dc Pr[D1] alpha=3".into(), &rate(s, &Predicate::click("D1"))?, closed.pr_d1));
    out.push(CheckOutcome::new("dc Pr[D2] alpha=3".into(), &rate(s, &Predicate::click("D2"))?, closed.pr_d2));

    let dw = builtin("dw")?;
    for (alpha2, delta) in [(1.3, 0.0), (1.3, PI / 2.0), (0.58, 7.0 * PI / 4.0 + PI / 2.0), (4.0, 2.0)] {
        let spec = fix(&fix(&fix(&dw, "alpha2", alpha2), "phix", delta), "sigy", 0.0);
        let s = &run_points(&spec, &opts)?[0].stats;
        let (p1, _) = dw_click_probs(ComplexAmp::new(alpha2.sqrt(), 0.0), delta, FRAC_1_SQRT_2, 1.95)?;
        out.push(CheckOutcome::new(
            format!("dw p1 alpha2={alpha2} delta={delta:.4}"),
            &Estimate::from_counts(s.numerator, s.denominator)?,
            p1,
        ));
    }
    Ok(out)
}
