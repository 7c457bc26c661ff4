//! The `zpf` command line.
//!
//! ```text
//! zpf run (--builtin NAME | --file PATH) [--seed U64] [--trials N] [--threads K]
//!         [--sweep P=SPEC]... [--accidentals D1,D2] [--out PATH]
//! zpf analytic (dc | dw | rmin | marcum) [options] [--out PATH]
//! zpf check [--trials N] [--seed U64] [--threads K]
//! ```
//!
//! Sweep specs are `a:b:N` (linear, `N` points), `a:b:logN` (log-spaced) or
//! a comma list; a trailing `deg` converts the values from degrees.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::analytics::{
    dc_single_click_probs, dw_idw_table, dw_w2_table, marcum_q1_pair, r_min, witness_idw, witness_w2,
};
use crate::dsl::{builtin, parse_str, ExperimentSpec, ParamValue, SweepRange};
use crate::error::{Error, RunError};
use crate::field::{ComplexAmp, GlobalConfig};
use crate::stats::visibility;
use crate::studies::{oracle_suite, run_points, witness_rows, PointResult, StudyOptions, WitnessRow, WitnessValue};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "zpf", version, about = "Zero-point-field optics simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a builtin or a DSL file and write one CSV row per sweep point.
    Run(RunArgs),
    /// Evaluate closed forms over a grid.
    Analytic(AnalyticArgs),
    /// Compare Monte-Carlo estimates against the closed forms.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("input").required(true).args(["builtin", "file"])))]
pub struct RunArgs {
    #[arg(long)]
    pub builtin: Option<String>,
    #[arg(long)]
    pub file: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<u64>,
    /// Worker threads, 0 for all cores.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Override a parameter: `NAME=SPEC`.
    #[arg(long = "sweep", value_name = "P=SPEC")]
    pub sweeps: Vec<String>,
    /// Detectors read from trial i when counting shifted-pair accidentals.
    #[arg(long, value_delimiter = ',')]
    pub accidentals: Vec<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyticArgs {
    #[command(subcommand)]
    pub subject: Subject,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Subject {
    /// Delayed-choice single-click probability of D1.
    Dc {
        #[arg(long, default_value = "0.1")]
        alpha: String,
        #[arg(long, default_value = "0deg")]
        theta: String,
        #[arg(long, default_value = "0:360:25deg")]
        phi: String,
        /// Remove the second beam splitter.
        #[arg(long)]
        no_bs2: bool,
        #[arg(long, default_value_t = 1.95)]
        gamma: f64,
        #[arg(long, default_value_t = std::f64::consts::FRAC_1_SQRT_2)]
        sigma0: f64,
    },
    /// |det W2|, I_DW and R_min of the prepare-and-measure witness.
    Dw {
        #[arg(long, default_value = "0.01:100:log25")]
        alpha2: String,
        #[arg(long, default_value_t = 1.95)]
        gamma: f64,
        #[arg(long, default_value_t = std::f64::consts::FRAC_1_SQRT_2)]
        sigma0: f64,
    },
    /// Lower bound on retrocausality from I_DW.
    Rmin {
        #[arg(long)]
        idw: String,
    },
    /// Marcum Q1 and its complement.
    Marcum {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

/// Parse a sweep spec into its values.
pub fn parse_values(spec: &str) -> Result<Vec<f64>, String> {
    let s = spec.trim();
    let (body, deg) = match s.strip_suffix("deg") {
        Some(b) => (b.trim(), true),
        None => (s, false),
    };
    let num = |t: &str| -> Result<f64, String> {
        let t = t.trim();
        let (t, d) = match t.strip_suffix("deg") {
            Some(b) => (b, true),
            None => (t, false),
        };
        let v: f64 = t.parse().map_err(|_| format!("invalid number `{t}` in `{spec}`"))?;
        Ok(if d { v.to_radians() } else { v })
    };
    let scale = |v: f64| if deg { v.to_radians() } else { v };
    let parts: Vec<&str> = body.split(':').collect();
    let values = match parts.as_slice() {
        [a, b, n] => {
            let (a, b) = (num(a)?, num(b)?);
            let n = n.trim();
            let (log, count) = match n.strip_prefix("log") {
                Some(c) => (true, c),
                None => (false, n),
            };
            let count: usize = count
                .parse()
                .ok()
                .filter(|&c| c > 0)
                .ok_or_else(|| format!("invalid point count `{n}` in `{spec}`"))?;
            if log && (a <= 0.0 || b <= 0.0) {
                return Err(format!("log sweep needs positive bounds in `{spec}`"));
            }
            let range = if log {
                SweepRange::log_spaced(a, b, count)
            } else {
                SweepRange::linear(a, b, count)
            };
            range.values()
        }
        [single] => single.split(',').map(num).collect::<Result<Vec<_>, _>>()?,
        _ => return Err(format!("invalid sweep `{spec}`")),
    };
    let values: Vec<f64> = values.into_iter().map(scale).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(format!("non-finite value in `{spec}`"));
    }
    Ok(values)
}

fn param_value(values: Vec<f64>) -> ParamValue {
    if values.len() == 1 {
        ParamValue::Fixed(values[0])
    } else {
        ParamValue::Sweep(SweepRange::List(values))
    }
}

enum Failure {
    Usage(String),
    Error(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        Failure::Error(e.into())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Error(e.into())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Error(e.into())
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Run(RunError::DegenerateDenominator { .. }) => EXIT_DEGENERATE,
        Error::Io(_) | Error::Csv(_) => EXIT_USAGE,
        _ => EXIT_INVALID,
    }
}

/// Run the command line and return the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(&a, stdout, stderr),
        Command::Analytic(a) => cmd_analytic(&a, stdout),
        Command::Check(a) => cmd_check(&a, stdout),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Error(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

fn load(args: &RunArgs) -> Result<ExperimentSpec, Failure> {
    let mut spec = match (&args.builtin, &args.file) {
        (Some(name), _) => builtin(name).map_err(Error::from)?,
        (None, Some(path)) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            parse_str(&text).map_err(|e| Failure::Error(e.into()))?
        }
        (None, None) => return Err(Failure::Usage("one of --builtin or --file is required".into())),
    };
    for s in &args.sweeps {
        let (name, value) = s
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("--sweep expects NAME=SPEC, got `{s}`")))?;
        let name = name.trim();
        if spec.param(name).is_none() {
            return Err(Failure::Error(RunError::Invalid(format!("unknown parameter `{name}`")).into()));
        }
        let values = parse_values(value).map_err(Failure::Usage)?;
        spec.set_param(name, param_value(values));
    }
    spec.validate().map_err(Error::from)?;
    Ok(spec)
}

fn flush(out: &Option<PathBuf>, buf: Vec<u8>, stdout: &mut dyn Write) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, buf)?,
        None => stdout.write_all(&buf)?,
    }
    Ok(())
}

fn csv_writer<'a>(buf: &'a mut Vec<u8>, banner: &str) -> csv::Writer<&'a mut Vec<u8>> {
    buf.extend_from_slice(format!("# zpf-optics v{VERSION} {banner}\n").as_bytes());
    csv::Writer::from_writer(buf)
}

fn ci_cols(ci: (f64, f64)) -> [String; 2] {
    [ci.0.to_string(), ci.1.to_string()]
}

fn cmd_run(args: &RunArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, Failure> {
    let spec = load(args)?;
    let opts = StudyOptions {
        seed: args.seed.unwrap_or(spec.seed),
        trials: args.trials,
        workers: args.threads,
        accidental_group: if args.accidentals.is_empty() {
            None
        } else {
            Some(args.accidentals.clone())
        },
        keep_degenerate: spec.witness.is_some(),
    };
    let trials = opts.trials.unwrap_or(spec.trials);
    let points = run_points(&spec, &opts)?;
    let swept: Vec<String> = spec.swept_params().iter().map(|p| p.name.clone()).collect();

    let mut buf = Vec::new();
    let banner = format!("experiment={} seed={} trials={}", spec.name, opts.seed, trials);
    let mut summary = String::new();
    let mut degenerate = false;
    {
        let mut w = csv_writer(&mut buf, &banner);
        if spec.witness.is_some() {
            let rows = witness_rows(&spec, &points)?;
            write_witness_rows(&mut w, &rows)?;
            for r in &rows {
                summary.push_str(&witness_summary(r));
                degenerate |= r.is_degenerate();
            }
        } else {
            write_point_rows(&mut w, &swept, &points, opts.accidental_group.is_some(), &spec)?;
        }
        w.flush()?;
    }
    flush(&args.out, buf, stdout)?;

    let n = points.len() as f64;
    let mean_den = points.iter().map(|p| p.stats.denominator as f64).sum::<f64>() / n;
    let mut head = format!(
        "{}: {} point(s), {} trials each, seed {}\nmean conditioning count per run: {:.1}\n",
        spec.name,
        points.len(),
        trials,
        opts.seed,
        mean_den
    );
    if opts.accidental_group.is_some() {
        let acc: Vec<u64> = points
            .iter()
            .map(|p| p.stats.accidentals(&spec.conditioning).map(|a| a.unwrap_or(0)))
            .collect::<Result<_, _>>()?;
        let mean_acc = acc.iter().sum::<u64>() as f64 / n;
        head.push_str(&format!("mean accidental estimate per run: {mean_acc:.1}\n"));
    }
    if spec.witness.is_none() {
        head.push_str(&curve_summary(&swept, &points));
    }
    head.push_str(&summary);
    // The summary goes to stderr when stdout carries the CSV.
    let target: &mut dyn Write = if args.out.is_some() { stdout } else { stderr };
    target.write_all(head.as_bytes())?;
    if degenerate {
        writeln!(stderr, "error: some witness cells had no conditioning events; their entries are NaN")?;
        return Ok(EXIT_DEGENERATE);
    }
    Ok(EXIT_OK)
}

fn write_point_rows(
    w: &mut csv::Writer<&mut Vec<u8>>,
    swept: &[String],
    points: &[PointResult],
    accidentals: bool,
    spec: &ExperimentSpec,
) -> Result<(), Failure> {
    let mut header: Vec<String> = swept.to_vec();
    header.extend(["numerator", "denominator", "estimate", "ci_lo", "ci_hi"].map(String::from));
    if accidentals {
        header.push("accidentals".into());
    }
    w.write_record(&header)?;
    for p in points {
        let mut rec: Vec<String> = p.assignments.iter().map(|(_, v)| v.to_string()).collect();
        rec.push(p.stats.numerator.to_string());
        rec.push(p.stats.denominator.to_string());
        rec.push(p.stats.estimate.to_string());
        rec.extend(ci_cols(p.stats.ci95));
        if accidentals {
            rec.push(p.stats.accidentals(&spec.conditioning)?.unwrap_or(0).to_string());
        }
        w.write_record(&rec)?;
    }
    Ok(())
}

/// Visibility of the estimate along the innermost sweep, per outer group.
fn curve_summary(swept: &[String], points: &[PointResult]) -> String {
    let Some(inner) = swept.last() else {
        return String::new();
    };
    let mut groups: Vec<(Vec<(String, f64)>, Vec<(f64, f64)>)> = Vec::new();
    for p in points {
        let outer: Vec<(String, f64)> = p.assignments.iter().filter(|(n, _)| n != inner).cloned().collect();
        let xy = (p.value(inner).unwrap_or(0.0), p.stats.estimate);
        match groups.iter_mut().find(|(o, _)| *o == outer) {
            Some((_, v)) => v.push(xy),
            None => groups.push((outer, vec![xy])),
        }
    }
    let mut s = String::new();
    for (outer, ys) in groups {
        let label: Vec<String> = outer.iter().map(|(n, v)| format!("{n}={v}")).collect();
        let label = if label.is_empty() { "all".into() } else { label.join(" ") };
        s.push_str(&format!("visibility over {inner} [{label}]: {:.4}\n", visibility(&ys)));
    }
    s
}

fn witness_summary(r: &WitnessRow) -> String {
    let label: Vec<String> = r.outer.iter().map(|(n, v)| format!("{n}={v}")).collect();
    let label = if label.is_empty() { "all".into() } else { label.join(" ") };
    match &r.value {
        WitnessValue::W2 { det, .. } => format!("[{label}] |det W2| = {det:.4}\n"),
        WitnessValue::Idw { idw, r_min, .. } | WitnessValue::Herald { idw, r_min, .. } => {
            format!("[{label}] I_DW = {idw:.4}, R_min = {r_min:.4}\n")
        }
    }
}

fn write_witness_rows(w: &mut csv::Writer<&mut Vec<u8>>, rows: &[WitnessRow]) -> Result<(), Failure> {
    let Some(first) = rows.first() else {
        return Ok(());
    };
    let mut header: Vec<String> = first.outer.iter().map(|(n, _)| n.clone()).collect();
    header.extend(["numerator", "denominator", "estimate", "ci_lo", "ci_hi"].map(String::from));
    for x in 0..first.cells.len() {
        for y in 0..first.cells[x].len() {
            header.push(format!("p_x{}_y{}", x + 1, y + 1));
        }
    }
    match &first.value {
        WitnessValue::W2 { .. } => header.push("det_w2".into()),
        WitnessValue::Idw { .. } => header.extend(["idw", "r_min"].map(String::from)),
        WitnessValue::Herald { .. } => {
            header.extend((1..=8).map(|b| format!("p1j_b{b}")));
            header.extend(["idw", "r_min"].map(String::from));
        }
    }
    w.write_record(&header)?;
    for r in rows {
        let mut rec: Vec<String> = r.outer.iter().map(|(_, v)| v.to_string()).collect();
        let (num, den) = r.pooled();
        let est = crate::ensemble::Estimate::from_counts(num, den)?;
        rec.push(num.to_string());
        rec.push(den.to_string());
        rec.push(est.estimate.to_string());
        rec.extend(ci_cols(est.ci95));
        rec.extend(r.cells.iter().flatten().map(|c| c.stats.estimate.to_string()));
        match &r.value {
            WitnessValue::W2 { det, .. } => rec.push(det.to_string()),
            WitnessValue::Idw { idw, r_min, .. } => rec.extend([idw.to_string(), r_min.to_string()]),
            WitnessValue::Herald { idw, r_min, p1j, .. } => {
                rec.extend(p1j.iter().map(f64::to_string));
                rec.extend([idw.to_string(), r_min.to_string()]);
            }
        }
        w.write_record(&rec)?;
    }
    Ok(())
}

fn values(s: &str) -> Result<Vec<f64>, Failure> {
    parse_values(s).map_err(Failure::Usage)
}

fn cmd_analytic(args: &AnalyticArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let mut buf = Vec::new();
    {
        let empty = || [String::new(), String::new()];
        match &args.subject {
            Subject::Dc {
                alpha,
                theta,
                phi,
                no_bs2,
                gamma,
                sigma0,
            } => {
                GlobalConfig::new(*sigma0, *gamma).map_err(Error::from)?;
                let mut w = csv_writer(&mut buf, "analytic=dc");
                w.write_record([
                    "alpha", "theta", "phi", "bs2", "numerator", "denominator", "estimate", "ci_lo", "ci_hi", "pr_d1",
                    "pr_d2",
                ])?;
                for a in values(alpha)? {
                    for t in values(theta)? {
                        for p in values(phi)? {
                            let r = dc_single_click_probs(ComplexAmp::new(a, 0.0), t, p, *sigma0, *gamma, !no_bs2)
                                .map_err(Error::from)?;
                            let mut rec = vec![a.to_string(), t.to_string(), p.to_string()];
                            rec.push(u8::from(!no_bs2).to_string());
                            rec.extend(empty());
                            rec.push(r.p1.to_string());
                            rec.extend(empty());
                            rec.extend([r.pr_d1.to_string(), r.pr_d2.to_string()]);
                            w.write_record(&rec)?;
                        }
                    }
                }
                w.flush()?;
            }
            Subject::Dw { alpha2, gamma, sigma0 } => {
                GlobalConfig::new(*sigma0, *gamma).map_err(Error::from)?;
                let mut w = csv_writer(&mut buf, "analytic=dw");
                w.write_record(["alpha2", "numerator", "denominator", "estimate", "ci_lo", "ci_hi", "det_w2", "idw", "r_min"])?;
                for a2 in values(alpha2)? {
                    let w2 = witness_w2(&dw_w2_table(a2, *sigma0, *gamma).map_err(Error::from)?);
                    let idw = witness_idw(&dw_idw_table(a2, *sigma0, *gamma).map_err(Error::from)?);
                    let mut rec = vec![a2.to_string()];
                    rec.extend(empty());
                    rec.push(w2.to_string());
                    rec.extend(empty());
                    rec.extend([w2.to_string(), idw.to_string(), r_min(idw).to_string()]);
                    w.write_record(&rec)?;
                }
                w.flush()?;
            }
            Subject::Rmin { idw } => {
                let mut w = csv_writer(&mut buf, "analytic=rmin");
                w.write_record(["idw", "r_min"])?;
                for i in values(idw)? {
                    w.write_record([i.to_string(), r_min(i).to_string()])?;
                }
                w.flush()?;
            }
            Subject::Marcum { a, b } => {
                let mut w = csv_writer(&mut buf, "analytic=marcum");
                w.write_record(["a", "b", "q1", "q1_complement"])?;
                for x in values(a)? {
                    for y in values(b)? {
                        let (q, qc) = marcum_q1_pair(x, y).map_err(Error::from)?;
                        w.write_record([x.to_string(), y.to_string(), q.to_string(), qc.to_string()])?;
                    }
                }
                w.flush()?;
            }
        }
    }
    flush(&args.out, buf, stdout)?;
    Ok(EXIT_OK)
}

fn cmd_check(args: &CheckArgs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let opts = StudyOptions {
        seed: args.seed,
        trials: Some(args.trials),
        workers: args.threads,
        ..Default::default()
    };
    let outcomes = oracle_suite(args.trials, &opts)?;
    let mut failed = 0;
    for o in &outcomes {
        let z = (o.mc - o.closed) / o.sigma;
        writeln!(
            stdout,
            "{} {:<44} mc={:.6} closed={:.6} z={:+.2}",
            if o.pass { "PASS" } else { "FAIL" },
            o.name,
            o.mc,
            o.closed,
            z
        )?;
        failed += usize::from(!o.pass);
    }
    writeln!(stdout, "{} of {} checks passed", outcomes.len() - failed, outcomes.len())?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_INVALID })
}
