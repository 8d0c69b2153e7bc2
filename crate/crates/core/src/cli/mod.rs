//! Command-line front end. `run_with` is the testable entry point; the
//! binary only forwards `std::env::args` and the process streams.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::{FromPrimitive, Zero};
use serde_json::json;

use crate::algebra::TensorSpace;
use crate::coeff::BigRational;
use crate::error::{Error, Result};
use crate::lie::pbw_coordinates;
use crate::measures::{gaussian_cubature_with, write_points, GaussianRule};
use crate::sde::{
    convergence_experiment, cubature_tree, monte_carlo, Method, MonteCarloConfig, SDEProblem, SolverReport,
    TreeConfig, DEFAULT_ERROR_FLOOR, DEFAULT_LEAF_BUDGET, DEFAULT_ODE_STEPS,
};
use crate::wiener::{construct, expected_signature_in, verify_formula, WienerCubatureFormula};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

const MAX_EXPAND_DEGREE: usize = 8;
const MAX_PBW_DIM: usize = 3;

#[derive(Parser, Debug)]
#[command(name = "wiener-cubature", version, about = "Cubature on Wiener space: build, verify, expand, solve")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Verification tolerance on the largest residual.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    /// Monte Carlo seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for cubature trees and Monte Carlo (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Where to write the primary artifact (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Basis {
    Word,
    Pbw,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RuleArg {
    Auto,
    Compact,
    Product,
}

impl From<RuleArg> for GaussianRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Auto => GaussianRule::Auto,
            RuleArg::Compact => GaussianRule::Compact,
            RuleArg::Product => GaussianRule::Product,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Taylor,
    Logode,
    Mc,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Taylor => Method::Taylor,
            MethodArg::Logode => Method::LogOde,
            MethodArg::Mc => Method::MonteCarlo,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a cubature formula and write it as JSON.
    Construct {
        #[arg(long, value_parser = clap::value_parser!(u32).range(3..=7))]
        degree: u32,
        #[arg(long)]
        dim: usize,
        #[arg(long, value_enum, default_value_t = RuleArg::Auto)]
        rule: RuleArg,
        /// Free parameter of the degree-5 construction.
        #[arg(long, default_value_t = 0.5)]
        x: f64,
        /// Also write the underlying Gaussian points to this file.
        #[arg(long)]
        dump_points: Option<PathBuf>,
    },
    /// Check a formula against the expected signature.
    Verify {
        formula: PathBuf,
        #[arg(long = "T", default_value = "1")]
        t: f64,
        /// Check up to this graded degree instead of the formula's own.
        #[arg(long)]
        degree: Option<usize>,
        /// Residual CSV (default: next to the formula).
        #[arg(long)]
        report: Option<PathBuf>,
        /// Rows kept in the residual CSV.
        #[arg(long, default_value_t = 20)]
        worst: usize,
    },
    /// List expected-signature coefficients.
    Expand {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        degree: usize,
        #[arg(long, value_enum, default_value_t = Basis::Word)]
        basis: Basis,
        /// Horizon, as a decimal or a fraction like 1/4.
        #[arg(long = "T", default_value = "1")]
        t: String,
    },
    /// Estimate E[φ(X_T)] for one problem.
    Solve {
        problem: PathBuf,
        /// Required unless `--method mc`.
        #[arg(long)]
        formula: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = MethodArg::Taylor)]
        method: MethodArg,
        /// Cubature steps, or time steps per Monte Carlo path.
        #[arg(long, default_value_t = 1)]
        steps: usize,
        #[arg(long, default_value_t = 10_000)]
        paths: usize,
        #[arg(long, default_value_t = DEFAULT_ODE_STEPS)]
        ode_steps: usize,
        #[arg(long, default_value_t = DEFAULT_LEAF_BUDGET)]
        leaf_budget: u64,
    },
    /// Error against the reference over a range of horizons, with fitted slopes.
    Converge {
        problem: PathBuf,
        #[arg(long, num_args = 1.., required = true)]
        formula: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = MethodArg::Taylor)]
        method: MethodArg,
        #[arg(long, num_args = 1.., default_values_t = (1..=6).map(|k| 0.5f64.powi(k)).collect::<Vec<_>>())]
        times: Vec<f64>,
        #[arg(long, num_args = 1.., default_values_t = [1usize])]
        steps: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_ODE_STEPS)]
        ode_steps: usize,
        #[arg(long, default_value_t = DEFAULT_LEAF_BUDGET)]
        leaf_budget: u64,
        /// Errors below this are left out of the fit.
        #[arg(long, default_value_t = DEFAULT_ERROR_FLOOR)]
        floor: f64,
    },
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    if let Err(msg) = validate(&cli) {
        let _ = writeln!(err, "error: {msg}");
        return EXIT_USAGE;
    }
    match dispatch(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::LeafBudget { .. } | Error::SpaceTooLarge { .. } => EXIT_BUDGET,
        Error::MomentCheck { .. } => EXIT_FAILED,
        _ => EXIT_USAGE,
    }
}

/// Flag checks that need no work done.
fn validate(cli: &Cli) -> std::result::Result<(), String> {
    let g = &cli.global;
    if !(g.tol >= 0.0) {
        return Err(format!("--tol must be non-negative, got {}", g.tol));
    }
    if g.threads == Some(0) {
        return Err("--threads must be positive".into());
    }
    match &cli.command {
        Command::Construct { degree, dim, x, .. } => {
            if ![3, 5, 7].contains(degree) {
                return Err(format!("--degree must be 3, 5 or 7, got {degree}"));
            }
            if *dim == 0 {
                return Err("--dim must be positive".into());
            }
            if *degree == 7 && *dim != 3 {
                return Err(format!("degree 7 is only available for --dim 3, got {dim}"));
            }
            if !x.is_finite() {
                return Err("--x must be finite".into());
            }
        }
        Command::Verify { t, .. } => {
            if !(*t > 0.0) || !t.is_finite() {
                return Err(format!("--T must be positive, got {t}"));
            }
        }
        Command::Expand { dim, degree, basis, .. } => {
            if *dim == 0 {
                return Err("--dim must be positive".into());
            }
            if *degree > MAX_EXPAND_DEGREE {
                return Err(format!("--degree is limited to {MAX_EXPAND_DEGREE}"));
            }
            if matches!(basis, Basis::Pbw) && *dim > MAX_PBW_DIM {
                return Err(format!("pbw listing is limited to --dim {MAX_PBW_DIM}"));
            }
        }
        Command::Solve { formula, method, steps, paths, .. } => {
            if *steps == 0 || *paths == 0 {
                return Err("--steps and --paths must be positive".into());
            }
            if !matches!(method, MethodArg::Mc) && formula.is_none() {
                return Err("--formula is required for cubature methods".into());
            }
        }
        Command::Converge { method, times, steps, .. } => {
            if matches!(method, MethodArg::Mc) {
                return Err("converge runs cubature methods only".into());
            }
            if times.iter().any(|t| !(*t > 0.0)) || steps.contains(&0) {
                return Err("--times and --steps must be positive".into());
            }
        }
    }
    Ok(())
}

/// The primary artifact goes to `--out` when given, otherwise to stdout.
/// Summaries go to stdout in the first case and to stderr in the second so
/// that piped artifacts stay clean.
struct Sinks<'a> {
    artifact: Box<dyn Write + 'a>,
    summary: &'a mut dyn Write,
    path: Option<PathBuf>,
}

impl<'a> Sinks<'a> {
    fn new(out_path: &Option<PathBuf>, out: &'a mut dyn Write, err: &'a mut dyn Write) -> Result<Self> {
        Ok(match out_path {
            Some(p) => {
                let f = File::create(p).map_err(|e| Error::io(p, e))?;
                Sinks { artifact: Box::new(BufWriter::new(f)), summary: out, path: Some(p.clone()) }
            }
            None => Sinks { artifact: Box::new(out), summary: err, path: None },
        })
    }

    fn finish(mut self) -> Result<()> {
        let path = self.path.clone().unwrap_or_else(|| PathBuf::from("<stdout>"));
        self.artifact.flush().map_err(|e| Error::io(path, e))
    }
}

fn io<T>(r: std::io::Result<T>) -> Result<T> {
    r.map_err(|e| Error::io("<stream>", e))
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let g = &cli.global;
    match &cli.command {
        Command::Construct { degree, dim, rule, x, dump_points } => {
            cmd_construct(g, *degree as usize, *dim, (*rule).into(), *x, dump_points.as_deref(), out, err)
        }
        Command::Verify { formula, t, degree, report, worst } => {
            cmd_verify(g, formula, *t, *degree, report.as_deref(), *worst, out, err)
        }
        Command::Expand { dim, degree, basis, t } => cmd_expand(g, *dim, *degree, *basis, t, out, err),
        Command::Solve { problem, formula, method, steps, paths, ode_steps, leaf_budget } => {
            let problem = SDEProblem::load(problem)?;
            let report = match Method::from(*method) {
                Method::MonteCarlo => {
                    monte_carlo(&problem, &MonteCarloConfig { paths: *paths, steps: *steps, seed: g.seed, threads: g.threads })?
                }
                m => {
                    let f = WienerCubatureFormula::<f64>::load(formula.as_deref().expect("checked in validate"))?;
                    let cfg = TreeConfig { method: m, ode_steps: *ode_steps, leaf_budget: *leaf_budget, threads: g.threads };
                    cubature_tree(&problem, &f, *steps, &cfg)?
                }
            };
            write_report(g, &report, out, err)?;
            Ok(EXIT_OK)
        }
        Command::Converge { problem, formula, method, times, steps, ode_steps, leaf_budget, floor } => {
            let problem = SDEProblem::load(problem)?;
            let formulas = formula.iter().map(|p| WienerCubatureFormula::<f64>::load(p)).collect::<Result<Vec<_>>>()?;
            let cfg = TreeConfig { method: (*method).into(), ode_steps: *ode_steps, leaf_budget: *leaf_budget, threads: g.threads };
            let res = convergence_experiment(&problem, &formulas, times, steps, &cfg, *floor)?;
            let mut sinks = Sinks::new(&g.out, out, err)?;
            match g.format {
                Format::Json => {
                    let slopes: Vec<_> = res
                        .slopes
                        .iter()
                        .map(|(d, s)| match s {
                            Ok(v) => json!({"degree": d, "slope": v}),
                            Err(e) => json!({"degree": d, "error": e}),
                        })
                        .collect();
                    let doc = json!({"rows": res.rows, "slopes": slopes});
                    io(writeln!(sinks.artifact, "{}", serde_json::to_string_pretty(&doc)?))?;
                }
                _ => {
                    let mut w = csv::Writer::from_writer(&mut sinks.artifact);
                    for r in &res.rows {
                        w.serialize(r)?;
                    }
                    io(w.flush())?;
                }
            }
            for (d, s) in &res.slopes {
                match s {
                    Ok(v) => io(writeln!(sinks.summary, "degree {d}: slope {v:.4}"))?,
                    Err(e) => io(writeln!(sinks.summary, "degree {d}: no slope ({e})"))?,
                }
            }
            sinks.finish()?;
            Ok(EXIT_OK)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_construct(
    g: &Global,
    degree: usize,
    dim: usize,
    rule: GaussianRule,
    x: f64,
    dump_points: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let f = construct(degree, dim, rule, x)?;
    if let Some(p) = dump_points {
        let pts = gaussian_cubature_with(dim, degree, rule)?;
        let mut w = BufWriter::new(File::create(p).map_err(|e| Error::io(p, e))?);
        write_points(&pts, &mut w).and_then(|_| w.flush()).map_err(|e| Error::io(p, e))?;
    }
    let mut sinks = Sinks::new(&g.out, out, err)?;
    io(writeln!(sinks.artifact, "{}", f.to_json()?))?;
    let size = f.metadata.get("size_formula").and_then(|v| v.as_str()).unwrap_or("");
    io(writeln!(sinks.summary, "degree {degree}, dim {dim}: {} entries ({size})", f.len()))?;
    if degree == 5 && dim >= 2 && x != 0.5 {
        io(writeln!(
            sinks.summary,
            "warning: x = {x} is not 1/2; words such as (1,2,2,1) keep a residual of |x - 1/2|/6 = {:e}",
            (x - 0.5).abs() / 6.0
        ))?;
    }
    sinks.finish()?;
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    g: &Global,
    path: &Path,
    t: f64,
    degree: Option<usize>,
    report: Option<&Path>,
    worst: usize,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let f = WienerCubatureFormula::<f64>::load_unnormalised(path)?;
    let scaled = if t == 1.0 { f.clone() } else { crate::wiener::scale_formula(&f, t)? };
    let r = verify_formula(&scaled, &t, degree)?;
    let csv_path = match (report, &g.out) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(p)) if g.format == Format::Csv => p.clone(),
        _ => path.with_extension("residuals.csv"),
    };
    r.write_csv(&csv_path, Some(worst))?;
    let ok = r.max_residual <= g.tol;
    let worst_rows: Vec<_> = r
        .worst(worst.min(5))
        .iter()
        .map(|w| json!({"word": w.word.to_string(), "lhs": w.lhs, "rhs": w.rhs, "abs_error": w.abs_error}))
        .collect();
    let text = match g.format {
        Format::Json => serde_json::to_string_pretty(&json!({
            "degree": r.degree,
            "T": t,
            "words_checked": r.words_checked(),
            "max_residual": r.max_residual,
            "tol": g.tol,
            "verified": ok,
            "worst": worst_rows,
        }))?,
        _ => {
            let mut s = format!(
                "{}: degree {}, T = {t}, {} words, max residual {:e} (tol {:e}): {}\n",
                path.display(),
                r.degree,
                r.words_checked(),
                r.max_residual,
                g.tol,
                if ok { "verified" } else { "FAILED" }
            );
            for w in r.worst(worst.min(5)) {
                s += &format!("  {} lhs {:e} rhs {:e} err {:e}\n", w.word, w.lhs, w.rhs, w.abs_error);
            }
            s += &format!("residuals written to {}", csv_path.display());
            s
        }
    };
    match &g.out {
        Some(p) if g.format != Format::Csv => std::fs::write(p, format!("{text}\n")).map_err(|e| Error::io(p, e))?,
        _ => io(writeln!(out, "{text}"))?,
    }
    if !ok {
        io(writeln!(err, "verification failed: max residual {:e} exceeds {:e}", r.max_residual, g.tol))?;
    }
    Ok(if ok { EXIT_OK } else { EXIT_FAILED })
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Unsupported(format!("cannot read {s:?} as a positive number"));
    let r = match s.parse::<BigRational>() {
        Ok(r) => r,
        Err(_) => BigRational::from_f64(s.parse::<f64>().map_err(|_| bad())?).ok_or_else(bad)?,
    };
    if r <= BigRational::zero() {
        return Err(bad());
    }
    Ok(r)
}

fn cmd_expand(
    g: &Global,
    dim: usize,
    degree: usize,
    basis: Basis,
    t: &str,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let t = parse_rational(t)?;
    let space = TensorSpace::graded(dim, degree)?;
    let e = expected_signature_in(&space, &t)?;
    let rows: Vec<(String, BigRational)> = match basis {
        Basis::Word => e.terms().map(|(w, c)| (w.to_string(), c.clone())).collect(),
        Basis::Pbw => pbw_coordinates(&e)?.iter().map(|(k, c)| (k.to_string(), c.clone())).collect(),
    };
    let rows: Vec<_> = rows.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    let mut sinks = Sinks::new(&g.out, out, err)?;
    let f64_of = |c: &BigRational| crate::coeff::Coeff::to_f64(c);
    match g.format {
        Format::Text => {
            for (k, c) in &rows {
                io(writeln!(sinks.artifact, "{k}: {c}"))?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut sinks.artifact);
            w.write_record(["key", "exact", "value"])?;
            for (k, c) in &rows {
                w.write_record([k.clone(), c.to_string(), format!("{:e}", f64_of(c))])?;
            }
            io(w.flush())?;
        }
        Format::Json => {
            let list: Vec<_> =
                rows.iter().map(|(k, c)| json!({"key": k, "exact": c.to_string(), "value": f64_of(c)})).collect();
            io(writeln!(sinks.artifact, "{}", serde_json::to_string_pretty(&list)?))?;
        }
    }
    io(writeln!(sinks.summary, "{} nonzero coefficients", rows.len()))?;
    sinks.finish()?;
    Ok(EXIT_OK)
}

fn write_report(g: &Global, r: &SolverReport, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let mut sinks = Sinks::new(&g.out, out, err)?;
    match g.format {
        Format::Json => io(writeln!(sinks.artifact, "{}", serde_json::to_string_pretty(r)?))?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut sinks.artifact);
            w.serialize(r)?;
            io(w.flush())?;
        }
        Format::Text => {
            let opt = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:.17e}"));
            io(write!(
                sinks.artifact,
                "method: {}\nestimate: {:.17e}\nreference: {}\nabs_error: {}\nstd_error: {}\nleaves: {}\nsteps: {}\nweight_sum: {:.17e}\n",
                r.method.name(),
                r.estimate,
                opt(r.reference),
                opt(r.abs_error),
                opt(r.std_error),
                r.leaf_count,
                r.step_count,
                r.weight_sum,
            ))?;
        }
    }
    if let Some(e) = r.abs_error {
        io(writeln!(sinks.summary, "{} estimate {:.12e}, abs error {e:.3e}", r.method.name(), r.estimate))?;
    }
    sinks.finish()
}
