//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when any row fails or any check reports a
//! violation, 2 on usage or configuration errors, 3 when the report cannot be
//! written.

use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::bounds::{
    self, default_ns, default_xs, empirical_order, envelope_value, hypothesis_51, phi_error_series,
    BoundRecord, Verdict, DEFAULT_ALPHAS,
};
use crate::error::Error;
use crate::functions::{get_function, phi_at, FuncSpec, REGISTRY_IDS};
use crate::lemma_verify::{self, defaults, ViolationReport};
use crate::moduli::{
    classical_modulus, weighted_modulus_rho0, DEFAULT_GRID_POINTS, DEFAULT_WEIGHTED_DOMAIN,
};
use crate::operators::{eval_classical, eval_max_product, eval_phi_error, DEFAULT_TOL};
use crate::report::{cell_f, cell_opt_f, render_bounds, render_reports, Format, Table};

pub const THREADS_ENV: &str = "MAXPROD_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "maxprod",
    version,
    about = "Max-product Baskakov operator: evaluation, error bounds and lemma checks",
    long_about = "Max-product Baskakov operator: evaluation, error bounds and lemma checks.\n\n\
        All options are flags; there is no config file. Set MAXPROD_THREADS to cap the \
        number of worker threads."
)]
pub struct Cli {
    /// Output format
    #[arg(long, value_enum, global = true, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,

    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Operator {
    /// max_k m_{k,n,j}(x) f(k/n)
    MaxProduct,
    /// sum_k b_{n,k}(x) f(k/n)
    Classical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    #[value(name = "4.1")]
    WeightMaximum,
    #[value(name = "4.2")]
    RatioBound,
    #[value(name = "4.3")]
    DistanceTerms,
    #[value(name = "4.4")]
    Monotonicity,
    Algebra,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Theorem {
    /// pointwise bound with the classical modulus
    #[value(name = "5.1")]
    Pointwise,
    /// weighted pointwise bound
    #[value(name = "6.1")]
    Weighted,
    /// weighted uniform bound with constant 70
    #[value(name = "6.2")]
    WeightedUniform,
    /// E_n(x) against 6 [x(1+x)]^(1/alpha) / (n-1)^(1-1/alpha)
    Envelope,
    /// V(e1)(x) <= x
    E1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModulusKind {
    Classical,
    Weighted,
}

#[derive(clap::Args, Debug, Clone)]
pub struct SweepArgs {
    /// Comma-separated n values [default: powers of two in 4..=1024]
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<u64>>,
    /// Smallest n; with --n-max selects the powers of two in range
    #[arg(long, conflicts_with = "n")]
    pub n_min: Option<u64>,
    #[arg(long, conflicts_with = "n")]
    pub n_max: Option<u64>,
    /// Comma-separated x values [default: 33 points on [0,2] plus 5 and 10]
    #[arg(long, value_delimiter = ',')]
    pub x: Option<Vec<f64>>,
    /// Evenly spaced grid START:END:POINTS
    #[arg(long, conflicts_with = "x")]
    pub x_grid: Option<String>,
    /// Comma-separated alpha values
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_ALPHAS)]
    pub alpha: Vec<u32>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate an operator at one point
    Eval {
        /// Registry id, or phi@X0 for |t - X0|
        #[arg(long = "f")]
        func: String,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        x: f64,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Operator::MaxProduct)]
        operator: Operator,
    },
    /// Estimate a modulus of continuity
    Modulus {
        #[arg(long = "f")]
        func: String,
        #[arg(long)]
        delta: f64,
        #[arg(long, value_enum, default_value_t = ModulusKind::Classical)]
        kind: ModulusKind,
        #[arg(long, default_value_t = DEFAULT_WEIGHTED_DOMAIN)]
        domain_max: f64,
        #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
        grid_points: usize,
    },
    /// E_n(x) and its envelope at one x for each n and alpha
    Envelope {
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Run numerical lemma checks
    VerifyLemmas {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, default_value_t = defaults::SEED)]
        seed: u64,
    },
    /// Check error bounds over a sweep
    VerifyBounds {
        #[arg(long, value_enum)]
        theorem: Theorem,
        /// Registry id (not used by envelope and e1)
        #[arg(long = "f", default_value = "ratio")]
        func: String,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Least-squares slope of ln E_n(x) against ln(n-1)
    Order {
        #[arg(long, default_value_t = 0.6)]
        x: f64,
        #[arg(long, default_value_t = 8)]
        n_min: u64,
        #[arg(long, default_value_t = 1024)]
        n_max: u64,
        /// Emit the (n, E_n(x)) series instead of the slope
        #[arg(long)]
        series: bool,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// List the function registry
    Info,
}

/// A finished report and whether it carries failures.
#[derive(Debug)]
pub struct Outcome {
    pub body: String,
    pub failed: bool,
}

#[derive(Debug)]
pub enum RunError {
    Config(String),
    Io(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(m) => write!(f, "error: {m}"),
            RunError::Io(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        RunError::Config(e.to_string())
    }
}

fn lookup(id: &str) -> Result<FuncSpec, RunError> {
    if let Some(x0) = id.strip_prefix("phi@") {
        let x0: f64 = x0
            .parse()
            .map_err(|_| RunError::Config(format!("cannot parse the point in {id}")))?;
        return Ok(phi_at(x0)?);
    }
    Ok(get_function(id)?)
}

fn powers_of_two(lo: u64, hi: u64) -> Vec<u64> {
    (0..64)
        .map(|p| 1u64 << p)
        .filter(|&v| v >= lo && v <= hi)
        .collect()
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, RunError> {
    let bad = || RunError::Config(format!("--x-grid expects START:END:POINTS, got {spec}"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].parse().map_err(|_| bad())?;
    let b: f64 = parts[1].parse().map_err(|_| bad())?;
    let m: usize = parts[2].parse().map_err(|_| bad())?;
    match m {
        0 => Err(bad()),
        1 => Ok(vec![a]),
        _ => Ok((0..m)
            .map(|i| a + (b - a) * i as f64 / (m - 1) as f64)
            .collect()),
    }
}

impl SweepArgs {
    fn ns(&self) -> Result<Vec<u64>, RunError> {
        let ns = match (&self.n, self.n_min, self.n_max) {
            (Some(v), _, _) => v.clone(),
            (None, None, None) => default_ns(),
            (None, lo, hi) => powers_of_two(lo.unwrap_or(4), hi.unwrap_or(1024)),
        };
        if ns.is_empty() {
            return Err(RunError::Config("the n sweep is empty".into()));
        }
        Ok(ns)
    }

    fn xs(&self) -> Result<Vec<f64>, RunError> {
        match (&self.x, &self.x_grid) {
            (Some(v), _) => Ok(v.clone()),
            (None, Some(g)) => parse_grid(g),
            (None, None) => Ok(default_xs()),
        }
    }
}

fn bound_outcome(records: &[BoundRecord], format: Format) -> Outcome {
    Outcome {
        body: render_bounds(records, format),
        failed: records.iter().any(|r| r.verdict == Verdict::Fail),
    }
}

fn report_outcome(reports: &[ViolationReport], format: Format) -> Outcome {
    Outcome {
        body: render_reports(reports, format),
        failed: reports.iter().any(|r| !r.passed()),
    }
}

/// Runs the lemma suites at their default sweeps.
pub fn lemma_suite(suite: Suite, seed: u64) -> crate::Result<Vec<ViolationReport>> {
    let mut out = Vec::new();
    let all = suite == Suite::All;
    if all || suite == Suite::WeightMaximum {
        let (n, j, s) = defaults::LEMMA41;
        out.push(lemma_verify::check_lemma41(n, j, s)?);
    }
    if all || suite == Suite::RatioBound {
        let (n, j, s) = defaults::LEMMA42;
        out.push(lemma_verify::check_lemma42(n, j, s)?);
    }
    if all || suite == Suite::DistanceTerms {
        let (n, j, s) = defaults::LEMMA43;
        out.extend(lemma_verify::check_lemma43(n, j, s)?);
    }
    if all || suite == Suite::Monotonicity {
        let (n, j, a) = defaults::LEMMA44;
        out.extend(lemma_verify::check_lemma44(n, j, a)?);
    }
    if all || suite == Suite::Algebra {
        out.extend(lemma_verify::check_algebra(
            &defaults::algebra_ns(),
            defaults::ALGEBRA_X_SAMPLES,
            defaults::ALGEBRA_PAIRS,
            seed,
        )?);
    }
    Ok(out)
}

/// Executes a parsed command and renders its report.
pub fn execute(command: &Command, format: Format) -> Result<Outcome, RunError> {
    match command {
        Command::Eval {
            func,
            n,
            x,
            tol,
            operator,
        } => {
            let f = lookup(func)?;
            let r = match operator {
                Operator::MaxProduct => eval_max_product(&f, *n, *x, *tol)?,
                Operator::Classical => eval_classical(&f, *n, *x, *tol)?,
            };
            let mut t = Table::new(&[
                "func",
                "n",
                "x",
                "value",
                "argmax_k",
                "terms_examined",
                "tail_bound",
                "certified",
            ]);
            t.push(vec![
                Value::String(f.id().to_string()),
                (*n).into(),
                cell_f(*x),
                cell_f(r.value),
                r.argmax_k.map_or(Value::Null, Value::from),
                r.terms_examined.into(),
                cell_f(r.tail_bound),
                r.certified.into(),
            ]);
            Ok(Outcome {
                body: t.render(format),
                failed: false,
            })
        }
        Command::Modulus {
            func,
            delta,
            kind,
            domain_max,
            grid_points,
        } => {
            let f = lookup(func)?;
            let m = match kind {
                ModulusKind::Classical => classical_modulus(&f, *delta, *domain_max, *grid_points)?,
                ModulusKind::Weighted => {
                    weighted_modulus_rho0(&f, *delta, *domain_max, *grid_points)?
                }
            };
            let mut t = Table::new(&[
                "func",
                "kind",
                "delta",
                "lower",
                "upper",
                "grid_points",
                "domain_max",
            ]);
            t.push(vec![
                Value::String(f.id().to_string()),
                Value::String(format!("{kind:?}").to_lowercase()),
                cell_f(m.delta),
                cell_f(m.lower),
                cell_opt_f(m.upper),
                m.grid_points.into(),
                cell_f(m.domain_max),
            ]);
            Ok(Outcome {
                body: t.render(format),
                failed: false,
            })
        }
        Command::Envelope { sweep } => {
            let ns = sweep.ns()?;
            let xs = sweep.xs()?;
            let mut t = Table::new(&[
                "x", "n", "alpha", "value", "argmax_k", "bound", "hyp_pow", "hyp_j", "hyp_n",
            ]);
            for &n in &ns {
                for &x in &xs {
                    let e = eval_phi_error(n, x, sweep.tol)?;
                    for &a in &sweep.alpha {
                        let h = hypothesis_51(x, n, a)?;
                        t.push(vec![
                            cell_f(x),
                            n.into(),
                            a.into(),
                            cell_f(e.value),
                            e.argmax_k.map_or(Value::Null, Value::from),
                            cell_f(envelope_value(x, n, a)?),
                            h.pow_cond.into(),
                            h.j_cond.into(),
                            h.n_cond.into(),
                        ]);
                    }
                }
            }
            Ok(Outcome {
                body: t.render(format),
                failed: false,
            })
        }
        Command::VerifyLemmas { suite, seed } => {
            Ok(report_outcome(&lemma_suite(*suite, *seed)?, format))
        }
        Command::VerifyBounds {
            theorem,
            func,
            sweep,
        } => {
            let ns = sweep.ns()?;
            let xs = sweep.xs()?;
            let alphas = &sweep.alpha;
            let tol = sweep.tol;
            let recs = match theorem {
                Theorem::Pointwise => {
                    bounds::verify_theorem51(&lookup(func)?, &xs, &ns, alphas, tol)?
                }
                Theorem::Weighted => {
                    bounds::verify_theorem61(&lookup(func)?, &xs, &ns, alphas, tol)?
                }
                Theorem::WeightedUniform => {
                    bounds::verify_theorem62(&lookup(func)?, &xs, &ns, alphas, tol)?
                }
                Theorem::Envelope => bounds::verify_envelope(&xs, &ns, alphas, tol)?,
                Theorem::E1 => {
                    let r = bounds::check_e1_bound(&ns, &xs)?;
                    return Ok(report_outcome(&[r], format));
                }
            };
            Ok(bound_outcome(&recs, format))
        }
        Command::Order {
            x,
            n_min,
            n_max,
            series,
            tol,
        } => {
            let ns = powers_of_two(*n_min, *n_max);
            let s = phi_error_series(*x, &ns, *tol)?;
            if *series {
                let mut t = Table::new(&["x", "n", "value"]);
                for (n, v) in s {
                    t.push(vec![cell_f(*x), n.into(), cell_f(v)]);
                }
                return Ok(Outcome {
                    body: t.render(format),
                    failed: false,
                });
            }
            let slope = empirical_order(&s)?;
            let mut t = Table::new(&["x", "n_min", "n_max", "points", "slope"]);
            t.push(vec![
                cell_f(*x),
                ns.first().copied().unwrap_or(0).into(),
                ns.last().copied().unwrap_or(0).into(),
                ns.len().into(),
                cell_f(slope),
            ]);
            Ok(Outcome {
                body: t.render(format),
                failed: false,
            })
        }
        Command::Info => {
            let mut t = Table::new(&[
                "id",
                "bounded",
                "sup",
                "lipschitz",
                "analytic_modulus",
                "weighted_class",
                "growth_coeff",
                "growth_degree",
            ]);
            for id in REGISTRY_IDS {
                let f = get_function(id)?;
                let g = f.growth();
                t.push(vec![
                    Value::String(id.to_string()),
                    f.is_bounded().into(),
                    cell_opt_f(f.sup_bound()),
                    cell_opt_f(f.lipschitz()),
                    f.has_analytic_modulus().into(),
                    f.in_c0_rho0().into(),
                    cell_f(g.coeff),
                    g.degree.into(),
                ]);
            }
            Ok(Outcome {
                body: t.render(format),
                failed: false,
            })
        }
    }
}

fn configure_threads() -> Result<(), RunError> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        RunError::Config(format!("{THREADS_ENV} must be a positive integer, got {v}"))
    })?;
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

/// Runs a parsed invocation, writing the report. Returns the exit code.
pub fn run(cli: &Cli) -> Result<i32, RunError> {
    configure_threads()?;
    let outcome = execute(&cli.command, cli.format.into())?;
    match &cli.out {
        Some(path) => fs::write(path, &outcome.body)
            .map_err(|e| RunError::Io(format!("cannot write {}: {e}", path.display())))?,
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(outcome.body.as_bytes())
                .map_err(|e| RunError::Io(format!("cannot write to stdout: {e}")))?;
        }
    }
    Ok(if outcome.failed { 1 } else { 0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("maxprod").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn eval_row_matches_library() {
        let cli = parse(&["eval", "--f", "ratio", "--n", "8", "--x", "0.6"]);
        let out = execute(&cli.command, Format::Csv).unwrap();
        let lines: Vec<&str> = out.body.lines().collect();
        assert_eq!(
            lines[0],
            "func,n,x,value,argmax_k,terms_examined,tail_bound,certified"
        );
        let r = eval_max_product(&get_function("ratio").unwrap(), 8, 0.6, DEFAULT_TOL).unwrap();
        let cells: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(cells[3].parse::<f64>().unwrap(), r.value);
        assert_eq!(cells[4], r.argmax_k.unwrap().to_string());
        assert_eq!(cells[7], "true");
    }

    #[test]
    fn grids_and_powers() {
        assert_eq!(powers_of_two(8, 64), vec![8, 16, 32, 64]);
        assert_eq!(parse_grid("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(parse_grid("0:1").is_err());
        let cli = parse(&["envelope", "--n-min", "4", "--n-max", "16", "--x", "0.5"]);
        let Command::Envelope { sweep } = &cli.command else {
            panic!()
        };
        assert_eq!(sweep.ns().unwrap(), vec![4, 8, 16]);
        assert_eq!(sweep.alpha, DEFAULT_ALPHAS.to_vec());
    }

    #[test]
    fn config_errors_map_to_exit_two() {
        let cli = parse(&["eval", "--f", "nope", "--n", "8", "--x", "0.6"]);
        let e = execute(&cli.command, Format::Csv).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(Cli::try_parse_from(["maxprod", "verify-lemmas", "--suite", "9.9"]).is_err());
        let cli = parse(&["eval", "--f", "phi@abc", "--n", "8", "--x", "0.6"]);
        assert!(execute(&cli.command, Format::Csv).is_err());
    }

    #[test]
    fn info_lists_registry() {
        let out = execute(&Command::Info, Format::Csv).unwrap();
        assert_eq!(out.body.lines().count(), REGISTRY_IDS.len() + 1);
    }
}
