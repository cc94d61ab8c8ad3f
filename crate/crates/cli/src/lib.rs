//! Command-line driver. [`run`] parses argv, executes one subcommand and
//! returns the process exit code: 0 when every check passes, 1 when some check
//! fails, 2 for usage and input errors.

pub mod report;
pub mod suite;

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use chernpos::classes::BasePresentation;
use chernpos::curvature::chern_curvature;
use chernpos::extremal::{verify_lemma_linear, verify_lemma_linear1, FIRST_ORDER_TOL, INEQUALITY_SLACK};
use chernpos::hopf::{
    grid_row, hopf_grid, relative_tangent_bound, solve_phi, solve_phi_value, HopfParams, CSV_HEADER,
};
use chernpos::linalg::{min_eig, C};
use chernpos::metric::MetricField;
use chernpos::tautological::{
    best_chart, fiber_directions, induced_curvature_fd, taut_curvature_in_chart, taut_positivity_scan,
};
use chernpos::tensor::CurvatureTensor;
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use report::{Check, Report};
use suite::{Level, Mutation, Options};

#[derive(Debug, Parser)]
#[command(name = "chernpos", version, about = "Verification driver for positivity computations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Override the main tolerance of the subcommand.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a characteristic-class expression exactly.
    Classes {
        #[arg(long, default_value = "P2")]
        base: String,
        #[arg(long)]
        expr: String,
        #[command(flatten)]
        common: Common,
    },
    /// Extremal holomorphic sectional curvature suites on random Kahler tensors.
    Lemma {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Orthogonal directions sampled per tensor.
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Number of random tensors.
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Curvature of O(1) on the projectivized tangent bundle of a product of projective spaces.
    Taut {
        #[arg(long, default_value = "P2")]
        base: String,
        /// Number of base points (the chart origin plus seeded random points).
        #[arg(long, default_value_t = 10)]
        grid: usize,
        /// Number of fiber directions beyond the coordinate axes.
        #[arg(long, default_value_t = 40)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Hopf surface metrics on an n x n grid of a fundamental domain.
    Hopf {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        a: C,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        b: C,
        #[arg(long, default_value_t = 10)]
        grid: usize,
        #[arg(long)]
        lambda1: Option<f64>,
        #[arg(long)]
        lambda2: Option<f64>,
        /// Also check the relative tangent bound `>= -eps`.
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Curvature engine oracles.
    Engine {
        #[command(flatten)]
        common: Common,
    },
    /// Run the acceptance battery.
    Suite {
        #[arg(value_enum)]
        level: Level,
        /// Restrict to these criterion ids (e.g. 2, 10a).
        #[arg(long)]
        only: Vec<String>,
        #[arg(long, value_enum, hide = true)]
        mutate: Option<Mutation>,
        #[command(flatten)]
        common: Common,
    },
}

/// Parses `re+imi`, `re-imi`, `re` or `imi`.
pub fn parse_complex(s: &str) -> Result<C, String> {
    let t = s.trim();
    let err = || format!("expected a complex number like 2+0i, got {s:?}");
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|re| C::new(re, 0.0)).map_err(|_| err());
    };
    // Split at the last sign that is not the leading one or part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (body[..k].parse::<f64>().map_err(|_| err())?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse::<f64>().map_err(|_| err())?,
    };
    Ok(C::new(re, im))
}

enum Failure {
    Usage(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// Runs the CLI on `argv` (including the program name) and returns the exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let command: Vec<String> = argv.iter().skip(1).cloned().collect();
    match execute(cli.command, command) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn emit(mut report: Report, start: Instant, json: Option<&PathBuf>, verbose: bool) -> Result<i32, Failure> {
    report.finish(start.elapsed().as_secs_f64());
    if verbose {
        print!("{}", report.summary());
    }
    if let Some(path) = json {
        report.write_json(path).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    std::io::stdout().flush().ok();
    Ok(if report.all_passed() { 0 } else { 1 })
}

fn execute(cmd: Command, argv: Vec<String>) -> Result<i32, Failure> {
    let start = Instant::now();
    match cmd {
        Command::Classes { base, expr, common } => {
            let base: BasePresentation = base.parse()?;
            let value = chernpos::expr::run(&expr, &base)?;
            println!("{value}");
            let mut report = Report::new(argv, common.seed);
            report.result = Some(value.to_string());
            emit(report, start, common.json.as_ref(), false)
        }
        Command::Lemma { dim, samples, count, common } => {
            if !(2..=4).contains(&dim) || samples == 0 || count == 0 {
                return Err(Failure::Usage("need 2 <= dim <= 4 and positive --samples/--count".into()));
            }
            let mut report = Report::new(argv, common.seed);
            let slack_tol = common.tol.unwrap_or(INEQUALITY_SLACK);
            report.tolerance("lemma_inequality_slack", -slack_tol);
            report.tolerance("lemma_first_order", FIRST_ORDER_TOL);
            let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
            let (mut slack, mut first) = ([f64::INFINITY; 2], [0.0f64; 2]);
            for k in 0..count {
                let r = CurvatureTensor::random_kahler(dim, &mut rng);
                let seed = common.seed.wrapping_add(k as u64);
                for (i, rep) in [verify_lemma_linear(&r, samples, seed)?, verify_lemma_linear1(&r, samples, seed)?].iter().enumerate() {
                    slack[i] = slack[i].min(rep.min_inequality_slack);
                    first[i] = first[i].max(rep.max_first_order);
                }
            }
            for (i, label) in ["linear", "linear1"].iter().enumerate() {
                report.push(Check::at_least(format!("lemma.{label}.inequality_slack"), slack[i], -slack_tol));
                report.push(Check::at_most(format!("lemma.{label}.first_order"), first[i], FIRST_ORDER_TOL));
            }
            emit(report, start, common.json.as_ref(), true)
        }
        Command::Taut { base, grid, samples, common } => {
            let base: BasePresentation = base.parse()?;
            let factors: Vec<usize> = base.factors().iter().map(|&n| n as usize).collect();
            let metric = MetricField::product_fs(&factors);
            let n = metric.base_dim();
            if grid == 0 || 2 * n > 12 {
                return Err(Failure::Usage("need --grid >= 1 and total dimension <= 6".into()));
            }
            let points = suite::base_grid(n, grid, common.seed);
            let dirs = fiber_directions(n, samples);
            let rep = taut_positivity_scan(&metric, &points, &dirs)?;
            let tol = common.tol.unwrap_or(1e-8);
            let mut report = Report::new(argv, common.seed);
            report.tolerance("taut_semipositive", -tol);
            report.tolerance("taut_fd_agreement", 1e-5);
            report.push(Check::at_least("taut.min_eigenvalue", rep.min_eigenvalue, -tol));
            report.push(Check::at_least("taut.best_sample_min", rep.best_sample_min, -tol));
            // Closed form against the curvature of the induced metric, at a small point.
            let z: Vec<C> = points.last().expect("non-empty grid").iter().map(|x| x * 0.4).collect();
            let r = chern_curvature(&metric, &z)?;
            let mut gap = 0.0f64;
            for a in dirs.iter().take(6) {
                let m = best_chart(a);
                gap = gap.max((taut_curvature_in_chart(&r, a, m)? - induced_curvature_fd(&metric, &z, a, m)?).norm());
            }
            report.push(Check::at_most("taut.fd_agreement", gap, 1e-5));
            emit(report, start, common.json.as_ref(), true)
        }
        Command::Hopf { a, b, grid, lambda1, lambda2, eps, csv, common } => {
            let params = HopfParams::new(a, b)?;
            let params = params.with_lambdas(lambda1.unwrap_or(params.lambda1), lambda2.unwrap_or(params.lambda2))?;
            if grid == 0 {
                return Err(Failure::Usage("--grid must be positive".into()));
            }
            hopf_report(&params, grid, eps, csv, common, argv, start)
        }
        Command::Engine { common } => {
            let mut report = Report::new(argv, common.seed);
            for (name, value) in suite::TOLERANCES.iter().filter(|t| t.0.starts_with("engine_")) {
                report.tolerance(name, *value);
            }
            report.extend(suite::engine_checks("engine"));
            emit(report, start, common.json.as_ref(), true)
        }
        Command::Suite { level, only, mutate, common } => {
            let opts = Options { level, seed: common.seed, mutation: mutate };
            let report = suite::run_suite(&opts, &only, argv).map_err(Failure::Usage)?;
            emit(report, start, common.json.as_ref(), true)
        }
    }
}

fn hopf_report(
    params: &HopfParams,
    grid: usize,
    eps: Option<f64>,
    csv: Option<PathBuf>,
    common: Common,
    argv: Vec<String>,
    start: Instant,
) -> Result<i32, Failure> {
    let mut report = Report::new(argv, common.seed);
    let tol = common.tol.unwrap_or(1e-8);
    report.tolerance("solver_residual", 1e-12);
    report.tolerance("gauduchon_residual", tol);
    report.tolerance("griffiths_min", -tol);
    report.tolerance("log_hessian_psd_rel", -1e-10);
    let points = hopf_grid(params, grid);
    let mut rows = Vec::with_capacity(points.len());
    let (mut residual, mut psd, mut alpha_one, mut deck) = (0.0f64, f64::INFINITY, 0.0f64, 0.0f64);
    let alpha_is_one = (params.alpha() - 1.0).abs() < 1e-15;
    for (k, &(z, w)) in points.iter().enumerate() {
        let v = solve_phi(params, z, w)?;
        residual = residual.max(v.residual.abs());
        psd = psd.min(min_eig(&v.derivatives.m_log) / v.derivatives.m_log.norm());
        let s = z.norm_sqr() + w.norm_sqr();
        alpha_one = alpha_one.max((v.phi - s).abs() / s);
        let moved = solve_phi_value(params, params.a * z, params.b * w)?;
        deck = deck.max((moved - params.a.norm() * params.b.norm() * v.phi).abs() / moved);
        rows.push(grid_row(params, z, w, common.seed.wrapping_add(k as u64))?);
    }
    let gauduchon = rows.iter().map(|r| r.gauduchon_residual).fold(0.0, f64::max);
    let griffiths = rows.iter().map(|r| r.griffiths_min).fold(f64::INFINITY, f64::min);
    report.push(Check::at_most("hopf.solver_residual", residual, 1e-12));
    report.push(Check::at_most("hopf.deck_equivariance", deck, 1e-10));
    report.push(Check::at_least("hopf.log_hessian_min_rel_eigenvalue", psd, -1e-10));
    report.push(Check::at_most("hopf.gauduchon_residual", gauduchon, tol));
    report.push(Check::at_least("hopf.griffiths_min", griffiths, -tol));
    if alpha_is_one {
        report.tolerance("alpha_one_rel", 1e-12);
        report.push(Check::at_most("hopf.alpha_one_rel_error", alpha_one, 1e-12));
    }
    if let Some(eps) = eps {
        report.tolerance("relative_tangent_epsilon", eps);
        let rep = relative_tangent_bound(params, params.lambda1, params.lambda2, eps, &points, &fiber_directions(2, 32))?;
        report.push(Check::at_least("hopf.relative_tangent_min", rep.min_eigenvalue, -eps));
    }
    if let Some(path) = csv {
        let mut writer = csv::Writer::from_path(&path).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
        writer.write_record(CSV_HEADER)?;
        for row in &rows {
            writer.write_record(row.fields().iter().map(f64::to_string))?;
        }
        writer.flush()?;
    }
    emit(report, start, common.json.as_ref(), true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_flags() {
        assert_eq!(parse_complex("2+0i").unwrap(), C::new(2.0, 0.0));
        assert_eq!(parse_complex("-1.5-2i").unwrap(), C::new(-1.5, -2.0));
        assert_eq!(parse_complex("3").unwrap(), C::new(3.0, 0.0));
        assert_eq!(parse_complex("-i").unwrap(), C::new(0.0, -1.0));
        assert_eq!(parse_complex("1e-3+2.5e+1i").unwrap(), C::new(1e-3, 25.0));
        assert!(parse_complex("2+xi").is_err());
        assert!(parse_complex("").is_err());
    }
}
