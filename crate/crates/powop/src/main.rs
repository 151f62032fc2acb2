//! Command-line surface: reproducible, machine-readable access to the root
//! solve, the power operation, the model coefficients, and the rank tables.
//!
//! Exit status: 0 on success, 2 on usage errors, 3 on computation errors,
//! 4 when `check` finds an invariant violation or a reference discrepancy.
//! Output goes to stdout; diagnostics go to stderr.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use powop::check::{self, CheckConfig, CheckStatus};
use powop::output::{poly_terms_json, wpoly_json_values, SeriesJson};
use powop::solver::{solve_alpha_fixed_point_with, solve_alpha_newton_with};
use powop::{
    d_coefficient, is_prime, psi_e, specialize_alpha, w_coefficients, Error, HLaurentSeries,
    PadicContext, RankIndex, RankQuery, SeriesPrecision, SolveReport,
};

#[derive(Parser)]
#[command(
    name = "powop",
    version,
    about = "Total power operation on the K(1)-local height-2 E-theory ring, exactly"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the unique root of w(h, a) in the Laurent ring
    Alpha(SeriesArgs),
    /// Compute the power operation applied to h
    Psi(SeriesArgs),
    /// Print the coefficient list [w_0, ..., w_{p+1}]
    Wpoly(WpolyArgs),
    /// Print one combinatorial coefficient d_{i,tau}
    Dcoef(DcoefArgs),
    /// Sublattice and orbit-class counts
    Ranks(RanksArgs),
    /// Run the invariant suite and the reference comparison for one prime
    Check(CheckArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Pretty,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    FixedPoint,
    Newton,
    Both,
}

#[derive(Args)]
struct SeriesArgs {
    /// The prime p
    #[arg(long)]
    p: u64,
    /// p-adic working precision N; values are exact mod p^N
    #[arg(long, env = "POWOP_DEFAULT_PRECISION", default_value_t = 64)]
    precision: u32,
    /// Largest retained h-exponent (default 2p)
    #[arg(long)]
    max_exp: Option<i64>,
    /// Output truncation floor: terms at or below this exponent are hidden
    #[arg(long)]
    min_floor: Option<i64>,
    #[arg(long, value_enum, default_value_t = Format::Pretty)]
    format: Format,
    #[arg(long, value_enum, default_value_t = MethodArg::FixedPoint)]
    method: MethodArg,
}

#[derive(Args)]
struct WpolyArgs {
    #[arg(long)]
    p: u64,
    #[arg(long, value_enum, default_value_t = Format::Pretty)]
    format: Format,
}

#[derive(Args)]
struct DcoefArgs {
    #[arg(long)]
    p: u64,
    /// Power of the subgroup parameter, 0..=p
    #[arg(long)]
    i: u32,
    /// Summation index, 1..=p
    #[arg(long)]
    tau: u32,
    #[arg(long, value_enum, default_value_t = Format::Pretty)]
    format: Format,
}

#[derive(Args)]
struct RanksArgs {
    #[arg(long)]
    p: u64,
    /// Lattice rank r >= 1
    #[arg(long)]
    rank: u32,
    /// Index exponent: count sublattices of index p^m
    #[arg(long, conflicts_with = "k")]
    m: Option<u32>,
    /// Set order: count isomorphism classes of order-k sets
    #[arg(long)]
    k: Option<u32>,
    #[arg(long, value_enum, default_value_t = Format::Pretty)]
    format: Format,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    p: u64,
    #[arg(long, env = "POWOP_DEFAULT_PRECISION", default_value_t = 64)]
    precision: u32,
    #[arg(long)]
    max_exp: Option<i64>,
    #[arg(long)]
    min_floor: Option<i64>,
    #[arg(long, value_enum, default_value_t = Format::Pretty)]
    format: Format,
}

const EXIT_USAGE: u8 = 2;
const EXIT_COMPUTE: u8 = 3;
const EXIT_CHECK_FAILED: u8 = 4;

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn error_exit(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    let code = match e {
        Error::NotPrime(_)
        | Error::ZeroPrecision
        | Error::InvalidFloor(_)
        | Error::IndexOutOfRange { .. }
        | Error::BruteForceInfeasible { .. } => EXIT_USAGE,
        _ => EXIT_COMPUTE,
    };
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Alpha(args) => run_series(args, SeriesKind::Alpha),
        Command::Psi(args) => run_series(args, SeriesKind::Psi),
        Command::Wpoly(args) => run_wpoly(args),
        Command::Dcoef(args) => run_dcoef(args),
        Command::Ranks(args) => run_ranks(args),
        Command::Check(args) => run_check_cmd(args),
    }
}

#[derive(Clone, Copy, PartialEq)]
enum SeriesKind {
    Alpha,
    Psi,
}

fn validate_common(p: u64, precision: u32, min_floor: Option<i64>) -> Option<ExitCode> {
    if !is_prime(p) {
        return Some(usage_error(&format!("{p} is not prime")));
    }
    if precision == 0 {
        return Some(usage_error("precision must be at least 1"));
    }
    if let Some(f) = min_floor {
        if f > -1 {
            return Some(usage_error(&format!(
                "min-floor must be <= -1, got {f}"
            )));
        }
    }
    None
}

fn build_window(p: u64, precision: u32, max_exp: Option<i64>) -> Result<SeriesPrecision, Error> {
    let ctx = PadicContext::new(p, precision)?;
    let base = SeriesPrecision::default_for(ctx);
    Ok(match max_exp {
        Some(m) => base.with_max_exp(m),
        None => base,
    })
}

fn run_series(args: SeriesArgs, kind: SeriesKind) -> ExitCode {
    if let Some(code) = validate_common(args.p, args.precision, args.min_floor) {
        return code;
    }
    if let Some(m) = args.max_exp {
        if m < args.p as i64 + 1 {
            return usage_error(&format!(
                "max-exp must be at least p + 1 = {}",
                args.p + 1
            ));
        }
    }
    let window = match build_window(args.p, args.precision, args.max_exp) {
        Ok(w) => w,
        Err(e) => return error_exit(&e),
    };

    let compute = |method: MethodArg| -> Result<(HLaurentSeries, SolveReport), Error> {
        let report = match method {
            MethodArg::FixedPoint => solve_alpha_fixed_point_with(&window)?,
            MethodArg::Newton => solve_alpha_newton_with(&window)?,
            MethodArg::Both => unreachable!("Both is expanded by the caller"),
        };
        let series = match kind {
            SeriesKind::Alpha => report.alpha_star.clone(),
            SeriesKind::Psi => specialize_alpha(&psi_e(args.p)?, &report.alpha_star)?,
        };
        Ok((series, report))
    };

    let emit_note = |series: &HLaurentSeries| {
        let note = match kind {
            SeriesKind::Alpha => check::alpha_reference_note(series),
            SeriesKind::Psi => check::psi_reference_note(series),
        };
        if let Some(note) = note {
            eprintln!("{note}");
        }
    };

    let windowed = |series: &HLaurentSeries| -> Result<HLaurentSeries, Error> {
        match args.min_floor {
            Some(f) => series.truncate_below(f),
            None => Ok(series.clone()),
        }
    };

    match args.method {
        MethodArg::FixedPoint | MethodArg::Newton => {
            let (series, report) = match compute(args.method) {
                Ok(v) => v,
                Err(e) => return error_exit(&e),
            };
            eprintln!(
                "{} p={} N={} method={} iterations={} residual_valuation={}",
                kind_name(kind),
                args.p,
                args.precision,
                report.method,
                report.iterations,
                report.residual_valuation
            );
            emit_note(&series);
            let out = match windowed(&series) {
                Ok(s) => s,
                Err(e) => return error_exit(&e),
            };
            match args.format {
                Format::Pretty => println!("{out}"),
                Format::Json => println!(
                    "{}",
                    serde_json::to_string(&SeriesJson::from_series(&out)).expect("serializable")
                ),
            }
            ExitCode::SUCCESS
        }
        MethodArg::Both => {
            let fixed = match compute(MethodArg::FixedPoint) {
                Ok(v) => v,
                Err(e) => return error_exit(&e),
            };
            let newton = match compute(MethodArg::Newton) {
                Ok(v) => v,
                Err(e) => return error_exit(&e),
            };
            if fixed.0 != newton.0 {
                return error_exit(&Error::MethodDisagreement {
                    p: args.p,
                    precision: args.precision,
                });
            }
            emit_note(&fixed.0);
            let (f_out, n_out) = match (windowed(&fixed.0), windowed(&newton.0)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => return error_exit(&e),
            };
            match args.format {
                Format::Pretty => {
                    println!("fixed_point: {f_out}");
                    println!("newton: {n_out}");
                    println!("methods_agree: true");
                }
                Format::Json => {
                    let doc = json!({
                        "fixed_point": SeriesJson::from_series(&f_out),
                        "newton": SeriesJson::from_series(&n_out),
                        "methods_agree": true,
                    });
                    println!("{doc}");
                }
            }
            ExitCode::SUCCESS
        }
    }
}

fn kind_name(kind: SeriesKind) -> &'static str {
    match kind {
        SeriesKind::Alpha => "alpha",
        SeriesKind::Psi => "psi",
    }
}

fn run_wpoly(args: WpolyArgs) -> ExitCode {
    let coeffs = match w_coefficients(args.p) {
        Ok(c) => c,
        Err(e) => return error_exit(&e),
    };
    match args.format {
        Format::Pretty => {
            let rendered: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
            println!("[{}]", rendered.join(", "));
        }
        Format::Json => {
            let doc = json!({ "p": args.p, "w": wpoly_json_values(&coeffs) });
            println!("{doc}");
        }
    }
    ExitCode::SUCCESS
}

fn run_dcoef(args: DcoefArgs) -> ExitCode {
    let poly = match d_coefficient(args.p, args.i, args.tau) {
        Ok(p) => p,
        Err(e) => return error_exit(&e),
    };
    match args.format {
        Format::Pretty => println!("{poly}"),
        Format::Json => {
            let doc = json!({
                "p": args.p,
                "i": args.i,
                "tau": args.tau,
                "terms": poly_terms_json(&poly),
            });
            println!("{doc}");
        }
    }
    ExitCode::SUCCESS
}

fn run_ranks(args: RanksArgs) -> ExitCode {
    if !is_prime(args.p) {
        return usage_error(&format!("{} is not prime", args.p));
    }
    if args.rank == 0 {
        return usage_error("rank must be at least 1");
    }
    let index = match (args.m, args.k) {
        (Some(m), None) => RankIndex::IndexExponent(m),
        (None, Some(k)) => {
            if k == 0 {
                return usage_error("k must be at least 1");
            }
            RankIndex::SetOrder(k)
        }
        _ => return usage_error("pass exactly one of --m or --k"),
    };
    let query = RankQuery {
        p: args.p,
        rank: args.rank,
        index,
    };
    let result = query.run();
    match args.format {
        Format::Pretty => println!("{}", result.count),
        Format::Json => {
            let mut doc = serde_json::Map::new();
            doc.insert("p".into(), json!(args.p));
            doc.insert("rank".into(), json!(args.rank));
            match index {
                RankIndex::IndexExponent(m) => {
                    doc.insert("m".into(), json!(m));
                }
                RankIndex::SetOrder(k) => {
                    doc.insert("k".into(), json!(k));
                }
            }
            doc.insert("count".into(), json!(result.count.to_string()));
            println!("{}", serde_json::Value::from(doc));
        }
    }
    ExitCode::SUCCESS
}

fn run_check_cmd(args: CheckArgs) -> ExitCode {
    if let Some(code) = validate_common(args.p, args.precision, args.min_floor) {
        return code;
    }
    let cfg = CheckConfig {
        p: args.p,
        precision: args.precision,
        max_exp: args.max_exp,
        min_floor: args.min_floor,
    };
    let report = match check::run_check(&cfg) {
        Ok(r) => r,
        Err(e) => return error_exit(&e),
    };
    match args.format {
        Format::Pretty => print!("{}", check::render_pretty(&report)),
        Format::Json => println!("{}", check::render_json(&report)),
    }
    match report.status {
        CheckStatus::Ok => ExitCode::SUCCESS,
        CheckStatus::Discrepancy | CheckStatus::Violation => ExitCode::from(EXIT_CHECK_FAILED),
    }
}
