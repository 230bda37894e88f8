//! Command dispatch for the `bohr` binary. Every command produces a JSON
//! report; exit code 0 means computed or verified, 1 falsified (the report
//! carries the witness) and 2 an input error.

use std::ffi::OsString;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::bohr::{BohrPoint, KroneckerOutcome, KroneckerSearch};
use crate::error::{Error, Result};
use crate::exact::{parse_rational, Real, Scalar, Turns};
use crate::expr::{lower, module_for, parse_expression_with, SymbolTable};
use crate::fleischhack::{extension_agreement_check, q_invariance_verdict, QPoint, QVerdict};
use crate::frequency::{is_known_constant, FrequencyModule, Generator};
use crate::json;
use crate::measure::uniqueness_verdict_coords;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSIFIED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Largest support box accepted by `verify-haar-uniqueness`.
const MAX_SUPPORT: usize = 200_000;

#[derive(Parser, Debug)]
#[command(name = "bohr", version, about = "Almost-periodic functions, Bohr measures and invariance verifiers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Symbols {
    /// Extra generator symbol, as NAME=DECIMAL (repeatable)
    #[arg(long = "symbol", value_name = "NAME=DECIMAL")]
    symbols: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bohr mean of an expression
    Mean {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[command(flatten)]
        symbols: Symbols,
    },
    /// Bohr inner product <f, g>
    Inner {
        #[arg(allow_hyphen_values = true)]
        f: String,
        #[arg(allow_hyphen_values = true)]
        g: String,
        #[command(flatten)]
        symbols: Symbols,
    },
    /// Pull an expression back along x -> x + t
    Translate {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        /// Shift t (rational, decimal or multiple of pi)
        #[arg(long, allow_hyphen_values = true)]
        by: String,
        /// Points at which to evaluate the translated function (repeatable)
        #[arg(long = "at", allow_hyphen_values = true)]
        at: Vec<String>,
        #[command(flatten)]
        symbols: Symbols,
    },
    /// Decide whether invariance under the shifts forces the Haar measure
    VerifyHaarUniqueness {
        /// Comma-separated generators, e.g. `1` or `1,sqrt2` or `1/2*pi`
        #[arg(long, allow_hyphen_values = true)]
        generators: String,
        /// Coordinate range A..B applied to every generator
        #[arg(long, allow_hyphen_values = true)]
        freqs: String,
        /// Comma-separated shifts
        #[arg(long, allow_hyphen_values = true, default_value = "")]
        shifts: String,
    },
    /// Check that the extended action agrees with pulling functions back
    VerifyExtension {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long, allow_hyphen_values = true)]
        shift: String,
        /// Real points (repeatable)
        #[arg(long = "real", allow_hyphen_values = true)]
        real: Vec<String>,
        /// Bohr points as comma-separated angles over 2pi (repeatable)
        #[arg(long = "bohr", allow_hyphen_values = true)]
        bohr: Vec<String>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        symbols: Symbols,
    },
    /// Invariance analysis of a measure on R ⊔ R_Bohr read from a JSON file
    CheckMeasure {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true, default_value = "")]
        shifts: String,
    },
    /// Search t with iota(t) close to a target Bohr point
    Kronecker {
        #[arg(long, allow_hyphen_values = true)]
        generators: String,
        /// Comma-separated target angles over 2pi
        #[arg(long, allow_hyphen_values = true)]
        target: String,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long = "t-max", default_value_t = 1e6)]
        t_max: f64,
        #[arg(long)]
        budget: Option<u64>,
    },
}

/// Text for stdout and the process exit code.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

fn error_report(kind: &str, message: &str) -> Value {
    json!({ "error": { "kind": kind, "message": message } })
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: EXIT_OK,
                    stdout: e.to_string(),
                },
                _ => Outcome {
                    code: EXIT_INPUT,
                    stdout: error_report("usage", e.to_string().trim()).to_string(),
                },
            };
        }
    };
    let (code, report) = match dispatch(cli.command) {
        Ok(r) => r,
        Err(e) => (EXIT_INPUT, error_report(e.kind(), &e.to_string())),
    };
    Outcome {
        code,
        stdout: serde_json::to_string_pretty(&report).expect("serializable report"),
    }
}

fn symbol_table(s: &Symbols) -> Result<SymbolTable> {
    let mut table = SymbolTable::new();
    for def in &s.symbols {
        let (name, decimal) = def
            .split_once('=')
            .ok_or_else(|| Error::InvalidInput(format!("expected NAME=DECIMAL, got `{def}`")))?;
        table.define(name.trim(), decimal.trim())?;
    }
    Ok(table)
}

fn value_report(s: &Scalar) -> Value {
    json!({ "value": json::complex_pair(s.to_c64()), "exact": s.is_exact().then(|| json::scalar_strings(s)) })
}

fn list(s: &str) -> Vec<&str> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty()).collect()
}

fn parse_shifts(s: &str) -> Result<Vec<Real>> {
    list(s).into_iter().map(Real::parse).collect()
}

/// `q`, `pi`, `-pi`, `q*sqrt2`.
fn parse_generator(s: &str) -> Result<Generator> {
    if let Ok(q) = parse_rational(s) {
        return Generator::rational(q);
    }
    let one = parse_rational("1")?;
    let (scale, name) = match s.rsplit_once('*') {
        Some((q, name)) => (parse_rational(q)?, name.trim()),
        None => match s.strip_prefix('-') {
            Some(name) => (-one, name.trim()),
            None => (one, s.trim()),
        },
    };
    if !is_known_constant(name) {
        return Err(Error::UnknownSymbol(name.to_string()));
    }
    Generator::constant(name, scale)
}

fn parse_module(s: &str) -> Result<Arc<FrequencyModule>> {
    let gens = list(s).into_iter().map(parse_generator).collect::<Result<Vec<_>>>()?;
    if gens.is_empty() {
        return Err(Error::InvalidInput("no generators given".into()));
    }
    FrequencyModule::new(gens)
}

fn parse_range(s: &str) -> Result<(i64, i64)> {
    let bad = || Error::InvalidInput(format!("expected A..B, got `{s}`"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let a: i64 = a.trim().parse().map_err(|_| bad())?;
    let b: i64 = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

fn box_support(dim: usize, (a, b): (i64, i64)) -> Result<Vec<Vec<i64>>> {
    let side = usize::try_from(b - a + 1).map_err(|_| Error::InvalidInput("range too large".into()))?;
    let total = side.checked_pow(dim as u32).filter(|n| *n <= MAX_SUPPORT);
    if total.is_none() {
        return Err(Error::InvalidInput(format!("support box exceeds {MAX_SUPPORT} frequencies")));
    }
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|p| {
                (a..=b).map(move |k| {
                    let mut q = p.clone();
                    q.push(k);
                    q
                })
            })
            .collect();
    }
    Ok(out)
}

fn parse_turns(s: &str, module: &Arc<FrequencyModule>) -> Result<BohrPoint> {
    let angles = list(s).into_iter().map(Turns::parse).collect::<Result<Vec<_>>>()?;
    BohrPoint::from_turns(module, angles)
}

fn dispatch(cmd: Command) -> Result<(i32, Value)> {
    match cmd {
        Command::Mean { expr, symbols } => {
            let table = symbol_table(&symbols)?;
            let e = parse_expression_with(&expr, &table)?;
            let f = lower(&e, &module_for(&[&e], &table)?)?;
            // compactly supported parts have mean zero
            let mut report = value_report(&f.ap.bohr_mean_exact());
            report["command"] = json!("mean");
            Ok((EXIT_OK, report))
        }
        Command::Inner { f, g, symbols } => {
            let table = symbol_table(&symbols)?;
            let ef = parse_expression_with(&f, &table)?;
            let eg = parse_expression_with(&g, &table)?;
            let module = module_for(&[&ef, &eg], &table)?;
            let (lf, lg) = (lower(&ef, &module)?, lower(&eg, &module)?);
            let mut report = value_report(&lf.ap.inner(&lg.ap)?);
            report["command"] = json!("inner");
            Ok((EXIT_OK, report))
        }
        Command::Translate {
            expr,
            by,
            at,
            symbols,
        } => {
            let table = symbol_table(&symbols)?;
            let e = parse_expression_with(&expr, &table)?;
            let f = lower(&e, &module_for(&[&e], &table)?)?;
            let t = Real::parse(&by)?;
            let moved = f.pullback(&t);
            let values = at
                .iter()
                .map(|x| {
                    let x = Real::parse(x)?;
                    Ok(json!({ "x": json::real_string(&x), "value": json::complex_pair(moved.eval(&x).to_c64()) }))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((
                EXIT_OK,
                json!({
                    "command": "translate",
                    "shift": json::real_string(&t),
                    "ap": json::ap_to_json(&moved.ap),
                    "c0": {
                        "breakpoints": moved.c0.breakpoints().iter().map(json::real_string).collect::<Vec<_>>(),
                        "values": moved.c0.values().iter().map(json::scalar_strings).collect::<Vec<_>>(),
                    },
                    "values": values,
                }),
            ))
        }
        Command::VerifyHaarUniqueness {
            generators,
            freqs,
            shifts,
        } => {
            let module = parse_module(&generators)?;
            let support = box_support(module.dim(), parse_range(&freqs)?)?;
            let shifts = parse_shifts(&shifts)?;
            let report = uniqueness_verdict_coords(&module, &support.into_iter().collect(), &shifts)?;
            let mut out = json::uniqueness_to_json(&report);
            out["command"] = json!("verify-haar-uniqueness");
            out["module"] = json::module_to_json(&module);
            let code = if report.is_forced_haar() { EXIT_OK } else { EXIT_FALSIFIED };
            Ok((code, out))
        }
        Command::VerifyExtension {
            expr,
            shift,
            real,
            bohr,
            tol,
            symbols,
        } => {
            if !(tol >= 0.0) {
                return Err(Error::InvalidInput("tolerance must be nonnegative".into()));
            }
            let table = symbol_table(&symbols)?;
            let e = parse_expression_with(&expr, &table)?;
            let module = module_for(&[&e], &table)?;
            let f = lower(&e, &module)?;
            let t = Real::parse(&shift)?;
            let mut points = real
                .iter()
                .map(|x| Ok(QPoint::Real(Real::parse(x)?)))
                .collect::<Result<Vec<_>>>()?;
            for b in &bohr {
                points.push(QPoint::Bohr(parse_turns(b, &module)?));
            }
            if points.is_empty() {
                points = vec![QPoint::Real(Real::zero()), QPoint::Bohr(BohrPoint::identity(&module))];
            }
            let mut all = true;
            let checks = points
                .iter()
                .map(|p| {
                    let r = extension_agreement_check(&t, p, &f, tol)?;
                    all &= r.agrees;
                    let point = match p {
                        QPoint::Real(x) => json!({ "real": json::real_string(x) }),
                        QPoint::Bohr(psi) => json!({ "bohr": json::bohr_point_to_json(psi) }),
                    };
                    Ok(json!({
                        "point": point,
                        "agrees": r.agrees,
                        "residual": r.residual,
                        "moved_point": json::complex_pair(r.moved_point.to_c64()),
                        "moved_function": json::complex_pair(r.moved_function.to_c64()),
                    }))
                })
                .collect::<Result<Vec<_>>>()?;
            let code = if all { EXIT_OK } else { EXIT_FALSIFIED };
            Ok((
                code,
                json!({ "command": "verify-extension", "shift": json::real_string(&t), "agrees": all, "checks": checks }),
            ))
        }
        Command::CheckMeasure { file, shifts } => {
            let text = std::fs::read_to_string(&file)
                .map_err(|e| Error::InvalidInput(format!("{}: {e}", file.display())))?;
            let value: Value = serde_json::from_str(&text)?;
            let mu = json::q_measure_from_json(&value)?;
            let report = q_invariance_verdict(&mu, &parse_shifts(&shifts)?)?;
            let mut out = json::q_report_to_json(&report);
            out["command"] = json!("check-measure");
            let ok = report.verdict == QVerdict::ForcedStandard && report.invariant;
            Ok((if ok { EXIT_OK } else { EXIT_FALSIFIED }, out))
        }
        Command::Kronecker {
            generators,
            target,
            eps,
            t_max,
            budget,
        } => {
            let module = parse_module(&generators)?;
            let target = parse_turns(&target, &module)?;
            let mut search = KroneckerSearch::new(eps, t_max);
            if let Some(b) = budget {
                search = search.with_budget(b);
            }
            Ok(match search.run(&target)? {
                KroneckerOutcome::Found {
                    t,
                    residual,
                    evaluations,
                } => (
                    EXIT_OK,
                    json!({ "command": "kronecker", "found": true, "t": t, "residual": residual, "evaluations": evaluations }),
                ),
                KroneckerOutcome::NotFound {
                    evaluations,
                    searched_to,
                    budget_exhausted,
                    best_residual,
                } => (
                    EXIT_FALSIFIED,
                    json!({
                        "command": "kronecker",
                        "found": false,
                        "evaluations": evaluations,
                        "searched_to": searched_to,
                        "budget_exhausted": budget_exhausted,
                        "best_residual": best_residual,
                    }),
                ),
            })
        }
    }
}
