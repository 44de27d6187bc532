//! Command-line front end: a thin dispatch layer over the library.
//!
//! Subcommands: `invariants` (functional basis), `frame` (solved frame
//! entries), `check` (symbolic and randomized verification suites),
//! `classify` (stratum of a right-hand side at a point), `equiv`
//! (necessary-condition signature comparison).  Exit codes: 0 success /
//! all checks pass, 1 a check fails, 2 usage or input error, 3 degenerate
//! input (no regular points, inconclusive comparison).
//!
//! `--format json` output carries a versioned `schema` tag; `--schema`
//! prints the schema documents themselves.  The default seed is 0,
//! overridden by the `INVFORGE_SEED` environment variable, overridden by
//! `--seed`.

use std::ffi::OsString;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use num::{BigInt, BigRational};
use serde_json::{json, Value};

use crate::exprparse::{self, latex, plain};
use crate::harness::{
    equivalence_necessary, invariance_test, EquivVerdict, HarnessError, InvarianceReport,
};
use crate::invstructure::{
    commutator_coeffs, functional_basis, invariant_op, phantom_check, realize, recurrence,
    InvError,
};
use crate::jetspace::{jet, u_expr, v_expr};
use crate::movingframe::{classify, invariant_on_rhs, normalized_invariant, solve_frame};
use crate::symkernel::{canonical_equal, Dir, Expr, KernelError, Symbol};

const EXIT_OK: i32 = 0;
const EXIT_FAIL: i32 = 1;
const EXIT_USAGE: i32 = 2;
const EXIT_DEGENERATE: i32 = 3;

/// Writes one line to stdout, exiting quietly if the reader has closed the
/// pipe (e.g. output piped into `head`).
fn emit_line(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if writeln!(out, "{text}").is_err() {
        std::process::exit(EXIT_OK);
    }
}

macro_rules! emit {
    ($($arg:tt)*) => { emit_line(&format!($($arg)*)) };
}

#[derive(Parser)]
#[command(
    name = "invforge",
    version,
    about = "Differential invariants of u_t = u_xx + f(u, u_x) under fiber-preserving equivalence"
)]
struct Cli {
    /// Print the JSON schemas for machine-readable output and exit.
    #[arg(long)]
    schema: bool,

    /// Output format; latex affects expression-printing commands.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// RNG seed for sampling commands (default: INVFORGE_SEED, then 0).
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    cmd: Option<Cmd>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    Latex,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Phantom,
    Recurrence,
    Commutator,
    Invariance,
    All,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print a functional basis of differential invariants up to a jet order.
    Invariants {
        /// Highest jet order of the basis (at least 2).
        #[arg(long, default_value_t = 3)]
        order: u8,
        /// Also print closed-form expressions in (v, f_ij) coordinates.
        #[arg(long)]
        explicit: bool,
    },
    /// Print the solved frame: C1, C2, and phi-derivatives through order + 2.
    Frame {
        /// Highest jet order the frame supports (at least 2).
        #[arg(long, default_value_t = 3)]
        order: u8,
    },
    /// Run verification suites; exit 0 only if every selected suite passes.
    Check {
        /// Which suite to run.
        #[arg(long, value_enum)]
        suite: Suite,
        /// Right-hand side f(u, v); required for the invariance suite.
        #[arg(long)]
        f: Option<String>,
        /// Jet order for the invariance suite (2..=4).
        #[arg(long, default_value_t = 3)]
        order: u8,
        /// Sample count for the invariance suite.
        #[arg(long, default_value_t = 100)]
        samples: u32,
        /// Relative-error tolerance for the invariance suite.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Classify the stratum of a right-hand side at a point.
    Classify {
        /// Right-hand side f(u, v).
        #[arg(long)]
        f: String,
        /// Evaluation point as "u,v"; rationals like 1, -3/2, 0.25.
        #[arg(long)]
        point: String,
    },
    /// Compare signature sets of two right-hand sides (necessary condition).
    Equiv {
        /// First right-hand side f(u, v).
        #[arg(long)]
        f1: String,
        /// Second right-hand side f(u, v).
        #[arg(long)]
        f2: String,
        /// Signature samples per side.
        #[arg(long, default_value_t = 100)]
        samples: u32,
        /// Base tolerance for the match threshold.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

/// Parses the argument list and runs one command, returning the process
/// exit code.  All output goes to stdout, diagnostics to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    if cli.schema {
        emit!(
            "{}",
            serde_json::to_string_pretty(&schemas()).expect("schema document serializes")
        );
        return EXIT_OK;
    }
    let format = cli.format.unwrap_or(Format::Plain);
    match cli.cmd {
        None => {
            eprintln!("error: a subcommand is required (or --schema); see --help");
            EXIT_USAGE
        }
        Some(Cmd::Invariants { order, explicit }) => cmd_invariants(order, explicit, format),
        Some(Cmd::Frame { order }) => cmd_frame(order, format),
        Some(Cmd::Check {
            suite,
            f,
            order,
            samples,
            tol,
        }) => cmd_check(suite, f.as_deref(), order, samples, tol, cli.seed, format),
        Some(Cmd::Classify { f, point }) => cmd_classify(&f, &point, format),
        Some(Cmd::Equiv {
            f1,
            f2,
            samples,
            tol,
        }) => cmd_equiv(&f1, &f2, samples, tol, cli.seed, format),
    }
}

/// Seed precedence: `--seed` flag, then `INVFORGE_SEED`, then 0.
fn resolve_seed(flag: Option<u64>) -> Result<u64, String> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("INVFORGE_SEED") {
        Ok(text) => text
            .trim()
            .parse::<u64>()
            .map_err(|_| format!("INVFORGE_SEED is not a valid seed: {text:?}")),
        Err(_) => Ok(0),
    }
}

fn parse_rhs(text: &str) -> Result<Expr, String> {
    exprparse::parse(text).map_err(|e| format!("could not parse {text:?}: {e}"))
}

/// Accepts integers, `p/q` fractions, and finite decimals.
fn parse_rational(text: &str) -> Option<BigRational> {
    let t = text.trim();
    if let Some((num, den)) = t.split_once('/') {
        let n = BigInt::from_str(num.trim()).ok()?;
        let d = BigInt::from_str(den.trim()).ok()?;
        if d == BigInt::from(0) {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((int_part, frac_part)) = t.split_once('.') {
        let negative = int_part.trim_start().starts_with('-');
        let whole = if int_part.is_empty() || int_part == "-" {
            BigInt::from(0)
        } else {
            BigInt::from_str(int_part).ok()?
        };
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let num = BigInt::from_str(frac_part).ok()?;
        let den = BigInt::from(10u8).pow(frac_part.len() as u32);
        let frac = BigRational::new(num, den);
        let whole = BigRational::from(whole);
        return Some(if negative { whole - frac } else { whole + frac });
    }
    BigInt::from_str(t).ok().map(BigRational::from)
}

fn parse_point(text: &str) -> Result<(BigRational, BigRational), String> {
    let bad = || format!("could not parse point {text:?}; expected \"u,v\"");
    let (a, b) = text.split_once(',').ok_or_else(bad)?;
    match (parse_rational(a), parse_rational(b)) {
        (Some(u), Some(v)) => Ok((u, v)),
        _ => Err(bad()),
    }
}

fn usage_error(msg: &str) -> i32 {
    eprintln!("error: {msg}");
    EXIT_USAGE
}

fn cmd_invariants(order: u8, explicit: bool, format: Format) -> i32 {
    let basis = match functional_basis(order) {
        Ok(b) => b,
        Err(InvError::InvalidOrder(k)) => {
            return usage_error(&format!("--order must be at least 2, got {k}"));
        }
        Err(e) => return usage_error(&e.to_string()),
    };
    match format {
        Format::Json => {
            let entries: Vec<Value> = basis
                .iter()
                .map(|b| {
                    let mut entry = json!({
                        "label": b.label(),
                        "latex": b.symbol().latex(),
                        "order": b.order,
                        "base": [b.base.0, b.base.1],
                    });
                    if explicit {
                        let closed = b.closed_form();
                        entry["plain"] = json!(plain(&closed));
                        entry["expr"] = exprparse::to_json(&closed);
                    }
                    entry
                })
                .collect();
            let doc = json!({
                "schema": "invforge.invariants/1",
                "order": order,
                "explicit": explicit,
                "basis": entries,
            });
            emit!("{}", serde_json::to_string_pretty(&doc).expect("serializes"));
        }
        Format::Plain | Format::Latex => {
            for b in &basis {
                let name = match format {
                    Format::Latex => b.symbol().latex(),
                    _ => b.label(),
                };
                if explicit {
                    let closed = b.closed_form();
                    let body = match format {
                        Format::Latex => latex(&closed),
                        _ => plain(&closed),
                    };
                    emit!("{name} = {body}");
                } else {
                    emit!("{name}");
                }
            }
        }
    }
    EXIT_OK
}

fn cmd_frame(order: u8, format: Format) -> i32 {
    if order < 2 {
        return usage_error(&format!("--order must be at least 2, got {order}"));
    }
    let frame = match solve_frame(order + 2) {
        Ok(fr) => fr,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_FAIL;
        }
    };
    match format {
        Format::Json => {
            let entries: Vec<Value> = frame
                .entries()
                .map(|(s, e)| {
                    json!({
                        "symbol": s.name(),
                        "latex": s.latex(),
                        "plain": plain(e),
                        "expr": exprparse::to_json(e),
                    })
                })
                .collect();
            let doc = json!({
                "schema": "invforge.frame/1",
                "order": order,
                "entries": entries,
            });
            emit!("{}", serde_json::to_string_pretty(&doc).expect("serializes"));
        }
        Format::Plain | Format::Latex => {
            for (s, e) in frame.entries() {
                match format {
                    Format::Latex => emit!("{} = {}", s.latex(), latex(e)),
                    _ => emit!("{} = {}", s.name(), plain(e)),
                }
            }
        }
    }
    EXIT_OK
}

struct SuiteOutcome {
    name: &'static str,
    pass: bool,
    detail: String,
    report: Option<Value>,
}

fn run_phantom_suite() -> SuiteOutcome {
    let report = phantom_check(4);
    let held = report.relations.iter().filter(|r| r.holds).count();
    let relations: Vec<Value> = report
        .relations
        .iter()
        .map(|r| json!({ "label": r.label, "holds": r.holds }))
        .collect();
    SuiteOutcome {
        name: "phantom",
        pass: report.all_hold,
        detail: format!("{held}/{} normalization relations hold", report.relations.len()),
        report: Some(json!({ "relations": relations })),
    }
}

fn run_recurrence_suite() -> SuiteOutcome {
    let mut identities = 0u32;
    let mut pass = true;
    for (i, j) in [(1u8, 1u8), (0, 3)] {
        match recurrence(i, j) {
            Ok((eu, ev)) => {
                for (e, ti, tj) in [(&eu, i + 1, j), (&ev, i, j + 1)] {
                    let realized = realize(e);
                    let direct = normalized_invariant(ti, tj).expr;
                    if canonical_equal(&realized, &direct) {
                        identities += 1;
                    } else {
                        pass = false;
                    }
                }
            }
            Err(_) => pass = false,
        }
    }
    let cubic = Expr::pow(Expr::sym(Symbol::V), 3);
    let pinned = [
        ((1u8, 2u8), Expr::int(-24)),
        ((2, 1), Expr::int(48)),
        ((0, 4), Expr::int(0)),
    ];
    let mut values_ok = 0u32;
    for ((i, j), want) in &pinned {
        if invariant_on_rhs(*i, *j, &cubic) == *want {
            values_ok += 1;
        } else {
            pass = false;
        }
    }
    SuiteOutcome {
        name: "recurrence",
        pass,
        detail: format!(
            "{identities}/4 identities match direct invariantization, {values_ok}/3 pinned cubic values"
        ),
        report: Some(json!({ "identities": identities, "pinnedValues": values_ok })),
    }
}

fn run_commutator_suite() -> SuiteOutcome {
    let du = invariant_op(Dir::U);
    let dv = invariant_op(Dir::V);
    let cc = commutator_coeffs();
    let y1 = realize(&cc.y1);
    let y2 = realize(&cc.y2);
    let tests = [
        u_expr(),
        v_expr(),
        jet(0, 0),
        jet(0, 1),
        normalized_invariant(1, 1).expr,
    ];
    let mut ok = 0u32;
    for g in &tests {
        let lhs = du.commutator(&dv).apply(g);
        let rhs = &(&y1 * &du.apply(g)) + &(&y2 * &dv.apply(g));
        if canonical_equal(&lhs, &rhs) {
            ok += 1;
        }
    }
    SuiteOutcome {
        name: "commutator",
        pass: ok as usize == tests.len(),
        detail: format!("{ok}/{} test functions satisfy the bracket relation", tests.len()),
        report: Some(json!({ "functions": ok })),
    }
}

enum InvarianceRun {
    Done(SuiteOutcome),
    NoRegularPoint,
    Usage(String),
}

fn run_invariance_suite(
    f_text: Option<&str>,
    order: u8,
    samples: u32,
    tol: f64,
    seed: u64,
) -> InvarianceRun {
    let Some(text) = f_text else {
        return InvarianceRun::Usage("the invariance suite requires --f".into());
    };
    if !(2..=4).contains(&order) {
        return InvarianceRun::Usage(format!(
            "the invariance suite checks jet orders 2..=4, got --order {order}"
        ));
    }
    if samples == 0 {
        return InvarianceRun::Usage("--samples must be positive".into());
    }
    let f = match parse_rhs(text) {
        Ok(f) => f,
        Err(msg) => return InvarianceRun::Usage(msg),
    };
    let report: InvarianceReport = match invariance_test(&f, order, samples, seed) {
        Ok(r) => r,
        Err(HarnessError::NoRegularPoint) => return InvarianceRun::NoRegularPoint,
    };
    let pass = report.failures.is_empty() && report.max_rel_error <= tol;
    InvarianceRun::Done(SuiteOutcome {
        name: "invariance",
        pass,
        detail: format!(
            "{} samples, max rel error {:.3e}",
            report.samples, report.max_rel_error
        ),
        report: Some(serde_json::to_value(&report).expect("report serializes")),
    })
}

fn cmd_check(
    suite: Suite,
    f_text: Option<&str>,
    order: u8,
    samples: u32,
    tol: f64,
    seed_flag: Option<u64>,
    format: Format,
) -> i32 {
    let seed = match resolve_seed(seed_flag) {
        Ok(s) => s,
        Err(msg) => return usage_error(&msg),
    };
    let mut outcomes: Vec<SuiteOutcome> = Vec::new();
    if matches!(suite, Suite::Phantom | Suite::All) {
        outcomes.push(run_phantom_suite());
    }
    if matches!(suite, Suite::Recurrence | Suite::All) {
        outcomes.push(run_recurrence_suite());
    }
    if matches!(suite, Suite::Commutator | Suite::All) {
        outcomes.push(run_commutator_suite());
    }
    if matches!(suite, Suite::Invariance) || (matches!(suite, Suite::All) && f_text.is_some()) {
        match run_invariance_suite(f_text, order, samples, tol, seed) {
            InvarianceRun::Done(o) => outcomes.push(o),
            InvarianceRun::NoRegularPoint => {
                eprintln!("error: no regular point found for --f; the right-hand side may be ultra-singular");
                return EXIT_DEGENERATE;
            }
            InvarianceRun::Usage(msg) => return usage_error(&msg),
        }
    }
    let all_pass = outcomes.iter().all(|o| o.pass);
    match format {
        Format::Json => {
            let suites: Vec<Value> = outcomes
                .iter()
                .map(|o| {
                    let mut entry = json!({
                        "name": o.name,
                        "pass": o.pass,
                        "detail": o.detail,
                    });
                    if let Some(r) = &o.report {
                        entry["report"] = r.clone();
                    }
                    entry
                })
                .collect();
            let doc = json!({
                "schema": "invforge.check/1",
                "seed": seed,
                "order": order,
                "samples": samples,
                "tol": tol,
                "suites": suites,
                "pass": all_pass,
            });
            emit!("{}", serde_json::to_string_pretty(&doc).expect("serializes"));
        }
        Format::Plain | Format::Latex => {
            for o in &outcomes {
                let verdict = if o.pass { "pass" } else { "FAIL" };
                emit!("{}: {verdict} ({})", o.name, o.detail);
            }
        }
    }
    if all_pass {
        EXIT_OK
    } else {
        EXIT_FAIL
    }
}

fn cmd_classify(f_text: &str, point_text: &str, format: Format) -> i32 {
    let f = match parse_rhs(f_text) {
        Ok(f) => f,
        Err(msg) => return usage_error(&msg),
    };
    let (u0, v0) = match parse_point(point_text) {
        Ok(p) => p,
        Err(msg) => return usage_error(&msg),
    };
    let class = match classify(&f, &u0, &v0) {
        Ok(c) => c,
        Err(KernelError::NumericDomain(_)) => {
            return usage_error(&format!("{f_text:?} is not defined at the point {point_text}"));
        }
        Err(e) => return usage_error(&e.to_string()),
    };
    match format {
        Format::Json => {
            let doc = json!({
                "schema": "invforge.classify/1",
                "tag": class.tag.as_str(),
                "W": class.w,
                "S": class.s,
                "exact": class.exact,
            });
            emit!("{}", serde_json::to_string_pretty(&doc).expect("serializes"));
        }
        Format::Plain | Format::Latex => {
            emit!("{}", class.tag.as_str());
            emit!("W = {}", class.w);
            emit!("S = {}", class.s);
        }
    }
    EXIT_OK
}

fn cmd_equiv(
    f1_text: &str,
    f2_text: &str,
    samples: u32,
    tol: f64,
    seed_flag: Option<u64>,
    format: Format,
) -> i32 {
    let seed = match resolve_seed(seed_flag) {
        Ok(s) => s,
        Err(msg) => return usage_error(&msg),
    };
    if samples == 0 {
        return usage_error("--samples must be positive");
    }
    let f1 = match parse_rhs(f1_text) {
        Ok(f) => f,
        Err(msg) => return usage_error(&msg),
    };
    let f2 = match parse_rhs(f2_text) {
        Ok(f) => f,
        Err(msg) => return usage_error(&msg),
    };
    let report = match equivalence_necessary(&f1, &f2, samples, tol, seed) {
        Ok(r) => r,
        Err(HarnessError::NoRegularPoint) => {
            eprintln!("error: no regular signature points on at least one side");
            return EXIT_DEGENERATE;
        }
    };
    match format {
        Format::Json => {
            let doc = json!({
                "schema": "invforge.equiv/1",
                "verdict": report.verdict.as_str(),
                "gapForward": report.gap_forward,
                "gapBackward": report.gap_backward,
                "thresholdForward": report.threshold_forward,
                "thresholdBackward": report.threshold_backward,
                "scale": report.scale,
                "resolution": report.resolution,
                "kept": report.kept,
                "samples": samples,
                "seed": seed,
            });
            emit!("{}", serde_json::to_string_pretty(&doc).expect("serializes"));
        }
        Format::Plain | Format::Latex => {
            emit!("verdict: {}", report.verdict.as_str());
            emit!(
                "gap: forward {:.3e} (threshold {:.3e}), backward {:.3e} (threshold {:.3e})",
                report.gap_forward,
                report.threshold_forward,
                report.gap_backward,
                report.threshold_backward
            );
            emit!(
                "signatures kept: {} and {} of {samples}; scale {:.3e}; resolution {:.3e} / {:.3e}",
                report.kept[0],
                report.kept[1],
                report.scale,
                report.resolution[0],
                report.resolution[1]
            );
        }
    }
    match report.verdict {
        EquivVerdict::Consistent => EXIT_OK,
        EquivVerdict::Inequivalent => EXIT_FAIL,
        EquivVerdict::Inconclusive => EXIT_DEGENERATE,
    }
}

/// Schema documents for every JSON output shape, keyed by versioned id.
fn schemas() -> Value {
    let expr = json!({
        "description": "expression tree; nodes are tagged objects",
        "type": "object",
    });
    json!({
        "invforge.invariants/1": {
            "type": "object",
            "required": ["schema", "order", "explicit", "basis"],
            "properties": {
                "schema": { "const": "invforge.invariants/1" },
                "order": { "type": "integer", "minimum": 2 },
                "explicit": { "type": "boolean" },
                "basis": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["label", "latex", "order", "base"],
                        "properties": {
                            "label": { "type": "string" },
                            "latex": { "type": "string" },
                            "order": { "type": "integer" },
                            "base": { "type": "array", "items": { "type": "integer" } },
                            "plain": { "type": "string" },
                            "expr": expr,
                        },
                    },
                },
            },
        },
        "invforge.frame/1": {
            "type": "object",
            "required": ["schema", "order", "entries"],
            "properties": {
                "schema": { "const": "invforge.frame/1" },
                "order": { "type": "integer", "minimum": 2 },
                "entries": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["symbol", "latex", "plain", "expr"],
                        "properties": {
                            "symbol": { "type": "string" },
                            "latex": { "type": "string" },
                            "plain": { "type": "string" },
                            "expr": expr,
                        },
                    },
                },
            },
        },
        "invforge.check/1": {
            "type": "object",
            "required": ["schema", "seed", "order", "samples", "tol", "suites", "pass"],
            "properties": {
                "schema": { "const": "invforge.check/1" },
                "seed": { "type": "integer" },
                "order": { "type": "integer" },
                "samples": { "type": "integer" },
                "tol": { "type": "number" },
                "pass": { "type": "boolean" },
                "suites": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["name", "pass", "detail"],
                        "properties": {
                            "name": { "type": "string" },
                            "pass": { "type": "boolean" },
                            "detail": { "type": "string" },
                            "report": { "type": "object" },
                        },
                    },
                },
            },
        },
        "invforge.invariance-report/1": {
            "description": "the `report` object of the invariance suite",
            "type": "object",
            "required": ["samples", "maxRelError", "failures"],
            "properties": {
                "samples": { "type": "integer" },
                "maxRelError": { "type": "number" },
                "failures": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["f", "point", "group", "invariant", "lhs", "rhs"],
                    },
                },
            },
        },
        "invforge.classify/1": {
            "type": "object",
            "required": ["schema", "tag", "W", "S", "exact"],
            "properties": {
                "schema": { "const": "invforge.classify/1" },
                "tag": { "enum": ["regular", "singular", "ultra-singular"] },
                "W": { "type": "number" },
                "S": { "type": "number" },
                "exact": { "type": "boolean" },
            },
        },
        "invforge.equiv/1": {
            "type": "object",
            "required": [
                "schema", "verdict", "gapForward", "gapBackward", "thresholdForward",
                "thresholdBackward", "scale", "resolution", "kept", "samples", "seed"
            ],
            "properties": {
                "schema": { "const": "invforge.equiv/1" },
                "verdict": { "enum": ["consistent", "inequivalent", "inconclusive"] },
                "gapForward": { "type": "number" },
                "gapBackward": { "type": "number" },
                "thresholdForward": { "type": "number" },
                "thresholdBackward": { "type": "number" },
                "scale": { "type": "number" },
                "resolution": { "type": "array", "items": { "type": "number" } },
                "kept": { "type": "array", "items": { "type": "integer" } },
                "samples": { "type": "integer" },
                "seed": { "type": "integer" },
            },
        },
        "invforge.expr/1": expr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::One;

    #[test]
    fn rational_parsing_covers_the_documented_forms() {
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        assert_eq!(parse_rational("1/2"), Some(half.clone()));
        assert_eq!(parse_rational("0.5"), Some(half.clone()));
        assert_eq!(parse_rational("-0.5"), Some(-half.clone()));
        assert_eq!(parse_rational("-3/2"), Some(-(half * BigRational::from(BigInt::from(3)))));
        assert_eq!(parse_rational("4"), Some(BigRational::from(BigInt::from(4))));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
        assert_eq!(parse_rational("1.2.3"), None);
    }

    #[test]
    fn point_parsing_splits_on_the_comma() {
        let (u, v) = parse_point(" 1 , -1/2 ").unwrap();
        assert!(u.is_one());
        assert_eq!(v, BigRational::new(BigInt::from(-1), BigInt::from(2)));
        assert!(parse_point("1").is_err());
        assert!(parse_point("1,b").is_err());
    }

    #[test]
    fn schema_document_lists_every_output_shape() {
        let doc = schemas();
        let keys: Vec<&str> = doc.as_object().unwrap().keys().map(|k| k.as_str()).collect();
        assert_eq!(
            keys,
            [
                "invforge.check/1",
                "invforge.classify/1",
                "invforge.equiv/1",
                "invforge.expr/1",
                "invforge.frame/1",
                "invforge.invariance-report/1",
                "invforge.invariants/1",
            ]
        );
    }

    #[test]
    fn symbolic_suites_pass() {
        assert!(run_phantom_suite().pass);
        assert!(run_commutator_suite().pass);
    }
}
