//! The subcommands. Each returns a document for stdout and an exit code.

use std::io::Read;

use gnes_core::bessel_expr::{apply_mode_operator, BesselExpr};
use gnes_core::divisor_sums::{
    convolution_f64, convolution_partial_sum, in_convergence_region, ramanujan_convolution, ramanujan_log_convolution,
};
use gnes_core::fixtures::{compare_mode, families, family, family_for, Family, FixtureError, TableComparison};
use gnes_core::homogeneous::{
    assemble_mode, combine as combine_modes, mode_solution, t_minus_2, t_minus_2_unit, AlphaChoice, AssemblyOptions,
    HomError, ModeSolution,
};
use gnes_core::numeric_verify::{eval_f64, eval_expr, residual, verify_mode, RESIDUAL_TOLERANCE};
use gnes_core::particular_solver::{effective_r, solve_mode, Route, SolveError, SolveOptions, Windows};
use gnes_core::scalar_ring::{parse_rational, Rational};
use gnes_core::source_terms::{
    classify_params, source_term, twice_half_integer, Classification, Normalization, Params, SourceError,
};
use serde_json::{json, Value};

use crate::{json, tex, CliError, CombineArgs, Exit, Format, Output, Preset, RouteArg, SolveArgs, SolverFlags, SumsArgs, TableArgs, VerifyArgs};

pub const SOLVE_SCHEMA: &str = "gnes.solve/1";
pub const ASSEMBLY_SCHEMA: &str = "gnes.assembly/1";
pub const TABLE_SCHEMA: &str = "gnes.table/1";
pub const SUMS_SCHEMA: &str = "gnes.sums/1";
pub const COMBINE_SCHEMA: &str = "gnes.combine/1";
pub const VERIFY_SCHEMA: &str = "gnes.verify/1";

/// Environment variable holding the worker count for mode sums.
pub const WORKERS_ENV: &str = "GNES_WORKERS";

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("documents are serializable")
}

fn emit(doc: Value, exit: Exit) -> Result<Output, CliError> {
    Ok(Output { text: json::to_string(&doc), exit })
}

fn normalization(s: &str) -> Result<Normalization, CliError> {
    Normalization::parse(s).ok_or_else(|| CliError::usage(format!("unknown normalization {s:?}; use paper-c, curly-e or unit")))
}

fn solve_options(f: &SolverFlags) -> Result<SolveOptions, CliError> {
    let mut opts = SolveOptions::default();
    if let Some(w) = &f.window {
        let w: Windows = serde_json::from_str(w).map_err(|e| CliError::usage(format!("--window: {e}")))?;
        opts.window = Some(w);
    }
    if let Some(cap) = f.cap {
        opts.cap = cap;
    }
    opts.route = match f.route {
        RouteArg::Graded => Route::Graded,
        RouteArg::Ratpi => Route::RatPi,
    };
    Ok(opts)
}

fn workers() -> Result<Option<usize>, CliError> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(0) => Ok(None),
            Ok(n) => Ok(Some(n)),
            Err(_) => Err(CliError::usage(format!("{WORKERS_ENV}={s:?} is not a worker count"))),
        },
    }
}

fn rational_arg(flag: &str, s: &str) -> Result<Rational, CliError> {
    parse_rational(s).map_err(|e| CliError::usage(format!("--{flag} {s:?}: {e}")))
}

/// Map solver failures to exit codes; NoSolutionInWindow is handled by the caller.
fn solver_error(e: impl Into<HomError>) -> CliError {
    match e.into() {
        HomError::Solve(SolveError::Source(s @ SourceError::NoPaperConstant(..))) => CliError::usage(s.to_string()),
        e => CliError::internal(e),
    }
}

fn no_solution(e: &HomError) -> Option<Value> {
    match e {
        HomError::Solve(SolveError::NoSolutionInWindow { window, retries, inconsistent_rows }) => Some(json!({
            "last_window": to_value(window),
            "retries": retries,
            "inconsistent_rows": inconsistent_rows.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
        })),
        _ => None,
    }
}

pub fn solve(a: &SolveArgs) -> Result<Output, CliError> {
    let norm = normalization(&a.solver.normalization)?;
    let opts = solve_options(&a.solver)?;
    let alpha = rational_arg("alpha", &a.alpha)?;
    let beta = rational_arg("beta", &a.beta)?;
    let lambda = match (&a.lambda, a.r) {
        (Some(l), _) => rational_arg("lambda", l)?,
        (None, Some(r)) => Rational::from_integer((r as i64 * (r as i64 + 1)).into()),
        (None, None) => return Err(CliError::usage("give --lambda or --r")),
    };
    let mode = match (a.n1, a.n2, a.n, a.cutoff) {
        (Some(n1), Some(n2), None, None) => Mode::Single(n1, n2),
        (None, None, Some(n), Some(c)) => Mode::Sum(n, c),
        _ => return Err(CliError::usage("give either --n1 and --n2, or --n and --cutoff")),
    };
    let class = classify_params(&alpha, &beta, &lambda);
    let mut doc = json!({
        "schema": SOLVE_SCHEMA,
        "request": {
            "alpha": alpha.to_string(),
            "beta": beta.to_string(),
            "lambda": lambda.to_string(),
            "normalization": to_value(&norm),
            "mode": mode.to_value(),
        },
        "classification": to_value(&class),
    });
    let r = match class {
        Classification::NotHalfInteger => {
            doc["status"] = json!("not_half_integer");
            return emit(doc, Exit::NotHalfInteger);
        }
        Classification::LambdaNotTriangular => {
            let (a2, b2) = (twice_half_integer(&alpha).expect("classified"), twice_half_integer(&beta).expect("classified"));
            return non_triangular(doc, a2, b2, &lambda, norm, mode, opts);
        }
        Classification::Solvable { r } | Classification::OutsideConjecturedSet { r } => r,
    };
    let (a2, b2) = (twice_half_integer(&alpha).expect("classified"), twice_half_integer(&beta).expect("classified"));
    let p = Params::new(a2, b2, r, norm).map_err(|e| CliError::usage(e.to_string()))?;
    match mode {
        Mode::Single(n1, n2) => match mode_solution(&p, n1, n2, &opts) {
            Ok(sol) => {
                if a.format == Format::Latex {
                    return Ok(Output { text: tex::solution(&sol), exit: exit_for(&sol.alpha) });
                }
                let exit = exit_for(&sol.alpha);
                doc["status"] = json!(if sol.alpha.is_obstructed() { "obstructed" } else { "solved" });
                doc["alpha_numeric"] = json!(eval_f64(sol.alpha.value()));
                doc["solution"] = to_value(&sol);
                emit(doc, exit)
            }
            Err(e) => match no_solution(&e) {
                Some(info) => {
                    doc["status"] = json!("no_solution_in_window");
                    doc["failure"] = info;
                    emit(doc, Exit::NoSolutionInWindow)
                }
                None => Err(solver_error(e)),
            },
        },
        Mode::Sum(n, cutoff) => {
            let aopts = AssemblyOptions { solve: opts, workers: workers()? };
            match assemble_mode(&p, n, cutoff, &aopts) {
                Ok(asm) => {
                    let exit = if asm.obstructed { Exit::Obstructed } else { Exit::Ok };
                    if a.format == Format::Latex {
                        return Ok(Output { text: tex::assembly(&asm), exit });
                    }
                    doc["schema"] = json!(ASSEMBLY_SCHEMA);
                    doc["status"] = json!(if asm.obstructed { "obstructed" } else { "solved" });
                    doc["assembly"] = to_value(&asm);
                    emit(doc, exit)
                }
                Err(HomError::CutoffTooSmall) => Err(CliError::usage("--cutoff must exceed |n|")),
                Err(e) => match no_solution(&e) {
                    Some(info) => {
                        doc["schema"] = json!(ASSEMBLY_SCHEMA);
                        doc["status"] = json!("no_solution_in_window");
                        doc["failure"] = info;
                        emit(doc, Exit::NoSolutionInWindow)
                    }
                    None => Err(solver_error(e)),
                },
            }
        }
    }
}

#[derive(Clone, Copy)]
enum Mode {
    Single(i64, i64),
    Sum(i64, u32),
}

impl Mode {
    fn to_value(self) -> Value {
        match self {
            Mode::Single(n1, n2) => json!({ "n1": n1, "n2": n2 }),
            Mode::Sum(n, cutoff) => json!({ "n": n, "cutoff": cutoff }),
        }
    }
}

fn exit_for(alpha: &AlphaChoice) -> Exit {
    if alpha.is_obstructed() {
        Exit::Obstructed
    } else {
        Exit::Ok
    }
}

/// lambda not of the form r(r+1): attempt the particular solve anyway so the
/// report shows where the ansatz fails.
fn non_triangular(
    mut doc: Value,
    a2: u32,
    b2: u32,
    lambda: &Rational,
    norm: Normalization,
    mode: Mode,
    mut opts: SolveOptions,
) -> Result<Output, CliError> {
    let lam = lambda.is_integer().then(|| lambda.to_integer().try_into().ok()).flatten();
    let (Some(lam), Mode::Single(n1, n2)) = (lam, mode) else {
        doc["status"] = json!("lambda_not_triangular");
        doc["note"] = json!("no solve attempted: mode sums and non-integer eigenvalues need lambda = r(r+1)");
        return emit(doc, Exit::LambdaNotTriangular);
    };
    let p = Params::new(a2, b2, effective_r(lam).max(1) as u32, norm).map_err(|e| CliError::usage(e.to_string()))?;
    opts.lambda = Some(lam);
    match solve_mode(&p, n1, n2, &opts) {
        Ok(sol) => {
            doc["status"] = json!("lambda_not_triangular");
            doc["note"] = json!("a particular solution exists for this mode; no homogeneous coefficient is defined");
            doc["particular"] = to_value(&sol);
            emit(doc, Exit::LambdaNotTriangular)
        }
        Err(e) => {
            let e = HomError::from(e);
            match no_solution(&e) {
                Some(info) => {
                    doc["status"] = json!("no_solution_in_window");
                    doc["failure"] = info;
                    emit(doc, Exit::NoSolutionInWindow)
                }
                None => Err(solver_error(e)),
            }
        }
    }
}

fn parse_mode(s: &str) -> Result<(i64, i64), CliError> {
    let bad = || CliError::usage(format!("--mode {s:?}: expected n1,n2"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn fixture_error(e: FixtureError) -> CliError {
    match e {
        FixtureError::NoFixture(m) => CliError::new(Exit::NoFixture, format!("no printed table for {m}")),
        e => CliError::internal(e),
    }
}

fn resolve_family(a: &TableArgs) -> Result<Family, CliError> {
    match (&a.family, &a.alpha, &a.beta, a.lambda) {
        (Some(id), ..) => family(id).map_err(fixture_error),
        (None, Some(al), Some(be), Some(l)) => {
            let p = Params::parse(al, be, l, normalization(&a.solver.normalization)?).map_err(|e| {
                CliError::new(Exit::NoFixture, format!("no printed table for alpha={al} beta={be} lambda={l}: {e}"))
            })?;
            family_for(&p).map_err(fixture_error)
        }
        _ => Err(CliError::usage("give --family, or --alpha, --beta and --lambda")),
    }
}

pub fn table(a: &TableArgs) -> Result<Output, CliError> {
    if a.list {
        let fams = families().map_err(CliError::internal)?;
        let list: Vec<Value> = fams
            .iter()
            .map(|f| json!({ "id": f.id, "params": to_value(&f.params), "cases": f.tables.iter().map(|t| to_value(&t.case)).collect::<Vec<_>>() }))
            .collect();
        return emit(json!({ "schema": TABLE_SCHEMA, "families": list }), Exit::Ok);
    }
    let fam = resolve_family(a)?;
    let opts = solve_options(&a.solver)?;
    let modes: Vec<(i64, i64)> = if a.modes.is_empty() {
        fam.tables.iter().flat_map(|t| Family::modes(t.case)).collect()
    } else {
        a.modes.iter().map(|m| parse_mode(m)).collect::<Result<_, _>>()?
    };
    let comparisons: Vec<TableComparison> =
        modes.iter().map(|&(n1, n2)| compare_mode(&fam, n1, n2, &opts)).collect::<Result<_, _>>().map_err(fixture_error)?;
    let entries: Vec<_> = comparisons.iter().flat_map(|c| &c.entries).collect();
    let equal = entries.iter().filter(|e| e.verdict == gnes_core::fixtures::EntryVerdict::Equal).count();
    let agree = entries.iter().filter(|e| e.verdict.is_equal()).count();
    let ok = agree == entries.len();
    let doc = json!({
        "schema": TABLE_SCHEMA,
        "family": fam.id,
        "params": to_value(&fam.params),
        "status": if ok { "equal" } else { "mismatch" },
        "summary": {
            "modes": comparisons.len(),
            "entries": entries.len(),
            "equal": equal,
            "equal_corrected": agree - equal,
            "unequal": entries.len() - agree,
        },
        "comparisons": to_value(&comparisons),
    });
    emit(doc, if ok { Exit::Ok } else { Exit::Failed })
}

pub fn sums(a: &SumsArgs) -> Result<Output, CliError> {
    let v = if a.log { ramanujan_log_convolution(a.a, a.b, a.s) } else { ramanujan_convolution(a.a, a.b, a.s) }
        .map_err(|e| CliError::data(e.to_string()))?;
    if a.format == Format::Latex {
        return Ok(Output { text: tex::sums(a.a, a.b, a.s, a.log, v.value.as_ref()), exit: Exit::Ok });
    }
    let mut doc = json!({
        "schema": SUMS_SCHEMA,
        "a": a.a,
        "b": a.b,
        "s": a.s,
        "log": a.log,
        "convergent": in_convergence_region(a.a, a.b, a.s),
        "formal": v.formal,
        "value": v.value.as_ref().map(|c| c.to_string()),
        "latex": v.value.as_ref().map(|c| c.to_latex()),
        "exact": to_value(&v.value),
        "numeric": convolution_f64(&v),
    });
    if let Some(n_max) = a.partial {
        let partial = convolution_partial_sum(a.a, a.b, a.s, a.log as u32, n_max);
        doc["partial_sum"] = json!({ "n_max": n_max, "value": partial });
    }
    emit(doc, Exit::Ok)
}

/// Table entries keyed as in the printed tables, double modes folded.
pub fn table_entries(e: &BesselExpr) -> Vec<(String, gnes_core::bessel_expr::YLaurent)> {
    match e {
        BesselExpr::Pure { f } => vec![("f".into(), f.clone())],
        BesselExpr::Single(s) => vec![("0".into(), s.p[0].clone()), ("1".into(), s.p[1].clone())],
        BesselExpr::Double(d) => {
            let d = d.clone().fold();
            (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| (format!("{i}{j}"), d.q[i][j].clone())).collect()
        }
    }
}

fn check_points(ys: &[f64]) -> Result<(), CliError> {
    if ys.is_empty() || ys.iter().any(|y| !(y.is_finite() && *y > 0.0)) {
        return Err(CliError::usage("--y needs positive values"));
    }
    Ok(())
}

pub fn combine(a: &CombineArgs) -> Result<Output, CliError> {
    check_points(&a.y)?;
    let (entries, unit, name) = match a.preset {
        Preset::TMinus2 => (t_minus_2(), t_minus_2_unit(a.n1, a.n2).map_err(CliError::internal)?, "T-2"),
    };
    let opts = SolveOptions::default();
    let c = combine_modes(&entries, a.n1, a.n2, &opts).map_err(solver_error)?;
    let table = c.table(&unit).map_err(CliError::internal)?;
    let residuals: Vec<Vec<f64>> = c
        .entries
        .iter()
        .map(|(_, m)| a.y.iter().map(|&y| residual(m, y).unwrap_or(f64::INFINITY)).collect())
        .collect();
    let pass = residuals.iter().flatten().all(|r| *r <= RESIDUAL_TOLERANCE);
    let exit = if pass { Exit::Ok } else { Exit::Failed };
    if a.format == Format::Latex {
        return Ok(Output { text: tex::combination(name, &c, &unit, &table), exit });
    }
    let table_doc: serde_json::Map<String, Value> = table_entries(&table)
        .into_iter()
        .map(|(k, p)| {
            let values: Vec<f64> = a.y.iter().map(|&y| p.eval(y, &eval_f64)).collect();
            (k, json!({ "text": p.to_string(), "latex": p.to_latex(), "values": values }))
        })
        .collect();
    let doc = json!({
        "schema": COMBINE_SCHEMA,
        "preset": name,
        "mode": [a.n1, a.n2],
        "weights": c.entries.iter().map(|(w, m)| json!({ "weight": w.to_string(), "params": to_value(m.params()) })).collect::<Vec<_>>(),
        "unit": unit.to_string(),
        "y_points": a.y,
        "table": table_doc,
        "particular_values": a.y.iter().map(|&y| eval_expr(&c.particular, y)).collect::<Vec<_>>(),
        "homogeneous": c.homogeneous.iter().map(|(b, w)| json!({ "basis": b.to_latex(), "coefficient": w.to_string() })).collect::<Vec<_>>(),
        "free_constants": c.free_constants,
        "spot_check": {
            "tolerance": RESIDUAL_TOLERANCE,
            "component_residuals": residuals,
            "pass": pass,
        },
    });
    emit(doc, exit)
}

fn read_input(path: &str) -> Result<String, CliError> {
    let mut s = String::new();
    let res = if path == "-" {
        std::io::stdin().read_to_string(&mut s).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| s = t)
    };
    res.map_err(|e| CliError::data(format!("{path}: {e}")))?;
    Ok(s)
}

/// The mode solution held by a `solve` document, or a bare solution.
fn extract_solution(v: Value) -> Result<ModeSolution, CliError> {
    let sol = match v.get("schema").and_then(Value::as_str) {
        Some(SOLVE_SCHEMA) => v.get("solution").cloned().ok_or_else(|| {
            CliError::data(format!("document has status {} and holds no solution", v.get("status").unwrap_or(&Value::Null)))
        })?,
        Some(other) => return Err(CliError::data(format!("cannot verify a {other} document"))),
        None => v,
    };
    serde_json::from_value(sol).map_err(|e| CliError::data(format!("not a mode solution: {e}")))
}

pub fn verify(a: &VerifyArgs) -> Result<Output, CliError> {
    check_points(&a.y)?;
    let text = read_input(&a.input)?;
    let v: Value = serde_json::from_str(&text).map_err(|e| CliError::data(format!("{}: {e}", a.input)))?;
    let sol = extract_solution(v)?;
    let (n1, n2) = sol.mode();
    let src = source_term(sol.params(), n1, n2).map_err(|e| CliError::data(e.to_string()))?.expr();
    let exact = apply_mode_operator(sol.particular.lambda, &sol.particular.particular())
        .sub(&src)
        .map(|d| d.is_zero())
        .map_err(|e| CliError::data(e.to_string()))?;
    let report = verify_mode(&sol, &a.y).map_err(|e| CliError::data(e.to_string()))?;
    let pass = report.pass && exact;
    let doc = json!({
        "schema": VERIFY_SCHEMA,
        "params": to_value(sol.params()),
        "mode": [n1, n2],
        "tolerance": RESIDUAL_TOLERANCE,
        "exact_residual_zero": exact,
        "report": to_value(&report),
        "status": if pass { "pass" } else { "fail" },
    });
    emit(doc, if pass { Exit::Ok } else { Exit::Failed })
}
