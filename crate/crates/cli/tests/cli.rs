use std::process::{Command, Output};

use gnes_core::homogeneous::mode_solution;
use gnes_core::numeric_verify::verify_mode;
use gnes_core::particular_solver::SolveOptions;
use gnes_core::source_terms::{Normalization, Params};
use serde_json::Value;

fn gnes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gnes")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn doc(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

const SOLVE_12: &[&str] = &["solve", "--alpha", "3/2", "--beta", "3/2", "--lambda", "30", "--n1", "1", "--n2", "2"];

#[test]
fn solve_reports_q_tables_and_alpha() {
    let o = gnes(SOLVE_12);
    assert_eq!(code(&o), 0);
    let d = doc(&o);
    assert_eq!(d["schema"], "gnes.solve/1");
    assert_eq!(d["status"], "solved");
    assert_eq!(d["solution"]["particular"]["kernel_dim"], 0);
    assert!(d["solution"]["particular"]["solution"].is_object());
    assert!(d["alpha_numeric"].as_f64().unwrap().is_finite());
}

#[test]
fn output_is_deterministic_with_seventeen_digit_floats() {
    let a = gnes(SOLVE_12);
    let b = gnes(SOLVE_12);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let line = text.lines().find(|l| l.contains("\"alpha_numeric\"")).unwrap();
    let number = line.split(':').nth(1).unwrap().trim().trim_end_matches(',');
    let mantissa = number.trim_start_matches('-').split('e').next().unwrap();
    assert_eq!(mantissa.replace('.', "").len(), 17, "{number}");
}

#[test]
fn verify_round_trip_reproduces_the_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("solution.json");
    let o = gnes(SOLVE_12);
    std::fs::write(&path, &o.stdout).unwrap();
    let v = gnes(&["verify", "--input", path.to_str().unwrap(), "--y", "0.5,1,2"]);
    assert_eq!(code(&v), 0, "{}", String::from_utf8_lossy(&v.stderr));
    let d = doc(&v);
    assert_eq!(d["status"], "pass");
    assert_eq!(d["exact_residual_zero"], true);

    let p = Params::new(3, 3, 5, Normalization::PaperC).unwrap();
    let direct = verify_mode(&mode_solution(&p, 1, 2, &SolveOptions::default()).unwrap(), &[0.5, 1.0, 2.0]).unwrap();
    let residuals: Vec<f64> = d["report"]["residuals"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(residuals, direct.residuals);
    assert_eq!(d["report"]["pass"], direct.pass);
}

/// Replace the first rational coefficient found under `v`.
fn corrupt_first_coeff(v: &mut Value) -> bool {
    match v {
        Value::Object(m) => {
            if let Some(Value::String(c)) = m.get_mut("coeff") {
                // append a digit to the numerator
                *c = c.replacen('/', "1/", 1);
                return true;
            }
            m.values_mut().any(corrupt_first_coeff)
        }
        Value::Array(a) => a.iter_mut().any(corrupt_first_coeff),
        _ => false,
    }
}

#[test]
fn verify_rejects_a_corrupted_particular_solution() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let mut d = doc(&gnes(SOLVE_12));
    assert!(corrupt_first_coeff(&mut d["solution"]["particular"]["solution"]));
    std::fs::write(&path, serde_json::to_string(&d).unwrap()).unwrap();
    let v = gnes(&["verify", "--input", path.to_str().unwrap()]);
    assert_eq!(code(&v), 7);
    let r = doc(&v);
    assert_eq!(r["status"], "fail");
    assert_eq!(r["exact_residual_zero"], false);
}

#[test]
fn verify_rejects_malformed_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.json");
    std::fs::write(&path, "{\"schema\": \"gnes.solve/1\", \"status\": \"no_solution_in_window\"}").unwrap();
    assert_eq!(code(&gnes(&["verify", "--input", path.to_str().unwrap()])), 65);
    std::fs::write(&path, "not json").unwrap();
    assert_eq!(code(&gnes(&["verify", "--input", path.to_str().unwrap()])), 65);
    assert_eq!(code(&gnes(&["verify", "--input", dir.path().join("missing").to_str().unwrap()])), 65);
}

#[test]
fn exit_codes_for_non_existence_and_obstruction() {
    let base = ["solve", "--alpha", "3/2", "--beta", "3/2", "--n1", "1", "--n2", "2", "--lambda"];
    let run = |lambda: &str| gnes(&[&base[..], &[lambda]].concat());
    let o = run("10");
    assert_eq!(code(&o), 5);
    assert_eq!(doc(&o)["status"], "no_solution_in_window");
    assert_eq!(doc(&o)["classification"]["status"], "lambda_not_triangular");
    assert_eq!(code(&run("11")), 5);
    assert_eq!(code(&run("21/2")), 4);

    let o = gnes(&["solve", "--alpha", "3/2", "--beta", "3/2", "--lambda", "2", "--n1", "1", "--n2", "-1"]);
    assert_eq!(code(&o), 6);
    let d = doc(&o);
    assert_eq!(d["status"], "obstructed");
    assert_eq!(d["solution"]["alpha"]["kind"], "obstructed");
    assert_eq!(d["solution"]["alpha"]["leading"]["y_exp"], -1);
    assert_eq!(d["solution"]["alpha"]["leading"]["log_exp"], 1);

    let o = gnes(&["solve", "--alpha", "4/3", "--beta", "3/2", "--lambda", "30", "--n1", "1", "--n2", "2"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(code(&gnes(&["solve", "--alpha", "3/2", "--beta", "3/2", "--n1", "1", "--n2", "2"])), 64);
    assert_eq!(code(&gnes(&["solve", "--alpha", "x", "--beta", "3/2", "--lambda", "30", "--n1", "1", "--n2", "2"])), 64);
    assert_eq!(code(&gnes(&[&SOLVE_12[..], &["--normalization", "bogus"]].concat())), 64);
    assert_eq!(code(&gnes(&["frobnicate"])), 64);
    assert_eq!(code(&gnes(&["--help"])), 0);
}

#[test]
fn mode_sum_respects_the_worker_variable() {
    let args = ["solve", "--alpha", "3/2", "--beta", "3/2", "--r", "5", "--n", "1", "--cutoff", "12"];
    let run = |w: &str| Command::new(env!("CARGO_BIN_EXE_gnes")).args(args).env("GNES_WORKERS", w).output().unwrap();
    let (one, four) = (run("1"), run("4"));
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, four.stdout);
    let d = doc(&one);
    assert_eq!(d["schema"], "gnes.assembly/1");
    assert_eq!(d["assembly"]["summaries"].as_array().unwrap().len(), 25);
    assert_eq!(code(&run("many")), 64);
}

#[test]
fn table_reproduces_printed_entries() {
    let mu = gnes(&["table", "--alpha", "3/2", "--beta", "3/2", "--lambda", "30", "--mode=-1,1", "--mode=-2,2", "--mode=-3,3"]);
    assert_eq!(code(&mu), 0);
    assert_eq!(doc(&mu)["summary"]["equal"], 9);

    let eta = gnes(&["table", "--alpha", "3/2", "--beta", "5/2", "--lambda", "20", "--mode", "1,2"]);
    assert_eq!(code(&eta), 0);
    assert_eq!(doc(&eta)["status"], "equal");

    let nu = gnes(&["table", "--family", "three_seven_30"]);
    assert_eq!(code(&nu), 0);
    assert_eq!(doc(&nu)["summary"]["unequal"], 0);
}

#[test]
fn table_without_fixture_exits_8() {
    assert_eq!(code(&gnes(&["table", "--alpha", "5/2", "--beta", "7/2", "--lambda", "30"])), 8);
    assert_eq!(code(&gnes(&["table", "--family", "nope"])), 8);
    let list = doc(&gnes(&["table", "--list"]));
    assert_eq!(list["families"].as_array().unwrap().len(), 10);
}

#[test]
fn sums_gives_the_closed_form() {
    let o = gnes(&["sums", "--a", "2", "--b", "2", "--s", "8", "--partial", "2000"]);
    assert_eq!(code(&o), 0);
    let d = doc(&o);
    assert_eq!(d["value"], "143/58769550*pi^12");
    let exact = d["numeric"].as_f64().unwrap();
    let partial = d["partial_sum"]["value"].as_f64().unwrap();
    assert!((exact - 143.0 * std::f64::consts::PI.powi(12) / 58769550.0).abs() < 1e-14);
    assert!(((partial - exact) / exact).abs() < 1e-8);
    assert_eq!(code(&gnes(&["sums", "--a", "2", "--b", "2", "--s", "3"])), 65);
}

#[test]
fn combine_t_minus_2_passes_its_spot_check() {
    let o = gnes(&["combine", "--preset", "T-2", "--n1", "1", "--n2", "2"]);
    assert_eq!(code(&o), 0);
    let d = doc(&o);
    assert_eq!(d["spot_check"]["pass"], true);
    let keys: Vec<&String> = d["table"].as_object().unwrap().keys().collect();
    assert_eq!(keys, ["00", "01", "10", "11"]);
    assert_eq!(d["weights"].as_array().unwrap().len(), 2);
}

#[test]
fn latex_output() {
    let o = gnes(&[&SOLVE_12[..], &["--format", "latex"]].concat());
    assert_eq!(code(&o), 0);
    let t = String::from_utf8(o.stdout).unwrap();
    assert!(t.contains("\\alpha_{1,2} = "), "{t}");
    assert!(t.contains("K_0(2\\pi y) K_0(4\\pi y)"), "{t}");
    let s = gnes(&["sums", "--a", "2", "--b", "2", "--s", "8", "--format", "latex"]);
    assert!(String::from_utf8(s.stdout).unwrap().trim_end().ends_with("\\frac{143\\pi^{12}}{58769550}"));
}
