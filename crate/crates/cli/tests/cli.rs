use std::process::{Command, Output};

use serde_json::Value;

fn decadic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_decadic"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn doc(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON on stdout")
}

fn field(sol: &Value, key: &str) -> f64 {
    sol[key].as_f64().unwrap_or_else(|| panic!("{key} missing in {sol}"))
}

fn solutions(d: &Value) -> &Vec<Value> {
    d["solutions"].as_array().expect("solutions array")
}

fn cbrt192() -> f64 {
    192f64.cbrt()
}

#[test]
fn sturmian_doublet() {
    let o = decadic(&["sturmian", "--alpha", "2", "--beta", "0", "-N", "2"]);
    assert_eq!(code(&o), 0);
    let d = doc(&o);
    let ds: Vec<f64> = solutions(&d).iter().map(|s| field(s, "d")).collect();
    assert_eq!(ds, vec![-12.0, -4.0]);
    let fs: Vec<f64> = solutions(&d).iter().map(|s| field(s, "F")).collect();
    assert_eq!(fs, vec![-4.0, 4.0]);
    assert!(solutions(&d).iter().all(|s| s["validated"] == Value::Bool(true)));
    assert_eq!(d["spec"]["M"], 1);
}

#[test]
fn sturmian_without_real_couplings_exits_one() {
    let o = decadic(&["sturmian", "--alpha", "0", "--beta", "1", "-N", "2"]);
    assert_eq!(code(&o), 1);
    assert!(solutions(&doc(&o)).is_empty());
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["sturmian", "-N", "0"],
        vec!["sturmian", "-N", "65"],
        vec!["sturmian", "-N", "-3"],
        vec!["sturmian", "-N", "2", "--alpha", "abc"],
        vec!["sturmian", "-N", "2", "-M", "2"],
        vec!["sturmian"],
        vec!["energies", "-N", "3", "-M", "1"],
        vec!["coupled", "-N", "3", "-M", "1"],
        vec!["coupled", "-N", "1", "-M", "3"],
        vec!["energies", "-N", "3", "--rank-tol", "0"],
        vec!["energies", "-N", "3", "--real-tol", "-1"],
        vec!["sturmian", "-N", "2", "--alpha", "nan"],
        vec!["wedges"],
        vec!["wedges", "--degree", "3", "--delta", "4"],
        vec!["wedges", "--degree", "0"],
        vec!["wedges", "--delta", "-2"],
        vec!["shoot", "-N", "3"],
        vec!["shoot", "-N", "3", "--coupling", "0", "--epsilon", "0"],
        vec!["verify", "-N", "2", "--coupling", "1", "--h", "1"],
        vec!["frobnicate"],
        vec![],
    ] {
        let o = decadic(&args);
        assert_eq!(code(&o), 2, "{args:?}");
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(!err.is_empty() && !err.contains("panicked"), "{args:?}: {err}");
    }
}

#[test]
fn help_and_version_exit_zero() {
    let o = decadic(&["--help"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    for sub in ["sturmian", "energies", "coupled", "wedges", "shoot", "verify", "sweep"] {
        assert!(text.contains(sub), "{sub}");
    }
    let o = decadic(&["sweep", "--help"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("[default: 41]"));
    assert_eq!(code(&decadic(&["--version"])), 0);
}

#[test]
fn energies_of_the_triplet() {
    let o = decadic(&["energies", "--alpha", "0", "--beta", "0", "-N", "3"]);
    assert_eq!(code(&o), 0);
    let d = doc(&o);
    let es: Vec<f64> = solutions(&d).iter().map(|s| field(s, "E")).collect();
    assert_eq!(es.len(), 2);
    assert_eq!(es[0], 0.0);
    assert!((es[1] - cbrt192()).abs() < 1e-9);
    for s in solutions(&d) {
        let e = field(s, "E");
        assert!((field(s, "d") - e * e / 4.0).abs() <= 1e-11 * (1.0 + e * e));
    }
}

#[test]
fn energies_single_state() {
    // the upper sign E = +2β leaves only the zero vector
    let o = decadic(&["energies", "--beta", "1.5", "-N", "1"]);
    assert_eq!(code(&o), 0);
    let es: Vec<f64> = solutions(&doc(&o)).iter().map(|s| field(s, "E")).collect();
    assert_eq!(es, vec![-3.0]);
}

fn pairs(args: &[&str]) -> Vec<(f64, f64)> {
    let o = decadic(args);
    assert_eq!(code(&o), 0, "{args:?}");
    solutions(&doc(&o))
        .iter()
        .map(|s| (field(s, "E"), field(s, "d")))
        .collect()
}

#[test]
fn coupled_agrees_with_energies() {
    for (a, b) in [("0", "0"), ("1.25", "-0.5"), ("-2", "3")] {
        let common = ["--alpha", a, "--beta", b, "-N", "3"];
        let mut c = vec!["coupled"];
        c.extend(common);
        let mut e = vec!["energies"];
        e.extend(common);
        let (c, e) = (pairs(&c), pairs(&e));
        let dedup = |v: Vec<(f64, f64)>| {
            let mut out: Vec<(f64, f64)> = Vec::new();
            for p in v {
                if !out.iter().any(|q| (q.0 - p.0).abs() < 1e-8 && (q.1 - p.1).abs() < 1e-8) {
                    out.push(p);
                }
            }
            out
        };
        let (c, e) = (dedup(c), dedup(e));
        assert_eq!(c.len(), e.len(), "{a} {b}");
        for (x, y) in c.iter().zip(&e) {
            assert!((x.0 - y.0).abs() <= 1e-8 * (1.0 + y.0.abs()), "{x:?} {y:?}");
            assert!((x.1 - y.1).abs() <= 1e-8 * (1.0 + y.1.abs()), "{x:?} {y:?}");
        }
    }
}

#[test]
fn coupled_m3_origin() {
    let got = pairs(&["coupled", "-M", "3", "-N", "3"]);
    let want = [(-5.9634570, -3.1433388), (10.7320301, 10.1802579)];
    assert_eq!(got.len(), want.len());
    for (g, w) in got.iter().zip(want) {
        assert!((g.0 - w.0).abs() < 1e-6 && (g.1 - w.1).abs() < 1e-6, "{g:?}");
    }
}

#[test]
fn coupled_empty_result_exits_one() {
    let o = decadic(&[
        "coupled", "--alpha", "0.37", "--beta", "0.77", "-N", "4", "--residual-tol", "1e-300",
    ]);
    assert_eq!(code(&o), 1);
    assert!(solutions(&doc(&o)).iter().all(|s| s["validated"] == Value::Bool(false)));
}

#[test]
fn wedge_tables() {
    use std::f64::consts::PI;
    let o = decadic(&["wedges", "--degree", "3"]);
    assert_eq!(code(&o), 0);
    let d = doc(&o);
    assert_eq!(d["pairs"].as_array().unwrap().len(), 3);
    assert_eq!(d["sectors"].as_array().unwrap().len(), 6);

    let d = doc(&decadic(&["wedges", "--degree", "2"]));
    let want = [(-1.0, 1.0), (3.0, 5.0), (7.0, 9.0), (11.0, 13.0)];
    for (s, (lo, hi)) in d["sectors"].as_array().unwrap().iter().zip(want) {
        assert!((field(s, "lo") - lo * PI / 8.0).abs() < 1e-12);
        assert!((field(s, "hi") - hi * PI / 8.0).abs() < 1e-12);
    }

    let d = doc(&decadic(&["wedges", "--delta", "4"]));
    assert!((field(&d, "half_width") - PI / 12.0).abs() < 1e-12);
    assert!((field(&d["left"], "lo") + 3.0 * PI / 4.0).abs() < 1e-12);
}

#[test]
fn shooting_recovers_the_algebraic_root() {
    let d = format!("{}", cbrt192() * cbrt192() / 4.0);
    let o = decadic(&["shoot", "-M", "2", "-N", "3", "--coupling", &d, "--guess", "5.5"]);
    assert_eq!(code(&o), 0);
    let d = doc(&o);
    let s = &solutions(&d)[0];
    assert!((field(s, "E") - cbrt192()).abs() < 1e-6);
    assert_eq!(s["validated"], Value::Bool(true));
}

#[test]
fn shooting_sturmian_ground_state() {
    // M = 1, N = 1, alpha = beta = 0: d = 0 carries an exact state at E = 0
    let o = decadic(&["shoot", "-M", "1", "-N", "1", "--coupling", "0", "--guess", "0.3"]);
    assert_eq!(code(&o), 0);
    assert!(field(&solutions(&doc(&o))[0], "E").abs() < 1e-6);
}

#[test]
fn shooting_failure_exits_one() {
    let d = format!("{}", cbrt192() * cbrt192() / 4.0);
    let o = decadic(&["shoot", "-N", "3", "--coupling", &d, "--guess", "-40"]);
    assert_eq!(code(&o), 1);
    assert_eq!(solutions(&doc(&o))[0]["validated"], Value::Bool(false));
}

#[test]
fn verify_candidates() {
    let ok = decadic(&["verify", "--alpha", "2", "-N", "2", "--coupling", "-4", "--h", "1,0.5"]);
    assert_eq!(code(&ok), 0);
    let d = doc(&ok);
    assert_eq!(d["report"]["passed"], Value::Bool(true));
    assert_eq!(field(&d["report"], "ode_residual"), 0.0);

    let bad = decadic(&["verify", "--alpha", "2", "-N", "2", "--coupling", "-4.1", "--h", "1,0.5"]);
    assert_eq!(code(&bad), 1);
    assert_eq!(doc(&bad)["report"]["passed"], Value::Bool(false));
}

fn csv_rows(o: &Output) -> Vec<Vec<String>> {
    let text = String::from_utf8(o.stdout.clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("alpha,beta,n_real,validated"));
    lines.map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

#[test]
fn sweep_discriminant() {
    let o = decadic(&["sweep", "-M", "1", "-N", "2", "--alpha-steps", "9", "--beta-steps", "5"]);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&o);
    assert_eq!(rows.len(), 45);
    for r in rows {
        let (a, b): (f64, f64) = (r[0].parse().unwrap(), r[1].parse().unwrap());
        let n: usize = r[2].parse().unwrap();
        let disc = a * a - 4.0 * b;
        if disc > 0.0 {
            assert_eq!(n, 2, "{r:?}");
        } else if disc < 0.0 {
            assert_eq!(n, 0, "{r:?}");
        }
    }
}

#[test]
fn sweep_boundary_and_single_point() {
    let o = decadic(&[
        "sweep", "-N", "2", "--alpha-min", "2", "--alpha-max", "2", "--alpha-steps", "1",
        "--beta-min", "1", "--beta-max", "1", "--beta-steps", "1",
    ]);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&o);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][2], "2");
}

#[test]
fn sweep_rejects_bad_grids() {
    for extra in [
        vec!["--alpha-steps", "0"],
        vec!["--alpha-min", "3", "--alpha-max", "1"],
        vec!["-M", "3"],
        vec!["--beta-max", "inf"],
    ] {
        let mut args = vec!["sweep", "-N", "2"];
        args.extend(extra.iter().copied());
        assert_eq!(code(&decadic(&args)), 2, "{args:?}");
    }
}

#[test]
fn sweep_as_json() {
    let o = decadic(&[
        "sweep", "-M", "2", "-N", "2", "--alpha-steps", "3", "--beta-steps", "2", "--format", "json",
    ]);
    assert_eq!(code(&o), 0);
    let d = doc(&o);
    assert_eq!(d["rows"].as_array().unwrap().len(), 6);
}

#[test]
fn json_round_trips_byte_for_byte() {
    let d = format!("{}", cbrt192() * cbrt192() / 4.0);
    let runs: Vec<Vec<&str>> = vec![
        vec!["sturmian", "--alpha", "1.3", "--beta", "-0.7", "-N", "4"],
        vec!["energies", "-N", "3"],
        vec!["coupled", "-M", "3", "-N", "3"],
        vec!["wedges", "--degree", "5"],
        vec!["wedges", "--delta", "2.5"],
        vec!["shoot", "-N", "3", "--coupling", &d, "--guess", "5.5"],
        vec!["verify", "-N", "2", "--alpha", "2", "--coupling", "-4", "--h", "1,0.5"],
        vec!["sweep", "-N", "2", "--alpha-steps", "2", "--beta-steps", "2", "--format", "json"],
    ];
    for args in runs {
        let o = decadic(&args);
        assert_eq!(code(&o), 0, "{args:?}");
        let text = String::from_utf8(o.stdout.clone()).unwrap();
        let parsed: Value = serde_json::from_str(&text).unwrap();
        let mut again = serde_json::to_string_pretty(&parsed).unwrap();
        again.push('\n');
        assert_eq!(again, text, "{args:?}");
    }
}

#[test]
fn floats_use_twelve_digit_exponent_form() {
    let o = decadic(&["energies", "-N", "3"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("\"E\": 5.768998281230e+00"), "{text}");
    assert!(text.contains("\"rank\": 1.000000000000e-09"));
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let o = decadic(&["energies", "-N", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(written["solutions"].as_array().unwrap().len(), 2);

    let missing = dir.path().join("no/such/dir/out.json");
    let o = decadic(&["energies", "-N", "3", "--out", missing.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn deterministic_output() {
    let args = ["coupled", "--alpha", "0.5", "--beta", "-1.5", "-N", "4"];
    assert_eq!(decadic(&args).stdout, decadic(&args).stdout);
}
