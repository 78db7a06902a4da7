use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use qeci::channels::{depolarizing_mixture, qsc_computational};
use qeci::io::density_to_json;
use qeci::{validate_density, ComplexMatrix};
use tempfile::TempDir;

fn qeci() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qeci"));
    cmd.env_remove("QECI_TOL");
    cmd
}

fn run(args: &[&str]) -> Output {
    qeci().args(args).output().unwrap()
}

fn run_with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = qeci()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn diag_file(diag: &[f64]) -> String {
    let n = diag.len();
    let rows: Vec<String> = (0..n)
        .map(|i| {
            let cells: Vec<String> =
                (0..n).map(|j| format!("[{}, 0]", if i == j { diag[i] } else { 0.0 })).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("{{\"dims\": [2, 2], \"matrix\": [{}]}}", rows.join(", "))
}

#[test]
fn infer_worked_example() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "qsc.json", &density_to_json(&qsc_computational(0.4, 0.05).unwrap()));
    let o = run(&["infer", "--input", s(&f)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().next().unwrap(), "A->B  S(A->B)=1.2573  S(A<-B)=1.4270");
}

#[test]
fn infer_json_record_is_one_line() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "qsc.json", &density_to_json(&qsc_computational(0.4, 0.05).unwrap()));
    let o = run(&["infer", "--input", s(&f), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 1);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["direction"], "A->B");
    assert!((v["s_forward"].as_f64().unwrap() - 1.2573475515706247).abs() < 1e-9);
}

#[test]
fn infer_product_state_ties() {
    let dir = TempDir::new().unwrap();
    // (0.3, 0.7) ⊗ (0.3, 0.7)
    let f = write(&dir, "product.json", &diag_file(&[0.09, 0.21, 0.21, 0.49]));
    let o = run(&["infer", "--input", s(&f)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("Tie  "), "{}", stdout(&o));
}

#[test]
fn infer_exit_codes() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "trace.json", &diag_file(&[0.2, 0.2, 0.2, 0.3]));
    let o = run(&["infer", "--input", s(&f)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("TraceNotOne"), "{}", stderr(&o));

    let f = write(&dir, "broken.json", "{\"dims\": [2, 2], \"matrix\": ");
    assert_eq!(run(&["infer", "--input", s(&f)]).status.code(), Some(2));
    assert_eq!(run(&["infer", "--input", "/nonexistent/x.json"]).status.code(), Some(2));
    assert_eq!(run(&["infer", "--input", s(&f), "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["infer"]).status.code(), Some(2));

    let f = write(&dir, "neg.json", &diag_file(&[1.1, -0.1, 0.0, 0.0]));
    let o = run(&["infer", "--input", s(&f)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("NotPSD"), "{}", stderr(&o));
}

#[test]
fn tolerance_comes_from_environment() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "loose.json", &diag_file(&[0.25, 0.25, 0.25, 0.2500001]));
    assert_eq!(run(&["infer", "--input", s(&f)]).status.code(), Some(3));
    let o = qeci().env("QECI_TOL", "1e-6").args(["infer", "--input", s(&f)]).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(run(&["infer", "--input", s(&f), "--tol", "1e-6"]).status.code(), Some(0));
}

#[test]
fn sweep_gqsc_grid() {
    let o = run(&["sweep", "--channel", "gqsc", "--q", "0.4", "--p-start", "0.05", "--p-end", "0.95", "--steps", "19"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "p,s_forward,s_backward,delta,direction");
    assert_eq!(lines.len(), 20);
    assert!(lines[1].starts_with("0.05,"));
    assert!(lines[19].starts_with("0.95,"));
    for line in &lines[1..] {
        let fields: Vec<&str> = line.split(',').collect();
        let expected = if fields[0] == "0.5" { "Tie" } else { "A->B" };
        assert_eq!(fields[4], expected, "{line}");
    }
    assert!(!out.contains('\r'));
}

#[test]
fn sweep_single_point_tie() {
    let o = run(&["sweep", "--channel", "gqsc", "--q", "0.4", "--p-start", "0.5", "--p-end", "0.5", "--steps", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "0.5");
    assert_eq!(row[4], "Tie");
    for f in &row[1..3] {
        assert!((f.parse::<f64>().unwrap() - 1.97).abs() < 0.02);
    }
}

#[test]
fn sweep_writes_byte_stable_files_and_flags_endpoints() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |out: &Path| {
        vec![
            "sweep".to_string(), "--channel".into(), "depolarizing".into(), "--q".into(), "0.4".into(),
            "--p-start".into(), "0".into(), "--p-end".into(), "1".into(), "--steps".into(), "21".into(),
            "--out".into(), out.to_str().unwrap().into(),
        ]
    };
    let o = qeci().args(args(&a)).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("p=0 "));
    assert!(stderr(&o).contains("p=1 "));
    assert!(stdout(&o).is_empty());
    qeci().args(args(&b)).output().unwrap();
    let (a, b) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(a, b);
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 22);
}

#[test]
fn sweep_rejects_bad_flags() {
    let base = ["sweep", "--channel", "qsc", "--p-start", "0.1", "--p-end", "0.9"];
    let with = |extra: &[&str]| {
        let mut v: Vec<&str> = base.to_vec();
        v.extend_from_slice(extra);
        run(&v).status.code()
    };
    assert_eq!(with(&["--steps", "5", "--q", "1.5"]), Some(2));
    assert_eq!(with(&["--steps", "0"]), Some(2));
    assert_eq!(with(&["--steps", "1"]), Some(2));
    assert_eq!(with(&["--steps", "5", "--channel", "nope"]), Some(2));
    assert_eq!(
        run(&["sweep", "--channel", "depolarizing", "--p-start", "0.1", "--p-end", "0.9", "--steps", "3", "--gamma1", "0.5"]).status.code(),
        Some(2)
    );
    assert_eq!(with(&["--steps", "5"]), Some(0));
}

#[test]
fn coupling_examples() {
    let dir = TempDir::new().unwrap();
    let cases = [
        ("[[0.05, 0.95], [0.05, 0.95]]", "entropy 0.2864 bits"),
        ("[[1, 0], [0.3, 0.7]]", "entropy 0.8813 bits"),
        ("[[0.5, 0.5], [0.5, 0.5], [0.5, 0.5]]", "entropy 1.0000 bits"),
    ];
    for (text, expected) in cases {
        let f = write(&dir, "m.json", text);
        let o = run(&["coupling", "--marginals", s(&f)]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let out = stdout(&o);
        assert_eq!(out.lines().last().unwrap(), expected);
        assert!(out.contains("placement ("));
    }
    let f = write(&dir, "bad.json", "[[0.5, 0.4], [0.5, 0.5]]");
    assert_eq!(run(&["coupling", "--marginals", s(&f)]).status.code(), Some(3));
    let f = write(&dir, "one.json", "[[0.5, 0.5]]");
    assert_eq!(run(&["coupling", "--marginals", s(&f)]).status.code(), Some(3));
    let f = write(&dir, "junk.json", "[[0.5, \"x\"]]");
    assert_eq!(run(&["coupling", "--marginals", s(&f)]).status.code(), Some(2));
}

#[test]
fn embed_then_infer() {
    let dir = TempDir::new().unwrap();
    let table = write(&dir, "t.csv", "b0,b1\n0.0625,0.1875\n0.3125,0.4375\n");
    let o = run(&["map-classical", "--input", s(&table), "--mode", "embed"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let file: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(file["dims"], serde_json::json!([2, 2]));
    assert_eq!(file["matrix"][3][3][0].as_f64().unwrap(), 0.4375);
    assert_eq!(file["matrix"][0][1][0].as_f64().unwrap(), 0.0);

    let rho = write(&dir, "rho.json", &stdout(&o));
    let o = run(&["infer", "--input", s(&rho)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn rotate_diagonal_density() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "d.json", &diag_file(&[0.5, 0.1, 0.15, 0.25]));
    let o = run(&["map-classical", "--input", s(&f), "--mode", "rotate"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "b0,b1\n0.5,0.1\n0.15,0.25\n");
}

#[test]
fn rotated_depolarizing_table_piped_to_classical_inference() {
    let rho = depolarizing_mixture(0.4, (0.6, 0.8), (0.5f64.sqrt(), 0.5f64.sqrt()), 0.3).unwrap();
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "dep.json", &density_to_json(&rho));
    let o = run(&["map-classical", "--input", s(&f), "--mode", "rotate"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = run_with_stdin(&["infer", "--input", "-"], &stdout(&o));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("B->A  "), "{}", stdout(&o));
}

#[test]
fn mismatched_map_input_is_a_parse_error() {
    let dir = TempDir::new().unwrap();
    let table = write(&dir, "t.csv", "b0,b1\n0.5,0.5\n");
    assert_eq!(run(&["map-classical", "--input", s(&table), "--mode", "rotate"]).status.code(), Some(2));
}

#[test]
fn demo_trace() {
    let o = run(&["demo", "worked-example"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let line = |n: usize| -> Vec<&str> {
        let prefix = format!("{n:>2}. ");
        out.lines().filter(|l| l.starts_with(&prefix)).collect()
    };
    assert!(line(8)[0].contains("[0.9500 0.0000; 0.0000 0.0500]"));
    assert!(line(22)[0].contains("0.4505"));
    assert!(out.lines().last().unwrap().ends_with("A->B"));
    assert_eq!(stdout(&run(&["demo"])), out);
}

#[test]
fn validated_density_helper_agrees_with_file_reader() {
    // Keeps the fixture helper honest: its output is a valid density.
    let text = diag_file(&[0.1, 0.2, 0.3, 0.4]);
    let parsed = qeci::io::read_density(&text, 1e-9).unwrap();
    let direct = validate_density(ComplexMatrix::from_real_diagonal(&[0.1, 0.2, 0.3, 0.4]), &[2, 2], 1e-9).unwrap();
    assert!(parsed.matrix().max_abs_diff(direct.matrix()) < 1e-15);
}
