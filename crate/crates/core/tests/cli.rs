//! CLI behaviour: golden reports, exit codes and diagnostics.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::{fs, str};

use elephant_fit::fourier::{FourierModel, Term};
use elephant_fit::render::{model_to_json, report_from_json};

fn manifest_path(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_elephant-fit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> &str {
    str::from_utf8(&o.stdout).expect("UTF-8 stdout")
}

fn stderr(o: &Output) -> &str {
    str::from_utf8(&o.stderr).expect("UTF-8 stderr")
}

fn golden(name: &str) -> String {
    fs::read_to_string(manifest_path(&format!("tests/golden/{name}"))).expect("golden file present")
}

fn write_model(dir: &Path, name: &str, m: &FourierModel) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, model_to_json(m)).unwrap();
    path
}

#[test]
fn fit_reference_elephant_matches_golden() {
    let input = manifest_path("data/elephant_reference.csv");
    let out = run(&["fit", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out), golden("reference_fit.json"));
    let report = report_from_json(stdout(&out)).unwrap();
    assert_eq!(report.selected_harmonics.len(), 4);
    assert_eq!(report.model.nonzero_count(), 4);
    assert!(report.model.is_symmetric());
}

#[test]
fn fit_writes_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let dest = dir.path().join("report.json");
    let input = manifest_path("data/elephant_reference.csv");
    let out = run(&[
        "fit",
        "--input",
        input.to_str().unwrap(),
        "--output",
        dest.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(
        fs::read_to_string(dest).unwrap(),
        golden("reference_fit.json")
    );
}

#[test]
fn fit_circle_is_constant_model() {
    let input = manifest_path("tests/fixtures/circle.csv");
    let out = run(&["fit", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report = report_from_json(stdout(&out)).unwrap();
    assert!((report.model.c() - 3.0).abs() < 1e-9);
    assert!(report
        .model
        .terms()
        .iter()
        .all(|t| t.a.abs() < 1e-9 && t.b == 0.0));
    assert!(report.rmse < 1e-9);
}

#[test]
fn fit_crescent_reports_non_star_shaped() {
    let input = manifest_path("tests/fixtures/crescent.csv");
    let out = run(&["fit", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let diag = stderr(&out);
    assert_eq!(diag.lines().count(), 1, "{diag}");
    assert!(diag.contains("NonStarShaped"), "{diag}");
    assert!(diag.contains("polar"), "{diag}");
}

#[test]
fn fit_error_paths() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "1,0\n0,x\n").unwrap();
    let out = run(&["fit", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr(&out).contains("ParseError: line 2"),
        "{}",
        stderr(&out)
    );

    let out = run(&[
        "fit",
        "--input",
        dir.path().join("missing.csv").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("read"));

    let input = manifest_path("data/elephant_reference.csv");
    let out = run(&["fit", "--input", input.to_str().unwrap(), "--k-max", "50"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("InvalidConfig"));

    let out = run(&["fit"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&[
        "fit",
        "--input",
        input.to_str().unwrap(),
        "--symmetry",
        "y-axis",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn fit_asymmetric_greedy() {
    let input = manifest_path("data/elephant_reference.csv");
    let args = [
        "fit",
        "--input",
        input.to_str().unwrap(),
        "--symmetry",
        "none",
        "--strategy",
        "greedy",
        "--sparsity",
        "5",
    ];
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report = report_from_json(stdout(&out)).unwrap();
    assert_eq!(report.parameter_vector.len(), 5);
    assert_eq!(report.candidates_evaluated, 20 + 19 + 18 + 17 + 16);
    assert_eq!(run(&args).stdout, out.stdout);
}

#[test]
fn fit_recovers_synthesized_model() {
    let m = FourierModel::new(
        50.0,
        vec![
            Term::cosine(2, 6.0),
            Term::cosine(4, -3.0),
            Term::cosine(6, 2.0),
            Term::cosine(9, 1.0),
        ],
    )
    .unwrap();
    let n = 100;
    let csv: String = (0..n)
        .map(|i| {
            let t = elephant_fit::contour::grid_theta(i, n);
            let r = m.evaluate(t);
            format!("{:?},{:?}\n", r * t.cos() + 12.5, r * t.sin() - 4.0)
        })
        .collect();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("synthetic.csv");
    fs::write(&path, csv).unwrap();
    let out = run(&["fit", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report = report_from_json(stdout(&out)).unwrap();
    assert_eq!(report.selected_harmonics, vec![2, 4, 6, 9]);
    assert!((report.model.c() - 50.0).abs() < 1e-9);
    for (got, want) in report.model.terms().iter().zip(m.terms()) {
        assert!(
            (got.a - want.a).abs() < 1e-9,
            "k = {}: {} vs {}",
            got.k,
            got.a,
            want.a
        );
    }
}

#[test]
fn eval_examples() {
    let dir = tempfile::tempdir().unwrap();
    let eq1 = write_model(dir.path(), "eq1.json", &FourierModel::elephant(100.0));
    let out = run(&["eval", "--input", eq1.to_str().unwrap(), "--theta", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "107.87\n");

    let flat = write_model(dir.path(), "flat.json", &FourierModel::constant(5.0));
    let out = run(&["eval", "--input", flat.to_str().unwrap(), "--theta", "1.3"]);
    assert_eq!(stdout(&out), "5\n");

    let out = run(&[
        "eval",
        "--input",
        eq1.to_str().unwrap(),
        "--theta",
        "-3.141592653589793",
    ]);
    // 100 - 47.84 + 51.12 + 20.43 + 31.58
    assert_eq!(stdout(&out), "155.29\n");

    let report = manifest_path("tests/golden/demo_report.json");
    let out = run(&["eval", "--input", report.to_str().unwrap(), "--theta", "0"]);
    assert_eq!(stdout(&out), "107.87\n");

    let broken = dir.path().join("broken.json");
    fs::write(&broken, r#"{"c":"x"}"#).unwrap();
    let out = run(&["eval", "--input", broken.to_str().unwrap(), "--theta", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("SchemaError"));
}

#[test]
fn render_examples() {
    let dir = tempfile::tempdir().unwrap();
    let eq1 = write_model(dir.path(), "eq1.json", &FourierModel::elephant(100.0));
    let a = run(&["render", "--input", eq1.to_str().unwrap()]);
    let b = run(&["render", "--input", eq1.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let svg = stdout(&a);
    let doc = roxmltree::Document::parse(svg).expect("well-formed SVG");
    assert_eq!(doc.root_element().tag_name().name(), "svg");
    assert_eq!(svg.matches("<path").count(), 1);
    assert!(!svg.contains("<circle"));

    let dest = dir.path().join("out.svg");
    let out = run(&[
        "render",
        "--input",
        eq1.to_str().unwrap(),
        "--output",
        dest.to_str().unwrap(),
        "--resolution",
        "64",
        "--show-input",
        "--samples",
        manifest_path("data/elephant_reference.csv")
            .to_str()
            .unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let svg = fs::read_to_string(dest).unwrap();
    assert!(svg.contains("<g id=\"input\""));
    assert_eq!(svg.matches("<circle").count(), 260);

    let out = run(&[
        "render",
        "--input",
        eq1.to_str().unwrap(),
        "--resolution",
        "8",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["render", "--input", eq1.to_str().unwrap(), "--show-input"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&[
        "render",
        "--input",
        eq1.to_str().unwrap(),
        "--output",
        "/nonexistent/dir/x.svg",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn demo_matches_golden_reports() {
    let out = run(&["demo"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out), golden("demo_report.json"));

    let out = run(&["demo", "--sparsity", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out), golden("demo_sparsity3_report.json"));
}

#[test]
fn demo_k_max_eight_is_unchanged() {
    let base = report_from_json(stdout(&run(&["demo"]))).unwrap();
    let eight = report_from_json(stdout(&run(&["demo", "--k-max", "8"]))).unwrap();
    assert_eq!(base.selected_harmonics, eight.selected_harmonics);
    for (a, b) in base.parameter_vector.iter().zip(&eight.parameter_vector) {
        assert!((a - b).abs() < 1e-9);
    }
    assert_eq!(eight.candidates_evaluated, 70);
}

#[test]
fn demo_variants_pass_self_check() {
    for args in [
        &["demo", "--strategy", "greedy"][..],
        &["demo", "--sparsity", "6"],
        &["demo", "--k-max", "7"],
        &["demo", "--c", "150", "--n", "64"],
        &["demo", "--sparsity", "1"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", stderr(&out));
    }
    let out = run(&["demo", "--n", "16", "--k-max", "7"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["demo", "--sparsity", "11"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn demo_writes_report_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let dest = dir.path().join("demo");
    let out = run(&["demo", "--output", dest.to_str().unwrap(), "--show-input"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(
        fs::read_to_string(dest.join("report.json")).unwrap(),
        golden("demo_report.json")
    );
    let svg = fs::read_to_string(dest.join("curve.svg")).unwrap();
    roxmltree::Document::parse(&svg).expect("well-formed SVG");
    assert_eq!(svg.matches("<circle").count(), 100);
}

#[test]
fn help_and_usage_exit_codes() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
}
