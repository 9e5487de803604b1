//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for input or usage errors, 2 when the demo's
//! built-in self-check fails.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::contour::{center, load_contour, to_polar, PolarSamples};
use crate::fourier::{
    estimate_constant, evaluate_grid, FitReport, FourierModel, ELEPHANT_COSINE_TERMS,
};
use crate::pipeline::fit_contour;
use crate::render::{model_from_json, render_curve, report_from_json, report_to_json, RenderSpec};
use crate::select::{select, FitConfig, Strategy, Symmetry};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_SELF_CHECK: i32 = 2;

const DEMO_COEFFICIENT_TOLERANCE: f64 = 1e-9;
const DEMO_SSE_RTOL: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(
    name = "elephant-fit",
    version,
    about = "Fit closed contours with a sparse polar Fourier cosine series"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit a CSV contour and write the fit report as JSON.
    Fit(FitArgs),
    /// Render a model JSON file as SVG.
    Render(RenderArgs),
    /// Evaluate a model JSON file at one angle.
    Eval(EvalArgs),
    /// Recover the four-coefficient elephant from synthetic samples.
    Demo(DemoArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SymmetryArg {
    XAxis,
    None,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StrategyArg {
    Exhaustive,
    Greedy,
}

#[derive(Debug, Args)]
struct SelectionArgs {
    /// Uniform angular sample count.
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Largest harmonic considered.
    #[arg(long = "k-max", default_value_t = 10)]
    k_max: u32,
    /// Number of non-zero coefficients.
    #[arg(long, default_value_t = 4)]
    sparsity: usize,
    #[arg(long, value_enum, default_value_t = SymmetryArg::XAxis)]
    symmetry: SymmetryArg,
    #[arg(long, value_enum, default_value_t = StrategyArg::Exhaustive)]
    strategy: StrategyArg,
}

impl SelectionArgs {
    fn config(&self) -> FitConfig {
        FitConfig {
            n: self.n,
            k_max: self.k_max,
            sparsity_k: self.sparsity,
            symmetry: match self.symmetry {
                SymmetryArg::XAxis => Symmetry::XAxis,
                SymmetryArg::None => Symmetry::None,
            },
            strategy: strategy(self.strategy),
        }
    }
}

fn strategy(s: StrategyArg) -> Strategy {
    match s {
        StrategyArg::Exhaustive => Strategy::Exhaustive,
        StrategyArg::Greedy => Strategy::Greedy,
    }
}

#[derive(Debug, Args)]
struct FitArgs {
    /// Contour in CSV point format.
    #[arg(long)]
    input: PathBuf,
    /// Write here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    selection: SelectionArgs,
}

#[derive(Debug, Args)]
struct RenderArgs {
    /// Model or fit report JSON.
    #[arg(long)]
    input: PathBuf,
    /// Write here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Curve sample count.
    #[arg(long, default_value_t = 720)]
    resolution: usize,
    /// Overlay the contour given by --samples.
    #[arg(long, requires = "samples")]
    show_input: bool,
    /// Contour CSV to overlay; centered the same way `fit` centers it.
    #[arg(long)]
    samples: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Model or fit report JSON.
    #[arg(long)]
    input: PathBuf,
    /// Angle in radians.
    #[arg(long, allow_negative_numbers = true)]
    theta: f64,
}

#[derive(Debug, Args)]
struct DemoArgs {
    /// Directory for report.json and curve.svg; without it the report goes
    /// to standard output and no SVG is written.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Constant term used to synthesize the samples.
    #[arg(long, default_value_t = 100.0, allow_negative_numbers = true)]
    c: f64,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long = "k-max", default_value_t = 10)]
    k_max: u32,
    #[arg(long, default_value_t = 4)]
    sparsity: usize,
    #[arg(long, value_enum, default_value_t = StrategyArg::Exhaustive)]
    strategy: StrategyArg,
    #[arg(long, default_value_t = 720)]
    resolution: usize,
    /// Overlay the synthesized samples on the SVG.
    #[arg(long)]
    show_input: bool,
}

/// A failed command: which stage failed, why, and the exit code to use.
#[derive(Debug)]
pub struct CliError {
    stage: &'static str,
    message: String,
    code: i32,
}

impl CliError {
    fn input(stage: &'static str, message: impl fmt::Display) -> Self {
        CliError {
            stage,
            message: message.to_string(),
            code: EXIT_INPUT,
        }
    }

    fn io(stage: &'static str, path: &Path, err: io::Error) -> Self {
        Self::input(stage, format!("IoError: {}: {err}", path.display()))
    }

    pub fn code(&self) -> i32 {
        self.code
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.stage, self.message)
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("elephant-fit: {e}");
            e.code()
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Fit(a) => cmd_fit(&a),
        Command::Render(a) => cmd_render(&a),
        Command::Eval(a) => cmd_eval(&a),
        Command::Demo(a) => cmd_demo(&a),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io("read", path, e))
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| CliError::io("write", path, e)),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::io("write", Path::new("<stdout>"), e))
        }
    }
}

/// Accepts a bare model or a fit report; errors refer to the model schema.
fn load_model(path: &Path) -> Result<FourierModel, CliError> {
    let text = read(path)?;
    model_from_json(&text)
        .or_else(|e| report_from_json(&text).map(|r| r.model).map_err(|_| e))
        .map_err(|e| CliError::input("model", e))
}

fn cmd_fit(a: &FitArgs) -> Result<(), CliError> {
    let contour = load_contour(&read(&a.input)?).map_err(|e| CliError::input("load", e))?;
    let report = fit_contour(&contour, &a.selection.config()).map_err(|e| {
        CliError::input(
            e.stage(),
            match e {
                crate::pipeline::PipelineError::Config(s)
                | crate::pipeline::PipelineError::Select(s) => s.to_string(),
                crate::pipeline::PipelineError::Polar(s)
                | crate::pipeline::PipelineError::Symmetrize(s) => s.to_string(),
            },
        )
    })?;
    emit(a.output.as_deref(), &(report_to_json(&report) + "\n"))
}

fn load_overlay(path: &Path) -> Result<PolarSamples, CliError> {
    let contour = load_contour(&read(path)?).map_err(|e| CliError::input("load", e))?;
    to_polar(&center(&contour)).map_err(|e| CliError::input("polar", e))
}

fn cmd_render(a: &RenderArgs) -> Result<(), CliError> {
    let model = load_model(&a.input)?;
    let spec = RenderSpec::new(a.resolution, 800, 800, 0.05, a.show_input)
        .map_err(|e| CliError::input("config", e))?;
    let overlay = match (&a.samples, a.show_input) {
        (Some(path), true) => Some(load_overlay(path)?),
        _ => None,
    };
    emit(
        a.output.as_deref(),
        &render_curve(&model, &spec, overlay.as_ref()),
    )
}

fn cmd_eval(a: &EvalArgs) -> Result<(), CliError> {
    if !a.theta.is_finite() {
        return Err(CliError::input(
            "config",
            format!("theta must be finite, got {}", a.theta),
        ));
    }
    let model = load_model(&a.input)?;
    emit(
        None,
        &(format_significant(model.evaluate(a.theta), 12) + "\n"),
    )
}

/// `%.{digits}g`-style formatting: `digits` significant digits, trailing
/// zeros removed, exponent form only for very large or small magnitudes.
pub fn format_significant(v: f64, digits: usize) -> String {
    assert!(digits >= 1);
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".into() } else { v.to_string() };
    }
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci
        .split_once('e')
        .expect("LowerExp always has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if exp < -4 || exp >= digits as i32 {
        format!("{}e{exp}", trim(mantissa))
    } else {
        let decimals = (digits as i32 - 1 - exp) as usize;
        trim(&format!("{v:.decimals$}"))
    }
}

/// The demo's expected outcome on an orthogonal design: the `sparsity`
/// largest-magnitude elephant terms within `k_max`, padded with the smallest
/// unused harmonics, and an SSE of `(n/2) * sum a^2` over the omitted terms.
struct DemoPrediction {
    harmonics: Vec<u32>,
    coefficients: Vec<(u32, f64)>,
    sse: f64,
}

fn predict_demo(cfg: &FitConfig) -> DemoPrediction {
    let mut available: Vec<(u32, f64)> = ELEPHANT_COSINE_TERMS
        .iter()
        .copied()
        .filter(|&(k, _)| k <= cfg.k_max)
        .collect();
    available.sort_by(|x, y| y.1.abs().total_cmp(&x.1.abs()).then(x.0.cmp(&y.0)));
    let mut coefficients: Vec<(u32, f64)> = available.into_iter().take(cfg.sparsity_k).collect();
    let mut filler =
        (1..=cfg.k_max).filter(|k| !ELEPHANT_COSINE_TERMS.iter().any(|&(t, _)| t == *k));
    while coefficients.len() < cfg.sparsity_k {
        let k = filler.next().expect("sparsity_k <= k_max");
        coefficients.push((k, 0.0));
    }
    coefficients.sort_by_key(|&(k, _)| k);
    let omitted: f64 = ELEPHANT_COSINE_TERMS
        .iter()
        .filter(|&&(k, _)| !coefficients.iter().any(|&(s, _)| s == k))
        .map(|&(_, a)| a * a)
        .sum();
    DemoPrediction {
        harmonics: coefficients.iter().map(|&(k, _)| k).collect(),
        coefficients,
        sse: cfg.n as f64 / 2.0 * omitted,
    }
}

fn self_check(report: &FitReport, cfg: &FitConfig) -> Result<(), String> {
    let want = predict_demo(cfg);
    if report.selected_harmonics != want.harmonics {
        return Err(format!(
            "selected harmonics {:?}, expected {:?}",
            report.selected_harmonics, want.harmonics
        ));
    }
    for (term, &(k, a)) in report.model.terms().iter().zip(&want.coefficients) {
        if (term.a - a).abs() > DEMO_COEFFICIENT_TOLERANCE || term.b != 0.0 {
            return Err(format!(
                "coefficient for k = {k} is {}, expected {a}",
                term.a
            ));
        }
    }
    if (report.sse - want.sse).abs() > DEMO_SSE_RTOL * want.sse + DEMO_COEFFICIENT_TOLERANCE {
        return Err(format!(
            "sse {} differs from predicted {}",
            report.sse, want.sse
        ));
    }
    Ok(())
}

/// Largest elephant harmonic; the demo grid must resolve it.
const ELEPHANT_MAX_HARMONIC: u32 = 8;

fn cmd_demo(a: &DemoArgs) -> Result<(), CliError> {
    let cfg = FitConfig {
        n: a.n,
        k_max: a.k_max,
        sparsity_k: a.sparsity,
        symmetry: Symmetry::XAxis,
        strategy: strategy(a.strategy),
    };
    cfg.validate().map_err(|e| CliError::input("config", e))?;
    if a.n <= 2 * ELEPHANT_MAX_HARMONIC as usize {
        return Err(CliError::input(
            "config",
            format!(
                "InvalidConfig: demo needs n > {} to resolve every elephant harmonic",
                2 * ELEPHANT_MAX_HARMONIC
            ),
        ));
    }
    if !a.c.is_finite() {
        return Err(CliError::input("config", "InvalidConfig: c must be finite"));
    }
    let spec = RenderSpec::new(a.resolution, 800, 800, 0.05, a.show_input)
        .map_err(|e| CliError::input("config", e))?;

    let truth = FourierModel::elephant(a.c);
    let samples = evaluate_grid(&truth, a.n).samples;
    let c = estimate_constant(&samples);
    let report = select(&samples, &cfg, c).map_err(|e| CliError::input("select", e))?;
    self_check(&report, &cfg).map_err(|message| CliError {
        stage: "self-check",
        message,
        code: EXIT_SELF_CHECK,
    })?;

    let json = report_to_json(&report) + "\n";
    match &a.output {
        None => emit(None, &json),
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| CliError::io("write", dir, e))?;
            let svg = render_curve(&report.model, &spec, Some(&samples));
            emit(Some(&dir.join("report.json")), &json)?;
            emit(Some(&dir.join("curve.svg")), &svg)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_significant(107.87000000000002, 12), "107.87");
        assert_eq!(format_significant(5.0, 12), "5");
        assert_eq!(format_significant(-0.25, 12), "-0.25");
        assert_eq!(format_significant(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(
            format_significant(123456789012345.0, 12),
            "1.23456789012e14"
        );
        assert_eq!(format_significant(1.5e-7, 12), "1.5e-7");
        assert_eq!(format_significant(999999999999.9, 12), "1e12");
        assert_eq!(format_significant(0.0, 12), "0");
    }

    #[test]
    fn demo_prediction() {
        let p = predict_demo(&FitConfig::default());
        assert_eq!(p.harmonics, vec![1, 3, 7, 8]);
        assert!(p.sse == 0.0);

        let p = predict_demo(&FitConfig {
            sparsity_k: 3,
            ..FitConfig::default()
        });
        assert_eq!(p.harmonics, vec![1, 3, 8]);
        assert!((p.sse - 50.0 * 20.43 * 20.43).abs() < 1e-9);

        let p = predict_demo(&FitConfig {
            sparsity_k: 6,
            ..FitConfig::default()
        });
        assert_eq!(p.harmonics, vec![1, 2, 3, 4, 7, 8]);

        let p = predict_demo(&FitConfig {
            k_max: 7,
            sparsity_k: 4,
            ..FitConfig::default()
        });
        assert_eq!(p.harmonics, vec![1, 2, 3, 7]);
        assert!((p.sse - 50.0 * 31.58 * 31.58).abs() < 1e-9);
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(["elephant-fit"]), EXIT_INPUT);
        assert_eq!(run(["elephant-fit", "fit"]), EXIT_INPUT);
        assert_eq!(run(["elephant-fit", "demo", "--sparsity", "x"]), EXIT_INPUT);
        assert_eq!(run(["elephant-fit", "--help"]), EXIT_OK);
    }
}
