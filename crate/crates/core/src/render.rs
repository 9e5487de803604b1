//! JSON serialization of models and reports, and SVG rendering of curves.
//!
//! Numbers are written in their shortest round-tripping decimal form (never
//! more than 17 significant digits), so `model_from_json(model_to_json(m))`
//! reproduces every coefficient bit for bit. Integral values print without a
//! fractional part: a unit constant is `"c":1`.

use std::fmt::Write as _;
use std::io;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contour::{grid_theta, PolarSamples};
use crate::fourier::{FitReport, FourierModel, ModelError, Term};

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("SchemaError: {0}")]
    Schema(String),
    #[error("InvariantError: {0}")]
    Invariant(String),
    #[error("InvalidRenderSpec: {0}")]
    InvalidSpec(String),
}

impl RenderError {
    pub fn kind(&self) -> &'static str {
        match self {
            RenderError::Schema(_) => "SchemaError",
            RenderError::Invariant(_) => "InvariantError",
            RenderError::InvalidSpec(_) => "InvalidRenderSpec",
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermJson {
    k: i64,
    a: f64,
    b: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelJson {
    c: f64,
    terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReportJson {
    model: ModelJson,
    sse: f64,
    rmse: f64,
    selected_harmonics: Vec<u32>,
    parameter_vector: Vec<f64>,
    candidates_evaluated: u64,
}

impl From<&FourierModel> for ModelJson {
    fn from(m: &FourierModel) -> Self {
        ModelJson {
            c: m.c(),
            terms: m
                .terms()
                .iter()
                .map(|t| TermJson {
                    k: i64::from(t.k),
                    a: t.a,
                    b: t.b,
                })
                .collect(),
        }
    }
}

impl TryFrom<ModelJson> for FourierModel {
    type Error = RenderError;

    fn try_from(j: ModelJson) -> Result<Self, RenderError> {
        let terms = j
            .terms
            .iter()
            .map(|t| {
                let k = u32::try_from(t.k).ok().filter(|&k| k >= 1).ok_or_else(|| {
                    RenderError::Invariant(format!(
                        "harmonic k = {} must be a positive integer",
                        t.k
                    ))
                })?;
                Ok(Term { k, a: t.a, b: t.b })
            })
            .collect::<Result<Vec<_>, RenderError>>()?;
        FourierModel::new(j.c, terms).map_err(|e: ModelError| RenderError::Invariant(e.to_string()))
    }
}

/// Compact JSON with shortest round-trip float formatting.
struct ShortestFloat;

impl serde_json::ser::Formatter for ShortestFloat {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_json_number(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Shortest decimal that parses back to exactly `v`. Plain notation for
/// magnitudes in `[1e-7, 1e17)`, exponent notation otherwise.
pub fn format_json_number(v: f64) -> String {
    assert!(v.is_finite(), "JSON cannot encode {v}");
    if v == 0.0 {
        return if v.is_sign_negative() {
            "-0.0".into()
        } else {
            "0".into()
        };
    }
    let mag = v.abs();
    if (1e-7..1e17).contains(&mag) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, ShortestFloat);
    value
        .serialize(&mut ser)
        .expect("in-memory serialization of finite numbers cannot fail");
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

/// `{"c":…,"terms":[{"k":…,"a":…,"b":…},…]}`
pub fn model_to_json(m: &FourierModel) -> String {
    to_json_string(&ModelJson::from(m))
}

pub fn model_from_json(text: &str) -> Result<FourierModel, RenderError> {
    let j: ModelJson =
        serde_json::from_str(text).map_err(|e| RenderError::Schema(e.to_string()))?;
    FourierModel::try_from(j)
}

pub fn report_to_json(r: &FitReport) -> String {
    to_json_string(&ReportJson {
        model: ModelJson::from(&r.model),
        sse: r.sse,
        rmse: r.rmse,
        selected_harmonics: r.selected_harmonics.clone(),
        parameter_vector: r.parameter_vector.clone(),
        candidates_evaluated: r.candidates_evaluated,
    })
}

pub fn report_from_json(text: &str) -> Result<FitReport, RenderError> {
    let j: ReportJson =
        serde_json::from_str(text).map_err(|e| RenderError::Schema(e.to_string()))?;
    Ok(FitReport {
        model: FourierModel::try_from(j.model)?,
        sse: j.sse,
        rmse: j.rmse,
        selected_harmonics: j.selected_harmonics,
        parameter_vector: j.parameter_vector,
        candidates_evaluated: j.candidates_evaluated,
    })
}

/// Canvas and sampling settings for [`render_curve`].
#[derive(Debug, Clone, PartialEq)]
pub struct RenderSpec {
    resolution: usize,
    width: u32,
    height: u32,
    margin: f64,
    show_input: bool,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            resolution: 720,
            width: 800,
            height: 800,
            margin: 0.05,
            show_input: false,
        }
    }
}

impl RenderSpec {
    pub fn new(
        resolution: usize,
        width: u32,
        height: u32,
        margin: f64,
        show_input: bool,
    ) -> Result<Self, RenderError> {
        if resolution < 16 {
            return Err(RenderError::InvalidSpec(format!(
                "resolution {resolution} is below 16"
            )));
        }
        if width < 64 || height < 64 {
            return Err(RenderError::InvalidSpec(format!(
                "canvas {width}x{height} is smaller than 64x64"
            )));
        }
        if !(0.0..0.5).contains(&margin) {
            return Err(RenderError::InvalidSpec(format!(
                "margin {margin} outside [0, 0.5)"
            )));
        }
        Ok(RenderSpec {
            resolution,
            width,
            height,
            margin,
            show_input,
        })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn show_input(&self) -> bool {
        self.show_input
    }
}

/// Maps model-plane points to the canvas. The polar axis `theta = 0` points
/// up, so a mirror-symmetric model is symmetric about the vertical centre
/// line; screen y grows downward.
struct Viewport {
    scale: f64,
    cx: f64,
    cy: f64,
    half_w: f64,
    half_h: f64,
}

impl Viewport {
    fn fit(points: &[(f64, f64)], spec: &RenderSpec) -> Self {
        let (mut xmin, mut xmax, mut ymin, mut ymax) = (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        );
        for &(x, y) in points {
            let (sx, sy) = Self::rotate(x, y);
            xmin = xmin.min(sx);
            xmax = xmax.max(sx);
            ymin = ymin.min(sy);
            ymax = ymax.max(sy);
        }
        let w = f64::from(spec.width);
        let h = f64::from(spec.height);
        let usable = 1.0 - 2.0 * spec.margin;
        let scale_for = |avail: f64, extent: f64| {
            if extent > 0.0 {
                avail * usable / extent
            } else {
                f64::INFINITY
            }
        };
        let scale = scale_for(w, xmax - xmin).min(scale_for(h, ymax - ymin));
        Viewport {
            scale: if scale.is_finite() { scale } else { 1.0 },
            cx: (xmin + xmax) / 2.0,
            cy: (ymin + ymax) / 2.0,
            half_w: w / 2.0,
            half_h: h / 2.0,
        }
    }

    // quarter turn counterclockwise: model +x becomes up
    fn rotate(x: f64, y: f64) -> (f64, f64) {
        (-y, x)
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let (u, v) = Self::rotate(x, y);
        (
            self.half_w + self.scale * (u - self.cx),
            self.half_h - self.scale * (v - self.cy),
        )
    }
}

fn polar_point(theta: f64, r: f64) -> (f64, f64) {
    // negative r lands on the opposite ray, the usual polar-plot convention
    (r * theta.cos(), r * theta.sin())
}

/// Renders the model as a closed SVG path, optionally overlaying sample points.
///
/// Output depends only on the inputs, byte for byte.
pub fn render_curve(m: &FourierModel, spec: &RenderSpec, overlay: Option<&PolarSamples>) -> String {
    let n = spec.resolution;
    let curve: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let t = grid_theta(i, n);
            polar_point(t, m.evaluate(t))
        })
        .collect();
    let overlay: Vec<(f64, f64)> = match overlay {
        Some(p) if spec.show_input => p
            .samples()
            .iter()
            .map(|s| polar_point(s.theta, s.r))
            .collect(),
        _ => Vec::new(),
    };
    let all: Vec<(f64, f64)> = curve.iter().chain(&overlay).copied().collect();
    let view = Viewport::fit(&all, spec);

    let mut svg = String::new();
    svg.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">",
        w = spec.width,
        h = spec.height
    );
    svg.push_str(
        "<path fill=\"none\" stroke=\"#1f2937\" stroke-width=\"2\" stroke-linejoin=\"round\" d=\"",
    );
    for (i, &(x, y)) in curve.iter().enumerate() {
        let (sx, sy) = view.map(x, y);
        let cmd = if i == 0 { "M" } else { " L" };
        let _ = write!(svg, "{cmd}{sx:.9} {sy:.9}");
    }
    svg.push_str(" Z\"/>\n");
    if !overlay.is_empty() {
        svg.push_str("<g id=\"input\" fill=\"#dc2626\" stroke=\"none\">\n");
        for &(x, y) in &overlay {
            let (sx, sy) = view.map(x, y);
            let _ = writeln!(svg, "<circle cx=\"{sx:.9}\" cy=\"{sy:.9}\" r=\"2.5\"/>");
        }
        svg.push_str("</g>\n");
    }
    svg.push_str("</svg>\n");
    svg
}
