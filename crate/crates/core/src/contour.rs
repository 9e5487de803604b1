//! Closed-contour ingestion and polar sampling.
//!
//! A contour is read from the CSV point format (one `x,y` pair per line,
//! `#` comments), translated so its vertex centroid sits at the origin, and
//! converted to angle/radius samples. The polar form only makes sense when
//! every ray from the origin meets the boundary once, so `to_polar` rejects
//! shapes that are not star-shaped about the origin.
//!
//! Uniform grids always use `theta_i = -pi + 2*pi*i/n` for `i = 0..n`.

use std::f64::consts::{PI, TAU};
use std::fmt;

use thiserror::Error;

/// Two angles closer than this are treated as the same ray.
pub const THETA_TOLERANCE: f64 = 1e-9;

const DUPLICATE_RTOL: f64 = 1e-12;
const UNIFORM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContourError {
    #[error("ParseError: line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("TooFewPoints: need at least 3 distinct points, found {found}")]
    TooFewPoints { found: usize },
    #[error("DuplicatePoint: points {index} and {next} coincide")]
    DuplicatePoint { index: usize, next: usize },
    #[error("InvalidSamples: {0}")]
    InvalidSamples(String),
    #[error("NonStarShaped: {0}")]
    NonStarShaped(String),
    #[error("OriginOutside: the origin is not strictly inside the contour")]
    OriginOutside,
    #[error("NotUniform: samples are not on a uniform angular grid")]
    NotUniform,
    #[error("OddSampleCount: mirror symmetry needs an even grid, got n = {0}")]
    OddSampleCount(usize),
}

impl ContourError {
    /// Short name of the error variant, used in CLI diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            ContourError::Parse { .. } => "ParseError",
            ContourError::TooFewPoints { .. } => "TooFewPoints",
            ContourError::DuplicatePoint { .. } => "DuplicatePoint",
            ContourError::InvalidSamples(_) => "InvalidSamples",
            ContourError::NonStarShaped(_) => "NonStarShaped",
            ContourError::OriginOutside => "OriginOutside",
            ContourError::NotUniform => "NotUniform",
            ContourError::OddSampleCount(_) => "OddSampleCount",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
}

fn coincident(p: Point, q: Point) -> bool {
    let scale = p.x.abs().max(p.y.abs()).max(q.x.abs()).max(q.y.abs());
    let tol = DUPLICATE_RTOL * scale;
    (p.x - q.x).abs() <= tol && (p.y - q.y).abs() <= tol
}

/// Ordered closed polyline. The last point connects back to the first.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    points: Vec<Point>,
    closed: bool,
}

impl Contour {
    /// Builds a closed contour, rejecting fewer than 3 points or a pair of
    /// consecutive coincident points (including the closing pair).
    pub fn new(points: Vec<Point>) -> Result<Self, ContourError> {
        if points.len() < 3 {
            return Err(ContourError::TooFewPoints {
                found: points.len(),
            });
        }
        if let Some(p) = points.iter().find(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(ContourError::InvalidSamples(format!(
                "non-finite point ({}, {})",
                p.x, p.y
            )));
        }
        let n = points.len();
        for i in 0..n {
            let next = (i + 1) % n;
            if coincident(points[i], points[next]) {
                return Err(ContourError::DuplicatePoint { index: i, next });
            }
        }
        Ok(Contour {
            points,
            closed: true,
        })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn closed(&self) -> bool {
        self.closed
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Mean of the vertices.
    pub fn centroid(&self) -> Point {
        let n = self.points.len() as f64;
        let (sx, sy) = self
            .points
            .iter()
            .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
        Point::new(sx / n, sy / n)
    }
}

/// Parses the CSV point format.
///
/// Blank lines and lines starting with `#` are skipped. Consecutive duplicate
/// points are collapsed, as is a trailing point that repeats the first one.
pub fn load_contour(text: &str) -> Result<Contour, ContourError> {
    let mut points: Vec<Point> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let point = parse_point(line).map_err(|message| ContourError::Parse {
            line: line_no,
            message,
        })?;
        if points.last().is_some_and(|&last| coincident(last, point)) {
            continue;
        }
        points.push(point);
    }
    while points.len() > 1 && coincident(points[0], points[points.len() - 1]) {
        points.pop();
    }
    Contour::new(points)
}

fn parse_point(line: &str) -> Result<Point, String> {
    let mut fields = line.split(',');
    let (Some(xs), Some(ys), None) = (fields.next(), fields.next(), fields.next()) else {
        return Err(format!("expected `x,y`, got `{line}`"));
    };
    let parse = |s: &str| -> Result<f64, String> {
        let s = s.trim();
        let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("`{s}` is not finite"))
        }
    };
    Ok(Point::new(parse(xs)?, parse(ys)?))
}

/// Translates the contour so that its vertex centroid is the origin.
pub fn center(c: &Contour) -> Contour {
    let g = c.centroid();
    let points = c
        .points
        .iter()
        .map(|p| Point::new(p.x - g.x, p.y - g.y))
        .collect();
    Contour {
        points,
        closed: c.closed,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarSample {
    pub theta: f64,
    pub r: f64,
}

/// Angle/radius samples sorted by angle in `[-pi, pi)`.
///
/// Radii are signed: fitted or synthesized series may dip below zero, and
/// such samples are still valid fitting targets. Samples coming from
/// [`to_polar`] always have `r >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarSamples {
    samples: Vec<PolarSample>,
    uniform: bool,
}

/// Angle of grid index `i` on an `n`-point uniform grid.
pub fn grid_theta(i: usize, n: usize) -> f64 {
    -PI + TAU * i as f64 / n as f64
}

impl PolarSamples {
    /// Validates and wraps arbitrary samples. The `uniform` flag is set when
    /// the angles lie on the standard `n`-point grid.
    pub fn new(samples: Vec<PolarSample>) -> Result<Self, ContourError> {
        if samples.is_empty() {
            return Err(ContourError::InvalidSamples("no samples".into()));
        }
        for s in &samples {
            if !s.theta.is_finite() || !s.r.is_finite() {
                return Err(ContourError::InvalidSamples(format!(
                    "non-finite sample ({}, {})",
                    s.theta, s.r
                )));
            }
            if !(-PI..PI).contains(&s.theta) {
                return Err(ContourError::InvalidSamples(format!(
                    "theta {} outside [-pi, pi)",
                    s.theta
                )));
            }
        }
        if samples.windows(2).any(|w| w[1].theta <= w[0].theta) {
            return Err(ContourError::InvalidSamples(
                "theta values must be strictly increasing".into(),
            ));
        }
        let uniform = is_uniform_grid(&samples);
        Ok(PolarSamples { samples, uniform })
    }

    /// Samples on the uniform grid with the given radii, one per grid angle.
    pub fn uniform(radii: Vec<f64>) -> Result<Self, ContourError> {
        if radii.is_empty() {
            return Err(ContourError::InvalidSamples("no samples".into()));
        }
        if radii.iter().any(|r| !r.is_finite()) {
            return Err(ContourError::InvalidSamples("non-finite radius".into()));
        }
        Ok(Self::uniform_unchecked(radii))
    }

    pub(crate) fn uniform_unchecked(radii: Vec<f64>) -> Self {
        let n = radii.len();
        let samples = radii
            .into_iter()
            .enumerate()
            .map(|(i, r)| PolarSample {
                theta: grid_theta(i, n),
                r,
            })
            .collect();
        PolarSamples {
            samples,
            uniform: true,
        }
    }

    pub fn samples(&self) -> &[PolarSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    pub fn thetas(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.theta)
    }

    pub fn radii(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.r)
    }

    pub fn has_negative_radius(&self) -> bool {
        self.samples.iter().any(|s| s.r < 0.0)
    }

    /// Cartesian points `(r cos theta, r sin theta)`.
    pub fn to_cartesian(&self) -> Vec<Point> {
        self.samples
            .iter()
            .map(|s| Point::new(s.r * s.theta.cos(), s.r * s.theta.sin()))
            .collect()
    }

    /// Largest `|r(theta_i) - r(-theta_i)|` over a uniform even grid.
    pub fn mirror_asymmetry(&self) -> Result<f64, ContourError> {
        let n = self.check_mirror_grid()?;
        Ok((0..n)
            .map(|i| (self.samples[i].r - self.samples[mirror_index(i, n)].r).abs())
            .fold(0.0, f64::max))
    }

    fn check_mirror_grid(&self) -> Result<usize, ContourError> {
        if !self.uniform {
            return Err(ContourError::NotUniform);
        }
        let n = self.samples.len();
        if !n.is_multiple_of(2) {
            return Err(ContourError::OddSampleCount(n));
        }
        Ok(n)
    }
}

fn is_uniform_grid(samples: &[PolarSample]) -> bool {
    let n = samples.len();
    samples
        .iter()
        .enumerate()
        .all(|(i, s)| (s.theta - grid_theta(i, n)).abs() <= UNIFORM_TOLERANCE)
}

/// Grid index of `-theta_i` (mod 2 pi) on an `n`-point uniform grid.
fn mirror_index(i: usize, n: usize) -> usize {
    (n - i) % n
}

fn wrap_angle(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(TAU) - PI;
    if w <= -PI {
        w + TAU
    } else {
        w
    }
}

fn distance_to_segment(p: Point, q: Point) -> f64 {
    // distance from the origin to segment pq
    let (dx, dy) = (q.x - p.x, q.y - p.y);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (-(p.x * dx + p.y * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p.x + t * dx).hypot(p.y + t * dy)
}

/// Converts a contour to polar samples about the origin, sorted by angle.
///
/// The contour must enclose the origin and sweep around it monotonically
/// exactly once; otherwise `r(theta)` is not single-valued.
pub fn to_polar(c: &Contour) -> Result<PolarSamples, ContourError> {
    let pts = &c.points;
    let n = pts.len();
    let scale = pts.iter().map(|p| p.x.hypot(p.y)).fold(0.0, f64::max);

    let on_boundary = (0..n)
        .any(|i| distance_to_segment(pts[i], pts[(i + 1) % n]) <= DUPLICATE_RTOL * scale.max(1.0));
    if on_boundary {
        return Err(ContourError::OriginOutside);
    }

    let angles: Vec<f64> = pts.iter().map(|p| p.y.atan2(p.x)).collect();
    let steps: Vec<f64> = (0..n)
        .map(|i| wrap_angle(angles[(i + 1) % n] - angles[i]))
        .collect();
    let total: f64 = steps.iter().sum();
    let winding = (total / TAU).round();
    if winding == 0.0 {
        return Err(ContourError::OriginOutside);
    }
    if winding.abs() > 1.0 {
        return Err(ContourError::NonStarShaped(format!(
            "boundary winds {} times around the origin",
            winding.abs()
        )));
    }
    let dir = winding.signum();
    let radii: Vec<f64> = pts.iter().map(|p| p.x.hypot(p.y)).collect();

    let mut keep = vec![true; n];
    for (i, &step) in steps.iter().enumerate() {
        let next = (i + 1) % n;
        if step.abs() <= THETA_TOLERANCE {
            let (r0, r1) = (radii[i], radii[next]);
            if (r0 - r1).abs() <= THETA_TOLERANCE * r0.max(r1).max(1.0) {
                keep[next] = false;
                continue;
            }
            return Err(ContourError::NonStarShaped(format!(
                "points {i} and {next} lie on the same ray at theta = {:.6} with r = {r0} and {r1}",
                angles[i]
            )));
        }
        if step * dir < 0.0 {
            return Err(ContourError::NonStarShaped(format!(
                "angular order reverses between points {i} and {next} (theta {:.6} -> {:.6})",
                angles[i], angles[next]
            )));
        }
    }

    let mut samples: Vec<PolarSample> = (0..n)
        .filter(|&i| keep[i])
        .map(|i| {
            let theta = if angles[i] >= PI {
                angles[i] - TAU
            } else {
                angles[i]
            };
            PolarSample { theta, r: radii[i] }
        })
        .collect();
    samples.sort_by(|a, b| a.theta.total_cmp(&b.theta));
    if samples.len() < 3 {
        return Err(ContourError::TooFewPoints {
            found: samples.len(),
        });
    }
    Ok(PolarSamples {
        samples,
        uniform: false,
    })
}

/// Resamples onto the `n`-point uniform grid by periodic linear interpolation.
pub fn resample_uniform(p: &PolarSamples, n: usize) -> PolarSamples {
    assert!(n >= 3, "resample_uniform needs n >= 3, got {n}");
    let s = &p.samples;
    let m = s.len();
    let radii = (0..n)
        .map(|i| {
            let t = grid_theta(i, n);
            // index of the first sample strictly past t
            let hi = s.partition_point(|q| q.theta <= t);
            let (lo, lo_theta) = if hi == 0 {
                (m - 1, s[m - 1].theta - TAU)
            } else {
                (hi - 1, s[hi - 1].theta)
            };
            if lo_theta == t || m == 1 {
                return s[lo].r;
            }
            let (next, next_theta) = if hi == m {
                (0, s[0].theta + TAU)
            } else {
                (hi, s[hi].theta)
            };
            let w = (t - lo_theta) / (next_theta - lo_theta);
            s[lo].r + w * (s[next].r - s[lo].r)
        })
        .collect();
    PolarSamples::uniform_unchecked(radii)
}

/// Averages each grid radius with its mirror image across the x-axis, so
/// that `r(theta) = r(-theta)` holds exactly on the grid.
pub fn symmetrize(p: &PolarSamples) -> Result<PolarSamples, ContourError> {
    let n = p.check_mirror_grid()?;
    let samples = (0..n)
        .map(|i| PolarSample {
            theta: p.samples[i].theta,
            r: (p.samples[i].r + p.samples[mirror_index(i, n)].r) / 2.0,
        })
        .collect();
    Ok(PolarSamples {
        samples,
        uniform: true,
    })
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}
