//! Polar Fourier series models and their least-squares fits.
//!
//! A model is `r(theta) = c + sum_k (a_k cos(k theta) + b_k sin(k theta))`
//! over a finite, sparse set of harmonics. The constant `c` is never a free
//! parameter of a fit: callers fix it (normally to the mean sampled radius)
//! and the fit solves for the harmonic coefficients only.

use std::fmt;

use thiserror::Error;

use crate::contour::{grid_theta, PolarSamples};
use crate::linalg::{cholesky_solve, SymMatrix};

/// Harmonic/coefficient pairs of the four-term front-view elephant,
/// `r = 47.84 cos θ − 51.12 cos 3θ − 20.43 cos 7θ + 31.58 cos 8θ + c`.
pub const ELEPHANT_COSINE_TERMS: [(u32, f64); 4] =
    [(1, 47.84), (3, -51.12), (7, -20.43), (8, 31.58)];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("harmonic k = {0} must be at least 1")]
    NonPositiveHarmonic(i64),
    #[error("harmonics must be strictly increasing, found k = {prev} followed by k = {next}")]
    UnsortedHarmonics { prev: u32, next: u32 },
    #[error("coefficient for k = {0} is not finite")]
    NonFinite(u32),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("HarmonicTooHigh: k = {k} aliases on a {n}-sample grid (need k < n/2)")]
    HarmonicTooHigh { k: u32, n: usize },
    #[error("HarmonicTooHigh: harmonic k = 0 is the constant term, not a fitted harmonic")]
    ZeroHarmonic,
    #[error(
        "Underdetermined: {coefficients} free coefficients cannot be resolved from {n} samples"
    )]
    Underdetermined { coefficients: usize, n: usize },
    #[error("NotUniform: samples are not on a uniform angular grid")]
    NotUniform,
}

impl FitError {
    pub fn kind(&self) -> &'static str {
        match self {
            FitError::HarmonicTooHigh { .. } | FitError::ZeroHarmonic => "HarmonicTooHigh",
            FitError::Underdetermined { .. } => "Underdetermined",
            FitError::NotUniform => "NotUniform",
        }
    }
}

/// One harmonic of a model: `a cos(k theta) + b sin(k theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub k: u32,
    pub a: f64,
    pub b: f64,
}

impl Term {
    pub fn cosine(k: u32, a: f64) -> Self {
        Term { k, a, b: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourierModel {
    c: f64,
    terms: Vec<Term>,
}

impl FourierModel {
    pub fn new(c: f64, terms: Vec<Term>) -> Result<Self, ModelError> {
        if !c.is_finite() {
            return Err(ModelError::NonFinite(0));
        }
        for t in &terms {
            if t.k == 0 {
                return Err(ModelError::NonPositiveHarmonic(0));
            }
            if !t.a.is_finite() || !t.b.is_finite() {
                return Err(ModelError::NonFinite(t.k));
            }
        }
        if let Some(w) = terms.windows(2).find(|w| w[1].k <= w[0].k) {
            return Err(ModelError::UnsortedHarmonics {
                prev: w[0].k,
                next: w[1].k,
            });
        }
        Ok(FourierModel { c, terms })
    }

    pub fn constant(c: f64) -> Self {
        FourierModel { c, terms: vec![] }
    }

    /// The four-coefficient elephant with the given constant.
    pub fn elephant(c: f64) -> Self {
        let terms = ELEPHANT_COSINE_TERMS
            .iter()
            .map(|&(k, a)| Term::cosine(k, a))
            .collect();
        FourierModel::new(c, terms).expect("elephant coefficients are valid")
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn harmonics(&self) -> Vec<u32> {
        self.terms.iter().map(|t| t.k).collect()
    }

    /// True when every sine coefficient is zero, i.e. `r(theta) = r(-theta)`.
    pub fn is_symmetric(&self) -> bool {
        self.terms.iter().all(|t| t.b == 0.0)
    }

    /// Number of harmonic coefficients (`a` and `b` counted separately) that
    /// are not exactly zero. The constant is not counted.
    pub fn nonzero_count(&self) -> usize {
        self.parameter_vector().len()
    }

    /// Non-zero harmonic coefficients in harmonic order, cosine before sine.
    pub fn parameter_vector(&self) -> Vec<f64> {
        self.terms
            .iter()
            .flat_map(|t| [t.a, t.b])
            .filter(|&v| v != 0.0)
            .collect()
    }

    pub fn evaluate(&self, theta: f64) -> f64 {
        self.terms.iter().fold(self.c, |acc, t| {
            let kt = t.k as f64 * theta;
            // cos is even; evaluating at |k theta| keeps r(theta) = r(-theta) bit-exact
            let mut acc = acc + t.a * kt.abs().cos();
            if t.b != 0.0 {
                acc += t.b * kt.sin();
            }
            acc
        })
    }
}

impl fmt::Display for FourierModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r = {}", self.c)?;
        for t in &self.terms {
            if t.a != 0.0 {
                write!(f, " {:+} cos({}θ)", t.a, t.k)?;
            }
            if t.b != 0.0 {
                write!(f, " {:+} sin({}θ)", t.b, t.k)?;
            }
        }
        Ok(())
    }
}

/// `c + sum (a cos k theta + b sin k theta)`; periodic in `theta` with period 2 pi.
pub fn evaluate(m: &FourierModel, theta: f64) -> f64 {
    m.evaluate(theta)
}

/// Location of the most negative radius on an evaluated grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NegativeRadius {
    pub index: usize,
    pub theta: f64,
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridEvaluation {
    pub samples: PolarSamples,
    /// Set when the model dips below zero radius somewhere on the grid.
    pub negative_radius: Option<NegativeRadius>,
}

/// Evaluates the model on the `n`-point uniform grid.
pub fn evaluate_grid(m: &FourierModel, n: usize) -> GridEvaluation {
    assert!(n >= 3, "evaluate_grid needs n >= 3, got {n}");
    let radii: Vec<f64> = (0..n).map(|i| m.evaluate(grid_theta(i, n))).collect();
    let negative_radius = radii
        .iter()
        .enumerate()
        .filter(|(_, &r)| r < 0.0)
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(index, &r)| NegativeRadius {
            index,
            theta: grid_theta(index, n),
            r,
        });
    GridEvaluation {
        samples: PolarSamples::uniform_unchecked(radii),
        negative_radius,
    }
}

/// Mean sampled radius.
pub fn estimate_constant(p: &PolarSamples) -> f64 {
    p.radii().sum::<f64>() / p.len() as f64
}

/// Sum of squared radial residuals.
pub fn sse(p: &PolarSamples, m: &FourierModel) -> f64 {
    p.samples()
        .iter()
        .map(|s| {
            let e = s.r - m.evaluate(s.theta);
            e * e
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Component {
    Cos,
    Sin,
}

/// A single basis function `cos(k theta)` or `sin(k theta)`.
///
/// Ordered by harmonic first, cosine before sine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisFn {
    pub k: u32,
    pub component: Component,
}

impl BasisFn {
    pub fn cos(k: u32) -> Self {
        BasisFn {
            k,
            component: Component::Cos,
        }
    }

    pub fn sin(k: u32) -> Self {
        BasisFn {
            k,
            component: Component::Sin,
        }
    }

    pub fn eval(self, theta: f64) -> f64 {
        let kt = self.k as f64 * theta;
        match self.component {
            Component::Cos => kt.abs().cos(),
            Component::Sin => kt.sin(),
        }
    }
}

impl fmt::Display for BasisFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.component {
            Component::Cos => write!(f, "cos({}θ)", self.k),
            Component::Sin => write!(f, "sin({}θ)", self.k),
        }
    }
}

fn check_harmonic(k: u32, n: usize) -> Result<(), FitError> {
    if k == 0 {
        Err(FitError::ZeroHarmonic)
    } else if 2 * k as usize >= n {
        Err(FitError::HarmonicTooHigh { k, n })
    } else {
        Ok(())
    }
}

/// Least-squares fit over an explicit set of basis functions with the
/// constant held at `c`. Returns the fitted model and its SSE.
///
/// The basis is sorted and deduplicated first, so the same set always
/// produces a bit-identical result regardless of the order it was given in.
pub fn fit_basis(
    p: &PolarSamples,
    basis: &[BasisFn],
    c: f64,
) -> Result<(FourierModel, f64), FitError> {
    let n = p.len();
    let mut basis = basis.to_vec();
    basis.sort_unstable();
    basis.dedup();
    for b in &basis {
        check_harmonic(b.k, n)?;
    }
    let m = basis.len();
    if m >= n {
        return Err(FitError::Underdetermined { coefficients: m, n });
    }

    // design matrix, column-major by basis function
    let columns: Vec<Vec<f64>> = basis
        .iter()
        .map(|b| p.thetas().map(|t| b.eval(t)).collect())
        .collect();
    let target: Vec<f64> = p.radii().map(|r| r - c).collect();
    let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(x, y)| x * y).sum::<f64>();

    let mut gram = SymMatrix::zeros(m);
    let mut rhs = vec![0.0; m];
    for i in 0..m {
        for j in 0..=i {
            let g = dot(&columns[i], &columns[j]);
            gram.set(i, j, g);
            gram.set(j, i, g);
        }
        rhs[i] = dot(&columns[i], &target);
    }
    let coef =
        cholesky_solve(&gram, &rhs).ok_or(FitError::Underdetermined { coefficients: m, n })?;

    let mut terms: Vec<Term> = Vec::new();
    for (b, &v) in basis.iter().zip(&coef) {
        if terms.last().map(|t| t.k) != Some(b.k) {
            terms.push(Term {
                k: b.k,
                a: 0.0,
                b: 0.0,
            });
        }
        let term = terms.last_mut().expect("pushed above");
        match b.component {
            Component::Cos => term.a = v,
            Component::Sin => term.b = v,
        }
    }
    let model = FourierModel { c, terms };
    let loss = sse(p, &model);
    Ok((model, loss))
}

/// Least-squares fit over the given harmonics with the constant fixed at `c`.
///
/// Cosine-only when `include_sine` is false; otherwise each harmonic carries
/// both a cosine and a sine coefficient.
pub fn ols_fit(
    p: &PolarSamples,
    harmonics: &[u32],
    c: f64,
    include_sine: bool,
) -> Result<(FourierModel, f64), FitError> {
    let basis: Vec<BasisFn> = harmonics
        .iter()
        .flat_map(|&k| {
            let sine = include_sine.then(|| BasisFn::sin(k));
            std::iter::once(BasisFn::cos(k)).chain(sine)
        })
        .collect();
    fit_basis(p, &basis, c)
}

/// `(2/n) sum (r_i - c) cos(k theta_i)`: the cosine coefficient of harmonic
/// `k` on a uniform grid, where the basis is orthogonal.
pub fn projection_coefficient(p: &PolarSamples, k: u32, c: f64) -> Result<f64, FitError> {
    if !p.is_uniform() {
        return Err(FitError::NotUniform);
    }
    let n = p.len();
    check_harmonic(k, n)?;
    let basis = BasisFn::cos(k);
    let sum: f64 = p
        .samples()
        .iter()
        .map(|s| (s.r - c) * basis.eval(s.theta))
        .sum();
    Ok(2.0 * sum / n as f64)
}

/// Outcome of fitting a sparse model.
#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub model: FourierModel,
    /// Sum of squared radial residuals.
    pub sse: f64,
    pub rmse: f64,
    pub selected_harmonics: Vec<u32>,
    pub parameter_vector: Vec<f64>,
    pub candidates_evaluated: u64,
}

impl FitReport {
    pub fn new(model: FourierModel, sse: f64, n: usize, candidates_evaluated: u64) -> Self {
        FitReport {
            rmse: (sse / n as f64).sqrt(),
            selected_harmonics: model.harmonics(),
            parameter_vector: model.parameter_vector(),
            sse,
            model,
            candidates_evaluated,
        }
    }
}
