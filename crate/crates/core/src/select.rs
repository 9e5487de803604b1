//! Choosing which harmonics carry the non-zero coefficients.
//!
//! Every selector works over a pool of basis functions: `cos(k theta)` for
//! `k = 1..=k_max` under x-axis symmetry, and additionally `sin(k theta)`
//! without it. A sparsity budget of `K` means `K` basis functions from the
//! pool, so with `Symmetry::None` an `a_k` and a `b_k` count separately.
//!
//! SSE values within a tiny relative tolerance of the best are treated as
//! ties and resolved toward the lexicographically smallest basis set, so the
//! result does not depend on rounding noise or on evaluation order.

use itertools::Itertools;
use rayon::prelude::*;
use thiserror::Error;

use crate::contour::{ContourError, PolarSamples};
use crate::fourier::{fit_basis, BasisFn, FitError, FitReport, FourierModel};

/// Relative (to the zero-harmonic SSE) tolerance under which two SSE values tie.
pub const TIE_RTOL: f64 = 1e-12;

/// Samples count as mirror-symmetric when `|r(θ) - r(-θ)|` stays within this
/// fraction of `max(1, max |r|)`.
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

/// Upper bound on the number of subsets an exhaustive search will visit.
pub const MAX_EXHAUSTIVE_SUBSETS: u64 = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Symmetry {
    /// `r(θ) = r(-θ)`: cosine terms only.
    #[default]
    XAxis,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    #[default]
    Exhaustive,
    Greedy,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FitConfig {
    /// Uniform sample count.
    pub n: usize,
    /// Largest harmonic considered.
    pub k_max: u32,
    /// Exact number of basis functions in the selected model.
    pub sparsity_k: usize,
    pub symmetry: Symmetry,
    pub strategy: Strategy,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            n: 100,
            k_max: 10,
            sparsity_k: 4,
            symmetry: Symmetry::XAxis,
            strategy: Strategy::Exhaustive,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SelectError {
    #[error("InvalidConfig: {0}")]
    InvalidConfig(String),
    #[error(
        "SymmetryViolated: |r(θ) - r(-θ)| reaches {deviation:e}, above tolerance {tolerance:e}"
    )]
    SymmetryViolated { deviation: f64, tolerance: f64 },
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Contour(#[from] ContourError),
}

impl SelectError {
    pub fn kind(&self) -> &'static str {
        match self {
            SelectError::InvalidConfig(_) => "InvalidConfig",
            SelectError::SymmetryViolated { .. } => "SymmetryViolated",
            SelectError::Fit(e) => e.kind(),
            SelectError::Contour(e) => e.kind(),
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<(), SelectError> {
        let invalid = |msg: String| Err(SelectError::InvalidConfig(msg));
        if self.n < 3 {
            return invalid(format!("n = {} is below the minimum of 3", self.n));
        }
        if self.k_max == 0 {
            return invalid("k_max must be at least 1".into());
        }
        if 2 * self.k_max as usize >= self.n {
            return invalid(format!(
                "k_max = {} must stay below n/2 = {}",
                self.k_max,
                self.n as f64 / 2.0
            ));
        }
        let pool = self.pool_size();
        if self.sparsity_k == 0 || self.sparsity_k > pool {
            return invalid(format!(
                "sparsity = {} must lie in 1..={pool} for this k_max and symmetry",
                self.sparsity_k
            ));
        }
        Ok(())
    }

    fn pool_size(&self) -> usize {
        match self.symmetry {
            Symmetry::XAxis => self.k_max as usize,
            Symmetry::None => 2 * self.k_max as usize,
        }
    }

    /// Candidate basis functions in tie-break order.
    pub fn candidate_pool(&self) -> Vec<BasisFn> {
        (1..=self.k_max)
            .flat_map(|k| {
                let sine = (self.symmetry == Symmetry::None).then(|| BasisFn::sin(k));
                std::iter::once(BasisFn::cos(k)).chain(sine)
            })
            .collect()
    }
}

fn check_inputs(p: &PolarSamples, cfg: &FitConfig) -> Result<(), SelectError> {
    cfg.validate()?;
    if !p.is_uniform() {
        return Err(FitError::NotUniform.into());
    }
    if cfg.symmetry == Symmetry::XAxis {
        let deviation = p.mirror_asymmetry()?;
        let scale = p.radii().map(f64::abs).fold(1.0, f64::max);
        let tolerance = SYMMETRY_TOLERANCE * scale;
        if deviation > tolerance {
            return Err(SelectError::SymmetryViolated {
                deviation,
                tolerance,
            });
        }
    }
    Ok(())
}

fn tie_tolerance(p: &PolarSamples, c: f64) -> f64 {
    let baseline: f64 = p.radii().map(|r| (r - c) * (r - c)).sum();
    TIE_RTOL * baseline
}

/// Index of the first entry whose SSE is within `tol` of the minimum.
fn first_near_min(sses: &[f64], tol: f64) -> Option<usize> {
    let best = sses.iter().copied().min_by(f64::total_cmp)?;
    sses.iter().position(|&s| s <= best + tol)
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Fits every `sparsity_k`-subset of the candidate pool and keeps the one
/// with the smallest SSE.
pub fn exhaustive_select(
    p: &PolarSamples,
    cfg: &FitConfig,
    c: f64,
) -> Result<FitReport, SelectError> {
    check_inputs(p, cfg)?;
    let pool = cfg.candidate_pool();
    let count = binomial(pool.len() as u64, cfg.sparsity_k as u64);
    if count > MAX_EXHAUSTIVE_SUBSETS {
        return Err(SelectError::InvalidConfig(format!(
            "{count} subsets exceed the exhaustive limit of {MAX_EXHAUSTIVE_SUBSETS}; use the greedy strategy"
        )));
    }

    // combinations() yields subsets in lexicographic order of pool position
    let subsets: Vec<Vec<BasisFn>> = pool.into_iter().combinations(cfg.sparsity_k).collect();
    let sses = subsets
        .par_iter()
        .map(|s| fit_basis(p, s, c).map(|(_, loss)| loss))
        .collect::<Result<Vec<f64>, FitError>>()?;

    let best = first_near_min(&sses, tie_tolerance(p, c)).expect("at least one subset");
    let (model, loss) = fit_basis(p, &subsets[best], c)?;
    Ok(FitReport::new(model, loss, p.len(), subsets.len() as u64))
}

/// Forward selection: grows the basis one function at a time, each step
/// adding the candidate whose joint refit lowers SSE the most.
pub fn greedy_select(p: &PolarSamples, cfg: &FitConfig, c: f64) -> Result<FitReport, SelectError> {
    check_inputs(p, cfg)?;
    let tol = tie_tolerance(p, c);
    let mut remaining = cfg.candidate_pool();
    let mut chosen: Vec<BasisFn> = Vec::with_capacity(cfg.sparsity_k);
    let mut evaluated = 0u64;
    let mut current: Option<(FourierModel, f64)> = None;

    for _ in 0..cfg.sparsity_k {
        let fits = remaining
            .par_iter()
            .map(|&b| {
                let mut trial = chosen.clone();
                trial.push(b);
                fit_basis(p, &trial, c)
            })
            .collect::<Result<Vec<_>, FitError>>()?;
        evaluated += fits.len() as u64;
        let sses: Vec<f64> = fits.iter().map(|(_, loss)| *loss).collect();
        let pick = first_near_min(&sses, tol).expect("pool is not exhausted");
        chosen.push(remaining.remove(pick));
        current = fits.into_iter().nth(pick);
    }

    let (model, loss) = current.expect("sparsity_k >= 1");
    Ok(FitReport::new(model, loss, p.len(), evaluated))
}

/// Least-squares fit over the whole candidate pool.
pub fn dense_fit(p: &PolarSamples, cfg: &FitConfig, c: f64) -> Result<FitReport, SelectError> {
    let dense = FitConfig {
        sparsity_k: cfg.pool_size(),
        ..cfg.clone()
    };
    check_inputs(p, &dense)?;
    let (model, loss) = fit_basis(p, &dense.candidate_pool(), c)?;
    Ok(FitReport::new(model, loss, p.len(), 1))
}

/// Runs the selector named by `cfg.strategy`.
pub fn select(p: &PolarSamples, cfg: &FitConfig, c: f64) -> Result<FitReport, SelectError> {
    match cfg.strategy {
        Strategy::Exhaustive => exhaustive_select(p, cfg, c),
        Strategy::Greedy => greedy_select(p, cfg, c),
    }
}
