//! Contour-to-report pipeline: center, convert to polar, resample, optionally
//! symmetrize, fix the constant at the mean radius, then select harmonics.

use thiserror::Error;

use crate::contour::{
    center, resample_uniform, symmetrize, to_polar, Contour, ContourError, PolarSamples,
};
use crate::fourier::{estimate_constant, FitReport};
use crate::select::{select, FitConfig, SelectError, Symmetry};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(SelectError),
    #[error("polar: {0}")]
    Polar(ContourError),
    #[error("symmetrize: {0}")]
    Symmetrize(ContourError),
    #[error("select: {0}")]
    Select(SelectError),
}

impl PipelineError {
    pub fn stage(&self) -> &'static str {
        match self {
            PipelineError::Config(_) => "config",
            PipelineError::Polar(_) => "polar",
            PipelineError::Symmetrize(_) => "symmetrize",
            PipelineError::Select(_) => "select",
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            PipelineError::Config(e) | PipelineError::Select(e) => e.kind(),
            PipelineError::Polar(e) | PipelineError::Symmetrize(e) => e.kind(),
        }
    }
}

/// Uniform polar samples ready for fitting, plus the constant term.
#[derive(Debug, Clone, PartialEq)]
pub struct Prepared {
    pub samples: PolarSamples,
    pub c: f64,
}

pub fn prepare(contour: &Contour, cfg: &FitConfig) -> Result<Prepared, PipelineError> {
    cfg.validate().map_err(PipelineError::Config)?;
    let polar = to_polar(&center(contour)).map_err(PipelineError::Polar)?;
    let mut samples = resample_uniform(&polar, cfg.n);
    if cfg.symmetry == Symmetry::XAxis {
        samples = symmetrize(&samples).map_err(PipelineError::Symmetrize)?;
    }
    let c = estimate_constant(&samples);
    Ok(Prepared { samples, c })
}

pub fn fit_contour(contour: &Contour, cfg: &FitConfig) -> Result<FitReport, PipelineError> {
    let Prepared { samples, c } = prepare(contour, cfg)?;
    select(&samples, cfg, c).map_err(PipelineError::Select)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour::{grid_theta, Point};
    use crate::fourier::{FourierModel, Term};

    fn contour_from_model(m: &FourierModel, n: usize, offset: (f64, f64)) -> Contour {
        Contour::new(
            (0..n)
                .map(|i| {
                    let t = grid_theta(i, n);
                    let r = m.evaluate(t);
                    Point::new(offset.0 + r * t.cos(), offset.1 + r * t.sin())
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn recovers_model_from_contour() {
        let m = FourierModel::new(
            20.0,
            vec![
                Term::cosine(2, 3.0),
                Term::cosine(5, -1.5),
                Term::cosine(9, 0.75),
            ],
        )
        .unwrap();
        let contour = contour_from_model(&m, 100, (7.0, -2.0));
        let cfg = FitConfig {
            sparsity_k: 3,
            ..FitConfig::default()
        };
        let r = fit_contour(&contour, &cfg).unwrap();
        assert_eq!(r.selected_harmonics, vec![2, 5, 9]);
        assert!((r.model.c() - 20.0).abs() < 1e-9);
        for (got, want) in r.model.terms().iter().zip(m.terms()) {
            assert!((got.a - want.a).abs() < 1e-9);
        }
    }

    #[test]
    fn stage_names() {
        let square = Contour::new(vec![
            Point::new(1.0, 1.0),
            Point::new(2.0, 1.0),
            Point::new(2.0, 2.0),
            Point::new(1.0, 2.0),
        ])
        .unwrap();
        let bad = FitConfig {
            sparsity_k: 0,
            ..FitConfig::default()
        };
        let e = fit_contour(&square, &bad).unwrap_err();
        assert_eq!((e.stage(), e.kind()), ("config", "InvalidConfig"));
        let odd = FitConfig {
            n: 101,
            ..FitConfig::default()
        };
        let e = fit_contour(&square, &odd).unwrap_err();
        assert_eq!((e.stage(), e.kind()), ("symmetrize", "OddSampleCount"));
    }
}
