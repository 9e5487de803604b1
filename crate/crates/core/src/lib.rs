//! Sparse polar Fourier fitting of closed, star-shaped 2D contours.
//!
//! A contour is converted to radius-versus-angle samples about its vertex
//! centroid and approximated by
//!
//! ```text
//! r(θ) = c + Σ_k (a_k cos kθ + b_k sin kθ)
//! ```
//!
//! with exactly `K` harmonic coefficients allowed to be non-zero. With the
//! default mirror symmetry about the x-axis only cosines are used, which is
//! how a four-coefficient front-view elephant
//! (`47.84 cos θ − 51.12 cos 3θ − 20.43 cos 7θ + 31.58 cos 8θ + r̄`) arises.
//!
//! ```
//! use elephant_fit::fourier::{evaluate_grid, estimate_constant, FourierModel};
//! use elephant_fit::select::{exhaustive_select, FitConfig};
//!
//! let samples = evaluate_grid(&FourierModel::elephant(100.0), 100).samples;
//! let c = estimate_constant(&samples);
//! let report = exhaustive_select(&samples, &FitConfig::default(), c).unwrap();
//! assert_eq!(report.selected_harmonics, vec![1, 3, 7, 8]);
//! ```

pub mod cli;
pub mod contour;
pub mod fourier;
mod linalg;
pub mod pipeline;
pub mod render;
pub mod select;

pub use contour::{Contour, Point, PolarSample, PolarSamples};
pub use fourier::{FitReport, FourierModel, Term};
pub use select::{FitConfig, Strategy, Symmetry};
