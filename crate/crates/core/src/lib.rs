//! Detection of jump discontinuities in the n-th derivative of discretely
//! sampled signals.
//!
//! At every interstitial point (the midpoint between two adjacent samples)
//! two polynomials are fitted, one per side, coupled by constraints that
//! force continuity of the model up to derivative order `n - 1`. The
//! difference of the order-`n` Maclaurin coefficients of the two fits then
//! estimates the jump in the n-th derivative, with a variance obtained by
//! propagating the observation covariance through the linear estimator.
//! Scanning all interstitial points yields a profile whose gated peaks are
//! the detected discontinuities; those serve as knots for a B-spline model
//! of the data.

pub mod approx;
pub mod detector;
pub mod error;
pub mod num;
pub mod residuals;
pub mod series;
pub mod spline;
pub mod synthetic;
pub mod taylor;

pub use approx::{
    constraint_matrix, nullspace_basis, polyval, selector_vector, solve_coupled, vandermonde,
    ApproxConfig, CoupledFit,
};
pub use detector::{
    detect, estimate_noise_sigma, find_knots, scan, DetectOptions, DetectionReport, Knot,
    PointDiagnostics,
};
pub use error::{Error, Result};
pub use num::Float;
pub use residuals::{
    analytic_combined_error, approximation_error, combined_error, extrapolation_error, ErrorTriple,
};
pub use series::{center_window, SampleSeries, SampleWindow};
pub use spline::{fit_spline, SplineModel};
pub use synthetic::{run_monte_carlo, MonteCarloSummary, PiecewisePoly};
pub use taylor::{delta_taylor, propagate_covariance, significance, DeltaEstimate};

/// Double-precision aliases for the main pipeline types.
pub type Series64 = series::SampleSeries<f64>;
pub type Window64 = series::SampleWindow<f64>;
pub type Fit64 = approx::CoupledFit<f64>;
pub type Report64 = detector::DetectionReport<f64>;
pub type Spline64 = spline::SplineModel<f64>;
pub type Poly64 = synthetic::PiecewisePoly<f64>;

/// Single-precision aliases.
pub type Series32 = series::SampleSeries<f32>;
pub type Window32 = series::SampleWindow<f32>;
pub type Fit32 = approx::CoupledFit<f32>;
pub type Report32 = detector::DetectionReport<f32>;
pub type Spline32 = spline::SplineModel<f32>;
pub type Poly32 = synthetic::PiecewisePoly<f32>;
