//! The three error measures evaluated per interstitial point: approximation,
//! combined and extrapolation error.

use serde::{Deserialize, Serialize};

use crate::approx::{polyval, CoupledFit};
use crate::num::Float;
use crate::series::SampleWindow;

/// The three per-window error measures, all in squared signal units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorTriple<F> {
    /// Summed squared residuals of each polynomial on its own side.
    pub e_approx: F,
    /// Squared norm of the difference of the two models' pointwise errors.
    pub e_combined: F,
    /// Summed squared residuals of each polynomial on the opposite side.
    pub e_extrap: F,
}

fn side_residual_sq<F: Float>(x: &[F], y: &[F], coeffs: &[F]) -> F {
    x.iter()
        .zip(y.iter())
        .map(|(&xi, &yi)| {
            let r = yi - polyval(coeffs, xi);
            r * r
        })
        .fold(F::zero(), |a, b| a + b)
}

/// Approximation error: each polynomial judged on its own support.
pub fn approximation_error<F: Float>(fit: &CoupledFit<F>, window: &SampleWindow<F>) -> F {
    side_residual_sq(&window.x_left, &window.y_left, fit.alpha.as_slice())
        + side_residual_sq(&window.x_right, &window.y_right, fit.beta.as_slice())
}

/// Combined approximation-extrapolation error.
///
/// With the continuity constraints in force and degrees equal to the order,
/// the two models differ only in their leading terms, so the pointwise error
/// difference collapses to `(alpha_n - beta_n) x^n` and its squared norm is
/// proportional to the squared coefficient jump with a purely geometric
/// factor.
pub fn combined_error<F: Float>(fit: &CoupledFit<F>, window: &SampleWindow<F>, order: usize) -> F {
    let d_l = fit.alpha.len() - 1;
    let d_r = fit.beta.len() - 1;
    let jump = fit.alpha[d_l - order] - fit.beta[d_r - order];
    jump * jump * window_power_sum(window, order)
}

/// The geometric factor of the combined error: the sum of `x^(2n)` over all
/// window abscissae.
pub fn window_power_sum<F: Float>(window: &SampleWindow<F>, order: usize) -> F {
    window
        .all_x()
        .map(|xi| xi.powi(2 * order as i32))
        .fold(F::zero(), |a, b| a + b)
}

/// Closed form of the continuous combined error on `[x_min, x_max]`.
pub fn analytic_combined_error<F: Float>(
    alpha_n: F,
    beta_n: F,
    x_min: F,
    x_max: F,
    order: usize,
) -> F {
    let jump = alpha_n - beta_n;
    let p = 2 * order as i32 + 1;
    let k = (x_max.powi(p) - x_min.powi(p)) / F::of(f64::from(p));
    jump * jump * k
}

/// Extrapolation error: each polynomial judged on the opposite side's
/// samples.
pub fn extrapolation_error<F: Float>(fit: &CoupledFit<F>, window: &SampleWindow<F>) -> F {
    side_residual_sq(&window.x_left, &window.y_left, fit.beta.as_slice())
        + side_residual_sq(&window.x_right, &window.y_right, fit.alpha.as_slice())
}

/// All three error measures of one fit.
pub fn error_triple<F: Float>(
    fit: &CoupledFit<F>,
    window: &SampleWindow<F>,
    order: usize,
) -> ErrorTriple<F> {
    ErrorTriple {
        e_approx: approximation_error(fit, window),
        e_combined: combined_error(fit, window, order),
        e_extrap: extrapolation_error(fit, window),
    }
}
