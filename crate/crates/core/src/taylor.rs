//! Taylor-coefficient differences and covariance propagation.
//!
//! The local frame puts the interstitial point at the origin, so polynomial
//! coefficients are Maclaurin coefficients and the selector applied to the
//! stacked coefficients yields the jump estimate directly. Because the fit
//! is linear in the ordinates, the observation covariance propagates through
//! the estimator in closed form.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::approx::CoupledFit;
use crate::error::{Error, Result};
use crate::num::Float;

/// Estimated jump of the order-`n` Maclaurin coefficient with its variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaEstimate<F> {
    /// Difference of the order-`n` Maclaurin coefficients, left minus right.
    pub delta_t: F,
    /// Variance of the difference.
    pub variance: F,
    /// Derivative order `n`.
    pub order: usize,
}

/// Difference of the order-`n` Maclaurin coefficients, `d^T gamma`.
pub fn delta_taylor<F: Float>(fit: &CoupledFit<F>, selector: &DVector<F>) -> Result<F> {
    if selector.len() != fit.gamma.len() {
        return Err(Error::DimensionMismatch(format!(
            "selector length {} does not match coefficient count {}",
            selector.len(),
            fit.gamma.len()
        )));
    }
    Ok(selector.dot(&fit.gamma))
}

/// Pushes the observation covariance through the linear estimator.
///
/// Returns the coefficient covariance together with the scalar variance of
/// the selected coefficient difference.
pub fn propagate_covariance<F: Float>(
    estimator: &DMatrix<F>,
    lambda_y: &DMatrix<F>,
    selector: &DVector<F>,
) -> Result<(DMatrix<F>, F)> {
    let m = lambda_y.nrows();
    if lambda_y.ncols() != m || estimator.ncols() != m {
        return Err(Error::DimensionMismatch(format!(
            "covariance is {}x{}, estimator has {} columns",
            lambda_y.nrows(),
            lambda_y.ncols(),
            estimator.ncols()
        )));
    }
    if selector.len() != estimator.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "selector length {} does not match estimator rows {}",
            selector.len(),
            estimator.nrows()
        )));
    }
    check_psd(lambda_y)?;
    let lambda_gamma = estimator * lambda_y * estimator.transpose();
    // Symmetrize: the product is symmetric up to rounding.
    let lambda_gamma = (&lambda_gamma + lambda_gamma.transpose()) * F::of(0.5);
    let lambda_delta = (lambda_gamma.clone() * selector).dot(selector);
    Ok((lambda_gamma, lambda_delta.max(F::zero())))
}

fn check_psd<F: Float>(m: &DMatrix<F>) -> Result<()> {
    let scale = m.iter().fold(F::zero(), |a, &b| a.max(b.abs()));
    let sym_tol = F::of(100.0) * F::default_epsilon() * scale.max(F::one());
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            if (m[(i, j)] - m[(j, i)]).abs() > sym_tol {
                return Err(Error::NotPsd);
            }
        }
    }
    let eig = m.clone().symmetric_eigen();
    let max_eig = eig
        .eigenvalues
        .iter()
        .fold(F::zero(), |a, &b| a.max(b.abs()));
    let tol = F::default_epsilon().sqrt() * max_eig.max(F::one());
    if eig.eigenvalues.iter().any(|&l| l < -tol) {
        return Err(Error::NotPsd);
    }
    Ok(())
}

/// Two-sided z-test of the estimated jump against zero.
///
/// Returns whether the jump is significant at the given confidence level
/// together with the z-score. A zero-variance estimate is trivially
/// significant when the jump is nonzero and not significant otherwise.
pub fn significance<F: Float>(est: &DeltaEstimate<F>, confidence: f64) -> Result<(bool, F)> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::InvalidConfidence(confidence));
    }
    if est.variance < F::zero() {
        return Err(Error::NegativeVariance(est.variance.as_f64()));
    }
    let z = z_score(est.delta_t, est.variance);
    let q = two_sided_quantile(confidence);
    Ok((z.abs().as_f64() > q, z))
}

/// z-score of a jump estimate; infinite when the variance vanishes but the
/// jump does not, zero when both vanish.
pub(crate) fn z_score<F: Float>(delta_t: F, variance: F) -> F {
    if variance > F::zero() {
        delta_t / variance.sqrt()
    } else if delta_t == F::zero() {
        F::zero()
    } else if delta_t > F::zero() {
        F::of(f64::INFINITY)
    } else {
        F::of(f64::NEG_INFINITY)
    }
}

/// Two-sided standard-normal quantile for the given confidence level.
pub(crate) fn two_sided_quantile(confidence: f64) -> f64 {
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    normal.inverse_cdf(0.5 + 0.5 * confidence)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::{selector_vector, solve_coupled, ApproxConfig};
    use crate::series::{center_window, SampleSeries};
    use approx::assert_relative_eq;

    fn two_point_cfg() -> ApproxConfig {
        ApproxConfig {
            support_left: 2,
            support_right: 2,
            ..ApproxConfig::for_order(1)
        }
    }

    #[test]
    fn continuous_line_has_zero_jump() {
        let x = vec![-2.0, -1.0, 1.0, 2.0];
        let y: Vec<f64> = x.iter().map(|&v| 2.0 * v + 1.0).collect();
        let s = SampleSeries::new(x, y).unwrap();
        let cfg = two_point_cfg();
        let w = center_window(&s, 1, &cfg).unwrap();
        let fit = solve_coupled(&w, &cfg).unwrap();
        let d = selector_vector(1, 1, 1);
        assert_relative_eq!(delta_taylor(&fit, &d).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn slope_break_jump_is_minus_one() {
        let s = SampleSeries::new(vec![-2.0, -1.0, 1.0, 2.0], vec![-2.0, -1.0, 2.0, 4.0]).unwrap();
        let cfg = two_point_cfg();
        let w = center_window(&s, 1, &cfg).unwrap();
        let fit = solve_coupled(&w, &cfg).unwrap();
        let d = selector_vector(1, 1, 1);
        assert_relative_eq!(delta_taylor(&fit, &d).unwrap(), -1.0, epsilon = 1e-12);
    }

    #[test]
    fn selector_dimension_mismatch_rejected() {
        let s = SampleSeries::new(vec![-2.0, -1.0, 1.0, 2.0], vec![-2.0, -1.0, 2.0, 4.0]).unwrap();
        let cfg = two_point_cfg();
        let w = center_window(&s, 1, &cfg).unwrap();
        let fit = solve_coupled(&w, &cfg).unwrap();
        let d = selector_vector(1, 2, 2);
        assert!(matches!(
            delta_taylor(&fit, &d),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn zero_covariance_propagates_to_zero() {
        let s = SampleSeries::new(vec![-2.0, -1.0, 1.0, 2.0], vec![-2.0, -1.0, 2.0, 4.0]).unwrap();
        let cfg = two_point_cfg();
        let w = center_window(&s, 1, &cfg).unwrap();
        let fit = solve_coupled(&w, &cfg).unwrap();
        let d = selector_vector(1, 1, 1);
        let lambda_y = DMatrix::zeros(4, 4);
        let (lg, ld) = propagate_covariance(&fit.estimator, &lambda_y, &d).unwrap();
        assert!(lg.iter().all(|&v| v == 0.0));
        assert_eq!(ld, 0.0);
    }

    #[test]
    fn isotropic_noise_identity() {
        let s = SampleSeries::new(vec![-2.0, -1.0, 1.0, 2.0], vec![-2.0, -1.0, 2.0, 4.0]).unwrap();
        let cfg = two_point_cfg();
        let w = center_window(&s, 1, &cfg).unwrap();
        let fit = solve_coupled(&w, &cfg).unwrap();
        let d = selector_vector(1, 1, 1);
        let sigma2 = 0.25;
        let lambda_y = DMatrix::identity(4, 4) * sigma2;
        let (lg, _) = propagate_covariance(&fit.estimator, &lambda_y, &d).unwrap();
        let kkt = &fit.estimator * fit.estimator.transpose() * sigma2;
        assert_relative_eq!(lg, kkt, epsilon = 1e-12);
    }

    #[test]
    fn non_psd_covariance_rejected() {
        let s = SampleSeries::new(vec![-2.0, -1.0, 1.0, 2.0], vec![-2.0, -1.0, 2.0, 4.0]).unwrap();
        let cfg = two_point_cfg();
        let w = center_window(&s, 1, &cfg).unwrap();
        let fit = solve_coupled(&w, &cfg).unwrap();
        let d = selector_vector(1, 1, 1);
        let mut neg = DMatrix::identity(4, 4);
        neg[(0, 0)] = -1.0;
        assert_eq!(
            propagate_covariance(&fit.estimator, &neg, &d),
            Err(Error::NotPsd)
        );
        let mut asym = DMatrix::identity(4, 4);
        asym[(0, 1)] = 0.5;
        assert_eq!(
            propagate_covariance(&fit.estimator, &asym, &d),
            Err(Error::NotPsd)
        );
    }

    #[test]
    fn significance_examples() {
        let est = DeltaEstimate {
            delta_t: 0.0,
            variance: 0.04,
            order: 1,
        };
        let (sig, z) = significance(&est, 0.95).unwrap();
        assert!(!sig);
        assert_eq!(z, 0.0);

        let est = DeltaEstimate {
            delta_t: 1.0,
            variance: 0.01,
            order: 1,
        };
        let (sig, z) = significance(&est, 0.95).unwrap();
        assert!(sig);
        assert_relative_eq!(z, 10.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_variance_edge_cases() {
        let nonzero = DeltaEstimate {
            delta_t: 0.5_f64,
            variance: 0.0,
            order: 1,
        };
        let (sig, z) = significance(&nonzero, 0.99).unwrap();
        assert!(sig);
        assert!(z.is_infinite() && z > 0.0);

        let zero = DeltaEstimate {
            delta_t: 0.0,
            variance: 0.0,
            order: 1,
        };
        let (sig, z) = significance(&zero, 0.99).unwrap();
        assert!(!sig);
        assert_eq!(z, 0.0);
    }

    #[test]
    fn bad_confidence_rejected() {
        let est = DeltaEstimate {
            delta_t: 1.0,
            variance: 1.0,
            order: 1,
        };
        assert!(matches!(
            significance(&est, 0.0),
            Err(Error::InvalidConfidence(_))
        ));
        assert!(matches!(
            significance(&est, 1.0),
            Err(Error::InvalidConfidence(_))
        ));
    }

    #[test]
    fn quantile_matches_reference_values() {
        assert_relative_eq!(two_sided_quantile(0.95), 1.959964, epsilon = 1e-5);
        assert_relative_eq!(two_sided_quantile(0.99), 2.575829, epsilon = 1e-5);
    }
}
