//! Constrained coupled polynomial approximation at a single interstitial
//! point.
//!
//! Two polynomials are fitted simultaneously, one to the samples left of the
//! interstitial origin and one to the samples right of it, with homogeneous
//! linear constraints tying their low-order coefficients together. The
//! constrained least-squares problem is reduced to an unconstrained one by
//! projecting onto the null space of the constraint matrix; the resulting
//! linear estimator is kept so observation covariance can be pushed through
//! the computation afterwards.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Float;
use crate::series::SampleWindow;

/// Configuration of one coupled fit: discontinuity order, polynomial degrees
/// and support lengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxConfig {
    /// Derivative order `n` of the sought discontinuity (n >= 1).
    pub order: usize,
    /// Degree of the left polynomial (>= order).
    pub degree_left: usize,
    /// Degree of the right polynomial (>= order).
    pub degree_right: usize,
    /// Number of samples in the left block (>= degree_left + 1).
    pub support_left: usize,
    /// Number of samples in the right block (>= degree_right + 1).
    pub support_right: usize,
    /// Rescale each window's abscissae to [-1, 1] before solving, mapping
    /// the coefficients back afterwards. Off by default.
    pub normalize: bool,
    /// Condition-number limit on the reduced design matrix; beyond it the
    /// solve reports an ill-conditioned system.
    pub max_condition: f64,
}

impl ApproxConfig {
    /// Defaults for detecting a discontinuity of derivative order `n`:
    /// degrees equal to `n`, supports `max(8, 2(n + 1))` per side.
    pub fn for_order(n: usize) -> Self {
        let support = 8usize.max(2 * (n + 1));
        Self {
            order: n,
            degree_left: n,
            degree_right: n,
            support_left: support,
            support_right: support,
            normalize: false,
            max_condition: 1e12,
        }
    }

    /// Sets both support lengths.
    pub fn with_supports(mut self, left: usize, right: usize) -> Self {
        self.support_left = left;
        self.support_right = right;
        self
    }

    /// Sets both polynomial degrees.
    pub fn with_degrees(mut self, left: usize, right: usize) -> Self {
        self.degree_left = left;
        self.degree_right = right;
        self
    }

    /// Number of stacked coefficients, `degree_left + degree_right + 2`.
    pub fn coefficient_count(&self) -> usize {
        self.degree_left + self.degree_right + 2
    }

    /// Total window length, `support_left + support_right`.
    pub fn window_len(&self) -> usize {
        self.support_left + self.support_right
    }

    /// Checks the structural invariants.
    pub fn validate(&self) -> Result<()> {
        if self.order == 0 {
            return Err(Error::InvalidConfig(
                "order must be at least 1".to_string(),
            ));
        }
        if self.degree_left < self.order || self.degree_right < self.order {
            return Err(Error::InvalidConfig(format!(
                "degrees ({}, {}) must be at least the order {}",
                self.degree_left, self.degree_right, self.order
            )));
        }
        if self.support_left < self.degree_left + 1 || self.support_right < self.degree_right + 1 {
            return Err(Error::InvalidConfig(format!(
                "supports ({}, {}) must exceed the degrees ({}, {})",
                self.support_left, self.support_right, self.degree_left, self.degree_right
            )));
        }
        if !(self.max_condition > 1.0) {
            return Err(Error::InvalidConfig(format!(
                "condition limit must exceed 1 (got {})",
                self.max_condition
            )));
        }
        Ok(())
    }
}

/// Result of one coupled fit.
///
/// Coefficients are stored in descending powers: `alpha[0]` multiplies
/// `x^degree_left` and `alpha[degree_left]` is the constant term.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledFit<F: Float> {
    /// Coefficients of the left polynomial, descending powers.
    pub alpha: DVector<F>,
    /// Coefficients of the right polynomial, descending powers.
    pub beta: DVector<F>,
    /// Stacked coefficients `[alpha; beta]`.
    pub gamma: DVector<F>,
    /// Linear estimator mapping the stacked window ordinates to `gamma`.
    pub estimator: DMatrix<F>,
    /// Condition number of the reduced design matrix, for diagnostics.
    pub condition: f64,
}

/// Vandermonde matrix in descending powers: row `i` is
/// `[x_i^degree, ..., x_i, 1]`.
pub fn vandermonde<F: Float>(x: &[F], degree: usize) -> DMatrix<F> {
    let mut m = DMatrix::zeros(x.len(), degree + 1);
    for (i, &xi) in x.iter().enumerate() {
        let mut p = F::one();
        for j in (0..=degree).rev() {
            m[(i, j)] = p;
            p *= xi;
        }
    }
    m
}

/// Evaluates a polynomial given in descending powers by Horner's scheme.
pub fn polyval<F: Float>(coeffs: &[F], x: F) -> F {
    coeffs.iter().fold(F::zero(), |acc, &c| acc * x + c)
}

/// Constraint matrix `C` expressing the continuity conditions
/// `alpha_k = beta_k` for `k` in `[0, n)`.
///
/// Rows are ordered by descending coefficient order (the `k = n - 1` row
/// first), matching the descending-power layout of the stacked coefficient
/// vector.
pub fn constraint_matrix<F: Float>(n: usize, d_l: usize, d_r: usize) -> DMatrix<F> {
    let cols = d_l + d_r + 2;
    let mut c = DMatrix::zeros(n, cols);
    for row in 0..n {
        let k = n - 1 - row;
        c[(row, d_l - k)] = F::one();
        c[(row, d_l + 1 + d_r - k)] = -F::one();
    }
    c
}

/// Selector vector `d` with `d^T gamma = alpha_n - beta_n`.
pub fn selector_vector<F: Float>(n: usize, d_l: usize, d_r: usize) -> DVector<F> {
    let mut d = DVector::zeros(d_l + d_r + 2);
    d[d_l - n] = F::one();
    d[d_l + 1 + d_r - n] = -F::one();
    d
}

/// Orthonormal basis of the null space of `c`, computed from the full
/// orthogonal factor of a Householder QR of `c^T`.
///
/// Requires `c` to have full row rank; a rank-deficient input (which cannot
/// arise from [`constraint_matrix`]) is reported as an error.
pub fn nullspace_basis<F: Float>(c: &DMatrix<F>) -> Result<DMatrix<F>> {
    let rows = c.nrows();
    let cols = c.ncols();
    if rows >= cols {
        return Err(Error::RankDeficient);
    }
    let qr = c.transpose().qr();
    let r = qr.r();
    let max_diag = (0..rows)
        .map(|i| r[(i, i)].abs())
        .fold(F::zero(), |a, b| a.max(b));
    let tol = F::of(cols as f64) * F::default_epsilon() * max_diag.max(F::one());
    if (0..rows).any(|i| r[(i, i)].abs() <= tol) {
        return Err(Error::RankDeficient);
    }
    // q_tr_mul applies the full implicit Q^T; the rows of Q^T beyond the
    // rank span the orthogonal complement of the row space of c.
    let mut q_t = DMatrix::identity(cols, cols);
    qr.q_tr_mul(&mut q_t);
    Ok(q_t.rows(rows, cols - rows).transpose())
}

/// Power-rescaling diagonal used to map coefficients of a polynomial in
/// `x / scale` back to coefficients in `x`.
fn denormalize_scales<F: Float>(d_l: usize, d_r: usize, scale: F) -> DVector<F> {
    let mut s = DVector::from_element(d_l + d_r + 2, F::one());
    let inv = F::one() / scale;
    for j in 0..=d_l {
        s[j] = inv.powi((d_l - j) as i32);
    }
    for j in 0..=d_r {
        s[d_l + 1 + j] = inv.powi((d_r - j) as i32);
    }
    s
}

/// Solves the coupled constrained least-squares problem on one window.
///
/// Minimizes the stacked residual subject to the continuity constraints by
/// restricting the coefficients to the null space of the constraint matrix
/// and solving the reduced problem with a rank-revealing factorization. The
/// returned estimator maps the stacked ordinates `[y_left; y_right]` linearly
/// onto the stacked coefficients.
pub fn solve_coupled<F: Float>(window: &SampleWindow<F>, cfg: &ApproxConfig) -> Result<CoupledFit<F>> {
    cfg.validate()?;
    if window.x_left.len() != cfg.support_left || window.x_right.len() != cfg.support_right {
        return Err(Error::DimensionMismatch(format!(
            "window blocks ({}, {}) do not match configured supports ({}, {})",
            window.x_left.len(),
            window.x_right.len(),
            cfg.support_left,
            cfg.support_right
        )));
    }
    let (d_l, d_r, n) = (cfg.degree_left, cfg.degree_right, cfg.order);

    let scale = if cfg.normalize {
        window
            .all_x()
            .map(|v| v.abs())
            .fold(F::zero(), |a, b| a.max(b))
            .max(F::default_epsilon())
    } else {
        F::one()
    };
    let xl: Vec<F> = window.x_left.iter().map(|&v| v / scale).collect();
    let xr: Vec<F> = window.x_right.iter().map(|&v| v / scale).collect();

    let v_l = vandermonde(&xl, d_l);
    let v_r = vandermonde(&xr, d_r);
    let rows = cfg.window_len();
    let cols = cfg.coefficient_count();
    let mut v = DMatrix::zeros(rows, cols);
    v.view_mut((0, 0), (v_l.nrows(), v_l.ncols())).copy_from(&v_l);
    v.view_mut((v_l.nrows(), v_l.ncols()), (v_r.nrows(), v_r.ncols()))
        .copy_from(&v_r);

    let c = constraint_matrix::<F>(n, d_l, d_r);
    let basis = nullspace_basis(&c)?;
    let reduced = &v * &basis;

    let svd = reduced.clone().svd(true, true);
    let sigma_max = svd
        .singular_values
        .iter()
        .fold(F::zero(), |a, &b| a.max(b));
    let sigma_min = svd
        .singular_values
        .iter()
        .fold(sigma_max, |a, &b| a.min(b));
    let cond = if sigma_min > F::zero() {
        (sigma_max / sigma_min).as_f64()
    } else {
        f64::INFINITY
    };
    if cond > cfg.max_condition {
        return Err(Error::IllConditioned {
            cond,
            limit: cfg.max_condition,
        });
    }
    let eps = F::of(rows.max(cols) as f64) * F::default_epsilon() * sigma_max;
    let pinv = svd
        .pseudo_inverse(eps)
        .map_err(|m| Error::InvalidConfig(m.to_string()))?;

    // Estimator in scaled coordinates, then power-rescaled back so that the
    // coefficients refer to the original window abscissae.
    let mut estimator = &basis * pinv;
    if cfg.normalize {
        let scales = denormalize_scales(d_l, d_r, scale);
        for (i, mut row) in estimator.row_iter_mut().enumerate() {
            row *= scales[i];
        }
    }

    let y = DVector::from_iterator(rows, window.all_y());
    let gamma = &estimator * &y;
    let alpha = DVector::from_column_slice(&gamma.as_slice()[..=d_l]);
    let beta = DVector::from_column_slice(&gamma.as_slice()[d_l + 1..]);
    Ok(CoupledFit {
        alpha,
        beta,
        gamma,
        estimator,
        condition: cond,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{center_window, SampleSeries};
    use approx::assert_relative_eq;

    #[test]
    fn vandermonde_descending_powers() {
        let m = vandermonde(&[1.0, 2.0], 2);
        assert_eq!(m, DMatrix::from_row_slice(2, 3, &[1.0, 1.0, 1.0, 4.0, 2.0, 1.0]));
        let z = vandermonde(&[0.0], 3);
        assert_eq!(z, DMatrix::from_row_slice(1, 4, &[0.0, 0.0, 0.0, 1.0]));
        let l = vandermonde(&[-1.0, 0.0, 1.0], 1);
        assert_eq!(
            l,
            DMatrix::from_row_slice(3, 2, &[-1.0, 1.0, 0.0, 1.0, 1.0, 1.0])
        );
    }

    #[test]
    fn constraint_matrix_examples() {
        let c = constraint_matrix::<f64>(1, 1, 1);
        assert_eq!(c, DMatrix::from_row_slice(1, 4, &[0.0, 1.0, 0.0, -1.0]));
        let c = constraint_matrix::<f64>(2, 2, 2);
        assert_eq!(
            c,
            DMatrix::from_row_slice(
                2,
                6,
                &[0.0, 1.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, -1.0]
            )
        );
        let c = constraint_matrix::<f64>(1, 2, 1);
        assert_eq!(c, DMatrix::from_row_slice(1, 5, &[0.0, 0.0, 1.0, 0.0, -1.0]));
    }

    #[test]
    fn selector_vector_examples() {
        assert_eq!(
            selector_vector::<f64>(1, 1, 1),
            DVector::from_column_slice(&[1.0, 0.0, -1.0, 0.0])
        );
        assert_eq!(
            selector_vector::<f64>(2, 2, 2),
            DVector::from_column_slice(&[1.0, 0.0, 0.0, -1.0, 0.0, 0.0])
        );
        assert_eq!(
            selector_vector::<f64>(1, 2, 1),
            DVector::from_column_slice(&[0.0, 1.0, 0.0, -1.0, 0.0])
        );
    }

    #[test]
    fn nullspace_of_simple_difference() {
        let c = DMatrix::<f64>::from_row_slice(1, 2, &[1.0, -1.0]);
        let n = nullspace_basis(&c).unwrap();
        assert_eq!(n.ncols(), 1);
        let expected = 1.0 / 2.0_f64.sqrt();
        assert_relative_eq!(n[(0, 0)].abs(), expected, epsilon = 1e-14);
        assert_relative_eq!(n[(1, 0)], n[(0, 0)], epsilon = 1e-14);
    }

    #[test]
    fn nullspace_defining_properties() {
        let c = constraint_matrix::<f64>(1, 1, 1);
        let n = nullspace_basis(&c).unwrap();
        assert_eq!(n.ncols(), 3);
        let gram = n.transpose() * &n;
        assert_relative_eq!(gram, DMatrix::identity(3, 3), epsilon = 1e-12);
        let prod = &c * &n;
        assert!(prod.iter().all(|v| v.abs() <= 1e-12));
    }

    #[test]
    fn rank_deficient_constraint_rejected() {
        let c = DMatrix::from_row_slice(2, 4, &[1.0, -1.0, 0.0, 0.0, 2.0, -2.0, 0.0, 0.0]);
        assert_eq!(nullspace_basis(&c), Err(Error::RankDeficient));
        let square = DMatrix::<f64>::identity(3, 3);
        assert_eq!(nullspace_basis(&square), Err(Error::RankDeficient));
    }

    fn fit_line_break() -> CoupledFit<f64> {
        // y = x for x < 0, y = 2x for x > 0, sampled at +-{1, 2}.
        let s = SampleSeries::new(vec![-2.0, -1.0, 1.0, 2.0], vec![-2.0, -1.0, 2.0, 4.0]).unwrap();
        let cfg = ApproxConfig {
            support_left: 2,
            support_right: 2,
            ..ApproxConfig::for_order(1)
        };
        let w = center_window(&s, 1, &cfg).unwrap();
        solve_coupled(&w, &cfg).unwrap()
    }

    #[test]
    fn exact_continuous_line_recovered() {
        let x = vec![-2.0, -1.0, 1.0, 2.0];
        let y: Vec<f64> = x.iter().map(|&v| 2.0 * v + 1.0).collect();
        let s = SampleSeries::new(x, y).unwrap();
        let cfg = ApproxConfig {
            support_left: 2,
            support_right: 2,
            ..ApproxConfig::for_order(1)
        };
        let w = center_window(&s, 1, &cfg).unwrap();
        let fit = solve_coupled(&w, &cfg).unwrap();
        assert_relative_eq!(fit.alpha[0], 2.0, epsilon = 1e-12);
        assert_relative_eq!(fit.alpha[1], 1.0, epsilon = 1e-12);
        assert_relative_eq!(fit.beta[0], 2.0, epsilon = 1e-12);
        assert_relative_eq!(fit.beta[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn slope_break_interpolated_exactly() {
        let fit = fit_line_break();
        assert_relative_eq!(fit.alpha[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(fit.alpha[1], 0.0, epsilon = 1e-12);
        assert_relative_eq!(fit.beta[0], 2.0, epsilon = 1e-12);
        assert_relative_eq!(fit.beta[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn gamma_is_estimator_times_y() {
        let fit = fit_line_break();
        let y = DVector::from_column_slice(&[-2.0, -1.0, 2.0, 4.0]);
        let gamma = &fit.estimator * y;
        assert_relative_eq!(fit.gamma, gamma, epsilon = 1e-12);
    }

    #[test]
    fn constraints_hold_on_solved_fit() {
        let fit = fit_line_break();
        let c = constraint_matrix::<f64>(1, 1, 1);
        let resid = (&c * &fit.gamma).norm();
        assert!(resid <= 1e-10 * (1.0 + fit.gamma.norm()));
    }

    #[test]
    fn normalization_changes_nothing_but_conditioning() {
        let x: Vec<f64> = (0..16).map(|i| 1000.0 + 3.0 * i as f64).collect();
        let y: Vec<f64> = x.iter().map(|&v| 1e-3 * v * v - 2.0 * v + 7.0).collect();
        let s = SampleSeries::new(x, y).unwrap();
        let cfg = ApproxConfig::for_order(2);
        let w = center_window(&s, 7, &cfg).unwrap();
        let plain = solve_coupled(&w, &cfg).unwrap();
        let cfg_norm = ApproxConfig {
            normalize: true,
            ..cfg
        };
        let scaled = solve_coupled(&w, &cfg_norm).unwrap();
        assert_relative_eq!(plain.gamma, scaled.gamma, epsilon = 1e-7);
        assert!(scaled.condition < plain.condition);
    }

    #[test]
    fn invalid_configs_rejected() {
        let bad_order = ApproxConfig {
            order: 0,
            ..ApproxConfig::for_order(1)
        };
        assert!(matches!(bad_order.validate(), Err(Error::InvalidConfig(_))));
        let bad_degree = ApproxConfig {
            degree_left: 1,
            ..ApproxConfig::for_order(2)
        };
        assert!(matches!(bad_degree.validate(), Err(Error::InvalidConfig(_))));
        let bad_support = ApproxConfig::for_order(1).with_supports(1, 8);
        assert!(matches!(bad_support.validate(), Err(Error::InvalidConfig(_))));
    }
}
