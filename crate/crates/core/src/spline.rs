//! Least-squares B-spline approximation on a clamped knot vector, with the
//! detected discontinuities as interior knots.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Float;
use crate::series::SampleSeries;

/// A fitted clamped B-spline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplineModel<F> {
    degree: usize,
    /// Full clamped knot vector: end knots with multiplicity `degree + 1`.
    knots: Vec<F>,
    /// Control coefficients, one per basis function.
    coefficients: Vec<F>,
    /// Root-mean-square residual of the fit on its own data.
    rms_residual: F,
}

/// Index of the knot span containing `x`, clamped to the valid range.
fn find_span<F: Float>(knots: &[F], degree: usize, n_basis: usize, x: F) -> usize {
    if x >= knots[n_basis] {
        return n_basis - 1;
    }
    if x <= knots[degree] {
        return degree;
    }
    let mut lo = degree;
    let mut hi = n_basis;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if x < knots[mid] {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

/// The `degree + 1` B-spline basis values that are nonzero on `span`,
/// by the Cox-de Boor recursion. The values sum to one exactly up to
/// rounding.
fn basis_funs<F: Float>(knots: &[F], degree: usize, span: usize, x: F) -> Vec<F> {
    let mut values = vec![F::zero(); degree + 1];
    let mut left = vec![F::zero(); degree + 1];
    let mut right = vec![F::zero(); degree + 1];
    values[0] = F::one();
    for j in 1..=degree {
        left[j] = x - knots[span + 1 - j];
        right[j] = knots[span + j] - x;
        let mut saved = F::zero();
        for r in 0..j {
            let temp = values[r] / (right[r + 1] + left[j - r]);
            values[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        values[j] = saved;
    }
    values
}

impl<F: Float> SplineModel<F> {
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Full clamped knot vector.
    pub fn knots(&self) -> &[F] {
        &self.knots
    }

    pub fn coefficients(&self) -> &[F] {
        &self.coefficients
    }

    /// Root-mean-square residual on the fitted data.
    pub fn rms_residual(&self) -> F {
        self.rms_residual
    }

    /// Domain of definition, the data range the spline was fitted on.
    pub fn domain(&self) -> (F, F) {
        (
            self.knots[self.degree],
            self.knots[self.coefficients.len()],
        )
    }

    /// Basis-function values at `x`, all `coefficients.len()` of them.
    pub fn basis_row(&self, x: F) -> Result<Vec<F>> {
        self.check_domain(x)?;
        let n_basis = self.coefficients.len();
        let span = find_span(&self.knots, self.degree, n_basis, x);
        let vals = basis_funs(&self.knots, self.degree, span, x);
        let mut row = vec![F::zero(); n_basis];
        row[span - self.degree..=span].copy_from_slice(&vals);
        Ok(row)
    }

    fn check_domain(&self, x: F) -> Result<()> {
        let (lo, hi) = self.domain();
        if x < lo || x > hi {
            return Err(Error::OutOfDomain {
                x: x.as_f64(),
                min: lo.as_f64(),
                max: hi.as_f64(),
            });
        }
        Ok(())
    }

    /// Evaluates the spline by de Boor's algorithm.
    pub fn eval(&self, x: F) -> Result<F> {
        self.check_domain(x)?;
        let p = self.degree;
        let span = find_span(&self.knots, p, self.coefficients.len(), x);
        let mut d: Vec<F> = self.coefficients[span - p..=span].to_vec();
        for r in 1..=p {
            for j in (r..=p).rev() {
                let i = span - p + j;
                let denom = self.knots[i + p - r + 1] - self.knots[i];
                let a = (x - self.knots[i]) / denom;
                d[j] = d[j - 1] * (F::one() - a) + d[j] * a;
            }
        }
        Ok(d[p])
    }

    /// Evaluates the spline at many points.
    pub fn eval_many(&self, xs: &[F]) -> Result<Vec<F>> {
        xs.iter().map(|&x| self.eval(x)).collect()
    }
}

/// Fits a clamped least-squares B-spline with the given interior knots.
///
/// The control coefficients minimize the summed squared residual over the
/// spline space; the collocation system is solved through an orthogonal
/// factorization rather than normal equations. Every basis function must be
/// supported on at least one sample.
pub fn fit_spline<F: Float>(
    series: &SampleSeries<F>,
    interior_knots: &[F],
    degree: usize,
) -> Result<SplineModel<F>> {
    if degree == 0 {
        return Err(Error::InvalidConfig(
            "spline degree must be at least 1".to_string(),
        ));
    }
    let x = series.x();
    let (lo, hi) = (x[0], x[x.len() - 1]);
    if interior_knots.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::NotSorted);
    }
    if let Some(idx) = interior_knots.iter().position(|&k| k <= lo || k >= hi) {
        return Err(Error::InadmissibleKnots { index: idx });
    }

    let n_basis = interior_knots.len() + degree + 1;
    let mut knots = Vec::with_capacity(n_basis + degree + 1);
    knots.extend(std::iter::repeat(lo).take(degree + 1));
    knots.extend_from_slice(interior_knots);
    knots.extend(std::iter::repeat(hi).take(degree + 1));

    let mut collocation = DMatrix::<F>::zeros(series.len(), n_basis);
    for (i, &xi) in x.iter().enumerate() {
        let span = find_span(&knots, degree, n_basis, xi);
        let vals = basis_funs(&knots, degree, span, xi);
        for (k, &v) in vals.iter().enumerate() {
            collocation[(i, span - degree + k)] = v;
        }
    }
    for j in 0..n_basis {
        if collocation.column(j).iter().all(|&v| v == F::zero()) {
            return Err(Error::InadmissibleKnots { index: j });
        }
    }

    let y = DVector::from_column_slice(series.y());
    let svd = collocation.clone().svd(true, true);
    let max_sv = svd
        .singular_values
        .iter()
        .fold(F::zero(), |acc, &s| acc.max(s));
    let eps = F::of(n_basis.max(series.len()) as f64) * F::default_epsilon() * max_sv;
    let coeffs = svd
        .solve(&y, eps)
        .map_err(|m| Error::InvalidConfig(m.to_string()))?;
    let rms = ((&collocation * &coeffs - &y).norm_squared() / F::of(series.len() as f64)).sqrt();

    Ok(SplineModel {
        degree,
        knots,
        coefficients: coeffs.as_slice().to_vec(),
        rms_residual: rms,
    })
}
