//! Sampled data and the local windows the detector operates on.

use serde::{Deserialize, Serialize};

use crate::approx::ApproxConfig;
use crate::error::{Error, Result};
use crate::num::Float;

/// A discretely sampled signal: sorted abscissae with one ordinate each.
///
/// The abscissae are the co-locative points of the signal; every gap between
/// two adjacent samples hosts one interstitial point at its midpoint, which
/// is where discontinuities are estimated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSeries<F> {
    x: Vec<F>,
    y: Vec<F>,
}

impl<F: Float> SampleSeries<F> {
    /// Builds a series, validating that `x` is strictly increasing and that
    /// both vectors hold at least two entries of equal length.
    pub fn new(x: Vec<F>, y: Vec<F>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch {
                x: x.len(),
                y: y.len(),
            });
        }
        if x.len() < 2 {
            return Err(Error::SeriesTooShort {
                needed: 2,
                got: x.len(),
            });
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::NotSorted);
        }
        Ok(Self { x, y })
    }

    pub fn x(&self) -> &[F] {
        &self.x
    }

    pub fn y(&self) -> &[F] {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Interstitial abscissa of gap `i`: the midpoint between samples `i`
    /// and `i + 1`.
    pub fn interstitial(&self, i: usize) -> F {
        (self.x[i] + self.x[i + 1]) * F::of(0.5)
    }

    /// Replaces the ordinates, keeping the abscissae. Lengths must agree.
    pub fn with_y(&self, y: Vec<F>) -> Result<Self> {
        if y.len() != self.x.len() {
            return Err(Error::LengthMismatch {
                x: self.x.len(),
                y: y.len(),
            });
        }
        Ok(Self {
            x: self.x.clone(),
            y,
        })
    }
}

/// Left/right sample blocks re-centered so one interstitial point is the
/// coordinate origin.
///
/// In this frame the k-th coefficient of either fitted polynomial equals the
/// k-th Maclaurin coefficient of that side's model, which is what makes the
/// coefficient difference an estimate of the derivative jump.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleWindow<F> {
    /// Re-centered left abscissae, all negative, strictly increasing.
    pub x_left: Vec<F>,
    pub y_left: Vec<F>,
    /// Re-centered right abscissae, all positive, strictly increasing.
    pub x_right: Vec<F>,
    pub y_right: Vec<F>,
    /// The interstitial point in original coordinates.
    pub zeta: F,
}

impl<F: Float> SampleWindow<F> {
    /// Total number of observations in the window.
    pub fn len(&self) -> usize {
        self.x_left.len() + self.x_right.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x_left.is_empty() && self.x_right.is_empty()
    }

    /// All window abscissae, left block then right block.
    pub fn all_x(&self) -> impl Iterator<Item = F> + '_ {
        self.x_left.iter().chain(self.x_right.iter()).copied()
    }

    /// All window ordinates, left block then right block.
    pub fn all_y(&self) -> impl Iterator<Item = F> + '_ {
        self.y_left.iter().chain(self.y_right.iter()).copied()
    }
}

/// Cuts the window around gap `i` (between samples `i` and `i + 1`) and
/// re-centers it at the interstitial midpoint.
pub fn center_window<F: Float>(
    series: &SampleSeries<F>,
    i: usize,
    cfg: &ApproxConfig,
) -> Result<SampleWindow<F>> {
    let len = series.len();
    let (l_l, l_r) = (cfg.support_left, cfg.support_right);
    if i + 1 < l_l || i + 1 >= len || len - i - 1 < l_r {
        return Err(Error::WindowOutOfBounds {
            index: i,
            left: l_l,
            right: l_r,
            len,
        });
    }
    let zeta = series.interstitial(i);
    let lo = i + 1 - l_l;
    let x_left: Vec<F> = series.x()[lo..=i].iter().map(|&v| v - zeta).collect();
    let y_left = series.y()[lo..=i].to_vec();
    let x_right: Vec<F> = series.x()[i + 1..i + 1 + l_r]
        .iter()
        .map(|&v| v - zeta)
        .collect();
    let y_right = series.y()[i + 1..i + 1 + l_r].to_vec();
    Ok(SampleWindow {
        x_left,
        y_left,
        x_right,
        y_right,
        zeta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(l_l: usize, l_r: usize) -> ApproxConfig {
        ApproxConfig {
            support_left: l_l,
            support_right: l_r,
            ..ApproxConfig::for_order(1)
        }
    }

    #[test]
    fn rejects_unsorted_and_mismatched() {
        assert_eq!(
            SampleSeries::new(vec![0.0, 0.0], vec![1.0, 2.0]),
            Err(Error::NotSorted)
        );
        assert_eq!(
            SampleSeries::new(vec![0.0, 1.0, 0.5], vec![1.0, 2.0, 3.0]),
            Err(Error::NotSorted)
        );
        assert_eq!(
            SampleSeries::new(vec![0.0, 1.0], vec![1.0]),
            Err(Error::LengthMismatch { x: 2, y: 1 })
        );
        assert_eq!(
            SampleSeries::new(vec![0.0], vec![1.0]),
            Err(Error::SeriesTooShort { needed: 2, got: 1 })
        );
    }

    #[test]
    fn midpoint_recentering() {
        let s = SampleSeries::new(vec![0.0, 1.0, 2.0, 3.0], vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        let w = center_window(&s, 1, &cfg(2, 2)).unwrap();
        assert_eq!(w.zeta, 1.5);
        assert_eq!(w.x_left, vec![-1.5, -0.5]);
        assert_eq!(w.x_right, vec![0.5, 1.5]);
        assert_eq!(w.y_left, vec![0.0, 1.0]);
        assert_eq!(w.y_right, vec![2.0, 3.0]);
    }

    #[test]
    fn insufficient_left_support_is_an_error() {
        let s = SampleSeries::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 2.0]).unwrap();
        let err = center_window(&s, 0, &cfg(2, 1)).unwrap_err();
        assert!(matches!(err, Error::WindowOutOfBounds { .. }));
    }

    #[test]
    fn uniform_spacing_gives_symmetric_window() {
        let x: Vec<f64> = (0..10).map(|i| 0.25 * i as f64).collect();
        let y = vec![1.0; 10];
        let s = SampleSeries::new(x, y).unwrap();
        let w = center_window(&s, 4, &cfg(3, 3)).unwrap();
        for (l, r) in w.x_left.iter().rev().zip(w.x_right.iter()) {
            assert!((l + r).abs() < 1e-15);
        }
    }
}
