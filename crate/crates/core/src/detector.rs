//! Scanning a series over all admissible interstitial points and selecting
//! discontinuity locations by gated peak picking.

use serde::{Deserialize, Serialize};

use crate::approx::{selector_vector, solve_coupled, ApproxConfig};
use crate::error::{Error, Result};
use crate::num::Float;
use crate::residuals::{error_triple, window_power_sum};
use crate::series::{center_window, SampleSeries};
use crate::taylor::{two_sided_quantile, z_score};

/// Everything measured at one interstitial point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointDiagnostics<F> {
    /// Interstitial abscissa in original coordinates.
    pub zeta: F,
    /// Estimated jump of the order-n Maclaurin coefficient.
    pub delta_t: F,
    /// Variance of the jump estimate.
    pub variance: F,
    /// Approximation error of the coupled fit.
    pub e_approx: F,
    /// Combined approximation-extrapolation error.
    pub e_combined: F,
    /// Extrapolation error.
    pub e_extrap: F,
    /// z-score of the jump estimate.
    pub z_score: F,
}

/// One accepted discontinuity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Knot<F> {
    /// Location: the interstitial abscissa of the accepted peak.
    pub zeta: F,
    /// Jump estimate at the peak.
    pub delta_t: F,
    /// z-score at the peak.
    pub z_score: F,
    /// Sign of the jump: +1 or -1.
    pub sign: i8,
}

/// Full outcome of a detection run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport<F> {
    /// Diagnostics per admissible interstitial point, in increasing zeta.
    pub profile: Vec<PointDiagnostics<F>>,
    /// Accepted discontinuities, sorted by zeta.
    pub knots: Vec<Knot<F>>,
    /// Configuration the scan ran with.
    pub config: ApproxConfig,
    /// Noise standard deviation used for the variances.
    pub sigma: F,
    /// Confidence level of the significance gate.
    pub confidence: f64,
    /// Minimum peak separation in profile indices.
    pub min_separation: usize,
}

/// Options of [`detect`] beyond the fit configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectOptions<F> {
    /// Noise standard deviation; estimated from the data when absent.
    pub sigma: Option<F>,
    /// Confidence level of the two-sided significance gate.
    pub confidence: f64,
    /// Minimum peak separation in profile indices; defaults to the larger
    /// support length.
    pub min_separation: Option<usize>,
}

impl<F> Default for DetectOptions<F> {
    fn default() -> Self {
        Self {
            sigma: None,
            confidence: 0.95,
            min_separation: None,
        }
    }
}

/// Range of gap indices whose windows fit entirely inside the series.
fn admissible_gaps(len: usize, cfg: &ApproxConfig) -> Result<std::ops::RangeInclusive<usize>> {
    let needed = cfg.window_len();
    if len < needed {
        return Err(Error::SeriesTooShort { needed, got: len });
    }
    Ok(cfg.support_left - 1..=len - 1 - cfg.support_right)
}

/// Estimates the noise standard deviation as the median over all admissible
/// windows of the per-window residual estimate `sqrt(E_a / (l - dof))`.
///
/// The median makes the estimate robust against the minority of windows
/// that straddle actual discontinuities.
pub fn estimate_noise_sigma<F: Float>(series: &SampleSeries<F>, cfg: &ApproxConfig) -> Result<F> {
    cfg.validate()?;
    let gaps = admissible_gaps(series.len(), cfg)?;
    let dof = cfg.coefficient_count() - cfg.order;
    let denom = F::of((cfg.window_len() - dof) as f64);
    let mut estimates: Vec<F> = Vec::new();
    for i in gaps {
        let window = center_window(series, i, cfg)?;
        let fit = solve_coupled(&window, cfg)?;
        let e_a = crate::residuals::approximation_error(&fit, &window);
        estimates.push((e_a / denom).sqrt());
    }
    estimates.sort_by(|a, b| a.partial_cmp(b).expect("residuals are finite"));
    let m = estimates.len();
    let median = if m % 2 == 1 {
        estimates[m / 2]
    } else {
        (estimates[m / 2 - 1] + estimates[m / 2]) * F::of(0.5)
    };
    Ok(median)
}

/// Support lengths used when estimating sigma for a wide-window scan:
/// compact windows keep most of them clear of real structure, so the median
/// residual reflects the noise rather than model mismatch.
fn sigma_estimation_config(cfg: &ApproxConfig, len: usize) -> ApproxConfig {
    let l = 8usize
        .max(cfg.degree_left + 1)
        .max(cfg.degree_right + 1);
    let compact = cfg.clone().with_supports(l, l);
    if compact.window_len() <= len && compact.window_len() < cfg.window_len() {
        compact
    } else {
        cfg.clone()
    }
}

/// Scans every admissible interstitial point and returns its diagnostics in
/// increasing zeta order.
///
/// Boundary gaps whose supports would extend past the series ends are
/// omitted. When `sigma` is absent it is estimated from the data with
/// compact supports (see [`estimate_noise_sigma`]).
pub fn scan<F: Float>(
    series: &SampleSeries<F>,
    cfg: &ApproxConfig,
    sigma: Option<F>,
) -> Result<Vec<PointDiagnostics<F>>> {
    cfg.validate()?;
    let gaps = admissible_gaps(series.len(), cfg)?;
    let selector = selector_vector::<F>(cfg.order, cfg.degree_left, cfg.degree_right);

    let sigma = match sigma {
        Some(s) => s,
        None => estimate_noise_sigma(series, &sigma_estimation_config(cfg, series.len()))?,
    };
    let sigma2 = sigma * sigma;

    let mut profile = Vec::new();
    for i in gaps {
        let window = center_window(series, i, cfg)?;
        let fit = solve_coupled(&window, cfg)?;
        let delta_t = selector.dot(&fit.gamma);
        let errors = error_triple(&fit, &window, cfg.order);
        // For isotropic noise the jump variance is sigma^2 |K^T d|^2.
        let gain = (fit.estimator.transpose() * &selector).norm_squared();
        let variance = sigma2 * gain;
        let z = if variance > F::zero() {
            z_score(delta_t, variance)
        } else {
            // Noiseless data: ignore jumps below the rounding level of the
            // inner product that produced them.
            let y_norm = window
                .all_y()
                .map(|v| v * v)
                .fold(F::zero(), |a, b| a + b)
                .sqrt();
            let floor =
                F::of(window.len() as f64) * F::default_epsilon() * gain.sqrt() * y_norm;
            if delta_t.abs() <= floor {
                F::zero()
            } else {
                z_score(delta_t, variance)
            }
        };
        profile.push(PointDiagnostics {
            zeta: window.zeta,
            delta_t,
            variance,
            e_approx: errors.e_approx,
            e_combined: errors.e_combined,
            e_extrap: errors.e_extrap,
            z_score: z,
        });
    }
    debug_assert!(peak_correspondence_holds(&profile, cfg, series));
    Ok(profile)
}

/// On uniform grids the combined error is the squared jump times a constant
/// shared by all windows, so the two profiles must peak at the same index.
fn peak_correspondence_holds<F: Float>(
    profile: &[PointDiagnostics<F>],
    cfg: &ApproxConfig,
    series: &SampleSeries<F>,
) -> bool {
    if profile.len() < 2 {
        return true;
    }
    let gaps = match admissible_gaps(series.len(), cfg) {
        Ok(g) => g,
        Err(_) => return true,
    };
    let mut sums = gaps.map(|i| {
        let w = center_window(series, i, cfg).expect("admissible gap");
        window_power_sum(&w, cfg.order)
    });
    let first = sums.next().expect("non-empty profile");
    let tol = F::of(1e-9) * first.max(F::one());
    if sums.any(|s| (s - first).abs() > tol) {
        return true; // non-uniform geometry: proportionality is per-window
    }
    let argmax = |f: &dyn Fn(&PointDiagnostics<F>) -> F| -> usize {
        let mut best = 0;
        for (j, p) in profile.iter().enumerate() {
            if f(p) > f(&profile[best]) {
                best = j;
            }
        }
        best
    };
    let by_dt2 = argmax(&|p| p.delta_t * p.delta_t);
    let by_efg = argmax(&|p| p.e_combined);
    by_dt2 == by_efg
}

fn strict_local_max<F: Float>(values: &[F], j: usize, separation: usize) -> bool {
    let lo = j.saturating_sub(separation);
    let hi = (j + separation).min(values.len() - 1);
    (lo..=hi).all(|k| k == j || values[j] > values[k])
}

/// True when the extrapolation error has a local maximum at index `k`
/// relative to its immediate neighbors.
fn immediate_local_max<F: Float>(values: &[F], k: usize) -> bool {
    let left_ok = k == 0 || values[k] > values[k - 1];
    let right_ok = k + 1 >= values.len() || values[k] > values[k + 1];
    left_ok && right_ok
}

/// Peak selection shared by [`find_knots`] and the Monte Carlo experiment:
/// strict local maxima of the squared jump, gated by an extrapolation-error
/// peak within one index and, when given, a z threshold.
pub(crate) fn gated_peaks<F: Float>(
    profile: &[PointDiagnostics<F>],
    z_threshold: Option<f64>,
    min_separation: usize,
) -> Vec<Knot<F>> {
    let dt2: Vec<F> = profile.iter().map(|p| p.delta_t * p.delta_t).collect();
    let ee: Vec<F> = profile.iter().map(|p| p.e_extrap).collect();

    let mut knots = Vec::new();
    for (j, point) in profile.iter().enumerate() {
        if !strict_local_max(&dt2, j, min_separation) {
            continue;
        }
        if let Some(threshold) = z_threshold {
            if !(point.z_score.abs().as_f64() > threshold) {
                continue;
            }
        }
        let gate = (j.saturating_sub(1)..=(j + 1).min(profile.len().saturating_sub(1)))
            .any(|k| immediate_local_max(&ee, k));
        if !gate {
            continue;
        }
        knots.push(Knot {
            zeta: point.zeta,
            delta_t: point.delta_t,
            z_score: point.z_score,
            sign: if point.delta_t >= F::zero() { 1 } else { -1 },
        });
    }
    knots
}

/// Picks discontinuities out of a scan profile.
///
/// A knot is reported at index `j` when the squared jump profile has a
/// strict local maximum over a `±min_separation` neighborhood, the z-score
/// clears the significance gate, and the extrapolation error also peaks
/// within one index of `j`. Two accepted peaks are always more than
/// `min_separation` apart: each strict maximum would otherwise lie inside
/// the other's neighborhood and would have to exceed it.
///
/// The confidence is enforced across the whole scan: a profile of length P
/// makes P nearly independent tests (the jump estimator decorrelates after
/// a couple of window shifts), so the per-point threshold uses the
/// Sidak-adjusted level `confidence^(1/P)`. On polynomial-plus-noise data
/// the scan then stays knot-free with the requested probability.
pub fn find_knots<F: Float>(
    profile: &[PointDiagnostics<F>],
    confidence: f64,
    min_separation: usize,
) -> Result<Vec<Knot<F>>> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::InvalidConfidence(confidence));
    }
    if profile.is_empty() {
        return Ok(Vec::new());
    }
    let per_point = confidence.powf(1.0 / profile.len() as f64);
    Ok(gated_peaks(
        profile,
        Some(two_sided_quantile(per_point)),
        min_separation,
    ))
}

/// Runs the full detection pipeline: resolve the noise level, scan, pick
/// knots, and assemble the report.
pub fn detect<F: Float>(
    series: &SampleSeries<F>,
    cfg: &ApproxConfig,
    opts: &DetectOptions<F>,
) -> Result<DetectionReport<F>> {
    cfg.validate()?;
    let sigma = match opts.sigma {
        Some(s) => s,
        None => estimate_noise_sigma(series, &sigma_estimation_config(cfg, series.len()))?,
    };
    let profile = scan(series, cfg, Some(sigma))?;
    let min_separation = opts
        .min_separation
        .unwrap_or_else(|| cfg.support_left.max(cfg.support_right));
    let knots = find_knots(&profile, opts.confidence, min_separation)?;
    Ok(DetectionReport {
        profile,
        knots,
        config: cfg.clone(),
        sigma,
        confidence: opts.confidence,
        min_separation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_series(len: usize) -> SampleSeries<f64> {
        let x: Vec<f64> = (0..len).map(|i| i as f64 * 0.02).collect();
        let y: Vec<f64> = x.iter().map(|&v| 3.0 * v - 1.0).collect();
        SampleSeries::new(x, y).unwrap()
    }

    #[test]
    fn straight_line_profile_is_flat() {
        let s = line_series(50);
        let cfg = ApproxConfig::for_order(1);
        let profile = scan(&s, &cfg, Some(0.0)).unwrap();
        assert!(profile.iter().all(|p| p.delta_t.abs() <= 1e-9));
        let knots = find_knots(&profile, 0.99, 8).unwrap();
        assert!(knots.is_empty());
    }

    #[test]
    fn profile_length_counts_admissible_gaps() {
        let s = line_series(50);
        let cfg = ApproxConfig::for_order(1);
        let profile = scan(&s, &cfg, Some(0.1)).unwrap();
        assert_eq!(
            profile.len(),
            50 - cfg.support_left - cfg.support_right + 1
        );
    }

    #[test]
    fn too_short_series_is_rejected() {
        let s = line_series(10);
        let cfg = ApproxConfig::for_order(1);
        assert!(matches!(
            scan(&s, &cfg, Some(0.1)),
            Err(Error::SeriesTooShort { .. })
        ));
        assert!(matches!(
            estimate_noise_sigma(&s, &cfg),
            Err(Error::SeriesTooShort { .. })
        ));
    }

    #[test]
    fn noiseless_quadratic_sigma_is_zero() {
        let x: Vec<f64> = (0..60).map(|i| i as f64 * 0.05).collect();
        let y: Vec<f64> = x.iter().map(|&v| 1.5 * v * v - v + 0.2).collect();
        let s = SampleSeries::new(x, y).unwrap();
        let cfg = ApproxConfig::for_order(2);
        let sigma = estimate_noise_sigma(&s, &cfg).unwrap();
        assert!(sigma <= 1e-9, "sigma = {sigma}");
    }

    #[test]
    fn doubling_y_doubles_sigma() {
        let x: Vec<f64> = (0..80).map(|i| i as f64 * 0.05).collect();
        // Deterministic wiggle standing in for noise.
        let y: Vec<f64> = x
            .iter()
            .enumerate()
            .map(|(i, &v)| v + if i % 2 == 0 { 0.05 } else { -0.05 })
            .collect();
        let doubled: Vec<f64> = y.iter().map(|&v| 2.0 * v).collect();
        let s1 = SampleSeries::new(x.clone(), y).unwrap();
        let s2 = SampleSeries::new(x, doubled).unwrap();
        let cfg = ApproxConfig::for_order(1);
        let a = estimate_noise_sigma(&s1, &cfg).unwrap();
        let b = estimate_noise_sigma(&s2, &cfg).unwrap();
        assert!((b / a - 2.0).abs() < 1e-9);
    }

    #[test]
    fn all_zero_profile_yields_no_knots() {
        let profile: Vec<PointDiagnostics<f64>> = (0..20)
            .map(|i| PointDiagnostics {
                zeta: i as f64,
                delta_t: 0.0,
                variance: 1.0,
                e_approx: 0.0,
                e_combined: 0.0,
                e_extrap: 0.0,
                z_score: 0.0,
            })
            .collect();
        assert!(find_knots(&profile, 0.95, 3).unwrap().is_empty());
    }

    #[test]
    fn empty_profile_yields_no_knots() {
        let profile: Vec<PointDiagnostics<f64>> = Vec::new();
        assert!(find_knots(&profile, 0.95, 3).unwrap().is_empty());
    }

    #[test]
    fn bad_confidence_rejected() {
        let profile: Vec<PointDiagnostics<f64>> = Vec::new();
        assert!(matches!(
            find_knots(&profile, 1.5, 3),
            Err(Error::InvalidConfidence(_))
        ));
    }

    #[test]
    fn isolated_gated_peak_is_reported() {
        let mut profile: Vec<PointDiagnostics<f64>> = (0..21)
            .map(|i| PointDiagnostics {
                zeta: i as f64,
                delta_t: 0.01 * ((i * 37 % 5) as f64 - 2.0),
                variance: 1.0,
                e_approx: 1.0,
                e_combined: 0.0,
                e_extrap: 1.0,
                z_score: 0.0,
            })
            .collect();
        profile[10].delta_t = -5.0;
        profile[10].z_score = -5.0;
        profile[10].e_extrap = 3.0;
        let knots = find_knots(&profile, 0.95, 4).unwrap();
        assert_eq!(knots.len(), 1);
        assert_eq!(knots[0].zeta, 10.0);
        assert_eq!(knots[0].sign, -1);
    }

    #[test]
    fn missing_extrapolation_peak_gates_out() {
        let mut profile: Vec<PointDiagnostics<f64>> = (0..21)
            .map(|i| PointDiagnostics {
                zeta: i as f64,
                delta_t: 0.0,
                variance: 1.0,
                e_approx: 1.0,
                e_combined: 0.0,
                // Strictly increasing: no local maximum anywhere inside.
                e_extrap: i as f64,
                z_score: 0.0,
            })
            .collect();
        profile[10].delta_t = 5.0;
        profile[10].z_score = 5.0;
        let knots = find_knots(&profile, 0.95, 4).unwrap();
        assert!(knots.is_empty());
    }
}
