//! Statistical evaluation: variance ratios, Pearson correlation, 2-D
//! correlation histograms and the shot-noise-unit calibration.

use crate::error::{Error, Result};
use crate::receiver::{self, DetectorConfig, NoiseToggles};
use crate::rng::{labels, StreamFactory};
use crate::types::OpticalField;
use rand_chacha::ChaCha12Rng;
use std::collections::BTreeMap;

/// Small reusable estimators. All variances are unbiased (n - 1), which
/// matters because the eta tolerances sit at the percent level.
pub mod stats {
    use super::{Error, Result};

    pub fn mean(samples: &[f64]) -> f64 {
        if samples.is_empty() {
            return 0.0;
        }
        samples.iter().sum::<f64>() / samples.len() as f64
    }

    /// Unbiased sample variance via Welford's recurrence.
    pub fn variance(samples: &[f64]) -> Result<f64> {
        pooled_variance(&[samples])
    }

    /// Unbiased variance of several slices treated as one pooled sample.
    pub fn pooled_variance(parts: &[&[f64]]) -> Result<f64> {
        let n: usize = parts.iter().map(|p| p.len()).sum();
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "variance needs at least 2 samples, got {n}"
            )));
        }
        let mut count = 0u64;
        let mut mean = 0.0f64;
        let mut m2 = 0.0f64;
        for part in parts {
            for &v in *part {
                count += 1;
                let delta = v - mean;
                mean += delta / count as f64;
                m2 += delta * (v - mean);
            }
        }
        Ok(m2 / (count - 1) as f64)
    }

    /// Pearson product-moment correlation coefficient.
    pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
        if a.len() != b.len() {
            return Err(Error::InvalidArgument(format!(
                "pearson needs equal lengths, got {} and {}",
                a.len(),
                b.len()
            )));
        }
        if a.len() < 2 {
            return Err(Error::InvalidArgument(
                "pearson needs at least 2 samples".into(),
            ));
        }
        let ma = mean(a);
        let mb = mean(b);
        let mut cov = 0.0;
        let mut va = 0.0;
        let mut vb = 0.0;
        for i in 0..a.len() {
            let da = a[i] - ma;
            let db = b[i] - mb;
            cov += da * db;
            va += da * da;
            vb += db * db;
        }
        if va == 0.0 || vb == 0.0 {
            return Err(Error::DegenerateInput(
                "pearson requires nonzero variance in both inputs".into(),
            ));
        }
        Ok(cov / (va.sqrt() * vb.sqrt()))
    }
}

/// Ratio of measured sample variance to a reference variance.
pub fn variance_ratio(measured: &[f64], reference_variance: f64) -> Result<f64> {
    if !(reference_variance > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "variance_ratio reference must be > 0, got {reference_variance}"
        )));
    }
    Ok(stats::variance(measured)? / reference_variance)
}

/// 2-D correlation histogram over symmetric per-axis ranges.
///
/// Axis ranges default to ±4 standard deviations of each series; samples
/// beyond the range land in the edge bins so counts always sum to the
/// sample count and marginal sums match the 1-D histograms exactly.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Histogram2d {
    pub x_edges: Vec<f64>,
    pub y_edges: Vec<f64>,
    /// Row-major counts: `counts[iy * n_bins_x + ix]`.
    pub counts: Vec<u64>,
    pub n_samples: u64,
}

impl Histogram2d {
    pub fn from_samples(a: &[f64], b: &[f64], bins: usize) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::InvalidArgument(format!(
                "histogram needs equal lengths, got {} and {}",
                a.len(),
                b.len()
            )));
        }
        if bins == 0 {
            return Err(Error::InvalidArgument("histogram needs bins >= 1".into()));
        }
        let half_x = 4.0 * stats::variance(a)?.sqrt();
        let half_y = 4.0 * stats::variance(b)?.sqrt();
        Self::with_ranges(a, b, bins, half_x.max(f64::MIN_POSITIVE), half_y.max(f64::MIN_POSITIVE))
    }

    pub fn with_ranges(a: &[f64], b: &[f64], bins: usize, half_x: f64, half_y: f64) -> Result<Self> {
        let edges = |half: f64| -> Vec<f64> {
            (0..=bins)
                .map(|i| -half + 2.0 * half * i as f64 / bins as f64)
                .collect()
        };
        let mut hist = Self {
            x_edges: edges(half_x),
            y_edges: edges(half_y),
            counts: vec![0; bins * bins],
            n_samples: 0,
        };
        let index = |v: f64, half: f64| -> usize {
            let t = (v + half) / (2.0 * half) * bins as f64;
            (t.floor() as i64).clamp(0, bins as i64 - 1) as usize
        };
        for (&x, &y) in a.iter().zip(b) {
            let ix = index(x, half_x);
            let iy = index(y, half_y);
            hist.counts[iy * bins + ix] += 1;
            hist.n_samples += 1;
        }
        Ok(hist)
    }

    pub fn n_bins_x(&self) -> usize {
        self.x_edges.len() - 1
    }

    pub fn n_bins_y(&self) -> usize {
        self.y_edges.len() - 1
    }

    /// Counts summed over y per x bin.
    pub fn marginal_x(&self) -> Vec<u64> {
        let nx = self.n_bins_x();
        let mut out = vec![0u64; nx];
        for (i, &c) in self.counts.iter().enumerate() {
            out[i % nx] += c;
        }
        out
    }

    /// Counts summed over x per y bin.
    pub fn marginal_y(&self) -> Vec<u64> {
        let nx = self.n_bins_x();
        let mut out = vec![0u64; self.n_bins_y()];
        for (i, &c) in self.counts.iter().enumerate() {
            out[i / nx] += c;
        }
        out
    }

    /// Merges a partial histogram with identical binning; reductions over
    /// shards are associative and order-fixed upstream.
    pub fn merge(&mut self, other: &Self) -> Result<()> {
        if self.x_edges != other.x_edges || self.y_edges != other.y_edges {
            return Err(Error::InvalidArgument(
                "histogram merge requires identical bin edges".into(),
            ));
        }
        for (c, o) in self.counts.iter_mut().zip(&other.counts) {
            *c += o;
        }
        self.n_samples += other.n_samples;
        Ok(())
    }
}

/// 1-D histogram with the same edge convention as [`Histogram2d`].
pub fn histogram1d(a: &[f64], bins: usize, half: f64) -> Vec<u64> {
    let mut out = vec![0u64; bins];
    for &v in a {
        let t = (v + half) / (2.0 * half) * bins as f64;
        let i = (t.floor() as i64).clamp(0, bins as i64 - 1) as usize;
        out[i] += 1;
    }
    out
}

/// Result of the shot-noise-unit calibration.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SnuCalibration {
    /// The 1-SNU variance reference in amperes^2.
    pub reference_a2: f64,
    /// Analytic shot variance for the blocked-signal condition.
    pub shot_analytic_a2: f64,
    /// Analytic thermal variance.
    pub thermal_analytic_a2: f64,
    /// Whether the reference came from a Monte-Carlo vacuum run (true) or
    /// straight from the analytic value (noise injection disabled).
    pub measured: bool,
}

/// Calibrates the shot-noise unit by measuring the receiver with the signal
/// port blocked.
///
/// The vacuum run sees shot plus thermal noise; the analytic thermal
/// variance is subtracted so the reference is the shot (vacuum) variance
/// alone. With shot-noise injection disabled the analytic value is returned
/// directly. Deterministic for a fixed `(seed, scope)`.
pub fn calibrate_snu(
    detector: &DetectorConfig,
    toggles: NoiseToggles,
    n_samples: usize,
    factory: &StreamFactory,
    scope: &str,
) -> Result<SnuCalibration> {
    detector.validate()?;
    let shot_analytic = receiver::shot_noise_variance(detector, 0.0);
    let thermal_analytic = receiver::thermal_noise_variance(detector);
    if !toggles.shot {
        return Ok(SnuCalibration {
            reference_a2: shot_analytic,
            shot_analytic_a2: shot_analytic,
            thermal_analytic_a2: thermal_analytic,
            measured: false,
        });
    }
    if n_samples < 2 {
        return Err(Error::InvalidArgument(
            "calibrate_snu needs at least 2 samples".into(),
        ));
    }
    let ctx = receiver::ReceiverContext::new(*detector, toggles, 0.0)?;
    let mut cal_rng: ChaCha12Rng = factory.scoped_stream(scope, labels::SNU_CAL);
    let mut thermal_rng: ChaCha12Rng =
        factory.scoped_stream(scope, &format!("{}-thermal", labels::SNU_CAL));
    let mut xs = Vec::with_capacity(2 * n_samples);
    for _ in 0..n_samples {
        let out = ctx.detect(OpticalField::zero(), &mut cal_rng, &mut thermal_rng);
        xs.push(out.x);
        xs.push(out.p);
    }
    let measured_total = stats::variance(&xs)?;
    let thermal_in_run = if toggles.thermal { thermal_analytic } else { 0.0 };
    Ok(SnuCalibration {
        reference_a2: measured_total - thermal_in_run,
        shot_analytic_a2: shot_analytic,
        thermal_analytic_a2: thermal_analytic,
        measured: true,
    })
}

/// Scalar and histogram metrics of one chain run.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct MetricsReport {
    /// Pooled measured-to-actual variance ratio, Bob over Alice, SNU.
    pub eta: f64,
    /// ADC output-to-input variance ratio (1.0 when the ADC is bypassed).
    pub eta_adc: f64,
    pub pearson_x: f64,
    pub pearson_p: f64,
    /// Fraction of quadrature samples saturated at the pre-distortion edge.
    pub clip_fraction: f64,
    /// Alice-side pooled sample variance, SNU.
    pub alice_variance_snu: f64,
    /// Bob-side pooled sample variance, SNU.
    pub bob_variance_snu: f64,
    /// The 1-SNU reference used to express Bob's samples, amperes^2.
    pub snu_reference_a2: f64,
    /// Analytic shot variance of the run (0 when injection is off).
    pub shot_variance_a2: f64,
    /// Analytic thermal variance of the run (0 when injection is off).
    pub thermal_variance_a2: f64,
    /// Additive variance contributions per stage, in SNU at Bob.
    pub noise_budget: BTreeMap<String, f64>,
    pub n_symbols: usize,
    /// Alice-x vs Bob-x correlation histogram (Bob rescaled by 1/sqrt(L)).
    #[serde(skip)]
    pub hist_x: Histogram2d,
    /// Alice-p vs Bob-p correlation histogram.
    #[serde(skip)]
    pub hist_p: Histogram2d,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand_distr::{Distribution, StandardNormal};

    fn gaussian(n: usize, sigma: f64, label: &str) -> Vec<f64> {
        let factory = StreamFactory::from_seed(99);
        let mut rng = factory.stream(label);
        (0..n)
            .map(|_| {
                let g: f64 = StandardNormal.sample(&mut rng);
                sigma * g
            })
            .collect()
    }

    #[test]
    fn variance_ratio_identity_and_scaling() {
        let samples = gaussian(10_000, 1.3, "vr");
        let v = stats::variance(&samples).unwrap();
        // Measured against its own sample variance the ratio is exactly 1.
        assert_eq!(variance_ratio(&samples, v).unwrap(), 1.0);
        let scaled: Vec<f64> = samples.iter().map(|s| s * 0.5f64.sqrt()).collect();
        assert_relative_eq!(variance_ratio(&scaled, v).unwrap(), 0.5, max_relative = 1e-12);
        assert!(variance_ratio(&samples[..1], v).is_err());
        assert!(variance_ratio(&samples, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn variance_ratio_scales_quadratically(scale in 0.1f64..10.0) {
            let samples = gaussian(1000, 1.0, "vr-prop");
            let scaled: Vec<f64> = samples.iter().map(|s| s * scale).collect();
            let base = variance_ratio(&samples, 2.0).unwrap();
            let after = variance_ratio(&scaled, 2.0).unwrap();
            prop_assert!((after / base / (scale * scale) - 1.0).abs() < 1e-9);
        }

        #[test]
        fn pearson_is_affine_invariant(a in 0.1f64..5.0, b in -3.0f64..3.0) {
            let xs = gaussian(2000, 1.0, "aff-x");
            let ys: Vec<f64> = xs.iter().zip(gaussian(2000, 1.0, "aff-n"))
                .map(|(x, n)| x + 0.5 * n)
                .collect();
            let r0 = stats::pearson(&xs, &ys).unwrap();
            let transformed: Vec<f64> = ys.iter().map(|y| a * y + b).collect();
            let r1 = stats::pearson(&xs, &transformed).unwrap();
            prop_assert!((r0 - r1).abs() < 1e-12);
        }
    }

    #[test]
    fn pearson_basics() {
        let a = gaussian(5000, 1.0, "pe");
        let r = stats::pearson(&a, &a).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
        let neg: Vec<f64> = a.iter().map(|v| -v).collect();
        assert!((stats::pearson(&a, &neg).unwrap() + 1.0).abs() < 1e-12);
        let flat = vec![1.0; 5000];
        assert!(matches!(
            stats::pearson(&a, &flat),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn pearson_under_heavy_noise() {
        // b = a + noise with Var(noise) = 99 Var(a): r -> 1/sqrt(100).
        let n = 1_000_000;
        let a = gaussian(n, 1.0, "hn-a");
        let noise = gaussian(n, (99.0f64).sqrt(), "hn-n");
        let b: Vec<f64> = a.iter().zip(&noise).map(|(x, w)| x + w).collect();
        let r = stats::pearson(&a, &b).unwrap();
        assert!((r - 0.1).abs() < 0.01, "r = {r}");
    }

    #[test]
    fn added_noise_strictly_reduces_correlation() {
        let n = 100_000;
        let a = gaussian(n, 1.0, "mono-a");
        let n1 = gaussian(n, 0.7, "mono-n1");
        let n2 = gaussian(n, 0.7, "mono-n2");
        let b: Vec<f64> = a.iter().zip(&n1).map(|(x, w)| x + w).collect();
        let c: Vec<f64> = b.iter().zip(&n2).map(|(x, w)| x + w).collect();
        let r_ab = stats::pearson(&a, &b).unwrap().abs();
        let r_ac = stats::pearson(&a, &c).unwrap().abs();
        assert!(r_ac < r_ab, "r_ab = {r_ab}, r_ac = {r_ac}");
    }

    #[test]
    fn histogram_marginals_and_mass() {
        let a = gaussian(50_000, 1.0, "h-a");
        let b = gaussian(50_000, 2.0, "h-b");
        let hist = Histogram2d::from_samples(&a, &b, 32).unwrap();
        assert_eq!(hist.n_samples, 50_000);
        assert_eq!(hist.counts.iter().sum::<u64>(), 50_000);
        let half_x = hist.x_edges.last().unwrap().abs();
        let half_y = hist.y_edges.last().unwrap().abs();
        assert_eq!(hist.marginal_x(), histogram1d(&a, 32, half_x));
        assert_eq!(hist.marginal_y(), histogram1d(&b, 32, half_y));
    }

    #[test]
    fn histogram_diagonal_when_identical() {
        let a = gaussian(20_000, 1.0, "h-d");
        let hist = Histogram2d::from_samples(&a, &a, 16).unwrap();
        for iy in 0..16 {
            for ix in 0..16 {
                if ix != iy && hist.counts[iy * 16 + ix] != 0 {
                    panic!("off-diagonal mass at ({ix}, {iy})");
                }
            }
        }
    }

    #[test]
    fn histogram_independent_inputs_match_multinomial_oracle() {
        // Expected bin mass from the product of exact Gaussian bin
        // probabilities; no bin may exceed it by more than 5 sqrt(expected)
        // (plus the sub-count allowance where the expectation is below one).
        let n = 1_000_000usize;
        let a = gaussian(n, 1.0, "h-i-a");
        let b = gaussian(n, 1.0, "h-i-b");
        let bins = 32usize;
        let hist = Histogram2d::from_samples(&a, &b, bins).unwrap();

        let phi = |z: f64| 0.5 * (1.0 + erf(z / std::f64::consts::SQRT_2));
        let bin_probs = |edges: &[f64], sigma: f64| -> Vec<f64> {
            let mut p = Vec::with_capacity(edges.len() - 1);
            for i in 0..edges.len() - 1 {
                let lo = if i == 0 { f64::NEG_INFINITY } else { edges[i] };
                let hi = if i == edges.len() - 2 {
                    f64::INFINITY
                } else {
                    edges[i + 1]
                };
                let c = |v: f64| {
                    if v.is_infinite() {
                        if v > 0.0 { 1.0 } else { 0.0 }
                    } else {
                        phi(v / sigma)
                    }
                };
                p.push(c(hi) - c(lo));
            }
            p
        };
        let sa = stats::variance(&a).unwrap().sqrt();
        let sb = stats::variance(&b).unwrap().sqrt();
        let px = bin_probs(&hist.x_edges, sa);
        let py = bin_probs(&hist.y_edges, sb);
        for iy in 0..bins {
            for ix in 0..bins {
                let expected = n as f64 * px[ix] * py[iy];
                let count = hist.counts[iy * bins + ix] as f64;
                let bound = if expected >= 1.0 {
                    expected + 5.0 * expected.sqrt()
                } else {
                    (expected + 5.0 * expected.sqrt()).ceil().max(1.0)
                };
                assert!(
                    count <= bound,
                    "bin ({ix}, {iy}): count {count}, expected {expected:.3}"
                );
            }
        }
    }

    // Abramowitz-Stegun 7.1.26 rational approximation, |error| < 1.5e-7;
    // plenty for multinomial bin probabilities.
    fn erf(x: f64) -> f64 {
        let sign = if x < 0.0 { -1.0 } else { 1.0 };
        let x = x.abs();
        let t = 1.0 / (1.0 + 0.3275911 * x);
        let y = 1.0
            - (((((1.061405429 * t - 1.453152027) * t) + 1.421413741) * t - 0.284496736) * t
                + 0.254829592)
                * t
                * (-x * x).exp();
        sign * y
    }

    #[test]
    fn calibration_matches_analytic_reference() {
        let det = DetectorConfig::default();
        let factory = StreamFactory::from_seed(3);

        // Noise off: exactly the analytic shot variance.
        let cal = calibrate_snu(&det, NoiseToggles::OFF, 1000, &factory, "cal").unwrap();
        assert!(!cal.measured);
        assert_eq!(cal.reference_a2, receiver::shot_noise_variance(&det, 0.0));

        // Noise on: Monte-Carlo vacuum variance minus analytic thermal.
        let cal = calibrate_snu(&det, NoiseToggles::ON, 500_000, &factory, "cal").unwrap();
        let expected = receiver::shot_noise_variance(&det, 0.0);
        let tol = 3.0 * (2.0f64 / 1_000_000.0).sqrt() * (expected + cal.thermal_analytic_a2)
            / expected;
        assert!(
            (cal.reference_a2 / expected - 1.0).abs() < tol,
            "reference {} vs shot {expected}",
            cal.reference_a2
        );

        // Doubling the LO power doubles the (analytic) reference.
        let double = DetectorConfig {
            lo_power_w: 2.0 * det.lo_power_w,
            ..det
        };
        let cal2 = calibrate_snu(&double, NoiseToggles::OFF, 2, &factory, "cal").unwrap();
        assert_relative_eq!(cal2.reference_a2, 2.0 * cal.shot_analytic_a2, max_relative = 1e-12);
    }
}
