//! Neyman-Pearson detection of a known compressed signal in white noise.
//!
//! Under H₀ the measurement is `y = w`, under H₁ it is `y = Φs + w`, with
//! `w` complex Gaussian of covariance `(σ²/N)·I` drawn directly in the
//! `m`-dimensional measurement space (valid because `ΦΦᴴ = I`). The detector
//! thresholds `t = Re⟨v̂, y⟩ / (σ/√N)`, `v̂ = Φs / ‖Φs‖`, at `Q⁻¹(γ)`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::{tightness_defect, MeasurementMatrix, TIGHTNESS_TOLERANCE};

const BLOCK: usize = 4096;
/// Width of the reported Wilson interval, in standard deviations.
pub const WILSON_Z: f64 = 4.0;
const UNIT_TOLERANCE: f64 = 1e-12;

/// `Q(x) = P(Z > x)` for standard normal `Z`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

fn check_probability(p: f64, what: &str) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} must lie in (0, 1), got {p}")))
    }
}

// Acklam's rational approximation to the standard normal quantile.
fn acklam(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e1,
        2.209460984245205e2,
        -2.759285104469687e2,
        1.383577518672690e2,
        -3.066479806614716e1,
        2.506628277459239,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e1,
        1.615858368580409e2,
        -1.556989798598866e2,
        6.680131188771972e1,
        -1.328068155288572e1,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-3,
        -3.223964580411365e-1,
        -2.400758277161838,
        -2.549732539343734,
        4.374664141464968,
        2.938163982698783,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-3,
        3.224671290700398e-1,
        2.445134137142996,
        3.754408661907416,
    ];
    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    if p < 0.02425 {
        tail((-2.0 * p.ln()).sqrt())
    } else if p > 1.0 - 0.02425 {
        -tail((-2.0 * (1.0 - p).ln()).sqrt())
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// The `x` with `Q(x) = p`.
pub fn q_inverse(p: f64) -> Result<f64> {
    check_probability(p, "probability")?;
    if p > 0.5 {
        // 1 − p is exact here and keeps the Newton residual small.
        return Ok(-q_inverse(1.0 - p)?);
    }
    let mut x = -acklam(p);
    let sqrt_2pi = (2.0 * std::f64::consts::PI).sqrt();
    for _ in 0..4 {
        let u = (q_function(x) - p) * sqrt_2pi * (0.5 * x * x).exp();
        let step = u / (1.0 - 0.5 * x * u);
        x += step;
        if step.abs() <= 1e-15 * x.abs().max(1.0) {
            break;
        }
    }
    Ok(x)
}

/// `P_d = Q(Q⁻¹(γ) − √SNR)`.
pub fn theoretical_pd(snr: f64, gamma: f64) -> Result<f64> {
    check_probability(gamma, "false-alarm rate")?;
    if !(snr >= 0.0) || !snr.is_finite() {
        return Err(Error::Domain(format!("snr must be finite and non-negative, got {snr}")));
    }
    Ok(q_function(q_inverse(gamma)? - snr.sqrt()))
}

fn check_signal(phi: &MeasurementMatrix, s: &[Complex64]) -> Result<()> {
    if s.len() != phi.cols() {
        return Err(Error::DimensionMismatch {
            expected: phi.cols(),
            got: s.len(),
        });
    }
    let norm = s.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > UNIT_TOLERANCE {
        return Err(Error::Domain(format!("signal must have unit norm, got {norm}")));
    }
    Ok(())
}

/// `N‖Φs‖² / σ²`.
pub fn snr_of(phi: &MeasurementMatrix, s: &[Complex64], noise_power: f64) -> Result<f64> {
    check_signal(phi, s)?;
    if !(noise_power > 0.0) {
        return Err(Error::Domain(format!("noise power must be positive, got {noise_power}")));
    }
    let v = phi.apply(s)?;
    let energy: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    Ok(phi.cols() as f64 * energy / noise_power)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionSetup {
    pub matrix: MeasurementMatrix,
    /// Unit-norm signal of length `N`.
    pub signal: Vec<Complex64>,
    /// `σ²`; the per-sample noise variance is `σ²/N`.
    pub noise_power: f64,
    pub false_alarm_rate: f64,
    pub trials: usize,
    pub seed: u64,
}

impl DetectionSetup {
    pub fn validate(&self) -> Result<()> {
        check_signal(&self.matrix, &self.signal)?;
        check_probability(self.false_alarm_rate, "false-alarm rate")?;
        if self.trials == 0 {
            return Err(Error::Domain("trials must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionResult {
    pub empirical_pd: f64,
    pub empirical_pfa: f64,
    pub theoretical_pd: f64,
    pub snr: f64,
    pub trials: usize,
    /// Half-width of the `z = 4` Wilson interval around `empirical_pd`.
    pub wilson_ci_halfwidth: f64,
}

pub const DETECTION_CSV_HEADER: &str = "false_alarm_rate,snr,theoretical_pd,empirical_pd,empirical_pfa,trials,wilson_ci_halfwidth";

impl DetectionResult {
    pub fn csv_row(&self, gamma: f64) -> String {
        use crate::metrics::report::num;
        format!(
            "{},{},{},{},{},{},{}",
            num(gamma),
            num(self.snr),
            num(self.theoretical_pd),
            num(self.empirical_pd),
            num(self.empirical_pfa),
            self.trials,
            num(self.wilson_ci_halfwidth)
        )
    }

    /// Whether `theoretical_pd` lies inside the Wilson interval.
    pub fn consistent(&self) -> bool {
        let (lo, hi) = wilson_interval(self.empirical_pd, self.trials, WILSON_Z);
        self.theoretical_pd >= lo && self.theoretical_pd <= hi
    }
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(p_hat: f64, n: usize, z: f64) -> (f64, f64) {
    let (c, h) = wilson_center_halfwidth(p_hat, n, z);
    (c - h, c + h)
}

fn wilson_center_halfwidth(p_hat: f64, n: usize, z: f64) -> (f64, f64) {
    let n = n as f64;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p_hat + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)).sqrt();
    (center, half)
}

fn complex_normal<R: Rng>(rng: &mut R, sd: f64) -> Complex64 {
    Complex64::new(sd * rng.sample::<f64, _>(StandardNormal), sd * rng.sample::<f64, _>(StandardNormal))
}

/// Monte Carlo estimate of `P_d` and `P_fa` for the linear detector.
pub fn simulate_detection(setup: &DetectionSetup) -> Result<DetectionResult> {
    setup.validate()?;
    let phi = &setup.matrix;
    let defect = tightness_defect(phi);
    if defect > TIGHTNESS_TOLERANCE {
        return Err(Error::NotTight { defect });
    }
    let snr = snr_of(phi, &setup.signal, setup.noise_power)?;
    let gamma = setup.false_alarm_rate;
    let threshold = q_inverse(gamma)?;
    let theory = theoretical_pd(snr, gamma)?;

    let m = phi.rows();
    let sd = (setup.noise_power / phi.cols() as f64).sqrt();
    let v = phi.apply(&setup.signal)?;
    let v_norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let direction: Vec<Complex64> = if v_norm > 1e-300 {
        v.iter().map(|z| z / v_norm).collect()
    } else {
        (0..m).map(|i| Complex64::new(if i == 0 { 1.0 } else { 0.0 }, 0.0)).collect()
    };
    let statistic = |y: &[Complex64]| -> f64 {
        direction.iter().zip(y).map(|(d, x)| (d.conj() * x).re).sum::<f64>() / sd
    };

    let blocks = setup.trials.div_ceil(BLOCK);
    let (false_alarms, detections) = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(setup.seed);
            rng.set_stream(b as u64);
            let len = BLOCK.min(setup.trials - b * BLOCK);
            let mut y = vec![Complex64::new(0.0, 0.0); m];
            let (mut fa, mut det) = (0u64, 0u64);
            for _ in 0..len {
                y.iter_mut().for_each(|x| *x = complex_normal(&mut rng, sd));
                if statistic(&y) > threshold {
                    fa += 1;
                }
                y.iter_mut().zip(&v).for_each(|(x, s)| *x = s + complex_normal(&mut rng, sd));
                if statistic(&y) > threshold {
                    det += 1;
                }
            }
            (fa, det)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));

    let n = setup.trials as f64;
    let empirical_pd = detections as f64 / n;
    Ok(DetectionResult {
        empirical_pd,
        empirical_pfa: false_alarms as f64 / n,
        theoretical_pd: theory,
        snr,
        trials: setup.trials,
        wilson_ci_halfwidth: wilson_center_halfwidth(empirical_pd, setup.trials, WILSON_Z).1,
    })
}
