use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::Trajectory;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Window {
    Rectangular,
    Hann,
}

impl Window {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "rectangular" | "rect" => Ok(Window::Rectangular),
            "hann" => Ok(Window::Hann),
            other => Err(Error::validation("window", format!("expected rectangular|hann, got `{other}`"))),
        }
    }

    fn coefficients(self, len: usize) -> Vec<f64> {
        match self {
            Window::Rectangular => vec![1.0; len],
            // periodic Hann, so 50% overlapped copies sum to a constant
            Window::Hann => (0..len)
                .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / len as f64).cos())
                .collect(),
        }
    }

    /// Segment hop as a fraction of the segment length.
    fn hop_fraction(self) -> f64 {
        match self {
            Window::Rectangular => 1.0,
            Window::Hann => 0.5,
        }
    }

    /// Inflation of the variance of the mean caused by segment overlap,
    /// 1 + 2ρ² with ρ the window's 50%-overlap correlation (1/6 for Hann).
    fn overlap_variance_factor(self) -> f64 {
        match self {
            Window::Rectangular => 1.0,
            Window::Hann => 1.0 + 2.0 / 36.0,
        }
    }
}

/// Welch-averaged spectral density estimate on ω_k = 2πk/(L·dt),
/// k = 0..=L/2, normalised so that (1/π) ∫₀^{π/dt} S dω is the variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsdEstimate {
    pub omegas: Vec<f64>,
    pub values: Vec<f64>,
    pub n_segments: usize,
    pub window: Window,
    /// Variance of each averaged bin value.
    pub variance_of_estimate: Vec<f64>,
}

impl PsdEstimate {
    pub fn std_errors(&self) -> Vec<f64> {
        self.variance_of_estimate.iter().map(|v| v.sqrt()).collect()
    }

    /// (1/π) × trapezoid integral of the estimate over [0, π/dt].
    pub fn integrated_variance(&self) -> f64 {
        let area: f64 = self
            .omegas
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(w, v)| 0.5 * (w[1] - w[0]) * (v[0] + v[1]))
            .sum();
        area / PI
    }
}

/// Welch estimate with segments of `segment_length` (a power of two).
/// Hann segments overlap by half; rectangular segments do not overlap.
/// At least 8 segments are required.
pub fn estimate_psd(traj: &Trajectory, segment_length: usize, window: Window) -> Result<PsdEstimate> {
    traj.validate()?;
    let n = traj.len();
    if segment_length < 2 || !segment_length.is_power_of_two() {
        return Err(Error::validation("segment_length", "must be a power of two >= 2"));
    }
    if segment_length > n {
        return Err(Error::validation("segment_length", "longer than the trajectory"));
    }
    let hop = ((segment_length as f64 * window.hop_fraction()) as usize).max(1);
    let n_segments = (n - segment_length) / hop + 1;
    if n_segments < 8 {
        return Err(Error::validation(
            "segment_length",
            format!("only {n_segments} segments fit; at least 8 are needed"),
        ));
    }
    let w = window.coefficients(segment_length);
    let power: f64 = w.iter().map(|c| c * c).sum();
    let scale = traj.dt / power;
    let bins = segment_length / 2 + 1;
    let fft = FftPlanner::<f64>::new().plan_fft_forward(segment_length);

    let mut sum = vec![0.0; bins];
    let mut sum_sq = vec![0.0; bins];
    let mut buf = vec![Complex64::new(0.0, 0.0); segment_length];
    for s in 0..n_segments {
        let seg = &traj.samples[s * hop..s * hop + segment_length];
        for ((b, x), c) in buf.iter_mut().zip(seg).zip(&w) {
            *b = Complex64::new(x * c, 0.0);
        }
        fft.process(&mut buf);
        for k in 0..bins {
            let p = scale * buf[k].norm_sqr();
            sum[k] += p;
            sum_sq[k] += p * p;
        }
    }
    let kf = n_segments as f64;
    let values: Vec<f64> = sum.iter().map(|s| s / kf).collect();
    let variance_of_estimate = sum_sq
        .iter()
        .zip(&values)
        .map(|(sq, mean)| {
            let sample_var = (sq / kf - mean * mean).max(0.0) * kf / (kf - 1.0);
            sample_var / kf * window.overlap_variance_factor()
        })
        .collect();
    let d_omega = 2.0 * PI / (segment_length as f64 * traj.dt);
    Ok(PsdEstimate {
        omegas: (0..bins).map(|k| k as f64 * d_omega).collect(),
        values,
        n_segments,
        window,
        variance_of_estimate,
    })
}

/// Biased (1/N) autocorrelation of the mean-removed series for lags
/// 0..=max_lag; entry 0 is the sample variance. Requires max_lag < N/4.
pub fn estimate_autocorrelation(traj: &Trajectory, max_lag: usize) -> Result<Vec<f64>> {
    traj.validate()?;
    let n = traj.len();
    if max_lag >= n / 4 {
        return Err(Error::validation("max_lag", format!("must be < N/4 = {}", n / 4)));
    }
    let mean = traj.mean();
    let size = (2 * n).next_power_of_two();
    let mut buf: Vec<Complex64> = traj
        .samples
        .iter()
        .map(|s| Complex64::new(s - mean, 0.0))
        .chain(std::iter::repeat(Complex64::new(0.0, 0.0)))
        .take(size)
        .collect();
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_forward(size).process(&mut buf);
    for c in buf.iter_mut() {
        *c = Complex64::new(c.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(size).process(&mut buf);
    let norm = 1.0 / (size as f64 * n as f64);
    Ok(buf[..=max_lag].iter().map(|c| c.re * norm).collect())
}
