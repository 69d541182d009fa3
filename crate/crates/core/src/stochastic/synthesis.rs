use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use super::{Trajectory, TrajectoryKind};
use crate::error::{Error, Result};

/// Stationary Gaussian series of `n` samples at step `dt` whose spectral
/// density is `target_psd` (module convention: variance =
/// (1/π) ∫₀^{π/dt} S dω).
///
/// Fourier amplitudes X_k with E|X_k|² = S(ω_k)/(n·dt) on the grid
/// ω_k = 2π k/(n·dt) are drawn with Hermitian symmetry and transformed
/// back, so the series is periodic with period n·dt.
pub fn synthesize_trajectory<F>(target_psd: F, n: usize, dt: f64, seed: u64, kind: TrajectoryKind) -> Result<Trajectory>
where
    F: Fn(f64) -> f64,
{
    if n < 2 {
        return Err(Error::Input("need at least two samples".into()));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Input(format!("dt must be > 0, got {dt}")));
    }
    let norm = 1.0 / (n as f64 * dt);
    let d_omega = 2.0 * std::f64::consts::PI * norm;
    let half = n / 2;
    let mut density = Vec::with_capacity(half + 1);
    for k in 0..=half {
        let omega = k as f64 * d_omega;
        let s = target_psd(omega);
        if !(s.is_finite() && s >= 0.0) {
            return Err(Error::Input(format!("target density is {s} at omega = {omega}")));
        }
        density.push(s);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
    let mut spectrum = vec![Complex64::new(0.0, 0.0); n];
    spectrum[0] = Complex64::new((density[0] * norm).sqrt() * normal(), 0.0);
    for k in 1..n.div_ceil(2) {
        let amp = (0.5 * density[k] * norm).sqrt();
        let c = Complex64::new(amp * normal(), amp * normal());
        spectrum[k] = c;
        spectrum[n - k] = c.conj();
    }
    if n.is_multiple_of(2) {
        spectrum[half] = Complex64::new((density[half] * norm).sqrt() * normal(), 0.0);
    }

    FftPlanner::<f64>::new().plan_fft_inverse(n).process(&mut spectrum);
    let samples = spectrum.into_iter().map(|c| c.re).collect();
    Trajectory::new(dt, samples, kind, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_spectrum_gives_zero_series() {
        let t = synthesize_trajectory(|_| 0.0, 64, 0.1, 3, TrajectoryKind::Position).unwrap();
        assert!(t.samples.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn rejects_negative_density() {
        let err = synthesize_trajectory(|w| 1.0 - w, 64, 0.1, 3, TrajectoryKind::Position).unwrap_err();
        assert!(matches!(err, Error::Input(_)));
    }

    #[test]
    fn flat_density_variance_is_level_over_dt() {
        let (s0, dt, n) = (2.5, 0.05, 1usize << 20);
        let t = synthesize_trajectory(|_| s0, n, dt, 11, TrajectoryKind::Velocity).unwrap();
        let var = t.variance();
        let expected = s0 / dt;
        // sample variance of n Gaussian values has relative sd √(2/n)
        let se = expected * (2.0 / n as f64).sqrt();
        assert!((var - expected).abs() < 3.0 * se, "{var} vs {expected} ± {se}");
    }

    #[test]
    fn same_seed_same_series() {
        let f = |w: f64| 1.0 / (1.0 + w * w);
        let a = synthesize_trajectory(f, 1000, 0.1, 5, TrajectoryKind::Position).unwrap();
        let b = synthesize_trajectory(f, 1000, 0.1, 5, TrajectoryKind::Position).unwrap();
        let c = synthesize_trajectory(f, 1000, 0.1, 6, TrajectoryKind::Position).unwrap();
        assert_eq!(a.samples, b.samples);
        assert_ne!(a.samples, c.samples);
    }
}
