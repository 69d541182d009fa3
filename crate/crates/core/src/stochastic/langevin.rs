use super::{ForceNoise, NoiseSpec, Trajectory, TrajectoryKind};
use crate::error::{Error, Result};
use crate::params::EmitterParams;
use crate::potential::Potential;

/// Largest accepted dt·|γ_eff|.
const FRICTION_GUARD: f64 = 0.1;
/// Largest accepted dt·ω_local with ω_local² = U″/m.
const FREQUENCY_GUARD: f64 = 0.2;

/// Classical Langevin trajectory of
/// m ẍ = −U′(x) − mγ₀ẋ − τ₀ẋU″(x) + F(t),
/// where F is white noise of density 2mk_BTγ₀ plus violet noise of
/// density 2mk_BTτ₀ω². Returns `n` samples each of position and velocity,
/// the first being (x0, v0).
///
/// Half-kick / drift / half-kick splitting; friction and the step impulse
/// enter the kicks, half of the impulse in each.
pub fn integrate_langevin_classical(
    potential: &Potential,
    params: &EmitterParams,
    n: usize,
    dt: f64,
    seed: u64,
    x0: f64,
    v0: f64,
) -> Result<(Trajectory, Trajectory)> {
    params.validate()?;
    if !params.classical {
        return Err(Error::validation(
            "classical",
            "time-domain integration is classical only; set classical mode",
        ));
    }
    if n < 2 {
        return Err(Error::Input("need at least two samples".into()));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Input(format!("dt must be > 0, got {dt}")));
    }
    if !(x0.is_finite() && v0.is_finite()) {
        return Err(Error::Input("initial state must be finite".into()));
    }
    let m = params.m;
    let noise = NoiseSpec::classical(params);
    noise.validate(true)?;
    let mut force = ForceNoise::new(noise, dt, seed);

    let guard = |x: f64| -> Result<f64> {
        let curvature = potential.curvature(x);
        let gamma_eff = params.gamma0 + params.tau0 * curvature / m;
        if dt * gamma_eff.abs() >= FRICTION_GUARD {
            return Err(Error::StepSize { dt, suggested: 0.5 * FRICTION_GUARD / gamma_eff.abs() });
        }
        let omega_local = (curvature.max(0.0) / m).sqrt();
        if dt * omega_local >= FREQUENCY_GUARD {
            return Err(Error::StepSize { dt, suggested: 0.5 * FREQUENCY_GUARD / omega_local });
        }
        Ok(gamma_eff)
    };

    let mut xs = Vec::with_capacity(n);
    let mut vs = Vec::with_capacity(n);
    let (mut x, mut v) = (x0, v0);
    let mut grad = potential.gradient(x);
    let mut gamma_eff = guard(x)?;
    xs.push(x);
    vs.push(v);
    let half = 0.5 * dt;
    for step in 1..n {
        let impulse = force.next_impulse();
        let kick = 0.5 * impulse / m;
        let v_half = v + half * (-grad / m - gamma_eff * v) + kick;
        x += dt * v_half;
        grad = potential.gradient(x);
        gamma_eff = guard(x)?;
        v = v_half + half * (-grad / m - gamma_eff * v_half) + kick;
        if !(x.is_finite() && v.is_finite()) {
            return Err(Error::Divergence { step });
        }
        xs.push(x);
        vs.push(v);
    }
    let mut pos = Trajectory::new(dt, xs, TrajectoryKind::Position, seed)?;
    let mut vel = Trajectory::new(dt, vs, TrajectoryKind::Velocity, seed)?;
    pos.params = Some(params.clone());
    vel.params = Some(params.clone());
    Ok((pos, vel))
}

/// Time-averaged mean squared displacement ⟨(x(t+τ) − x(t))²⟩ at each lag
/// (in samples).
pub fn mean_squared_displacement(samples: &[f64], lags: &[usize]) -> Result<Vec<f64>> {
    lags.iter()
        .map(|&lag| {
            if lag == 0 || lag >= samples.len() {
                return Err(Error::validation("lag", format!("must be in 1..{}", samples.len())));
            }
            let count = samples.len() - lag;
            let sum: f64 = samples[lag..]
                .iter()
                .zip(samples)
                .map(|(b, a)| (b - a) * (b - a))
                .sum();
            Ok(sum / count as f64)
        })
        .collect()
}

/// Least-squares slope of MSD against time over the given lags.
pub fn msd_slope(traj: &Trajectory, lags: &[usize]) -> Result<f64> {
    let msd = mean_squared_displacement(&traj.samples, lags)?;
    let ts: Vec<f64> = lags.iter().map(|&l| l as f64 * traj.dt).collect();
    let k = ts.len() as f64;
    if ts.len() < 2 {
        return Err(Error::validation("lag", "need at least two lags for a slope"));
    }
    let t_mean = ts.iter().sum::<f64>() / k;
    let m_mean = msd.iter().sum::<f64>() / k;
    let cov: f64 = ts.iter().zip(&msd).map(|(t, y)| (t - t_mean) * (y - m_mean)).sum();
    let var: f64 = ts.iter().map(|t| (t - t_mean) * (t - t_mean)).sum();
    Ok(cov / var)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{make_params, ParamSpec};
    use crate::stochastic::{burn_in_steps, estimate_psd, Window};

    fn reduced(gamma0: f64, omega0: f64, tau0: f64) -> EmitterParams {
        make_params(&ParamSpec::reduced(1.0, gamma0, omega0, tau0, 1.0, 1e3))
            .unwrap()
            .classical()
    }

    #[test]
    fn quantum_mode_refused() {
        let p = reduced(1.0, 1.0, 0.0).quantum();
        let err = integrate_langevin_classical(&Potential::harmonic(1.0, 1.0), &p, 10, 0.01, 1, 0.0, 0.0).unwrap_err();
        assert!(matches!(err, Error::Validation { field: "classical", .. }));
    }

    #[test]
    fn step_guard_reports_suggestion() {
        let p = reduced(5.0, 1.0, 0.0);
        let err = integrate_langevin_classical(&Potential::harmonic(1.0, 1.0), &p, 10, 0.05, 1, 0.0, 0.0).unwrap_err();
        match err {
            Error::StepSize { suggested, .. } => assert!(suggested * 5.0 < 0.1),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let p = reduced(1.0, 1.0, 0.01);
        let u = Potential::harmonic(1.0, 1.0);
        let a = integrate_langevin_classical(&u, &p, 1000, 0.01, 42, 0.0, 0.0).unwrap();
        let b = integrate_langevin_classical(&u, &p, 1000, 0.01, 42, 0.0, 0.0).unwrap();
        assert_eq!(a.0.samples, b.0.samples);
        assert_eq!(a.1.samples, b.1.samples);
    }

    #[test]
    fn zero_temperature_harmonic_decays() {
        let mut p = reduced(1.0, 1.0, 0.0);
        p.temperature = 0.0;
        let (x, _) = integrate_langevin_classical(&Potential::harmonic(1.0, 1.0), &p, 3000, 0.01, 0, 1.0, 0.0).unwrap();
        // underdamped envelope e^{−γt/2} at t = 30
        assert!(x.samples.last().unwrap().abs() < 1e-5);
    }

    #[test]
    fn harmonic_equipartition() {
        let p = reduced(1.0, 1.0, 0.0);
        let dt = 0.01;
        let burn = burn_in_steps(&p, dt);
        let (x, v) = integrate_langevin_classical(&Potential::harmonic(1.0, 1.0), &p, 4_000_000 + burn, dt, 3, 0.0, 0.0).unwrap();
        let (x, v) = (x.discard(burn), v.discard(burn));
        assert!((v.variance() - 1.0).abs() < 0.03, "{}", v.variance());
        assert!((x.variance() - 1.0).abs() < 0.05, "{}", x.variance());
    }

    #[test]
    fn free_particle_einstein_slope() {
        let p = reduced(2.0, 0.0, 0.0);
        let dt = 0.01;
        let (x, _) = integrate_langevin_classical(&Potential::free(), &p, 4_000_000, dt, 8, 0.0, 0.0).unwrap();
        // lags well beyond 1/γ₀
        let lags: Vec<usize> = (2..=10).map(|k| k * 100).collect();
        let slope = msd_slope(&x, &lags).unwrap();
        assert!((slope / 1.0 - 1.0).abs() < 0.05, "{slope}");
    }

    #[test]
    fn vacuum_friction_slope() {
        let p = reduced(0.0, 0.0, 0.05);
        let dt = 0.01;
        let (x, _) = integrate_langevin_classical(&Potential::free(), &p, 4_000_000, dt, 9, 0.0, 0.0).unwrap();
        let lags: Vec<usize> = (1..=10).map(|k| k * 100).collect();
        let slope = msd_slope(&x, &lags).unwrap();
        assert!((slope / 0.1 - 1.0).abs() < 0.05, "{slope}");
    }

    #[test]
    fn violet_noise_spectrum() {
        let (white, violet, dt) = (2.0, 0.5, 0.05);
        let spec = NoiseSpec { white_level: white, violet_level: violet };
        let f = ForceNoise::force_sequence(spec, 1 << 21, dt, 5);
        let t = Trajectory::new(dt, f, TrajectoryKind::Velocity, 5).unwrap();
        let est = estimate_psd(&t, 1024, Window::Hann).unwrap();
        for (w, s) in est.omegas.iter().zip(&est.values).skip(1) {
            if w * dt > 0.5 {
                break;
            }
            let target = white + violet * w * w;
            assert!((s / target - 1.0).abs() < 0.05, "omega {w}: {s} vs {target}");
        }
    }

    #[test]
    fn msd_of_linear_ramp() {
        let x: Vec<f64> = (0..100).map(|i| 2.0 * i as f64).collect();
        let msd = mean_squared_displacement(&x, &[1, 5]).unwrap();
        assert_eq!(msd, vec![4.0, 100.0]);
        assert!(mean_squared_displacement(&x, &[0]).is_err());
    }
}
