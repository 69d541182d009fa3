//! Closed-form spectral densities of the emitter.
//!
//! All densities are one-sided in ω ≥ 0 with the autocorrelation given by
//! C(τ) = (1/π) ∫₀^∞ S(ω) cos(ωτ) dω. Equivalently S is the two-sided
//! angular-frequency density with C(τ) = (1/2π) ∫ S e^{iωτ} dω, so white
//! noise of level S has C(τ) = S δ(τ). Estimators and synthesis in
//! [`crate::stochastic`] use the same convention.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::friction::FrictionModel;
use crate::params::EmitterParams;

/// E(ω, T) = ħω coth(ħω/2k_BT), or 2k_BT in classical mode.
///
/// Continuous in both arguments: E(0, T) = 2k_BT, E(ω, 0) = ħω, E(0, 0) = 0.
pub fn quantum_energy_factor(omega: f64, params: &EmitterParams) -> f64 {
    let kt = params.kt();
    if params.classical {
        return 2.0 * kt;
    }
    energy_factor(params.hbar(), kt, omega)
}

pub(crate) fn energy_factor(hbar: f64, kt: f64, omega: f64) -> f64 {
    let quantum = hbar * omega;
    if kt == 0.0 {
        return quantum;
    }
    if omega == 0.0 {
        return 2.0 * kt;
    }
    let x = quantum / (2.0 * kt);
    if x < 1e-5 {
        // x coth x = 1 + x²/3 + O(x⁴)
        2.0 * kt * (1.0 + x * x / 3.0)
    } else {
        quantum / x.tanh()
    }
}

/// Langevin-force density from the fluctuation–dissipation theorem,
/// S_FF = m γ(ω) E(ω, T).
pub fn s_ff(model: &FrictionModel, omega: f64, params: &EmitterParams) -> Result<f64> {
    let gamma = model.gamma(omega)?;
    if gamma == 0.0 {
        return Ok(0.0);
    }
    Ok(params.m * gamma * quantum_energy_factor(omega, params))
}

fn check_omega(omega: f64) -> Result<()> {
    if omega >= 0.0 && omega.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("omega must be finite and >= 0, got {omega}")))
    }
}

/// Oscillator amplitude density
/// S_XX = E(ω,T) γ(ω) / m / [(ω² − ω₀²)² + ω²γ(ω)²].
///
/// This is the product ħcoth(ħω/2k_BT)/(2mω) · 2ω²γ/[...] with the ω
/// factors cancelled, so ω = 0 is finite whenever ω₀ > 0.
pub fn s_xx(params: &EmitterParams, model: &FrictionModel, omega: f64) -> Result<f64> {
    check_omega(omega)?;
    let gamma = model.gamma(omega)?;
    let w2 = omega * omega;
    let detuning = w2 - params.omega0 * params.omega0;
    let denom = detuning * detuning + w2 * gamma * gamma;
    if denom == 0.0 {
        return Err(Error::Singular(format!(
            "S_XX diverges at omega = {omega} (undamped resonance or free particle at zero frequency); \
             evaluate away from this point or add friction"
        )));
    }
    Ok(quantum_energy_factor(omega, params) * gamma / (params.m * denom))
}

/// Relaxation (Lorentzian) approximation of S_XX around ω₀:
/// E(ω₀,T)/(2mω₀²) · (γ/2)/[(ω − ω₀)² + γ²/4] with γ = γ(ω₀).
pub fn s_xx_lorentzian(params: &EmitterParams, model: &FrictionModel, omega: f64) -> Result<f64> {
    check_omega(omega)?;
    let w0 = params.omega0;
    if w0 == 0.0 {
        return Err(Error::NotApplicable(
            "the Lorentzian approximation needs a non-zero own frequency".into(),
        ));
    }
    let gamma = model.gamma(w0)?;
    if !(gamma > 0.0) {
        return Err(Error::NotApplicable("the Lorentzian approximation needs gamma(omega0) > 0".into()));
    }
    let amplitude = quantum_energy_factor(w0, params) / (2.0 * params.m * w0 * w0);
    let d = omega - w0;
    Ok(amplitude * (gamma / 2.0) / (d * d + gamma * gamma / 4.0))
}

/// Lorentzian line shape (γ/2)/[(ω − ω₀)² + γ²/4]; its FWHM is γ.
pub fn lorentzian_shape(omega: f64, omega0: f64, gamma: f64) -> f64 {
    let d = omega - omega0;
    (gamma / 2.0) / (d * d + gamma * gamma / 4.0)
}

/// Velocity density S_VV = ω² S_XX.
///
/// For a free particle (ω₀ = 0) the ω² cancels and
/// S_VV = E γ / m / (ω² + γ²); at ω = 0 with γ(0) = 0 the ratio γ/ω² is
/// replaced by the low-frequency curvature of the model.
pub fn s_vv(params: &EmitterParams, model: &FrictionModel, omega: f64) -> Result<f64> {
    check_omega(omega)?;
    if params.omega0 > 0.0 {
        return Ok(omega * omega * s_xx(params, model, omega)?);
    }
    let gamma = model.gamma(omega)?;
    let energy = quantum_energy_factor(omega, params);
    if omega == 0.0 && gamma == 0.0 {
        let curvature = model.low_frequency_curvature().map_err(|_| {
            Error::Singular("S_VV at omega = 0 is undefined for a frictionless free particle".into())
        })?;
        return Ok(energy * curvature / params.m);
    }
    if gamma == 0.0 {
        return Ok(0.0);
    }
    Ok(energy * gamma / (params.m * (omega * omega + gamma * gamma)))
}

/// Force density of the integrated vacuum model, (m/τ₀) E(ω, T).
pub fn s_ff_integrated(params: &EmitterParams, omega: f64) -> Result<f64> {
    check_omega(omega)?;
    if !(params.tau0 > 0.0) {
        return Err(Error::Domain("the integrated vacuum force needs tau0 > 0".into()));
    }
    Ok(params.m / params.tau0 * quantum_energy_factor(omega, params))
}

/// Friction maximising the free-particle S_VV at frequency ω, and the
/// maximal value ħ coth(ħω/2k_BT)/2m (k_BT/mω classically).
pub fn optimal_friction_svv(omega: f64, params: &EmitterParams) -> Result<(f64, f64)> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::Domain(format!("omega must be > 0, got {omega}")));
    }
    let svv_max = quantum_energy_factor(omega, params) / (2.0 * params.m * omega);
    Ok((omega, svv_max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumKind {
    Xx,
    Vv,
    Ff,
    XxLorentzian,
    FfIntegrated,
}

impl SpectrumKind {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "xx" => Ok(SpectrumKind::Xx),
            "vv" => Ok(SpectrumKind::Vv),
            "ff" => Ok(SpectrumKind::Ff),
            "xx-lorentzian" => Ok(SpectrumKind::XxLorentzian),
            "ff-integrated" => Ok(SpectrumKind::FfIntegrated),
            other => Err(Error::validation(
                "kind",
                format!("expected xx|vv|ff|xx-lorentzian|ff-integrated, got `{other}`"),
            )),
        }
    }

    pub fn evaluate(self, params: &EmitterParams, model: &FrictionModel, omega: f64) -> Result<f64> {
        match self {
            SpectrumKind::Xx => s_xx(params, model, omega),
            SpectrumKind::Vv => s_vv(params, model, omega),
            SpectrumKind::Ff => s_ff(model, omega, params),
            SpectrumKind::XxLorentzian => s_xx_lorentzian(params, model, omega),
            SpectrumKind::FfIntegrated => s_ff_integrated(params, omega),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridKind {
    Linear,
    Log,
}

/// `points` frequencies from `omega_min` to `omega_max` inclusive.
pub fn frequency_grid(omega_min: f64, omega_max: f64, points: usize, grid: GridKind) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::validation("points", "need at least 2 grid points"));
    }
    if !(omega_min >= 0.0 && omega_max > omega_min && omega_max.is_finite()) {
        return Err(Error::validation("omega-max", "need 0 <= omega-min < omega-max"));
    }
    let n = (points - 1) as f64;
    let grid = match grid {
        GridKind::Linear => (0..points)
            .map(|i| omega_min + (omega_max - omega_min) * i as f64 / n)
            .collect(),
        GridKind::Log => {
            if omega_min == 0.0 {
                return Err(Error::validation("omega-min", "a log grid needs omega-min > 0"));
            }
            let (a, b) = (omega_min.ln(), omega_max.ln());
            (0..points).map(|i| (a + (b - a) * i as f64 / n).exp()).collect()
        }
    };
    Ok(grid)
}

/// Sampled spectral density with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSamples {
    pub omegas: Vec<f64>,
    pub values: Vec<f64>,
    pub kind: SpectrumKind,
    pub params: EmitterParams,
    pub model: FrictionModel,
}

impl SpectrumSamples {
    pub fn evaluate(
        kind: SpectrumKind,
        params: &EmitterParams,
        model: &FrictionModel,
        omegas: Vec<f64>,
    ) -> Result<Self> {
        if omegas.len() < 2 {
            return Err(Error::Input("a spectrum needs at least two frequencies".into()));
        }
        if omegas.windows(2).any(|w| !(w[1] > w[0])) || omegas[0] < 0.0 {
            return Err(Error::Input("frequencies must be >= 0 and strictly increasing".into()));
        }
        let values = omegas
            .iter()
            .map(|&w| kind.evaluate(params, model, w))
            .collect::<Result<Vec<_>>>()?;
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::Scheme(format!("spectral density evaluated to {bad}")));
        }
        Ok(SpectrumSamples {
            omegas,
            values,
            kind,
            params: params.clone(),
            model: model.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{make_params, ParamSpec};
    use approx::assert_relative_eq;

    fn params(gamma0: f64, omega0: f64, tau0: f64, temperature: f64) -> EmitterParams {
        make_params(&ParamSpec::reduced(1.0, gamma0, omega0, tau0, temperature, 1e3)).unwrap()
    }

    #[test]
    fn energy_factor_limits() {
        let p = params(0.1, 1.0, 0.0, 0.7);
        assert_relative_eq!(quantum_energy_factor(0.0, &p), 1.4, max_relative = 1e-15);
        let cold = params(0.1, 1.0, 0.0, 0.0);
        assert_eq!(quantum_energy_factor(3.0, &cold), 3.0);
        assert_eq!(quantum_energy_factor(0.0, &cold), 0.0);
        // ħω = 2k_BT → ħω coth(1)
        let p = params(0.1, 1.0, 0.0, 0.5);
        assert_relative_eq!(quantum_energy_factor(1.0, &p), 1.313_035_285_499_331_3, max_relative = 1e-14);
        // no jump across the series switch
        let below = quantum_energy_factor(0.999e-5, &p);
        let above = quantum_energy_factor(1.001e-5, &p);
        assert!((below - above).abs() < 1e-12);
    }

    #[test]
    fn force_density_models() {
        let p = params(0.3, 1.0, 0.0, 2.0).classical();
        let ohmic = FrictionModel::ohmic(0.3);
        for w in [0.0, 1.0, 50.0] {
            assert_relative_eq!(s_ff(&ohmic, w, &p).unwrap(), 2.0 * 2.0 * 0.3, max_relative = 1e-15);
        }
        let q = params(0.3, 1.0, 0.0, 2.0);
        let sech = FrictionModel::sech_twin(&q);
        let w = 1.7;
        let x = w / 4.0;
        assert_relative_eq!(s_ff(&sech, w, &q).unwrap(), 0.3 * w / x.sinh(), max_relative = 1e-13);
        assert!(s_ff(&sech, 1e4, &q).unwrap() < 1e-300);
    }

    #[test]
    fn amplitude_density_at_resonance() {
        let p = params(0.1, 1.0, 0.0, 0.0);
        let model = FrictionModel::radiative(&p);
        assert_relative_eq!(s_xx(&p, &model, 1.0).unwrap(), 10.0, max_relative = 1e-14);
    }

    #[test]
    fn amplitude_density_classical_zero_frequency() {
        let p = params(0.1, 1.0, 0.0, 1.0).classical();
        let model = FrictionModel::radiative(&p);
        assert_relative_eq!(s_xx(&p, &model, 0.0).unwrap(), 0.2, max_relative = 1e-14);
        assert_relative_eq!(s_xx(&p, &model, 1e-6).unwrap(), 0.2, max_relative = 1e-6);
    }

    #[test]
    fn undamped_resonance_is_singular() {
        let p = params(0.0, 1.0, 0.0, 1.0);
        let model = FrictionModel::radiative(&p);
        assert!(matches!(s_xx(&p, &model, 1.0), Err(Error::Singular(_))));
    }

    #[test]
    fn amplitude_tail_falls_as_cube() {
        // asymptotic once τ₀ω ≫ 1
        let p = params(0.1, 1.0, 0.1, 0.0);
        let model = FrictionModel::radiative(&p);
        let a = 1e3_f64.powi(3) * s_xx(&p, &model, 1e3).unwrap();
        let b = 1e4_f64.powi(3) * s_xx(&p, &model, 1e4).unwrap();
        assert!((a / b - 1.0).abs() < 0.02, "{a} vs {b}");
    }

    #[test]
    fn lorentzian_matches_at_peak_and_half_width() {
        let p = params(0.02, 3.0, 0.001, 0.4);
        let model = FrictionModel::radiative(&p);
        let exact = s_xx(&p, &model, 3.0).unwrap();
        let lor = s_xx_lorentzian(&p, &model, 3.0).unwrap();
        assert_relative_eq!(exact, lor, max_relative = 1e-14);
        let g = p.gamma_at_omega0();
        let half = s_xx_lorentzian(&p, &model, 3.0 + g / 2.0).unwrap();
        assert_relative_eq!(half, lor / 2.0, max_relative = 1e-12);
        let free = params(0.1, 0.0, 0.0, 1.0);
        assert!(matches!(
            s_xx_lorentzian(&free, &FrictionModel::radiative(&free), 1.0),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn relaxation_approximation_quality() {
        for (gamma0, tau0, temperature) in [(0.01, 0.0, 0.0), (0.005, 0.005, 0.0), (0.01, 0.0, 3.0)] {
            let p = params(gamma0, 1.0, tau0, temperature);
            let model = FrictionModel::radiative(&p);
            let g = p.gamma_at_omega0();
            assert!(g <= 0.01 + 1e-15);
            let mut worst = 0.0_f64;
            for i in 0..=600 {
                let w = 1.0 - 3.0 * g + 6.0 * g * i as f64 / 600.0;
                let exact = s_xx(&p, &model, w).unwrap();
                let approx = s_xx_lorentzian(&p, &model, w).unwrap();
                worst = worst.max((approx - exact).abs() / exact);
            }
            assert!(worst <= 0.05, "worst relative gap {worst}");
        }
    }

    #[test]
    fn velocity_density_identity() {
        let p = params(0.3, 1.5, 0.02, 0.8);
        let model = FrictionModel::radiative(&p);
        for w in [0.0, 0.01, 0.5, 1.5, 7.0, 300.0] {
            let vv = s_vv(&p, &model, w).unwrap();
            let xx = s_xx(&p, &model, w).unwrap();
            assert_relative_eq!(vv, w * w * xx, max_relative = 1e-14);
        }
        let free = params(0.3, 0.0, 0.02, 0.8);
        let model = FrictionModel::radiative(&free);
        for w in [0.01, 0.5, 7.0] {
            let vv = s_vv(&free, &model, w).unwrap();
            let xx = s_xx(&free, &model, w).unwrap();
            assert_relative_eq!(vv, w * w * xx, max_relative = 1e-13);
        }
    }

    #[test]
    fn vacuum_velocity_density() {
        let p = params(0.0, 0.0, 0.5, 0.0);
        let model = FrictionModel::radiative(&p);
        // maximum of ωτ₀/(1 + ω²τ₀²) at ωτ₀ = 1
        assert_relative_eq!(s_vv(&p, &model, 2.0).unwrap(), 0.5, max_relative = 1e-14);
        assert_eq!(s_vv(&p, &model, 0.0).unwrap(), 0.0);
        let small = params(0.0, 0.0, 1e-3, 0.0);
        let model = FrictionModel::radiative(&small);
        for w in [1.0, 10.0, 99.0] {
            let exact = s_vv(&small, &model, w).unwrap();
            assert!((exact / (w * 1e-3) - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn einstein_diffusion_from_zero_frequency() {
        let p = params(2.0, 0.0, 0.0, 3.0).classical();
        let model = FrictionModel::radiative(&p);
        assert_relative_eq!(s_vv(&p, &model, 0.0).unwrap(), 2.0 * 3.0 / 2.0, max_relative = 1e-15);
    }

    #[test]
    fn integrated_vacuum_force() {
        let p = params(0.0, 0.0, 0.25, 1.5).classical();
        assert_relative_eq!(s_ff_integrated(&p, 4.0).unwrap(), 2.0 * 1.5 / 0.25, max_relative = 1e-15);
        let cold = params(0.0, 0.0, 0.25, 0.0);
        assert_relative_eq!(s_ff_integrated(&cold, 4.0).unwrap(), 16.0, max_relative = 1e-15);
        let warm = params(0.0, 0.0, 0.25, 1.5);
        assert_relative_eq!(s_ff_integrated(&warm, 0.0).unwrap(), 12.0, max_relative = 1e-15);
        let none = params(0.0, 0.0, 0.0, 1.0);
        assert!(matches!(s_ff_integrated(&none, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn optimal_friction() {
        let cold = params(0.0, 0.0, 0.0, 0.0);
        assert_eq!(optimal_friction_svv(3.0, &cold).unwrap(), (3.0, 0.5));
        let warm = params(0.0, 0.0, 0.0, 2.0).classical();
        assert_relative_eq!(optimal_friction_svv(4.0, &warm).unwrap().1, 2.0 / 4.0, max_relative = 1e-15);
        assert!(optimal_friction_svv(0.0, &warm).is_err());
    }

    #[test]
    fn grids() {
        let g = frequency_grid(0.0, 1.0, 5, GridKind::Linear).unwrap();
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let g = frequency_grid(1.0, 100.0, 3, GridKind::Log).unwrap();
        assert_relative_eq!(g[1], 10.0, max_relative = 1e-14);
        assert!(frequency_grid(0.0, 1.0, 3, GridKind::Log).is_err());
    }
}
