//! Frequency-dependent friction coefficients γ(ω).
//!
//! Temperature enters the thermal models through the fixed scale ħ/2k_BT,
//! frozen at construction, so every model is a one-argument function of ω.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::EmitterParams;

/// γ₀ + ω²τ₀ written in terms of ω². Every place that needs the radiative
/// friction at a given squared frequency (spectral half-width, kinetic
/// effective friction) goes through here.
#[inline]
pub fn radiative_gamma_sq(gamma0: f64, tau0: f64, omega_sq: f64) -> f64 {
    gamma0 + omega_sq * tau0
}

/// Friction constant of a particle adsorbed on a Debye solid,
/// 3π m ω₀⁴ / (2 M ω_D³).
pub fn phonon_gamma0(m: f64, big_m: f64, omega0: f64, omega_d: f64) -> Result<f64> {
    for (name, v) in [("m", m), ("M", big_m), ("omega0", omega0), ("omegaD", omega_d)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Domain(format!("{name} must be > 0, got {v}")));
        }
    }
    if omega0 > omega_d {
        return Err(Error::Domain(format!(
            "omega0 = {omega0} lies above the Debye frequency {omega_d}"
        )));
    }
    Ok(3.0 * PI * m * omega0.powi(4) / (2.0 * big_m * omega_d.powi(3)))
}

/// Tabulated γ(ω). Interpolates ln γ linearly in ω between nodes and
/// refuses to extrapolate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedFriction {
    omegas: Vec<f64>,
    ln_gammas: Vec<f64>,
}

impl TabulatedFriction {
    pub fn new(omegas: Vec<f64>, gammas: Vec<f64>) -> Result<Self> {
        if omegas.len() != gammas.len() || omegas.len() < 2 {
            return Err(Error::Input("tabulated friction needs >= 2 equal-length columns".into()));
        }
        if omegas.windows(2).any(|w| !(w[1] > w[0])) || omegas[0] < 0.0 {
            return Err(Error::Input("tabulated frequencies must be >= 0 and strictly increasing".into()));
        }
        if gammas.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
            return Err(Error::Input("tabulated friction values must be finite and > 0".into()));
        }
        Ok(TabulatedFriction {
            omegas,
            ln_gammas: gammas.iter().map(|g| g.ln()).collect(),
        })
    }

    fn eval(&self, omega: f64) -> Result<f64> {
        let lo = self.omegas[0];
        let hi = *self.omegas.last().unwrap();
        if omega < lo || omega > hi {
            return Err(Error::Domain(format!(
                "omega = {omega} outside the tabulated range [{lo}, {hi}]"
            )));
        }
        let i = match self.omegas.partition_point(|&w| w <= omega) {
            0 => 0,
            k if k >= self.omegas.len() => self.omegas.len() - 2,
            k => k - 1,
        };
        let (w0, w1) = (self.omegas[i], self.omegas[i + 1]);
        let t = (omega - w0) / (w1 - w0);
        Ok((self.ln_gammas[i] * (1.0 - t) + self.ln_gammas[i + 1] * t).exp())
    }

    fn at_zero(&self) -> Option<f64> {
        (self.omegas[0] == 0.0).then(|| self.ln_gammas[0].exp())
    }
}

/// The catalogue of friction laws.
///
/// `hbar_over_2kt` is ħ/2k_BT; it is `f64::INFINITY` at zero temperature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FrictionModel {
    Radiative { gamma0: f64, tau0: f64 },
    Ohmic { gamma0: f64 },
    WhiteNoiseInduced { gamma0: f64, hbar_over_2kt: f64 },
    SinhTwin { gamma0: f64, hbar_over_2kt: f64 },
    SechTwin { gamma0: f64, hbar_over_2kt: f64 },
    Phonon { m: f64, big_m: f64, omega0: f64, omega_d: f64, gamma0: f64 },
    Custom(TabulatedFriction),
}

/// Substrate data needed by the `phonon` preset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhononData {
    pub substrate_mass: f64,
    pub debye_frequency: f64,
}

fn thermal_scale(params: &EmitterParams) -> f64 {
    let kt = params.kt();
    if kt > 0.0 {
        params.hbar() / (2.0 * kt)
    } else {
        f64::INFINITY
    }
}

impl FrictionModel {
    /// γ₀ + ω²τ₀ with the emitter's own γ₀ and τ₀.
    pub fn radiative(params: &EmitterParams) -> Self {
        FrictionModel::Radiative {
            gamma0: params.gamma0,
            tau0: params.tau0,
        }
    }

    pub fn ohmic(gamma0: f64) -> Self {
        FrictionModel::Ohmic { gamma0 }
    }

    pub fn white_noise_induced(params: &EmitterParams) -> Self {
        FrictionModel::WhiteNoiseInduced {
            gamma0: params.gamma0,
            hbar_over_2kt: thermal_scale(params),
        }
    }

    pub fn sinh_twin(params: &EmitterParams) -> Self {
        FrictionModel::SinhTwin {
            gamma0: params.gamma0,
            hbar_over_2kt: thermal_scale(params),
        }
    }

    pub fn sech_twin(params: &EmitterParams) -> Self {
        FrictionModel::SechTwin {
            gamma0: params.gamma0,
            hbar_over_2kt: thermal_scale(params),
        }
    }

    pub fn phonon(m: f64, big_m: f64, omega0: f64, omega_d: f64) -> Result<Self> {
        Ok(FrictionModel::Phonon {
            m,
            big_m,
            omega0,
            omega_d,
            gamma0: phonon_gamma0(m, big_m, omega0, omega_d)?,
        })
    }

    /// Builds a model from its CLI/config name.
    pub fn from_name(name: &str, params: &EmitterParams, phonon: Option<PhononData>) -> Result<Self> {
        match name {
            "radiative" => Ok(Self::radiative(params)),
            "ohmic" => Ok(Self::ohmic(params.gamma0)),
            "white" => Ok(Self::white_noise_induced(params)),
            "sinh-twin" => Ok(Self::sinh_twin(params)),
            "sech-twin" => Ok(Self::sech_twin(params)),
            "phonon" => {
                let data = phonon.ok_or_else(|| {
                    Error::validation("model", "phonon needs the substrate mass and Debye frequency")
                })?;
                Self::phonon(params.m, data.substrate_mass, params.omega0, data.debye_frequency)
            }
            other => Err(Error::validation(
                "model",
                format!("unknown friction model `{other}` (radiative|ohmic|white|sinh-twin|sech-twin|phonon)"),
            )),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FrictionModel::Radiative { .. } => "radiative",
            FrictionModel::Ohmic { .. } => "ohmic",
            FrictionModel::WhiteNoiseInduced { .. } => "white",
            FrictionModel::SinhTwin { .. } => "sinh-twin",
            FrictionModel::SechTwin { .. } => "sech-twin",
            FrictionModel::Phonon { .. } => "phonon",
            FrictionModel::Custom(_) => "custom",
        }
    }

    /// Zero-frequency friction γ(0).
    pub fn gamma0(&self) -> Result<f64> {
        match self {
            FrictionModel::Radiative { gamma0, .. }
            | FrictionModel::Ohmic { gamma0 }
            | FrictionModel::WhiteNoiseInduced { gamma0, .. }
            | FrictionModel::SinhTwin { gamma0, .. }
            | FrictionModel::SechTwin { gamma0, .. }
            | FrictionModel::Phonon { gamma0, .. } => Ok(*gamma0),
            FrictionModel::Custom(t) => t
                .at_zero()
                .ok_or_else(|| Error::Domain("tabulated friction does not include omega = 0".into())),
        }
    }

    /// γ(ω) for ω ≥ 0. Zero temperature is the analytic limit x = ħω/2k_BT → ∞.
    pub fn gamma(&self, omega: f64) -> Result<f64> {
        if !(omega >= 0.0) {
            return Err(Error::Domain(format!("omega must be >= 0, got {omega}")));
        }
        let value = match self {
            FrictionModel::Radiative { gamma0, tau0 } => radiative_gamma_sq(*gamma0, *tau0, omega * omega),
            FrictionModel::Ohmic { gamma0 } | FrictionModel::Phonon { gamma0, .. } => *gamma0,
            FrictionModel::WhiteNoiseInduced { gamma0, hbar_over_2kt } => {
                gamma0 * tanh_over_x(thermal_argument(omega, *hbar_over_2kt))
            }
            FrictionModel::SinhTwin { gamma0, hbar_over_2kt } => {
                let x = thermal_argument(omega, *hbar_over_2kt);
                if *gamma0 == 0.0 {
                    0.0
                } else if x.is_infinite() {
                    return Err(Error::NotApplicable("the sinh twin diverges at T = 0 for omega > 0".into()));
                } else {
                    let g = gamma0 * sinh_over_x(x);
                    if !g.is_finite() {
                        return Err(Error::Domain(format!("sinh twin overflows at omega = {omega}")));
                    }
                    g
                }
            }
            FrictionModel::SechTwin { gamma0, hbar_over_2kt } => {
                let x = thermal_argument(omega, *hbar_over_2kt);
                if x.is_infinite() {
                    0.0
                } else {
                    gamma0 / x.cosh()
                }
            }
            FrictionModel::Custom(t) => t.eval(omega)?,
        };
        Ok(value)
    }

    /// Coefficient c₂ of γ(ω) = γ₀ + c₂ω² + O(ω⁴).
    pub fn low_frequency_curvature(&self) -> Result<f64> {
        match self {
            FrictionModel::Radiative { tau0, .. } => Ok(*tau0),
            FrictionModel::SinhTwin { gamma0, hbar_over_2kt } => {
                if hbar_over_2kt.is_finite() {
                    Ok(gamma0 * hbar_over_2kt * hbar_over_2kt / 6.0)
                } else {
                    Err(Error::NotApplicable("sinh twin has no expansion at T = 0".into()))
                }
            }
            other => Err(Error::NotApplicable(format!(
                "low-frequency curvature is defined for radiative and sinh-twin, not {}",
                other.name()
            ))),
        }
    }
}

fn thermal_argument(omega: f64, hbar_over_2kt: f64) -> f64 {
    if omega == 0.0 {
        0.0
    } else {
        omega * hbar_over_2kt
    }
}

fn tanh_over_x(x: f64) -> f64 {
    if x.is_infinite() {
        0.0
    } else if x < 1e-4 {
        1.0 - x * x / 3.0
    } else {
        x.tanh() / x
    }
}

fn sinh_over_x(x: f64) -> f64 {
    if x < 1e-4 {
        1.0 + x * x / 6.0
    } else {
        x.sinh() / x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{make_params, ParamSpec};
    use approx::assert_relative_eq;

    fn unit_params(gamma0: f64, temperature: f64) -> EmitterParams {
        make_params(&ParamSpec::reduced(1.0, gamma0, 1.0, 0.01, temperature, 1e3)).unwrap()
    }

    #[test]
    fn radiative_substitution() {
        let m = FrictionModel::Radiative { gamma0: 0.5, tau0: 0.01 };
        assert_relative_eq!(m.gamma(10.0).unwrap(), 1.5, max_relative = 1e-15);
        assert_eq!(m.gamma(10.0).unwrap() - m.gamma(0.0).unwrap(), 100.0 * 0.01);
    }

    #[test]
    fn every_kind_reduces_to_gamma0_at_zero() {
        let p = unit_params(0.7, 1.0);
        let table = TabulatedFriction::new(vec![0.0, 1.0], vec![0.7, 1.0]).unwrap();
        for m in [
            FrictionModel::radiative(&p),
            FrictionModel::ohmic(0.7),
            FrictionModel::white_noise_induced(&p),
            FrictionModel::sinh_twin(&p),
            FrictionModel::sech_twin(&p),
            FrictionModel::Custom(table),
        ] {
            assert_relative_eq!(m.gamma(0.0).unwrap(), 0.7, max_relative = 1e-15);
        }
    }

    #[test]
    fn sinh_twin_at_unit_argument() {
        // ħ = k_B = 1, T = 0.5 gives ħ/2k_BT = 1, so x = ω.
        let m = FrictionModel::SinhTwin { gamma0: 1.0, hbar_over_2kt: 1.0 };
        assert_relative_eq!(m.gamma(1.0).unwrap(), 1.175_201_193_643_801_4, max_relative = 1e-14);
    }

    #[test]
    fn zero_temperature_limits() {
        let p = unit_params(2.0, 0.0);
        let white = FrictionModel::white_noise_induced(&p);
        assert_eq!(white.gamma(0.0).unwrap(), 2.0);
        assert_eq!(white.gamma(0.3).unwrap(), 0.0);
        assert_eq!(FrictionModel::sech_twin(&p).gamma(0.3).unwrap(), 0.0);
        let sinh = FrictionModel::sinh_twin(&p);
        assert_eq!(sinh.gamma(0.0).unwrap(), 2.0);
        assert!(matches!(sinh.gamma(0.3), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn negative_frequency_is_rejected() {
        assert!(matches!(FrictionModel::ohmic(1.0).gamma(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn curvature_matches_central_difference() {
        let m = FrictionModel::SinhTwin { gamma0: 1.0, hbar_over_2kt: 1.0 };
        assert_relative_eq!(m.low_frequency_curvature().unwrap(), 1.0 / 6.0, max_relative = 1e-15);
        // γ(ω) is even, so [γ(h) - γ(0)]/h² → c₂ as h → 0 (central difference about 0).
        let h = 1e-3;
        let fd = (m.gamma(h).unwrap() - 2.0 * m.gamma(0.0).unwrap() + m.gamma(h).unwrap()) / (2.0 * h * h);
        assert!((fd - 1.0 / 6.0).abs() < 1e-6, "fd = {fd}");
        assert_eq!(FrictionModel::Radiative { gamma0: 0.0, tau0: 0.01 }.low_frequency_curvature().unwrap(), 0.01);
        assert!(matches!(
            FrictionModel::ohmic(1.0).low_frequency_curvature(),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn sinh_twin_reproduces_radiative_curvature() {
        let (kt, hbar, tau0) = (0.8_f64, 1.0_f64, 0.003_f64);
        let gamma0 = 24.0 * (kt / hbar).powi(2) * tau0;
        let m = FrictionModel::SinhTwin { gamma0, hbar_over_2kt: hbar / (2.0 * kt) };
        assert_relative_eq!(m.low_frequency_curvature().unwrap(), tau0, max_relative = 1e-12);
    }

    #[test]
    fn phonon_friction() {
        assert_relative_eq!(phonon_gamma0(1.0, 1.0, 1.0, 1.0).unwrap(), 1.5 * PI, max_relative = 1e-15);
        let base = phonon_gamma0(1.0, 3.0, 0.2, 1.0).unwrap();
        let doubled = phonon_gamma0(1.0, 3.0, 0.4, 1.0).unwrap();
        assert_relative_eq!(doubled / base, 16.0, max_relative = 1e-12);
        assert_relative_eq!(
            phonon_gamma0(1.0, 100.0, 0.5, 1.0).unwrap(),
            3.0 * PI * 0.0625 / 200.0,
            max_relative = 1e-15
        );
        assert!(phonon_gamma0(1.0, 1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn white_noise_friction_tracks_ohmic_at_low_frequency() {
        let m = FrictionModel::WhiteNoiseInduced { gamma0: 1.0, hbar_over_2kt: 1.0 };
        // Deviation is 1 - tanh(x)/x ≈ x²/3; it stays below 1% for x < 0.17.
        for i in 0..=170 {
            let x = i as f64 * 1e-3;
            assert!((1.0 - m.gamma(x).unwrap()).abs() < 0.01);
        }
        // At x = 0.2 the gap is 1 - tanh(0.2)/0.2.
        assert_relative_eq!(1.0 - m.gamma(0.2).unwrap(), 0.013_123_398_875, max_relative = 1e-9);
    }

    #[test]
    fn tabulated_interpolation_is_log_linear_and_bounded() {
        let t = TabulatedFriction::new(vec![1.0, 3.0], vec![1.0, 100.0]).unwrap();
        let m = FrictionModel::Custom(t);
        assert_relative_eq!(m.gamma(2.0).unwrap(), 10.0, max_relative = 1e-12);
        assert_relative_eq!(m.gamma(3.0).unwrap(), 100.0, max_relative = 1e-12);
        assert!(m.gamma(3.5).is_err());
        assert!(m.gamma(0.5).is_err());
        assert!(m.gamma0().is_err());
    }

    #[test]
    fn names_round_trip() {
        let p = unit_params(1.0, 1.0);
        for name in ["radiative", "ohmic", "white", "sinh-twin", "sech-twin"] {
            assert_eq!(FrictionModel::from_name(name, &p, None).unwrap().name(), name);
        }
        assert!(FrictionModel::from_name("phonon", &p, None).is_err());
        let data = PhononData { substrate_mass: 10.0, debye_frequency: 2.0 };
        assert_eq!(FrictionModel::from_name("phonon", &p, Some(data)).unwrap().name(), "phonon");
        assert!(FrictionModel::from_name("drude", &p, None).is_err());
    }
}
