//! Moments of the emitter: velocity dispersion with cutoff, universal
//! constants, diffusion coefficients, autocorrelations and the logarithmic
//! mean-squared displacement in vacuum.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::friction::FrictionModel;
use crate::params::EmitterParams;
use crate::quadrature::{adaptive_gk, oscillatory_cos, Estimate, QuadratureRule, QuadratureSpec};
use crate::spectra::s_vv;

/// A computed moment. `closed_form` is an exact reference where one exists;
/// `approximation` holds an asymptotic or leading-order expression that is
/// not expected to match to quadrature accuracy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub value: f64,
    pub estimated_error: f64,
    pub closed_form: Option<f64>,
    pub approximation: Option<f64>,
    pub formula_id: String,
}

impl MomentReport {
    fn exact(value: f64, formula_id: &str) -> Self {
        MomentReport {
            value,
            estimated_error: 0.0,
            closed_form: Some(value),
            approximation: None,
            formula_id: formula_id.to_string(),
        }
    }

    /// Checks the report against its closed form:
    /// |value − closed| ≤ max(10·rel_tol·|closed|, floor).
    fn checked(self, rel_tol: f64, floor: f64) -> Result<Self> {
        if let Some(cf) = self.closed_form {
            let gap = (self.value - cf).abs();
            if gap > (10.0 * rel_tol * cf.abs()).max(floor) {
                return Err(Error::Quadrature {
                    achieved: gap / cf.abs().max(f64::MIN_POSITIVE),
                    requested: rel_tol,
                });
            }
        }
        Ok(self)
    }
}

fn is_vacuum(params: &EmitterParams) -> bool {
    params.gamma0 == 0.0 && params.temperature == 0.0 && params.omega0 == 0.0 && params.tau0 > 0.0
}

/// Copy of `params` reduced to the zero-temperature vacuum case.
fn vacuum_of(params: &EmitterParams) -> EmitterParams {
    let mut p = params.clone().quantum();
    p.gamma0 = 0.0;
    p.temperature = 0.0;
    p.omega0 = 0.0;
    p
}

fn integrate_on(quad: &QuadratureSpec, f: impl Fn(f64) -> f64, a: f64, b: f64) -> Result<Estimate> {
    match quad.rule {
        QuadratureRule::TrapezoidLogGrid if a == 0.0 => {
            // the log grid cannot reach zero; the sliver below b·1e-12 is
            // covered by a single Kronrod panel
            let cut = b * 1e-12;
            Ok(crate::quadrature::gk15(&f, 0.0, cut) + quad.integrate(&f, cut, b)?)
        }
        _ => quad.integrate(f, a, b),
    }
}

/// Velocity dispersion C_VV(0) = (1/π) ∫₀^Ω S_VV dω with the radiative
/// friction γ₀ + ω²τ₀.
///
/// The zero-temperature vacuum case reports the closed form
/// (ħ/2πmτ₀) ln(1 + Ω²τ₀²) and its leading-order value (Ωτ₀/π)(ħΩ/2m),
/// which equals (4α/3π)c² for a charge-derived τ₀ and Ω. The classical
/// Ohmic free particle (τ₀ = 0) is dispatched to equipartition k_BT/m.
pub fn velocity_dispersion(params: &EmitterParams, quad: &QuadratureSpec) -> Result<MomentReport> {
    quad.validate()?;
    if params.classical && params.tau0 == 0.0 && params.omega0 == 0.0 && params.gamma0 > 0.0 {
        return Ok(MomentReport::exact(params.kt() / params.m, "equipartition kT/m"));
    }
    let model = FrictionModel::radiative(params);
    let omega_max = params.cutoff;
    // Evaluate once up front so domain problems surface as themselves.
    s_vv(params, &model, 0.5 * omega_max)?;
    let est = integrate_on(quad, |w| s_vv(params, &model, w).unwrap_or(f64::NAN), 0.0, omega_max)?;
    let value = est.value / PI;
    let mut report = MomentReport {
        value,
        estimated_error: est.error / PI,
        closed_form: None,
        approximation: None,
        formula_id: "(1/pi) int_0^cutoff S_VV".into(),
    };
    if is_vacuum(params) && !params.classical {
        let (hbar, m, tau0) = (params.hbar(), params.m, params.tau0);
        let x = omega_max * tau0;
        report.closed_form = Some(hbar / (2.0 * PI * m * tau0) * (x * x).ln_1p());
        report.approximation = Some(x / PI * hbar * omega_max / (2.0 * m));
        report.formula_id = "vacuum: hbar/(2 pi m tau0) ln(1 + cutoff^2 tau0^2)".into();
    }
    report.checked(quad.rel_tol, 0.0)
}

/// Mass-independent numbers of the vacuum emitter, in the units of `consts`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniversalConstants {
    /// Ωτ₀ = 4α/3
    pub cutoff_times_tau0: f64,
    /// C_VV(0)/c² ≈ 4α/3π
    pub velocity_dispersion_over_c2: f64,
    /// √(4α/3π), rms velocity in units of c
    pub rms_velocity_over_c: f64,
    /// √(4α/3π): mean free path in units of ħ/mc
    pub mean_free_path_factor: f64,
    /// electron mean free path √(2ħτ₀/πm) = √(4α/3π) ħ/m_e c
    pub electron_mean_free_path: f64,
    /// electron diameter 2αħ/m_e c
    pub electron_diameter: f64,
    /// collision frequency with vacuum photons, Ω/2 = m_e c²/ħ
    pub compton_collision_frequency: f64,
}

pub fn universal_constants(consts: &PhysicalConstants) -> UniversalConstants {
    let alpha = consts.alpha;
    let v2 = 4.0 * alpha / (3.0 * PI);
    let reduced_compton = consts.hbar / (consts.electron_mass * consts.c);
    UniversalConstants {
        cutoff_times_tau0: 4.0 * alpha / 3.0,
        velocity_dispersion_over_c2: v2,
        rms_velocity_over_c: v2.sqrt(),
        mean_free_path_factor: v2.sqrt(),
        electron_mean_free_path: v2.sqrt() * reduced_compton,
        electron_diameter: 2.0 * alpha * reduced_compton,
        compton_collision_frequency: consts.electron_mass * consts.c * consts.c / consts.hbar,
    }
}

/// Einstein diffusion constant D = k_BT/mγ₀.
pub fn einstein_diffusion(params: &EmitterParams) -> Result<f64> {
    if !(params.gamma0 > 0.0) {
        return Err(Error::NotApplicable("D = kT/(m gamma0) needs gamma0 > 0".into()));
    }
    Ok(params.kt() / (params.m * params.gamma0))
}

/// Vacuum diffusion constant D₀ = k_BTτ₀/m.
pub fn vacuum_diffusion(params: &EmitterParams) -> Result<f64> {
    if !(params.tau0 > 0.0) {
        return Err(Error::NotApplicable("D0 = kT tau0/m needs tau0 > 0".into()));
    }
    Ok(params.kt() * params.tau0 / params.m)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffusionConstants {
    pub d: Option<f64>,
    pub d0: Option<f64>,
}

/// Both diffusion constants; each is `None` when its divisor vanishes.
pub fn diffusion_constants(params: &EmitterParams) -> DiffusionConstants {
    DiffusionConstants {
        d: einstein_diffusion(params).ok(),
        d0: vacuum_diffusion(params).ok(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorrelationCase {
    OhmicClassical,
    VacuumClassical,
    VacuumQuantum,
}

/// Velocity autocorrelation C_VV(τ).
///
/// The classical cases are exponentials; the quantum vacuum case is the
/// cosine transform (1/π) ∫₀^Ω S_VV cos(ωτ) dω of the vacuum S_VV.
pub fn autocorrelation_analytic(
    params: &EmitterParams,
    tau: f64,
    case: CorrelationCase,
    quad: &QuadratureSpec,
) -> Result<MomentReport> {
    if !(tau >= 0.0) {
        return Err(Error::Domain(format!("lag must be >= 0, got {tau}")));
    }
    let thermal = params.kt() / params.m;
    match case {
        CorrelationCase::OhmicClassical => {
            if !(params.gamma0 > 0.0) {
                return Err(Error::NotApplicable("Ohmic correlation needs gamma0 > 0".into()));
            }
            Ok(MomentReport::exact(thermal * (-params.gamma0 * tau).exp(), "kT/m exp(-gamma0 tau)"))
        }
        CorrelationCase::VacuumClassical => {
            if !(params.tau0 > 0.0) {
                return Err(Error::NotApplicable("vacuum correlation needs tau0 > 0".into()));
            }
            Ok(MomentReport::exact(thermal * (-tau / params.tau0).exp(), "kT/m exp(-tau/tau0)"))
        }
        CorrelationCase::VacuumQuantum => {
            if !(params.tau0 > 0.0) {
                return Err(Error::NotApplicable("vacuum correlation needs tau0 > 0".into()));
            }
            quad.validate()?;
            let vac = vacuum_of(params);
            let model = FrictionModel::radiative(&vac);
            let svv = |w: f64| s_vv(&vac, &model, w).unwrap_or(f64::NAN);
            let omega_max = vac.cutoff;
            let est = if tau * omega_max > 20.0 {
                let scale = integrate_on(quad, svv, 0.0, omega_max)?.value;
                oscillatory_cos(&svv, tau, 0.0, omega_max, quad.rel_tol * scale, quad.max_evals)?
            } else {
                integrate_on(quad, |w| svv(w) * (w * tau).cos(), 0.0, omega_max)?
            };
            Ok(MomentReport {
                value: est.value / PI,
                estimated_error: est.error / PI,
                closed_form: None,
                approximation: None,
                formula_id: "(1/pi) int_0^cutoff S_VV(vacuum) cos(omega tau)".into(),
            })
        }
    }
}

/// Position dispersion of the free vacuum emitter,
/// σ²(t) = (2/π) ∫₀^Ω S_VV(ω) (1 − cos ωt)/ω² dω.
///
/// Below ω = 1/t the integrand is smooth and is integrated on log-spaced
/// panels. Above it the non-oscillating part ∫ S_VV/ω² has a closed form
/// and the cosine part is summed period by period. The report's
/// `approximation` is the asymptote (2ħτ₀/πm) ln(t/τ₀); the two differ by
/// an O(1)·(2ħτ₀/πm) intercept.
pub fn position_dispersion_log(params: &EmitterParams, t: f64, quad: &QuadratureSpec) -> Result<MomentReport> {
    if !is_vacuum(params) {
        return Err(Error::NotApplicable(
            "logarithmic dispersion needs gamma0 = 0, T = 0, omega0 = 0, tau0 > 0".into(),
        ));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("time must be > 0, got {t}")));
    }
    quad.validate()?;
    let (hbar, m, tau0, omega_max) = (params.hbar(), params.m, params.tau0, params.cutoff);
    let amp = hbar * tau0 / m;
    // S_VV/ω² for the vacuum spectrum
    let g = |w: f64| amp / (w * (1.0 + w * w * tau0 * tau0));
    let g_primitive = |w: f64| amp * (w.ln() - 0.5 * (w * w * tau0 * tau0).ln_1p());
    let prefactor = 2.0 * amp / PI;
    let scale = prefactor * (omega_max * t).ln().max(1.0);
    let abs_tol = quad.rel_tol * scale;

    let split = (1.0 / t).min(omega_max);
    let low_integrand = |w: f64| {
        if w == 0.0 {
            0.0
        } else {
            // 1 − cos ωt written as 2 sin²(ωt/2) to avoid cancellation
            let s = (0.5 * w * t).sin();
            amp * 2.0 * s * s / (w * (1.0 + w * w * tau0 * tau0))
        }
    };
    let mut low = Estimate::zero();
    let mut hi_edge = split;
    for _ in 0..12 {
        let lo_edge = hi_edge * 0.1;
        low = low + adaptive_gk(&low_integrand, lo_edge, hi_edge, abs_tol / 24.0, 0.0, quad.max_evals)?;
        hi_edge = lo_edge;
    }
    low = low + adaptive_gk(&low_integrand, 0.0, hi_edge, abs_tol / 24.0, 0.0, quad.max_evals)?;

    let mut total = low;
    if split < omega_max {
        let smooth = g_primitive(omega_max) - g_primitive(split);
        let oscillating = oscillatory_cos(&g, t, split, omega_max, abs_tol / 2.0, quad.max_evals)?;
        total = total
            + Estimate {
                value: smooth - oscillating.value,
                error: oscillating.error,
                evals: oscillating.evals,
            };
    }
    Ok(MomentReport {
        value: 2.0 / PI * total.value,
        estimated_error: 2.0 / PI * total.error,
        closed_form: None,
        approximation: Some(prefactor * (t / tau0).ln()),
        formula_id: "(2/pi) int_0^cutoff S_VV (1 - cos omega t)/omega^2".into(),
    })
}
