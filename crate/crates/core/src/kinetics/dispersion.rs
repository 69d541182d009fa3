use serde::{Deserialize, Serialize};

use super::ode::{dormand_prince, OdeOutcome};
use crate::error::{Error, Result};
use crate::params::EmitterParams;

/// Which form of the position-dispersion moment equation to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DispersionMode {
    /// s″ + γ₀s′ + 2ω₀²s = τ₀s‴ + 2k_BT/m + ħ²/(2m²s), third order.
    Full19,
    /// s″ + γ₀s′ + 2ω₀²s = 2k_BT/m, second order.
    Classical,
    /// τ₀s‴ = −ħ²/(2m²s), for γ₀ = ω₀ = T = 0.
    ReducedVacuum,
}

impl DispersionMode {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "full19" | "full" => Ok(DispersionMode::Full19),
            "classical" => Ok(DispersionMode::Classical),
            "reduced-vacuum" | "reduced" => Ok(DispersionMode::ReducedVacuum),
            other => Err(Error::validation("mode", format!("expected full19|classical|reduced-vacuum, got `{other}`"))),
        }
    }

    fn order(self) -> usize {
        match self {
            DispersionMode::Classical => 2,
            _ => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Output points including both ends of the span.
    pub points: usize,
    pub spacing: Spacing,
}

impl Default for DispersionOptions {
    fn default() -> Self {
        DispersionOptions { rtol: 1e-10, atol: 1e-14, points: 101, spacing: Spacing::Linear }
    }
}

/// σ²(t) and its first derivative at the output times, with diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionSeries {
    pub times: Vec<f64>,
    pub sigma2: Vec<f64>,
    pub d_sigma2: Vec<f64>,
    pub mode: DispersionMode,
    /// Set when |d ln s″/dt| exceeded 10/t, the signature of the runaway branch.
    pub branch_warning: Option<String>,
    /// Set when integration stopped early (σ² reached zero).
    pub stopped: Option<String>,
}

/// Integrates the dispersion moment equation from `y0` = (σ², σ²′, σ²″)
/// over `t_span`. Classical mode ignores the second derivative.
///
/// The state of Full19 and ReducedVacuum must start with σ² > 0; the
/// classical equation has no 1/σ² term and accepts σ² = 0.
pub fn solve_dispersion_ode(
    params: &EmitterParams,
    y0: [f64; 3],
    t_span: (f64, f64),
    mode: DispersionMode,
    options: &DispersionOptions,
) -> Result<DispersionSeries> {
    params.validate()?;
    let (t0, t1) = t_span;
    if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
        return Err(Error::validation("t_span", format!("need t0 < t1, got ({t0}, {t1})")));
    }
    if options.points < 2 {
        return Err(Error::validation("points", "need at least 2 output points"));
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(Error::validation("y0", "initial values must be finite"));
    }
    let m = params.m;
    let hbar = params.hbar();
    let (gamma0, w2, tau0) = (params.gamma0, params.omega0 * params.omega0, params.tau0);
    let thermal = 2.0 * params.kt() / m;
    let quantum = hbar * hbar / (2.0 * m * m);
    match mode {
        DispersionMode::Classical => {
            if !(y0[0] >= 0.0) {
                return Err(Error::validation("y0", "sigma^2 must be >= 0"));
            }
        }
        DispersionMode::Full19 => {
            if !(y0[0] > 0.0) {
                return Err(Error::validation("y0", "sigma^2 must be > 0"));
            }
            if !(tau0 > 0.0) {
                return Err(Error::validation("tau0", "the third-order equation needs tau0 > 0"));
            }
        }
        DispersionMode::ReducedVacuum => {
            if !(y0[0] > 0.0) {
                return Err(Error::validation("y0", "sigma^2 must be > 0"));
            }
            if !(tau0 > 0.0) {
                return Err(Error::validation("tau0", "the reduced vacuum equation needs tau0 > 0"));
            }
            if gamma0 != 0.0 || params.omega0 != 0.0 || params.temperature != 0.0 {
                return Err(Error::validation(
                    "mode",
                    "reduced vacuum form needs gamma0 = omega0 = T = 0",
                ));
            }
        }
    }

    let rhs = |_t: f64, y: &[f64]| -> Vec<f64> {
        match mode {
            DispersionMode::Classical => vec![y[1], -gamma0 * y[1] - 2.0 * w2 * y[0] + thermal],
            DispersionMode::Full19 => {
                let third = (y[2] + gamma0 * y[1] + 2.0 * w2 * y[0] - thermal - quantum / y[0]) / tau0;
                vec![y[1], y[2], third]
            }
            DispersionMode::ReducedVacuum => vec![y[1], y[2], -quantum / (tau0 * y[0])],
        }
    };

    let times: Vec<f64> = match options.spacing {
        Spacing::Linear => (0..options.points)
            .map(|k| t0 + (t1 - t0) * k as f64 / (options.points - 1) as f64)
            .collect(),
        Spacing::Log => {
            if !(t0 > 0.0) {
                return Err(Error::validation("t_span", "log spacing needs t0 > 0"));
            }
            let ratio = (t1 / t0).ln();
            (0..options.points)
                .map(|k| t0 * (ratio * k as f64 / (options.points - 1) as f64).exp())
                .collect()
        }
    };

    let order = mode.order();
    let mut branch_warning = None;
    let monitor = |t: f64, y: &[f64], dy: &[f64]| -> Option<String> {
        if y[0] <= 0.0 {
            return Some(format!("sigma^2 reached zero at t = {t:.6e}"));
        }
        if order == 3 && branch_warning.is_none() && y[2] != 0.0 && t > 0.0 {
            let growth = (dy[2] / y[2]).abs();
            if growth > 10.0 / t {
                branch_warning = Some(format!(
                    "runaway branch: |d ln s''/dt| = {growth:.3e} exceeds 10/t at t = {t:.6e}"
                ));
            }
        }
        None
    };
    let (states, outcome) = dormand_prince(rhs, t0, &y0[..order], &times[1..], options.rtol, options.atol, monitor)?;

    let mut sigma2 = vec![y0[0]];
    let mut d_sigma2 = vec![y0[1]];
    for s in &states {
        sigma2.push(s[0]);
        d_sigma2.push(s[1]);
    }
    let stopped = match outcome {
        OdeOutcome::Completed => None,
        OdeOutcome::Stopped { reason, .. } => Some(reason),
    };
    Ok(DispersionSeries {
        times: times[..sigma2.len()].to_vec(),
        sigma2,
        d_sigma2,
        mode,
        branch_warning,
        stopped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinetics::{superdiffusion_asymptote, superdiffusion_prefactor};
    use crate::params::{make_params, ParamSpec};

    fn vacuum(tau0: f64) -> EmitterParams {
        let mut p = make_params(&ParamSpec::reduced(1.0, 0.0, 0.0, tau0, 0.0, 1e3)).unwrap();
        p.consts.hbar = 1.0;
        p
    }

    fn on_branch(p: &EmitterParams, t: f64) -> [f64; 3] {
        let a = superdiffusion_prefactor(p).unwrap();
        [a * t.powf(1.5), 1.5 * a * t.sqrt(), 0.75 * a / t.sqrt()]
    }

    #[test]
    fn reduced_vacuum_follows_power_law() {
        let p = vacuum(0.03);
        let t0 = 100.0 * p.tau0;
        let opts = DispersionOptions { points: 11, spacing: Spacing::Log, ..Default::default() };
        let s = solve_dispersion_ode(&p, on_branch(&p, t0), (t0, 10.0 * t0), DispersionMode::ReducedVacuum, &opts).unwrap();
        let end = *s.sigma2.last().unwrap();
        let exact = superdiffusion_asymptote(&p, 10.0 * t0).unwrap();
        assert!((end / exact - 1.0).abs() < 0.02);
        let slope = (end / s.sigma2[0]).ln() / 10f64.ln();
        assert!((slope - 1.5).abs() < 0.03);
        assert!(s.branch_warning.is_none());
        assert!(s.stopped.is_none());
    }

    #[test]
    fn classical_equilibrium() {
        let p = make_params(&ParamSpec::reduced(1.0, 10.0, 1.0, 0.0, 1.0, 1e3)).unwrap();
        let y0 = [0.0, 2.0 * p.kt() / (p.m * p.gamma0), 0.0];
        let opts = DispersionOptions { points: 3, ..Default::default() };
        let s = solve_dispersion_ode(&p, y0, (0.0, 60.0), DispersionMode::Classical, &opts).unwrap();
        let eq = p.kt() / (p.m * p.omega0 * p.omega0);
        assert!((s.sigma2.last().unwrap() / eq - 1.0).abs() < 0.01);
    }

    #[test]
    fn full_mode_flags_runaway() {
        let mut p = make_params(&ParamSpec::reduced(1.0, 1.0, 1.0, 0.05, 1.0, 1e3)).unwrap();
        p.consts.hbar = 1.0;
        let opts = DispersionOptions { points: 5, ..Default::default() };
        let s = solve_dispersion_ode(&p, [1.0, 0.0, 0.0], (0.0, 2.0), DispersionMode::Full19, &opts);
        match s {
            Ok(s) => assert!(s.branch_warning.is_some() || s.stopped.is_some()),
            Err(e) => assert!(e.is_numerical()),
        }
    }

    #[test]
    fn preconditions() {
        let p = vacuum(0.03);
        let opts = DispersionOptions::default();
        assert!(solve_dispersion_ode(&p, [0.0, 1.0, 0.0], (1.0, 2.0), DispersionMode::ReducedVacuum, &opts).is_err());
        let warm = make_params(&ParamSpec::reduced(1.0, 0.0, 0.0, 0.03, 1.0, 1e3)).unwrap();
        assert!(solve_dispersion_ode(&warm, [1.0, 1.0, 0.0], (1.0, 2.0), DispersionMode::ReducedVacuum, &opts).is_err());
        assert!(solve_dispersion_ode(&p, [1.0, 1.0, 0.0], (2.0, 1.0), DispersionMode::ReducedVacuum, &opts).is_err());
    }

    #[test]
    fn shrinking_start_stops_at_zero() {
        let p = vacuum(0.03);
        let opts = DispersionOptions { points: 3, ..Default::default() };
        let s = solve_dispersion_ode(&p, [1e-3, -1.0, 0.0], (1.0, 3.0), DispersionMode::ReducedVacuum, &opts);
        match s {
            Ok(s) => assert!(s.stopped.is_some()),
            Err(e) => assert!(e.is_numerical()),
        }
    }
}
