//! One-dimensional Fokker–Planck solvers for the radiating particle, the
//! closed-form harmonic dispersion relaxation, and the dispersion moment
//! equation with its super-diffusive branch.
//!
//! Both PDE solvers are written in terms of the ratio of the density to its
//! equilibrium, so the Boltzmann (or Maxwell–Boltzmann) density is an exact
//! discrete fixed point and positivity follows from monotone fluxes.

mod dispersion;
mod klein_kramers;
mod ode;
mod smoluchowski;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::EmitterParams;
use crate::potential::Potential;

pub use dispersion::{solve_dispersion_ode, DispersionMode, DispersionOptions, DispersionSeries, Spacing};
pub use klein_kramers::{solve_klein_kramers, KleinKramers};
pub use ode::{dormand_prince, OdeOutcome};
pub use smoluchowski::{solve_smoluchowski, Smoluchowski};

/// Cell-centred uniform grid on [min, max].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid {
    pub min: f64,
    pub max: f64,
    pub cells: usize,
}

impl UniformGrid {
    pub fn new(min: f64, max: f64, cells: usize) -> Result<Self> {
        let g = UniformGrid { min, max, cells };
        g.validate()?;
        Ok(g)
    }

    /// Symmetric grid on [−half_width, half_width].
    pub fn symmetric(half_width: f64, cells: usize) -> Result<Self> {
        Self::new(-half_width, half_width, cells)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.max > self.min) {
            return Err(Error::validation("grid", format!("need min < max, got [{}, {}]", self.min, self.max)));
        }
        if self.cells < 4 {
            return Err(Error::validation("grid", "need at least 4 cells"));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / self.cells as f64
    }

    pub fn centers(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.cells).map(|i| self.min + (i as f64 + 0.5) * h).collect()
    }

    /// Cell boundaries, `cells + 1` values.
    pub fn faces(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..=self.cells).map(|i| self.min + i as f64 * h).collect()
    }
}

/// Position–velocity grid of the Klein–Kramers solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub x: UniformGrid,
    pub v: UniformGrid,
}

/// Position density ρ(x, t) on a cell-centred grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityField {
    pub grid: UniformGrid,
    pub x_grid: Vec<f64>,
    pub rho: Vec<f64>,
    pub time: f64,
}

impl DensityField {
    /// Normalises `values` so that ∑ρ·Δx = 1.
    pub fn from_values(grid: UniformGrid, values: Vec<f64>, time: f64) -> Result<Self> {
        grid.validate()?;
        if values.len() != grid.cells {
            return Err(Error::Input(format!("{} values for {} cells", values.len(), grid.cells)));
        }
        if values.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return Err(Error::Input("density values must be finite and >= 0".into()));
        }
        let mass: f64 = values.iter().sum::<f64>() * grid.spacing();
        if !(mass > 0.0) {
            return Err(Error::Input("density has zero mass".into()));
        }
        Ok(DensityField {
            grid,
            x_grid: grid.centers(),
            rho: values.into_iter().map(|r| r / mass).collect(),
            time,
        })
    }

    pub fn gaussian(grid: UniformGrid, mean: f64, variance: f64) -> Result<Self> {
        if !(variance > 0.0) {
            return Err(Error::validation("variance", "must be > 0"));
        }
        let values = grid.centers().iter().map(|x| (-(x - mean).powi(2) / (2.0 * variance)).exp()).collect();
        Self::from_values(grid, values, 0.0)
    }

    /// Discrete Boltzmann density ∝ e^{−U/k_BT}.
    pub fn boltzmann(grid: UniformGrid, potential: &Potential, kt: f64) -> Result<Self> {
        if !(kt > 0.0) {
            return Err(Error::validation("temperature", "Boltzmann density needs T > 0"));
        }
        let x = grid.centers();
        let u: Vec<f64> = x.iter().map(|&x| potential.value(x)).collect();
        let u_min = u.iter().cloned().fold(f64::INFINITY, f64::min);
        Self::from_values(grid, u.iter().map(|u| (-(u - u_min) / kt).exp()).collect(), 0.0)
    }

    pub fn total(&self) -> f64 {
        self.rho.iter().sum::<f64>() * self.grid.spacing()
    }

    pub fn mean(&self) -> f64 {
        let h = self.grid.spacing();
        self.x_grid.iter().zip(&self.rho).map(|(x, r)| x * r).sum::<f64>() * h
    }

    pub fn variance(&self) -> f64 {
        let h = self.grid.spacing();
        let mean = self.mean();
        self.x_grid.iter().zip(&self.rho).map(|(x, r)| (x - mean).powi(2) * r).sum::<f64>() * h
    }

    /// ∫|ρ − other| dx.
    pub fn l1_distance(&self, other: &DensityField) -> f64 {
        self.rho.iter().zip(&other.rho).map(|(a, b)| (a - b).abs()).sum::<f64>() * self.grid.spacing()
    }
}

/// Phase-space density W(x, v, t), row-major with velocity fastest:
/// `w[i * nv + j]` is the cell at x_i, v_j.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceField {
    pub grid: PhaseGrid,
    pub x_grid: Vec<f64>,
    pub v_grid: Vec<f64>,
    pub w: Vec<f64>,
    pub time: f64,
}

impl PhaseSpaceField {
    /// Normalises `values` so that ∑W·Δx·Δv = 1.
    pub fn from_values(grid: PhaseGrid, values: Vec<f64>, time: f64) -> Result<Self> {
        grid.x.validate()?;
        grid.v.validate()?;
        if values.len() != grid.x.cells * grid.v.cells {
            return Err(Error::Input(format!("{} values for a {}x{} grid", values.len(), grid.x.cells, grid.v.cells)));
        }
        if values.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return Err(Error::Input("phase-space values must be finite and >= 0".into()));
        }
        let mass: f64 = values.iter().sum::<f64>() * grid.x.spacing() * grid.v.spacing();
        if !(mass > 0.0) {
            return Err(Error::Input("phase-space density has zero mass".into()));
        }
        Ok(PhaseSpaceField {
            grid,
            x_grid: grid.x.centers(),
            v_grid: grid.v.centers(),
            w: values.into_iter().map(|r| r / mass).collect(),
            time,
        })
    }

    /// Product of independent Gaussians in x and v.
    pub fn gaussian(grid: PhaseGrid, x_mean: f64, x_variance: f64, v_mean: f64, v_variance: f64) -> Result<Self> {
        if !(x_variance > 0.0 && v_variance > 0.0) {
            return Err(Error::validation("variance", "must be > 0"));
        }
        let xs = grid.x.centers();
        let vs = grid.v.centers();
        let mut values = Vec::with_capacity(xs.len() * vs.len());
        for x in &xs {
            let gx = (-(x - x_mean).powi(2) / (2.0 * x_variance)).exp();
            for v in &vs {
                values.push(gx * (-(v - v_mean).powi(2) / (2.0 * v_variance)).exp());
            }
        }
        Self::from_values(grid, values, 0.0)
    }

    /// Discrete Maxwell–Boltzmann density ∝ e^{−(U + mv²/2)/k_BT}.
    pub fn maxwell_boltzmann(grid: PhaseGrid, potential: &Potential, params: &EmitterParams) -> Result<Self> {
        let rho = DensityField::boltzmann(grid.x, potential, params.kt())?;
        let theta = params.kt() / params.m;
        let maxwell: Vec<f64> = grid.v.centers().iter().map(|v| (-v * v / (2.0 * theta)).exp()).collect();
        let mut values = Vec::with_capacity(rho.rho.len() * maxwell.len());
        for r in &rho.rho {
            values.extend(maxwell.iter().map(|b| r * b));
        }
        Self::from_values(grid, values, 0.0)
    }

    fn nv(&self) -> usize {
        self.grid.v.cells
    }

    pub fn total(&self) -> f64 {
        self.w.iter().sum::<f64>() * self.grid.x.spacing() * self.grid.v.spacing()
    }

    /// Position marginal ρ(x) = ∫W dv.
    pub fn position_marginal(&self) -> Vec<f64> {
        let dv = self.grid.v.spacing();
        self.w.chunks(self.nv()).map(|row| row.iter().sum::<f64>() * dv).collect()
    }

    /// Velocity marginal ∫W dx.
    pub fn velocity_marginal(&self) -> Vec<f64> {
        let dx = self.grid.x.spacing();
        let mut out = vec![0.0; self.nv()];
        for row in self.w.chunks(self.nv()) {
            for (o, w) in out.iter_mut().zip(row) {
                *o += w * dx;
            }
        }
        out
    }

    fn central_moment(grid: &[f64], marginal: &[f64], h: f64) -> (f64, f64) {
        let mean = grid.iter().zip(marginal).map(|(x, r)| x * r).sum::<f64>() * h;
        let var = grid.iter().zip(marginal).map(|(x, r)| (x - mean).powi(2) * r).sum::<f64>() * h;
        (mean, var)
    }

    pub fn position_variance(&self) -> f64 {
        Self::central_moment(&self.x_grid, &self.position_marginal(), self.grid.x.spacing()).1
    }

    pub fn velocity_variance(&self) -> f64 {
        Self::central_moment(&self.v_grid, &self.velocity_marginal(), self.grid.v.spacing()).1
    }

    /// ⟨v²⟩, not centred.
    pub fn velocity_second_moment(&self) -> f64 {
        let dv = self.grid.v.spacing();
        self.velocity_marginal().iter().zip(&self.v_grid).map(|(r, v)| r * v * v).sum::<f64>() * dv
    }

    /// ⟨x²⟩, not centred.
    pub fn position_second_moment(&self) -> f64 {
        let dx = self.grid.x.spacing();
        self.position_marginal().iter().zip(&self.x_grid).map(|(r, x)| r * x * x).sum::<f64>() * dx
    }

    pub fn l1_distance(&self, other: &PhaseSpaceField) -> f64 {
        self.w.iter().zip(&other.w).map(|(a, b)| (a - b).abs()).sum::<f64>() * self.grid.x.spacing() * self.grid.v.spacing()
    }
}

/// Closed-form relaxation of the position dispersion from a point start in
/// a harmonic well, (k_BT/mω₀²)[1 − exp(−2ω₀²t/γ_ω₀)] with
/// γ_ω₀ = γ₀ + ω₀²τ₀.
pub fn harmonic_sigma2(params: &EmitterParams, t: f64) -> Result<f64> {
    if !(params.omega0 > 0.0) {
        return Err(Error::validation("omega0", "harmonic relaxation needs omega0 > 0"));
    }
    let gamma = params.gamma_at_omega0();
    if !(gamma > 0.0) {
        return Err(Error::validation("gamma0", "harmonic relaxation needs gamma0 + omega0^2 tau0 > 0"));
    }
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("t must be >= 0, got {t}")));
    }
    let w2 = params.omega0 * params.omega0;
    Ok(params.kt() / (params.m * w2) * -(-2.0 * w2 * t / gamma).exp_m1())
}

/// Super-diffusive branch (6ħτ₀/m)(t/3τ₀)^{3/2} of the vacuum dispersion.
pub fn superdiffusion_asymptote(params: &EmitterParams, t: f64) -> Result<f64> {
    if !(params.tau0 > 0.0) {
        return Err(Error::validation("tau0", "super-diffusion needs tau0 > 0"));
    }
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t must be > 0, got {t}")));
    }
    Ok(6.0 * params.hbar() * params.tau0 / params.m * (t / (3.0 * params.tau0)).powf(1.5))
}

/// Prefactor A of σ² = A t^{3/2}, 2ħ/(m√(3τ₀)).
pub fn superdiffusion_prefactor(params: &EmitterParams) -> Result<f64> {
    if !(params.tau0 > 0.0) {
        return Err(Error::validation("tau0", "super-diffusion needs tau0 > 0"));
    }
    Ok(2.0 * params.hbar() / (params.m * (3.0 * params.tau0).sqrt()))
}

/// γ₀ + τ₀U″(x)/m at every point, refusing non-positive values.
pub(crate) fn effective_friction(potential: &Potential, params: &EmitterParams, xs: &[f64]) -> Result<Vec<f64>> {
    xs.iter()
        .map(|&x| {
            let g = params.gamma0 + params.tau0 * potential.curvature(x) / params.m;
            if g > 0.0 && g.is_finite() {
                Ok(g)
            } else {
                Err(Error::ModelValidity(format!(
                    "effective friction gamma0 + tau0 U''/m = {g} at x = {x}; the model needs it > 0"
                )))
            }
        })
        .collect()
}

/// Bernoulli function z/(eᶻ − 1), the Scharfetter–Gummel weight.
pub(crate) fn bernoulli(z: f64) -> f64 {
    if z.abs() < 1e-8 {
        1.0 - 0.5 * z
    } else {
        z / z.exp_m1()
    }
}

pub(crate) fn check_classical(params: &EmitterParams) -> Result<()> {
    if !params.classical {
        return Err(Error::validation("classical", "kinetic equations are classical; set classical mode"));
    }
    if !(params.temperature > 0.0) {
        return Err(Error::validation("temperature", "kinetic equations need T > 0"));
    }
    Ok(())
}
