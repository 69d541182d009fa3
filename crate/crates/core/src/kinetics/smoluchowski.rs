use super::{bernoulli, check_classical, DensityField, UniformGrid};
use crate::error::{Error, Result};
use crate::params::EmitterParams;
use crate::potential::Potential;

/// Implicit finite-volume solver for
/// ∂tρ = ∂x[(ρU′ + k_BT∂xρ)/(mγ₀ + τ₀U″)]
/// with no-flux boundaries.
///
/// Interface fluxes are of Scharfetter–Gummel type,
/// J = −(D/Δx)[B(−z)ρᵢ₊₁ − B(z)ρᵢ], z = ΔU/k_BT, with D = k_BT/ζ and the
/// mobility 1/ζ averaged harmonically across the interface. Backward Euler
/// then gives an M-matrix, so densities stay non-negative for any step.
pub struct Smoluchowski {
    field: DensityField,
    dt: f64,
    /// Coefficients of ρᵢ₊₁ and ρᵢ in the flux through face i+½, scaled by dt/Δx².
    up: Vec<f64>,
    down: Vec<f64>,
}

impl Smoluchowski {
    pub fn new(potential: &Potential, params: &EmitterParams, initial: DensityField, dt: f64) -> Result<Self> {
        check_classical(params)?;
        params.validate()?;
        initial.grid.validate()?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::StepSize { dt, suggested: f64::NAN });
        }
        let kt = params.kt();
        let xs = &initial.x_grid;
        let mut mobility = Vec::with_capacity(xs.len());
        for &x in xs {
            let zeta = params.m * params.gamma0 + params.tau0 * potential.curvature(x);
            if !(zeta > 0.0 && zeta.is_finite()) {
                return Err(Error::ModelValidity(format!(
                    "mobility denominator m gamma0 + tau0 U'' = {zeta} at x = {x}; the model needs it > 0"
                )));
            }
            mobility.push(1.0 / zeta);
        }
        let h = initial.grid.spacing();
        let scale = dt / (h * h);
        let mut up = Vec::with_capacity(xs.len() - 1);
        let mut down = Vec::with_capacity(xs.len() - 1);
        for i in 0..xs.len() - 1 {
            let mu = 2.0 * mobility[i] * mobility[i + 1] / (mobility[i] + mobility[i + 1]);
            let z = (potential.value(xs[i + 1]) - potential.value(xs[i])) / kt;
            let d = kt * mu * scale;
            up.push(d * bernoulli(-z));
            down.push(d * bernoulli(z));
        }
        Ok(Smoluchowski { field: initial, dt, up, down })
    }

    /// Step size that resolves the slowest drift relaxation, used when none is given.
    pub fn default_dt(potential: &Potential, params: &EmitterParams, grid: &UniformGrid, horizon: f64) -> f64 {
        let mut rate: f64 = 0.0;
        for x in grid.centers() {
            let c = potential.curvature(x);
            let zeta = params.m * params.gamma0 + params.tau0 * c;
            if zeta > 0.0 {
                rate = rate.max(c.abs() / zeta);
            }
        }
        let mut dt = horizon / 1000.0;
        if rate > 0.0 {
            dt = dt.min(0.005 / rate);
        }
        dt
    }

    pub fn field(&self) -> &DensityField {
        &self.field
    }

    pub fn into_field(self) -> DensityField {
        self.field
    }

    /// One backward-Euler step, solved with the Thomas algorithm.
    pub fn step(&mut self) -> Result<()> {
        self.step_with(1.0)
    }

    /// Step of `fraction`·dt, used to land exactly on an output time.
    fn step_with(&mut self, fraction: f64) -> Result<()> {
        let n = self.field.rho.len();
        // row i: −down[i−1]·ρᵢ₋₁ + (1 + down[i] + up[i−1])·ρᵢ − up[i]·ρᵢ₊₁ = ρᵢ⁰
        let mut c_prime = vec![0.0; n];
        let mut d_prime = vec![0.0; n];
        for i in 0..n {
            let lower = if i > 0 { fraction * self.down[i - 1] } else { 0.0 };
            let upper = if i + 1 < n { fraction * self.up[i] } else { 0.0 };
            let mut diag = 1.0;
            if i + 1 < n {
                diag += fraction * self.down[i];
            }
            if i > 0 {
                diag += fraction * self.up[i - 1];
            }
            let (c_prev, d_prev) = if i > 0 { (c_prime[i - 1], d_prime[i - 1]) } else { (0.0, 0.0) };
            let denom = diag - lower * c_prev;
            c_prime[i] = upper / denom;
            d_prime[i] = (self.field.rho[i] + lower * d_prev) / denom;
        }
        let rho = &mut self.field.rho;
        rho[n - 1] = d_prime[n - 1];
        for i in (0..n - 1).rev() {
            rho[i] = d_prime[i] + c_prime[i] * rho[i + 1];
        }
        if let Some(i) = rho.iter().position(|r| !(*r >= 0.0 && r.is_finite())) {
            return Err(Error::Scheme(format!("density {} at cell {i}", rho[i])));
        }
        self.field.time += fraction * self.dt;
        Ok(())
    }

    /// Advances to absolute time `t`; the last step is shortened to land on it.
    pub fn advance_to(&mut self, t: f64) -> Result<()> {
        if t < self.field.time {
            return Err(Error::Domain(format!("cannot go back from {} to {t}", self.field.time)));
        }
        let tol = 1e-12 * t.abs().max(self.dt);
        while t - self.field.time > tol {
            let remaining = t - self.field.time;
            if remaining >= self.dt * (1.0 - 1e-12) {
                self.step()?;
            } else {
                self.step_with(remaining / self.dt)?;
            }
        }
        self.field.time = t;
        Ok(())
    }
}

/// Advances `initial` to time `t_final`. Without `dt`, a step resolving the
/// fastest drift relaxation is chosen.
pub fn solve_smoluchowski(
    potential: &Potential,
    params: &EmitterParams,
    grid: &UniformGrid,
    dt: Option<f64>,
    t_final: f64,
    initial: DensityField,
) -> Result<DensityField> {
    if initial.grid != *grid {
        return Err(Error::Input("initial density is not on the requested grid".into()));
    }
    let horizon = (t_final - initial.time).max(f64::MIN_POSITIVE);
    let dt = dt.unwrap_or_else(|| Smoluchowski::default_dt(potential, params, grid, horizon));
    let mut solver = Smoluchowski::new(potential, params, initial, dt)?;
    solver.advance_to(t_final)?;
    Ok(solver.into_field())
}
