use rayon::prelude::*;

use super::{bernoulli, check_classical, effective_friction, PhaseGrid, PhaseSpaceField};
use crate::error::{Error, Result};
use crate::params::EmitterParams;
use crate::potential::Potential;

/// Explicit finite-volume solver for
/// ∂tW + v∂xW − (U′/m)∂vW = γ_eff(x)∂v(vW + (k_BT/m)∂vW),
/// γ_eff = γ₀ + τ₀U″/m, with zero-flux boundaries.
///
/// Transport fluxes reconstruct h = W/M, M = e^{−U/k_BT}e^{−mv²/2k_BT},
/// with minmod-limited slopes, and use the discrete velocity and force for
/// which the transport divergence of M vanishes identically. The collision
/// flux is of Scharfetter–Gummel type in v. Time stepping is two-stage
/// strong-stability-preserving Runge–Kutta, so the Maxwell–Boltzmann
/// density is a fixed point to round-off and positivity holds under the
/// step bound.
pub struct KleinKramers {
    field: PhaseSpaceField,
    dt: f64,
    nx: usize,
    nv: usize,
    dx: f64,
    dv: f64,
    /// Discrete velocity at each v cell.
    velocity: Vec<f64>,
    /// Discrete acceleration −U′/m at each x cell.
    acceleration: Vec<f64>,
    x_axis: AxisRatios,
    v_axis: AxisRatios,
    /// γ_eff·θ/Δv per x cell.
    collision: Vec<f64>,
    /// Bernoulli weights B(z), B(−z) on interior v faces (index = face).
    bern_plus: Vec<f64>,
    bern_minus: Vec<f64>,
}

/// Equilibrium-weight ratios along one axis, from logs of cell and face weights.
struct AxisRatios {
    /// weight[k+1]/weight[k]
    cell: Vec<f64>,
    /// face[f]/weight[f−1] (face f lies between cells f−1 and f)
    face_left: Vec<f64>,
    /// face[f]/weight[f]
    face_right: Vec<f64>,
}

impl AxisRatios {
    fn new(log_cell: &[f64], log_face: &[f64]) -> Self {
        let n = log_cell.len();
        let cell = (0..n - 1).map(|k| (log_cell[k + 1] - log_cell[k]).exp()).collect();
        let mut face_left = vec![0.0; n + 1];
        let mut face_right = vec![0.0; n + 1];
        for f in 1..n {
            face_left[f] = (log_face[f] - log_cell[f - 1]).exp();
            face_right[f] = (log_face[f] - log_cell[f]).exp();
        }
        AxisRatios { cell, face_left, face_right }
    }

    /// Upwind MUSCL flux a·M_face·h_face through interior face f of a line,
    /// given the four cell values around it.
    #[inline]
    fn flux(&self, f: usize, n: usize, a: f64, w: impl Fn(usize) -> f64) -> f64 {
        if a >= 0.0 {
            let u = f - 1;
            let gu = w(u);
            let gd = w(f) / self.cell[u];
            let slope = if u >= 1 {
                let guu = w(u - 1) * self.cell[u - 1];
                minmod(gu - guu, gd - gu)
            } else {
                0.0
            };
            a * self.face_left[f] * (gu + 0.5 * slope)
        } else {
            let u = f;
            let gu = w(u);
            let gd = w(f - 1) * self.cell[f - 1];
            let slope = if f + 1 < n {
                let guu = w(f + 1) / self.cell[f];
                minmod(gu - guu, gd - gu)
            } else {
                0.0
            };
            a * self.face_right[f] * (gu + 0.5 * slope)
        }
    }

    /// Outflow coefficient of cell k when moving with signed speed a.
    fn outflow(&self, k: usize, n: usize, a: f64) -> f64 {
        if a > 0.0 && k + 1 < n {
            a * self.face_left[k + 1]
        } else if a < 0.0 && k > 0 {
            -a * self.face_right[k]
        } else {
            0.0
        }
    }
}

#[inline]
fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

impl KleinKramers {
    /// Builds the solver. With `dt = None` half the positivity bound is
    /// used; a larger requested step is a step-size error.
    pub fn new(potential: &Potential, params: &EmitterParams, initial: PhaseSpaceField, dt: Option<f64>) -> Result<Self> {
        check_classical(params)?;
        params.validate()?;
        let grid = initial.grid;
        let (nx, nv) = (grid.x.cells, grid.v.cells);
        let (dx, dv) = (grid.x.spacing(), grid.v.spacing());
        let kt = params.kt();
        let theta = kt / params.m;

        let xs = grid.x.centers();
        let gamma = effective_friction(potential, params, &xs)?;
        let log_a: Vec<f64> = xs.iter().map(|&x| -potential.value(x) / kt).collect();
        let log_a_face: Vec<f64> = grid.x.faces().iter().map(|&x| -potential.value(x) / kt).collect();
        let vs = grid.v.centers();
        let log_b: Vec<f64> = vs.iter().map(|v| -v * v / (2.0 * theta)).collect();
        let log_b_face: Vec<f64> = grid.v.faces().iter().map(|v| -v * v / (2.0 * theta)).collect();

        let velocity = (0..nv)
            .map(|j| -theta / dv * ((log_b_face[j + 1] - log_b[j]).exp() - (log_b_face[j] - log_b[j]).exp()))
            .collect();
        let acceleration = (0..nx)
            .map(|i| theta / dx * ((log_a_face[i + 1] - log_a[i]).exp() - (log_a_face[i] - log_a[i]).exp()))
            .collect();
        let collision = gamma.iter().map(|g| g * theta / dv).collect();
        let mut bern_plus = vec![0.0; nv + 1];
        let mut bern_minus = vec![0.0; nv + 1];
        for f in 1..nv {
            let z = (vs[f] * vs[f] - vs[f - 1] * vs[f - 1]) / (2.0 * theta);
            bern_plus[f] = bernoulli(z);
            bern_minus[f] = bernoulli(-z);
        }

        let mut solver = KleinKramers {
            field: initial,
            dt: 0.0,
            nx,
            nv,
            dx,
            dv,
            velocity,
            acceleration,
            x_axis: AxisRatios::new(&log_a, &log_a_face),
            v_axis: AxisRatios::new(&log_b, &log_b_face),
            collision,
            bern_plus,
            bern_minus,
        };
        let bound = solver.stable_dt();
        solver.dt = match dt {
            None => 0.5 * bound,
            Some(dt) if dt > 0.0 && dt <= bound => dt,
            Some(dt) => return Err(Error::StepSize { dt, suggested: 0.5 * bound }),
        };
        Ok(solver)
    }

    /// Largest step for which a forward-Euler stage keeps W ≥ 0.
    pub fn stable_dt(&self) -> f64 {
        let mut rate: f64 = 0.0;
        for i in 0..self.nx {
            for j in 0..self.nv {
                let transport = self.x_axis.outflow(i, self.nx, self.velocity[j]) / self.dx
                    + self.v_axis.outflow(j, self.nv, self.acceleration[i]) / self.dv;
                let mut collide = 0.0;
                if j + 1 < self.nv {
                    collide += self.bern_plus[j + 1];
                }
                if j > 0 {
                    collide += self.bern_minus[j];
                }
                rate = rate.max(1.5 * transport + self.collision[i] * collide / self.dv);
            }
        }
        1.0 / rate
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn field(&self) -> &PhaseSpaceField {
        &self.field
    }

    pub fn into_field(self) -> PhaseSpaceField {
        self.field
    }

    /// Time derivative of W from the flux divergence.
    fn rate(&self, w: &[f64], out: &mut [f64]) {
        let (nx, nv) = (self.nx, self.nv);
        let mut fx = vec![0.0; (nx + 1) * nv];
        fx.par_chunks_mut(nv).enumerate().for_each(|(f, row)| {
            if f == 0 || f == nx {
                return;
            }
            for (j, out) in row.iter_mut().enumerate() {
                *out = self.x_axis.flux(f, nx, self.velocity[j], |i| w[i * nv + j]);
            }
        });
        let mut fv = vec![0.0; nx * (nv + 1)];
        fv.par_chunks_mut(nv + 1).enumerate().for_each(|(i, row)| {
            let line = &w[i * nv..(i + 1) * nv];
            let a = self.acceleration[i];
            let c = self.collision[i];
            for f in 1..nv {
                let transport = self.v_axis.flux(f, nv, a, |j| line[j]);
                let collide = -c * (self.bern_minus[f] * line[f] - self.bern_plus[f] * line[f - 1]);
                row[f] = transport + collide;
            }
        });
        out.par_chunks_mut(nv).enumerate().for_each(|(i, row)| {
            for (j, r) in row.iter_mut().enumerate() {
                *r = -(fx[(i + 1) * nv + j] - fx[i * nv + j]) / self.dx
                    - (fv[i * (nv + 1) + j + 1] - fv[i * (nv + 1) + j]) / self.dv;
            }
        });
    }

    /// One two-stage SSP Runge–Kutta step of length `h` ≤ dt.
    fn step_with(&mut self, h: f64) -> Result<()> {
        let n = self.field.w.len();
        let mut k = vec![0.0; n];
        self.rate(&self.field.w, &mut k);
        let stage: Vec<f64> = self.field.w.iter().zip(&k).map(|(w, k)| w + h * k).collect();
        self.rate(&stage, &mut k);
        for ((w, s), k) in self.field.w.iter_mut().zip(&stage).zip(&k) {
            *w = 0.5 * *w + 0.5 * (s + h * k);
        }
        // round-off can leave −ε where W is 0 to machine precision
        for w in self.field.w.iter_mut() {
            if *w < 0.0 {
                if *w < -1e-14 {
                    return Err(Error::Scheme(format!("phase-space density {w} after step")));
                }
                *w = 0.0;
            }
        }
        if self.field.w.iter().any(|w| !w.is_finite()) {
            return Err(Error::Scheme("non-finite phase-space density".into()));
        }
        self.field.time += h;
        Ok(())
    }

    pub fn step(&mut self) -> Result<()> {
        self.step_with(self.dt)
    }

    /// Advances to absolute time `t`; the last step is shortened to land on it.
    pub fn advance_to(&mut self, t: f64) -> Result<()> {
        if t < self.field.time {
            return Err(Error::Domain(format!("cannot go back from {} to {t}", self.field.time)));
        }
        let tol = 1e-12 * t.abs().max(self.dt);
        while t - self.field.time > tol {
            let h = (t - self.field.time).min(self.dt);
            self.step_with(h)?;
        }
        self.field.time = t;
        Ok(())
    }
}

/// Advances `initial` on `grid` to time `t_final`.
pub fn solve_klein_kramers(
    potential: &Potential,
    params: &EmitterParams,
    grid: &PhaseGrid,
    dt: Option<f64>,
    t_final: f64,
    initial: PhaseSpaceField,
) -> Result<PhaseSpaceField> {
    if initial.grid != *grid {
        return Err(Error::Input("initial density is not on the requested grid".into()));
    }
    let mut solver = KleinKramers::new(potential, params, initial, dt)?;
    solver.advance_to(t_final)?;
    Ok(solver.into_field())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinetics::UniformGrid;
    use crate::params::{make_params, ParamSpec};

    fn reduced(gamma0: f64, omega0: f64, tau0: f64) -> EmitterParams {
        make_params(&ParamSpec::reduced(1.0, gamma0, omega0, tau0, 1.0, 1e3)).unwrap().classical()
    }

    fn grid(x_half: f64, nx: usize, v_half: f64, nv: usize) -> PhaseGrid {
        PhaseGrid {
            x: UniformGrid::symmetric(x_half, nx).unwrap(),
            v: UniformGrid::symmetric(v_half, nv).unwrap(),
        }
    }

    #[test]
    fn maxwell_boltzmann_is_fixed_point() {
        let p = reduced(1.0, 1.0, 0.1);
        let g = grid(7.0, 70, 7.0, 70);
        let u = Potential::harmonic(1.0, 1.0);
        let eq = PhaseSpaceField::maxwell_boltzmann(g, &u, &p).unwrap();
        let out = solve_klein_kramers(&u, &p, &g, None, 2.0, eq.clone()).unwrap();
        assert!(out.l1_distance(&eq) < 1e-10, "{}", out.l1_distance(&eq));
    }

    #[test]
    fn conserves_and_stays_positive() {
        let p = reduced(0.5, 1.0, 0.0);
        let g = grid(6.0, 60, 6.0, 60);
        let u = Potential::DoubleWell { a: 0.1, b: 0.5 };
        let start = PhaseSpaceField::gaussian(g, 1.5, 0.05, 0.5, 0.1).unwrap();
        let out = solve_klein_kramers(&u, &p, &g, None, 3.0, start).unwrap();
        assert!((out.total() - 1.0).abs() < 1e-12);
        assert!(out.w.iter().all(|w| *w >= 0.0));
    }

    #[test]
    fn oversized_step_refused() {
        let p = reduced(1.0, 1.0, 0.0);
        let g = grid(5.0, 40, 5.0, 40);
        let u = Potential::harmonic(1.0, 1.0);
        let start = PhaseSpaceField::maxwell_boltzmann(g, &u, &p).unwrap();
        let err = solve_klein_kramers(&u, &p, &g, Some(1.0), 1.0, start).unwrap_err();
        assert!(matches!(err, Error::StepSize { .. }));
    }

    #[test]
    fn negative_effective_friction_refused() {
        let p = reduced(0.1, 1.0, 1.0);
        let g = grid(2.0, 20, 4.0, 20);
        let u = Potential::DoubleWell { a: 0.1, b: 1.0 };
        let start = PhaseSpaceField::gaussian(g, 0.0, 0.1, 0.0, 1.0).unwrap();
        let err = solve_klein_kramers(&u, &p, &g, None, 1.0, start).unwrap_err();
        assert!(matches!(err, Error::ModelValidity(_)));
    }

    #[test]
    fn free_particle_einstein_growth() {
        let p = reduced(2.0, 0.0, 0.0);
        let g = grid(20.0, 200, 6.0, 48);
        let u = Potential::free();
        let b = PhaseSpaceField::gaussian(g, 0.0, 0.25, 0.0, 1.0).unwrap();
        let mut solver = KleinKramers::new(&u, &p, b, None).unwrap();
        solver.advance_to(4.0).unwrap();
        let s1 = solver.field().position_variance();
        solver.advance_to(8.0).unwrap();
        let s2 = solver.field().position_variance();
        let slope = (s2 - s1) / 4.0;
        // 2D with D = kT/(mγ₀) = 0.5
        assert!((slope - 1.0).abs() < 0.03, "{slope}");
    }
}
