//! Trajectory generation and empirical spectral estimation.
//!
//! Quantum statistics are reached only through frequency-domain synthesis,
//! which is exact for linear systems. The time-domain integrator is
//! classical and uses the order-reduced radiation-reaction force
//! −τ₀ ẋ U″(x), never the third derivative of position.

mod estimate;
mod langevin;
mod noise;
mod synthesis;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::EmitterParams;

pub use estimate::{estimate_autocorrelation, estimate_psd, PsdEstimate, Window};
pub use langevin::{integrate_langevin_classical, mean_squared_displacement, msd_slope};
pub use noise::{ForceNoise, NoiseSpec};
pub use synthesis::synthesize_trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrajectoryKind {
    Position,
    Velocity,
}

impl TrajectoryKind {
    /// Column name used in CSV output.
    pub fn column(self) -> &'static str {
        match self {
            TrajectoryKind::Position => "x",
            TrajectoryKind::Velocity => "v",
        }
    }
}

/// Uniformly sampled time series with seed provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub dt: f64,
    pub samples: Vec<f64>,
    pub kind: TrajectoryKind,
    pub seed: u64,
    pub params: Option<EmitterParams>,
}

impl Trajectory {
    pub fn new(dt: f64, samples: Vec<f64>, kind: TrajectoryKind, seed: u64) -> Result<Self> {
        let t = Trajectory { dt, samples, kind, seed, params: None };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Input(format!("dt must be > 0, got {}", self.dt)));
        }
        if self.samples.len() < 2 {
            return Err(Error::Input("a trajectory needs at least two samples".into()));
        }
        if let Some(i) = self.samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::Input(format!("sample {i} is not finite")));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    /// Sample variance about the mean (1/N normalisation).
    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / self.samples.len() as f64
    }

    /// Drops the first `n` samples.
    pub fn discard(mut self, n: usize) -> Self {
        self.samples.drain(..n.min(self.samples.len()));
        self
    }
}

/// Burn-in length before statistics: 10·max(1/γ₀, 1/ω₀), in steps of `dt`.
/// Returns 0 when neither rate is set.
pub fn burn_in_steps(params: &EmitterParams, dt: f64) -> usize {
    let mut horizon: f64 = 0.0;
    if params.gamma0 > 0.0 {
        horizon = horizon.max(1.0 / params.gamma0);
    }
    if params.omega0 > 0.0 {
        horizon = horizon.max(1.0 / params.omega0);
    }
    (10.0 * horizon / dt).ceil() as usize
}
