use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::EmitterParams;

/// Stream ids of the two independent noise components.
const WHITE_STREAM: u64 = 1;
const VIOLET_STREAM: u64 = 2;

/// Classical Langevin force: white noise of density `white_level`
/// (2mk_BTγ₀) plus violet noise of density `violet_level`·ω² (2mk_BTτ₀).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub white_level: f64,
    pub violet_level: f64,
}

impl NoiseSpec {
    pub fn classical(params: &EmitterParams) -> Self {
        let scale = 2.0 * params.m * params.kt();
        NoiseSpec {
            white_level: scale * params.gamma0,
            violet_level: scale * params.tau0,
        }
    }

    pub fn validate(&self, allow_zero: bool) -> Result<()> {
        if !(self.white_level >= 0.0 && self.violet_level >= 0.0)
            || !self.white_level.is_finite()
            || !self.violet_level.is_finite()
        {
            return Err(Error::Input("noise levels must be finite and >= 0".into()));
        }
        if !allow_zero && self.white_level == 0.0 && self.violet_level == 0.0 {
            return Err(Error::Input("both noise levels are zero".into()));
        }
        Ok(())
    }
}

/// Discrete realisation of [`NoiseSpec`] on a grid of step `dt`.
///
/// The white part is a piecewise-constant force of variance S_w/dt. The
/// violet part is the first difference (η_j − η_{j−1})/dt of an independent
/// white sequence η of density S_v, whose density is
/// S_v (2 − 2cos ωdt)/dt² ≈ S_v ω². The history starts at η_{−1} = 0.
pub struct ForceNoise {
    white: ChaCha8Rng,
    violet: ChaCha8Rng,
    white_sd: f64,
    eta_sd: f64,
    prev_eta: f64,
}

impl ForceNoise {
    pub fn new(spec: NoiseSpec, dt: f64, seed: u64) -> Self {
        let mut white = ChaCha8Rng::seed_from_u64(seed);
        white.set_stream(WHITE_STREAM);
        let mut violet = ChaCha8Rng::seed_from_u64(seed);
        violet.set_stream(VIOLET_STREAM);
        ForceNoise {
            white,
            violet,
            white_sd: (spec.white_level * dt).sqrt(),
            eta_sd: (spec.violet_level / dt).sqrt(),
            prev_eta: 0.0,
        }
    }

    /// Impulse ∫F dt over the next step.
    #[inline]
    pub fn next_impulse(&mut self) -> f64 {
        let mut impulse = 0.0;
        if self.white_sd > 0.0 {
            let g: f64 = StandardNormal.sample(&mut self.white);
            impulse += self.white_sd * g;
        }
        if self.eta_sd > 0.0 {
            let g: f64 = StandardNormal.sample(&mut self.violet);
            let eta = self.eta_sd * g;
            impulse += eta - self.prev_eta;
            self.prev_eta = eta;
        }
        impulse
    }

    /// `n` consecutive force values F_j = impulse_j / dt.
    pub fn force_sequence(spec: NoiseSpec, n: usize, dt: f64, seed: u64) -> Vec<f64> {
        let mut gen = ForceNoise::new(spec, dt, seed);
        (0..n).map(|_| gen.next_impulse() / dt).collect()
    }
}
