//! CSV rendering and parsing for spectra, trajectories and fields, plus
//! JSON sidecars. Floats use Rust's shortest round-trip formatting, so
//! output is bit-reproducible and parses back exactly.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinetics::{DensityField, DispersionSeries, PhaseSpaceField};
use crate::params::EmitterParams;
use crate::spectra::SpectrumSamples;
use crate::stochastic::{PsdEstimate, Trajectory, TrajectoryKind};

pub fn spectrum_csv(s: &SpectrumSamples) -> String {
    let mut out = String::from("omega,value\n");
    for (w, v) in s.omegas.iter().zip(&s.values) {
        let _ = writeln!(out, "{w},{v}");
    }
    out
}

pub fn trajectory_csv(t: &Trajectory) -> String {
    let mut out = format!("t,{}\n", t.kind.column());
    for (i, x) in t.samples.iter().enumerate() {
        let _ = writeln!(out, "{},{x}", i as f64 * t.dt);
    }
    out
}

/// Sidecar written next to a trajectory CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub dt: f64,
    pub kind: TrajectoryKind,
    pub seed: u64,
    pub samples: usize,
    pub params: Option<EmitterParams>,
}

impl TrajectoryMeta {
    pub fn of(t: &Trajectory) -> Self {
        TrajectoryMeta { dt: t.dt, kind: t.kind, seed: t.seed, samples: t.len(), params: t.params.clone() }
    }
}

/// Parses a `t,x` or `t,v` CSV. The step comes from `meta` when given,
/// otherwise from the time column, which must then be uniform.
pub fn parse_trajectory_csv(text: &str, meta: Option<&TrajectoryMeta>) -> Result<Trajectory> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Input("empty trajectory file".into()))?;
    let kind = match header.trim() {
        "t,x" => TrajectoryKind::Position,
        "t,v" => TrajectoryKind::Velocity,
        other => return Err(Error::Input(format!("expected header `t,x` or `t,v`, got `{other}`"))),
    };
    let mut times = Vec::new();
    let mut samples = Vec::new();
    for (n, line) in lines.enumerate() {
        let mut parts = line.split(',');
        let parse = |s: Option<&str>| -> Result<f64> {
            s.ok_or_else(|| Error::Input(format!("line {}: missing column", n + 2)))?
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Input(format!("line {}: {e}", n + 2)))
        };
        times.push(parse(parts.next())?);
        samples.push(parse(parts.next())?);
    }
    if samples.len() < 2 {
        return Err(Error::Input("a trajectory needs at least two samples".into()));
    }
    let dt = match meta {
        Some(m) => m.dt,
        None => {
            let dt = times[1] - times[0];
            let tol = 1e-9 * dt.abs().max(times.last().unwrap().abs() * 1e-6);
            if times.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > tol.max(1e-12 * dt.abs())) {
                return Err(Error::Input("time column is not uniformly spaced".into()));
            }
            dt
        }
    };
    let mut t = Trajectory::new(dt, samples, kind, meta.map_or(0, |m| m.seed))?;
    t.params = meta.and_then(|m| m.params.clone());
    Ok(t)
}

pub fn psd_csv(p: &PsdEstimate) -> String {
    let mut out = String::from("omega,value,std_error\n");
    for ((w, v), s) in p.omegas.iter().zip(&p.values).zip(p.std_errors()) {
        let _ = writeln!(out, "{w},{v},{s}");
    }
    out
}

/// Long-format snapshots `t,x,rho`.
pub fn density_snapshots_csv(fields: &[DensityField]) -> String {
    let mut out = String::from("t,x,rho\n");
    for f in fields {
        for (x, r) in f.x_grid.iter().zip(&f.rho) {
            let _ = writeln!(out, "{},{x},{r}", f.time);
        }
    }
    out
}

/// Long-format snapshots `t,x,v,W`.
pub fn phase_snapshots_csv(fields: &[PhaseSpaceField]) -> String {
    let mut out = String::from("t,x,v,W\n");
    for f in fields {
        let nv = f.v_grid.len();
        for (i, x) in f.x_grid.iter().enumerate() {
            for (j, v) in f.v_grid.iter().enumerate() {
                let _ = writeln!(out, "{},{x},{v},{}", f.time, f.w[i * nv + j]);
            }
        }
    }
    out
}

pub fn dispersion_csv(s: &DispersionSeries) -> String {
    let mut out = String::from("t,sigma2,d_sigma2\n");
    for ((t, s2), d) in s.times.iter().zip(&s.sigma2).zip(&s.d_sigma2) {
        let _ = writeln!(out, "{t},{s2},{d}");
    }
    out
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}
