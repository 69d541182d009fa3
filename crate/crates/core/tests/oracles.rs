//! Closed forms recomputed here from first principles, independently of the
//! library's own algebra, and compared against the library.

use std::f64::consts::PI;

use emitter_core::friction::FrictionModel;
use emitter_core::kinetics::{harmonic_sigma2, superdiffusion_prefactor};
use emitter_core::moments::velocity_dispersion;
use emitter_core::params::{make_params, EmitterParams, ParamSpec};
use emitter_core::quadrature::QuadratureSpec;
use emitter_core::spectra::{s_vv, s_xx};

fn reduced(gamma0: f64, omega0: f64, tau0: f64, temperature: f64) -> EmitterParams {
    make_params(&ParamSpec::reduced(1.3, gamma0, omega0, tau0, temperature, 1e3)).unwrap()
}

/// ħ coth(ħω/2kT)/(2mω) · 2ω²γ/[(ω² − ω₀²)² + ω²γ²], the uncancelled form.
fn sxx_uncancelled(p: &EmitterParams, omega: f64) -> f64 {
    let gamma = p.gamma0 + p.tau0 * omega * omega;
    let coth = 1.0 / (p.hbar() * omega / (2.0 * p.kt())).tanh();
    let lineshape = 2.0 * omega * omega * gamma / ((omega * omega - p.omega0.powi(2)).powi(2) + (omega * gamma).powi(2));
    p.hbar() * coth / (2.0 * p.m * omega) * lineshape
}

/// Composite Simpson on [a, b] with n (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + f(b) + inner) * h / 3.0
}

#[test]
fn amplitude_density_matches_uncancelled_form() {
    let p = reduced(0.4, 1.7, 0.02, 0.6);
    let model = FrictionModel::radiative(&p);
    for omega in [0.01, 0.3, 1.0, 1.7, 2.5, 40.0] {
        let lib = s_xx(&p, &model, omega).unwrap();
        assert!((lib / sxx_uncancelled(&p, omega) - 1.0).abs() < 1e-12, "omega {omega}");
    }
}

#[test]
fn classical_ohmic_oscillator_obeys_equipartition() {
    let p = reduced(0.5, 1.2, 0.0, 0.8).classical();
    let model = FrictionModel::ohmic(p.gamma0);
    // ω = tan(u) maps [0, π/2) onto [0, ∞)
    let sub = |s: &dyn Fn(f64) -> f64, u: f64| if u >= 0.5 * PI { 0.0 } else { s(u.tan()) / u.cos().powi(2) };
    let xx = |w: f64| s_xx(&p, &model, w).unwrap();
    let vv = |w: f64| s_vv(&p, &model, w).unwrap();
    let cxx = simpson(|u| sub(&xx, u), 0.0, 0.5 * PI, 200_000) / PI;
    let cvv = simpson(|u| sub(&vv, u), 0.0, 0.5 * PI, 200_000) / PI;
    assert!((cxx / (p.kt() / (p.m * p.omega0 * p.omega0)) - 1.0).abs() < 1e-6, "{cxx}");
    assert!((cvv / (p.kt() / p.m) - 1.0).abs() < 1e-6, "{cvv}");
}

#[test]
fn vacuum_velocity_dispersion_against_simpson() {
    // T = 0 free particle: S_VV = ħωτ₀/(m(1 + ω²τ₀²)), so the integrand is elementary
    let p = make_params(&ParamSpec::natural_electron()).unwrap();
    let svv = |w: f64| p.hbar() * w * p.tau0 / (p.m * (1.0 + (w * p.tau0).powi(2)));
    let reference = simpson(svv, 0.0, p.cutoff, 20_000) / PI;
    let lib = velocity_dispersion(&p, &QuadratureSpec::default()).unwrap().value;
    assert!((lib / reference - 1.0).abs() < 1e-10);
}

#[test]
fn overdamped_relaxation_law() {
    let p = reduced(3.0, 0.9, 0.05, 1.1).classical();
    let gamma = p.gamma0 + p.tau0 * p.omega0 * p.omega0;
    for t in [0.0, 0.2, 1.0, 7.0] {
        let direct = p.kt() / (p.m * p.omega0 * p.omega0) * (1.0 - (-2.0 * p.omega0 * p.omega0 * t / gamma).exp());
        let lib = harmonic_sigma2(&p, t).unwrap();
        assert!((lib - direct).abs() <= 1e-14 * direct.max(1e-300) + 1e-300, "t {t}");
    }
}

#[test]
fn superdiffusion_prefactor_from_the_vacuum_equation() {
    // σ² = A t^{3/2} solves τ₀ s‴ = −ħ²/(2m²s) iff A² = 16ħ²/(12 m² τ₀)
    let p = make_params(&ParamSpec::reduced(2.0, 0.0, 0.0, 0.07, 0.0, 1e3)).unwrap();
    let a = superdiffusion_prefactor(&p).unwrap();
    let t: f64 = 3.3;
    let s = a * t.powf(1.5);
    let s3 = a * 1.5 * 0.5 * (-0.5) * t.powf(-1.5);
    let residual = p.tau0 * s3 + p.hbar() * p.hbar() / (2.0 * p.m * p.m * s);
    assert!(residual.abs() < 1e-12 * (p.tau0 * s3).abs());
}
