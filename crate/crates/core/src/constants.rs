//! Physical constants and unit systems.
//!
//! SI values are CODATA 2018. The natural electron system sets ħ = m_e = c = 1
//! and k_B = 1, so times are in units of ħ/m_e c², lengths in ħ/m_e c and
//! temperatures in m_e c²/k_B. The elementary charge is then fixed by the
//! fine-structure constant with ε₀ = 1.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// CODATA 2018 reduced Planck constant (J·s).
pub const HBAR_SI: f64 = 1.054_571_817e-34;
/// CODATA 2018 Boltzmann constant (J/K).
pub const K_B_SI: f64 = 1.380_649e-23;
/// Speed of light (m/s).
pub const C_SI: f64 = 299_792_458.0;
/// CODATA 2018 vacuum permittivity (F/m).
pub const EPSILON0_SI: f64 = 8.854_187_812_8e-12;
/// Elementary charge (C).
pub const ELEMENTARY_CHARGE_SI: f64 = 1.602_176_634e-19;
/// CODATA 2018 electron mass (kg).
pub const ELECTRON_MASS_SI: f64 = 9.109_383_701_5e-31;
/// CODATA 2018 fine-structure constant.
pub const ALPHA: f64 = 7.297_352_569_3e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnitKind {
    Si,
    NaturalElectron,
    Reduced,
}

/// A unit system. `scale_factors` only matters for [`UnitKind::Reduced`],
/// where it holds the numeric values of the constants (keys `hbar`, `k_B`,
/// `c`, `epsilon0`, `elementary_charge`, `electron_mass`; missing keys are 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitSystem {
    pub kind: UnitKind,
    pub scale_factors: BTreeMap<String, f64>,
}

const SCALE_KEYS: [&str; 6] = [
    "hbar",
    "k_B",
    "c",
    "epsilon0",
    "elementary_charge",
    "electron_mass",
];

impl UnitSystem {
    pub fn si() -> Self {
        UnitSystem {
            kind: UnitKind::Si,
            scale_factors: BTreeMap::new(),
        }
    }

    pub fn natural() -> Self {
        UnitSystem {
            kind: UnitKind::NaturalElectron,
            scale_factors: BTreeMap::new(),
        }
    }

    /// Reduced units with user-chosen constant values. Every scale must be
    /// a finite positive number and every key one of the known constants.
    pub fn reduced(scales: BTreeMap<String, f64>) -> Result<Self> {
        for (key, &value) in &scales {
            if !SCALE_KEYS.contains(&key.as_str()) {
                return Err(Error::validation(
                    "units",
                    format!("unknown reduced scale `{key}`"),
                ));
            }
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::validation(
                    "units",
                    format!("reduced scale `{key}` must be > 0, got {value}"),
                ));
            }
        }
        Ok(UnitSystem {
            kind: UnitKind::Reduced,
            scale_factors: scales,
        })
    }

    /// Reduced units with every constant equal to one.
    pub fn reduced_unit() -> Self {
        UnitSystem {
            kind: UnitKind::Reduced,
            scale_factors: BTreeMap::new(),
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "si" | "SI" => Ok(Self::si()),
            "natural" | "natural-electron" => Ok(Self::natural()),
            "reduced" => Ok(Self::reduced_unit()),
            other => Err(Error::validation(
                "units",
                format!("expected si|natural|reduced, got `{other}`"),
            )),
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            UnitKind::Si => "si",
            UnitKind::NaturalElectron => "natural",
            UnitKind::Reduced => "reduced",
        }
    }

    fn scale(&self, key: &str) -> f64 {
        self.scale_factors.get(key).copied().unwrap_or(1.0)
    }

    pub fn constants(&self) -> PhysicalConstants {
        match self.kind {
            UnitKind::Si => PhysicalConstants::si(),
            UnitKind::NaturalElectron => PhysicalConstants::natural(),
            UnitKind::Reduced => {
                let hbar = self.scale("hbar");
                let c = self.scale("c");
                let epsilon0 = self.scale("epsilon0");
                let e = self.scale("elementary_charge");
                PhysicalConstants {
                    hbar,
                    k_b: self.scale("k_B"),
                    c,
                    epsilon0,
                    alpha: e * e / (4.0 * PI * epsilon0 * hbar * c),
                    elementary_charge: e,
                    electron_mass: self.scale("electron_mass"),
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub k_b: f64,
    pub c: f64,
    pub epsilon0: f64,
    pub alpha: f64,
    pub elementary_charge: f64,
    pub electron_mass: f64,
}

impl PhysicalConstants {
    pub fn si() -> Self {
        PhysicalConstants {
            hbar: HBAR_SI,
            k_b: K_B_SI,
            c: C_SI,
            epsilon0: EPSILON0_SI,
            alpha: ALPHA,
            elementary_charge: ELEMENTARY_CHARGE_SI,
            electron_mass: ELECTRON_MASS_SI,
        }
    }

    pub fn natural() -> Self {
        PhysicalConstants {
            hbar: 1.0,
            k_b: 1.0,
            c: 1.0,
            epsilon0: 1.0,
            alpha: ALPHA,
            elementary_charge: (4.0 * PI * ALPHA).sqrt(),
            electron_mass: 1.0,
        }
    }

    /// α recomputed from e, ε₀, ħ and c.
    pub fn alpha_from_charge(&self) -> f64 {
        let e = self.elementary_charge;
        e * e / (4.0 * PI * self.epsilon0 * self.hbar * self.c)
    }

    /// Checks positivity and that the stored α agrees with e²/4πε₀ħc.
    pub fn validate(&self) -> Result<()> {
        let entries = [
            ("hbar", self.hbar),
            ("k_B", self.k_b),
            ("c", self.c),
            ("epsilon0", self.epsilon0),
            ("alpha", self.alpha),
            ("elementary_charge", self.elementary_charge),
            ("electron_mass", self.electron_mass),
        ];
        for (name, v) in entries {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Input(format!("constant {name} must be > 0, got {v}")));
            }
        }
        let rel = (self.alpha_from_charge() - self.alpha).abs() / self.alpha;
        if rel > 1e-9 {
            return Err(Error::Input(format!(
                "constants inconsistent: alpha differs from e^2/(4 pi eps0 hbar c) by {rel:.2e}"
            )));
        }
        Ok(())
    }
}

/// Radiation time τ₀ = q²/(6π ε₀ m c³).
pub fn tau0_from_charge(q: f64, m: f64, consts: &PhysicalConstants) -> Result<f64> {
    if !(m > 0.0) {
        return Err(Error::Domain(format!("mass must be > 0, got {m}")));
    }
    if q == 0.0 || !q.is_finite() {
        return Err(Error::Domain(format!("charge must be finite and non-zero, got {q}")));
    }
    Ok(q * q / (6.0 * PI * consts.epsilon0 * m * consts.c.powi(3)))
}

/// Zitterbewegung cutoff Ω = 2mc²/ħ.
pub fn cutoff_frequency(m: f64, consts: &PhysicalConstants) -> Result<f64> {
    if !(m > 0.0) {
        return Err(Error::Domain(format!("mass must be > 0, got {m}")));
    }
    Ok(2.0 * m * consts.c * consts.c / consts.hbar)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn codata_alpha_is_consistent() {
        PhysicalConstants::si().validate().unwrap();
        PhysicalConstants::natural().validate().unwrap();
        UnitSystem::reduced_unit().constants().validate().unwrap();
    }

    #[test]
    fn electron_radiation_time() {
        let k = PhysicalConstants::si();
        let tau0 = tau0_from_charge(k.elementary_charge, k.electron_mass, &k).unwrap();
        // Independent arithmetic with the raw CODATA literals.
        let e = 1.602_176_634e-19_f64;
        let oracle = e * e
            / (6.0 * std::f64::consts::PI * 8.854_187_812_8e-12 * 9.109_383_701_5e-31 * 299_792_458.0_f64.powi(3));
        assert_relative_eq!(tau0, oracle, max_relative = 1e-6);
        assert_relative_eq!(tau0, 6.27e-24, max_relative = 1e-3);
        let freq = 2.0 * PI / tau0;
        assert!(freq > 0.5e24 && freq < 2e24, "2π/τ₀ = {freq:e}");
    }

    #[test]
    fn radiation_time_scales_with_charge_squared() {
        let k = PhysicalConstants::si();
        let one = tau0_from_charge(k.elementary_charge, k.electron_mass, &k).unwrap();
        let two = tau0_from_charge(2.0 * k.elementary_charge, k.electron_mass, &k).unwrap();
        assert_relative_eq!(two, 4.0 * one, max_relative = 1e-15);
    }

    #[test]
    fn cutoff_values() {
        let nat = PhysicalConstants::natural();
        assert_eq!(cutoff_frequency(1.0, &nat).unwrap(), 2.0);
        let si = PhysicalConstants::si();
        let omega = cutoff_frequency(si.electron_mass, &si).unwrap();
        assert_relative_eq!(omega, 1.5527e21, max_relative = 1e-4);
        let tau0 = tau0_from_charge(si.elementary_charge, si.electron_mass, &si).unwrap();
        assert_relative_eq!(omega * tau0, 4.0 * ALPHA / 3.0, max_relative = 1e-9);
        assert!((1.0 / (omega * tau0) - 103.0).abs() < 0.5);
    }

    #[test]
    fn non_positive_mass_is_a_domain_error() {
        let k = PhysicalConstants::si();
        assert!(matches!(tau0_from_charge(1.0, 0.0, &k), Err(Error::Domain(_))));
        assert!(matches!(cutoff_frequency(-1.0, &k), Err(Error::Domain(_))));
    }

    #[test]
    fn reduced_scales_must_be_positive() {
        let mut s = BTreeMap::new();
        s.insert("hbar".to_string(), -1.0);
        assert!(UnitSystem::reduced(s).is_err());
        let mut s = BTreeMap::new();
        s.insert("planck".to_string(), 1.0);
        assert!(UnitSystem::reduced(s).is_err());
    }
}
