//! Validated emitter parameters and the plain-text config format.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::constants::{cutoff_frequency, tau0_from_charge, PhysicalConstants, UnitKind, UnitSystem};
use crate::error::{Error, Result};

/// Parameters of a Brownian emitter: an oscillator of mass `m` with own
/// frequency `omega0`, Ohmic friction `gamma0`, radiation time `tau0`, at
/// temperature `temperature`, with high-frequency cutoff `cutoff`.
///
/// `classical` switches every ħω coth(ħω/2k_BT) energy factor to 2k_BT.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmitterParams {
    pub m: f64,
    pub gamma0: f64,
    pub omega0: f64,
    pub tau0: f64,
    pub temperature: f64,
    pub cutoff: f64,
    pub classical: bool,
    pub units: UnitSystem,
    pub consts: PhysicalConstants,
    /// Set when τ₀ and Ω were both derived from a charge, so Ωτ₀ = 4α/3.
    pub charge_derived: bool,
}

impl EmitterParams {
    pub fn hbar(&self) -> f64 {
        self.consts.hbar
    }

    /// Thermal energy k_B T.
    pub fn kt(&self) -> f64 {
        self.consts.k_b * self.temperature
    }

    pub fn classical(mut self) -> Self {
        self.classical = true;
        self
    }

    pub fn quantum(mut self) -> Self {
        self.classical = false;
        self
    }

    /// Friction at the own frequency, γ₀ + ω₀²τ₀: the Lorentzian half-width
    /// and the harmonic effective friction of the kinetic equations.
    pub fn gamma_at_omega0(&self) -> f64 {
        crate::friction::radiative_gamma_sq(self.gamma0, self.tau0, self.omega0 * self.omega0)
    }

    pub fn validate(&self) -> Result<()> {
        fn non_negative(field: &'static str, v: f64) -> Result<()> {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::validation(field, format!("must be finite and >= 0, got {v}")))
            }
        }
        if !(self.m.is_finite() && self.m > 0.0) {
            return Err(Error::validation("m", format!("must be > 0, got {}", self.m)));
        }
        non_negative("gamma0", self.gamma0)?;
        non_negative("omega0", self.omega0)?;
        non_negative("tau0", self.tau0)?;
        non_negative("temperature", self.temperature)?;
        if !(self.cutoff.is_finite() && self.cutoff > 0.0) {
            return Err(Error::validation("cutoff", format!("must be > 0, got {}", self.cutoff)));
        }
        if self.charge_derived {
            let target = 4.0 * self.consts.alpha / 3.0;
            let rel = (self.cutoff * self.tau0 - target).abs() / target;
            if rel > 1e-9 {
                return Err(Error::validation(
                    "cutoff",
                    format!("cutoff*tau0 deviates from 4 alpha/3 by {rel:.2e}"),
                ));
            }
        }
        Ok(())
    }

    /// Re-expresses the parameters in another unit system. Only SI and the
    /// natural electron system convert into each other; reduced units carry
    /// no dimensional anchor.
    pub fn to_units(&self, target: &UnitSystem) -> Result<EmitterParams> {
        if self.units.kind == target.kind {
            return Ok(self.clone());
        }
        // SI seconds per natural time unit, SI kelvin per natural temperature unit.
        let si = PhysicalConstants::si();
        let time_unit = si.hbar / (si.electron_mass * si.c * si.c);
        let temp_unit = si.electron_mass * si.c * si.c / si.k_b;
        let (mass_f, time_f, temp_f) = match (self.units.kind, target.kind) {
            (UnitKind::Si, UnitKind::NaturalElectron) => {
                (1.0 / si.electron_mass, 1.0 / time_unit, 1.0 / temp_unit)
            }
            (UnitKind::NaturalElectron, UnitKind::Si) => (si.electron_mass, time_unit, temp_unit),
            (from, to) => {
                return Err(Error::NotApplicable(format!(
                    "no conversion between {from:?} and {to:?} units"
                )))
            }
        };
        Ok(EmitterParams {
            m: self.m * mass_f,
            gamma0: self.gamma0 / time_f,
            omega0: self.omega0 / time_f,
            tau0: self.tau0 * time_f,
            temperature: self.temperature * temp_f,
            cutoff: self.cutoff / time_f,
            classical: self.classical,
            units: target.clone(),
            consts: target.constants(),
            charge_derived: self.charge_derived,
        })
    }
}

/// Named-field parameter bundle consumed by [`make_params`]. Unset fields
/// take defaults: mass → the unit system's electron mass, friction,
/// frequency and temperature → 0, cutoff → 2mc²/ħ. Either `tau0` or
/// `charge` must be given.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub units: Option<UnitSystem>,
    pub m: Option<f64>,
    pub gamma0: Option<f64>,
    pub omega0: Option<f64>,
    pub tau0: Option<f64>,
    pub charge: Option<f64>,
    pub temperature: Option<f64>,
    pub cutoff: Option<f64>,
    pub classical: bool,
}

impl ParamSpec {
    /// Electron in natural units: ħ = m = c = 1, τ₀ = 2α/3, Ω = 2.
    pub fn natural_electron() -> Self {
        let consts = PhysicalConstants::natural();
        ParamSpec {
            units: Some(UnitSystem::natural()),
            charge: Some(consts.elementary_charge),
            ..Default::default()
        }
    }

    /// Electron in SI units.
    pub fn si_electron() -> Self {
        ParamSpec {
            units: Some(UnitSystem::si()),
            charge: Some(crate::constants::ELEMENTARY_CHARGE_SI),
            ..Default::default()
        }
    }

    /// Reduced units with every constant 1 and explicit oscillator values.
    pub fn reduced(m: f64, gamma0: f64, omega0: f64, tau0: f64, temperature: f64, cutoff: f64) -> Self {
        ParamSpec {
            units: Some(UnitSystem::reduced_unit()),
            m: Some(m),
            gamma0: Some(gamma0),
            omega0: Some(omega0),
            tau0: Some(tau0),
            temperature: Some(temperature),
            cutoff: Some(cutoff),
            ..Default::default()
        }
    }

    /// Overlays values from a key–value map (config file or flags). Keys not
    /// describing parameters are ignored so callers can share one map.
    pub fn apply_map(&mut self, map: &BTreeMap<String, String>) -> Result<()> {
        let mut scales = BTreeMap::new();
        let mut units_name: Option<&str> = None;
        for (key, raw) in map {
            let value = raw.trim();
            match key.as_str() {
                "units" => units_name = Some(value),
                "m" | "mass" => self.m = Some(parse_number("m", value)?),
                "gamma0" => self.gamma0 = Some(parse_number("gamma0", value)?),
                "omega0" => self.omega0 = Some(parse_number("omega0", value)?),
                "tau0" => self.tau0 = Some(parse_number("tau0", value)?),
                "charge" => self.charge = Some(parse_number("charge", value)?),
                "T" | "temperature" => self.temperature = Some(parse_number("temperature", value)?),
                "cutoff" => self.cutoff = Some(parse_number("cutoff", value)?),
                "classical" => {
                    self.classical = match value {
                        "true" | "1" | "yes" => true,
                        "false" | "0" | "no" => false,
                        other => {
                            return Err(Error::validation("classical", format!("expected a boolean, got `{other}`")))
                        }
                    }
                }
                "hbar" | "k_B" | "c" | "epsilon0" | "elementary_charge" | "electron_mass" => {
                    scales.insert(key.clone(), parse_number("units", value)?);
                }
                _ => {}
            }
        }
        if let Some(name) = units_name {
            let mut units = UnitSystem::from_name(name)?;
            if units.kind == UnitKind::Reduced {
                units = UnitSystem::reduced(scales)?;
            }
            self.units = Some(units);
        } else if !scales.is_empty() {
            self.units = Some(UnitSystem::reduced(scales)?);
        }
        Ok(())
    }
}

fn parse_number(field: &'static str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .map_err(|_| Error::validation(field, format!("not a number: `{value}`")))
}

/// Builds and validates [`EmitterParams`] from a [`ParamSpec`].
pub fn make_params(spec: &ParamSpec) -> Result<EmitterParams> {
    let units = spec.units.clone().unwrap_or_else(UnitSystem::natural);
    let consts = units.constants();
    consts.validate()?;
    let m = spec.m.unwrap_or(consts.electron_mass);
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::validation("m", format!("must be > 0, got {m}")));
    }
    let (tau0, from_charge) = match (spec.tau0, spec.charge) {
        (Some(t), _) => (t, false),
        (None, Some(q)) => (
            tau0_from_charge(q, m, &consts).map_err(|e| Error::validation("charge", e.to_string()))?,
            true,
        ),
        (None, None) => return Err(Error::validation("tau0", "give either tau0 or charge")),
    };
    let cutoff = match spec.cutoff {
        Some(c) => c,
        None => cutoff_frequency(m, &consts)?,
    };
    let params = EmitterParams {
        m,
        gamma0: spec.gamma0.unwrap_or(0.0),
        omega0: spec.omega0.unwrap_or(0.0),
        tau0,
        temperature: spec.temperature.unwrap_or(0.0),
        cutoff,
        classical: spec.classical,
        units,
        consts,
        charge_derived: from_charge && spec.cutoff.is_none(),
    };
    params.validate()?;
    Ok(params)
}

/// Parses the `key = value` config format: one pair per line, `#` starts a
/// comment, blank lines are skipped.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Input(format!("config line {}: expected `key = value`", lineno + 1)))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::Input(format!("config line {}: empty key", lineno + 1)));
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::ALPHA;
    use approx::assert_relative_eq;

    #[test]
    fn natural_electron_preset() {
        let p = make_params(&ParamSpec::natural_electron()).unwrap();
        assert_eq!(p.cutoff, 2.0);
        assert_relative_eq!(p.tau0, 2.0 * ALPHA / 3.0, max_relative = 1e-12);
        assert_relative_eq!(p.tau0, 4.8649e-3, max_relative = 1e-4);
        assert_relative_eq!(p.cutoff * p.tau0, 4.0 * ALPHA / 3.0, max_relative = 1e-12);
    }

    #[test]
    fn negative_friction_names_the_field() {
        let err = make_params(&ParamSpec::reduced(1.0, -1.0, 1.0, 0.0, 1.0, 1e3)).unwrap_err();
        match err {
            Error::Validation { field, .. } => assert_eq!(field, "gamma0"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_radiation_time_is_ordinary_brownian_oscillator() {
        let p = make_params(&ParamSpec::reduced(1.0, 0.1, 1.0, 0.0, 1.0, 1e3)).unwrap();
        assert_eq!(p.tau0, 0.0);
        assert_eq!(p.gamma_at_omega0(), 0.1);
    }

    #[test]
    fn missing_tau0_and_charge_is_rejected() {
        let spec = ParamSpec {
            units: Some(UnitSystem::reduced_unit()),
            ..Default::default()
        };
        assert!(matches!(make_params(&spec), Err(Error::Validation { field: "tau0", .. })));
    }

    #[test]
    fn si_natural_round_trip() {
        let mut spec = ParamSpec::si_electron();
        spec.gamma0 = Some(3.2e12);
        spec.omega0 = Some(7.5e14);
        spec.temperature = Some(300.0);
        let si = make_params(&spec).unwrap();
        let nat = si.to_units(&UnitSystem::natural()).unwrap();
        assert_relative_eq!(nat.m, 1.0, max_relative = 1e-12);
        assert_relative_eq!(nat.cutoff, 2.0, max_relative = 1e-12);
        let back = nat.to_units(&UnitSystem::si()).unwrap();
        for (a, b) in [
            (si.m, back.m),
            (si.gamma0, back.gamma0),
            (si.omega0, back.omega0),
            (si.tau0, back.tau0),
            (si.temperature, back.temperature),
            (si.cutoff, back.cutoff),
        ] {
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }
    }

    #[test]
    fn config_parsing_and_overlay() {
        let text = "# emitter\nunits = reduced\nm = 2 # kg-ish\n\ngamma0=0.5\ntau0 = 0.01\nT = 1\ncutoff = 100\nhbar = 1\nseed = 7\n";
        let map = parse_config(text).unwrap();
        assert_eq!(map["seed"], "7");
        let mut spec = ParamSpec::default();
        spec.apply_map(&map).unwrap();
        let p = make_params(&spec).unwrap();
        assert_eq!(p.m, 2.0);
        assert_eq!(p.gamma0, 0.5);
        assert_eq!(p.units.kind, UnitKind::Reduced);
        assert!(parse_config("novalue\n").is_err());
    }
}
