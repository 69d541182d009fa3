//! External potentials U(x) in one dimension.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A 1-D potential with analytic first and second derivatives.
///
/// * `Harmonic`: U = m ω₀² x² / 2
/// * `Polynomial`: U = Σ cₖ xᵏ
/// * `DoubleWell`: U = a x⁴ − b x²
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum Potential {
    Harmonic { mass: f64, omega0: f64 },
    Polynomial { coefficients: Vec<f64> },
    DoubleWell { a: f64, b: f64 },
}

impl Potential {
    pub fn harmonic(mass: f64, omega0: f64) -> Self {
        Potential::Harmonic { mass, omega0 }
    }

    pub fn free() -> Self {
        Potential::Polynomial { coefficients: vec![0.0] }
    }

    /// Parses `harmonic[:omega0=W]`, `poly:c0,c1,...` or `doublewell:a,b`.
    /// The harmonic form takes its mass, and its frequency when omitted,
    /// from the emitter.
    pub fn parse(spec: &str, mass: f64, default_omega0: f64) -> Result<Self> {
        let (form, args) = spec.split_once(':').unwrap_or((spec, ""));
        let numbers = |s: &str| -> Result<Vec<f64>> {
            s.split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::validation("potential", format!("not a number: `{t}`")))
                })
                .collect()
        };
        match form {
            "harmonic" => {
                let omega0 = if args.is_empty() {
                    default_omega0
                } else {
                    let value = args.strip_prefix("omega0=").unwrap_or(args);
                    value
                        .trim()
                        .parse::<f64>()
                        .map_err(|_| Error::validation("potential", format!("bad omega0 `{value}`")))?
                };
                Ok(Potential::harmonic(mass, omega0))
            }
            "poly" | "polynomial" => {
                let coefficients = numbers(args)?;
                if coefficients.is_empty() {
                    return Err(Error::validation("potential", "poly needs at least one coefficient"));
                }
                Ok(Potential::Polynomial { coefficients })
            }
            "free" => Ok(Potential::free()),
            "doublewell" => match numbers(args)?.as_slice() {
                [a, b] => Ok(Potential::DoubleWell { a: *a, b: *b }),
                _ => Err(Error::validation("potential", "doublewell needs `a,b`")),
            },
            other => Err(Error::validation(
                "potential",
                format!("unknown potential `{other}` (harmonic|poly|doublewell|free)"),
            )),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            Potential::Harmonic { mass, omega0 } => 0.5 * mass * omega0 * omega0 * x * x,
            Potential::Polynomial { coefficients } => coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c),
            Potential::DoubleWell { a, b } => a * x.powi(4) - b * x * x,
        }
    }

    /// U′(x)
    pub fn gradient(&self, x: f64) -> f64 {
        match self {
            Potential::Harmonic { mass, omega0 } => mass * omega0 * omega0 * x,
            Potential::Polynomial { coefficients } => coefficients
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (k, c)| acc * x + k as f64 * c),
            Potential::DoubleWell { a, b } => 4.0 * a * x.powi(3) - 2.0 * b * x,
        }
    }

    /// U″(x)
    pub fn curvature(&self, x: f64) -> f64 {
        match self {
            Potential::Harmonic { mass, omega0 } => mass * omega0 * omega0,
            Potential::Polynomial { coefficients } => coefficients
                .iter()
                .enumerate()
                .skip(2)
                .rev()
                .fold(0.0, |acc, (k, c)| acc * x + (k * (k - 1)) as f64 * c),
            Potential::DoubleWell { a, b } => 12.0 * a * x * x - 2.0 * b,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_forms() {
        assert_eq!(Potential::parse("harmonic:omega0=2", 3.0, 1.0).unwrap(), Potential::harmonic(3.0, 2.0));
        assert_eq!(Potential::parse("harmonic", 3.0, 1.5).unwrap(), Potential::harmonic(3.0, 1.5));
        assert_eq!(
            Potential::parse("poly:0,0,0.5", 1.0, 1.0).unwrap(),
            Potential::Polynomial { coefficients: vec![0.0, 0.0, 0.5] }
        );
        assert_eq!(Potential::parse("doublewell:1,2", 1.0, 1.0).unwrap(), Potential::DoubleWell { a: 1.0, b: 2.0 });
        assert!(Potential::parse("doublewell:1", 1.0, 1.0).is_err());
        assert!(Potential::parse("morse:1", 1.0, 1.0).is_err());
    }

    #[test]
    fn harmonic_as_polynomial() {
        let h = Potential::harmonic(2.0, 3.0);
        let p = Potential::Polynomial { coefficients: vec![0.0, 0.0, 9.0] };
        for x in [-1.3, 0.0, 0.4, 2.0] {
            assert!((h.value(x) - p.value(x)).abs() < 1e-12);
            assert!((h.gradient(x) - p.gradient(x)).abs() < 1e-12);
            assert!((h.curvature(x) - p.curvature(x)).abs() < 1e-12);
        }
    }

    fn fd_consistent(u: &Potential) {
        let h = 1e-4;
        for i in 0..=40 {
            let x = -2.0 + 0.1 * i as f64;
            let d1 = (u.value(x + h) - u.value(x - h)) / (2.0 * h);
            let d2 = (u.gradient(x + h) - u.gradient(x - h)) / (2.0 * h);
            let g = u.gradient(x);
            let c = u.curvature(x);
            assert!((d1 - g).abs() <= 1e-6 * g.abs().max(1.0), "U' at {x}: {d1} vs {g}");
            assert!((d2 - c).abs() <= 1e-6 * c.abs().max(1.0), "U'' at {x}: {d2} vs {c}");
        }
    }

    proptest! {
        #[test]
        fn derivatives_match_central_differences(
            c in proptest::collection::vec(-2.0f64..2.0, 1..6),
            a in 0.01f64..2.0,
            b in 0.0f64..2.0,
            w in 0.1f64..3.0,
        ) {
            fd_consistent(&Potential::Polynomial { coefficients: c });
            fd_consistent(&Potential::DoubleWell { a, b });
            fd_consistent(&Potential::harmonic(1.0, w));
        }
    }
}
