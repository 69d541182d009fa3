//! Adaptive Gauss–Kronrod quadrature and the helpers used for the
//! moment integrals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

// 15-point Kronrod nodes and weights, 7-point Gauss weights (on [-1, 1]).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureRule {
    AdaptiveGaussKronrod,
    TrapezoidLogGrid,
}

/// Quadrature settings: the rule, relative tolerance in (0, 1e-2] and an
/// evaluation budget of at least 100.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rule: QuadratureRule,
    pub rel_tol: f64,
    pub max_evals: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rule: QuadratureRule::AdaptiveGaussKronrod,
            rel_tol: 1e-10,
            max_evals: 200_000,
        }
    }
}

impl QuadratureSpec {
    pub fn new(rule: QuadratureRule, rel_tol: f64, max_evals: usize) -> Result<Self> {
        let spec = QuadratureSpec { rule, rel_tol, max_evals };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-2) {
            return Err(Error::validation("rel_tol", format!("must lie in (0, 1e-2], got {}", self.rel_tol)));
        }
        if self.max_evals < 100 {
            return Err(Error::validation("max_evals", "must be >= 100"));
        }
        Ok(())
    }

    /// Integrates `f` over [a, b] with the configured rule.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<Estimate> {
        self.validate()?;
        match self.rule {
            QuadratureRule::AdaptiveGaussKronrod => adaptive_gk(&f, a, b, 0.0, self.rel_tol, self.max_evals),
            QuadratureRule::TrapezoidLogGrid => trapezoid_log(&f, a, b, self.rel_tol, self.max_evals),
        }
    }
}

/// An integral value with its error estimate and evaluation count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
}

impl std::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, o: Estimate) -> Estimate {
        Estimate {
            value: self.value + o.value,
            error: self.error + o.error,
            evals: self.evals + o.evals,
        }
    }
}

impl Estimate {
    pub(crate) fn zero() -> Self {
        Estimate { value: 0.0, error: 0.0, evals: 0 }
    }
}

/// Single 15-point Kronrod panel with the embedded Gauss error estimate.
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Estimate {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = kronrod.abs();
    let mut fv = [0.0; 14];
    for j in 0..7 {
        let dx = half * XGK[j];
        let (f1, f2) = (f(center - dx), f(center + dx));
        fv[2 * j] = f1;
        fv[2 * j + 1] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = kronrod * 0.5;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv[2 * j] - mean).abs() + (fv[2 * j + 1] - mean).abs());
    }
    let value = kronrod * half;
    let asc = asc * half.abs();
    let abs_sum = abs_sum * half.abs();
    // QUADPACK error heuristic
    let mut err = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    if abs_sum > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * abs_sum);
    }
    Estimate { value, error: err, evals: 15 }
}

struct Panel {
    a: f64,
    b: f64,
    est: Estimate,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.est.error == other.est.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est.error.partial_cmp(&other.est.error).unwrap_or(Ordering::Equal)
    }
}

/// Globally adaptive G7–K15 bisection. Fails with [`Error::Quadrature`] if
/// the tolerance max(abs_tol, rel_tol·|I|) is not met within `max_evals`.
pub fn adaptive_gk<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_evals: usize,
) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate::zero());
    }
    let first = gk15(f, a, b);
    let mut total = first;
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, est: first });
    loop {
        if !total.value.is_finite() {
            return Err(Error::Scheme(format!("integrand not finite on [{a}, {b}]")));
        }
        let tol = abs_tol.max(rel_tol * total.value.abs());
        if total.error <= tol {
            return Ok(total);
        }
        if total.evals + 30 > max_evals {
            return Err(Error::Quadrature {
                achieved: total.error,
                requested: tol,
            });
        }
        let worst = heap.pop().expect("heap holds every panel");
        let mid = 0.5 * (worst.a + worst.b);
        let left = gk15(f, worst.a, mid);
        let right = gk15(f, mid, worst.b);
        total.value += left.value + right.value - worst.est.value;
        total.error += left.error + right.error - worst.est.error;
        total.error = total.error.max(0.0);
        total.evals += 30;
        heap.push(Panel { a: worst.a, b: mid, est: left });
        heap.push(Panel { a: mid, b: worst.b, est: right });
    }
}

/// Composite trapezoid rule on a geometric grid in ω, refined by doubling
/// until two successive estimates agree to `rel_tol`. Requires a > 0.
fn trapezoid_log<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64, max_evals: usize) -> Result<Estimate> {
    if !(a > 0.0 && b > a) {
        return Err(Error::Input("the log-grid trapezoid rule needs 0 < a < b".into()));
    }
    // substitute ω = e^u: ∫ f(ω) dω = ∫ f(e^u) e^u du
    let (ua, ub) = (a.ln(), b.ln());
    let g = |u: f64| {
        let w = u.exp();
        f(w) * w
    };
    let mut n = 16usize;
    let mut h = (ub - ua) / n as f64;
    let mut sum = 0.5 * (g(ua) + g(ub)) + (1..n).map(|i| g(ua + i as f64 * h)).sum::<f64>();
    let mut evals = n + 1;
    let mut prev = sum * h;
    loop {
        // add midpoints
        let mids: f64 = (0..n).map(|i| g(ua + (i as f64 + 0.5) * h)).sum();
        evals += n;
        sum += mids;
        n *= 2;
        h *= 0.5;
        let cur = sum * h;
        let err = (cur - prev).abs() / 3.0;
        if err <= rel_tol * cur.abs() {
            return Ok(Estimate { value: cur, error: err, evals });
        }
        if evals + 2 * n > max_evals {
            return Err(Error::Quadrature {
                achieved: err / cur.abs().max(f64::MIN_POSITIVE),
                requested: rel_tol,
            });
        }
        prev = cur;
    }
}

/// ∫ₐᵇ g(ω) cos(ωt) dω for a smooth, slowly varying g and large ωt.
///
/// The range is cut at multiples of the period 2π/t so every panel holds one
/// full oscillation; each panel is integrated adaptively and the panel
/// results are summed. Tolerance is absolute, relative to `scale`.
pub fn oscillatory_cos<F: Fn(f64) -> f64>(
    g: &F,
    t: f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    max_evals: usize,
) -> Result<Estimate> {
    if !(t > 0.0) {
        return adaptive_gk(g, a, b, abs_tol, 0.0, max_evals);
    }
    let period = 2.0 * std::f64::consts::PI / t;
    let panels = ((b - a) / period).ceil().max(1.0) as usize;
    let per_panel_tol = abs_tol / panels as f64;
    let integrand = |w: f64| g(w) * (w * t).cos();
    let mut total = Estimate::zero();
    let mut lo = a;
    for k in 0..panels {
        let hi = if k + 1 == panels { b } else { a + (k + 1) as f64 * period };
        let budget = max_evals.saturating_sub(total.evals).max(30);
        total = total + adaptive_gk(&integrand, lo, hi, per_panel_tol, 0.0, budget)?;
        lo = hi;
    }
    Ok(total)
}
