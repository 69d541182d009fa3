//! Adaptive Dormand–Prince 5(4) integrator for small first-order systems.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights (equal to the last row of A).
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

const MAX_STEPS: usize = 10_000_000;

/// How an integration ended.
#[derive(Debug, Clone, PartialEq)]
pub enum OdeOutcome {
    Completed,
    /// The step callback asked to stop at this time.
    Stopped { t: f64, reason: String },
}

/// Integrates y′ = f(t, y) from `t0` through each time in `outputs`
/// (increasing, ≥ t0), returning the state at each one reached.
///
/// `on_step(t, y, dy)` sees every accepted step and may return a reason to
/// stop early.
pub fn dormand_prince<F, S>(
    f: F,
    t0: f64,
    y0: &[f64],
    outputs: &[f64],
    rtol: f64,
    atol: f64,
    mut on_step: S,
) -> Result<(Vec<Vec<f64>>, OdeOutcome)>
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
    S: FnMut(f64, &[f64], &[f64]) -> Option<String>,
{
    if !(rtol > 0.0 && atol > 0.0) {
        return Err(Error::validation("tolerance", "rtol and atol must be > 0"));
    }
    if outputs.windows(2).any(|w| w[1] < w[0]) || outputs.first().is_some_and(|&t| t < t0) {
        return Err(Error::validation("t_span", "output times must increase from t0"));
    }
    let n = y0.len();
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    k[0] = f(t, &y);
    let span = outputs.last().map_or(0.0, |&t1| t1 - t0);
    let mut h = if span > 0.0 { span * 1e-6 } else { 0.0 };
    let mut results = Vec::with_capacity(outputs.len());
    let mut steps = 0usize;

    for &target in outputs {
        while target - t > 1e-14 * target.abs().max(1.0) {
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::Scheme(format!("step budget exhausted at t = {t}")));
            }
            let last = h >= target - t;
            let step = if last { target - t } else { h };
            let mut y_stage = vec![0.0; n];
            for s in 1..7 {
                for (d, ys) in y_stage.iter_mut().enumerate() {
                    *ys = y[d] + step * (0..s).map(|r| A[s][r] * k[r][d]).sum::<f64>();
                }
                k[s] = f(t + C[s] * step, &y_stage);
            }
            // y_stage now holds the fifth-order solution (FSAL)
            let mut err: f64 = 0.0;
            for d in 0..n {
                let y4 = y[d] + step * (0..7).map(|r| B4[r] * k[r][d]).sum::<f64>();
                let y5 = y[d] + step * (0..7).map(|r| B5[r] * k[r][d]).sum::<f64>();
                let scale = atol + rtol * y[d].abs().max(y5.abs());
                err = err.max(((y5 - y4) / scale).abs());
            }
            if !err.is_finite() {
                return Err(Error::Scheme(format!("non-finite state near t = {t}")));
            }
            if err <= 1.0 {
                t = if last { target } else { t + step };
                y = y_stage.clone();
                k[0] = k[6].clone();
                if let Some(reason) = on_step(t, &y, &k[0]) {
                    return Ok((results, OdeOutcome::Stopped { t, reason }));
                }
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 && last {
                // keep the unclipped step for the next interval
                h = h.max(step * factor.min(1.0));
            } else {
                h = step * factor;
            }
            if h < 1e-14 * t.abs().max(1e-300) {
                return Err(Error::Scheme(format!("step size underflow at t = {t}")));
            }
        }
        results.push(y.clone());
    }
    Ok((results, OdeOutcome::Completed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let outs = [0.5, 1.0, 2.0];
        let (ys, outcome) = dormand_prince(|_, y| vec![-y[0]], 0.0, &[1.0], &outs, 1e-10, 1e-14, |_, _, _| None).unwrap();
        assert_eq!(outcome, OdeOutcome::Completed);
        for (y, t) in ys.iter().zip(outs) {
            assert!((y[0] - (-t).exp()).abs() < 1e-9);
        }
    }

    #[test]
    fn harmonic_oscillator_energy() {
        let t1 = 20.0 * std::f64::consts::PI;
        let (ys, _) = dormand_prince(|_, y| vec![y[1], -y[0]], 0.0, &[1.0, 0.0], &[t1], 1e-11, 1e-13, |_, _, _| None).unwrap();
        assert!((ys[0][0] - 1.0).abs() < 1e-8);
        assert!(ys[0][1].abs() < 1e-8);
    }

    #[test]
    fn callback_can_stop() {
        let (ys, outcome) =
            dormand_prince(|_, _| vec![1.0], 0.0, &[0.0], &[1.0, 2.0], 1e-8, 1e-12, |_, y, _| (y[0] > 1.5).then(|| "big".to_string()))
                .unwrap();
        assert_eq!(ys.len(), 1);
        assert!(matches!(outcome, OdeOutcome::Stopped { .. }));
    }
}
