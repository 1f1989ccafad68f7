//! Adaptive Dormand–Prince 5(4) integration of polynomial fields with complex state.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::psalg::{VectorField, C64};

/// Sampled solution of `ẋ = X(x)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    /// Accepted step times, starting at 0.
    pub times: Vec<f64>,
    /// States at those times.
    pub states: Vec<Vec<C64>>,
}

impl Trajectory {
    /// Final state.
    pub fn last(&self) -> &[C64] {
        self.states.last().expect("trajectory has at least the initial point")
    }
}

/// Integration controls.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FlowOptions {
    /// Local error tolerance per unit time (mixed absolute and relative).
    pub tol: f64,
    /// Trajectories leaving the polydisc of this radius abort; `None` disables the check.
    pub escape_radius: Option<f64>,
    /// Smallest admissible step.
    pub min_step: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self { tol: 1e-10, escape_radius: None, min_step: 1e-12 }
    }
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy(x: &[C64], terms: &[(f64, &[C64])], h: f64) -> Vec<C64> {
    let mut out = x.to_vec();
    for (c, k) in terms {
        for (o, v) in out.iter_mut().zip(k.iter()) {
            *o += v * (c * h);
        }
    }
    out
}

/// Integrates `ẋ = X(x)` for a pure x-field from `x0` over `[0, t_end]`.
pub fn flow(x: &VectorField, x0: &[C64], t_end: f64, opts: &FlowOptions) -> Result<Trajectory> {
    if x.ring().p() != 0 {
        return Err(Error::InvalidInput("flow expects a pure x-field".into()));
    }
    if x0.len() != x.n() {
        return Err(Error::DimensionMismatch(format!("{} coordinates for n = {}", x0.len(), x.n())));
    }
    let f = |y: &[C64]| x.eval(y, &[]);
    let mut t = 0.0;
    let mut y = x0.to_vec();
    let mut traj = Trajectory { times: vec![0.0], states: vec![y.clone()] };
    let mut h = (t_end * 0.01).max(opts.min_step);
    let mut k1 = f(&y);
    while t < t_end {
        if t + h > t_end {
            h = t_end - t;
        }
        let k2 = f(&axpy(&y, &[(A21, &k1)], h));
        let k3 = f(&axpy(&y, &[(A31, &k1), (A32, &k2)], h));
        let k4 = f(&axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h));
        let k5 = f(&axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h));
        let k6 = f(&axpy(&y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], h));
        let y5 = axpy(&y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], h);
        let k7 = f(&y5);
        let err = (0..y.len())
            .map(|i| {
                let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
                let scale = opts.tol * (1.0 + y[i].norm().max(y5[i].norm()));
                e.norm() / scale
            })
            .fold(0.0, f64::max);
        if err <= 1.0 {
            t += h;
            y = y5;
            k1 = k7;
            traj.times.push(t);
            traj.states.push(y.clone());
            if let Some(rad) = opts.escape_radius {
                if y.iter().any(|v| v.norm() > rad) {
                    return Err(Error::FlowEscapedDomain { t, radius: rad });
                }
            }
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h < opts.min_step && t < t_end && t_end - t > opts.min_step {
            return Err(Error::StepUnderflow { t });
        }
    }
    Ok(traj)
}
