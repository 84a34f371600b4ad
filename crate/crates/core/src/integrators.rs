//! Continuous Rössler field, its RK4 reference integration, the Euler-forward
//! discrete Rössler map, the sign-flipped NDS-form map (no reset), and the
//! time-step bound.

use crate::error::{Error, Result};
use crate::types::{NdsParams, RosslerParams, RunOutcome, State3, Trace};

/// Step used for the Euler-forward discrete Rössler map.
pub const DISCRETE_ROSSLER_TS: f64 = 0.0055;

/// Step used when the Rössler constants are mapped into the NDS form for the
/// ensemble experiments.
pub const MAPPED_ENSEMBLE_TS: f64 = 0.015;

/// Step of the continuous reference integrator.
pub const REFERENCE_DT: f64 = 0.01;

/// Positive time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSize(f64);

impl StepSize {
    pub fn new(ts: f64) -> Result<Self> {
        if ts.is_finite() && ts > 0.0 {
            Ok(Self(ts))
        } else {
            Err(Error::NonPositive(ts))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Rössler vector field `(-y - u, x + a y, b + u (x - c))`.
pub fn rossler_derivative(s: State3, p: &RosslerParams) -> State3 {
    State3::new(-s.y - s.u, s.x + p.a * s.y, p.b + s.u * (s.x - p.c))
}

fn axpy(s: State3, h: f64, k: State3) -> State3 {
    State3::new(s.x + h * k.x, s.y + h * k.y, s.u + h * k.u)
}

/// One classical fourth-order Runge–Kutta step of the Rössler flow.
pub fn rk4_step(s: State3, p: &RosslerParams, dt: StepSize) -> State3 {
    let h = dt.get();
    let k1 = rossler_derivative(s, p);
    let k2 = rossler_derivative(axpy(s, 0.5 * h, k1), p);
    let k3 = rossler_derivative(axpy(s, 0.5 * h, k2), p);
    let k4 = rossler_derivative(axpy(s, h, k3), p);
    State3::new(
        s.x + h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
        s.y + h / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y),
        s.u + h / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u),
    )
}

/// Iterates `step` `n` times from `s0`, recording all `n + 1` states. Stops at
/// the first divergent state, which is not stored.
pub fn iterate_map<F>(s0: State3, n: usize, mut step: F) -> RunOutcome
where
    F: FnMut(State3) -> State3,
{
    let mut trace = Trace::with_capacity(0, n + 1);
    if s0.is_divergent() {
        return RunOutcome {
            trace,
            diverged_at: Some(0),
        };
    }
    trace.push(s0, false).expect("finite initial state");
    let mut s = s0;
    for t in 0..n {
        s = step(s);
        if s.is_divergent() {
            return RunOutcome {
                trace,
                diverged_at: Some(t + 1),
            };
        }
        trace.push(s, false).expect("checked finite");
    }
    RunOutcome {
        trace,
        diverged_at: None,
    }
}

/// RK4 reference trajectory of `n` steps (`n + 1` states).
pub fn integrate_reference(
    s0: State3,
    p: &RosslerParams,
    dt: StepSize,
    n: usize,
) -> Result<Trace> {
    if n == 0 {
        return Err(Error::InvalidConfig("step count must be >= 1".into()));
    }
    p.validate()?;
    iterate_map(s0, n, |s| rk4_step(s, p, dt)).into_result()
}

/// Euler-forward discrete Rössler map.
pub fn euler_discrete_rossler_step(s: State3, p: &RosslerParams, ts: StepSize) -> State3 {
    let h = ts.get();
    State3::new(
        s.x + h * (-s.y - s.u),
        s.y + h * (s.x + p.a * s.y),
        s.u + h * (p.b + s.u * (s.x - p.c)),
    )
}

pub fn iterate_discrete_rossler(
    s0: State3,
    p: &RosslerParams,
    ts: StepSize,
    n: usize,
) -> RunOutcome {
    iterate_map(s0, n, |s| euler_discrete_rossler_step(s, p, ts))
}

/// The NDS-form map with the sign of the `(x - k)` bracket flipped and no
/// reset: `u' = u + d (v + u (-x + k))`. Threshold and reset fields of `p`
/// are ignored.
pub fn nds_form_step(s: State3, p: &NdsParams) -> State3 {
    State3::new(
        s.x + p.b * (-s.y - s.u),
        s.y + p.c * (s.x + p.a * s.y),
        s.u + p.d * (p.v + s.u * (-s.x + p.k)),
    )
}

pub fn iterate_nds_form(s0: State3, p: &NdsParams, n: usize) -> RunOutcome {
    iterate_map(s0, n, |s| nds_form_step(s, p))
}

/// Largest step size that keeps the Euler map within a tenth of the fastest
/// linear time scale: `0.1 / |λ|max`.
pub fn ts_bound(lambda_max_abs: f64) -> Result<f64> {
    if !(lambda_max_abs > 0.0) || !lambda_max_abs.is_finite() {
        return Err(Error::NonPositive(lambda_max_abs));
    }
    Ok(0.1 / lambda_max_abs)
}
