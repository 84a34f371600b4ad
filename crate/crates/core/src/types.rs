//! Domain types shared by every module.
//!
//! All quantities are dimensionless `f64`. The third state variable is called
//! `u` everywhere, including the Rössler code paths where it takes the role of
//! the classical `z`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A trajectory is declared divergent once any coordinate exceeds this
/// magnitude (sup-norm).
pub const DIVERGENCE_THRESHOLD: f64 = 1e6;

/// Internal state `(x, y, u)` of the neuron or the Rössler system.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct State3 {
    pub x: f64,
    pub y: f64,
    pub u: f64,
}

impl State3 {
    pub const ZERO: State3 = State3 { x: 0.0, y: 0.0, u: 0.0 };

    pub const fn new(x: f64, y: f64, u: f64) -> Self {
        Self { x, y, u }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.u.is_finite()
    }

    /// `max(|x|, |y|, |u|)`
    pub fn sup_norm(&self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.u.abs())
    }

    /// Sup-norm distance between two states.
    pub fn distance(&self, other: &State3) -> f64 {
        (self.x - other.x)
            .abs()
            .max((self.y - other.y).abs())
            .max((self.u - other.u).abs())
    }

    /// True when the state is non-finite or beyond [`DIVERGENCE_THRESHOLD`].
    pub fn is_divergent(&self) -> bool {
        !self.is_finite() || self.sup_norm() > DIVERGENCE_THRESHOLD
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.u]
    }
}

impl From<[f64; 3]> for State3 {
    fn from(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }
}

fn check_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFiniteParameter { name, value })
    }
}

/// Parameters of the continuous Rössler system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RosslerParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Default for RosslerParams {
    fn default() -> Self {
        Self { a: 0.2, b: 0.2, c: 5.7 }
    }
}

impl RosslerParams {
    pub fn validate(&self) -> Result<()> {
        check_finite("a", self.a)?;
        check_finite("b", self.b)?;
        check_finite("c", self.c)
    }
}

/// Parameters of the NDS neuron.
///
/// `b`, `c` and `d` are the per-variable step sizes of the map, `theta` is the
/// spike threshold on `u` and `eta0` the value `u` is reset to after a spike.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NdsParams {
    pub a: f64,
    pub v: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub k: f64,
    pub theta: f64,
    pub eta0: f64,
}

impl Default for NdsParams {
    fn default() -> Self {
        Self {
            a: 0.002,
            v: 0.002,
            b: 0.03,
            c: 0.03,
            d: 0.8,
            k: -0.057,
            theta: -0.01,
            eta0: -0.7,
        }
    }
}

impl NdsParams {
    /// Rössler constants carried into the NDS form with a single step size
    /// `ts` for all three variables: `a = v = 0.2`, `b = c = d = ts`,
    /// `k = 5.7`. Threshold and reset keep their neuron defaults.
    pub fn rossler_mapped(ts: f64) -> Self {
        Self {
            a: 0.2,
            v: 0.2,
            b: ts,
            c: ts,
            d: ts,
            k: 5.7,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_finite("a", self.a)?;
        check_finite("v", self.v)?;
        check_finite("b", self.b)?;
        check_finite("c", self.c)?;
        check_finite("d", self.d)?;
        check_finite("k", self.k)?;
        check_finite("theta", self.theta)?;
        check_finite("eta0", self.eta0)
    }
}

pub fn default_rossler_params() -> RosslerParams {
    RosslerParams::default()
}

pub fn default_nds_params() -> NdsParams {
    NdsParams::default()
}

/// One delayed self-connection: contributes `weight * γ(t - delay)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeedbackConnection {
    pub weight: f64,
    pub delay: usize,
}

impl FeedbackConnection {
    pub fn new(weight: f64, delay: usize) -> Result<Self> {
        check_finite("weight", weight)?;
        if delay == 0 {
            return Err(Error::InvalidConfig("feedback delay must be >= 1".into()));
        }
        Ok(Self { weight, delay })
    }
}

/// The set of delayed self-connections realising `F(t)`. Empty means
/// `F(t) = 0`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FeedbackConfig {
    connections: Vec<FeedbackConnection>,
}

impl FeedbackConfig {
    pub fn new(connections: Vec<FeedbackConnection>) -> Result<Self> {
        for c in &connections {
            FeedbackConnection::new(c.weight, c.delay)?;
        }
        Ok(Self { connections })
    }

    pub fn none() -> Self {
        Self::default()
    }

    pub fn single(weight: f64, delay: usize) -> Result<Self> {
        Ok(Self {
            connections: vec![FeedbackConnection::new(weight, delay)?],
        })
    }

    pub fn connections(&self) -> &[FeedbackConnection] {
        &self.connections
    }

    pub fn is_empty(&self) -> bool {
        self.connections.is_empty()
    }

    /// Same delays, every weight multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            connections: self
                .connections
                .iter()
                .map(|c| FeedbackConnection {
                    weight: c.weight * factor,
                    delay: c.delay,
                })
                .collect(),
        }
    }
}

/// External binary spike trains `I_j(t)`, all of equal length.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct InputTrains {
    trains: Vec<Vec<u8>>,
}

impl InputTrains {
    pub fn new(trains: Vec<Vec<u8>>) -> Result<Self> {
        if let Some(first) = trains.first() {
            if trains.iter().any(|t| t.len() != first.len()) {
                return Err(Error::InvalidConfig(
                    "input trains must all have the same length".into(),
                ));
            }
        }
        if trains.iter().flatten().any(|&bit| bit > 1) {
            return Err(Error::InvalidConfig("input trains must be binary".into()));
        }
        Ok(Self { trains })
    }

    pub fn none() -> Self {
        Self::default()
    }

    pub fn trains(&self) -> &[Vec<u8>] {
        &self.trains
    }

    pub fn is_empty(&self) -> bool {
        self.trains.is_empty()
    }
}

/// Time-indexed states with the binary output aligned to the same index:
/// `spikes[i]` is `γ(start_index + i)`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Trace {
    states: Vec<State3>,
    spikes: Vec<bool>,
    start_index: usize,
}

impl Trace {
    pub fn new(start_index: usize) -> Self {
        Self {
            states: Vec::new(),
            spikes: Vec::new(),
            start_index,
        }
    }

    pub fn with_capacity(start_index: usize, capacity: usize) -> Self {
        Self {
            states: Vec::with_capacity(capacity),
            spikes: Vec::with_capacity(capacity),
            start_index,
        }
    }

    /// Appends one sample. Non-finite states are refused so a stored trace is
    /// always finite.
    pub fn push(&mut self, state: State3, spike: bool) -> Result<()> {
        if !state.is_finite() {
            return Err(Error::Divergence {
                step: self.start_index + self.states.len(),
            });
        }
        self.states.push(state);
        self.spikes.push(spike);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn start_index(&self) -> usize {
        self.start_index
    }

    pub fn states(&self) -> &[State3] {
        &self.states
    }

    pub fn spikes(&self) -> &[bool] {
        &self.spikes
    }

    pub fn last(&self) -> Option<&State3> {
        self.states.last()
    }

    /// `γ(t)` for an absolute time index; indices outside the stored range
    /// (including negative ones) read as 0.
    pub fn gamma(&self, t: i64) -> u8 {
        let rel = t - self.start_index as i64;
        if rel < 0 {
            return 0;
        }
        self.spikes.get(rel as usize).map_or(0, |&s| s as u8)
    }

    pub fn spike_count(&self) -> usize {
        self.spikes.iter().filter(|&&s| s).count()
    }

    /// Absolute time indices at which `γ = 1`.
    pub fn spike_times(&self) -> Vec<usize> {
        self.spikes
            .iter()
            .enumerate()
            .filter(|(_, &s)| s)
            .map(|(i, _)| self.start_index + i)
            .collect()
    }

    /// Copy of the samples from absolute index `from` onward.
    pub fn since(&self, from: usize) -> Trace {
        let rel = from.saturating_sub(self.start_index).min(self.len());
        Trace {
            states: self.states[rel..].to_vec(),
            spikes: self.spikes[rel..].to_vec(),
            start_index: self.start_index + rel,
        }
    }

    /// Iterator over `(t, state, γ)`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &State3, bool)> + '_ {
        self.states
            .iter()
            .zip(&self.spikes)
            .enumerate()
            .map(move |(i, (s, &g))| (self.start_index + i, s, g))
    }
}

/// Result of iterating a map that may leave the bounded region: the samples
/// produced so far and the step at which divergence was detected, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub trace: Trace,
    pub diverged_at: Option<usize>,
}

impl RunOutcome {
    pub fn into_result(self) -> Result<Trace> {
        match self.diverged_at {
            Some(step) => Err(Error::Divergence { step }),
            None => Ok(self.trace),
        }
    }
}
