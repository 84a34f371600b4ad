//! The NDS spiking neuron: three-variable map with threshold reset, delayed
//! self-feedback `F(t)` and external input `In(t)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{FeedbackConfig, InputTrains, NdsParams, RunOutcome, State3, Trace};

/// `F(t) = Σ_j w_j γ(t - τ_j)`, with `γ` read as 0 before the trace begins.
pub fn feedback_signal(history: &Trace, feedback: &FeedbackConfig, t: usize) -> f64 {
    feedback
        .connections()
        .iter()
        .map(|c| c.weight * f64::from(history.gamma(t as i64 - c.delay as i64)))
        .sum()
}

/// `In(t) = Σ_j I_j(t)`; reads past the end of a train count as 0.
pub fn input_signal(inputs: &InputTrains, t: usize) -> f64 {
    inputs
        .trains()
        .iter()
        .map(|train| f64::from(train.get(t).copied().unwrap_or(0)))
        .sum()
}

/// One NDS step. Returns the next state and `γ(t + 1)`.
///
/// `x` and `y` follow the same update in both branches. When `u > theta` the
/// neuron fires and `u` resets to `eta0`; otherwise `u` evolves and the
/// feedback and input terms are added.
pub fn nds_step(s: State3, p: &NdsParams, feedback: f64, input: f64) -> Result<(State3, bool)> {
    let x = s.x + p.b * (-s.y - s.u);
    let y = s.y + p.c * (s.x + p.a * s.y);
    let (u, spike) = if s.u > p.theta {
        (p.eta0, true)
    } else {
        (
            s.u + p.d * (p.v + s.u * (-s.x) + p.k * s.u) + feedback + input,
            false,
        )
    };
    let next = State3::new(x, y, u);
    if next.is_divergent() {
        return Err(Error::Divergence { step: 1 });
    }
    Ok((next, spike))
}

/// Box from which random initial conditions are drawn: `x, y ∈ [-0.5, 0.5]`
/// and `u` between the reset value and the threshold.
pub fn random_initial_state(rng: &mut impl Rng) -> State3 {
    State3::new(
        rng.gen_range(-0.5..=0.5),
        rng.gen_range(-0.5..=0.5),
        rng.gen_range(-0.7..=-0.01),
    )
}

/// Draws a random initial state from a generator seeded with `seed`.
pub fn seeded_initial_state(seed: u64) -> State3 {
    random_initial_state(&mut ChaCha8Rng::seed_from_u64(seed))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum InitialCondition {
    Fixed(State3),
    /// Drawn with [`seeded_initial_state`] from the config's seed.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeuronRunConfig {
    pub params: NdsParams,
    pub feedback: FeedbackConfig,
    pub inputs: InputTrains,
    pub initial: InitialCondition,
    /// Feedback is held at zero for `t < transient_steps`.
    pub transient_steps: usize,
    pub total_steps: usize,
    pub seed: u64,
}

impl NeuronRunConfig {
    /// Free-running neuron: no feedback, no input, no transient gating.
    pub fn free_run(params: NdsParams, initial: InitialCondition, total_steps: usize, seed: u64) -> Self {
        Self {
            params,
            feedback: FeedbackConfig::none(),
            inputs: InputTrains::none(),
            initial,
            transient_steps: 0,
            total_steps,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.transient_steps > self.total_steps {
            return Err(Error::InvalidConfig(format!(
                "transient_steps ({}) exceeds total_steps ({})",
                self.transient_steps, self.total_steps
            )));
        }
        if let InitialCondition::Fixed(s) = self.initial {
            if !s.is_finite() {
                return Err(Error::InvalidConfig("initial state must be finite".into()));
            }
        }
        Ok(())
    }

    pub fn initial_state(&self) -> State3 {
        match self.initial {
            InitialCondition::Fixed(s) => s,
            InitialCondition::Random => seeded_initial_state(self.seed),
        }
    }
}

/// Runs the neuron and keeps the samples produced before any divergence.
///
/// The trace holds `total_steps + 1` samples on success; sample 0 is the
/// initial state with `γ(0) = 0`.
pub fn simulate_neuron(cfg: &NeuronRunConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let p = &cfg.params;
    let mut trace = Trace::with_capacity(0, cfg.total_steps + 1);
    let mut s = cfg.initial_state();
    if s.is_divergent() {
        return Ok(RunOutcome {
            trace,
            diverged_at: Some(0),
        });
    }
    trace.push(s, false)?;
    for t in 0..cfg.total_steps {
        let f = if t >= cfg.transient_steps {
            feedback_signal(&trace, &cfg.feedback, t)
        } else {
            0.0
        };
        let input = input_signal(&cfg.inputs, t);
        match nds_step(s, p, f, input) {
            Ok((next, spike)) => {
                trace.push(next, spike)?;
                s = next;
            }
            Err(_) => {
                return Ok(RunOutcome {
                    trace,
                    diverged_at: Some(t + 1),
                })
            }
        }
    }
    Ok(RunOutcome {
        trace,
        diverged_at: None,
    })
}

/// Runs the neuron; divergence is an error carrying the step index.
pub fn run_neuron(cfg: &NeuronRunConfig) -> Result<Trace> {
    simulate_neuron(cfg)?.into_result()
}

/// Inter-spike intervals of a trace, in steps.
pub fn inter_spike_intervals(trace: &Trace) -> Vec<usize> {
    trace.spike_times().windows(2).map(|w| w[1] - w[0]).collect()
}
