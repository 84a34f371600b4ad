//! Detection of stabilised periodic orbits and the batch protocols built on
//! it: ensembles over a feedback grid, one-parameter validity sweeps, and the
//! feedback calibration sweep.
//!
//! Every run follows the same protocol: random initial condition, feedback
//! held off for a transient, then closed-loop self-feedback until the end of
//! the run, and finally a recurrence check over the last window of states.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::neuron::{simulate_neuron, InitialCondition, NeuronRunConfig};
use crate::types::{FeedbackConfig, FeedbackConnection, InputTrains, NdsParams, Trace};

/// Recurrence tolerance (sup-norm on the state).
pub const DEFAULT_EPS: f64 = 1e-3;
pub const DEFAULT_CHECK_WINDOW: usize = 1000;
pub const DEFAULT_P_MAX: usize = 200;

/// Signature coordinates are rounded to this many decimals.
pub const SIGNATURE_DECIMALS: i32 = 3;

/// Sweep probes must stay within this box to count as bounded.
pub const ATTRACTOR_BOUND: f64 = 100.0;

/// Minimum post-transient per-coordinate variance for a non-degenerate
/// attractor.
pub const VARIANCE_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionConfig {
    pub check_window: usize,
    pub p_max: usize,
    pub eps: f64,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        Self {
            check_window: DEFAULT_CHECK_WINDOW,
            p_max: DEFAULT_P_MAX,
            eps: DEFAULT_EPS,
        }
    }
}

/// Transient length, run length and detection settings shared by every run
/// of an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub transient_steps: usize,
    pub total_steps: usize,
    pub detection: DetectionConfig,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            transient_steps: 1000,
            total_steps: 10_000,
            detection: DetectionConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodDetection {
    pub period: Option<usize>,
    /// Largest recurrence distance over the window for the returned period,
    /// or the smallest such distance over all candidates when none passed.
    pub residual: f64,
    pub window: usize,
}

/// Largest `‖s(t) - s(t-p)‖∞` over the last `window` samples, abandoning the
/// scan once it reaches `cutoff`.
fn recurrence_distance(states: &[crate::State3], window: usize, p: usize, cutoff: f64) -> f64 {
    let n = states.len();
    let mut worst = 0.0f64;
    for t in n - window..n {
        worst = worst.max(states[t].distance(&states[t - p]));
        if worst >= cutoff {
            break;
        }
    }
    worst
}

/// Smallest `p ∈ [1, p_max]` such that every state in the final
/// `check_window` samples lies within `eps` of the state `p` steps earlier.
pub fn detect_period(trace: &Trace, cfg: &DetectionConfig) -> Result<PeriodDetection> {
    let required = cfg.check_window + cfg.p_max;
    if trace.len() < required || cfg.check_window == 0 || cfg.p_max == 0 {
        return Err(Error::TraceTooShort {
            len: trace.len(),
            required: required.max(1),
        });
    }
    let states = trace.states();
    let mut best = f64::INFINITY;
    for p in 1..=cfg.p_max {
        let d = recurrence_distance(states, cfg.check_window, p, best.max(cfg.eps));
        if d < cfg.eps {
            return Ok(PeriodDetection {
                period: Some(p),
                residual: d,
                window: cfg.check_window,
            });
        }
        best = best.min(d);
    }
    Ok(PeriodDetection {
        period: None,
        residual: best,
        window: cfg.check_window,
    })
}

/// Canonical description of one stabilised orbit: its period and the final
/// period of states, rotated to a canonical phase and rounded to the
/// signature grid.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrbitSignature {
    pub period: usize,
    pub samples: Vec<[i64; 3]>,
}

fn round_to_grid(v: f64) -> i64 {
    (v * 10f64.powi(SIGNATURE_DECIMALS)).round() as i64
}

/// Builds the signature of the last `period` samples of `trace`.
///
/// The sequence is rotated to start at a spike step; when the period holds
/// several spikes, the rotation with the lexicographically smallest rounded
/// sequence wins. Periods without spikes start at the minimum-`u` step.
pub fn orbit_signature(trace: &Trace, period: usize) -> OrbitSignature {
    assert!(period >= 1 && period <= trace.len(), "period out of range");
    let n = trace.len();
    let states = &trace.states()[n - period..];
    let spikes = &trace.spikes()[n - period..];
    let rounded: Vec<[i64; 3]> = states
        .iter()
        .map(|s| [round_to_grid(s.x), round_to_grid(s.y), round_to_grid(s.u)])
        .collect();

    let mut starts: Vec<usize> = (0..period).filter(|&i| spikes[i]).collect();
    if starts.is_empty() {
        let min_u = rounded.iter().map(|r| r[2]).min().expect("non-empty period");
        starts = (0..period).filter(|&i| rounded[i][2] == min_u).collect();
    }
    let rotate = |start: usize| -> Vec<[i64; 3]> {
        rounded[start..].iter().chain(&rounded[..start]).copied().collect()
    };
    let samples = starts
        .into_iter()
        .map(rotate)
        .min()
        .expect("at least one rotation");
    OrbitSignature { period, samples }
}

/// Number of spikes in the final `period` samples.
pub fn spikes_in_final_period(trace: &Trace, period: usize) -> usize {
    let n = trace.len();
    trace.spikes()[n.saturating_sub(period)..]
        .iter()
        .filter(|&&s| s)
        .count()
}

/// Per-run seed derived from the master seed and run index (SplitMix64
/// finaliser over both).
pub fn derive_run_seed(master: u64, index: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    mix(master ^ mix(index))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum RunSummary {
    Diverged { step: usize },
    Unstabilized,
    Stabilized {
        period: usize,
        spikes_per_period: usize,
        signature: OrbitSignature,
    },
}

impl RunSummary {
    pub fn period(&self) -> Option<usize> {
        match self {
            RunSummary::Stabilized { period, .. } => Some(*period),
            _ => None,
        }
    }
}

/// The neuron configuration one protocol run uses.
pub fn protocol_config(
    params: &NdsParams,
    connection: Option<FeedbackConnection>,
    seed: u64,
    protocol: &ProtocolConfig,
) -> NeuronRunConfig {
    NeuronRunConfig {
        params: *params,
        feedback: FeedbackConfig::new(connection.into_iter().collect())
            .expect("connections validated on construction"),
        inputs: InputTrains::none(),
        initial: InitialCondition::Random,
        transient_steps: protocol.transient_steps,
        total_steps: protocol.total_steps,
        seed,
    }
}

/// Classifies a completed trace.
pub fn summarize_trace(trace: &Trace, detection: &DetectionConfig) -> Result<RunSummary> {
    let det = detect_period(trace, detection)?;
    Ok(match det.period {
        Some(period) => RunSummary::Stabilized {
            period,
            spikes_per_period: spikes_in_final_period(trace, period),
            signature: orbit_signature(trace, period),
        },
        None => RunSummary::Unstabilized,
    })
}

/// One run of the protocol from a random initial condition drawn with `seed`.
pub fn protocol_run(
    params: &NdsParams,
    connection: Option<FeedbackConnection>,
    seed: u64,
    protocol: &ProtocolConfig,
) -> Result<RunSummary> {
    let cfg = protocol_config(params, connection, seed, protocol);
    let out = simulate_neuron(&cfg)?;
    match out.diverged_at {
        Some(step) => Ok(RunSummary::Diverged { step }),
        None => summarize_trace(&out.trace, &protocol.detection),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub setup_name: String,
    pub runs: usize,
    pub stabilized_runs: usize,
    pub unstabilized_runs: usize,
    pub diverged_runs: usize,
    pub distinct_upos: usize,
    /// Detected period → number of stabilised runs with that period.
    pub period_histogram: BTreeMap<usize, usize>,
}

impl EnsembleResult {
    /// Folds run summaries into counts. Signatures are collected in an ordered
    /// set, so the result does not depend on run order.
    pub fn aggregate(setup_name: &str, summaries: &[RunSummary]) -> Self {
        let mut result = EnsembleResult {
            setup_name: setup_name.to_string(),
            runs: summaries.len(),
            stabilized_runs: 0,
            unstabilized_runs: 0,
            diverged_runs: 0,
            distinct_upos: 0,
            period_histogram: BTreeMap::new(),
        };
        let mut signatures = BTreeSet::new();
        for s in summaries {
            match s {
                RunSummary::Diverged { .. } => result.diverged_runs += 1,
                RunSummary::Unstabilized => result.unstabilized_runs += 1,
                RunSummary::Stabilized {
                    period, signature, ..
                } => {
                    result.stabilized_runs += 1;
                    *result.period_histogram.entry(*period).or_default() += 1;
                    signatures.insert(signature);
                }
            }
        }
        result.distinct_upos = signatures.len();
        result
    }
}

/// The feedback grid for ensembles: a fixed weight with delays `1..=max_delay`.
pub fn delay_cycle_grid(weight: f64, max_delay: usize) -> Result<Vec<FeedbackConnection>> {
    (1..=max_delay)
        .map(|tau| FeedbackConnection::new(weight, tau))
        .collect()
}

/// Runs `runs` protocol runs of `setup`. Run `i` uses feedback connection
/// `grid[i % grid.len()]` and the initial-condition seed
/// `derive_run_seed(seed, i)`.
pub fn run_ensemble(
    setup_name: &str,
    setup: &NdsParams,
    grid: &[FeedbackConnection],
    runs: usize,
    seed: u64,
    protocol: &ProtocolConfig,
    exec: Execution,
) -> Result<EnsembleResult> {
    if runs == 0 {
        return Err(Error::InvalidConfig("runs must be >= 1".into()));
    }
    if grid.is_empty() {
        return Err(Error::InvalidConfig("feedback grid is empty".into()));
    }
    setup.validate()?;
    let summaries = exec
        .map_indexed(runs, |i| {
            protocol_run(
                setup,
                Some(grid[i % grid.len()]),
                derive_run_seed(seed, i as u64),
                protocol,
            )
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(EnsembleResult::aggregate(setup_name, &summaries))
}

/// Parameters a validity sweep can vary. Paired parameters move together.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepParameter {
    AV,
    BC,
    D,
    K,
}

impl SweepParameter {
    pub fn label(self) -> &'static str {
        match self {
            SweepParameter::AV => "a&v",
            SweepParameter::BC => "b&c",
            SweepParameter::D => "d",
            SweepParameter::K => "k",
        }
    }

    pub fn apply(self, base: &NdsParams, value: f64) -> NdsParams {
        let mut p = *base;
        match self {
            SweepParameter::AV => {
                p.a = value;
                p.v = value;
            }
            SweepParameter::BC => {
                p.b = value;
                p.c = value;
            }
            SweepParameter::D => p.d = value,
            SweepParameter::K => p.k = value,
        }
        p
    }

    pub fn value_in(self, p: &NdsParams) -> f64 {
        match self {
            SweepParameter::AV => p.a,
            SweepParameter::BC => p.b,
            SweepParameter::D => p.d,
            SweepParameter::K => p.k,
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a&v" | "av" | "a,v" | "a" | "v" => Ok(SweepParameter::AV),
            "b&c" | "bc" | "b,c" | "b" | "c" => Ok(SweepParameter::BC),
            "d" => Ok(SweepParameter::D),
            "k" => Ok(SweepParameter::K),
            _ => Err(Error::UnknownParameter(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    pub valid: bool,
    /// Probes that completed without leaving the attractor box.
    pub bounded_runs: usize,
    pub probe_runs: usize,
}

/// Whether a free-run probe shows a bounded, spiking, non-degenerate
/// attractor after the transient.
pub fn probe_is_valid(trace: &Trace, transient_steps: usize) -> bool {
    if trace.states().iter().any(|s| s.sup_norm() > ATTRACTOR_BOUND) {
        return false;
    }
    let post = trace.since(transient_steps);
    if post.spike_count() < 2 || post.len() < 2 {
        return false;
    }
    let n = post.len() as f64;
    let var = |f: fn(&crate::State3) -> f64| {
        let mean = post.states().iter().map(f).sum::<f64>() / n;
        post.states().iter().map(|s| (f(s) - mean).powi(2)).sum::<f64>() / n
    };
    let min_var = var(|s| s.x).min(var(|s| s.y)).min(var(|s| s.u));
    min_var > VARIANCE_FLOOR
}

/// Varies one parameter (pair) over `values`, keeping everything else at
/// `base`, and marks each value valid iff all `probe_runs` free runs pass
/// [`probe_is_valid`]. Probe `j` uses seed `derive_run_seed(seed, j)` for
/// every value.
pub fn sweep_parameter(
    base: &NdsParams,
    param: SweepParameter,
    values: &[f64],
    probe_runs: usize,
    seed: u64,
    protocol: &ProtocolConfig,
    exec: Execution,
) -> Result<Vec<SweepPoint>> {
    if probe_runs == 0 {
        return Err(Error::InvalidConfig("probe_runs must be >= 1".into()));
    }
    let jobs = values.len() * probe_runs;
    let verdicts = exec
        .map_indexed(jobs, |job| -> Result<bool> {
            let (vi, j) = (job / probe_runs, job % probe_runs);
            let params = param.apply(base, values[vi]);
            let cfg = protocol_config(&params, None, derive_run_seed(seed, j as u64), protocol);
            let out = simulate_neuron(&cfg)?;
            Ok(out.diverged_at.is_none() && probe_is_valid(&out.trace, protocol.transient_steps))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(values
        .iter()
        .enumerate()
        .map(|(vi, &value)| {
            let ok = verdicts[vi * probe_runs..(vi + 1) * probe_runs]
                .iter()
                .filter(|&&b| b)
                .count();
            SweepPoint {
                value,
                valid: ok == probe_runs,
                bounded_runs: ok,
                probe_runs,
            }
        })
        .collect())
}

/// Feedback weights scanned by the calibration sweep: 0.05, 0.10, …, 1.00.
pub fn calibration_weights() -> Vec<f64> {
    (1..=20).map(|i| i as f64 / 20.0).collect()
}

/// Delays scanned by the calibration sweep: 1..=100.
pub fn calibration_delays() -> Vec<usize> {
    (1..=100).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationHit {
    pub weight: f64,
    pub delay: usize,
    pub period: usize,
    pub spikes_per_period: usize,
    pub seed: u64,
}

/// Scans `(w, τ)` in lexicographic order (weight first) from a single random
/// initial condition and returns the first pair whose post-transient orbit is
/// periodic with exactly `target_spikes` spikes per period.
pub fn calibrate_feedback(
    params: &NdsParams,
    weights: &[f64],
    delays: &[usize],
    target_spikes: usize,
    seed: u64,
    protocol: &ProtocolConfig,
    exec: Execution,
) -> Result<Option<CalibrationHit>> {
    let candidates: Vec<FeedbackConnection> = weights
        .iter()
        .flat_map(|&w| delays.iter().map(move |&d| (w, d)))
        .map(|(w, d)| FeedbackConnection::new(w, d))
        .collect::<Result<_>>()?;
    let summaries = exec
        .map_indexed(candidates.len(), |i| {
            protocol_run(params, Some(candidates[i]), seed, protocol)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(candidates
        .iter()
        .zip(&summaries)
        .find_map(|(c, s)| match s {
            RunSummary::Stabilized {
                period,
                spikes_per_period,
                ..
            } if *spikes_per_period == target_spikes => Some(CalibrationHit {
                weight: c.weight,
                delay: c.delay,
                period: *period,
                spikes_per_period: *spikes_per_period,
                seed,
            }),
            _ => None,
        }))
}
