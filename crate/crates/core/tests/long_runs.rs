use nds_core::integrators::{
    integrate_reference, iterate_discrete_rossler, iterate_nds_form, StepSize, DISCRETE_ROSSLER_TS,
    REFERENCE_DT,
};
use nds_core::neuron::{inter_spike_intervals, run_neuron, seeded_initial_state, InitialCondition, NeuronRunConfig};
use nds_core::upo::{derive_run_seed, detect_period, DetectionConfig};
use nds_core::{NdsParams, RosslerParams, State3};

fn max_abs(states: &[State3]) -> f64 {
    states.iter().map(State3::sup_norm).fold(0.0, f64::max)
}

#[test]
fn reference_flow_stays_on_attractor() {
    let p = RosslerParams::default();
    let trace = integrate_reference(State3::new(1.0, 1.0, 1.0), &p, StepSize::new(REFERENCE_DT).unwrap(), 1_000_000)
        .unwrap();
    assert_eq!(trace.len(), 1_000_001);
    assert!(max_abs(trace.states()) < 100.0);
}

#[test]
fn discrete_rossler_bounded_with_fin() {
    let p = RosslerParams::default();
    let out = iterate_discrete_rossler(
        State3::new(1.0, 1.0, 1.0),
        &p,
        StepSize::new(DISCRETE_ROSSLER_TS).unwrap(),
        1_000_000,
    );
    assert_eq!(out.diverged_at, None);
    assert!(max_abs(out.trace.states()) <= 100.0);
    assert!(out.trace.states().iter().any(|s| s.u > 1.0));
}

#[test]
fn sign_flipped_map_escapes() {
    let p = NdsParams::rossler_mapped(DISCRETE_ROSSLER_TS);
    for seed in 0..10 {
        let out = iterate_nds_form(seeded_initial_state(seed), &p, 1_000_000);
        let step = out.diverged_at.unwrap_or_else(|| panic!("seed {seed} stayed bounded"));
        // The divergent state itself is not stored.
        assert_eq!(out.trace.len(), step);
    }
}

#[test]
fn free_runs_are_aperiodic_spiking() {
    let cfg = DetectionConfig::default();
    for i in 0..20 {
        let run = NeuronRunConfig::free_run(NdsParams::default(), InitialCondition::Random, 10_000, derive_run_seed(99, i));
        let trace = run_neuron(&run).unwrap();
        assert!(trace.spike_count() >= 2);
        assert_eq!(detect_period(&trace, &cfg).unwrap().period, None);
        let isi = inter_spike_intervals(&trace);
        assert!(isi.windows(2).any(|w| w[0] != w[1]));
    }
}
