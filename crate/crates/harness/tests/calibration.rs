use nds_core::neuron::{run_neuron, InitialCondition, NeuronRunConfig};
use nds_core::upo::{
    calibrate_feedback, calibration_delays, calibration_weights, orbit_signature, protocol_config,
    spikes_in_final_period, summarize_trace, ProtocolConfig, RunSummary,
};
use nds_core::{Execution, NdsParams};
use nds_harness::presets::{
    calibrated_feedback, preset, Preset, CALIBRATED_DELAY, CALIBRATED_WEIGHT, CALIBRATION_SEED,
};

#[test]
fn pinned_pair_is_reproduced() {
    let hit = calibrate_feedback(
        &NdsParams::default(),
        &calibration_weights(),
        &calibration_delays(),
        4,
        CALIBRATION_SEED,
        &ProtocolConfig::default(),
        Execution::Sequential,
    )
    .unwrap()
    .expect("calibration finds a period-4 orbit");
    assert_eq!((hit.weight, hit.delay), (CALIBRATED_WEIGHT, CALIBRATED_DELAY));
    assert_eq!(hit.spikes_per_period, 4);
}

#[test]
fn calibrated_feedback_locks_other_seeds() {
    let proto = ProtocolConfig::default();
    let mut signatures = Vec::new();
    for seed in 1..=8 {
        let cfg = protocol_config(&NdsParams::default(), calibrated_feedback().connections().first().copied(), seed, &proto);
        let trace = run_neuron(&cfg).unwrap();
        match summarize_trace(&trace, &proto.detection).unwrap() {
            RunSummary::Stabilized { period, spikes_per_period, .. } => {
                assert_eq!(spikes_per_period, 4);
                assert_eq!(spikes_in_final_period(&trace, period), 4);
                signatures.push(orbit_signature(&trace, period));
            }
            other => panic!("seed {seed}: {other:?}"),
        }
    }
    // Seeds 1 and 2 land on the same orbit at different phases.
    assert_eq!(signatures[0], signatures[1]);
}

#[test]
fn free_run_preset_matches_defaults() {
    match preset("fig3-free-run").unwrap() {
        Preset::Neuron { params, feedback, transient_steps, steps, .. } => {
            assert_eq!(params, NdsParams::default());
            assert!(feedback.is_empty());
            let cfg = NeuronRunConfig::free_run(params, InitialCondition::Random, steps, 0);
            assert_eq!(transient_steps, 0);
            assert_eq!(run_neuron(&cfg).unwrap().len(), steps + 1);
        }
        other => panic!("{other:?}"),
    }
}
