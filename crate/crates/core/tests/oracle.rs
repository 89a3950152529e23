mod common;

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use descriptor_core::bell::{
    build_bell_network, run_bell, run_decoherence, BellConfig, Environment,
};
use descriptor_core::{
    joint_outcome_distribution, simulate_statevector, Error, GateKind, Network, SpaceLayout,
    SubsystemId, Tolerance,
};
use proptest::prelude::*;

#[test]
fn entangling_prefix_prepares_phi_plus_on_the_pair() {
    let bn = build_bell_network(&BellConfig::plain(0.0, 0.0)).unwrap();
    let state = simulate_statevector(&bn.network, 2).unwrap();
    let pair = joint_outcome_distribution(&state, &[bn.roles.q1, bn.roles.q2]).unwrap();
    assert_eq!(pair.probabilities().len(), 4);
    for (p, e) in pair.probabilities().iter().zip([0.5, 0.0, 0.0, 0.5]) {
        assert!((p - e).abs() < 1e-15);
    }
    // Everything else is still in its reference state, so the amplitudes of
    // |00…⟩ and |11 0…⟩ carry the whole state.
    let amps = state.amplitudes();
    let stride = amps.len() / 4;
    assert!((amps[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
    assert!((amps[3 * stride].re - FRAC_1_SQRT_2).abs() < 1e-15);
}

#[test]
fn record_distribution_matches_descriptor_measures() {
    let bn = build_bell_network(&BellConfig::plain(0.0, FRAC_PI_4)).unwrap();
    let state = simulate_statevector(&bn.network, 6).unwrap();
    let dist = joint_outcome_distribution(&state, &[bn.roles.record]).unwrap();
    let out = run_bell(&BellConfig::plain(0.0, FRAC_PI_4)).unwrap();
    for k in 0..4 {
        assert!((dist.get(&[k]) - out.measures[k]).abs() < 1e-12);
    }
    assert!((dist.total() - 1.0).abs() < 1e-12);
}

#[test]
fn decohered_particle_has_no_coherence() {
    for env in [Environment::Fresh, Environment::Scrambled(0)] {
        let out = run_decoherence(0.0, FRAC_PI_4, env, Tolerance::DEFAULT).unwrap();
        assert!(out.q1_coherence < 1e-12, "{env:?}");
    }
}

#[test]
fn distribution_rejects_bad_ids() {
    let layout = SpaceLayout::new([("Q", 2)]).unwrap();
    let net = Network::builder(&layout).build().unwrap();
    let state = simulate_statevector(&net, 0).unwrap();
    assert!(matches!(
        joint_outcome_distribution(&state, &[SubsystemId(0), SubsystemId(0)]),
        Err(Error::RepeatedSubsystem(_))
    ));
    assert!(joint_outcome_distribution(&state, &[SubsystemId(3)]).is_err());
}

#[test]
fn single_gate_states() {
    let layout = SpaceLayout::new([("Q", 2), ("S", 3)]).unwrap();
    let mut b = Network::builder(&layout);
    b.step(GateKind::Plus(2), &["S"])
        .unwrap()
        .step(GateKind::CtrlPlus(1), &["Q", "S"])
        .unwrap();
    let net = b.build().unwrap();
    let dist =
        joint_outcome_distribution(&simulate_statevector(&net, 2).unwrap(), &[SubsystemId(1)])
            .unwrap();
    assert_eq!(dist.get(&[2]), 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_is_preserved(seed in any::<u64>()) {
        let net = common::random_network(&mut common::rng(seed), 4, 8);
        for t in 0..=net.steps() {
            let state = simulate_statevector(&net, t).unwrap();
            prop_assert!((state.norm() - 1.0).abs() < 1e-12);
            let all: Vec<SubsystemId> = net.layout().ids().collect();
            let dist = joint_outcome_distribution(&state, &all).unwrap();
            prop_assert!((dist.total() - 1.0).abs() < 1e-12);
        }
    }
}
