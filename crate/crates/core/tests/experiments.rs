use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use descriptor_core::bell::{
    build_bell_network, conditional_measures, nonisomorphism_witness, run_bell, run_chain,
    run_decoherence, run_wigner_undo, run_wigner_undo_with, BellConfig, Environment, Variant,
};
use descriptor_core::{step_evolve, DescriptorSet, Error, GateKind, Sign, Tolerance};
use proptest::prelude::*;

const TOL: Tolerance = Tolerance::DEFAULT;
const COS2_HALF: f64 = 0.4267767;
const SIN2_HALF: f64 = 0.0732233;

fn close(a: &[f64], b: &[f64], eps: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() < eps)
}

#[test]
fn table_row_zero_zero() {
    let out = run_bell(&BellConfig::plain(0.0, FRAC_PI_4)).unwrap();
    assert!(close(
        &out.measures,
        &[COS2_HALF, SIN2_HALF, SIN2_HALF, COS2_HALF],
        1e-7
    ));
    assert!(close(&out.measures, &out.expected, 1e-12));
}

#[test]
fn table_row_one_one() {
    let out = run_bell(&BellConfig::plain(FRAC_PI_2, -FRAC_PI_4)).unwrap();
    assert!(close(
        &out.measures,
        &[SIN2_HALF, COS2_HALF, COS2_HALF, SIN2_HALF],
        1e-7
    ));
}

#[test]
fn equal_angles_correlate_perfectly() {
    let out = run_bell(&BellConfig::plain(1.1, 1.1)).unwrap();
    assert!(close(&out.measures, &[0.5, 0.0, 0.0, 0.5], 1e-12));
}

#[test]
fn plain_run_diagnostics() {
    let out = run_bell(&BellConfig::plain(0.4, -0.9)).unwrap();
    let d = &out.diagnostics;
    assert!(!d.alice_z_after_measurement.sharp);
    assert!(close(&d.alice_meter_measures, &[0.5, 0.5], 1e-12));
    assert!(close(&d.bob_meter_measures, &[0.5, 0.5], 1e-12));
    assert!(close(&out.alice_marginal, &[0.5, 0.5], 1e-12));
    assert!(close(&out.bob_marginal, &[0.5, 0.5], 1e-12));
    assert!(d.reconstruction_residual < 1e-12 && d.locality_residual < 1e-12);
    assert!(out.oracle_residual() < 1e-12);
    assert!(close(&out.record_measures, &out.measures, 1e-12));
    assert_eq!(out.labels[1][0].observable, "q_Az(4)");
    assert_eq!(out.labels[1][1].observable, "q_Bz(5)");
    assert_eq!(
        (out.labels[1][0].sign, out.labels[1][1].sign),
        (Sign::Plus, Sign::Minus)
    );
}

#[test]
fn plain_network_has_eight_gates_in_six_slices() {
    let bn = build_bell_network(&BellConfig::plain(0.0, FRAC_PI_4)).unwrap();
    assert_eq!(bn.network.steps(), 6);
    assert_eq!(bn.network.gates().len(), 8);
    let names: Vec<&str> = bn.network.gates().iter().map(|g| g.kind().name()).collect();
    assert_eq!(
        names,
        [
            "H",
            "Cnot",
            "Ry",
            "Ry",
            "Cnot",
            "Cnot",
            "Ctrl-Plus",
            "Ctrl-Plus"
        ]
    );
    let labels: Vec<&str> = bn
        .network
        .layout()
        .subsystems()
        .iter()
        .map(|s| s.label.as_str())
        .collect();
    assert_eq!(labels, ["Q1", "Q2", "QA", "QB", "SC"]);
}

#[test]
fn fresh_environment_reproduces_wire_label() {
    let out = run_decoherence(0.6, 0.1, Environment::Fresh, TOL).unwrap();
    assert!(out.wire_label_residual < 1e-12);
    assert!(out.q1_z_residual < 1e-12);
    assert!(out.q1_x_mean.abs() < 1e-12);
    assert!(out.environment_genericity < 1e-12);
    assert!(out.plain_residual() < 1e-12);
}

#[test]
fn scrambled_environment_is_generic() {
    let out = run_decoherence(0.0, FRAC_PI_4, Environment::Scrambled(0), TOL).unwrap();
    assert!(out.environment_genericity > 0.1);
    assert!(out.wire_label_residual < 1e-12);
    assert!(out.plain_residual() < 1e-12);
    assert!(out.outcome.oracle_residual() < 1e-12);
}

#[test]
fn empty_chain_is_plain() {
    let chain = run_chain(0.3, 0.8, 0, 0, TOL).unwrap();
    let plain = run_bell(&BellConfig::plain(0.3, 0.8)).unwrap();
    assert_eq!(chain.outcome.measures, plain.measures);
    assert!(chain.outcome.labels[0][0].factors.is_empty());
}

#[test]
fn asymmetric_chain_keeps_measures() {
    let out = run_chain(0.0, FRAC_PI_4, 2, 0, TOL).unwrap();
    assert!(out.plain_residual() < 1e-12);
    assert!(out.alice_factor_residual < 1e-12 && out.bob_factor_residual < 1e-12);
    assert_eq!(out.alice_extra_factor.value, Some(1.0));
    assert_eq!(out.outcome.labels[0][0].observable, "q_A''z(6)");
    assert_eq!(
        out.outcome.labels[0][0].factors,
        ["q_Az", "q_A'z", "q_A''z", "q_1z(rotated)"]
    );
    assert!(out.outcome.labels[0][1].factors.is_empty());
}

#[test]
fn chain_beyond_cap_is_an_error() {
    assert!(matches!(
        run_chain(0.0, 0.0, 7, 7, TOL),
        Err(Error::LayoutTooLarge { .. })
    ));
}

#[test]
fn undo_then_rerotate_flips_bob() {
    for phi in [0.0, FRAC_PI_4, -1.2, 2.5] {
        let out = run_wigner_undo(0.0, phi, TOL).unwrap();
        assert!(
            close(&out.outcome.measures, &[0.0, 0.5, 0.5, 0.0], 1e-12),
            "φ = {phi}"
        );
        assert!((out.conditional[0][1].unwrap() - 1.0).abs() < 1e-12);
        assert!(out.conditional[0][0].unwrap().abs() < 1e-12);
        assert!(out.undo_residual < 1e-12);
        assert!(out.outcome.oracle_residual() < 1e-12);
    }
}

#[test]
fn undo_without_rerotation_restores_plain() {
    let out = run_wigner_undo_with(0.5, 1.3, 0.0, TOL).unwrap();
    let plain = run_bell(&BellConfig::plain(0.5, 1.3)).unwrap();
    assert!(close(&out.outcome.measures, &plain.measures, 1e-12));
}

#[test]
fn conditional_guard_reports_undefined() {
    let guarded = conditional_measures(&[0.0, 0.0, 0.25, 0.75], TOL);
    assert_eq!(guarded[0], [None, None]);
    assert_eq!(guarded[1], [Some(0.25), Some(0.75)]);
}

#[test]
fn bob_side_gates_leave_alice_alone() {
    let cfg = BellConfig::plain(0.2, 0.9).with_variant(Variant::WignerUndo {
        rerotation: PI - 0.9,
    });
    let bn = build_bell_network(&cfg).unwrap();
    let undo = bn.schedule.undo.unwrap();
    let mut set = DescriptorSet::initial(bn.network.layout()).unwrap();
    for t in 0..bn.network.steps() {
        let next = step_evolve(&set, bn.network.slice(t)).unwrap();
        if (undo..undo + 3).contains(&t) {
            for id in [bn.roles.q1, bn.roles.alice[0], bn.roles.record] {
                assert!(next.get(id).distance(set.get(id)) < 1e-12, "t = {t}");
            }
        }
        set = next;
    }
}

#[test]
fn nonisomorphic_descriptors_for_one_state() {
    let r = nonisomorphism_witness().unwrap();
    assert!(r.state_distance < 1e-12);
    assert!((r.descriptor_distance - 8f64.sqrt()).abs() < 1e-12);
    assert!(r.cnot_x_residual < 1e-12);
    assert!(r.expectation_gap < 1e-12);
    assert_eq!(r.empty_residual, 0.0);
}

#[test]
fn variant_networks_place_their_gates() {
    let cfg = BellConfig::plain(0.0, 0.0).with_variant(Variant::WignerUndo { rerotation: 1.0 });
    let bn = build_bell_network(&cfg).unwrap();
    let undo = bn.schedule.undo.unwrap();
    assert_eq!(undo, bn.schedule.measurement + 1);
    assert!(matches!(bn.network.slice(undo + 1)[0].kind(), GateKind::Ry(r) if *r == 1.0));
    assert_eq!(bn.schedule.alice_record, undo + 3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn decoherence_never_changes_measures(seed in any::<u64>(), theta in -PI..PI, phi in -PI..PI) {
        let out = run_decoherence(theta, phi, Environment::Scrambled(seed), TOL).unwrap();
        prop_assert!(out.plain_residual() < 1e-9);
        prop_assert!(out.outcome.oracle_residual() < 1e-9);
        prop_assert!(out.q1_x_mean.abs() < 1e-9);
    }

    #[test]
    fn marginals_are_even(theta in -PI..PI, phi in -PI..PI) {
        let out = run_bell(&BellConfig::plain(theta, phi)).unwrap();
        prop_assert!(close(&out.alice_marginal, &[0.5, 0.5], 1e-9));
        prop_assert!(close(&out.bob_marginal, &[0.5, 0.5], 1e-9));
        prop_assert!(close(&out.measures, &out.expected, 1e-9));
    }
}
