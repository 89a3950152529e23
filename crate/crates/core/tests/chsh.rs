use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8};

use descriptor_core::bell::{run_bell, BellConfig};
use descriptor_core::chsh::{
    chsh_win_rate, enumerate_classical, mixture_win_rate, quantum_distribution, quantum_win_rate,
    referee, win_predicate, DeterministicStrategy, QuantumStrategy, CLASSICAL_BOUND,
};
use descriptor_core::Tolerance;
use proptest::prelude::*;

const TOL: Tolerance = Tolerance::DEFAULT;

#[test]
fn predicate_examples() {
    assert!(win_predicate(0, 0, 1, 1));
    assert!(win_predicate(1, 1, 0, 1));
    assert!(!win_predicate(1, 1, 1, 1));
}

#[test]
fn always_zero_wins_three() {
    let s = DeterministicStrategy {
        alice: [0, 0],
        bob: [0, 0],
    };
    assert_eq!(s.wins(), 3);
}

#[test]
fn classical_best_is_three_of_four() {
    let e = enumerate_classical();
    assert_eq!(e.best_wins, 3);
    assert_eq!(e.wins_histogram[4], 0);
    assert_eq!(e.wins_histogram.iter().sum::<usize>(), 16);
    assert!(e.maximizers.iter().all(|s| s.wins() == 3));
    assert_eq!(e.best_rate(), CLASSICAL_BOUND);
    let uniform: Vec<_> = e.maximizers.iter().map(|&s| (1.0, s)).collect();
    assert_eq!(mixture_win_rate(&uniform), 0.75);
}

#[test]
fn table_rows() {
    let (c, s) = (FRAC_PI_8.cos().powi(2) / 2.0, FRAC_PI_8.sin().powi(2) / 2.0);
    let strategy = QuantumStrategy::default();
    let expected = [[c, s, s, c], [c, s, s, c], [c, s, s, c], [s, c, c, s]];
    for (i, row) in expected.iter().enumerate() {
        let (x, y) = ((i >> 1) as u8, (i & 1) as u8);
        let out = quantum_distribution(&strategy, x, y, TOL).unwrap();
        for (m, e) in out.measures.iter().zip(row) {
            assert!((m - e).abs() < 1e-12, "row ({x},{y})");
        }
        assert!((out.measures.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let (theta, phi) = strategy.angles(x, y);
        assert_eq!(
            out.measures,
            run_bell(&BellConfig::plain(theta, phi)).unwrap().measures
        );
    }
}

#[test]
fn quantum_rate_beats_classical() {
    let report = chsh_win_rate(&QuantumStrategy::default(), TOL).unwrap();
    assert!((report.win_rate - quantum_win_rate()).abs() < 1e-12);
    assert!((report.win_rate - 0.8535533906).abs() < 1e-9);
    assert!((report.oracle_win_rate - report.win_rate).abs() < 1e-12);
    assert!(report.win_rate > CLASSICAL_BOUND);
    for row in report.distribution() {
        assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn equal_angles_only_reach_the_classical_rate() {
    let strategy = QuantumStrategy {
        alice: [0.3, 0.3],
        bob: [0.3, 0.3],
    };
    let report = chsh_win_rate(&strategy, TOL).unwrap();
    assert!((report.win_rate - 0.75).abs() < 1e-12);
}

#[test]
fn flipped_alice_angle_loses_ground() {
    let strategy = QuantumStrategy {
        alice: [0.0, -FRAC_PI_2],
        bob: [FRAC_PI_4, -FRAC_PI_4],
    };
    let report = chsh_win_rate(&strategy, TOL).unwrap();
    assert!(report.win_rate < 0.8535533906 - 1e-3);
}

#[test]
fn referee_estimate_tracks_exact_rate() {
    let report = chsh_win_rate(&QuantumStrategy::default(), TOL).unwrap();
    let summary = referee(&report, 20_000, 42);
    assert_eq!(summary, referee(&report, 20_000, 42));
    assert!((summary.rate() - report.win_rate).abs() < 0.02);
}

proptest! {
    #[test]
    fn no_mixture_beats_three_quarters(weights in proptest::collection::vec(0.0f64..1.0, 16)) {
        prop_assume!(weights.iter().sum::<f64>() > 1e-6);
        let mixture: Vec<_> = weights.iter().copied().zip(DeterministicStrategy::all()).collect();
        prop_assert!(mixture_win_rate(&mixture) <= CLASSICAL_BOUND + 1e-12);
    }
}
