//! The CHSH game: a referee sends bits `x` to Alice and `y` to Bob, who
//! answer `a` and `b` without communicating. They win when `a ⊕ b = x ∧ y`.
//!
//! Classical play is enumerated exhaustively over the sixteen deterministic
//! strategies. Quantum play uses the Bell network with input-dependent
//! rotation angles and reads the answer statistics off Charlie's record.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bell::{run_bell, BellConfig, BellOutcome};
use crate::error::Result;
use crate::operator::Tolerance;

/// Best win rate of any classical strategy, deterministic or mixed.
pub const CLASSICAL_BOUND: f64 = 0.75;

/// `cos²(π/8)`.
pub fn quantum_win_rate() -> f64 {
    let c = libm::cos(FRAC_PI_8);
    c * c
}

pub fn win_predicate(x: u8, y: u8, a: u8, b: u8) -> bool {
    (a ^ b) & 1 == (x & y) & 1
}

/// Fixed answers, one per possible input bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DeterministicStrategy {
    pub alice: [u8; 2],
    pub bob: [u8; 2],
}

impl DeterministicStrategy {
    /// All sixteen strategies, in a fixed order.
    pub fn all() -> impl Iterator<Item = Self> {
        (0u8..16).map(|bits| Self {
            alice: [bits >> 3 & 1, bits >> 2 & 1],
            bob: [bits >> 1 & 1, bits & 1],
        })
    }

    /// Number of the four input pairs this strategy wins.
    pub fn wins(&self) -> usize {
        (0..4u8)
            .filter(|&i| {
                let (x, y) = (i >> 1, i & 1);
                win_predicate(x, y, self.alice[x as usize], self.bob[y as usize])
            })
            .count()
    }

    pub fn win_rate(&self) -> f64 {
        self.wins() as f64 / 4.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalEnumeration {
    /// Most input pairs any deterministic strategy wins.
    pub best_wins: usize,
    pub maximizers: Vec<DeterministicStrategy>,
    /// `wins_histogram[k]`: strategies winning exactly `k` of four pairs.
    pub wins_histogram: [usize; 5],
}

impl ClassicalEnumeration {
    pub fn best_rate(&self) -> f64 {
        self.best_wins as f64 / 4.0
    }
}

pub fn enumerate_classical() -> ClassicalEnumeration {
    let mut wins_histogram = [0; 5];
    let mut best_wins = 0;
    let mut maximizers = Vec::new();
    for s in DeterministicStrategy::all() {
        let w = s.wins();
        wins_histogram[w] += 1;
        if w > best_wins {
            best_wins = w;
            maximizers.clear();
        }
        if w == best_wins {
            maximizers.push(s);
        }
    }
    ClassicalEnumeration {
        best_wins,
        maximizers,
        wins_histogram,
    }
}

/// Win rate of a shared-randomness mixture of deterministic strategies.
/// Weights need not be normalized; they must not all be zero.
pub fn mixture_win_rate(mixture: &[(f64, DeterministicStrategy)]) -> f64 {
    let total: f64 = mixture.iter().map(|(w, _)| w).sum();
    mixture.iter().map(|(w, s)| w * s.win_rate()).sum::<f64>() / total
}

/// Rotation angles per input bit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuantumStrategy {
    pub alice: [f64; 2],
    pub bob: [f64; 2],
}

impl Default for QuantumStrategy {
    fn default() -> Self {
        Self {
            alice: [0.0, FRAC_PI_2],
            bob: [FRAC_PI_4, -FRAC_PI_4],
        }
    }
}

impl QuantumStrategy {
    pub fn angles(&self, x: u8, y: u8) -> (f64, f64) {
        (self.alice[x as usize & 1], self.bob[y as usize & 1])
    }
}

/// The Bell network's answer statistics for one input pair.
pub fn quantum_distribution(
    strategy: &QuantumStrategy,
    x: u8,
    y: u8,
    tol: Tolerance,
) -> Result<BellOutcome> {
    let (theta, phi) = strategy.angles(x, y);
    run_bell(&BellConfig::plain(theta, phi).with_tolerance(tol))
}

/// Probability of a win given a joint answer distribution indexed `2a + b`.
pub fn win_probability(x: u8, y: u8, measures: &[f64; 4]) -> f64 {
    (0..4u8)
        .filter(|&k| win_predicate(x, y, k >> 1, k & 1))
        .map(|k| measures[k as usize])
        .sum()
}

#[derive(Clone, Debug)]
pub struct ChshSetting {
    pub x: u8,
    pub y: u8,
    pub outcome: BellOutcome,
    pub win_probability: f64,
    pub oracle_win_probability: f64,
}

#[derive(Clone, Debug)]
pub struct ChshReport {
    pub strategy: QuantumStrategy,
    /// Input pairs in order `00, 01, 10, 11`.
    pub settings: Vec<ChshSetting>,
    /// Win rate under uniformly random inputs.
    pub win_rate: f64,
    pub oracle_win_rate: f64,
}

impl ChshReport {
    /// Answer distribution per input pair: `rows[2x + y][2a + b]`.
    pub fn distribution(&self) -> [[f64; 4]; 4] {
        core::array::from_fn(|i| self.settings[i].outcome.measures)
    }
}

pub fn chsh_win_rate(strategy: &QuantumStrategy, tol: Tolerance) -> Result<ChshReport> {
    let mut settings = Vec::with_capacity(4);
    for i in 0..4u8 {
        let (x, y) = (i >> 1, i & 1);
        let outcome = quantum_distribution(strategy, x, y, tol)?;
        settings.push(ChshSetting {
            x,
            y,
            win_probability: win_probability(x, y, &outcome.measures),
            oracle_win_probability: win_probability(x, y, &outcome.oracle),
            outcome,
        });
    }
    let win_rate = settings.iter().map(|s| s.win_probability).sum::<f64>() / 4.0;
    let oracle_win_rate = settings
        .iter()
        .map(|s| s.oracle_win_probability)
        .sum::<f64>()
        / 4.0;
    Ok(ChshReport {
        strategy: *strategy,
        settings,
        win_rate,
        oracle_win_rate,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RefereeSummary {
    pub rounds: usize,
    pub wins: usize,
}

impl RefereeSummary {
    pub fn rate(&self) -> f64 {
        if self.rounds == 0 {
            0.0
        } else {
            self.wins as f64 / self.rounds as f64
        }
    }
}

/// Plays `rounds` seeded rounds, drawing inputs uniformly and answers from
/// each setting's measures. Illustrative only; the exact rate is
/// [`ChshReport::win_rate`].
pub fn referee(report: &ChshReport, rounds: usize, seed: u64) -> RefereeSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut wins = 0;
    for _ in 0..rounds {
        let setting = &report.settings[rng.random_range(0..4usize)];
        let draw: f64 = rng.random();
        let mut acc = 0.0;
        let mut answer = 3u8;
        for (k, m) in setting.outcome.measures.iter().enumerate() {
            acc += m;
            if draw < acc {
                answer = k as u8;
                break;
            }
        }
        if win_predicate(setting.x, setting.y, answer >> 1, answer & 1) {
            wins += 1;
        }
    }
    RefereeSummary { rounds, wins }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sixteen_distinct_strategies() {
        let all: Vec<_> = DeterministicStrategy::all().collect();
        assert_eq!(all.len(), 16);
        for (i, a) in all.iter().enumerate() {
            assert!(all[i + 1..].iter().all(|b| a != b));
        }
    }

    #[test]
    fn predicate_truth_table() {
        assert!(win_predicate(0, 0, 1, 1));
        assert!(!win_predicate(0, 1, 0, 1));
        assert!(win_predicate(1, 1, 0, 1));
        assert!(!win_predicate(1, 1, 1, 1));
    }

    #[test]
    fn referee_is_seeded() {
        let report = chsh_win_rate(&QuantumStrategy::default(), Tolerance::DEFAULT).unwrap();
        let a = referee(&report, 2000, 11);
        assert_eq!(a, referee(&report, 2000, 11));
        assert!((a.rate() - report.win_rate).abs() < 0.05);
        assert_eq!(referee(&report, 0, 1).rate(), 0.0);
    }
}
