//! Runs experiments and collects their reports.

use descriptor_core::bell::{
    nonisomorphism_witness, run_bell, run_chain, run_decoherence, run_wigner_undo, BellConfig,
    BellOutcome, Environment,
};
use descriptor_core::chsh::{
    chsh_win_rate, enumerate_classical, quantum_win_rate, referee, QuantumStrategy, CLASSICAL_BOUND,
};
use descriptor_core::{Error, Tolerance};

use crate::config::{Experiment, RunConfig};
use crate::report::{Check, Report, Row, Section};

/// Rounds played by the seeded demonstration referee.
pub const REFEREE_ROUNDS: usize = 10_000;

pub const ALL: [Experiment; 6] = [
    Experiment::Bell,
    Experiment::Chsh,
    Experiment::Decoherence,
    Experiment::Chain,
    Experiment::Wigner,
    Experiment::Nonisomorphism,
];

pub fn execute(cfg: &RunConfig) -> Result<Report, Error> {
    let experiments = match cfg.experiment {
        Experiment::All => ALL.to_vec(),
        one => vec![one],
    };
    let sections = experiments
        .iter()
        .map(|&e| section(e, cfg))
        .collect::<Result<_, _>>()?;
    Ok(Report {
        tolerance: cfg.tolerance.0,
        sections,
    })
}

/// Tolerances of one run: `core` for the library's algebraic predicates,
/// `check` for the report's pass/fail verdicts. A tolerance tighter than the
/// library default only tightens the verdicts, since rounding alone would
/// otherwise fail the predicates.
#[derive(Clone, Copy)]
struct Tols {
    core: Tolerance,
    check: f64,
}

fn section(experiment: Experiment, cfg: &RunConfig) -> Result<Section, Error> {
    let tol = Tols {
        core: Tolerance(cfg.tolerance.0.max(Tolerance::DEFAULT.0)),
        check: cfg.tolerance.0,
    };
    match experiment {
        Experiment::Bell => bell(cfg.theta, cfg.phi, tol),
        Experiment::Chsh => chsh(cfg.seed, tol),
        Experiment::Decoherence => decoherence(cfg.theta, cfg.phi, cfg.seed, tol),
        Experiment::Chain => chain(cfg, tol),
        Experiment::Wigner => wigner(cfg.theta, cfg.phi, tol),
        Experiment::Nonisomorphism => nonisomorphism(tol),
        Experiment::All => unreachable!("expanded by execute"),
    }
}

const BRANCHES: [&str; 4] = ["00", "01", "10", "11"];

fn record_rows(outcome: &BellOutcome, expected: &[f64; 4]) -> Vec<Row> {
    BRANCHES
        .iter()
        .zip(outcome.measures.iter().zip(expected))
        .map(|(b, (&m, &e))| Row::new(*b, m, e))
        .collect()
}

/// Checks shared by every run of the Bell network.
fn outcome_checks(s: &mut Section, o: &BellOutcome, tol: f64) {
    s.checks
        .push(Check::below("oracle_residual", o.oracle_residual(), tol));
    s.checks.push(Check::below(
        "measure_sum_defect",
        o.measure_sum_defect(),
        tol,
    ));
    s.checks.push(Check::below(
        "reconstruction_residual",
        o.diagnostics.reconstruction_residual,
        tol,
    ));
    s.checks.push(Check::below(
        "locality_residual",
        o.diagnostics.locality_residual,
        tol,
    ));
}

fn angle_metrics(s: &mut Section, theta: f64, phi: f64) {
    s.metric("theta", theta);
    s.metric("phi", phi);
}

fn bell(theta: f64, phi: f64, tol: Tols) -> Result<Section, Error> {
    let o = run_bell(&BellConfig::plain(theta, phi).with_tolerance(tol.core))?;
    let mut s = Section::new("bell");
    s.rows = record_rows(&o, &o.expected);
    angle_metrics(&mut s, theta, phi);
    s.metric("alice_marginal_0", o.alice_marginal[0]);
    s.metric("bob_marginal_0", o.bob_marginal[0]);
    s.checks.push(Check::below(
        "closed_form_residual",
        o.closed_form_residual(),
        tol.check,
    ));
    outcome_checks(&mut s, &o, tol.check);
    let marginal_gap = [o.alice_marginal, o.bob_marginal]
        .iter()
        .flatten()
        .map(|m| (m - 0.5).abs())
        .fold(0.0, f64::max);
    s.checks
        .push(Check::below("marginal_uniformity", marginal_gap, tol.check));
    Ok(s)
}

fn chsh(seed: u64, tol: Tols) -> Result<Section, Error> {
    let strategy = QuantumStrategy::default();
    let report = chsh_win_rate(&strategy, tol.core)?;
    let classical = enumerate_classical();
    let mut s = Section::new("chsh");
    for setting in &report.settings {
        let o = &setting.outcome;
        for (k, b) in BRANCHES.iter().enumerate() {
            s.rows.push(Row::new(
                format!("{}{}/{b}", setting.x, setting.y),
                o.measures[k],
                o.expected[k],
            ));
        }
    }
    let played = referee(&report, REFEREE_ROUNDS, seed);
    s.metric("win_rate", report.win_rate);
    s.metric("oracle_win_rate", report.oracle_win_rate);
    s.metric("quantum_win_rate", quantum_win_rate());
    s.metric("classical_bound", CLASSICAL_BOUND);
    s.metric("classical_best_rate", classical.best_rate());
    s.metric("sampled_win_rate", played.rate());
    s.checks.push(Check::below(
        "win_rate_residual",
        (report.win_rate - quantum_win_rate()).abs(),
        tol.check,
    ));
    s.checks.push(Check::below(
        "oracle_win_rate_residual",
        (report.win_rate - report.oracle_win_rate).abs(),
        tol.check,
    ));
    s.checks.push(Check::below(
        "classical_best_residual",
        (classical.best_rate() - CLASSICAL_BOUND).abs(),
        tol.check,
    ));
    s.checks.push(Check::above(
        "win_rate_over_classical",
        report.win_rate,
        CLASSICAL_BOUND,
    ));
    let worst = report
        .settings
        .iter()
        .map(|x| x.outcome.closed_form_residual())
        .fold(0.0, f64::max);
    s.checks
        .push(Check::below("closed_form_residual", worst, tol.check));
    Ok(s)
}

fn decoherence(theta: f64, phi: f64, seed: u64, tol: Tols) -> Result<Section, Error> {
    let d = run_decoherence(theta, phi, Environment::Scrambled(seed), tol.core)?;
    let mut s = Section::new("decoherence");
    s.rows = record_rows(&d.outcome, &d.plain_measures);
    angle_metrics(&mut s, theta, phi);
    s.metric("seed", seed as f64);
    s.metric("q1_x_mean", d.q1_x_mean);
    s.metric("environment_genericity", d.environment_genericity);
    s.checks.push(Check::below(
        "plain_residual",
        d.plain_residual(),
        tol.check,
    ));
    s.checks.push(Check::below(
        "wire_label_residual",
        d.wire_label_residual,
        tol.check,
    ));
    s.checks
        .push(Check::below("q1_z_residual", d.q1_z_residual, tol.check));
    s.checks
        .push(Check::below("q1_coherence", d.q1_coherence, tol.check));
    outcome_checks(&mut s, &d.outcome, tol.check);
    Ok(s)
}

fn chain(cfg: &RunConfig, tol: Tols) -> Result<Section, Error> {
    let c = run_chain(cfg.theta, cfg.phi, cfg.chain_alice, cfg.chain_bob, tol.core)?;
    let mut s = Section::new("chain");
    s.rows = record_rows(&c.outcome, &c.plain_measures);
    angle_metrics(&mut s, cfg.theta, cfg.phi);
    s.metric("chain_alice", cfg.chain_alice as f64);
    s.metric("chain_bob", cfg.chain_bob as f64);
    s.metric("alice_extra_factor_value", c.alice_extra_factor.value);
    s.metric("bob_extra_factor_value", c.bob_extra_factor.value);
    s.checks.push(Check::below(
        "plain_residual",
        c.plain_residual(),
        tol.check,
    ));
    s.checks.push(Check::below(
        "alice_factor_residual",
        c.alice_factor_residual,
        tol.check,
    ));
    s.checks.push(Check::below(
        "bob_factor_residual",
        c.bob_factor_residual,
        tol.check,
    ));
    s.checks.push(Check::below(
        "alice_extra_factor_variance",
        c.alice_extra_factor.variance,
        tol.check,
    ));
    s.checks.push(Check::below(
        "bob_extra_factor_variance",
        c.bob_extra_factor.variance,
        tol.check,
    ));
    outcome_checks(&mut s, &c.outcome, tol.check);
    Ok(s)
}

fn wigner(theta: f64, phi: f64, tol: Tols) -> Result<Section, Error> {
    let w = run_wigner_undo(theta, phi, tol.core)?;
    let mut s = Section::new("wigner");
    s.rows = record_rows(&w.outcome, &w.outcome.expected);
    angle_metrics(&mut s, theta, phi);
    s.metric("effective_phi", w.outcome.config.effective_phi());
    for (a, row) in w.conditional.iter().enumerate() {
        for (b, value) in row.iter().enumerate() {
            s.metric(format!("conditional_{b}_given_{a}"), *value);
        }
    }
    s.checks.push(Check::below(
        "closed_form_residual",
        w.outcome.closed_form_residual(),
        tol.check,
    ));
    s.checks
        .push(Check::below("undo_residual", w.undo_residual, tol.check));
    outcome_checks(&mut s, &w.outcome, tol.check);
    Ok(s)
}

fn nonisomorphism(tol: Tols) -> Result<Section, Error> {
    let r = nonisomorphism_witness()?;
    let mut s = Section::new("nonisomorphism");
    s.checks
        .push(Check::below("state_distance", r.state_distance, tol.check));
    s.checks.push(Check::above(
        "descriptor_distance",
        r.descriptor_distance,
        tol.check,
    ));
    s.checks.push(Check::below(
        "cnot_x_residual",
        r.cnot_x_residual,
        tol.check,
    ));
    s.checks.push(Check::below(
        "expectation_gap",
        r.expectation_gap,
        tol.check,
    ));
    s.checks
        .push(Check::below("empty_residual", r.empty_residual, tol.check));
    Ok(s)
}
