//! Bell-experiment networks and their descriptor-level analysis.
//!
//! Two entangled particles `Q1`, `Q2` are rotated by `θ` and `φ`, measured
//! by Alice (`QA`) and Bob (`QB`) through Cnots, and the outcomes are copied
//! into Charlie's four-level record `SC`: Alice's side adds 2, Bob's adds 1,
//! so the record value reads `ab` in binary. Charlie's descriptor foliates
//! first on Alice's unsharp `z` component, then on Bob's, into four relative
//! descriptors whose measures give the joint statistics.
//!
//! Variants insert a decohering environment on `Q1`, relay chains between
//! the measuring qubits and the record, or an undo-and-remeasure sequence on
//! Bob's side.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::descriptor::{is_sharp, locality_residual, step_evolve, DescriptorSet, Sharpness};
use crate::error::{Error, Result};
use crate::foliation::{branch_measure, foliate, BranchStep, Control, Foliation};
use crate::gates::{GateKind, Network};
use crate::matrix::{Matrix, C64};
use crate::operator::{
    projector_pm, reference_expectation, Operator, Sign, SpaceLayout, SubsystemId, Tolerance,
};
use crate::oracle::{joint_outcome_distribution, reduced_density_matrix, simulate_statevector};

/// Record increment applied by Alice's communication.
pub const ALICE_SHIFT: usize = 2;
/// Record increment applied by Bob's communication.
pub const BOB_SHIFT: usize = 1;

/// How the environment that decoheres `Q1` is prepared.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Environment {
    /// A freshly initialized qubit; its descriptor is the initial one.
    Fresh,
    /// An environment qubit entangled with a hidden ancilla by a seeded
    /// random two-qubit unitary, so its descriptor is a generic
    /// representation of the Pauli algebra.
    Scrambled(u64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Variant {
    Plain,
    Decohered(Environment),
    /// Relay chains of the given lengths between each measuring qubit and
    /// the record.
    Chained {
        alice: usize,
        bob: usize,
    },
    /// Bob's measurement is undone, his particle rotated by `rerotation`,
    /// and measured again before the records are made.
    WignerUndo {
        rerotation: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BellConfig {
    pub theta: f64,
    pub phi: f64,
    pub variant: Variant,
    pub tolerance: Tolerance,
}

impl BellConfig {
    pub fn plain(theta: f64, phi: f64) -> Self {
        Self {
            theta,
            phi,
            variant: Variant::Plain,
            tolerance: Tolerance::DEFAULT,
        }
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn with_tolerance(mut self, tolerance: Tolerance) -> Self {
        self.tolerance = tolerance;
        self
    }

    fn validate(&self) -> Result<()> {
        let finite = self.theta.is_finite()
            && self.phi.is_finite()
            && match self.variant {
                Variant::WignerUndo { rerotation } => rerotation.is_finite(),
                _ => true,
            };
        if finite {
            Ok(())
        } else {
            Err(Error::UnsupportedGate("rotation angles must be finite"))
        }
    }

    /// Bob's total rotation by the time his side is recorded.
    pub fn effective_phi(&self) -> f64 {
        match self.variant {
            Variant::WignerUndo { rerotation } => self.phi + rerotation,
            _ => self.phi,
        }
    }
}

/// `½ (cos², sin², sin², cos²)` of `(θ − φ)/2`, indexed by record value.
pub fn closed_form_measures(theta: f64, phi: f64) -> [f64; 4] {
    let half = (theta - phi) / 2.0;
    let same = libm::cos(half) * libm::cos(half) / 2.0;
    let differ = libm::sin(half) * libm::sin(half) / 2.0;
    [same, differ, differ, same]
}

/// Which subsystem plays which part.
#[derive(Clone, Debug)]
pub struct Roles {
    pub q1: SubsystemId,
    pub q2: SubsystemId,
    /// Alice's measuring qubit followed by her relays.
    pub alice: Vec<SubsystemId>,
    /// Bob's measuring qubit followed by his relays.
    pub bob: Vec<SubsystemId>,
    pub record: SubsystemId,
    /// Environment qubit and its hidden ancilla.
    pub environment: Option<(SubsystemId, SubsystemId)>,
}

impl Roles {
    pub fn alice_relay(&self) -> SubsystemId {
        *self.alice.last().expect("alice has a meter")
    }

    pub fn bob_relay(&self) -> SubsystemId {
        *self.bob.last().expect("bob has a meter")
    }
}

/// Slice indices of the landmark interactions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Schedule {
    pub rotation: usize,
    pub decoherence: Option<usize>,
    pub measurement: usize,
    /// First of the three undo, rerotate, remeasure slices.
    pub undo: Option<usize>,
    pub alice_record: usize,
    pub bob_record: usize,
}

#[derive(Clone, Debug)]
pub struct BellNetwork {
    pub network: Network,
    pub roles: Roles,
    pub schedule: Schedule,
}

fn relay_labels(party: &str, len: usize) -> Vec<String> {
    (0..=len)
        .map(|i| format!("Q{party}{}", "'".repeat(i)))
        .collect()
}

/// Builds the timed network for a configuration.
///
/// Layout order: `Q1, Q2, [E, E_anc], QA, QA', …, QB, QB', …, SC`.
pub fn build_bell_network(cfg: &BellConfig) -> Result<BellNetwork> {
    cfg.validate()?;
    let (alice_len, bob_len) = match cfg.variant {
        Variant::Chained { alice, bob } => (alice, bob),
        _ => (0, 0),
    };
    let alice_labels = relay_labels("A", alice_len);
    let bob_labels = relay_labels("B", bob_len);
    let with_env = matches!(cfg.variant, Variant::Decohered(_));

    let mut subsystems: Vec<(String, usize)> = alloc::vec![("Q1".into(), 2), ("Q2".into(), 2)];
    if with_env {
        subsystems.push(("E".into(), 2));
        subsystems.push(("E_anc".into(), 2));
    }
    subsystems.extend(alice_labels.iter().map(|l| (l.clone(), 2)));
    subsystems.extend(bob_labels.iter().map(|l| (l.clone(), 2)));
    subsystems.push(("SC".into(), 4));
    let layout = SpaceLayout::new(subsystems)?;

    let mut b = Network::builder(&layout).tolerance(cfg.tolerance);
    match cfg.variant {
        Variant::Decohered(Environment::Scrambled(seed)) => {
            b.parallel(&[
                (GateKind::H, &["Q1"]),
                (GateKind::Custom(environment_unitary(seed)), &["E", "E_anc"]),
            ])?;
        }
        _ => {
            b.step(GateKind::H, &["Q1"])?;
        }
    }
    b.step(GateKind::Cnot, &["Q1", "Q2"])?;
    let rotation = 2;
    b.parallel(&[
        (GateKind::Ry(cfg.theta), &["Q1"]),
        (GateKind::Ry(cfg.phi), &["Q2"]),
    ])?;
    let mut next = 3;
    let decoherence = if with_env {
        b.step(GateKind::Cnot, &["Q1", "E"])?;
        next += 1;
        Some(next - 1)
    } else {
        None
    };
    let measurement = next;
    b.parallel(&[
        (GateKind::Cnot, &["Q1", &alice_labels[0]]),
        (GateKind::Cnot, &["Q2", &bob_labels[0]]),
    ])?;
    next += 1;
    for i in 1..=alice_len.max(bob_len) {
        let mut slice: Vec<(GateKind, [&str; 2])> = Vec::new();
        if i <= alice_len {
            slice.push((GateKind::Cnot, [&alice_labels[i - 1], &alice_labels[i]]));
        }
        if i <= bob_len {
            slice.push((GateKind::Cnot, [&bob_labels[i - 1], &bob_labels[i]]));
        }
        let slice: Vec<(GateKind, &[&str])> =
            slice.iter().map(|(k, l)| (k.clone(), &l[..])).collect();
        b.parallel(&slice)?;
        next += 1;
    }
    let undo = if let Variant::WignerUndo { rerotation } = cfg.variant {
        b.step(GateKind::Cnot, &["Q2", &bob_labels[0]])?;
        b.step(GateKind::Ry(rerotation), &["Q2"])?;
        b.step(GateKind::Cnot, &["Q2", &bob_labels[0]])?;
        next += 3;
        Some(next - 3)
    } else {
        None
    };
    let alice_record = next;
    b.step(
        GateKind::CtrlPlus(ALICE_SHIFT),
        &[alice_labels.last().unwrap(), "SC"],
    )?;
    let bob_record = next + 1;
    b.step(
        GateKind::CtrlPlus(BOB_SHIFT),
        &[bob_labels.last().unwrap(), "SC"],
    )?;
    let network = b.build()?;

    let ids = |labels: &[String]| {
        labels
            .iter()
            .map(|l| layout.id(l))
            .collect::<Result<Vec<_>>>()
    };
    let roles = Roles {
        q1: layout.id("Q1")?,
        q2: layout.id("Q2")?,
        alice: ids(&alice_labels)?,
        bob: ids(&bob_labels)?,
        record: layout.id("SC")?,
        environment: if with_env {
            Some((layout.id("E")?, layout.id("E_anc")?))
        } else {
            None
        },
    };
    let schedule = Schedule {
        rotation,
        decoherence,
        measurement,
        undo,
        alice_record,
        bob_record,
    };
    Ok(BellNetwork {
        network,
        roles,
        schedule,
    })
}

/// A seeded two-qubit unitary: four layers of independent single-qubit
/// rotations with uniformly drawn Euler angles, interleaved with Cnots.
pub fn environment_unitary(seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cnot = GateKind::Cnot.local_matrix(&[2, 2]).expect("qubit cnot");
    let mut u = Matrix::identity(4);
    for layer in 0..4 {
        let a = euler_rotation(&mut rng);
        let b = euler_rotation(&mut rng);
        u = a.kron(&b).matmul(&u);
        if layer < 3 {
            u = cnot.matmul(&u);
        }
    }
    u
}

fn euler_rotation(rng: &mut ChaCha8Rng) -> Matrix {
    let theta: f64 = rng.random_range(0.0..TAU);
    let phi: f64 = rng.random_range(0.0..TAU);
    let lambda: f64 = rng.random_range(0.0..TAU);
    let (s, c) = (libm::sin(theta / 2.0), libm::cos(theta / 2.0));
    let phase = |a: f64| C64::new(libm::cos(a), libm::sin(a));
    Matrix::from_vec(
        2,
        alloc::vec![
            C64::new(c, 0.0),
            -phase(lambda) * s,
            phase(phi) * s,
            phase(phi + lambda) * c
        ],
    )
    .expect("2x2")
}

#[derive(Clone, Debug)]
pub struct BellDiagnostics {
    /// Measures of Alice's two relative descriptors right after she
    /// measures her particle.
    pub alice_meter_measures: [f64; 2],
    pub bob_meter_measures: [f64; 2],
    /// Variance test of Alice's `z` component right after she measures.
    pub alice_z_after_measurement: Sharpness,
    /// Largest of: branch sums against foliation bases, and foliation bases
    /// against the step-evolved descriptors.
    pub reconstruction_residual: f64,
    /// Largest change of a descriptor untouched by the slice being applied.
    pub locality_residual: f64,
}

#[derive(Clone, Debug)]
pub struct BellOutcome {
    pub config: BellConfig,
    /// Measures of Charlie's four relative descriptors, by record value
    /// `00, 01, 10, 11` (Alice's bit first).
    pub measures: [f64; 4],
    /// `⟨|k⟩⟨k|⟩` on the record, from the final record descriptor.
    pub record_measures: [f64; 4],
    pub oracle: [f64; 4],
    pub expected: [f64; 4],
    pub alice_marginal: [f64; 2],
    pub bob_marginal: [f64; 2],
    pub oracle_alice_marginal: [f64; 2],
    pub oracle_bob_marginal: [f64; 2],
    /// Branch labels, by record value.
    pub labels: Vec<Vec<BranchStep>>,
    pub diagnostics: BellDiagnostics,
}

impl BellOutcome {
    pub fn closed_form_residual(&self) -> f64 {
        max_abs_diff(&self.measures, &self.expected)
    }

    /// Largest gap between any descriptor-derived measure and the oracle.
    pub fn oracle_residual(&self) -> f64 {
        max_abs_diff(&self.measures, &self.oracle)
            .max(max_abs_diff(&self.record_measures, &self.oracle))
            .max(max_abs_diff(
                &self.alice_marginal,
                &self.oracle_alice_marginal,
            ))
            .max(max_abs_diff(&self.bob_marginal, &self.oracle_bob_marginal))
    }

    pub fn measure_sum_defect(&self) -> f64 {
        (self.measures.iter().sum::<f64>() - 1.0).abs()
    }
}

pub(crate) fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Snapshots taken while stepping a Bell network.
struct Trace {
    bell: BellNetwork,
    outcome: BellOutcome,
    q1_z_at_measurement: Operator,
    q2_z_at_measurement: Operator,
    alice_control: Operator,
    bob_control: Operator,
    decoherence: Option<DecoherenceSnapshot>,
    bob_after_undo: Option<f64>,
}

struct DecoherenceSnapshot {
    q1_before: [Operator; 2],
    q1_after: [Operator; 2],
    env_x_before: Operator,
    env_initial_x: Operator,
}

fn run_trace(cfg: &BellConfig) -> Result<Trace> {
    let tol = cfg.tolerance;
    let bell = build_bell_network(cfg)?;
    let (roles, sched) = (&bell.roles, bell.schedule);
    let network = &bell.network;
    let layout = network.layout().clone();

    let mut set = DescriptorSet::initial(&layout)?;
    let initial = set.clone();
    let mut locality: f64 = 0.0;
    let mut reconstruction: f64 = 0.0;
    let mut meter = None;
    let mut record: Option<Foliation> = None;
    let mut q_z_at_measurement = None;
    let mut alice_control = None;
    let mut bob_control = None;
    let mut alice_marginal = [0.0; 2];
    let mut bob_marginal = [0.0; 2];
    let mut decoherence = None;
    let mut bob_after_undo = None;
    let mut alice_z_after = None;

    for t in 0..network.steps() {
        let slice = network.slice(t);
        let mut pending: Vec<(SubsystemId, Foliation)> = Vec::new();

        if t == sched.measurement {
            let (q1z, q2z) = (set.get(roles.q1).z().clone(), set.get(roles.q2).z().clone());
            let alice = foliate(
                set.get(roles.alice[0]),
                &Control::new(&q1z, format!("q_1z({t})")),
                &GateKind::Plus(1),
                tol,
            )?;
            let bob = foliate(
                set.get(roles.bob[0]),
                &Control::new(&q2z, format!("q_2z({t})")),
                &GateKind::Plus(1),
                tol,
            )?;
            meter = Some((pair(&alice.measures()), pair(&bob.measures())));
            pending.push((roles.alice[0], alice));
            pending.push((roles.bob[0], bob));
            q_z_at_measurement = Some((q1z, q2z));
        }
        if t == sched.alice_record {
            let relay = roles.alice_relay();
            let control = set.get(relay).z().clone();
            let fol = foliate(
                set.get(roles.record),
                &relay_control(&control, layout.label(relay), t, &roles.alice, "1"),
                &GateKind::Plus(ALICE_SHIFT),
                tol,
            )?;
            alice_marginal = side_marginal(&control, tol)?;
            alice_control = Some(control);
            record = Some(fol);
        }
        if t == sched.bob_record {
            let relay = roles.bob_relay();
            let control = set.get(relay).z().clone();
            let fol = record
                .take()
                .ok_or(Error::UnsupportedGate("bob recorded before alice"))?
                .refine(
                    &relay_control(&control, layout.label(relay), t, &roles.bob, "2"),
                    &GateKind::Plus(BOB_SHIFT),
                    tol,
                )?;
            bob_marginal = side_marginal(&control, tol)?;
            bob_control = Some(control);
            record = Some(fol);
        }

        let next = step_evolve(&set, slice)?;
        locality = locality.max(locality_residual(&set, &next, slice));

        if t == sched.measurement {
            alice_z_after = Some(is_sharp(next.get(roles.alice[0]).z(), tol)?);
        }
        for (id, fol) in &pending {
            reconstruction = reconstruction
                .max(fol.reconstruction_residual())
                .max(fol.base().distance(next.get(*id)));
        }
        if let Some(fol) = &record {
            if t == sched.alice_record || t == sched.bob_record {
                reconstruction = reconstruction
                    .max(fol.reconstruction_residual())
                    .max(fol.base().distance(next.get(roles.record)));
            }
        }
        if Some(t) == sched.decoherence {
            let (env, _) = roles
                .environment
                .expect("decohered layout has an environment");
            decoherence = Some(DecoherenceSnapshot {
                q1_before: set.get(roles.q1).components().clone(),
                q1_after: next.get(roles.q1).components().clone(),
                env_x_before: set.get(env).x().clone(),
                env_initial_x: initial.get(env).x().clone(),
            });
        }
        if sched.undo == Some(t) {
            bob_after_undo = Some(next.get(roles.bob[0]).distance(initial.get(roles.bob[0])));
        }
        set = next;
    }

    let record = record.ok_or(Error::UnsupportedGate("network has no record interactions"))?;
    let mut measures = [0.0; 4];
    let mut labels: Vec<Vec<BranchStep>> = alloc::vec![Vec::new(); 4];
    for branch in record.branches() {
        let k = 2 * branch.label[0].sign.bit() as usize + branch.label[1].sign.bit() as usize;
        measures[k] = branch.measure;
        labels[k] = branch.label.clone();
    }
    let record_desc = set.get(roles.record);
    let record_measures: [f64; 4] =
        core::array::from_fn(|k| reference_expectation(&record_desc.value_projector(k)).re);

    let state = simulate_statevector(network, network.steps())?;
    let dist = joint_outcome_distribution(&state, &[roles.record])?;
    let oracle: [f64; 4] = core::array::from_fn(|k| dist.get(&[k]));
    let alice_dist = joint_outcome_distribution(&state, &[roles.alice_relay()])?;
    let bob_dist = joint_outcome_distribution(&state, &[roles.bob_relay()])?;

    let (alice_meter, bob_meter) = meter.expect("measurement slice visited");
    let (q1z, q2z) = q_z_at_measurement.expect("measurement slice visited");
    let alice_z_after = alice_z_after.expect("measurement slice visited");

    let outcome = BellOutcome {
        config: *cfg,
        measures,
        record_measures,
        oracle,
        expected: closed_form_measures(cfg.theta, cfg.effective_phi()),
        alice_marginal,
        bob_marginal,
        oracle_alice_marginal: [alice_dist.get(&[0]), alice_dist.get(&[1])],
        oracle_bob_marginal: [bob_dist.get(&[0]), bob_dist.get(&[1])],
        labels,
        diagnostics: BellDiagnostics {
            alice_meter_measures: alice_meter,
            bob_meter_measures: bob_meter,
            alice_z_after_measurement: alice_z_after,
            reconstruction_residual: reconstruction,
            locality_residual: locality,
        },
    };
    Ok(Trace {
        bell,
        outcome,
        q1_z_at_measurement: q1z,
        q2_z_at_measurement: q2z,
        alice_control: alice_control.expect("alice recorded"),
        bob_control: bob_control.expect("bob recorded"),

        decoherence,
        bob_after_undo,
    })
}

fn pair(v: &[f64]) -> [f64; 2] {
    [v[0], v[1]]
}

fn side_marginal(control: &Operator, tol: Tolerance) -> Result<[f64; 2]> {
    Ok([
        branch_measure(&[projector_pm(control, Sign::Plus, tol)?], tol)?,
        branch_measure(&[projector_pm(control, Sign::Minus, tol)?], tol)?,
    ])
}

fn relay_control<'a>(
    control: &'a Operator,
    label: &str,
    t: usize,
    chain: &[SubsystemId],
    particle: &str,
) -> Control<'a> {
    let c = Control::new(
        control,
        format!("q_{}z({t})", label.trim_start_matches('Q')),
    );
    if chain.len() > 1 {
        let mut factors: Vec<String> = (0..chain.len())
            .map(|i| format!("q_{}{}z", &label[1..2], "'".repeat(i)))
            .collect();
        factors.push(format!("q_{particle}z(rotated)"));
        c.with_factors(factors)
    } else {
        c
    }
}

/// Runs a Bell network and analyses Charlie's record by foliation.
pub fn run_bell(cfg: &BellConfig) -> Result<BellOutcome> {
    Ok(run_trace(cfg)?.outcome)
}

#[derive(Clone, Debug)]
pub struct DecoherenceOutcome {
    pub outcome: BellOutcome,
    pub plain_measures: [f64; 4],
    /// `⟨q_1x⟩` right after the environment interaction.
    pub q1_x_mean: f64,
    /// `‖q_1x(after) − q_1x(before)·q̄_Ex‖`.
    pub wire_label_residual: f64,
    /// `‖q_1z(after) − q_1z(before)‖`.
    pub q1_z_residual: f64,
    /// Largest off-diagonal magnitude of `Q1`'s reduced density matrix right
    /// after the environment interaction.
    pub q1_coherence: f64,
    /// `‖q̄_Ex − q_Ex(0)‖`; zero for a fresh environment.
    pub environment_genericity: f64,
}

impl DecoherenceOutcome {
    pub fn plain_residual(&self) -> f64 {
        max_abs_diff(&self.outcome.measures, &self.plain_measures)
    }
}

pub fn run_decoherence(
    theta: f64,
    phi: f64,
    environment: Environment,
    tol: Tolerance,
) -> Result<DecoherenceOutcome> {
    let cfg = BellConfig::plain(theta, phi)
        .with_variant(Variant::Decohered(environment))
        .with_tolerance(tol);
    let trace = run_trace(&cfg)?;
    let plain = run_bell(&BellConfig::plain(theta, phi).with_tolerance(tol))?;
    let snap = trace.decoherence.expect("decohered network");
    let [x_before, z_before] = &snap.q1_before;
    let [x_after, z_after] = &snap.q1_after;
    let t = trace.bell.schedule.decoherence.expect("decohered network");
    let state = simulate_statevector(&trace.bell.network, t + 1)?;
    let rho = reduced_density_matrix(&state, trace.bell.roles.q1)?;
    Ok(DecoherenceOutcome {
        plain_measures: plain.measures,
        q1_x_mean: reference_expectation(x_after).re,
        wire_label_residual: x_after.distance(&(x_before * &snap.env_x_before)),
        q1_z_residual: z_after.distance(z_before),
        q1_coherence: rho.get(0, 1).norm().max(rho.get(1, 0).norm()),
        environment_genericity: snap.env_x_before.distance(&snap.env_initial_x),
        outcome: trace.outcome,
    })
}

#[derive(Clone, Debug)]
pub struct ChainOutcome {
    pub outcome: BellOutcome,
    pub plain_measures: [f64; 4],
    /// `‖c_A − (Π_relays q_z(0))·q_1z(rotated)‖` for Alice's record control.
    pub alice_factor_residual: f64,
    pub bob_factor_residual: f64,
    /// Sharpness of the extra relay factors `Π_relays q_z(0)` on each side.
    pub alice_extra_factor: Sharpness,
    pub bob_extra_factor: Sharpness,
}

impl ChainOutcome {
    pub fn plain_residual(&self) -> f64 {
        max_abs_diff(&self.outcome.measures, &self.plain_measures)
    }
}

pub fn run_chain(
    theta: f64,
    phi: f64,
    alice: usize,
    bob: usize,
    tol: Tolerance,
) -> Result<ChainOutcome> {
    let cfg = BellConfig::plain(theta, phi)
        .with_variant(Variant::Chained { alice, bob })
        .with_tolerance(tol);
    let trace = run_trace(&cfg)?;
    let plain = run_bell(&BellConfig::plain(theta, phi).with_tolerance(tol))?;
    let layout = trace.bell.network.layout().clone();
    let initial = DescriptorSet::initial(&layout)?;
    let extra = |chain: &[SubsystemId]| {
        chain.iter().fold(Operator::identity(&layout), |acc, &id| {
            &acc * initial.get(id).z()
        })
    };
    let alice_extra = extra(&trace.bell.roles.alice);
    let bob_extra = extra(&trace.bell.roles.bob);
    Ok(ChainOutcome {
        plain_measures: plain.measures,
        alice_factor_residual: trace
            .alice_control
            .distance(&(&alice_extra * &trace.q1_z_at_measurement)),
        bob_factor_residual: trace
            .bob_control
            .distance(&(&bob_extra * &trace.q2_z_at_measurement)),
        alice_extra_factor: is_sharp(&alice_extra, tol)?,
        bob_extra_factor: is_sharp(&bob_extra, tol)?,
        outcome: trace.outcome,
    })
}

#[derive(Clone, Debug)]
pub struct WignerOutcome {
    pub outcome: BellOutcome,
    /// `conditional[i][j]`: measure of Bob's record `j` given Alice's record
    /// `i`; `None` when Alice's marginal is below tolerance.
    pub conditional: [[Option<f64>; 2]; 2],
    /// Distance of Bob's descriptor after the undo from its initial form.
    pub undo_residual: f64,
}

/// Undo Bob's measurement, rotate his particle by `π − φ`, and remeasure.
pub fn run_wigner_undo(theta: f64, phi: f64, tol: Tolerance) -> Result<WignerOutcome> {
    run_wigner_undo_with(theta, phi, PI - phi, tol)
}

pub fn run_wigner_undo_with(
    theta: f64,
    phi: f64,
    rerotation: f64,
    tol: Tolerance,
) -> Result<WignerOutcome> {
    let cfg = BellConfig::plain(theta, phi)
        .with_variant(Variant::WignerUndo { rerotation })
        .with_tolerance(tol);
    let trace = run_trace(&cfg)?;
    Ok(WignerOutcome {
        conditional: conditional_measures(&trace.outcome.measures, tol),
        undo_residual: trace.bob_after_undo.expect("undo slice visited"),
        outcome: trace.outcome,
    })
}

/// `result[i][j]`: joint measure of records `(i, j)` over Alice's marginal for
/// `i`, or `None` when that marginal is below tolerance.
pub fn conditional_measures(measures: &[f64; 4], tol: Tolerance) -> [[Option<f64>; 2]; 2] {
    core::array::from_fn(|i| {
        let marginal = measures[2 * i] + measures[2 * i + 1];
        core::array::from_fn(|j| {
            if tol.accepts(marginal) {
                None
            } else {
                Some(measures[2 * i + j] / marginal)
            }
        })
    })
}

/// Two networks on `(Q1, Q2)` that leave `|00⟩` unchanged but give
/// different descriptors.
#[derive(Clone, Debug)]
pub struct NonIsomorphismReport {
    /// `‖ψ_empty − ψ_cnot‖`.
    pub state_distance: f64,
    /// Largest componentwise distance between the two final descriptor sets.
    pub descriptor_distance: f64,
    /// `‖q_1x(cnot) − q_1x q_2x‖`.
    pub cnot_x_residual: f64,
    /// Largest gap between the two networks' single-qubit expectations of
    /// `q_x`, `q_y`, `q_z`.
    pub expectation_gap: f64,
    /// Distance of the empty network's descriptors from the initial ones.
    pub empty_residual: f64,
}

pub fn nonisomorphism_witness() -> Result<NonIsomorphismReport> {
    let layout = SpaceLayout::new([("Q1", 2), ("Q2", 2)])?;
    let mut empty = Network::builder(&layout);
    empty.parallel(&[])?;
    let empty = empty.build()?;
    let mut cnot = Network::builder(&layout);
    cnot.step(GateKind::Cnot, &["Q1", "Q2"])?;
    let cnot = cnot.build()?;

    let initial = DescriptorSet::initial(&layout)?;
    let after_empty = step_evolve(&initial, empty.slice(0))?;
    let after_cnot = step_evolve(&initial, cnot.slice(0))?;
    let state_distance =
        simulate_statevector(&empty, 1)?.distance(&simulate_statevector(&cnot, 1)?);

    let (q1, q2) = (initial.get(SubsystemId(0)), initial.get(SubsystemId(1)));
    let cnot_x_residual = after_cnot
        .get(SubsystemId(0))
        .x()
        .distance(&(q1.x() * q2.x()));
    let mut expectation_gap: f64 = 0.0;
    for id in layout.ids() {
        let (a, b) = (after_empty.get(id), after_cnot.get(id));
        for (oa, ob) in [
            (a.x().clone(), b.x().clone()),
            (a.y(), b.y()),
            (a.z().clone(), b.z().clone()),
        ] {
            expectation_gap = expectation_gap
                .max((reference_expectation(&oa) - reference_expectation(&ob)).norm());
        }
    }
    Ok(NonIsomorphismReport {
        state_distance,
        descriptor_distance: after_empty.distance(&after_cnot),
        cnot_x_residual,
        expectation_gap,
        empty_residual: after_empty.distance(&initial),
    })
}
