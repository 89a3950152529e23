//! Descriptors and their evolution.
//!
//! A descriptor is the pair of generators attached to one subsystem: `(q_x,
//! q_z)` for a qubit, `(shift, clock)` for a `d`-level system (the two agree
//! when `d = 2`). A gate between `t` and `t+1` acts on every descriptor by
//! conjugation with the gate's functional form evaluated on the time-`t`
//! descriptors of the subsystems it touches.

use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::gates::{GateApplication, GateKind, Network};
use crate::matrix::{Matrix, C64, ZERO};
use crate::operator::{
    embed_local, projector_unchecked, qudit_shift_clock, reference_expectation,
    reference_second_moment, root_of_unity, Operator, Sign, SpaceLayout, SubsystemId, Tolerance,
};

#[derive(Clone, Debug, PartialEq)]
pub struct Descriptor {
    subsystem: SubsystemId,
    time: usize,
    components: [Operator; 2],
}

impl Descriptor {
    pub fn new(subsystem: SubsystemId, time: usize, components: [Operator; 2]) -> Self {
        Self {
            subsystem,
            time,
            components,
        }
    }

    pub fn subsystem(&self) -> SubsystemId {
        self.subsystem
    }

    pub fn time(&self) -> usize {
        self.time
    }

    pub fn components(&self) -> &[Operator; 2] {
        &self.components
    }

    pub fn layout(&self) -> &Arc<SpaceLayout> {
        self.components[0].layout()
    }

    /// Level count of the subsystem.
    pub fn levels(&self) -> usize {
        self.layout().dim(self.subsystem)
    }

    /// `q_x`, or the shift generator for qudits.
    pub fn x(&self) -> &Operator {
        &self.components[0]
    }

    /// `q_z`, or the clock generator for qudits.
    pub fn z(&self) -> &Operator {
        &self.components[1]
    }

    /// `q_y = i q_x q_z`. Only meaningful for qubits.
    pub fn y(&self) -> Operator {
        (self.x() * self.z()).scale(C64::new(0.0, 1.0))
    }

    /// Largest componentwise Frobenius distance.
    pub fn distance(&self, other: &Descriptor) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.distance(b))
            .fold(0.0, f64::max)
    }

    /// Conjugates every component: `U† c U`.
    pub fn conjugated_by(&self, u: &Operator) -> Descriptor {
        let u_dag = u.adjoint();
        let [x, z] = &self.components;
        Descriptor {
            subsystem: self.subsystem,
            time: self.time,
            components: [&(&u_dag * x) * u, &(&u_dag * z) * u],
        }
    }

    pub(crate) fn map(&self, time: usize, f: impl Fn(&Operator) -> Operator) -> Descriptor {
        let [x, z] = &self.components;
        Descriptor {
            subsystem: self.subsystem,
            time,
            components: [f(x), f(z)],
        }
    }

    pub(crate) fn with_time(mut self, time: usize) -> Descriptor {
        self.time = time;
        self
    }

    /// Projector onto computational value `k`, written as a polynomial in the
    /// clock component: `(1/d) Σ_m ω^{-km} z^m`.
    pub fn value_projector(&self, k: usize) -> Operator {
        let d = self.levels();
        let z = self.z();
        let mut acc = Operator::zero(z.layout());
        let mut power = Operator::identity(z.layout());
        for m in 0..d {
            let coeff = root_of_unity(d, -((k * m) as i64)) / d as f64;
            acc = &acc + &power.scale(coeff);
            if m + 1 < d {
                power = &power * z;
            }
        }
        acc
    }

    /// The computational observable `Σ_j j |j⟩⟨j|` as a polynomial in the
    /// clock component.
    pub fn computational_observable(&self) -> Operator {
        let layout = self.layout().clone();
        (0..self.levels()).fold(Operator::zero(&layout), |acc, j| {
            &acc + &self.value_projector(j).scale_real(j as f64)
        })
    }
}

/// Initial descriptor `(σ_x ⊗ 1, σ_z ⊗ 1)` of a qubit.
pub fn initial_qubit_descriptor(i: SubsystemId, layout: &Arc<SpaceLayout>) -> Result<Descriptor> {
    layout.check(i)?;
    if layout.dim(i) != 2 {
        return Err(Error::NotQubit(layout.label(i).to_string()));
    }
    initial_qudit_descriptor(i, layout)
}

/// Initial descriptor `(shift ⊗ 1, clock ⊗ 1)` of a `d`-level subsystem.
pub fn initial_qudit_descriptor(i: SubsystemId, layout: &Arc<SpaceLayout>) -> Result<Descriptor> {
    layout.check(i)?;
    let (shift, clock) = qudit_shift_clock(layout.dim(i))?;
    Ok(Descriptor {
        subsystem: i,
        time: 0,
        components: [
            embed_local(&shift, i, layout)?,
            embed_local(&clock, i, layout)?,
        ],
    })
}

/// The descriptors of every subsystem of a layout at one time.
#[derive(Clone, Debug)]
pub struct DescriptorSet {
    layout: Arc<SpaceLayout>,
    time: usize,
    descriptors: Vec<Descriptor>,
}

impl DescriptorSet {
    pub fn initial(layout: &Arc<SpaceLayout>) -> Result<Self> {
        let descriptors = layout
            .ids()
            .map(|id| initial_qudit_descriptor(id, layout))
            .collect::<Result<_>>()?;
        Ok(Self {
            layout: layout.clone(),
            time: 0,
            descriptors,
        })
    }

    pub fn layout(&self) -> &Arc<SpaceLayout> {
        &self.layout
    }

    pub fn time(&self) -> usize {
        self.time
    }

    pub fn get(&self, id: SubsystemId) -> &Descriptor {
        &self.descriptors[id.0]
    }

    pub fn by_label(&self, label: &str) -> Result<&Descriptor> {
        Ok(self.get(self.layout.id(label)?))
    }

    pub fn descriptors(&self) -> &[Descriptor] {
        &self.descriptors
    }

    /// Largest deviation, over all subsystems, from the algebraic relations
    /// of the initial generators.
    ///
    /// Qubits: `x² = z² = 1`, `{x, z} = 0`. Qudits: `x^d = z^d = 1`,
    /// `z x = ω x z`. Components of distinct subsystems commute.
    pub fn algebra_residual(&self) -> f64 {
        let id = Operator::identity(&self.layout);
        let mut worst: f64 = 0.0;
        for desc in &self.descriptors {
            let d = desc.levels();
            let (x, z) = (desc.x(), desc.z());
            worst = worst
                .max(x.pow(d).distance(&id))
                .max(z.pow(d).distance(&id));
            if d == 2 {
                worst = worst.max(x.anticommutator_norm(z));
            } else {
                let zx = z * x;
                let xz = (x * z).scale(root_of_unity(d, 1));
                worst = worst.max(zx.distance(&xz));
            }
        }
        for (i, a) in self.descriptors.iter().enumerate() {
            for b in &self.descriptors[i + 1..] {
                for ca in a.components() {
                    for cb in b.components() {
                        worst = worst.max(ca.commutator_norm(cb));
                    }
                }
            }
        }
        worst
    }

    /// Largest componentwise distance to another set over the same layout.
    pub fn distance(&self, other: &DescriptorSet) -> f64 {
        self.descriptors
            .iter()
            .zip(&other.descriptors)
            .map(|(a, b)| a.distance(b))
            .fold(0.0, f64::max)
    }
}

/// Evaluates a gate's functional form on component pairs, one pair per
/// acted subsystem. `levels` gives each acted subsystem's dimension.
pub(crate) fn form_on(kind: &GateKind, levels: &[usize], args: &[&[Operator; 2]]) -> Operator {
    let layout = args[0][0].layout();
    let identity = Operator::identity(layout);
    match kind {
        GateKind::H => (&args[0][0] + &args[0][1]).scale_real(FRAC_1_SQRT_2),
        GateKind::Ry(theta) => {
            let (s, c) = (libm::sin(theta / 2.0), libm::cos(theta / 2.0));
            &identity.scale_real(c) + &(&args[0][0] * &args[0][1]).scale_real(s)
        }
        GateKind::Cnot => form_on(&GateKind::CtrlPlus(1), levels, args),
        GateKind::CtrlPlus(k) => {
            let control_z = &args[0][1];
            let shifted = args[1][0].pow(k % levels[1]);
            &projector_unchecked(control_z, Sign::Plus)
                + &(&projector_unchecked(control_z, Sign::Minus) * &shifted)
        }
        GateKind::Plus(k) => args[0][0].pow(k % levels[0]),
        GateKind::Custom(m) => weyl_form(m, levels, args),
    }
}

/// Expands a local matrix over monomials `Π_j X_j^{a_j} Z_j^{b_j}` of
/// generalized Paulis and substitutes the descriptor components for them.
///
/// The monomials are orthogonal under the Hilbert–Schmidt product with norm
/// equal to the local dimension, which fixes the coefficients.
fn weyl_form(local: &Matrix, levels: &[usize], args: &[&[Operator; 2]]) -> Operator {
    let layout = args[0][0].layout();
    let generators: Vec<(Matrix, Matrix)> = levels
        .iter()
        .map(|&d| qudit_shift_clock(d).expect("validated dimension"))
        .collect();
    let powers: Vec<(Vec<Operator>, Vec<Operator>)> = args
        .iter()
        .zip(levels)
        .map(|(comps, &d)| {
            let mut xs = alloc::vec![Operator::identity(layout)];
            let mut zs = alloc::vec![Operator::identity(layout)];
            for p in 1..d {
                xs.push(&xs[p - 1] * &comps[0]);
                zs.push(&zs[p - 1] * &comps[1]);
            }
            (xs, zs)
        })
        .collect();

    let local_dim = local.dim() as f64;
    let mut acc = Operator::zero(layout);
    let mut exponents = alloc::vec![(0usize, 0usize); levels.len()];
    loop {
        let mut monomial = Matrix::identity(1);
        for ((a, b), (x, z)) in exponents.iter().zip(&generators) {
            monomial = monomial.kron(&x.pow(*a).matmul(&z.pow(*b)));
        }
        let coeff: C64 = monomial
            .data()
            .iter()
            .zip(local.data())
            .map(|(m, g)| m.conj() * g)
            .sum::<C64>()
            / local_dim;
        if coeff != ZERO {
            let mut term = Operator::identity(layout);
            for ((a, b), (xs, zs)) in exponents.iter().zip(&powers) {
                if *a > 0 {
                    term = &term * &xs[*a];
                }
                if *b > 0 {
                    term = &term * &zs[*b];
                }
            }
            acc = &acc + &term.scale(coeff);
        }
        // Odometer over (a_j, b_j) ∈ [0, d_j)².
        let mut j = 0;
        loop {
            if j == levels.len() {
                return acc;
            }
            let d = levels[j];
            exponents[j].1 += 1;
            if exponents[j].1 == d {
                exponents[j].1 = 0;
                exponents[j].0 += 1;
                if exponents[j].0 == d {
                    exponents[j].0 = 0;
                    j += 1;
                    continue;
                }
            }
            break;
        }
    }
}

/// The gate's functional form evaluated on the given descriptors, which must
/// be those of the gate's acted subsystems, in order, at a common time.
pub fn functional_form(gate: &GateApplication, args: &[&Descriptor]) -> Result<Operator> {
    if args.len() != gate.acted().len() {
        return Err(Error::ArgumentCount {
            expected: gate.acted().len(),
            found: args.len(),
        });
    }
    for (index, (arg, &id)) in args.iter().zip(gate.acted()).enumerate() {
        if arg.subsystem() != id {
            return Err(Error::SubsystemMismatch { index });
        }
        if arg.time() != args[0].time() {
            return Err(Error::TimeMismatch {
                expected: args[0].time(),
                found: arg.time(),
            });
        }
    }
    let layout = args[0].layout();
    let levels: Vec<usize> = gate.acted().iter().map(|&id| layout.dim(id)).collect();
    let comps: Vec<&[Operator; 2]> = args.iter().map(|d| d.components()).collect();
    Ok(form_on(gate.kind(), &levels, &comps))
}

/// One Newton-Schulz step `u (3 − u†u) / 2` toward the nearest unitary.
///
/// A form evaluated on descriptors that carry rounding error is unitary only
/// up to that error, and conjugating by it feeds the error back into every
/// descriptor. Polishing keeps the drift from compounding across slices.
pub(crate) fn polish_unitary(u: Operator) -> Operator {
    let gram = &u.adjoint() * &u;
    let correction = (&Operator::identity(u.layout()).scale_real(3.0) - &gram).scale_real(0.5);
    &u * &correction
}

/// Advances every descriptor through one time slice.
///
/// Gates in a slice act on disjoint subsystems, so their functional forms
/// commute and the slice acts through their product.
pub fn step_evolve(set: &DescriptorSet, slice: &[GateApplication]) -> Result<DescriptorSet> {
    let mut u = Operator::identity(&set.layout);
    for gate in slice {
        if gate.time() != set.time {
            return Err(Error::TimeMismatch {
                expected: set.time,
                found: gate.time(),
            });
        }
        let args: Vec<&Descriptor> = gate.acted().iter().map(|&id| set.get(id)).collect();
        u = &u * &functional_form(gate, &args)?;
    }
    let u = polish_unitary(u);
    let time = set.time + 1;
    let descriptors = set
        .descriptors
        .iter()
        .map(|d| d.conjugated_by(&u).with_time(time))
        .collect();
    Ok(DescriptorSet {
        layout: set.layout.clone(),
        time,
        descriptors,
    })
}

/// `q_i(t) = U† q_i(0) U` with `U` the whole-network matrix up to `t`.
pub fn cumulative_evolve(
    initial: &DescriptorSet,
    network: &Network,
    t: usize,
) -> Result<DescriptorSet> {
    if initial.time != 0 {
        return Err(Error::TimeMismatch {
            expected: 0,
            found: initial.time,
        });
    }
    let u = network.unitary_until(t)?;
    let descriptors = initial
        .descriptors
        .iter()
        .map(|d| d.conjugated_by(&u).with_time(t))
        .collect();
    Ok(DescriptorSet {
        layout: initial.layout.clone(),
        time: t,
        descriptors,
    })
}

/// Result of stepping a descriptor set through a whole network.
#[derive(Clone, Debug)]
pub struct Evolution {
    pub history: Vec<DescriptorSet>,
    /// Per slice, the largest change of a descriptor the slice did not act on.
    pub locality_residuals: Vec<f64>,
}

/// Steps from the initial descriptors through every slice of `network`.
pub fn evolve_network(network: &Network) -> Result<Evolution> {
    let mut set = DescriptorSet::initial(network.layout())?;
    let mut history = alloc::vec![set.clone()];
    let mut locality_residuals = Vec::with_capacity(network.steps());
    for t in 0..network.steps() {
        let slice = network.slice(t);
        let next = step_evolve(&set, slice)?;
        locality_residuals.push(locality_residual(&set, &next, slice));
        history.push(next.clone());
        set = next;
    }
    Ok(Evolution {
        history,
        locality_residuals,
    })
}

/// Largest change, between two consecutive sets, of a descriptor whose
/// subsystem no gate in `slice` acts on.
pub fn locality_residual(
    before: &DescriptorSet,
    after: &DescriptorSet,
    slice: &[GateApplication],
) -> f64 {
    before
        .layout
        .ids()
        .filter(|id| !slice.iter().any(|g| g.acted().contains(id)))
        .map(|id| before.get(id).distance(after.get(id)))
        .fold(0.0, f64::max)
}

/// Variance test against the reference vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sharpness {
    pub sharp: bool,
    /// `⟨o⟩` when sharp.
    pub value: Option<f64>,
    pub mean: f64,
    pub variance: f64,
}

/// An observable is sharp when `⟨o²⟩ = ⟨o⟩²` within tolerance.
pub fn is_sharp(o: &Operator, tol: Tolerance) -> Result<Sharpness> {
    let residual = o.matrix().hermiticity_residual();
    if !tol.accepts(residual) {
        return Err(Error::NotHermitian { residual });
    }
    let mean = reference_expectation(o).re;
    let second = reference_second_moment(o).re;
    let variance = second - mean * mean;
    let sharp = tol.accepts(variance.abs());
    Ok(Sharpness {
        sharp,
        value: sharp.then_some(mean),
        mean,
        variance,
    })
}
