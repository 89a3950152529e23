//! Schrödinger-picture state-vector simulation.
//!
//! Evolves `|0…0⟩` through the embedded gate matrices of a network. It shares
//! layouts and gate matrices with the descriptor engine but none of its
//! evolution code, so it serves as an independent check on every measure the
//! descriptors produce.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gates::Network;
use crate::matrix::{Matrix, C64, ZERO};
use crate::operator::{SpaceLayout, SubsystemId};

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    layout: Arc<SpaceLayout>,
    amplitudes: Vec<C64>,
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn reference(layout: &Arc<SpaceLayout>) -> Self {
        let mut amplitudes = alloc::vec![ZERO; layout.total_dim()];
        amplitudes[0] = C64::new(1.0, 0.0);
        Self {
            layout: layout.clone(),
            amplitudes,
        }
    }

    pub fn layout(&self) -> &Arc<SpaceLayout> {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>())
    }

    /// Euclidean distance between amplitude vectors.
    pub fn distance(&self, other: &StateVector) -> f64 {
        libm::sqrt(
            self.amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>(),
        )
    }
}

/// Applies every gate with time below `t` to `|0…0⟩`.
pub fn simulate_statevector(network: &Network, t: usize) -> Result<StateVector> {
    if t > network.steps() {
        return Err(Error::TimeOutOfRange {
            t,
            len: network.steps(),
        });
    }
    let mut state = StateVector::reference(network.layout());
    for gate in network.gates().iter().take_while(|g| g.time() < t) {
        let g = gate.embedded(network.layout())?;
        state.amplitudes = g.matrix().apply(&state.amplitudes);
    }
    Ok(state)
}

/// Born-rule probabilities of computational outcomes on a list of
/// subsystems, marginalizing the rest.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    dims: Vec<usize>,
    probabilities: Vec<f64>,
}

impl Distribution {
    /// Probability of the outcome whose digits are `outcome`, one per
    /// listed subsystem.
    pub fn get(&self, outcome: &[usize]) -> f64 {
        self.probabilities[self.flat(outcome)]
    }

    /// Probabilities in lexicographic outcome order.
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    fn flat(&self, outcome: &[usize]) -> usize {
        outcome
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&digit, &d)| acc * d + digit)
    }
}

pub fn joint_outcome_distribution(
    state: &StateVector,
    subsystems: &[SubsystemId],
) -> Result<Distribution> {
    let layout = &state.layout;
    for (i, &id) in subsystems.iter().enumerate() {
        layout.check(id)?;
        if subsystems[..i].contains(&id) {
            return Err(Error::RepeatedSubsystem(layout.label(id).into()));
        }
    }
    let dims: Vec<usize> = subsystems.iter().map(|&id| layout.dim(id)).collect();
    let mut probabilities = alloc::vec![0.0; dims.iter().product()];
    for (index, amp) in state.amplitudes.iter().enumerate() {
        let outcome = subsystems
            .iter()
            .fold(0, |acc, &id| acc * layout.dim(id) + layout.digit(index, id));
        probabilities[outcome] += amp.norm_sqr();
    }
    Ok(Distribution {
        dims,
        probabilities,
    })
}

/// Reduced density matrix of one subsystem.
pub fn reduced_density_matrix(state: &StateVector, id: SubsystemId) -> Result<Matrix> {
    let layout = &state.layout;
    layout.check(id)?;
    let d = layout.dim(id);
    let stride = layout.stride(id);
    let mut rho = Matrix::zeros(d);
    // Each index with digit 0 on `id` anchors one block of the partial trace.
    for index in (0..layout.total_dim()).filter(|&i| layout.digit(i, id) == 0) {
        for i in 0..d {
            let a = state.amplitudes[index + i * stride];
            for j in 0..d {
                let b = state.amplitudes[index + j * stride];
                rho.set(i, j, rho.get(i, j) + a * b.conj());
            }
        }
    }
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::GateKind;
    use core::f64::consts::FRAC_1_SQRT_2;

    fn bell_pair() -> Network {
        let layout = SpaceLayout::new([("Q1", 2), ("Q2", 2)]).unwrap();
        let mut b = Network::builder(&layout);
        b.step(GateKind::H, &["Q1"])
            .unwrap()
            .step(GateKind::Cnot, &["Q1", "Q2"])
            .unwrap();
        b.build().unwrap()
    }

    #[test]
    fn empty_network_leaves_reference() {
        let layout = SpaceLayout::new([("Q1", 2), ("S", 4)]).unwrap();
        let net = Network::builder(&layout).build().unwrap();
        let state = simulate_statevector(&net, 0).unwrap();
        assert_eq!(state, StateVector::reference(&layout));
    }

    #[test]
    fn hadamard_then_cnot_prepares_phi_plus() {
        let state = simulate_statevector(&bell_pair(), 2).unwrap();
        let expected = [FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2];
        for (a, e) in state.amplitudes().iter().zip(expected) {
            assert!((a - C64::new(e, 0.0)).norm() < 1e-15);
        }
        assert!((state.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bell_marginal_is_uniform() {
        let state = simulate_statevector(&bell_pair(), 2).unwrap();
        let dist = joint_outcome_distribution(&state, &[SubsystemId(0)]).unwrap();
        assert!((dist.get(&[0]) - 0.5).abs() < 1e-15);
        assert!((dist.get(&[1]) - 0.5).abs() < 1e-15);
        let joint = joint_outcome_distribution(&state, &[SubsystemId(1), SubsystemId(0)]).unwrap();
        assert!((joint.get(&[1, 1]) - 0.5).abs() < 1e-15);
        assert!(joint.get(&[0, 1]).abs() < 1e-15);
        assert!(joint_outcome_distribution(&state, &[SubsystemId(7)]).is_err());
    }

    #[test]
    fn reduced_density_matrix_of_bell_pair_is_maximally_mixed() {
        let state = simulate_statevector(&bell_pair(), 2).unwrap();
        let rho = reduced_density_matrix(&state, SubsystemId(1)).unwrap();
        assert!(rho.distance(&Matrix::identity(2).scale(C64::new(0.5, 0.0))) < 1e-15);
        let state = simulate_statevector(&bell_pair(), 1).unwrap();
        let rho = reduced_density_matrix(&state, SubsystemId(0)).unwrap();
        assert!((rho.get(0, 1).re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn out_of_range_time() {
        assert_eq!(
            simulate_statevector(&bell_pair(), 3).unwrap_err(),
            Error::TimeOutOfRange { t: 3, len: 2 }
        );
    }
}
