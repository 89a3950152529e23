//! Heisenberg-picture simulation of quantum networks with descriptors.
//!
//! Each subsystem of a quantum network carries a descriptor, a pair of
//! operators that generate its observables, while the reference vector
//! `|0…0⟩` never moves. Gates evolve descriptors locally; conditioned
//! interactions foliate them into relative descriptors whose measures are
//! reference expectations of projectors.
//!
//! The crate is `no_std` with `alloc`. IO, reports and the command line live
//! in the `descriptor-sim` crate.

#![no_std]

extern crate alloc;

pub mod bell;
pub mod chsh;
pub mod descriptor;
pub mod error;
pub mod foliation;
pub mod gates;
pub mod matrix;
pub mod operator;
pub mod oracle;

pub use descriptor::{
    cumulative_evolve, evolve_network, functional_form, initial_qubit_descriptor,
    initial_qudit_descriptor, is_sharp, locality_residual, step_evolve, Descriptor, DescriptorSet,
    Evolution, Sharpness,
};
pub use error::{Error, Result};
pub use foliation::{branch_measure, foliate, Branch, BranchStep, Control, Foliation};
pub use gates::{GateApplication, GateKind, Network, NetworkBuilder};
pub use matrix::{Matrix, C64};
pub use operator::{
    embed, embed_local, projector_pm, qudit_shift_clock, reference_expectation, Operator,
    ReferenceVector, Sign, SpaceLayout, SubsystemId, Tolerance,
};
pub use oracle::{
    joint_outcome_distribution, reduced_density_matrix, simulate_statevector, Distribution,
    StateVector,
};
