#![allow(dead_code)]

use std::f64::consts::TAU;
use std::sync::Arc;

use descriptor_core::{
    GateApplication, GateKind, Matrix, Network, SpaceLayout, SubsystemId, Tolerance, C64,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Haar-ish random unitary: Gram-Schmidt on a matrix of random entries.
pub fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> Matrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        for c in &cols {
            let overlap: C64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, a) in v.iter_mut().zip(c) {
                *x -= overlap * a;
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            cols.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    let mut data = vec![C64::new(0.0, 0.0); dim * dim];
    for (j, c) in cols.iter().enumerate() {
        for (i, x) in c.iter().enumerate() {
            data[i * dim + j] = *x;
        }
    }
    Matrix::from_vec(dim, data).unwrap()
}

pub fn random_layout(rng: &mut ChaCha8Rng, max_subsystems: usize) -> Arc<SpaceLayout> {
    let n = rng.random_range(1..=max_subsystems);
    let dims: Vec<(String, usize)> = (0..n)
        .map(|i| {
            let d = match rng.random_range(0..10) {
                0 => 3,
                1 => 4,
                _ => 2,
            };
            (format!("S{i}"), d)
        })
        .collect();
    SpaceLayout::new(dims).unwrap()
}

fn random_gate(rng: &mut ChaCha8Rng, layout: &SpaceLayout) -> (GateKind, Vec<SubsystemId>) {
    let ids: Vec<SubsystemId> = layout.ids().collect();
    let qubits: Vec<SubsystemId> = ids
        .iter()
        .copied()
        .filter(|&id| layout.dim(id) == 2)
        .collect();
    let pick = |rng: &mut ChaCha8Rng, from: &[SubsystemId]| from[rng.random_range(0..from.len())];
    loop {
        match rng.random_range(0..6) {
            0 if !qubits.is_empty() => return (GateKind::H, vec![pick(rng, &qubits)]),
            1 if !qubits.is_empty() => {
                return (
                    GateKind::Ry(rng.random_range(-TAU..TAU)),
                    vec![pick(rng, &qubits)],
                )
            }
            2 if qubits.len() >= 2 => {
                let c = pick(rng, &qubits);
                let t = pick(rng, &qubits);
                if c != t {
                    return (GateKind::Cnot, vec![c, t]);
                }
            }
            3 if !qubits.is_empty() && ids.len() >= 2 => {
                let c = pick(rng, &qubits);
                let t = pick(rng, &ids);
                if c != t {
                    let k = rng.random_range(1..layout.dim(t));
                    return (GateKind::CtrlPlus(k), vec![c, t]);
                }
            }
            4 => {
                let t = pick(rng, &ids);
                return (GateKind::Plus(rng.random_range(1..layout.dim(t))), vec![t]);
            }
            5 => {
                let a = pick(rng, &ids);
                let b = pick(rng, &ids);
                let acted = if a == b || rng.random_bool(0.5) {
                    vec![a]
                } else {
                    vec![a, b]
                };
                let dim = acted.iter().map(|&id| layout.dim(id)).product();
                return (GateKind::Custom(random_unitary(rng, dim)), acted);
            }
            _ => {}
        }
    }
}

/// A random timed network: gates join the current slice when they act on
/// fresh subsystems and a coin says so.
pub fn random_network(rng: &mut ChaCha8Rng, max_subsystems: usize, max_gates: usize) -> Network {
    let layout = random_layout(rng, max_subsystems);
    let count = rng.random_range(0..=max_gates);
    let mut gates = Vec::with_capacity(count);
    let mut time = 0;
    let mut busy: Vec<SubsystemId> = Vec::new();
    for i in 0..count {
        let (kind, acted) = random_gate(rng, &layout);
        let join = i > 0 && rng.random_bool(0.4) && acted.iter().all(|id| !busy.contains(id));
        if i > 0 && !join {
            time += 1;
            busy.clear();
        }
        busy.extend(&acted);
        gates.push(GateApplication::new(kind, acted, time, &layout, Tolerance::DEFAULT).unwrap());
    }
    let steps = if count == 0 { 0 } else { time + 1 };
    Network::new(layout, gates, steps).unwrap()
}
