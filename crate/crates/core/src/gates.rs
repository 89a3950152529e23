//! Gates and timed networks.

use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::matrix::{Matrix, C64};
use crate::operator::{embed, qudit_shift_clock, Operator, SpaceLayout, SubsystemId, Tolerance};

#[derive(Clone, Debug, PartialEq)]
pub enum GateKind {
    /// Hadamard on a qubit.
    H,
    /// Bloch-sphere rotation about y by the given angle in radians.
    Ry(f64),
    /// Controlled NOT, acted subsystems ordered `[control, target]`.
    Cnot,
    /// `|j⟩ → |j+k mod d⟩` on the target when the control qubit reads 1,
    /// acted subsystems ordered `[control, target]`.
    CtrlPlus(usize),
    /// `|j⟩ → |j+k mod d⟩`.
    Plus(usize),
    /// Arbitrary unitary on the acted subsystems, most significant first.
    Custom(Matrix),
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::Ry(_) => "Ry",
            GateKind::Cnot => "Cnot",
            GateKind::CtrlPlus(_) => "Ctrl-Plus",
            GateKind::Plus(_) => "Plus",
            GateKind::Custom(_) => "Custom",
        }
    }

    /// Matrix of the gate on the product space of `dims`.
    pub fn local_matrix(&self, dims: &[usize]) -> Result<Matrix> {
        match self {
            GateKind::H => Matrix::from_real(
                2,
                &[FRAC_1_SQRT_2, FRAC_1_SQRT_2, FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
            ),
            GateKind::Ry(theta) => {
                let (s, c) = (libm::sin(theta / 2.0), libm::cos(theta / 2.0));
                Matrix::from_real(2, &[c, -s, s, c])
            }
            GateKind::Cnot => GateKind::CtrlPlus(1).local_matrix(dims),
            GateKind::CtrlPlus(k) => {
                let d = dims[1];
                let (shift, _) = qudit_shift_clock(d)?;
                let block = shift.pow(k % d);
                let mut m = Matrix::zeros(2 * d);
                for i in 0..d {
                    m.set(i, i, C64::new(1.0, 0.0));
                    for j in 0..d {
                        m.set(d + i, d + j, block.get(i, j));
                    }
                }
                Ok(m)
            }
            GateKind::Plus(k) => {
                let d = dims[0];
                let (shift, _) = qudit_shift_clock(d)?;
                Ok(shift.pow(k % d))
            }
            GateKind::Custom(m) => Ok(m.clone()),
        }
    }

    fn validate(&self, dims: &[usize], tol: Tolerance) -> Result<()> {
        let expect_count = |n: usize| {
            if dims.len() == n {
                Ok(())
            } else {
                Err(Error::ArgumentCount {
                    expected: n,
                    found: dims.len(),
                })
            }
        };
        match self {
            GateKind::H | GateKind::Ry(_) => {
                expect_count(1)?;
                if dims[0] != 2 {
                    return Err(Error::DimensionMismatch {
                        expected: 2,
                        found: dims[0],
                    });
                }
                if let GateKind::Ry(theta) = self {
                    if !theta.is_finite() {
                        return Err(Error::UnsupportedGate("rotation angle must be finite"));
                    }
                }
            }
            GateKind::Cnot | GateKind::CtrlPlus(_) => {
                expect_count(2)?;
                if dims[0] != 2 {
                    return Err(Error::DimensionMismatch {
                        expected: 2,
                        found: dims[0],
                    });
                }
                if matches!(self, GateKind::Cnot) && dims[1] != 2 {
                    return Err(Error::DimensionMismatch {
                        expected: 2,
                        found: dims[1],
                    });
                }
            }
            GateKind::Plus(_) => expect_count(1)?,
            GateKind::Custom(m) => {
                let expected: usize = dims.iter().product();
                if m.dim() != expected {
                    return Err(Error::DimensionMismatch {
                        expected,
                        found: m.dim(),
                    });
                }
                let residual = m.unitarity_residual();
                if !tol.accepts(residual) {
                    return Err(Error::NotUnitary { residual });
                }
            }
        }
        Ok(())
    }
}

/// A gate applied between `time` and `time + 1` to an ordered list of
/// subsystems.
#[derive(Clone, Debug, PartialEq)]
pub struct GateApplication {
    kind: GateKind,
    acted: Vec<SubsystemId>,
    time: usize,
}

impl GateApplication {
    pub fn new(
        kind: GateKind,
        acted: Vec<SubsystemId>,
        time: usize,
        layout: &SpaceLayout,
        tol: Tolerance,
    ) -> Result<Self> {
        for (i, &id) in acted.iter().enumerate() {
            layout.check(id)?;
            if acted[..i].contains(&id) {
                return Err(Error::RepeatedSubsystem(layout.label(id).to_string()));
            }
        }
        let dims: Vec<usize> = acted.iter().map(|&id| layout.dim(id)).collect();
        kind.validate(&dims, tol)?;
        Ok(Self { kind, acted, time })
    }

    pub fn kind(&self) -> &GateKind {
        &self.kind
    }

    pub fn acted(&self) -> &[SubsystemId] {
        &self.acted
    }

    pub fn time(&self) -> usize {
        self.time
    }

    pub fn local_matrix(&self, layout: &SpaceLayout) -> Result<Matrix> {
        let dims: Vec<usize> = self.acted.iter().map(|&id| layout.dim(id)).collect();
        self.kind.local_matrix(&dims)
    }

    /// The gate's matrix on the full space.
    pub fn embedded(&self, layout: &Arc<SpaceLayout>) -> Result<Operator> {
        embed(&self.local_matrix(layout)?, &self.acted, layout)
    }
}

/// Timed gate applications over a layout. Gates sharing a time step form a
/// slice and must act on disjoint subsystems.
#[derive(Clone, Debug)]
pub struct Network {
    layout: Arc<SpaceLayout>,
    gates: Vec<GateApplication>,
    steps: usize,
}

impl Network {
    pub fn new(
        layout: Arc<SpaceLayout>,
        gates: Vec<GateApplication>,
        steps: usize,
    ) -> Result<Self> {
        for pair in gates.windows(2) {
            if pair[1].time < pair[0].time {
                return Err(Error::UnorderedNetwork);
            }
        }
        if let Some(last) = gates.last() {
            if last.time >= steps {
                return Err(Error::TimeOutOfRange {
                    t: last.time,
                    len: steps,
                });
            }
        }
        let network = Self {
            layout,
            gates,
            steps,
        };
        for t in 0..steps {
            let slice = network.slice(t);
            for (i, g) in slice.iter().enumerate() {
                if slice[..i]
                    .iter()
                    .any(|o| o.acted.iter().any(|id| g.acted.contains(id)))
                {
                    return Err(Error::OverlappingGates(t));
                }
            }
        }
        Ok(network)
    }

    pub fn builder(layout: &Arc<SpaceLayout>) -> NetworkBuilder {
        NetworkBuilder {
            layout: layout.clone(),
            gates: Vec::new(),
            steps: 0,
            tol: Tolerance::DEFAULT,
        }
    }

    pub fn layout(&self) -> &Arc<SpaceLayout> {
        &self.layout
    }

    pub fn gates(&self) -> &[GateApplication] {
        &self.gates
    }

    /// Number of time steps; the final time label.
    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Gates applied between `t` and `t + 1`.
    pub fn slice(&self, t: usize) -> &[GateApplication] {
        let start = self.gates.partition_point(|g| g.time < t);
        let end = self.gates.partition_point(|g| g.time <= t);
        &self.gates[start..end]
    }

    /// Whole-network matrix from time 0 to `t`, later gates on the left.
    pub fn unitary_until(&self, t: usize) -> Result<Operator> {
        if t > self.steps {
            return Err(Error::TimeOutOfRange { t, len: self.steps });
        }
        let mut u = Operator::identity(&self.layout);
        for g in self.gates.iter().take_while(|g| g.time < t) {
            u = &g.embedded(&self.layout)? * &u;
        }
        Ok(u)
    }
}

/// Builds a network one time slice at a time, addressing subsystems by label.
pub struct NetworkBuilder {
    layout: Arc<SpaceLayout>,
    gates: Vec<GateApplication>,
    steps: usize,
    tol: Tolerance,
}

impl NetworkBuilder {
    pub fn tolerance(mut self, tol: Tolerance) -> Self {
        self.tol = tol;
        self
    }

    /// Appends a slice holding a single gate.
    pub fn step(&mut self, kind: GateKind, labels: &[&str]) -> Result<&mut Self> {
        self.parallel(&[(kind, labels)])
    }

    /// Appends a slice of gates on disjoint subsystems.
    pub fn parallel(&mut self, gates: &[(GateKind, &[&str])]) -> Result<&mut Self> {
        let t = self.steps;
        let mut slice: Vec<GateApplication> = Vec::with_capacity(gates.len());
        for (kind, labels) in gates {
            let acted = labels
                .iter()
                .map(|l| self.layout.id(l))
                .collect::<Result<Vec<_>>>()?;
            let gate = GateApplication::new(kind.clone(), acted, t, &self.layout, self.tol)?;
            if slice
                .iter()
                .any(|g| g.acted.iter().any(|id| gate.acted.contains(id)))
            {
                return Err(Error::OverlappingGates(t));
            }
            slice.push(gate);
        }
        self.gates.extend(slice);
        self.steps += 1;
        Ok(self)
    }

    pub fn build(&self) -> Result<Network> {
        Network::new(self.layout.clone(), self.gates.clone(), self.steps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layout() -> Arc<SpaceLayout> {
        SpaceLayout::new([("Q1", 2), ("Q2", 2), ("S", 4)]).unwrap()
    }

    #[test]
    fn builtin_gates_are_unitary() {
        let kinds = [
            (GateKind::H, alloc::vec![2]),
            (GateKind::Ry(0.37), alloc::vec![2]),
            (GateKind::Cnot, alloc::vec![2, 2]),
            (GateKind::CtrlPlus(3), alloc::vec![2, 4]),
            (GateKind::Plus(2), alloc::vec![4]),
        ];
        for (kind, dims) in kinds {
            assert!(
                kind.local_matrix(&dims).unwrap().unitarity_residual() < 1e-14,
                "{kind:?}"
            );
        }
    }

    #[test]
    fn cnot_matrix_is_standard() {
        let m = GateKind::Cnot.local_matrix(&[2, 2]).unwrap();
        let expected = Matrix::from_real(
            4,
            &[
                1., 0., 0., 0., 0., 1., 0., 0., 0., 0., 0., 1., 0., 0., 1., 0.,
            ],
        )
        .unwrap();
        assert_eq!(m, expected);
    }

    #[test]
    fn plus_gate_moves_basis_states() {
        let m = GateKind::Plus(3).local_matrix(&[4]).unwrap();
        for j in 0..4 {
            assert_eq!(m.get((j + 3) % 4, j), C64::new(1.0, 0.0));
        }
    }

    #[test]
    fn gate_validation() {
        let layout = layout();
        let tol = Tolerance::DEFAULT;
        let s = layout.id("S").unwrap();
        let q1 = layout.id("Q1").unwrap();
        assert!(GateApplication::new(GateKind::H, alloc::vec![s], 0, &layout, tol).is_err());
        assert!(GateApplication::new(GateKind::Cnot, alloc::vec![q1, s], 0, &layout, tol).is_err());
        assert!(
            GateApplication::new(GateKind::CtrlPlus(1), alloc::vec![s, q1], 0, &layout, tol)
                .is_err()
        );
        assert!(
            GateApplication::new(GateKind::CtrlPlus(1), alloc::vec![q1, s], 0, &layout, tol)
                .is_ok()
        );
        assert!(matches!(
            GateApplication::new(GateKind::Cnot, alloc::vec![q1, q1], 0, &layout, tol),
            Err(Error::RepeatedSubsystem(_))
        ));
        let bad = Matrix::identity(2).scale(C64::new(2.0, 0.0));
        assert!(matches!(
            GateApplication::new(GateKind::Custom(bad), alloc::vec![q1], 0, &layout, tol),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn builder_rejects_overlap_and_counts_steps() {
        let layout = layout();
        let mut b = Network::builder(&layout);
        b.step(GateKind::H, &["Q1"]).unwrap();
        b.parallel(&[(GateKind::Ry(0.1), &["Q1"]), (GateKind::Ry(0.2), &["Q2"])])
            .unwrap();
        assert!(matches!(
            b.parallel(&[(GateKind::H, &["Q1"]), (GateKind::Cnot, &["Q1", "Q2"])]),
            Err(Error::OverlappingGates(2))
        ));
        let net = b.build().unwrap();
        assert_eq!(net.steps(), 2);
        assert_eq!(net.slice(1).len(), 2);
        assert_eq!(net.slice(0).len(), 1);
    }

    #[test]
    fn unitary_orders_later_gates_left() {
        let layout = SpaceLayout::new([("Q1", 2)]).unwrap();
        let mut b = Network::builder(&layout);
        b.step(GateKind::H, &["Q1"])
            .unwrap()
            .step(GateKind::Ry(0.4), &["Q1"])
            .unwrap();
        let net = b.build().unwrap();
        let u = net.unitary_until(2).unwrap();
        let h = GateKind::H.local_matrix(&[2]).unwrap();
        let r = GateKind::Ry(0.4).local_matrix(&[2]).unwrap();
        assert!(u.matrix().distance(&r.matmul(&h)) < 1e-15);
        assert!(net.unitary_until(3).is_err());
    }
}
