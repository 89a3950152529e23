//! Operators over a composite Hilbert space.
//!
//! Every [`Operator`] lives on the full space of its [`SpaceLayout`]; tensor
//! order is the declaration order of the subsystems, first subsystem most
//! significant.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::matrix::{Matrix, C64, ZERO};

/// Default cap on the total dimension of a layout.
pub const DEFAULT_DIM_CAP: usize = 1 << 14;

/// Absolute Frobenius-norm tolerance used by every algebraic predicate.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Tolerance(pub f64);

impl Tolerance {
    pub const DEFAULT: Tolerance = Tolerance(1e-9);

    #[inline]
    pub fn accepts(self, residual: f64) -> bool {
        residual < self.0
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::DEFAULT
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubsystemId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subsystem {
    pub label: String,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceLayout {
    subsystems: Vec<Subsystem>,
    strides: Vec<usize>,
    total_dim: usize,
}

impl SpaceLayout {
    pub fn new<I, S>(subsystems: I) -> Result<Arc<Self>>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        Self::with_cap(subsystems, DEFAULT_DIM_CAP)
    }

    pub fn with_cap<I, S>(subsystems: I, cap: usize) -> Result<Arc<Self>>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut list: Vec<Subsystem> = Vec::new();
        let mut total: usize = 1;
        for (label, dim) in subsystems {
            let label = label.into();
            if dim < 2 {
                return Err(Error::InvalidDimension(dim));
            }
            if list.iter().any(|s| s.label == label) {
                return Err(Error::DuplicateSubsystem(label));
            }
            total = total
                .checked_mul(dim)
                .filter(|&t| t <= cap)
                .ok_or(Error::LayoutTooLarge {
                    dim: total.saturating_mul(dim),
                    cap,
                })?;
            list.push(Subsystem { label, dim });
        }
        let mut strides = alloc::vec![1usize; list.len()];
        for i in (0..list.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * list[i + 1].dim;
        }
        Ok(Arc::new(Self {
            subsystems: list,
            strides,
            total_dim: total,
        }))
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn len(&self) -> usize {
        self.subsystems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsystems.is_empty()
    }

    pub fn subsystems(&self) -> &[Subsystem] {
        &self.subsystems
    }

    pub fn ids(&self) -> impl Iterator<Item = SubsystemId> {
        (0..self.subsystems.len()).map(SubsystemId)
    }

    pub fn id(&self, label: &str) -> Result<SubsystemId> {
        self.subsystems
            .iter()
            .position(|s| s.label == label)
            .map(SubsystemId)
            .ok_or_else(|| Error::UnknownSubsystem(label.to_string()))
    }

    pub fn check(&self, id: SubsystemId) -> Result<()> {
        if id.0 < self.subsystems.len() {
            Ok(())
        } else {
            Err(Error::UnknownSubsystem(alloc::format!("#{}", id.0)))
        }
    }

    pub fn dim(&self, id: SubsystemId) -> usize {
        self.subsystems[id.0].dim
    }

    pub fn label(&self, id: SubsystemId) -> &str {
        &self.subsystems[id.0].label
    }

    pub(crate) fn stride(&self, id: SubsystemId) -> usize {
        self.strides[id.0]
    }

    /// Digit of subsystem `id` in the flat basis index `index`.
    #[inline]
    pub fn digit(&self, index: usize, id: SubsystemId) -> usize {
        (index / self.strides[id.0]) % self.subsystems[id.0].dim
    }
}

/// A square operator on the full space of a layout.
#[derive(Clone, PartialEq)]
pub struct Operator {
    layout: Arc<SpaceLayout>,
    matrix: Matrix,
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Operator")
            .field("dim", &self.matrix.dim())
            .field("nonzeros", &self.matrix.nonzeros())
            .finish()
    }
}

impl Operator {
    pub fn new(layout: Arc<SpaceLayout>, matrix: Matrix) -> Result<Self> {
        if matrix.dim() != layout.total_dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.total_dim(),
                found: matrix.dim(),
            });
        }
        Ok(Self { layout, matrix })
    }

    pub fn identity(layout: &Arc<SpaceLayout>) -> Self {
        Self {
            layout: layout.clone(),
            matrix: Matrix::identity(layout.total_dim()),
        }
    }

    pub fn zero(layout: &Arc<SpaceLayout>) -> Self {
        Self {
            layout: layout.clone(),
            matrix: Matrix::zeros(layout.total_dim()),
        }
    }

    pub fn layout(&self) -> &Arc<SpaceLayout> {
        &self.layout
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn adjoint(&self) -> Self {
        self.with(self.matrix.adjoint())
    }

    pub fn scale(&self, factor: C64) -> Self {
        self.with(self.matrix.scale(factor))
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    pub fn pow(&self, exponent: usize) -> Self {
        self.with(self.matrix.pow(exponent))
    }

    /// `self† · inner · self`
    pub fn conjugate(&self, inner: &Operator) -> Self {
        &(&self.adjoint() * inner) * self
    }

    /// Frobenius distance to another operator on the same layout.
    pub fn distance(&self, other: &Operator) -> f64 {
        self.assert_same_layout(other);
        self.matrix.distance(&other.matrix)
    }

    pub fn commutator_norm(&self, other: &Operator) -> f64 {
        self.assert_same_layout(other);
        self.matrix.commutator_norm(&other.matrix)
    }

    pub fn anticommutator_norm(&self, other: &Operator) -> f64 {
        self.assert_same_layout(other);
        self.matrix.anticommutator_norm(&other.matrix)
    }

    pub fn is_unitary(&self, tol: Tolerance) -> bool {
        tol.accepts(self.matrix.unitarity_residual())
    }

    pub fn is_hermitian(&self, tol: Tolerance) -> bool {
        tol.accepts(self.matrix.hermiticity_residual())
    }

    pub fn is_projector(&self, tol: Tolerance) -> bool {
        self.is_hermitian(tol) && tol.accepts(self.matrix.idempotence_residual())
    }

    pub fn is_involution(&self, tol: Tolerance) -> bool {
        tol.accepts(self.matrix.involution_residual())
    }

    pub(crate) fn with(&self, matrix: Matrix) -> Self {
        Self {
            layout: self.layout.clone(),
            matrix,
        }
    }

    fn assert_same_layout(&self, other: &Operator) {
        assert!(
            Arc::ptr_eq(&self.layout, &other.layout) || self.layout == other.layout,
            "operators live on different layouts"
        );
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        self.assert_same_layout(rhs);
        self.with(&self.matrix + &rhs.matrix)
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        self.assert_same_layout(rhs);
        self.with(&self.matrix - &rhs.matrix)
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.assert_same_layout(rhs);
        self.with(self.matrix.matmul(&rhs.matrix))
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        self.with(-&self.matrix)
    }
}

/// Tensors `local` with the identity on every subsystem outside `targets`.
///
/// `local` acts on the ordered list `targets`, most significant first, which
/// need not follow the layout's declaration order.
pub fn embed(
    local: &Matrix,
    targets: &[SubsystemId],
    layout: &Arc<SpaceLayout>,
) -> Result<Operator> {
    for (i, &t) in targets.iter().enumerate() {
        layout.check(t)?;
        if targets[..i].contains(&t) {
            return Err(Error::RepeatedSubsystem(layout.label(t).to_string()));
        }
    }
    let local_dims: Vec<usize> = targets.iter().map(|&t| layout.dim(t)).collect();
    let expected: usize = local_dims.iter().product();
    if local.dim() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: local.dim(),
        });
    }
    let mut local_strides = alloc::vec![1usize; targets.len()];
    for i in (0..targets.len().saturating_sub(1)).rev() {
        local_strides[i] = local_strides[i + 1] * local_dims[i + 1];
    }
    let n = layout.total_dim();
    let mut out = Matrix::zeros(n);
    for row in 0..n {
        let mut local_row = 0;
        let mut base = row;
        for (k, &t) in targets.iter().enumerate() {
            let d = layout.digit(row, t);
            local_row += d * local_strides[k];
            base -= d * layout.stride(t);
        }
        for local_col in 0..expected {
            let value = local.get(local_row, local_col);
            if value == ZERO {
                continue;
            }
            let mut col = base;
            for (k, &t) in targets.iter().enumerate() {
                col += ((local_col / local_strides[k]) % local_dims[k]) * layout.stride(t);
            }
            out.set(row, col, value);
        }
    }
    Operator::new(layout.clone(), out)
}

/// Tensors a single-subsystem operator with the identity elsewhere.
pub fn embed_local(
    op: &Matrix,
    target: SubsystemId,
    layout: &Arc<SpaceLayout>,
) -> Result<Operator> {
    embed(op, &[target], layout)
}

/// The fixed reference vector `|0…0⟩` of a layout.
#[derive(Clone, Debug)]
pub struct ReferenceVector {
    layout: Arc<SpaceLayout>,
}

impl ReferenceVector {
    pub fn new(layout: &Arc<SpaceLayout>) -> Self {
        Self {
            layout: layout.clone(),
        }
    }

    pub fn layout(&self) -> &Arc<SpaceLayout> {
        &self.layout
    }

    pub fn amplitudes(&self) -> Vec<C64> {
        let mut v = alloc::vec![ZERO; self.layout.total_dim()];
        v[0] = C64::new(1.0, 0.0);
        v
    }

    pub fn expectation(&self, op: &Operator) -> C64 {
        reference_expectation(op)
    }
}

/// `⟨0…0| o |0…0⟩`, the top-left entry.
pub fn reference_expectation(o: &Operator) -> C64 {
    o.matrix().get(0, 0)
}

/// `⟨0…0| o² |0…0⟩` without forming `o²`.
pub fn reference_second_moment(o: &Operator) -> C64 {
    let m = o.matrix();
    (0..m.dim()).map(|k| m.get(0, k) * m.get(k, 0)).sum()
}

/// Eigenvalue sign of an involution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    /// `+1 ↦ 0`, `−1 ↦ 1`.
    pub fn bit(self) -> u8 {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }

    pub fn from_bit(bit: u8) -> Self {
        if bit == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// `(1 ± q)/2` for an involution `q`.
pub fn projector_pm(q: &Operator, sign: Sign, tol: Tolerance) -> Result<Operator> {
    let residual = q.matrix().involution_residual();
    if !tol.accepts(residual) {
        return Err(Error::NotInvolution { residual });
    }
    Ok(projector_unchecked(q, sign))
}

pub(crate) fn projector_unchecked(q: &Operator, sign: Sign) -> Operator {
    let id = Operator::identity(q.layout());
    let half = 0.5;
    match sign {
        Sign::Plus => (&id + q).scale_real(half),
        Sign::Minus => (&id - q).scale_real(half),
    }
}

/// Generalized Pauli shift and clock on `dim` levels.
///
/// The shift maps `|j⟩ → |j+1 mod d⟩`; the clock is `diag(ω^j)` with
/// `ω = exp(2πi/d)`.
pub fn qudit_shift_clock(dim: usize) -> Result<(Matrix, Matrix)> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let mut shift = Matrix::zeros(dim);
    for j in 0..dim {
        shift.set((j + 1) % dim, j, C64::new(1.0, 0.0));
    }
    let clock = Matrix::diagonal(
        &(0..dim)
            .map(|j| root_of_unity(dim, j as i64))
            .collect::<Vec<_>>(),
    );
    Ok((shift, clock))
}

/// `exp(2πi·k/d)`, exact on the axes so that qubit clocks are real.
pub(crate) fn root_of_unity(d: usize, k: i64) -> C64 {
    let k = k.rem_euclid(d as i64) as usize;
    if (4 * k).is_multiple_of(d) {
        match (4 * k) / d {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        }
    } else {
        let angle = 2.0 * PI * k as f64 / d as f64;
        C64::new(libm::cos(angle), libm::sin(angle))
    }
}

pub fn pauli_x() -> Matrix {
    Matrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]).expect("2x2")
}

pub fn pauli_z() -> Matrix {
    Matrix::from_real(2, &[1.0, 0.0, 0.0, -1.0]).expect("2x2")
}
