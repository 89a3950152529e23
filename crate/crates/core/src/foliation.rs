//! Foliation of descriptors into relative descriptors.
//!
//! When a subsystem undergoes a unitary conditioned on an unsharp involution
//! `c` of some other subsystem, its post-step descriptor splits as
//! `P₊(c)·s + P₋(c)·U†(s) s U(s)`. Each term is a relative descriptor; its
//! measure is the reference expectation of the projector weighting it.

use alloc::string::String;
use alloc::vec::Vec;

use crate::descriptor::{form_on, polish_unitary, Descriptor};
use crate::error::{Error, Result};
use crate::gates::{GateApplication, GateKind};
use crate::matrix::C64;
use crate::operator::{projector_pm, reference_expectation, Operator, Sign, Tolerance};

/// One foliation event in a branch label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchStep {
    /// Name of the controlling observable, e.g. `q_Az(4)`.
    pub observable: String,
    /// Constituent factors when the observable is a product of several
    /// subsystems' components. Bookkeeping only.
    pub factors: Vec<String>,
    pub sign: Sign,
}

/// A controlling observable together with its name.
#[derive(Clone, Debug)]
pub struct Control<'a> {
    pub operator: &'a Operator,
    pub observable: String,
    pub factors: Vec<String>,
}

impl<'a> Control<'a> {
    pub fn new(operator: &'a Operator, observable: impl Into<String>) -> Self {
        Self {
            operator,
            observable: observable.into(),
            factors: Vec::new(),
        }
    }

    pub fn with_factors<I, S>(mut self, factors: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.factors = factors.into_iter().map(Into::into).collect();
        self
    }

    fn step(&self, sign: Sign) -> BranchStep {
        BranchStep {
            observable: self.observable.clone(),
            factors: self.factors.clone(),
            sign,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Branch {
    pub label: Vec<BranchStep>,
    /// Product of the projectors named in the label.
    pub weight: Operator,
    /// The unprojected descriptor this branch carries.
    pub content: Descriptor,
    /// `weight · content`.
    pub relative: Descriptor,
    pub measure: f64,
}

#[derive(Clone, Debug)]
pub struct Foliation {
    base: Descriptor,
    branches: Vec<Branch>,
}

impl Foliation {
    /// The evolved descriptor the branches decompose.
    pub fn base(&self) -> &Descriptor {
        &self.base
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn measures(&self) -> Vec<f64> {
        self.branches.iter().map(|b| b.measure).collect()
    }

    /// Largest componentwise distance between the branch sum and the base.
    pub fn reconstruction_residual(&self) -> f64 {
        let layout = self.base.layout();
        let mut sum = [Operator::zero(layout), Operator::zero(layout)];
        for branch in &self.branches {
            for (acc, c) in sum.iter_mut().zip(branch.relative.components()) {
                *acc = &*acc + c;
            }
        }
        sum.iter()
            .zip(self.base.components())
            .map(|(a, b)| a.distance(b))
            .fold(0.0, f64::max)
    }

    /// `|Σ measures − 1|`.
    pub fn measure_defect(&self) -> f64 {
        (self.branches.iter().map(|b| b.measure).sum::<f64>() - 1.0).abs()
    }

    /// Foliates every branch again with respect to a further control.
    pub fn refine(
        &self,
        control: &Control<'_>,
        conditioned: &GateKind,
        tol: Tolerance,
    ) -> Result<Foliation> {
        let levels = check_conditioned(&self.base, conditioned, tol)?;
        check_commutes(control.operator, self.base.components(), tol)?;
        for branch in &self.branches {
            check_commutes(control.operator, core::slice::from_ref(&branch.weight), tol)?;
        }
        let plus = projector_pm(control.operator, Sign::Plus, tol)?;
        let minus = projector_pm(control.operator, Sign::Minus, tol)?;
        let time = self.base.time() + 1;
        let base = controlled_step(&self.base, &plus, &minus, conditioned, levels, time);

        let mut branches = Vec::with_capacity(2 * self.branches.len());
        for branch in &self.branches {
            let flipped = conditioned_content(&branch.content, conditioned, levels, time);
            for (sign, projector, content) in [
                (Sign::Plus, &plus, branch.content.clone().with_time(time)),
                (Sign::Minus, &minus, flipped),
            ] {
                let mut label = branch.label.clone();
                label.push(control.step(sign));
                branches.push(make_branch(
                    label,
                    projector * &branch.weight,
                    content,
                    tol,
                )?);
            }
        }
        Ok(Foliation { base, branches })
    }

    /// Applies a further unitary on the foliated subsystem alone, evolving
    /// each relative descriptor through the gate's functional form evaluated
    /// on that relative descriptor.
    pub fn evolve_local(&self, gate: &GateKind, tol: Tolerance) -> Result<Foliation> {
        let levels = check_conditioned(&self.base, gate, tol)?;
        let time = self.base.time() + 1;
        let evolve = |d: &Descriptor| {
            let u = form_on(gate, &[levels], &[d.components()]);
            d.conjugated_by(&u).with_time(time)
        };
        let base = evolve(&self.base);
        let branches = self
            .branches
            .iter()
            .map(|b| Branch {
                label: b.label.clone(),
                weight: b.weight.clone(),
                content: evolve(&b.content),
                relative: evolve(&b.relative),
                measure: b.measure,
            })
            .collect();
        Ok(Foliation { base, branches })
    }
}

/// Foliates `target` with respect to `control`, the unsharp involution
/// conditioning the unitary `conditioned` on the target.
///
/// The `+1` branch keeps the target unchanged; the `−1` branch carries the
/// target conjugated by the functional form of `conditioned`. A sharp
/// control is allowed and yields a branch of measure zero.
pub fn foliate(
    target: &Descriptor,
    control: &Control<'_>,
    conditioned: &GateKind,
    tol: Tolerance,
) -> Result<Foliation> {
    let levels = check_conditioned(target, conditioned, tol)?;
    check_commutes(control.operator, target.components(), tol)?;
    let plus = projector_pm(control.operator, Sign::Plus, tol)?;
    let minus = projector_pm(control.operator, Sign::Minus, tol)?;
    let time = target.time() + 1;
    let base = controlled_step(target, &plus, &minus, conditioned, levels, time);
    let flipped = conditioned_content(target, conditioned, levels, time);
    let branches = alloc::vec![
        make_branch(
            alloc::vec![control.step(Sign::Plus)],
            plus,
            target.clone().with_time(time),
            tol
        )?,
        make_branch(alloc::vec![control.step(Sign::Minus)], minus, flipped, tol)?,
    ];
    Ok(Foliation { base, branches })
}

/// `⟨Π projectors⟩` for commuting hermitian idempotents.
pub fn branch_measure(projectors: &[Operator], tol: Tolerance) -> Result<f64> {
    let Some(first) = projectors.first() else {
        return Ok(1.0);
    };
    for p in projectors {
        if !p.is_hermitian(tol) {
            return Err(Error::NotHermitian {
                residual: p.matrix().hermiticity_residual(),
            });
        }
        let residual = p.matrix().idempotence_residual();
        if !tol.accepts(residual) {
            return Err(Error::NotProjector { residual });
        }
    }
    for (i, p) in projectors.iter().enumerate() {
        check_commutes(p, &projectors[i + 1..], tol)?;
    }
    let product = projectors[1..]
        .iter()
        .fold(first.clone(), |acc, p| &acc * p);
    real_measure(&product, tol)
}

fn real_measure(weight: &Operator, tol: Tolerance) -> Result<f64> {
    let value: C64 = reference_expectation(weight);
    if !tol.accepts(value.im.abs()) {
        return Err(Error::NotHermitian {
            residual: value.im.abs(),
        });
    }
    Ok(value.re)
}

fn make_branch(
    label: Vec<BranchStep>,
    weight: Operator,
    content: Descriptor,
    tol: Tolerance,
) -> Result<Branch> {
    let relative = content.map(content.time(), |c| &weight * c);
    let measure = real_measure(&weight, tol)?;
    Ok(Branch {
        label,
        weight,
        content,
        relative,
        measure,
    })
}

/// Post-step descriptor under `P₊ + P₋·U(s)`.
fn controlled_step(
    target: &Descriptor,
    plus: &Operator,
    minus: &Operator,
    conditioned: &GateKind,
    levels: usize,
    time: usize,
) -> Descriptor {
    let u = form_on(conditioned, &[levels], &[target.components()]);
    let controlled = polish_unitary(plus + &(minus * &u));
    target.conjugated_by(&controlled).with_time(time)
}

fn conditioned_content(
    content: &Descriptor,
    conditioned: &GateKind,
    levels: usize,
    time: usize,
) -> Descriptor {
    let u = polish_unitary(form_on(conditioned, &[levels], &[content.components()]));
    content.conjugated_by(&u).with_time(time)
}

fn check_conditioned(target: &Descriptor, conditioned: &GateKind, tol: Tolerance) -> Result<usize> {
    GateApplication::new(
        conditioned.clone(),
        alloc::vec![target.subsystem()],
        target.time(),
        target.layout(),
        tol,
    )?;
    Ok(target.levels())
}

fn check_commutes(control: &Operator, others: &[Operator], tol: Tolerance) -> Result<()> {
    for other in others {
        let residual = control.commutator_norm(other);
        if !tol.accepts(residual) {
            return Err(Error::NonCommuting { residual });
        }
    }
    Ok(())
}
