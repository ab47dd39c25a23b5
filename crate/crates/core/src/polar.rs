//! Polar pair sets: sets of (source, target) pairs that no transport charges.
//!
//! Over finite ground sets a null set is an index set of zero mass, so the
//! unconstrained criterion reads: every pair has a zero-mass endpoint. With
//! strictly positive marginals the only unconstrained polar set is empty.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{rint_member, GeometryError};
use crate::instance::{Instance, InstanceError};
use crate::rational::{serde_rational, Rational};
use crate::ratlp::{Direction, LPOutcome, Region};
use crate::transport::{feasibility_lp_with, var, Kernel, LpOptions, PlanDocument, TransportError, TransportPlan};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolarError {
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("pair ({0}, {1}) is out of range")]
    Index(usize, usize),
    #[error("decomposition impossible for a polar set without generator constraints")]
    DecompositionImpossible,
    #[error("coupling LP without generator rows is infeasible")]
    CouplingInfeasible,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PairSet {
    pairs: BTreeSet<(usize, usize)>,
}

impl PairSet {
    pub fn new(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, PolarError> {
        let mut set = BTreeSet::new();
        for (i, j) in pairs {
            if i >= n || j >= n {
                return Err(PolarError::Index(i, j));
            }
            set.insert((i, j));
        }
        Ok(PairSet { pairs: set })
    }

    pub fn all(n: usize) -> Self {
        PairSet {
            pairs: (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect(),
        }
    }

    pub fn from_labels(inst: &Instance, doc: &[(String, String)]) -> Result<Self, PolarError> {
        let mut pairs = Vec::new();
        for (a, b) in doc {
            pairs.push((inst.index_of(a)?, inst.index_of(b)?));
        }
        PairSet::new(inst.n(), pairs)
    }

    pub fn to_labels(&self, inst: &Instance) -> Vec<(String, String)> {
        self.pairs
            .iter()
            .map(|&(i, j)| (inst.label(i).to_string(), inst.label(j).to_string()))
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn union(&self, other: &PairSet) -> PairSet {
        PairSet {
            pairs: self.pairs.union(&other.pairs).copied().collect(),
        }
    }

    pub fn contains(&self, pair: (usize, usize)) -> bool {
        self.pairs.contains(&pair)
    }
}

/// Zero-mass index sets covering a pair set: every pair has its source in
/// `n1` or its target in `n2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub n1: Vec<usize>,
    pub n2: Vec<usize>,
}

impl Decomposition {
    pub fn verify(&self, inst: &Instance, u: &PairSet) -> bool {
        self.n1.iter().all(|&i| inst.mu()[i].is_zero())
            && self.n2.iter().all(|&j| inst.nu()[j].is_zero())
            && u.iter().all(|(i, j)| self.n1.contains(&i) || self.n2.contains(&j))
    }
}

/// Sources of zero mass go to `n1`; a pair with a positive source needs a
/// zero-mass target in `n2`.
pub fn decompose(inst: &Instance, u: &PairSet) -> Option<Decomposition> {
    let mut n1 = BTreeSet::new();
    let mut n2 = BTreeSet::new();
    for (i, j) in u.iter() {
        if inst.mu()[i].is_zero() {
            n1.insert(i);
        } else if inst.nu()[j].is_zero() {
            n2.insert(j);
        } else {
            return None;
        }
    }
    Some(Decomposition {
        n1: n1.into_iter().collect(),
        n2: n2.into_iter().collect(),
    })
}

/// Largest mass a transport can put on `u`, with an optimizer. Without
/// `constrained` the generator rows are dropped and any coupling counts.
pub fn max_mass(inst: &Instance, u: &PairSet, constrained: bool) -> Result<(Rational, TransportPlan), PolarError> {
    let n = inst.n();
    let options = LpOptions {
        generators: constrained,
        ..LpOptions::default()
    };
    let flp = feasibility_lp_with(inst, options);
    let region = match Region::new(&flp.problem) {
        Ok(r) => r,
        Err(_) if !constrained => return Err(PolarError::CouplingInfeasible),
        Err(_) => {
            let crate::transport::OrderVerdict::NotOrdered(w) = crate::transport::check_order(inst) else {
                unreachable!("the same LP was just found infeasible")
            };
            return Err(TransportError::NotOrdered(Box::new(w)).into());
        }
    };
    let mut objective = vec![Rational::zero(); n * n];
    for (i, j) in u.iter() {
        objective[var(n, i, j)] = Rational::one();
    }
    match region.optimize(&objective, Direction::Max) {
        LPOutcome::Optimal { point, value, .. } => Ok((value, TransportPlan::from_vars(n, &point))),
        _ => unreachable!("mass on a pair set is bounded by one"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolarTag {
    Polar,
    /// A plan charging the set with the maximal mass.
    NonPolar(TransportPlan),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarVerdict {
    pub max_mass: Rational,
    pub tag: PolarTag,
    pub decomposition: Option<Decomposition>,
}

impl PolarVerdict {
    pub fn is_polar(&self) -> bool {
        self.tag == PolarTag::Polar
    }

    pub fn to_document(&self, inst: &Instance) -> VerdictDocument {
        let names = |ix: &[usize]| ix.iter().map(|&j| inst.label(j).to_string()).collect();
        VerdictDocument {
            max_mass: self.max_mass.clone(),
            tag: if self.is_polar() { "polar" } else { "non-polar" }.to_string(),
            plan: match &self.tag {
                PolarTag::NonPolar(plan) => Some(plan.to_document(inst)),
                PolarTag::Polar => None,
            },
            decomposition: self.decomposition.as_ref().map(|d| DecompositionDocument {
                n1: names(&d.n1),
                n2: names(&d.n2),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionDocument {
    pub n1: Vec<String>,
    pub n2: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictDocument {
    #[serde(with = "serde_rational")]
    pub max_mass: Rational,
    pub tag: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan: Option<PlanDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionDocument>,
}

pub fn is_polar(inst: &Instance, u: &PairSet, constrained: bool) -> Result<PolarVerdict, PolarError> {
    let (mass, plan) = max_mass(inst, u, constrained)?;
    if mass.is_positive() {
        return Ok(PolarVerdict {
            max_mass: mass,
            tag: PolarTag::NonPolar(plan),
            decomposition: None,
        });
    }
    let decomposition = decompose(inst, u);
    debug_assert!(decomposition.as_ref().is_none_or(|d| d.verify(inst, u)));
    if decomposition.is_none() && !constrained {
        return Err(PolarError::DecompositionImpossible);
    }
    Ok(PolarVerdict {
        max_mass: mass,
        tag: PolarTag::Polar,
        decomposition,
    })
}

/// Outcome of testing the polar characterization on one pair set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterizationReport {
    /// Pairs `(i, j)` with `mu_i > 0` whose target lies outside the open
    /// component of `i`. When nonempty nothing else is asserted.
    pub hypothesis_failures: Vec<(usize, usize)>,
    pub constrained: Option<PolarVerdict>,
    pub unconstrained: Option<PolarVerdict>,
}

impl CharacterizationReport {
    pub fn hypothesis_holds(&self) -> bool {
        self.hypothesis_failures.is_empty()
    }

    /// `None` when the hypothesis failed; otherwise whether both regimes agree
    /// and a polar verdict comes with a zero-mass decomposition.
    pub fn holds(&self) -> Option<bool> {
        let (c, u) = (self.constrained.as_ref()?, self.unconstrained.as_ref()?);
        Some(c.is_polar() == u.is_polar() && (!c.is_polar() || c.decomposition.is_some()))
    }
}

pub fn obloj_siorpaes_check(inst: &Instance, kernel: &Kernel, u: &PairSet) -> Result<CharacterizationReport, PolarError> {
    let mut failures = Vec::new();
    for (i, j) in u.iter() {
        if !inst.mu()[i].is_positive() {
            continue;
        }
        let support = kernel.support(i)?;
        let pts: Vec<_> = support.iter().map(|&k| inst.phi(k)).collect();
        if rint_member(&inst.phi(j), &pts)?.is_none() {
            failures.push((i, j));
        }
    }
    if !failures.is_empty() {
        return Ok(CharacterizationReport {
            hypothesis_failures: failures,
            constrained: None,
            unconstrained: None,
        });
    }
    Ok(CharacterizationReport {
        hypothesis_failures: failures,
        constrained: Some(is_polar(inst, u, true)?),
        unconstrained: Some(is_polar(inst, u, false)?),
    })
}
