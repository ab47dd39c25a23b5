//! The transport polytope: plans with both marginals fixed whose rows dominate
//! their source point in every generator direction.
//!
//! Variables are the plan entries `pi[i][j]`, laid out row-major. A source with
//! zero mass has an identically zero row and imposes no generator rows.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{Instance, Matrix};
use crate::rational::{dot, serde_matrix, serde_rational, serde_vec, sum, Rational};
use crate::ratlp::{Direction, LPOutcome, LPProblem, Multipliers, Region, Relation};

pub type Mask = Vec<Vec<bool>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    RowMarginal(usize),
    ColMarginal(usize),
    Generator { source: usize, gen: usize },
}

/// The feasibility LP together with what each constraint row means.
#[derive(Debug, Clone)]
pub struct FeasibilityLp {
    pub problem: LPProblem,
    pub rows: Vec<RowKind>,
}

/// Which rows to put in the feasibility LP.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LpOptions {
    /// Include the generator rows; without them the LP is plain coupling feasibility.
    pub generators: bool,
    /// Leave out one generator row for every source. Only used to check that the
    /// property suite notices a broken LP.
    pub skip_generator: Option<usize>,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions {
            generators: true,
            skip_generator: None,
        }
    }
}

pub fn var(n: usize, i: usize, j: usize) -> usize {
    i * n + j
}

pub fn feasibility_lp(inst: &Instance) -> FeasibilityLp {
    feasibility_lp_with(inst, LpOptions::default())
}

pub fn feasibility_lp_with(inst: &Instance, options: LpOptions) -> FeasibilityLp {
    let n = inst.n();
    let nv = n * n;
    let mut problem = LPProblem::new(nv);
    let mut rows = Vec::new();
    for i in 0..n {
        let mut coeffs = vec![Rational::zero(); nv];
        for j in 0..n {
            coeffs[var(n, i, j)] = Rational::one();
        }
        problem.add_constraint(coeffs, Relation::Eq, inst.mu()[i].clone());
        rows.push(RowKind::RowMarginal(i));
    }
    for j in 0..n {
        let mut coeffs = vec![Rational::zero(); nv];
        for i in 0..n {
            coeffs[var(n, i, j)] = Rational::one();
        }
        problem.add_constraint(coeffs, Relation::Eq, inst.nu()[j].clone());
        rows.push(RowKind::ColMarginal(j));
    }
    if options.generators {
        let gens: Vec<usize> = (0..inst.m())
            .filter(|&r| !inst.is_constant_row(r) && options.skip_generator != Some(r))
            .collect();
        for i in inst.sources() {
            for &r in &gens {
                let g = &inst.gens()[r];
                let mut coeffs = vec![Rational::zero(); nv];
                for j in 0..n {
                    coeffs[var(n, i, j)] = g[j].clone();
                }
                problem.add_constraint(coeffs, Relation::Ge, &inst.mu()[i] * &g[i]);
                rows.push(RowKind::Generator { source: i, gen: r });
            }
        }
    }
    FeasibilityLp { problem, rows }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransportPlan {
    #[serde(with = "serde_matrix")]
    pub pi: Matrix,
}

impl TransportPlan {
    pub fn new(pi: Matrix) -> Self {
        TransportPlan { pi }
    }

    pub fn zeros(n: usize) -> Self {
        TransportPlan {
            pi: vec![vec![Rational::zero(); n]; n],
        }
    }

    pub fn diagonal(mass: &[Rational]) -> Self {
        let mut plan = TransportPlan::zeros(mass.len());
        for (i, m) in mass.iter().enumerate() {
            plan.pi[i][i] = m.clone();
        }
        plan
    }

    pub fn from_vars(n: usize, x: &[Rational]) -> Self {
        TransportPlan {
            pi: x.chunks(n).map(<[Rational]>::to_vec).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.pi.len()
    }

    pub fn row_sums(&self) -> Vec<Rational> {
        self.pi.iter().map(|row| sum(row)).collect()
    }

    pub fn col_sums(&self) -> Vec<Rational> {
        let n = self.n();
        (0..n).map(|j| sum(self.pi.iter().map(|row| &row[j]))).collect()
    }

    pub fn support(&self) -> Mask {
        self.pi
            .iter()
            .map(|row| row.iter().map(Signed::is_positive).collect())
            .collect()
    }

    pub fn row_support(&self, i: usize) -> Vec<usize> {
        (0..self.n()).filter(|&j| self.pi[i][j].is_positive()).collect()
    }

    pub fn to_document(&self, inst: &Instance) -> PlanDocument {
        PlanDocument {
            digest: inst.digest(),
            labels: inst.labels().to_vec(),
            pi: self.pi.clone(),
        }
    }

    /// Reads a plan back, rejecting documents produced for another instance.
    pub fn from_document(inst: &Instance, doc: PlanDocument) -> Result<Self, TransportError> {
        let expected = inst.digest();
        if doc.digest != expected {
            return Err(TransportError::DigestMismatch {
                expected,
                found: doc.digest,
            });
        }
        Ok(TransportPlan { pi: doc.pi })
    }
}

/// Serialized plan, tied to its instance by digest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanDocument {
    pub digest: String,
    pub labels: Vec<String>,
    #[serde(with = "serde_matrix")]
    pub pi: Matrix,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanViolation {
    #[error("plan is not {0}x{0}")]
    Shape(usize),
    #[error("negative entry at ({0}, {1})")]
    Negative(usize, usize),
    #[error("row {0} does not sum to mu")]
    RowSum(usize),
    #[error("column {0} does not sum to nu")]
    ColSum(usize),
    #[error("source {0} violates generator {1}")]
    Generator(usize, usize),
}

/// Checks every plan invariant exactly, reporting the first failure.
pub fn check_plan(inst: &Instance, plan: &TransportPlan) -> Result<(), PlanViolation> {
    let n = inst.n();
    if plan.n() != n || plan.pi.iter().any(|row| row.len() != n) {
        return Err(PlanViolation::Shape(n));
    }
    for i in 0..n {
        if let Some(j) = plan.pi[i].iter().position(Signed::is_negative) {
            return Err(PlanViolation::Negative(i, j));
        }
    }
    if let Some(i) = plan.row_sums().iter().zip(inst.mu()).position(|(a, b)| a != b) {
        return Err(PlanViolation::RowSum(i));
    }
    if let Some(j) = plan.col_sums().iter().zip(inst.nu()).position(|(a, b)| a != b) {
        return Err(PlanViolation::ColSum(j));
    }
    for i in inst.sources() {
        for (r, g) in inst.gens().iter().enumerate() {
            if dot(&plan.pi[i], g) < &inst.mu()[i] * &g[i] {
                return Err(PlanViolation::Generator(i, r));
            }
        }
    }
    Ok(())
}

pub fn verify_plan(inst: &Instance, plan: &TransportPlan) -> bool {
    check_plan(inst, plan).is_ok()
}

/// One piece `c + Σ_r theta_r g_r` of a witness function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Branch {
    #[serde(with = "serde_rational")]
    pub constant: Rational,
    #[serde(with = "serde_vec")]
    pub theta: Vec<Rational>,
}

impl Branch {
    pub fn eval(&self, inst: &Instance, j: usize) -> Rational {
        let mut v = self.constant.clone();
        for (t, g) in self.theta.iter().zip(inst.gens()) {
            if !t.is_zero() {
                v += t * &g[j];
            }
        }
        v
    }

    /// Coefficients over the generators alone, with the constant moved onto
    /// the `+1` or `-1` row.
    pub fn conic(&self, inst: &Instance) -> Vec<Rational> {
        let mut theta = self.theta.clone();
        if self.constant.is_positive() {
            theta[inst.constants_row()] += &self.constant;
        } else if self.constant.is_negative() {
            let minus = (0..inst.m())
                .find(|&r| inst.gens()[r].iter().all(|q| *q == -Rational::one()))
                .expect("validated instance contains -1");
            theta[minus] -= &self.constant;
        }
        theta
    }
}

/// A function in the lattice cone integrating strictly higher against `mu`
/// than against `nu`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub branches: Vec<Branch>,
    #[serde(with = "serde_vec")]
    pub values: Vec<Rational>,
    #[serde(with = "serde_rational")]
    pub gap: Rational,
}

impl Witness {
    /// Recomputes everything from the branches: coefficients nonnegative,
    /// stored values equal the pointwise max, stored gap correct and positive.
    pub fn verify(&self, inst: &Instance) -> bool {
        let n = inst.n();
        if self.branches.is_empty()
            || self.values.len() != n
            || self
                .branches
                .iter()
                .any(|b| b.theta.len() != inst.m() || b.theta.iter().any(Signed::is_negative))
        {
            return false;
        }
        for j in 0..n {
            let max = self.branches.iter().map(|b| b.eval(inst, j)).max().expect("nonempty");
            if max != self.values[j] {
                return false;
            }
        }
        let gap = dot(&self.values, inst.mu()) - dot(&self.values, inst.nu());
        gap == self.gap && gap.is_positive()
    }
}

fn witness_from_farkas(inst: &Instance, flp: &FeasibilityLp, y: &Multipliers) -> Witness {
    let (n, m) = (inst.n(), inst.m());
    let mut all: Vec<Branch> = (0..n)
        .map(|_| Branch {
            constant: Rational::zero(),
            theta: vec![Rational::zero(); m],
        })
        .collect();
    for (kind, yk) in flp.rows.iter().zip(&y.constraints) {
        match *kind {
            RowKind::RowMarginal(i) => all[i].constant += yk,
            RowKind::ColMarginal(_) => {}
            RowKind::Generator { source, gen } => all[source].theta[gen] += yk,
        }
    }
    let table: Vec<Vec<Rational>> = all.iter().map(|b| (0..n).map(|j| b.eval(inst, j)).collect()).collect();
    let values: Vec<Rational> = (0..n)
        .map(|j| table.iter().map(|row| row[j].clone()).max().expect("n >= 1"))
        .collect();
    let mut branches: Vec<Branch> = Vec::new();
    for (b, row) in all.into_iter().zip(&table) {
        if row.iter().zip(&values).any(|(v, f)| v == f) && !branches.contains(&b) {
            branches.push(b);
        }
    }
    let gap = dot(&values, inst.mu()) - dot(&values, inst.nu());
    Witness { branches, values, gap }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderVerdict {
    Ordered(TransportPlan),
    NotOrdered(Witness),
}

impl OrderVerdict {
    pub fn is_ordered(&self) -> bool {
        matches!(self, OrderVerdict::Ordered(_))
    }
}

fn region_or_witness(inst: &Instance, options: LpOptions) -> Result<(FeasibilityLp, Region), Witness> {
    let flp = feasibility_lp_with(inst, options);
    match Region::new(&flp.problem) {
        Ok(region) => Ok((flp, region)),
        Err(y) => {
            let w = witness_from_farkas(inst, &flp, &y);
            debug_assert!(w.gap.is_positive(), "Farkas certificate gave a nonpositive gap");
            Err(w)
        }
    }
}

pub fn check_order(inst: &Instance) -> OrderVerdict {
    check_order_with(inst, LpOptions::default())
}

pub fn check_order_with(inst: &Instance, options: LpOptions) -> OrderVerdict {
    match region_or_witness(inst, options) {
        Ok((_, region)) => OrderVerdict::Ordered(TransportPlan::from_vars(inst.n(), &region.feasible_point())),
        Err(w) => OrderVerdict::NotOrdered(w),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransportError {
    #[error("instance is not ordered (witness gap {})", crate::rational::format_rational(&.0.gap))]
    NotOrdered(Box<Witness>),
    #[error("source {0} has zero mass")]
    ZeroMass(usize),
    #[error("index {0} out of range")]
    Index(usize),
    #[error("invalid plan: {0}")]
    Plan(#[from] PlanViolation),
    #[error("plan digest {found} does not match instance digest {expected}")]
    DigestMismatch { expected: String, found: String },
    #[error("density {which} is outside [0, 1] at target {target}")]
    Density { which: &'static str, target: usize },
    #[error("swapped measures have different total mass")]
    MassMismatch,
    #[error("swapped measures have different moments on generator {0}")]
    MomentMismatch(usize),
    #[error("epsilon must be positive")]
    Epsilon,
    #[error("modification has a nonzero {which} marginal at index {index}")]
    MarginalNonzero { which: &'static str, index: usize },
    #[error("generator moment nonzero (row {0}, generator {1})")]
    MomentNonzero(usize, usize),
    #[error("sign violation: modified plan is negative at ({0}, {1})")]
    Sign(usize, usize),
}

/// Outcome of probing every pair for positive mass.
#[derive(Debug, Clone)]
pub struct SupportProbe {
    pub mask: Mask,
    /// The phase-one plan followed by every probe optimizer that added support.
    pub plans: Vec<TransportPlan>,
    /// Number of pair LPs actually solved.
    pub lp_count: usize,
}

/// Maximizes each `pi[i][j]` over the polytope, reusing one feasible basis.
/// Pairs already positive in a collected plan, or with a zero-mass endpoint,
/// need no LP.
pub fn probe_support(inst: &Instance, options: LpOptions) -> Result<SupportProbe, TransportError> {
    let (_, region) = region_or_witness(inst, options).map_err(|w| TransportError::NotOrdered(Box::new(w)))?;
    let n = inst.n();
    let first = TransportPlan::from_vars(n, &region.feasible_point());
    let mut mask = first.support();
    let mut plans = vec![first];
    let mut lp_count = 0;
    for i in inst.sources() {
        for j in 0..n {
            if mask[i][j] || inst.nu()[j].is_zero() {
                continue;
            }
            let mut objective = vec![Rational::zero(); n * n];
            objective[var(n, i, j)] = Rational::one();
            lp_count += 1;
            if let LPOutcome::Optimal { point, value, .. } = region.optimize(&objective, Direction::Max) {
                if value.is_positive() {
                    let plan = TransportPlan::from_vars(n, &point);
                    for (mrow, srow) in mask.iter_mut().zip(plan.support()) {
                        for (a, b) in mrow.iter_mut().zip(srow) {
                            *a |= b;
                        }
                    }
                    plans.push(plan);
                }
            }
        }
    }
    Ok(SupportProbe { mask, plans, lp_count })
}

/// `mask[i][j]` is true iff some feasible plan charges `(i, j)`.
pub fn joint_support(inst: &Instance) -> Result<Mask, TransportError> {
    Ok(probe_support(inst, LpOptions::default())?.mask)
}

/// Row-normalized plan: `lambda(i, .) = pi[i] / mu_i` for sources of positive mass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Kernel {
    rows: Vec<Option<Vec<Rational>>>,
}

impl Kernel {
    pub fn from_plan(inst: &Instance, plan: &TransportPlan) -> Kernel {
        let rows = (0..inst.n())
            .map(|i| {
                let m = &inst.mu()[i];
                m.is_positive().then(|| plan.pi[i].iter().map(|x| x / m).collect())
            })
            .collect();
        Kernel { rows }
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> Result<&[Rational], TransportError> {
        match self.rows.get(i) {
            None => Err(TransportError::Index(i)),
            Some(None) => Err(TransportError::ZeroMass(i)),
            Some(Some(r)) => Ok(r),
        }
    }

    /// `S_i`: targets charged by the kernel at source `i`.
    pub fn support(&self, i: usize) -> Result<Vec<usize>, TransportError> {
        Ok(self.row(i)?.iter().enumerate().filter(|(_, x)| x.is_positive()).map(|(j, _)| j).collect())
    }
}

/// Uniform average of the probe plans; its support is the joint support.
pub fn maximal_kernel(inst: &Instance) -> Result<(TransportPlan, Kernel), TransportError> {
    maximal_kernel_with(inst, LpOptions::default())
}

pub fn maximal_kernel_with(inst: &Instance, options: LpOptions) -> Result<(TransportPlan, Kernel), TransportError> {
    let probe = probe_support(inst, options)?;
    let plan = average(&probe.plans);
    let kernel = Kernel::from_plan(inst, &plan);
    Ok((plan, kernel))
}

pub fn average(plans: &[TransportPlan]) -> TransportPlan {
    let n = plans[0].n();
    let w = Rational::new(1.into(), plans.len().into());
    let mut out = TransportPlan::zeros(n);
    for p in plans {
        for (orow, prow) in out.pi.iter_mut().zip(&p.pi) {
            for (o, x) in orow.iter_mut().zip(prow) {
                if !x.is_zero() {
                    *o += &w * x;
                }
            }
        }
    }
    out
}

/// Exchanges a sub-measure of row `i1` with one of row `i2`.
///
/// The exchanged pieces are `h1 · pi[i1]` and `h2 · pi[i2]`, taken at plan
/// scale so that column sums are untouched. They must have the same mass and
/// the same moment on every generator; then both rows keep their mass and
/// moments and the result is again a feasible plan.
pub fn mix_two(
    inst: &Instance,
    plan: &TransportPlan,
    i1: usize,
    i2: usize,
    h1: &[Rational],
    h2: &[Rational],
) -> Result<TransportPlan, TransportError> {
    let n = inst.n();
    for &i in &[i1, i2] {
        if i >= n {
            return Err(TransportError::Index(i));
        }
        if !inst.mu()[i].is_positive() {
            return Err(TransportError::ZeroMass(i));
        }
    }
    if h1.len() != n || h2.len() != n || plan.n() != n {
        return Err(PlanViolation::Shape(n).into());
    }
    for (which, h) in [("h1", h1), ("h2", h2)] {
        if let Some(target) = h.iter().position(|x| x.is_negative() || *x > Rational::one()) {
            return Err(TransportError::Density { which, target });
        }
    }
    let s1: Vec<Rational> = h1.iter().zip(&plan.pi[i1]).map(|(h, p)| h * p).collect();
    let s2: Vec<Rational> = h2.iter().zip(&plan.pi[i2]).map(|(h, p)| h * p).collect();
    if sum(&s1) != sum(&s2) {
        return Err(TransportError::MassMismatch);
    }
    if let Some(r) = inst.gens().iter().position(|g| dot(&s1, g) != dot(&s2, g)) {
        return Err(TransportError::MomentMismatch(r));
    }
    let mut out = plan.clone();
    for j in 0..n {
        out.pi[i1][j] = &plan.pi[i1][j] - &s1[j] + &s2[j];
        out.pi[i2][j] = &plan.pi[i2][j] - &s2[j] + &s1[j];
    }
    if i1 == i2 {
        out.pi[i1] = plan.pi[i1].clone();
    }
    if let Some((i, j)) = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).find(|&(i, j)| out.pi[i][j].is_negative()) {
        return Err(TransportError::Sign(i, j));
    }
    Ok(out)
}

/// A perturbation direction `rho` with zero marginals and zero generator
/// moments in every row, applied with step `epsilon`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModificationPlan {
    #[serde(with = "serde_matrix")]
    pub rho: Matrix,
    #[serde(with = "serde_rational")]
    pub epsilon: Rational,
}

impl ModificationPlan {
    /// The modification turning `from` into `to` with step one.
    pub fn between(from: &TransportPlan, to: &TransportPlan) -> ModificationPlan {
        let rho = from
            .pi
            .iter()
            .zip(&to.pi)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| y - x).collect())
            .collect();
        ModificationPlan {
            rho,
            epsilon: Rational::one(),
        }
    }
}

pub fn apply_modification(
    inst: &Instance,
    plan: &TransportPlan,
    modification: &ModificationPlan,
) -> Result<TransportPlan, TransportError> {
    let n = inst.n();
    let rho = &modification.rho;
    if plan.n() != n || rho.len() != n || rho.iter().any(|row| row.len() != n) {
        return Err(PlanViolation::Shape(n).into());
    }
    if !modification.epsilon.is_positive() {
        return Err(TransportError::Epsilon);
    }
    let rho_plan = TransportPlan::new(rho.clone());
    if let Some(index) = rho_plan.row_sums().iter().position(|s| !s.is_zero()) {
        return Err(TransportError::MarginalNonzero { which: "row", index });
    }
    if let Some(index) = rho_plan.col_sums().iter().position(|s| !s.is_zero()) {
        return Err(TransportError::MarginalNonzero { which: "column", index });
    }
    for (i, row) in rho.iter().enumerate() {
        if let Some(gen) = inst.gens().iter().position(|g| !dot(row, g).is_zero()) {
            return Err(TransportError::MomentNonzero(i, gen));
        }
    }
    let mut out = plan.clone();
    for i in 0..n {
        for j in 0..n {
            if !rho[i][j].is_zero() {
                out.pi[i][j] += &modification.epsilon * &rho[i][j];
                if out.pi[i][j].is_negative() {
                    return Err(TransportError::Sign(i, j));
                }
            }
        }
    }
    check_plan(inst, &out)?;
    Ok(out)
}
