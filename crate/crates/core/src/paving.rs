//! Irreducible components and the paving they form.
//!
//! The component of a source `i` is `rint conv Φ(S_i)` where `S_i` is the
//! support of the maximal kernel at `i`. It is stored as the pair (support,
//! affine hull) and queried through LPs; point sets are never enumerated.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    affine_hull, conv_member, minimal_face, rint_intersect, rint_member, AffineHull, ConvMembership, GeometryError,
};
use crate::instance::{DualVector, Instance};
use crate::rational::{dot, serde_matrix, serde_vec, Rational};
use crate::ratlp::{solve, Direction, LPOutcome, LPProblem, Relation};
use crate::transport::{maximal_kernel, Kernel, TransportError, TransportPlan};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PavingError {
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("source {0} has zero mass")]
    ZeroMass(usize),
    #[error("query has length {found}, expected {expected}")]
    Dimension { expected: usize, found: usize },
    #[error("partition violation: sources {first} and {second} share a component but have supports {first_support:?} and {second_support:?}")]
    PartitionViolation {
        first: usize,
        second: usize,
        first_support: Vec<usize>,
        second_support: Vec<usize>,
    },
    #[error("integrals differ: sum f mu - sum f nu = {0}")]
    IntegralGap(String),
    #[error("query is not a bounded-density moment on the {0} side")]
    Precondition(&'static str),
}

#[derive(Debug, Clone)]
pub struct Component {
    pub class_id: usize,
    pub members: Vec<usize>,
    pub support: Vec<usize>,
    pub hull: AffineHull,
    pub dim: usize,
    pub mu_class: Vec<Rational>,
    pub nu_class: Vec<Rational>,
}

#[derive(Debug, Clone)]
pub struct Paving {
    pub components: Vec<Component>,
    pub plan: TransportPlan,
    pub kernel: Kernel,
}

impl Paving {
    /// Class index of source `i`, if it has positive mass.
    pub fn class_of(&self, i: usize) -> Option<usize> {
        self.components.iter().position(|c| c.members.contains(&i))
    }

    pub fn to_document(&self, inst: &Instance) -> PavingDocument {
        let names = |ix: &[usize]| ix.iter().map(|&j| inst.label(j).to_string()).collect();
        PavingDocument {
            digest: inst.digest(),
            components: self
                .components
                .iter()
                .map(|c| ComponentDocument {
                    class_id: c.class_id,
                    members: names(&c.members),
                    support: names(&c.support),
                    dim: c.dim,
                    mu_class: c.mu_class.clone(),
                    nu_class: c.nu_class.clone(),
                })
                .collect(),
            plot: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentDocument {
    pub class_id: usize,
    pub members: Vec<String>,
    pub support: Vec<String>,
    pub dim: usize,
    #[serde(with = "serde_vec")]
    pub mu_class: Vec<Rational>,
    #[serde(with = "serde_vec")]
    pub nu_class: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PavingDocument {
    pub digest: String,
    pub components: Vec<ComponentDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plot: Option<Vec<PlotComponent>>,
}

/// Support points of one component in counterclockwise convex position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlotComponent {
    pub class_id: usize,
    #[serde(with = "serde_matrix")]
    pub polygon: Vec<Vec<Rational>>,
}

fn embedded(inst: &Instance, ix: &[usize]) -> Vec<DualVector> {
    ix.iter().map(|&j| inst.phi(j)).collect()
}

fn check_query(inst: &Instance, a: &DualVector) -> Result<(), PavingError> {
    if a.len() != inst.m() {
        return Err(PavingError::Dimension {
            expected: inst.m(),
            found: a.len(),
        });
    }
    Ok(())
}

fn zero_mass(e: TransportError) -> PavingError {
    match e {
        TransportError::ZeroMass(i) => PavingError::ZeroMass(i),
        other => other.into(),
    }
}

/// Support of the kernel at `i` and the affine hull of its embedding.
pub fn component_of(inst: &Instance, kernel: &Kernel, i: usize) -> Result<(Vec<usize>, AffineHull), PavingError> {
    let support = kernel.support(i).map_err(zero_mass)?;
    let hull = affine_hull(&embedded(inst, &support))?;
    Ok((support, hull))
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        // the smaller index stays the root so classes are named by their first member
        if ra < rb {
            self.0[rb] = ra;
        } else if rb < ra {
            self.0[ra] = rb;
        }
    }
}

pub fn compute_paving(inst: &Instance) -> Result<Paving, PavingError> {
    let (plan, kernel) = maximal_kernel(inst)?;
    pave(inst, plan, kernel)
}

/// Builds the paving from a given plan and its kernel. A kernel that is not
/// maximal can make two sources with different supports meet, which is
/// reported as a partition violation.
pub fn pave(inst: &Instance, plan: TransportPlan, kernel: Kernel) -> Result<Paving, PavingError> {
    let sources: Vec<usize> = inst.sources().collect();
    let mut supports = vec![Vec::new(); inst.n()];
    for &i in &sources {
        supports[i] = kernel.support(i).map_err(zero_mass)?;
    }
    let mut uf = UnionFind((0..inst.n()).collect());
    for (k, &a) in sources.iter().enumerate() {
        for &b in &sources[k + 1..] {
            if uf.find(a) == uf.find(b) {
                continue;
            }
            let meet = supports[a] == supports[b]
                || rint_intersect(&embedded(inst, &supports[a]), &embedded(inst, &supports[b]))?.is_some();
            if meet {
                uf.union(a, b);
            }
        }
    }
    let mut components: Vec<Component> = Vec::new();
    for &i in &sources {
        let root = uf.find(i);
        if root != i {
            continue;
        }
        let members: Vec<usize> = sources.iter().copied().filter(|&s| uf.find(s) == root).collect();
        for &s in &members[1..] {
            if supports[s] != supports[i] {
                return Err(PavingError::PartitionViolation {
                    first: i,
                    second: s,
                    first_support: supports[i].clone(),
                    second_support: supports[s].clone(),
                });
            }
        }
        let support = supports[i].clone();
        let hull = affine_hull(&embedded(inst, &support))?;
        let n = inst.n();
        let mut mu_class = vec![Rational::zero(); n];
        let mut nu_class = vec![Rational::zero(); n];
        for &s in &members {
            mu_class[s] = inst.mu()[s].clone();
            for j in 0..n {
                nu_class[j] += &plan.pi[s][j];
            }
        }
        components.push(Component {
            class_id: components.len(),
            dim: hull.dim(),
            members,
            support,
            hull,
            mu_class,
            nu_class,
        });
    }
    Ok(Paving {
        components,
        plan,
        kernel,
    })
}

/// Whether `a` is the moment vector of a probability on `S_i` with bounded
/// density against the kernel; only the upper bound matters, so this is plain
/// hull membership.
pub fn theta_member(inst: &Instance, kernel: &Kernel, i: usize, a: &DualVector) -> Result<ConvMembership, PavingError> {
    check_query(inst, a)?;
    let support = kernel.support(i).map_err(zero_mass)?;
    Ok(conv_member(a, &embedded(inst, &support))?)
}

/// Whether `a` is the moment vector of some `eta` with `c λ <= eta <= C λ` on
/// `S_i`, `0 < c`. Maximizes the smallest ratio `eta_j / λ_j`.
pub fn rint_via_density(inst: &Instance, kernel: &Kernel, i: usize, a: &DualVector) -> Result<bool, PavingError> {
    check_query(inst, a)?;
    let row = kernel.row(i).map_err(zero_mass)?;
    let support = kernel.support(i).map_err(zero_mass)?;
    let k = support.len();
    // variables: eta over S_i, then s
    let mut lp = LPProblem::new(k + 1);
    lp.set_free(k);
    let mut total = vec![Rational::one(); k + 1];
    total[k] = Rational::zero();
    lp.add_constraint(total, Relation::Eq, Rational::one());
    for (r, g) in inst.gens().iter().enumerate() {
        let mut coeffs: Vec<Rational> = support.iter().map(|&j| g[j].clone()).collect();
        coeffs.push(Rational::zero());
        lp.add_constraint(coeffs, Relation::Eq, a.0[r].clone());
    }
    for (v, &j) in support.iter().enumerate() {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[v] = Rational::one();
        coeffs[k] = -&row[j];
        lp.add_constraint(coeffs, Relation::Ge, Rational::zero());
    }
    let mut objective = vec![Rational::zero(); k + 1];
    objective[k] = Rational::one();
    lp.set_objective(objective, Direction::Max);
    Ok(matches!(solve(&lp), LPOutcome::Optimal { value, .. } if value.is_positive()))
}

/// For each class, nonnegative generator coefficients reproducing `f` on the
/// class's support and members, or `None` when no such combination exists.
pub fn face_fit(inst: &Instance, paving: &Paving, f: &[Rational]) -> Result<Vec<Option<Vec<Rational>>>, PavingError> {
    if f.len() != inst.n() {
        return Err(PavingError::Dimension {
            expected: inst.n(),
            found: f.len(),
        });
    }
    let gap = dot(f, inst.mu()) - dot(f, inst.nu());
    if !gap.is_zero() {
        return Err(PavingError::IntegralGap(crate::rational::format_rational(&gap)));
    }
    let m = inst.m();
    let mut out = Vec::new();
    for c in &paving.components {
        let mut points = c.support.clone();
        points.extend(c.members.iter().copied().filter(|i| !c.support.contains(i)));
        let mut lp = LPProblem::new(m);
        for &x in &points {
            let coeffs = inst.gens().iter().map(|g| g[x].clone()).collect();
            lp.add_constraint(coeffs, Relation::Eq, f[x].clone());
        }
        // constants cost nothing, so they are used before any other generator
        let cost = (0..m)
            .map(|r| if inst.is_constant_row(r) { Rational::zero() } else { Rational::one() })
            .collect();
        lp.set_objective(cost, Direction::Min);
        out.push(match solve(&lp) {
            LPOutcome::Optimal { point, .. } => Some(point),
            _ => None,
        });
    }
    Ok(out)
}

/// Whether the minimal faces of `a` in `conv Φ(S_{i1})` and `conv Φ(S_{i2})`
/// are the same set.
pub fn fine_intersection(
    inst: &Instance,
    kernel: &Kernel,
    i1: usize,
    i2: usize,
    a: &DualVector,
) -> Result<bool, PavingError> {
    if !theta_member(inst, kernel, i1, a)?.is_member() {
        return Err(PavingError::Precondition("first"));
    }
    if !theta_member(inst, kernel, i2, a)?.is_member() {
        return Err(PavingError::Precondition("second"));
    }
    let p1 = embedded(inst, &kernel.support(i1).map_err(zero_mass)?);
    let p2 = embedded(inst, &kernel.support(i2).map_err(zero_mass)?);
    let f1 = minimal_face(a, &p1)?.points(&p1);
    let f2 = minimal_face(a, &p2)?.points(&p2);
    for (x, other) in f1.iter().map(|x| (x, &f2)).chain(f2.iter().map(|x| (x, &f1))) {
        if !conv_member(x, other)?.is_member() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn project(v: &DualVector, rows: &[usize]) -> DualVector {
    DualVector(rows.iter().map(|&r| v.0[r].clone()).collect())
}

/// Member `i` lies in its own component after restricting to the rows whose
/// negation is also a generator (all rows for linear cones).
pub fn self_member(inst: &Instance, component: &Component, i: usize) -> Result<bool, PavingError> {
    let rows = inst.symmetric_rows();
    let pts: Vec<DualVector> = component.support.iter().map(|&j| project(&inst.phi(j), &rows)).collect();
    Ok(rint_member(&project(&inst.phi(i), &rows), &pts)?.is_some())
}

/// Re-checks the structural invariants of a paving, returning a description
/// of every failure.
pub fn check_paving(inst: &Instance, paving: &Paving) -> Result<Vec<String>, PavingError> {
    let mut problems = Vec::new();
    let n = inst.n();
    let mut owner = vec![None; n];
    for c in &paving.components {
        for &i in &c.members {
            if let Some(prev) = owner[i].replace(c.class_id) {
                problems.push(format!("source {i} is in classes {prev} and {}", c.class_id));
            }
            if kernel_support(paving, i)? != c.support {
                problems.push(format!("source {i} has a support different from its class {}", c.class_id));
            }
        }
    }
    for i in inst.sources() {
        if owner[i].is_none() {
            problems.push(format!("source {i} is not covered"));
        }
    }
    for (a, ca) in paving.components.iter().enumerate() {
        for cb in &paving.components[a + 1..] {
            if rint_intersect(&embedded(inst, &ca.support), &embedded(inst, &cb.support))?.is_some() {
                problems.push(format!("classes {} and {} intersect", ca.class_id, cb.class_id));
            }
        }
    }
    let mut mu_total = vec![Rational::zero(); n];
    let mut nu_total = vec![Rational::zero(); n];
    for c in &paving.components {
        for j in 0..n {
            mu_total[j] += &c.mu_class[j];
            nu_total[j] += &c.nu_class[j];
            if c.nu_class[j].is_positive() && !c.support.contains(&j) {
                problems.push(format!("class {} charges {j} outside its support", c.class_id));
            }
        }
    }
    if mu_total != inst.mu() {
        problems.push("class masses do not add up to mu".into());
    }
    if nu_total != inst.nu() {
        problems.push("class targets do not add up to nu".into());
    }
    for c in &paving.components {
        for &i in &c.members {
            if !self_member(inst, c, i)? {
                problems.push(format!("source {i} is outside its own component"));
            }
        }
    }
    Ok(problems)
}

fn kernel_support(paving: &Paving, i: usize) -> Result<Vec<usize>, PavingError> {
    paving.kernel.support(i).map_err(zero_mass)
}

fn cross(o: &[Rational], a: &[Rational], b: &[Rational]) -> Rational {
    (&a[0] - &o[0]) * (&b[1] - &o[1]) - (&a[1] - &o[1]) * (&b[0] - &o[0])
}

/// Convex hull vertices of planar points, counterclockwise from the lowest-left.
pub fn convex_polygon(points: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<Vec<Rational>> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && !cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p).is_positive() {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Vec<Rational>> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && !cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p).is_positive() {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Plot polygons for two-dimensional coordinates; `None` otherwise.
pub fn plot_data(inst: &Instance, paving: &Paving) -> Option<Vec<PlotComponent>> {
    let coords = inst.coords()?;
    if coords.first().map_or(0, Vec::len) != 2 {
        return None;
    }
    Some(
        paving
            .components
            .iter()
            .map(|c| PlotComponent {
                class_id: c.class_id,
                polygon: convex_polygon(&c.support.iter().map(|&j| coords[j].clone()).collect::<Vec<_>>()),
            })
            .collect(),
    )
}
