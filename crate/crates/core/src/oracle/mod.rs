//! Seeded instance generation and a brute-force vertex enumerator.
//!
//! Ordered instances are built by spreading atoms of `mu` without moving their
//! generator moments the wrong way, so the spreading kernel itself is a
//! feasible plan and is returned alongside the instance.

mod suite;

pub use suite::{property_suite, Failure, Mutation, PropertyTally, SuiteReport};

use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::instance::{Cone, DualVector, Instance, InstanceError};
use crate::linalg::Echelon;
use crate::rational::{frac, Rational};
use crate::geometry::rint_intersect;
use crate::transport::{mix_two, TransportError, TransportPlan};

/// Largest number of feasible bases the enumerator visits.
pub const BRUTE_MAX_BASES: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("brute-force enumeration needs n <= 4, got {0}")]
    TooManyPoints(usize),
    #[error("brute-force enumeration gave up after {0} feasible bases")]
    TooManyBases(usize),
    #[error("no perturbation: every generator is constant or minimized on the support of mu")]
    NoPerturbation,
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConeKind {
    Martingale,
    Submartingale,
    Supermartingale,
}

impl ConeKind {
    pub fn cone(self) -> Cone {
        match self {
            ConeKind::Martingale => Cone::Martingale,
            ConeKind::Submartingale => Cone::Submartingale,
            ConeKind::Supermartingale => Cone::Supermartingale,
        }
    }

    pub fn parse(name: &str) -> Option<ConeKind> {
        match name {
            "martingale" => Some(ConeKind::Martingale),
            "submartingale" => Some(ConeKind::Submartingale),
            "supermartingale" => Some(ConeKind::Supermartingale),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenSpec {
    pub seed: u64,
    pub n: usize,
    pub d: usize,
    pub cone: ConeKind,
    /// Number of spreading steps; zero gives `mu = nu`.
    pub splits: usize,
}

/// A generated ordered instance with the plan that proves it ordered.
#[derive(Debug, Clone)]
pub struct Generated {
    pub instance: Instance,
    pub plan: TransportPlan,
}

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A rational with numerator in `[-bound, bound]` and denominator 1, 2 or 4.
fn small_rational<R: Rng>(rng: &mut R, bound: i64) -> Rational {
    let den = *[1i64, 2, 4].choose(rng).expect("nonempty");
    frac(rng.gen_range(-bound * den..=bound * den), den)
}

fn random_point<R: Rng>(rng: &mut R, d: usize) -> Vec<Rational> {
    (0..d).map(|_| small_rational(rng, 6)).collect()
}

fn random_direction<R: Rng>(rng: &mut R, d: usize) -> Vec<Rational> {
    loop {
        let u: Vec<Rational> = (0..d).map(|_| small_rational(rng, 3)).collect();
        if u.iter().any(|x| !x.is_zero()) {
            return u;
        }
    }
}

struct Points {
    coords: Vec<Vec<Rational>>,
    index: HashMap<Vec<Rational>, usize>,
}

impl Points {
    fn add(&mut self, p: Vec<Rational>) -> usize {
        if let Some(&i) = self.index.get(&p) {
            return i;
        }
        self.index.insert(p.clone(), self.coords.len());
        self.coords.push(p);
        self.coords.len() - 1
    }

    fn is_new(&self, p: &[Rational]) -> bool {
        !self.index.contains_key(p)
    }
}

pub fn gen_ordered(spec: &GenSpec) -> Generated {
    let mut rng = rng_for(spec.seed);
    let n = spec.n.max(1);
    let d = spec.d.max(1);
    let mut pts = Points {
        coords: Vec::new(),
        index: HashMap::new(),
    };
    let k = if spec.splits == 0 {
        n
    } else {
        rng.gen_range(1..=(n / 2).max(1))
    };
    while pts.coords.len() < k {
        let p = random_point(&mut rng, d);
        pts.add(p);
    }
    let raw: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=8)).collect();
    let total: i64 = raw.iter().sum();
    let source_mass: Vec<Rational> = raw.iter().map(|&w| frac(w, total)).collect();
    // atoms of the spreading kernel: (source, point, mass)
    let mut atoms: Vec<(usize, usize, Rational)> = (0..k).map(|i| (i, i, source_mass[i].clone())).collect();

    let steps = [frac(1, 2), frac(1, 1), frac(2, 1), frac(1, 3), frac(3, 2)];
    let mut done = 0;
    let mut attempts = 0;
    while done < spec.splits && attempts < 4 * spec.splits + 8 {
        attempts += 1;
        let a = rng.gen_range(0..atoms.len());
        let (source, at, w) = atoms[a].clone();
        let x = pts.coords[at].clone();
        let y1 = if pts.coords.len() > 1 && rng.gen_bool(0.3) {
            let mut other = rng.gen_range(0..pts.coords.len() - 1);
            if other >= at {
                other += 1;
            }
            pts.coords[other].clone()
        } else {
            let u = random_direction(&mut rng, d);
            x.iter().zip(&u).map(|(a, b)| a - b).collect()
        };
        let t = steps.choose(&mut rng).expect("nonempty").clone();
        let mut y2: Vec<Rational> = x.iter().zip(&y1).map(|(a, b)| a + &t * (a - b)).collect();
        // the second piece may drift in the direction the cone allows
        if spec.cone != ConeKind::Martingale && rng.gen_bool(0.5) {
            for c in y2.iter_mut() {
                let s = frac(rng.gen_range(0..=4), 2);
                match spec.cone {
                    ConeKind::Supermartingale => *c -= s,
                    _ => *c += s,
                }
            }
        }
        if y1 == y2 {
            continue;
        }
        let new = usize::from(pts.is_new(&y1)) + usize::from(pts.is_new(&y2));
        if pts.coords.len() + new > n {
            continue;
        }
        let i1 = pts.add(y1);
        let i2 = pts.add(y2);
        let one_plus = &t + Rational::one();
        atoms[a] = (source, i1, &w * &t / &one_plus);
        atoms.push((source, i2, &w / &one_plus));
        done += 1;
    }
    while pts.coords.len() < n {
        let p = random_point(&mut rng, d);
        pts.add(p);
    }

    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let mut coords = vec![Vec::new(); n];
    for (old, c) in pts.coords.iter().enumerate() {
        coords[perm[old]] = c.clone();
    }
    let mut mu = vec![Rational::zero(); n];
    for (i, m) in source_mass.iter().enumerate() {
        mu[perm[i]] = m.clone();
    }
    let mut plan = TransportPlan::zeros(n);
    let mut nu = vec![Rational::zero(); n];
    for (source, at, w) in &atoms {
        plan.pi[perm[*source]][perm[*at]] += w;
        nu[perm[*at]] += w;
    }
    let labels = (0..n).map(|j| format!("p{j}")).collect();
    let instance = Instance::new(labels, Some(coords), spec.cone.cone(), mu, nu, None)
        .expect("generated instances are valid by construction");
    Generated { instance, plan }
}

/// An ordered instance whose first two sources (returned) spread over one
/// shared set of targets with positive weights, so their open components meet.
pub fn gen_mixable(seed: u64) -> (Generated, usize, usize) {
    let mut rng = rng_for(seed);
    let d = rng.gen_range(1..=3);
    let cone = if rng.gen_bool(0.5) { ConeKind::Martingale } else { ConeKind::Supermartingale };
    loop {
        let mut pts = Points {
            coords: Vec::new(),
            index: HashMap::new(),
        };
        let k = rng.gen_range(d + 1..=d + 2);
        while pts.coords.len() < k {
            pts.add(random_point(&mut rng, d));
        }
        let targets = pts.coords.clone();
        let spreads: Vec<Vec<Rational>> = (0..2).map(|_| random_weights(&mut rng, k, Some(&(0..k).collect::<Vec<_>>()))).collect();
        let sources: Vec<Vec<Rational>> = spreads
            .iter()
            .map(|w| (0..d).map(|c| w.iter().zip(&targets).map(|(a, y)| a * &y[c]).sum()).collect())
            .collect();
        if sources.iter().any(|x| !pts.is_new(x)) || sources[0] == sources[1] {
            continue;
        }
        let s0 = pts.add(sources[0].clone());
        let s1 = pts.add(sources[1].clone());
        let extra = rng.gen_bool(0.5).then(|| pts.add(random_point(&mut rng, d)));
        let n = pts.coords.len();
        let raw: Vec<i64> = (0..3).map(|_| rng.gen_range(1..=8)).collect();
        let total: i64 = if extra.is_some() { raw.iter().sum() } else { raw[0] + raw[1] };
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let mut plan = TransportPlan::zeros(n);
        let mut mu = vec![Rational::zero(); n];
        for (s, w) in [s0, s1].into_iter().zip(&spreads) {
            let m = frac(raw[s - k], total);
            for (t, wt) in w.iter().enumerate() {
                plan.pi[perm[s]][perm[t]] = &m * wt;
            }
            mu[perm[s]] = m;
        }
        if let Some(e) = extra {
            mu[perm[e]] = frac(raw[2], total);
            plan.pi[perm[e]][perm[e]] = mu[perm[e]].clone();
        }
        let nu = plan.col_sums();
        let mut coords = vec![Vec::new(); n];
        for (old, c) in pts.coords.into_iter().enumerate() {
            coords[perm[old]] = c;
        }
        let labels = (0..n).map(|j| format!("p{j}")).collect();
        let instance = Instance::new(labels, Some(coords), cone.cone(), mu, nu, None)
            .expect("generated instances are valid by construction");
        return (Generated { instance, plan }, perm[s0], perm[s1]);
    }
}

/// Breaks the order of a generated instance: `nu` atoms move onto a minimizer
/// of one generator until that generator integrates higher under `mu`.
pub fn gen_unordered(spec: &GenSpec) -> Result<Instance, OracleError> {
    let inst = gen_ordered(spec).instance;
    let mut rng = rng_for(spec.seed.rotate_left(17) ^ 0x5eed);
    let mut rows: Vec<usize> = (0..inst.m()).filter(|&r| !inst.is_constant_row(r)).collect();
    rows.shuffle(&mut rng);
    for &r in &rows {
        let g = &inst.gens()[r];
        let low = (0..inst.n()).min_by(|&a, &b| g[a].cmp(&g[b])).expect("n >= 1");
        let mu_side = crate::rational::dot(g, inst.mu());
        if mu_side == g[low] {
            continue;
        }
        let mut nu = inst.nu().to_vec();
        let mut movable: Vec<usize> = (0..inst.n()).filter(|&j| nu[j].is_positive() && g[j] > g[low]).collect();
        movable.shuffle(&mut rng);
        for j in movable {
            let m = std::mem::take(&mut nu[j]);
            nu[low] += m;
            if mu_side > crate::rational::dot(g, &nu) {
                break;
            }
        }
        return Ok(inst.with_marginals(inst.mu().to_vec(), nu)?);
    }
    // mu sits on the minimisers of every generator: move both marginals
    let &r = rows.first().ok_or(OracleError::NoPerturbation)?;
    let g = &inst.gens()[r];
    let low = (0..inst.n()).min_by(|&a, &b| g[a].cmp(&g[b])).expect("n >= 1");
    let high = (0..inst.n()).max_by(|&a, &b| g[a].cmp(&g[b])).expect("n >= 1");
    let dirac = |k: usize| (0..inst.n()).map(|j| if j == k { Rational::one() } else { Rational::zero() }).collect();
    Ok(inst.with_marginals(dirac(high), dirac(low))?)
}

/// Standard-form data for enumeration: unknowns are the plan entries that can
/// be positive, then one surplus per one-sided generator row.
struct StandardForm {
    pairs: Vec<(usize, usize)>,
    columns: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
}

fn standard_form(inst: &Instance) -> StandardForm {
    let n = inst.n();
    let (mu, nu) = (inst.mu(), inst.nu());
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| mu[i].is_positive() && nu[j].is_positive())
        .collect();
    // each row as (coefficient per pair, rhs, has surplus)
    let mut rows: Vec<(Vec<Rational>, Rational, bool)> = Vec::new();
    for i in 0..n {
        if mu[i].is_positive() {
            let c = pairs.iter().map(|&(a, _)| if a == i { Rational::one() } else { Rational::zero() }).collect();
            rows.push((c, mu[i].clone(), false));
        }
    }
    for j in 0..n {
        if nu[j].is_positive() {
            let c = pairs.iter().map(|&(_, b)| if b == j { Rational::one() } else { Rational::zero() }).collect();
            rows.push((c, nu[j].clone(), false));
        }
    }
    let gens = inst.gens();
    for i in 0..n {
        if !mu[i].is_positive() {
            continue;
        }
        for (r, g) in gens.iter().enumerate() {
            if inst.is_constant_row(r) {
                continue;
            }
            let minus: Vec<Rational> = g.iter().map(|x| -x).collect();
            let paired = gens.iter().position(|h| *h == minus);
            if paired.is_some_and(|p| p < r) {
                continue;
            }
            let c = pairs.iter().map(|&(a, b)| if a == i { g[b].clone() } else { Rational::zero() }).collect();
            rows.push((c, &mu[i] * &g[i], paired.is_none()));
        }
    }
    let height = rows.len();
    let mut columns: Vec<Vec<Rational>> = (0..pairs.len()).map(|k| rows.iter().map(|row| row.0[k].clone()).collect()).collect();
    for (r, row) in rows.iter().enumerate() {
        if row.2 {
            let mut col = vec![Rational::zero(); height];
            col[r] = -Rational::one();
            columns.push(col);
        }
    }
    StandardForm {
        pairs,
        columns,
        rhs: rows.into_iter().map(|row| row.1).collect(),
    }
}

/// Every vertex of the transport polytope. A phase-one simplex finds a feasible
/// basis `B0`; the right-hand side is then perturbed by `B0 (e, e^2, ...)`,
/// which makes the polytope simple, and every basis reachable by a
/// lexicographic pivot is visited. Each vertex is the limit of a perturbed one.
pub fn brute_vertices(inst: &Instance) -> Result<Vec<TransportPlan>, OracleError> {
    if inst.n() > 4 {
        return Err(OracleError::TooManyPoints(inst.n()));
    }
    let sf = standard_form(inst);
    let n = inst.n();
    let to_plan = |x: &[Rational]| {
        let mut plan = TransportPlan::zeros(n);
        for (&(i, j), v) in sf.pairs.iter().zip(x) {
            plan.pi[i][j] = v.clone();
        }
        plan
    };
    let Some(mut start) = Tableau::feasible(&sf) else {
        return Ok(Vec::new());
    };
    start.anchor();
    let width = sf.columns.len();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut vertices: Vec<Vec<Rational>> = Vec::new();
    let mut known: HashSet<Vec<Rational>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(start.key());
    queue.push_back(start);
    while let Some(t) = queue.pop_front() {
        let x = t.solution(width);
        let pairs_part = x[..sf.pairs.len()].to_vec();
        if known.insert(pairs_part.clone()) {
            vertices.push(pairs_part);
        }
        for e in (0..width).filter(|c| !t.basis.contains(c)) {
            let Some(r) = t.lex_row(e, width) else { continue };
            let mut basis = t.basis.clone();
            basis[r] = e;
            basis.sort_unstable();
            if !seen.insert(basis) {
                continue;
            }
            if seen.len() > BRUTE_MAX_BASES {
                return Err(OracleError::TooManyBases(BRUTE_MAX_BASES));
            }
            let mut next = t.clone();
            next.pivot(r, e);
            queue.push_back(next);
        }
    }
    Ok(vertices.iter().map(|x| to_plan(x)).collect())
}

/// Dense simplex tableau `[B^-1 A | B^-1 b]` with its basis.
#[derive(Clone)]
struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
}

impl Tableau {
    fn key(&self) -> Vec<usize> {
        let mut k = self.basis.clone();
        k.sort_unstable();
        k
    }

    fn rhs(&self, r: usize) -> &Rational {
        self.rows[r].last().expect("rhs column")
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let p = self.rows[r][e].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &p;
        }
        let pivot_row = self.rows[r].clone();
        for (k, row) in self.rows.iter_mut().enumerate() {
            if k == r || row[e].is_zero() {
                continue;
            }
            let f = row[e].clone();
            for (v, q) in row.iter_mut().zip(&pivot_row) {
                if !q.is_zero() {
                    *v -= &f * q;
                }
            }
        }
        self.basis[r] = e;
    }

    /// Appends `B0^-1 B0 = I` for the current basis `B0`; pivots keep these
    /// columns equal to `B^-1 B0`, the perturbation seen from basis `B`.
    fn anchor(&mut self) {
        let m = self.rows.len();
        for (r, row) in self.rows.iter_mut().enumerate() {
            let b = row.pop().expect("rhs");
            row.extend((0..m).map(|k| if k == r { Rational::one() } else { Rational::zero() }));
            row.push(b);
        }
    }

    /// The leaving row for entering column `e` under the perturbed right-hand
    /// side: the lexicographically smallest `(rhs, B^-1 B0 row) / pivot`.
    fn lex_row(&self, e: usize, width: usize) -> Option<usize> {
        let key = |r: usize| {
            let row = &self.rows[r];
            let mut k = vec![self.rhs(r) / &row[e]];
            k.extend(row[width..row.len() - 1].iter().map(|v| v / &row[e]));
            k
        };
        (0..self.rows.len())
            .filter(|&r| self.rows[r][e].is_positive())
            .map(|r| (key(r), r))
            .min()
            .map(|(_, r)| r)
    }

    /// Rows that may leave when `e` enters, all tied at the minimum ratio.
    fn ratio_rows(&self, e: usize) -> Vec<usize> {
        let mut best: Option<Rational> = None;
        let mut rows = Vec::new();
        for (r, row) in self.rows.iter().enumerate() {
            if !row[e].is_positive() {
                continue;
            }
            let ratio = self.rhs(r) / &row[e];
            match &best {
                Some(b) if ratio > *b => {}
                Some(b) if ratio == *b => rows.push(r),
                _ => {
                    best = Some(ratio);
                    rows = vec![r];
                }
            }
        }
        rows
    }

    fn solution(&self, width: usize) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); width];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < width {
                x[b] = self.rhs(r).clone();
            }
        }
        x
    }

    /// Phase one with artificial columns after the real ones and Bland's rule.
    /// `None` when the system has no nonnegative solution.
    fn feasible(sf: &StandardForm) -> Option<Tableau> {
        let width = sf.columns.len();
        // keep a maximal independent set of rows
        let mut span = Echelon::new(width + 1);
        let mut rows: Vec<Vec<Rational>> = Vec::new();
        for (r, b) in sf.rhs.iter().enumerate() {
            let mut row: Vec<Rational> = sf.columns.iter().map(|c| c[r].clone()).collect();
            row.push(b.clone());
            if span.insert(&row) {
                rows.push(row);
            }
        }
        let m = rows.len();
        let mut t = Tableau {
            rows: Vec::with_capacity(m),
            basis: (width..width + m).collect(),
        };
        for (r, mut row) in rows.into_iter().enumerate() {
            let b = row.pop().expect("rhs");
            let sign = if b.is_negative() { -Rational::one() } else { Rational::one() };
            let mut full: Vec<Rational> = row.iter().map(|v| v * &sign).collect();
            full.extend((0..m).map(|k| if k == r { Rational::one() } else { Rational::zero() }));
            full.push(b * &sign);
            t.rows.push(full);
        }
        loop {
            // reduced cost of column c under objective sum of artificials
            let entering = (0..width).find(|&c| {
                !t.basis.contains(&c) && {
                    let cost: Rational = t
                        .rows
                        .iter()
                        .zip(&t.basis)
                        .filter(|(_, &b)| b >= width)
                        .map(|(row, _)| row[c].clone())
                        .sum();
                    cost.is_positive()
                }
            });
            let Some(e) = entering else { break };
            let r = t.ratio_rows(e).into_iter().min_by_key(|&r| t.basis[r]).expect("bounded by the marginals");
            t.pivot(r, e);
        }
        if t.basis.iter().enumerate().any(|(r, &b)| b >= width && !t.rhs(r).is_zero()) {
            return None;
        }
        for r in 0..m {
            if t.basis[r] >= width {
                // independent rows always leave a real column to swap in
                let e = (0..width)
                    .find(|&c| !t.basis.contains(&c) && !t.rows[r][c].is_zero())
                    .expect("rows are independent");
                t.pivot(r, e);
            }
        }
        for row in t.rows.iter_mut() {
            row.drain(width..width + m);
        }
        Some(t)
    }
}

/// Swaps equal-moment pieces between rows `i1` and `i2` of `plan` when the
/// open hulls of their embedded supports meet. The pieces are a common
/// interior point's two representations, scaled to half of what the rows can
/// give, so both rows stay positive on their old supports and gain the other's.
pub fn rint_mix(inst: &Instance, plan: &TransportPlan, i1: usize, i2: usize) -> Result<Option<TransportPlan>, TransportError> {
    let s1 = plan.row_support(i1);
    let s2 = plan.row_support(i2);
    let embed = |s: &[usize]| s.iter().map(|&j| inst.phi(j)).collect::<Vec<_>>();
    let Some(meet) = rint_intersect(&embed(&s1), &embed(&s2)).expect("embedded points share a length") else {
        return Ok(None);
    };
    let ratios = s1
        .iter()
        .zip(&meet.weights1)
        .map(|(&j, w)| &plan.pi[i1][j] / w)
        .chain(s2.iter().zip(&meet.weights2).map(|(&j, w)| &plan.pi[i2][j] / w));
    let eps = ratios.min().expect("supports are nonempty") / frac(2, 1);
    let n = inst.n();
    let mut h1 = vec![Rational::zero(); n];
    let mut h2 = vec![Rational::zero(); n];
    for (&j, w) in s1.iter().zip(&meet.weights1) {
        h1[j] = &eps * w / &plan.pi[i1][j];
    }
    for (&j, w) in s2.iter().zip(&meet.weights2) {
        h2[j] = &eps * w / &plan.pi[i2][j];
    }
    mix_two(inst, plan, i1, i2, &h1, &h2).map(Some)
}

/// Random positive weights on a random nonempty subset of `0..k`.
pub fn random_weights<R: Rng>(rng: &mut R, k: usize, subset: Option<&[usize]>) -> Vec<Rational> {
    let chosen: Vec<usize> = match subset {
        Some(s) => s.to_vec(),
        None => {
            let mut all: Vec<usize> = (0..k).collect();
            all.shuffle(rng);
            let take = rng.gen_range(1..=k);
            all.truncate(take);
            all
        }
    };
    let raw: Vec<i64> = chosen.iter().map(|_| rng.gen_range(1..=9)).collect();
    let total: i64 = raw.iter().sum();
    let mut w = vec![Rational::zero(); k];
    for (&c, &r) in chosen.iter().zip(&raw) {
        w[c] += frac(r, total);
    }
    w
}

/// A random polytope in dimension `1..=4` with at most ten listed points,
/// sometimes flat or with repeated points, and two points of its hull that
/// often share a face.
pub fn polytope_query<R: Rng>(rng: &mut R) -> (Vec<DualVector>, DualVector, DualVector) {
    let dim = rng.gen_range(1..=4);
    let k = rng.gen_range(1..=10);
    let flat = rng.gen_range(1..=dim);
    let lift: Vec<Vec<i64>> = (0..dim).map(|_| (0..flat).map(|_| rng.gen_range(-2..=2)).collect()).collect();
    let mut points: Vec<DualVector> = Vec::new();
    for _ in 0..k {
        if !points.is_empty() && rng.gen_bool(0.1) {
            let copy = points[rng.gen_range(0..points.len())].clone();
            points.push(copy);
            continue;
        }
        let base: Vec<i64> = (0..flat).map(|_| rng.gen_range(-3..=3)).collect();
        let coords = if flat == dim {
            base.iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect()
        } else {
            lift.iter()
                .map(|row| Rational::from_integer(BigInt::from(row.iter().zip(&base).map(|(a, b)| a * b).sum::<i64>())))
                .collect()
        };
        points.push(DualVector(coords));
    }
    let wa = random_weights(rng, k, None);
    let wb = if rng.gen_bool(0.5) {
        let same: Vec<usize> = (0..k).filter(|&v| wa[v].is_positive()).collect();
        random_weights(rng, k, Some(&same))
    } else {
        random_weights(rng, k, None)
    };
    let a = DualVector::combination(&wa, &points);
    let b = DualVector::combination(&wb, &points);
    (points, a, b)
}
