//! End-to-end property run over generated instances.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{brute_vertices, gen_ordered, gen_unordered, polytope_query, random_weights, rint_mix, rng_for, ConeKind, GenSpec, OracleError};
use crate::geometry::{gleason_equiv, harnack_equiv, rint_member};
use crate::instance::{DualVector, Instance, InstanceDocument};
use crate::paving::{check_paving, face_fit, fine_intersection, pave, rint_via_density};
use crate::polar::{is_polar, max_mass, obloj_siorpaes_check, PairSet};
use crate::poussin::{poussin, tail};
use crate::rational::{dot, frac, inv_pow2, Rational};
use crate::transport::{
    apply_modification, average, check_order_with, check_plan, maximal_kernel_with, probe_support, verify_plan, Kernel,
    LpOptions, Mask, ModificationPlan, OrderVerdict, TransportPlan,
};

/// A deliberate defect, used to check that the suite can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    /// Drop the first non-constant generator row from every feasibility LP.
    SkipGenerator,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PropertyTally {
    pub checked: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub index: usize,
    pub seed: u64,
    pub property: &'static str,
    pub message: String,
    pub instance: InstanceDocument,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub count: usize,
    pub properties: BTreeMap<&'static str, PropertyTally>,
    pub failures: Vec<Failure>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "property suite: seed {}, {} instances", self.seed, self.count)?;
        for (name, t) in &self.properties {
            let verdict = if t.failed == 0 { "pass" } else { "FAIL" };
            writeln!(f, "  {name:<26} {:>5} checked {:>4} failed  {verdict}", t.checked, t.failed)?;
        }
        writeln!(f, "failures: {}", self.failures.len())?;
        for fail in &self.failures {
            writeln!(
                f,
                "- instance {} (seed {}), {}: {}",
                fail.index, fail.seed, fail.property, fail.message
            )?;
            let doc = serde_json::to_string(&fail.instance).map_err(|_| fmt::Error)?;
            writeln!(f, "  replay: {doc}")?;
        }
        Ok(())
    }
}

const PROPERTIES: &[&str] = &[
    "determinism",
    "construction-plan",
    "strassen-ordered",
    "strassen-unordered",
    "order-monotone-in-cone",
    "support-contains-plans",
    "maximal-kernel",
    "brute-force",
    "paving-partition",
    "rint-density",
    "harnack-gleason",
    "fine-intersection",
    "face-fit",
    "mixing",
    "kellerer",
    "polar-characterization",
    "max-mass-monotone",
    "outside-mask-polar",
    "poussin",
];

type Check = Result<(), String>;

fn ensure(ok: bool, message: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

struct Run<'a> {
    report: &'a mut SuiteReport,
    index: usize,
    seed: u64,
}

impl Run<'_> {
    fn record(&mut self, property: &'static str, inst: &Instance, outcome: Check) {
        let tally = self.report.properties.entry(property).or_default();
        tally.checked += 1;
        if let Err(message) = outcome {
            tally.failed += 1;
            self.report.failures.push(Failure {
                index: self.index,
                seed: self.seed,
                property,
                message,
                instance: inst.to_document(),
            });
        }
    }
}

/// Instance shape for suite entry `index`, drawn from the suite seed.
pub fn suite_spec(rng: &mut ChaCha8Rng) -> GenSpec {
    let cones = [ConeKind::Martingale, ConeKind::Supermartingale, ConeKind::Submartingale];
    GenSpec {
        seed: rng.gen(),
        n: rng.gen_range(1..=6),
        d: rng.gen_range(1..=3),
        cone: *cones.choose(rng).expect("nonempty"),
        splits: if rng.gen_bool(0.125) { 0 } else { rng.gen_range(1..=4) },
    }
}

/// Runs every property on `count` generated instances.
pub fn property_suite(seed: u64, count: usize, mutation: Option<Mutation>) -> SuiteReport {
    let mut report = SuiteReport {
        seed,
        count,
        properties: PROPERTIES.iter().map(|&p| (p, PropertyTally::default())).collect(),
        failures: Vec::new(),
    };
    let mut rng = rng_for(seed);
    for index in 0..count {
        let spec = suite_spec(&mut rng);
        let mut run = Run {
            report: &mut report,
            index,
            seed: spec.seed,
        };
        check_instance(&mut run, &spec, mutation);
    }
    report
}

fn options_for(inst: &Instance, mutation: Option<Mutation>) -> LpOptions {
    match mutation {
        None => LpOptions::default(),
        Some(Mutation::SkipGenerator) => LpOptions {
            skip_generator: (0..inst.m()).find(|&r| !inst.is_constant_row(r)),
            ..LpOptions::default()
        },
    }
}

fn union_support(plans: &[TransportPlan], n: usize) -> Mask {
    let mut mask = vec![vec![false; n]; n];
    for p in plans {
        for (mrow, srow) in mask.iter_mut().zip(p.support()) {
            for (a, b) in mrow.iter_mut().zip(srow) {
                *a |= b;
            }
        }
    }
    mask
}

fn contains(mask: &Mask, plan: &TransportPlan) -> bool {
    plan.support().iter().zip(mask).all(|(s, m)| s.iter().zip(m).all(|(a, b)| !a || *b))
}

fn embed(inst: &Instance, ix: &[usize]) -> Vec<DualVector> {
    ix.iter().map(|&j| inst.phi(j)).collect()
}

fn check_instance(run: &mut Run, spec: &GenSpec, mutation: Option<Mutation>) {
    let generated = gen_ordered(spec);
    let inst = &generated.instance;
    let options = options_for(inst, mutation);
    let mut rng = rng_for(spec.seed ^ 0x9e37_79b9_7f4a_7c15);

    let again = gen_ordered(spec);
    run.record(
        "determinism",
        inst,
        ensure(
            serde_json::to_string(&again.instance.to_document()).ok() == serde_json::to_string(&inst.to_document()).ok()
                && again.plan == generated.plan,
            || "regenerating the same spec gave a different instance".into(),
        ),
    );
    run.record(
        "construction-plan",
        inst,
        check_plan(inst, &generated.plan).map_err(|e| format!("construction plan rejected: {e}")),
    );

    let order_plan = match check_order_with(inst, options) {
        OrderVerdict::Ordered(p) => {
            run.record("strassen-ordered", inst, check_plan(inst, &p).map_err(|e| format!("returned plan: {e}")));
            Some(p)
        }
        OrderVerdict::NotOrdered(_) => {
            run.record("strassen-ordered", inst, Err("ordered instance reported not ordered".into()));
            None
        }
    };

    match gen_unordered(spec) {
        Err(OracleError::NoPerturbation) => {}
        Err(e) => run.record("strassen-unordered", inst, Err(format!("generation failed: {e}"))),
        Ok(bad) => {
            let outcome = match check_order_with(&bad, options) {
                OrderVerdict::NotOrdered(w) => ensure(w.verify(&bad), || "witness does not verify".into()),
                OrderVerdict::Ordered(_) => Err("perturbed instance reported ordered".into()),
            };
            run.record("strassen-unordered", &bad, outcome);
            run.record("order-monotone-in-cone", &bad, monotone_in_cone(&bad, &mut rng, options, false));
        }
    }
    run.record("order-monotone-in-cone", inst, monotone_in_cone(inst, &mut rng, options, true));

    let probe = match probe_support(inst, options) {
        Ok(p) => p,
        Err(e) => {
            run.record("support-contains-plans", inst, Err(format!("support probing failed: {e}")));
            return;
        }
    };
    let mask = probe.mask.clone();
    let mut plans = vec![&generated.plan];
    plans.extend(order_plan.as_ref());
    run.record(
        "support-contains-plans",
        inst,
        ensure(plans.iter().all(|p| contains(&mask, p)), || "a feasible plan charges a pair outside the mask".into()),
    );

    let (max_plan, kernel) = match maximal_kernel_with(inst, options) {
        Ok(x) => x,
        Err(e) => {
            run.record("maximal-kernel", inst, Err(format!("maximal kernel failed: {e}")));
            return;
        }
    };
    run.record("maximal-kernel", inst, maximal_kernel_check(inst, &max_plan, &kernel, &mask));

    if inst.n() <= 4 {
        match brute_vertices(inst) {
            Ok(vertices) => run.record("brute-force", inst, brute_check(inst, &vertices, &mask, &kernel)),
            Err(OracleError::TooManyBases(_)) => {}
            Err(e) => run.record("brute-force", inst, Err(e.to_string())),
        }
    }

    match pave(inst, max_plan.clone(), kernel.clone()) {
        Ok(paving) => {
            let outcome = match check_paving(inst, &paving) {
                Ok(problems) => ensure(problems.is_empty(), || problems.join("; ")),
                Err(e) => Err(e.to_string()),
            };
            run.record("paving-partition", inst, outcome);
            run.record("face-fit", inst, face_fit_check(inst, &paving, &mut rng));
        }
        Err(e) => run.record("paving-partition", inst, Err(e.to_string())),
    }

    run.record("rint-density", inst, density_check(inst, &kernel, &mut rng));
    run.record("harnack-gleason", inst, harnack_check(inst, &mut rng));
    run.record("fine-intersection", inst, fine_check(inst, &kernel));
    if let Some(outcome) = mixing_check(inst, &generated.plan) {
        run.record("mixing", inst, outcome);
    }
    run.record("kellerer", inst, kellerer_check(inst, &mut rng));
    run.record("polar-characterization", inst, characterization_check(inst, &kernel, &mut rng));
    run.record("max-mass-monotone", inst, monotone_mass_check(inst, &mut rng));
    run.record("outside-mask-polar", inst, outside_mask_check(inst, &mask, &mut rng));
    run.record("poussin", inst, poussin_check(inst, &mut rng));
}

/// Appending a generator can only break order; appending a nonnegative
/// combination of existing generators changes nothing.
fn monotone_in_cone(inst: &Instance, rng: &mut ChaCha8Rng, options: LpOptions, ordered: bool) -> Check {
    let n = inst.n();
    let in_cone = rng.gen_bool(0.5);
    let row: Vec<Rational> = if in_cone {
        let mut row = vec![Rational::zero(); n];
        for g in inst.gens() {
            let c = frac(rng.gen_range(0..=3), 1);
            for (x, v) in row.iter_mut().zip(g) {
                *x += &c * v;
            }
        }
        row
    } else {
        (0..n).map(|_| frac(rng.gen_range(-6..=6), rng.gen_range(1..=3))).collect()
    };
    let bigger = inst.with_extra_generators(&[row]).map_err(|e| e.to_string())?;
    let before = check_order_with(inst, options).is_ordered();
    let after = check_order_with(&bigger, options);
    if let OrderVerdict::Ordered(p) = &after {
        if !verify_plan(&bigger, p) || !verify_plan(inst, p) {
            return Err("plan for the larger cone is not feasible for both cones".into());
        }
    }
    ensure(!after.is_ordered() || before, || "adding a generator made the instance ordered".into())?;
    ensure(!(in_cone && ordered && before) || after.is_ordered(), || {
        "adding a combination of existing generators broke the order".into()
    })
}

fn maximal_kernel_check(inst: &Instance, plan: &TransportPlan, kernel: &Kernel, mask: &Mask) -> Check {
    check_plan(inst, plan).map_err(|e| format!("maximal plan: {e}"))?;
    ensure(plan.support() == *mask, || "maximal plan support differs from the mask".into())?;
    for i in inst.sources() {
        let s = kernel.support(i).map_err(|e| e.to_string())?;
        let expected: Vec<usize> = (0..inst.n()).filter(|&j| mask[i][j]).collect();
        ensure(s == expected, || format!("kernel support of source {i} differs from the mask row"))?;
    }
    Ok(())
}

fn brute_check(inst: &Instance, vertices: &[TransportPlan], mask: &Mask, kernel: &Kernel) -> Check {
    ensure(!vertices.is_empty(), || "no vertices found".into())?;
    for v in vertices {
        check_plan(inst, v).map_err(|e| format!("enumerated vertex infeasible: {e}"))?;
    }
    ensure(union_support(vertices, inst.n()) == *mask, || "union of vertex supports differs from the mask".into())?;
    let avg = Kernel::from_plan(inst, &average(vertices));
    for i in inst.sources() {
        ensure(avg.support(i).ok() == kernel.support(i).ok(), || {
            format!("vertex average and maximal kernel differ at source {i}")
        })?;
    }
    Ok(())
}

fn density_check(inst: &Instance, kernel: &Kernel, rng: &mut ChaCha8Rng) -> Check {
    for i in inst.sources() {
        let support = kernel.support(i).map_err(|e| e.to_string())?;
        let pts = embed(inst, &support);
        let k = pts.len();
        let all = embed(inst, &(0..inst.n()).collect::<Vec<_>>());
        let queries = [
            inst.phi(rng.gen_range(0..inst.n())),
            DualVector::combination(&random_weights(rng, k, None), &pts),
            DualVector::combination(&random_weights(rng, inst.n(), None), &all),
            {
                // affine combination that may leave the hull
                let mut w = random_weights(rng, k, None);
                let shift = frac(rng.gen_range(-1..=1), 3);
                w[0] += &shift;
                w[k - 1] -= &shift;
                DualVector::combination(&w, &pts)
            },
        ];
        for a in &queries {
            let lhs = rint_via_density(inst, kernel, i, a).map_err(|e| e.to_string())?;
            let rhs = rint_member(a, &pts).map_err(|e| e.to_string())?.is_some();
            ensure(lhs == rhs, || format!("source {i}: density test {lhs}, interior test {rhs} for {a}"))?;
        }
    }
    Ok(())
}

fn harnack_check(inst: &Instance, rng: &mut ChaCha8Rng) -> Check {
    let all = embed(inst, &(0..inst.n()).collect::<Vec<_>>());
    let wa = random_weights(rng, all.len(), None);
    let same: Vec<usize> = (0..all.len()).filter(|&v| wa[v].is_positive()).collect();
    let restrict = rng.gen_bool(0.5);
    let wb = random_weights(rng, all.len(), if restrict { Some(&same) } else { None });
    let mut cases = vec![(
        all.clone(),
        DualVector::combination(&wa, &all),
        DualVector::combination(&wb, &all),
    )];
    cases.push(polytope_query(rng));
    for (v, a, b) in cases {
        let h = harnack_equiv(&a, &b, &v).map_err(|e| e.to_string())?;
        let g = gleason_equiv(&a, &b, &v).map_err(|e| e.to_string())?;
        ensure(h == g, || format!("harnack {h}, gleason {g} for {a} and {b}"))?;
    }
    Ok(())
}

fn fine_check(inst: &Instance, kernel: &Kernel) -> Check {
    let sources: Vec<usize> = inst.sources().collect();
    for (k, &i1) in sources.iter().enumerate() {
        for &i2 in &sources[k..] {
            let s1 = kernel.support(i1).map_err(|e| e.to_string())?;
            let s2 = kernel.support(i2).map_err(|e| e.to_string())?;
            for j in s1.iter().filter(|j| s2.contains(j)) {
                let same = fine_intersection(inst, kernel, i1, i2, &inst.phi(*j)).map_err(|e| e.to_string())?;
                ensure(same, || format!("sources {i1}, {i2} see different faces at point {j}"))?;
            }
        }
    }
    Ok(())
}

/// Constants always fit; for one-dimensional martingales a hinge whose kink
/// avoids every open component fits too.
fn face_fit_check(inst: &Instance, paving: &crate::paving::Paving, rng: &mut ChaCha8Rng) -> Check {
    let n = inst.n();
    let mut tests = vec![vec![frac(rng.gen_range(-5..=5), 1); n]];
    let one_dim = inst.coords().is_some_and(|c| c[0].len() == 1);
    if one_dim && inst.is_linear_cone() {
        let x: Vec<Rational> = inst.coords().expect("checked").iter().map(|c| c[0].clone()).collect();
        let kinks: Vec<&Rational> = x
            .iter()
            .filter(|c| {
                paving.components.iter().all(|comp| {
                    let lo = comp.support.iter().map(|&j| &x[j]).min().expect("nonempty");
                    let hi = comp.support.iter().map(|&j| &x[j]).max().expect("nonempty");
                    !(lo < *c && *c < hi)
                })
            })
            .collect();
        if let Some(c) = kinks.choose(rng) {
            tests.push(x.iter().map(|v| if v > *c { v - *c } else { Rational::zero() }).collect());
        }
    }
    for f in tests {
        let fits = face_fit(inst, paving, &f).map_err(|e| e.to_string())?;
        for (comp, fit) in paving.components.iter().zip(&fits) {
            let theta = fit.as_ref().ok_or_else(|| format!("class {} has no fit", comp.class_id))?;
            ensure(theta.iter().all(|t| !t.is_negative()), || "negative fit coefficient".into())?;
            for &p in comp.support.iter().chain(&comp.members) {
                let col: Vec<Rational> = inst.gens().iter().map(|g| g[p].clone()).collect();
                ensure(dot(theta, &col) == f[p], || format!("fit misses f at point {p}"))?;
            }
        }
    }
    Ok(())
}

/// Mixes the first pair of rows whose components meet under the construction
/// plan. `None` when no such pair exists.
fn mixing_check(inst: &Instance, plan: &TransportPlan) -> Option<Check> {
    let sources: Vec<usize> = inst.sources().collect();
    for (k, &i1) in sources.iter().enumerate() {
        for &i2 in &sources[k + 1..] {
            let mixed = match rint_mix(inst, plan, i1, i2) {
                Ok(None) => continue,
                Ok(Some(m)) => m,
                Err(e) => return Some(Err(e.to_string())),
            };
            return Some(mixing_outcome(inst, plan, &mixed, i1, i2));
        }
    }
    None
}

pub(crate) fn mixing_outcome(inst: &Instance, plan: &TransportPlan, mixed: &TransportPlan, i1: usize, i2: usize) -> Check {
    check_plan(inst, mixed).map_err(|e| format!("mixed plan: {e}"))?;
    ensure(mixed.row_sums() == plan.row_sums() && mixed.col_sums() == plan.col_sums(), || {
        "marginals changed".into()
    })?;
    let old: Vec<usize> = (0..inst.n()).filter(|&j| plan.pi[i1][j].is_positive() || plan.pi[i2][j].is_positive()).collect();
    for &i in &[i1, i2] {
        ensure(old.iter().all(|&j| mixed.pi[i][j].is_positive()), || {
            format!("row {i} lost part of the joint support")
        })?;
    }
    let recast = apply_modification(inst, plan, &ModificationPlan::between(plan, mixed)).map_err(|e| e.to_string())?;
    ensure(recast == *mixed, || "modification recast differs from the mix".into())
}

fn kellerer_check(inst: &Instance, rng: &mut ChaCha8Rng) -> Check {
    let n = inst.n();
    for i in 0..n {
        for j in 0..n {
            let u = PairSet::new(n, [(i, j)]).map_err(|e| e.to_string())?;
            let v = is_polar(inst, &u, false).map_err(|e| e.to_string())?;
            let null_end = inst.mu()[i].is_zero() || inst.nu()[j].is_zero();
            ensure(v.is_polar() == null_end, || format!("pair ({i}, {j}): polar {}", v.is_polar()))?;
            if v.is_polar() {
                let ok = v.decomposition.as_ref().is_some_and(|d| d.verify(inst, &u));
                ensure(ok, || format!("pair ({i}, {j}): invalid decomposition"))?;
            } else {
                let bound = std::cmp::min(inst.mu()[i].clone(), inst.nu()[j].clone());
                ensure(v.max_mass == bound, || format!("pair ({i}, {j}): mass {} not min(mu, nu)", v.max_mass))?;
            }
        }
    }
    let u = random_pairs(inst, rng);
    let v = is_polar(inst, &u, false).map_err(|e| e.to_string())?;
    let null = u.iter().all(|(i, j)| inst.mu()[i].is_zero() || inst.nu()[j].is_zero());
    ensure(v.is_polar() == null, || "random pair set disagrees with the zero-mass criterion".into())
}

fn random_pairs(inst: &Instance, rng: &mut ChaCha8Rng) -> PairSet {
    let n = inst.n();
    let k = rng.gen_range(0..=3);
    let pairs: Vec<(usize, usize)> = (0..k).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
    PairSet::new(n, pairs).expect("indices in range")
}

fn characterization_check(inst: &Instance, kernel: &Kernel, rng: &mut ChaCha8Rng) -> Check {
    for i in inst.sources() {
        let pts = embed(inst, &kernel.support(i).map_err(|e| e.to_string())?);
        for j in (0..inst.n()).filter(|&j| inst.nu()[j].is_positive()) {
            if rint_member(&inst.phi(j), &pts).map_err(|e| e.to_string())?.is_none() {
                continue;
            }
            let u = PairSet::new(inst.n(), [(i, j)]).map_err(|e| e.to_string())?;
            let (mass, _) = max_mass(inst, &u, true).map_err(|e| e.to_string())?;
            ensure(mass.is_positive(), || format!("pair ({i}, {j}) inside the component carries no mass"))?;
        }
    }
    let u = random_pairs(inst, rng);
    let report = obloj_siorpaes_check(inst, kernel, &u).map_err(|e| e.to_string())?;
    ensure(report.holds() != Some(false), || "constrained and unconstrained verdicts disagree".into())
}

fn monotone_mass_check(inst: &Instance, rng: &mut ChaCha8Rng) -> Check {
    let n = inst.n();
    let mass = |u: &PairSet| max_mass(inst, u, true).map(|x| x.0).map_err(|e| e.to_string());
    ensure(mass(&PairSet::default())?.is_zero(), || "empty set has mass".into())?;
    ensure(mass(&PairSet::all(n))?.is_one(), || "all pairs do not have mass one".into())?;
    let u1 = random_pairs(inst, rng);
    let u2 = random_pairs(inst, rng);
    let (m1, m2, m12) = (mass(&u1)?, mass(&u2)?, mass(&u1.union(&u2))?);
    ensure(m1 <= m12 && m2 <= m12, || "max mass is not monotone".into())?;
    ensure(m12 <= &m1 + &m2, || "max mass is not subadditive".into())
}

fn outside_mask_check(inst: &Instance, mask: &Mask, rng: &mut ChaCha8Rng) -> Check {
    let n = inst.n();
    for _ in 0..3 {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let u = PairSet::new(n, [(i, j)]).map_err(|e| e.to_string())?;
        let (m, _) = max_mass(inst, &u, true).map_err(|e| e.to_string())?;
        ensure(m.is_positive() == mask[i][j], || format!("pair ({i}, {j}): mass {m}, mask {}", mask[i][j]))?;
    }
    Ok(())
}

fn poussin_check(inst: &Instance, rng: &mut ChaCha8Rng) -> Check {
    let n = inst.n();
    let p: Vec<Rational> = (0..n)
        .map(|_| {
            let num = rng.gen_range(0..=40);
            frac(num, rng.gen_range(1..=4))
        })
        .collect();
    let xi = poussin(&p, inst.mu(), inst.nu());
    for (m, t) in xi.thresholds().iter().enumerate() {
        let bound = inv_pow2(m as u32 + 1);
        ensure(tail(&p, inst.mu(), t) < bound && tail(&p, inst.nu(), t) < bound, || {
            format!("threshold {} misses its tail bound", m + 1)
        })?;
    }
    poussin_shape(&xi, &p)
}

/// Convex, nondecreasing and above `max(t, 1)` on a grid through every kink.
pub(crate) fn poussin_shape(xi: &crate::poussin::PoussinFunction, p: &[Rational]) -> Check {
    let mut grid: Vec<Rational> = xi.thresholds().to_vec();
    grid.extend(p.iter().cloned());
    grid.push(Rational::zero());
    let top = grid.iter().max().cloned().unwrap_or_default() + Rational::one();
    grid.push(top);
    grid.sort();
    grid.dedup();
    let mut pts = Vec::new();
    for w in grid.windows(2) {
        pts.push(w[0].clone());
        pts.push((&w[0] + &w[1]) / frac(2, 1));
    }
    pts.push(grid.last().expect("nonempty").clone());
    let vals: Vec<Rational> = pts.iter().map(|t| xi.eval(t)).collect();
    for (t, v) in pts.iter().zip(&vals) {
        let floor = std::cmp::max(t.clone(), Rational::one());
        ensure(*v >= floor, || format!("xi({t}) = {v} is below max(t, 1)"))?;
    }
    let slopes: Vec<Rational> = pts.windows(2).zip(vals.windows(2)).map(|(t, v)| (&v[1] - &v[0]) / (&t[1] - &t[0])).collect();
    ensure(slopes.iter().all(|s| !s.is_negative()), || "xi decreases".into())?;
    ensure(slopes.windows(2).all(|s| s[0] <= s[1]), || "xi is not convex".into())
}
