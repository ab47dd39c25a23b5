//! Acceptance run. Every check is exact; each criterion prints one line.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use conetrans::geometry::{gleason_equiv, harnack_equiv, rint_intersect, rint_member};
use conetrans::instance::{Cone, DualVector, Instance};
use conetrans::oracle::{
    brute_vertices, gen_mixable, gen_ordered, gen_unordered, polytope_query, random_weights, rint_mix, rng_for,
    ConeKind, GenSpec,
};
use conetrans::paving::{compute_paving, rint_via_density};
use conetrans::polar::{is_polar, max_mass, PairSet};
use conetrans::poussin::poussin;
use conetrans::rational::{frac, int, Rational};
use conetrans::transport::{check_order, joint_support, maximal_kernel, OrderVerdict, TransportPlan};
use num_traits::{One, Signed, Zero};
use rand::Rng;

type Outcome = Result<String, String>;

fn fail<T>(msg: impl Into<String>) -> Result<T, String> {
    Err(msg.into())
}

fn spec(seed: u64, n: usize, d: usize, cone: ConeKind, splits: usize) -> GenSpec {
    GenSpec { seed, n, d, cone, splits }
}

/// Ordered instances shared by several criteria: n up to 8, d up to 3.
fn ordered_family(offset: u64, count: u64) -> Vec<Instance> {
    (offset..offset + count)
        .map(|seed| {
            let cone = if seed % 2 == 0 { ConeKind::Martingale } else { ConeKind::Supermartingale };
            gen_ordered(&spec(seed, 1 + (seed as usize * 5) % 8, 1 + seed as usize % 3, cone, seed as usize % 5)).instance
        })
        .collect()
}

// ---- independent checks, written against coordinates rather than generator rows

fn coords(inst: &Instance) -> Vec<Vec<Rational>> {
    inst.coords().expect("generated instances carry coordinates").clone()
}

/// Nonnegative, right marginals, and each source's barycentre obeys the cone:
/// equal to the source for martingales, componentwise below it for
/// supermartingales, above it for submartingales.
fn plan_is_transport(inst: &Instance, plan: &TransportPlan) -> Result<(), String> {
    let n = inst.n();
    let x = coords(inst);
    if plan.pi.len() != n || plan.pi.iter().any(|r| r.len() != n) {
        return fail("plan shape");
    }
    for i in 0..n {
        for j in 0..n {
            if plan.pi[i][j].is_negative() {
                return fail(format!("negative entry ({i}, {j})"));
            }
        }
        let row: Rational = plan.pi[i].iter().sum();
        if row != inst.mu()[i] {
            return fail(format!("row {i} sums to {row}"));
        }
        let col: Rational = (0..n).map(|k| plan.pi[k][i].clone()).sum();
        if col != inst.nu()[i] {
            return fail(format!("column {i} sums to {col}"));
        }
        for c in 0..x[i].len() {
            let moved: Rational = (0..n).map(|j| &plan.pi[i][j] * &x[j][c]).sum();
            let stay = &inst.mu()[i] * &x[i][c];
            let ok = match inst.cone() {
                Cone::Martingale => moved == stay,
                Cone::Supermartingale => moved <= stay,
                Cone::Submartingale => moved >= stay,
                Cone::Custom(_) => false,
            };
            if !ok {
                return fail(format!("source {i} moves coordinate {c} against the cone"));
            }
        }
    }
    Ok(())
}

/// Generator rows must be functions the cone contains: `±1`, and `±x_c`
/// (martingale) or `-x_c` (supermartingale) or `x_c` (submartingale).
fn rows_in_cone(inst: &Instance) -> bool {
    let x = coords(inst);
    let n = inst.n();
    let mut allowed: Vec<Vec<Rational>> = vec![vec![int(1); n], vec![int(-1); n]];
    for c in 0..x[0].len() {
        let axis: Vec<Rational> = x.iter().map(|p| p[c].clone()).collect();
        let minus: Vec<Rational> = axis.iter().map(|q| -q).collect();
        match inst.cone() {
            Cone::Martingale => allowed.extend([axis, minus]),
            Cone::Supermartingale => allowed.push(minus),
            Cone::Submartingale => allowed.push(axis),
            Cone::Custom(_) => {}
        }
    }
    inst.gens().iter().all(|g| allowed.contains(g))
}

fn embedded(inst: &Instance, ix: &[usize]) -> Vec<DualVector> {
    ix.iter().map(|&j| inst.phi(j)).collect()
}

fn row_support(plan: &TransportPlan, i: usize) -> BTreeSet<usize> {
    (0..plan.n()).filter(|&j| plan.pi[i][j].is_positive()).collect()
}

// ---- criteria

fn criterion_1() -> Outcome {
    let mut witnesses = 0;
    for seed in 0..100u64 {
        let cone = if seed % 2 == 0 { ConeKind::Martingale } else { ConeKind::Supermartingale };
        let s = spec(seed, 1 + seed as usize % 8, 1 + seed as usize % 3, cone, seed as usize % 5);
        let inst = gen_ordered(&s).instance;
        match check_order(&inst) {
            OrderVerdict::Ordered(plan) => plan_is_transport(&inst, &plan).map_err(|e| format!("seed {seed}: {e}"))?,
            OrderVerdict::NotOrdered(_) => return fail(format!("ordered seed {seed} reported not ordered")),
        }
    }
    for seed in 1000..1100u64 {
        let cone = if seed % 2 == 0 { ConeKind::Martingale } else { ConeKind::Supermartingale };
        let s = spec(seed, 2 + seed as usize % 7, 1 + seed as usize % 3, cone, seed as usize % 5);
        let inst = gen_unordered(&s).map_err(|e| format!("seed {seed}: {e}"))?;
        // ground truth: some generator integrates higher under mu, so no transport exists
        let broken = inst.gens().iter().any(|g| {
            let a: Rational = g.iter().zip(inst.mu()).map(|(p, q)| p * q).sum();
            let b: Rational = g.iter().zip(inst.nu()).map(|(p, q)| p * q).sum();
            a > b
        });
        if !broken || !rows_in_cone(&inst) {
            return fail(format!("seed {seed}: perturbation not certified"));
        }
        let OrderVerdict::NotOrdered(w) = check_order(&inst) else {
            return fail(format!("unordered seed {seed} reported ordered"));
        };
        let n = inst.n();
        if w.branches.is_empty() {
            return fail(format!("seed {seed}: empty witness"));
        }
        for b in &w.branches {
            if b.theta.iter().chain(&b.conic(&inst)).any(Signed::is_negative) {
                return fail(format!("seed {seed}: negative branch coefficient"));
            }
        }
        let f: Vec<Rational> = (0..n)
            .map(|j| {
                w.branches
                    .iter()
                    .map(|b| {
                        let lin: Rational = b.theta.iter().zip(inst.gens()).map(|(t, g)| t * &g[j]).sum();
                        &b.constant + lin
                    })
                    .max()
                    .expect("nonempty")
            })
            .collect();
        let gap: Rational = (0..n).map(|j| &f[j] * (&inst.mu()[j] - &inst.nu()[j])).sum();
        if !gap.is_positive() || gap != w.gap {
            return fail(format!("seed {seed}: recomputed gap {gap}"));
        }
        witnesses += 1;
    }
    Ok(format!("100 ordered plans verified, {witnesses} witnesses with positive gap"))
}

fn criterion_2() -> Outcome {
    let mut classes = 0;
    for (k, inst) in ordered_family(2000, 100).iter().enumerate() {
        let paving = compute_paving(inst).map_err(|e| format!("instance {k}: {e}"))?;
        plan_is_transport(inst, &paving.plan).map_err(|e| format!("instance {k}: {e}"))?;
        let mut covered = BTreeSet::new();
        for comp in &paving.components {
            for &i in &comp.members {
                if !covered.insert(i) {
                    return fail(format!("instance {k}: source {i} in two classes"));
                }
                let s: Vec<usize> = row_support(&paving.plan, i).into_iter().collect();
                if s != comp.support {
                    return fail(format!("instance {k}: source {i} support differs from its class"));
                }
                if *inst.cone() == Cone::Martingale
                    && rint_member(&inst.phi(i), &embedded(inst, &comp.support)).map_err(|e| e.to_string())?.is_none()
                {
                    return fail(format!("instance {k}: source {i} outside its own component"));
                }
            }
        }
        let positive: BTreeSet<usize> = (0..inst.n()).filter(|&i| inst.mu()[i].is_positive()).collect();
        if covered != positive {
            return fail(format!("instance {k}: classes do not cover the sources"));
        }
        for (a, ca) in paving.components.iter().enumerate() {
            for cb in &paving.components[a + 1..] {
                let meet = rint_intersect(&embedded(inst, &ca.support), &embedded(inst, &cb.support))
                    .map_err(|e| e.to_string())?;
                if meet.is_some() {
                    return fail(format!("instance {k}: classes {} and {} overlap", ca.class_id, cb.class_id));
                }
            }
        }
        classes += paving.components.len();
    }
    Ok(format!("100 pavings, {classes} classes, no violations"))
}

fn criterion_3() -> Outcome {
    let mut rng = rng_for(3);
    let (mut pairs, mut inside) = (0, 0);
    let mut seed = 3000;
    while pairs < 600 {
        let inst = &ordered_family(seed, 1)[0];
        seed += 1;
        let (_, kernel) = maximal_kernel(inst).map_err(|e| e.to_string())?;
        let all: Vec<usize> = (0..inst.n()).collect();
        for i in inst.sources() {
            let support = kernel.support(i).map_err(|e| e.to_string())?;
            let pts = embedded(inst, &support);
            let mut queries: Vec<DualVector> = all.iter().map(|&j| inst.phi(j)).collect();
            queries.push(DualVector::combination(&random_weights(&mut rng, pts.len(), None), &pts));
            queries.push(DualVector::combination(&random_weights(&mut rng, all.len(), None), &embedded(inst, &all)));
            for a in &queries {
                let density = rint_via_density(inst, &kernel, i, a).map_err(|e| e.to_string())?;
                let direct = rint_member(a, &pts).map_err(|e| e.to_string())?.is_some();
                if density != direct {
                    return fail(format!("instance seed {}: source {i} disagrees at {a}", seed - 1));
                }
                pairs += 1;
                inside += usize::from(direct);
            }
        }
    }
    Ok(format!("{pairs} pairs agree ({inside} inside, {} outside)", pairs - inside))
}

fn criterion_4() -> Outcome {
    let mut rng = rng_for(4);
    let mut equivalent = 0;
    for t in 0..600 {
        let (v, a, b) = polytope_query(&mut rng);
        if v.len() > 10 || v[0].len() > 4 {
            return fail("query outside the size bounds");
        }
        let h = harnack_equiv(&a, &b, &v).map_err(|e| e.to_string())?;
        let g = gleason_equiv(&a, &b, &v).map_err(|e| e.to_string())?;
        if h != g {
            return fail(format!("triple {t}: harnack {h}, gleason {g}"));
        }
        equivalent += usize::from(h);
    }
    Ok(format!("600 triples agree ({equivalent} equivalent, {} not)", 600 - equivalent))
}

fn criterion_5() -> Outcome {
    let (mut interior, mut null) = (0, 0);
    for (k, inst) in ordered_family(5000, 100).iter().enumerate() {
        let n = inst.n();
        let (_, kernel) = maximal_kernel(inst).map_err(|e| e.to_string())?;
        for i in 0..n {
            for j in 0..n {
                let u = PairSet::new(n, [(i, j)]).map_err(|e| e.to_string())?;
                if inst.mu()[i].is_zero() || inst.nu()[j].is_zero() {
                    let v = is_polar(inst, &u, false).map_err(|e| e.to_string())?;
                    let Some(d) = v.decomposition.as_ref().filter(|_| v.is_polar()) else {
                        return fail(format!("instance {k}: null pair ({i}, {j}) not polar"));
                    };
                    let covers = (d.n1.contains(&i) && inst.mu()[i].is_zero()) || (d.n2.contains(&j) && inst.nu()[j].is_zero());
                    let null_sets = d.n1.iter().all(|&a| inst.mu()[a].is_zero()) && d.n2.iter().all(|&b| inst.nu()[b].is_zero());
                    if !covers || !null_sets {
                        return fail(format!("instance {k}: bad decomposition for ({i}, {j})"));
                    }
                    null += 1;
                    continue;
                }
                let pts = embedded(inst, &kernel.support(i).map_err(|e| e.to_string())?);
                if rint_member(&inst.phi(j), &pts).map_err(|e| e.to_string())?.is_none() {
                    continue;
                }
                let (mass, plan) = max_mass(inst, &u, true).map_err(|e| e.to_string())?;
                plan_is_transport(inst, &plan).map_err(|e| format!("instance {k}: {e}"))?;
                if !mass.is_positive() || plan.pi[i][j] != mass {
                    return fail(format!("instance {k}: pair ({i}, {j}) gets mass {mass}"));
                }
                interior += 1;
            }
        }
    }
    Ok(format!("{interior} interior pairs charged, {null} null pairs decomposed"))
}

fn criterion_6() -> Outcome {
    let mut checked = 0;
    let cones = [ConeKind::Martingale, ConeKind::Supermartingale, ConeKind::Submartingale];
    for seed in 6000..6150u64 {
        let s = spec(seed, 1 + seed as usize % 4, 1 + (seed as usize / 4) % 3, cones[seed as usize % 3], seed as usize % 5);
        let inst = gen_ordered(&s).instance;
        let vertices = brute_vertices(&inst).map_err(|e| format!("seed {seed}: {e}"))?;
        if vertices.is_empty() {
            return fail(format!("seed {seed}: no vertices"));
        }
        let n = inst.n();
        let mut union = vec![vec![false; n]; n];
        for v in &vertices {
            plan_is_transport(&inst, v).map_err(|e| format!("seed {seed}: {e}"))?;
            for (i, row) in union.iter_mut().enumerate() {
                for j in row_support(v, i) {
                    row[j] = true;
                }
            }
        }
        if joint_support(&inst).map_err(|e| e.to_string())? != union {
            return fail(format!("seed {seed}: joint support differs from the vertex union"));
        }
        let (_, kernel) = maximal_kernel(&inst).map_err(|e| e.to_string())?;
        for i in inst.sources() {
            let expected: Vec<usize> = (0..n).filter(|&j| union[i][j]).collect();
            if kernel.support(i).map_err(|e| e.to_string())? != expected {
                return fail(format!("seed {seed}: kernel support of {i} differs"));
            }
        }
        checked += 1;
    }
    Ok(format!("{checked} instances with n <= 4 match vertex enumeration"))
}

fn criterion_7() -> Outcome {
    for seed in 7000..7100u64 {
        let (g, i1, i2) = gen_mixable(seed);
        let inst = &g.instance;
        plan_is_transport(inst, &g.plan).map_err(|e| format!("seed {seed} input: {e}"))?;
        let a = embedded(inst, &row_support(&g.plan, i1).into_iter().collect::<Vec<_>>());
        let b = embedded(inst, &row_support(&g.plan, i2).into_iter().collect::<Vec<_>>());
        if rint_intersect(&a, &b).map_err(|e| e.to_string())?.is_none() {
            return fail(format!("seed {seed}: rows do not meet"));
        }
        let Some(mixed) = rint_mix(inst, &g.plan, i1, i2).map_err(|e| e.to_string())? else {
            return fail(format!("seed {seed}: no mix"));
        };
        plan_is_transport(inst, &mixed).map_err(|e| format!("seed {seed}: {e}"))?;
        if mixed.row_sums() != g.plan.row_sums() || mixed.col_sums() != g.plan.col_sums() {
            return fail(format!("seed {seed}: marginals changed"));
        }
        let both: BTreeSet<usize> = row_support(&g.plan, i1).union(&row_support(&g.plan, i2)).copied().collect();
        for i in [i1, i2] {
            if !row_support(&mixed, i).is_superset(&both) {
                return fail(format!("seed {seed}: row {i} misses part of the union"));
            }
        }
    }
    Ok("100 mixes verified".into())
}

fn labels(inst: &Instance, ix: impl IntoIterator<Item = usize>) -> Vec<String> {
    ix.into_iter().map(|j| inst.label(j).to_string()).collect()
}

fn brute_max(inst: &Instance, u: &PairSet) -> Result<Rational, String> {
    let vertices = brute_vertices(inst).map_err(|e| e.to_string())?;
    let mass = |v: &TransportPlan| u.iter().map(|(i, j)| v.pi[i][j].clone()).sum::<Rational>();
    vertices.iter().map(mass).max().ok_or_else(|| "no vertices".into())
}

fn criterion_8() -> Outcome {
    let q = |a, b| frac(a, b);
    let inst = Instance::on_line(
        Cone::Martingale,
        &[-1, 0, 1, 2],
        vec![q(0, 1), q(1, 2), q(0, 1), q(1, 2)],
        vec![q(1, 4), q(0, 1), q(1, 4), q(1, 2)],
    )
    .map_err(|e| e.to_string())?;
    let paving = compute_paving(&inst).map_err(|e| e.to_string())?;
    let got: Vec<(Vec<String>, Vec<String>, usize)> = paving
        .components
        .iter()
        .map(|c| (labels(&inst, c.members.clone()), labels(&inst, c.support.clone()), c.dim))
        .collect();
    let want = vec![
        (vec!["0".to_string()], vec!["-1".to_string(), "1".to_string()], 1),
        (vec!["2".to_string()], vec!["2".to_string()], 0),
    ];
    if got != want {
        return fail(format!("paving {got:?}"));
    }
    // the brute-force vertex union must give the same supports
    let vertices = brute_vertices(&inst).map_err(|e| e.to_string())?;
    for c in &paving.components {
        let i = c.members[0];
        let union: BTreeSet<usize> = vertices.iter().flat_map(|v| row_support(v, i)).collect();
        if union.into_iter().collect::<Vec<_>>() != c.support {
            return fail("paving disagrees with vertex enumeration");
        }
    }
    let u = PairSet::from_labels(&inst, &[("2".into(), "1".into())]).map_err(|e| e.to_string())?;
    let v = is_polar(&inst, &u, true).map_err(|e| e.to_string())?;
    if !v.is_polar() || !v.max_mass.is_zero() || !brute_max(&inst, &u)?.is_zero() {
        return fail("U = {(2, 1)} is not polar");
    }
    let companion = Instance::on_line(
        Cone::Martingale,
        &[-1, 0, 2],
        vec![q(0, 1), q(1, 1), q(0, 1)],
        vec![q(1, 2), q(1, 4), q(1, 4)],
    )
    .map_err(|e| e.to_string())?;
    let u = PairSet::from_labels(&companion, &[("0".into(), "0".into())]).map_err(|e| e.to_string())?;
    let v = is_polar(&companion, &u, true).map_err(|e| e.to_string())?;
    let brute = brute_max(&companion, &u)?;
    if v.is_polar() || v.max_mass != q(1, 4) || brute != q(1, 4) {
        return fail(format!("companion: polar {}, mass {}, brute {brute}", v.is_polar(), v.max_mass));
    }
    Ok("paving {0: (-1, 1)}, {2: {2}}; {(2,1)} polar; companion {(0,0)} non-polar with mass 1/4".into())
}

fn criterion_9() -> Outcome {
    let mut rng = rng_for(9);
    let mut thresholds = 0;
    for k in 0..100 {
        let n = rng.gen_range(1..=10);
        let p: Vec<Rational> = (0..n)
            .map(|_| {
                let num = rng.gen_range(0..=24);
                frac(num, rng.gen_range(1..=24))
            })
            .collect();
        let mass = |rng: &mut rand_chacha::ChaCha8Rng| {
            let raw: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=9)).collect();
            let total: i64 = raw.iter().sum::<i64>().max(1);
            raw.iter().map(|&r| frac(r, total)).collect::<Vec<_>>()
        };
        let (mu, nu) = (mass(&mut rng), mass(&mut rng));
        let xi = poussin(&p, &mu, &nu);
        for (m, t) in xi.thresholds().iter().enumerate() {
            let bound = Rational::one() / Rational::from_integer((1u64 << (m + 1)).into());
            for w in [&mu, &nu] {
                let tail: Rational = p.iter().zip(w.iter()).filter(|(pj, _)| *pj >= t).map(|(pj, wj)| pj * wj).sum();
                if tail >= bound {
                    return fail(format!("measure {k}: tail at threshold {} is {tail}", m + 1));
                }
            }
        }
        thresholds += xi.thresholds().len();
        // piecewise linear with kinks among the thresholds: check on a grid through them
        let mut grid: Vec<Rational> = xi.thresholds().to_vec();
        grid.extend(p.iter().cloned());
        grid.extend([Rational::zero(), Rational::one()]);
        grid.sort();
        grid.dedup();
        let top = grid.last().expect("nonempty") + int(2);
        grid.push(top);
        let mut pts: Vec<Rational> = Vec::new();
        for w in grid.windows(2) {
            pts.push(w[0].clone());
            pts.push((&w[0] + &w[1]) / int(2));
        }
        pts.push(grid.last().expect("nonempty").clone());
        let vals: Vec<Rational> = pts.iter().map(|t| xi.eval(t)).collect();
        for (t, v) in pts.iter().zip(&vals) {
            if *v < std::cmp::max(t.clone(), Rational::one()) {
                return fail(format!("measure {k}: xi({t}) = {v}"));
            }
        }
        let slopes: Vec<Rational> = pts.windows(2).zip(vals.windows(2)).map(|(t, v)| (&v[1] - &v[0]) / (&t[1] - &t[0])).collect();
        if slopes.iter().any(Signed::is_negative) || slopes.windows(2).any(|s| s[0] > s[1]) {
            return fail(format!("measure {k}: xi not convex nondecreasing"));
        }
    }
    Ok(format!("100 measures, {thresholds} thresholds, all bounds hold"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("order dichotomy with certificates", criterion_1),
        ("partition into components", criterion_2),
        ("density test equals interior test", criterion_3),
        ("harnack equals gleason", criterion_4),
        ("polar characterization", criterion_5),
        ("brute-force agreement", criterion_6),
        ("mixing soundness", criterion_7),
        ("worked example", criterion_8),
        ("growth function", criterion_9),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail} ({secs:.1}s)", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {detail} ({secs:.1}s)", k + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
