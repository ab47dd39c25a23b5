use conetrans::geometry::{conv_member, rint_member, ConvMembership};
use conetrans::instance::DualVector;
use conetrans::oracle::{gen_ordered, gen_unordered, ConeKind, GenSpec};
use conetrans::polar::{max_mass, PairSet};
use conetrans::poussin::poussin;
use conetrans::ratlp::{check_certificate, solve, Direction, LPOutcome, LPProblem, Relation};
use conetrans::rational::{dot, frac, int, Rational};
use conetrans::transport::{check_order, verify_plan, OrderVerdict};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn q() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=4).prop_map(|(a, b)| frac(a, b))
}

fn relation() -> impl Strategy<Value = Relation> {
    prop_oneof![Just(Relation::Le), Just(Relation::Ge), Just(Relation::Eq)]
}

/// Solves `a x = c` for two lines given as `(a0, a1, c)`.
fn meet(l1: &(Rational, Rational, Rational), l2: &(Rational, Rational, Rational)) -> Option<[Rational; 2]> {
    let det = &l1.0 * &l2.1 - &l1.1 * &l2.0;
    if det.is_zero() {
        return None;
    }
    let x = (&l1.2 * &l2.1 - &l1.1 * &l2.2) / &det;
    let y = (&l1.0 * &l2.2 - &l1.2 * &l2.0) / &det;
    Some([x, y])
}

fn spec_strategy() -> impl Strategy<Value = GenSpec> {
    (any::<u64>(), 1usize..=5, 1usize..=3, 0usize..3, 0usize..=4).prop_map(|(seed, n, d, c, splits)| GenSpec {
        seed,
        n,
        d,
        cone: [ConeKind::Martingale, ConeKind::Submartingale, ConeKind::Supermartingale][c],
        splits,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // In a box every nonempty feasible set has a vertex, so the optimum is the
    // best feasible intersection of two boundary lines.
    #[test]
    fn two_variable_lp_matches_vertex_scan(
        rows in prop::collection::vec((q(), q(), relation(), q()), 0..4),
        obj in (q(), q()),
        top in 1i64..=6,
    ) {
        let mut lp = LPProblem::new(2);
        lp.set_bounds(0, Some(int(0)), Some(int(top)));
        lp.set_bounds(1, Some(int(0)), Some(int(top)));
        for (a, b, rel, c) in &rows {
            lp.add_constraint(vec![a.clone(), b.clone()], *rel, c.clone());
        }
        lp.set_objective(vec![obj.0.clone(), obj.1.clone()], Direction::Max);
        let outcome = solve(&lp);
        prop_assert!(check_certificate(&lp, &outcome).unwrap());

        let mut lines = vec![
            (int(1), int(0), int(0)),
            (int(1), int(0), int(top)),
            (int(0), int(1), int(0)),
            (int(0), int(1), int(top)),
        ];
        lines.extend(rows.iter().map(|(a, b, _, c)| (a.clone(), b.clone(), c.clone())));
        let feasible = |p: &[Rational; 2]| {
            p.iter().all(|v| !v.is_negative() && *v <= int(top))
                && rows.iter().all(|(a, b, rel, c)| {
                    let lhs = a * &p[0] + b * &p[1];
                    match rel {
                        Relation::Le => lhs <= *c,
                        Relation::Ge => lhs >= *c,
                        Relation::Eq => lhs == *c,
                    }
                })
        };
        let mut best: Option<Rational> = None;
        for (k, l1) in lines.iter().enumerate() {
            for l2 in &lines[k + 1..] {
                if let Some(p) = meet(l1, l2).filter(|p| feasible(p)) {
                    let v = &obj.0 * &p[0] + &obj.1 * &p[1];
                    if best.as_ref().map_or(true, |b| v > *b) {
                        best = Some(v);
                    }
                }
            }
        }
        match (&outcome, best) {
            (LPOutcome::Optimal { value, .. }, Some(b)) => prop_assert_eq!(value, &b),
            (LPOutcome::Infeasible(_), None) => {}
            (o, b) => prop_assert!(false, "solver {:?} against scan {:?}", o, b),
        }
    }

    #[test]
    fn hull_membership_on_a_line(ts in prop::collection::vec(q(), 1..6), x in q()) {
        let lift = |t: &Rational| DualVector(vec![Rational::one(), t.clone()]);
        let pts: Vec<DualVector> = ts.iter().map(lift).collect();
        let lo = ts.iter().min().unwrap();
        let hi = ts.iter().max().unwrap();
        let inside = *lo <= x && x <= *hi;
        match conv_member(&lift(&x), &pts).unwrap() {
            ConvMembership::Member(w) => {
                prop_assert!(inside);
                prop_assert!(w.iter().all(|v| !v.is_negative()));
                prop_assert_eq!(DualVector::combination(&w, &pts), lift(&x));
            }
            ConvMembership::Separated(_) => prop_assert!(!inside),
        }
        let open = if lo == hi { x == *lo } else { *lo < x && x < *hi };
        prop_assert_eq!(rint_member(&lift(&x), &pts).unwrap().is_some(), open);
    }

    #[test]
    fn growth_function_shape(p in prop::collection::vec((0i64..=30, 1i64..=6), 1..7), w in prop::collection::vec(0i64..=5, 1..7)) {
        let n = p.len().min(w.len());
        let p: Vec<Rational> = p[..n].iter().map(|&(a, b)| frac(a, b)).collect();
        let total: i64 = w[..n].iter().sum::<i64>().max(1);
        let mass: Vec<Rational> = w[..n].iter().map(|&v| frac(v, total)).collect();
        let xi = poussin(&p, &mass, &mass);
        let grid: Vec<Rational> = (0..=80).map(|k| frac(k, 2)).collect();
        let vals: Vec<Rational> = grid.iter().map(|t| xi.eval(t)).collect();
        for (t, v) in grid.iter().zip(&vals) {
            prop_assert!(*v >= std::cmp::max(t.clone(), Rational::one()));
        }
        for k in 1..vals.len() - 1 {
            prop_assert!(vals[k] <= vals[k + 1]);
            prop_assert!(&vals[k - 1] + &vals[k + 1] >= &vals[k] * int(2));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn order_verdicts_carry_certificates(spec in spec_strategy()) {
        let ordered = gen_ordered(&spec);
        prop_assert!(verify_plan(&ordered.instance, &ordered.plan));
        match check_order(&ordered.instance) {
            OrderVerdict::Ordered(p) => prop_assert!(verify_plan(&ordered.instance, &p)),
            OrderVerdict::NotOrdered(_) => prop_assert!(false, "ordered instance rejected"),
        }
        if let Ok(inst) = gen_unordered(&spec) {
            match check_order(&inst) {
                OrderVerdict::NotOrdered(w) => {
                    prop_assert!(w.verify(&inst));
                    prop_assert_eq!(dot(&w.values, inst.mu()) - dot(&w.values, inst.nu()), w.gap);
                }
                OrderVerdict::Ordered(_) => prop_assert!(false, "perturbed instance accepted"),
            }
        }
    }

    #[test]
    fn max_mass_is_monotone_and_subadditive(
        spec in spec_strategy(),
        a in prop::collection::vec((0usize..5, 0usize..5), 0..4),
        b in prop::collection::vec((0usize..5, 0usize..5), 0..4),
    ) {
        let inst = gen_ordered(&spec).instance;
        let n = inst.n();
        let clip = |v: &[(usize, usize)]| PairSet::new(n, v.iter().map(|&(i, j)| (i % n, j % n))).unwrap();
        let (u1, u2) = (clip(&a), clip(&b));
        let both = u1.union(&u2);
        for constrained in [true, false] {
            let m = |u: &PairSet| max_mass(&inst, u, constrained).unwrap();
            let ((m1, p1), (m2, _), (m12, _)) = (m(&u1), m(&u2), m(&both));
            prop_assert!(m1 <= m12 && m2 <= m12);
            prop_assert!(m12 <= &m1 + &m2);
            prop_assert!(m12 <= Rational::one());
            let charged: Rational = u1.iter().map(|(i, j)| p1.pi[i][j].clone()).sum();
            prop_assert_eq!(charged, m1);
        }
    }
}
