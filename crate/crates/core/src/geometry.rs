//! Exact convex geometry over dual vectors.
//!
//! Polytopes are given as finite point lists `V`, duplicates allowed. The
//! relative interior of `conv V` is the set of convex combinations with every
//! weight strictly positive, and strict positivity is decided by maximizing the
//! smallest weight. Nothing here is thresholded: `t > 0` means exactly that.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::instance::DualVector;
use crate::linalg::Echelon;
use crate::rational::{dot, Rational};
use crate::ratlp::{Direction, LPOutcome, LPProblem, Region, Relation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("point list is empty")]
    Empty,
    #[error("{0} is not in the convex hull")]
    NotInHull(&'static str),
    #[error("dual vectors have mismatched lengths")]
    Dimension,
}

fn check_dims(points: &[DualVector], extra: &[&DualVector]) -> Result<usize, GeometryError> {
    let m = points
        .first()
        .or(extra.first().copied())
        .map_or(0, DualVector::len);
    if points.iter().chain(extra.iter().copied()).any(|p| p.len() != m) {
        return Err(GeometryError::Dimension);
    }
    Ok(m)
}

fn diff(a: &DualVector, b: &DualVector) -> Vec<Rational> {
    a.0.iter().zip(&b.0).map(|(x, y)| x - y).collect()
}

#[derive(Debug, Clone)]
pub struct AffineHull {
    base: DualVector,
    directions: Vec<Vec<Rational>>,
    span: Echelon,
}

impl AffineHull {
    pub fn base(&self) -> &DualVector {
        &self.base
    }

    pub fn directions(&self) -> &[Vec<Rational>] {
        &self.directions
    }

    pub fn dim(&self) -> usize {
        self.directions.len()
    }

    pub fn contains(&self, x: &DualVector) -> bool {
        x.len() == self.base.len() && self.span.contains(&diff(x, &self.base))
    }

    /// Equality of affine subspaces.
    pub fn same_as(&self, other: &AffineHull) -> bool {
        self.dim() == other.dim()
            && self.contains(&other.base)
            && other.directions.iter().all(|d| self.span.contains(d))
    }
}

/// Affine hull by exact fraction-free elimination of the differences `v - v_0`.
pub fn affine_hull(points: &[DualVector]) -> Result<AffineHull, GeometryError> {
    let base = points.first().ok_or(GeometryError::Empty)?.clone();
    let m = check_dims(points, &[])?;
    let mut span = Echelon::new(m);
    let mut directions = Vec::new();
    for p in &points[1..] {
        let d = diff(p, &base);
        if span.insert(&d) {
            directions.push(d);
        }
    }
    Ok(AffineHull {
        base,
        directions,
        span,
    })
}

/// A functional (coefficients on the coordinates) with `a(x) - max a(V) = margin > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Separator {
    pub functional: Vec<Rational>,
    pub margin: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConvMembership {
    /// Convex weights reproducing the point.
    Member(Vec<Rational>),
    Separated(Separator),
}

impl ConvMembership {
    pub fn is_member(&self) -> bool {
        matches!(self, ConvMembership::Member(_))
    }

    pub fn weights(&self) -> Option<&[Rational]> {
        match self {
            ConvMembership::Member(w) => Some(w),
            ConvMembership::Separated(_) => None,
        }
    }
}

/// `w >= 0, Σ w = 1, Σ w_v v = x`.
fn hull_lp(x: &DualVector, points: &[DualVector]) -> LPProblem {
    let k = points.len();
    let mut lp = LPProblem::new(k);
    lp.add_constraint(vec![Rational::one(); k], Relation::Eq, Rational::one());
    for r in 0..x.len() {
        lp.add_constraint(points.iter().map(|p| p.0[r].clone()).collect(), Relation::Eq, x.0[r].clone());
    }
    lp
}

pub fn conv_member(x: &DualVector, points: &[DualVector]) -> Result<ConvMembership, GeometryError> {
    check_dims(points, &[x])?;
    let lp = hull_lp(x, points);
    match Region::new(&lp) {
        Ok(region) => Ok(ConvMembership::Member(region.feasible_point())),
        Err(farkas) => {
            // the coordinate multipliers separate x from every point of V
            let functional: Vec<Rational> = farkas.constraints[1..].to_vec();
            let ax = dot(&functional, &x.0);
            let margin = match points.iter().map(|p| dot(&functional, &p.0)).max() {
                Some(max) => ax - max,
                None => Rational::one(),
            };
            debug_assert!(margin.is_positive());
            Ok(ConvMembership::Separated(Separator { functional, margin }))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RintWitness {
    /// Strictly positive convex weights.
    pub weights: Vec<Rational>,
    /// The smallest weight, maximized.
    pub t: Rational,
}

/// Maximizes the smallest weight over convex representations of `x`.
/// Returns `None` when `x` is outside the hull or only on its relative boundary.
pub fn rint_member(x: &DualVector, points: &[DualVector]) -> Result<Option<RintWitness>, GeometryError> {
    check_dims(points, &[x])?;
    let k = points.len();
    if k == 0 {
        return Ok(None);
    }
    // variables: w_1..w_k, t
    let mut lp = LPProblem::new(k + 1);
    lp.set_free(k);
    let mut total = vec![Rational::one(); k + 1];
    total[k] = Rational::zero();
    lp.add_constraint(total, Relation::Eq, Rational::one());
    for r in 0..x.len() {
        let mut row: Vec<Rational> = points.iter().map(|p| p.0[r].clone()).collect();
        row.push(Rational::zero());
        lp.add_constraint(row, Relation::Eq, x.0[r].clone());
    }
    for v in 0..k {
        let mut row = vec![Rational::zero(); k + 1];
        row[v] = Rational::one();
        row[k] = -Rational::one();
        lp.add_constraint(row, Relation::Ge, Rational::zero());
    }
    let mut objective = vec![Rational::zero(); k + 1];
    objective[k] = Rational::one();
    lp.set_objective(objective, Direction::Max);
    Ok(match crate::ratlp::solve(&lp) {
        LPOutcome::Optimal { point, value, .. } if value.is_positive() => Some(RintWitness {
            weights: point[..k].to_vec(),
            t: value,
        }),
        _ => None,
    })
}

/// Vertices spanning the minimal face of `conv V` containing a point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceDescriptor {
    pub active: Vec<usize>,
}

impl FaceDescriptor {
    pub fn points(&self, points: &[DualVector]) -> Vec<DualVector> {
        self.active.iter().map(|&i| points[i].clone()).collect()
    }
}

/// Minimal face: the vertices that carry positive weight in some convex
/// representation of `x`, one max-weight LP per vertex not yet seen positive.
pub fn minimal_face(x: &DualVector, points: &[DualVector]) -> Result<FaceDescriptor, GeometryError> {
    check_dims(points, &[x])?;
    let lp = hull_lp(x, points);
    let region = Region::new(&lp).map_err(|_| GeometryError::NotInHull("point"))?;
    let k = points.len();
    let mut active = vec![false; k];
    let mark = |active: &mut Vec<bool>, w: &[Rational]| {
        for (a, wv) in active.iter_mut().zip(w) {
            if wv.is_positive() {
                *a = true;
            }
        }
    };
    mark(&mut active, &region.feasible_point());
    for v in 0..k {
        if active[v] {
            continue;
        }
        let mut objective = vec![Rational::zero(); k];
        objective[v] = Rational::one();
        if let LPOutcome::Optimal { point, value, .. } = region.optimize(&objective, Direction::Max) {
            if value.is_positive() {
                mark(&mut active, &point);
            }
        }
    }
    Ok(FaceDescriptor {
        active: (0..k).filter(|&v| active[v]).collect(),
    })
}

/// Same Gleason part: equal minimal faces, with each point interior to it.
pub fn gleason_equiv(x: &DualVector, y: &DualVector, points: &[DualVector]) -> Result<bool, GeometryError> {
    let fx = minimal_face(x, points).map_err(|_| GeometryError::NotInHull("first point"))?;
    let fy = minimal_face(y, points).map_err(|_| GeometryError::NotInHull("second point"))?;
    let px = fx.points(points);
    let py = fy.points(points);
    if !affine_hull(&px)?.same_as(&affine_hull(&py)?) {
        return Ok(false);
    }
    Ok(rint_member(x, &py)?.is_some() && rint_member(y, &px)?.is_some())
}

fn homogenize(v: &DualVector) -> Vec<Rational> {
    let mut out = v.0.clone();
    out.push(Rational::one());
    out
}

/// Largest `c >= 0` with `b - c·a` in the conic hull of `V`; `None` if unbounded.
fn harnack_lower(a: &[Rational], b: &[Rational], cone: &[Vec<Rational>]) -> Option<Rational> {
    let k = cone.len();
    let mut lp = LPProblem::new(k + 1);
    for r in 0..a.len() {
        let mut row = vec![a[r].clone()];
        row.extend(cone.iter().map(|v| v[r].clone()));
        lp.add_constraint(row, Relation::Eq, b[r].clone());
    }
    let mut objective = vec![Rational::zero(); k + 1];
    objective[0] = Rational::one();
    lp.set_objective(objective, Direction::Max);
    match crate::ratlp::solve(&lp) {
        LPOutcome::Optimal { value, .. } => Some(value),
        LPOutcome::Unbounded { .. } => None,
        LPOutcome::Infeasible(_) => Some(-Rational::one()),
    }
}

/// Whether some `C >= 0` has `C·a - b` in the conic hull of `V`.
fn harnack_upper(a: &[Rational], b: &[Rational], cone: &[Vec<Rational>]) -> bool {
    let k = cone.len();
    let mut lp = LPProblem::new(k + 1);
    for r in 0..a.len() {
        let mut row = vec![a[r].clone()];
        row.extend(cone.iter().map(|v| -&v[r]));
        lp.add_constraint(row, Relation::Eq, b[r].clone());
    }
    Region::new(&lp).is_ok()
}

/// Two-sided Harnack comparison: `c·a <= b <= C·a` on every functional that is
/// nonnegative on `V`, for some `C > c > 0`.
///
/// The dual cone of those functionals is the conic hull of `V` itself, so each
/// side is one LP. Points are homogenized with a trailing 1 so the conic
/// reasoning holds whether or not `V` already carries a constants coordinate.
pub fn harnack_equiv(a: &DualVector, b: &DualVector, points: &[DualVector]) -> Result<bool, GeometryError> {
    check_dims(points, &[a, b])?;
    if !conv_member(a, points)?.is_member() {
        return Err(GeometryError::NotInHull("first point"));
    }
    if !conv_member(b, points)?.is_member() {
        return Err(GeometryError::NotInHull("second point"));
    }
    let cone: Vec<Vec<Rational>> = points.iter().map(homogenize).collect();
    let (ha, hb) = (homogenize(a), homogenize(b));
    let lower_ok = match harnack_lower(&ha, &hb, &cone) {
        None => true,
        Some(c) => c.is_positive(),
    };
    Ok(lower_ok && harnack_upper(&ha, &hb, &cone))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RintIntersection {
    pub point: DualVector,
    pub weights1: Vec<Rational>,
    pub weights2: Vec<Rational>,
    pub t: Rational,
}

/// A common point of `rint conv V1` and `rint conv V2`, if any.
pub fn rint_intersect(v1: &[DualVector], v2: &[DualVector]) -> Result<Option<RintIntersection>, GeometryError> {
    check_dims(v1, &v2.iter().collect::<Vec<_>>())?;
    let (k1, k2) = (v1.len(), v2.len());
    if k1 == 0 || k2 == 0 {
        return Ok(None);
    }
    let m = v1[0].len();
    let nv = k1 + k2 + 1;
    let t = k1 + k2;
    let mut lp = LPProblem::new(nv);
    lp.set_free(t);
    let mut s1 = vec![Rational::zero(); nv];
    let mut s2 = vec![Rational::zero(); nv];
    for v in 0..k1 {
        s1[v] = Rational::one();
    }
    for w in 0..k2 {
        s2[k1 + w] = Rational::one();
    }
    lp.add_constraint(s1, Relation::Eq, Rational::one());
    lp.add_constraint(s2, Relation::Eq, Rational::one());
    for r in 0..m {
        let mut row = vec![Rational::zero(); nv];
        for v in 0..k1 {
            row[v] = v1[v].0[r].clone();
        }
        for w in 0..k2 {
            row[k1 + w] = -&v2[w].0[r];
        }
        lp.add_constraint(row, Relation::Eq, Rational::zero());
    }
    for v in 0..t {
        let mut row = vec![Rational::zero(); nv];
        row[v] = Rational::one();
        row[t] = -Rational::one();
        lp.add_constraint(row, Relation::Ge, Rational::zero());
    }
    let mut objective = vec![Rational::zero(); nv];
    objective[t] = Rational::one();
    lp.set_objective(objective, Direction::Max);
    Ok(match crate::ratlp::solve(&lp) {
        LPOutcome::Optimal { point, value, .. } if value.is_positive() => {
            let weights1 = point[..k1].to_vec();
            let weights2 = point[k1..t].to_vec();
            Some(RintIntersection {
                point: DualVector::combination(&weights1, v1),
                weights1,
                weights2,
                t: value,
            })
        }
        _ => None,
    })
}

/// Convex weights are nonnegative and sum to one.
pub fn is_convex_weights(w: &[Rational]) -> bool {
    w.iter().all(|x| !x.is_negative()) && w.iter().fold(Rational::zero(), |a, x| a + x).is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn dv(xs: &[Rational]) -> DualVector {
        DualVector(xs.to_vec())
    }

    fn pt(xs: &[i64]) -> DualVector {
        DualVector(xs.iter().map(|&x| int(x)).collect())
    }

    fn square() -> Vec<DualVector> {
        vec![pt(&[0, 0]), pt(&[1, 0]), pt(&[1, 1]), pt(&[0, 1])]
    }

    /// 1-D segment embedded with a constants coordinate, as evaluation functionals are.
    fn seg(xs: &[i64]) -> Vec<DualVector> {
        xs.iter().map(|&x| pt(&[x, 1])).collect()
    }

    #[test]
    fn hull_dimensions() {
        assert_eq!(affine_hull(&[pt(&[3, 4])]).unwrap().dim(), 0);
        let h = affine_hull(&[pt(&[0, 0]), pt(&[1, 0]), pt(&[2, 0])]).unwrap();
        assert_eq!(h.dim(), 1);
        assert_eq!(h.directions()[0], vec![int(1), int(0)]);
        assert!(h.contains(&pt(&[-7, 0])));
        assert!(!h.contains(&pt(&[0, 1])));
        assert!(matches!(affine_hull(&[]), Err(GeometryError::Empty)));
    }

    #[test]
    fn conv_membership_and_separation() {
        let v = square();
        let w = conv_member(&pt(&[1, 1]), &v).unwrap();
        assert_eq!(w.weights().unwrap(), &[int(0), int(0), int(1), int(0)]);
        let mid = conv_member(&dv(&[frac(1, 2), int(0)]), &v).unwrap();
        assert_eq!(DualVector::combination(mid.weights().unwrap(), &v), dv(&[frac(1, 2), int(0)]));
        match conv_member(&pt(&[2, 0]), &v).unwrap() {
            ConvMembership::Separated(s) => {
                let ax = dot(&s.functional, &[int(2), int(0)]);
                let max = v.iter().map(|p| dot(&s.functional, &p.0)).max().unwrap();
                assert_eq!(&ax - &max, s.margin);
                assert!(s.margin.is_positive());
            }
            other => panic!("expected separation, got {other:?}"),
        }
    }

    #[test]
    fn rint_of_segment() {
        let v = vec![pt(&[-1]), pt(&[1])];
        let r = rint_member(&pt(&[0]), &v).unwrap().unwrap();
        assert_eq!(r.weights, vec![frac(1, 2), frac(1, 2)]);
        assert_eq!(r.t, frac(1, 2));
        assert!(rint_member(&pt(&[1]), &v).unwrap().is_none());
        assert!(rint_member(&pt(&[2]), &v).unwrap().is_none());
    }

    #[test]
    fn rint_of_square() {
        let v = square();
        assert!(rint_member(&dv(&[frac(1, 2), int(0)]), &v).unwrap().is_none());
        assert!(rint_member(&dv(&[frac(1, 2), frac(1, 2)]), &v).unwrap().is_some());
    }

    #[test]
    fn minimal_faces_of_square() {
        let v = square();
        assert_eq!(minimal_face(&pt(&[1, 1]), &v).unwrap().active, vec![2]);
        assert_eq!(minimal_face(&dv(&[frac(1, 2), int(0)]), &v).unwrap().active, vec![0, 1]);
        assert_eq!(
            minimal_face(&dv(&[frac(1, 3), frac(1, 2)]), &v).unwrap().active,
            vec![0, 1, 2, 3]
        );
        assert!(minimal_face(&pt(&[3, 3]), &v).is_err());
        // duplicated vertex shares the face
        let mut dup = v.clone();
        dup.push(pt(&[1, 1]));
        assert_eq!(minimal_face(&pt(&[1, 1]), &dup).unwrap().active, vec![2, 4]);
    }

    #[test]
    fn gleason_parts_of_square() {
        let v = square();
        let q = |a: i64, b: i64, c: i64, d: i64| dv(&[frac(a, b), frac(c, d)]);
        assert!(gleason_equiv(&q(1, 4, 0, 1), &q(1, 4, 0, 1), &v).unwrap());
        assert!(gleason_equiv(&q(1, 4, 0, 1), &q(3, 4, 0, 1), &v).unwrap());
        assert!(!gleason_equiv(&q(1, 2, 0, 1), &q(1, 2, 1, 2), &v).unwrap());
        assert!(!gleason_equiv(&q(0, 1, 0, 1), &q(1, 2, 0, 1), &v).unwrap());
    }

    #[test]
    fn harnack_on_segment() {
        let v = seg(&[-1, 1]);
        let zero = pt(&[0, 1]);
        let one = pt(&[1, 1]);
        assert!(harnack_equiv(&zero, &zero, &v).unwrap());
        assert!(!harnack_equiv(&zero, &one, &v).unwrap());
        assert!(!harnack_equiv(&one, &zero, &v).unwrap());
        assert!(harnack_equiv(&zero, &dv(&[frac(1, 2), int(1)]), &v).unwrap());
        assert!(harnack_equiv(&pt(&[2, 1]), &pt(&[2, 1]), &v).is_err());
    }

    #[test]
    fn rint_intersections_of_segments() {
        let a = seg(&[0, 1]);
        let r = rint_intersect(&a, &a).unwrap().unwrap();
        assert!(rint_member(&r.point, &a).unwrap().is_some());
        assert!(rint_intersect(&seg(&[0, 1]), &seg(&[1, 2])).unwrap().is_none());
        let r = rint_intersect(&seg(&[0, 2]), &seg(&[1, 3])).unwrap().unwrap();
        let x = &r.point.0[0];
        assert!(*x > int(1) && *x < int(2), "{x}");
        assert!(r.weights1.iter().chain(&r.weights2).all(|w| w.is_positive()));
    }
}
