//! Exact rational linear programming.
//!
//! A dense two-phase simplex with Bland's smallest-index rule. Every outcome
//! carries a certificate that [`check_certificate`] verifies from the problem
//! data alone:
//!
//! * `Optimal` carries the point and dual multipliers proving its value,
//! * `Infeasible` carries Farkas multipliers,
//! * `Unbounded` carries a feasible point and an improving ray.
//!
//! Multipliers use one convention throughout. Each constraint is read as a
//! nonnegative slack `s_i(x)`: `a·x - b` for `>=` and `=`, `b - a·x` for `<=`.
//! Finite bounds contribute `x_k - l_k >= 0` and `u_k - x_k >= 0`. A
//! multiplier vector (nonnegative except on equalities) yields the valid
//! inequality `L(x) = Σ y_i s_i(x) + Σ z_k (x_k - l_k) + Σ w_k (u_k - x_k) >= 0`,
//! and writing `L(x) = g·x - h`:
//!
//! * Farkas: `g = 0` and `h > 0`, so no `x` is feasible;
//! * optimality (min): `g = c` and `h = value`, so `c·x >= value`;
//! * optimality (max): `g = -c` and `h = -value`, so `c·x <= value`.

use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{dot, format_rational, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Eq,
    Le,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Max,
    Min,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    /// Value of the nonnegative slack `s(x)` described in the module docs.
    fn slack(&self, x: &[Rational]) -> Rational {
        let lhs = dot(&self.coeffs, x);
        match self.relation {
            Relation::Le => &self.rhs - lhs,
            Relation::Ge | Relation::Eq => lhs - &self.rhs,
        }
    }

    fn sign(&self) -> Rational {
        match self.relation {
            Relation::Le => -Rational::one(),
            Relation::Ge | Relation::Eq => Rational::one(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LPProblem {
    pub num_vars: usize,
    pub lower: Vec<Option<Rational>>,
    pub upper: Vec<Option<Rational>>,
    pub constraints: Vec<Constraint>,
    pub objective: Vec<Rational>,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

impl LPProblem {
    /// `num_vars` nonnegative variables, no constraints, zero objective.
    pub fn new(num_vars: usize) -> Self {
        LPProblem {
            num_vars,
            lower: vec![Some(Rational::zero()); num_vars],
            upper: vec![None; num_vars],
            constraints: Vec::new(),
            objective: vec![Rational::zero(); num_vars],
            direction: Direction::Max,
        }
    }

    pub fn set_bounds(&mut self, var: usize, lower: Option<Rational>, upper: Option<Rational>) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    pub fn set_free(&mut self, var: usize) {
        self.set_bounds(var, None, None);
    }

    pub fn add_constraint(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) {
        assert_eq!(coeffs.len(), self.num_vars, "constraint row has wrong length");
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn set_objective(&mut self, objective: Vec<Rational>, direction: Direction) {
        assert_eq!(objective.len(), self.num_vars, "objective has wrong length");
        self.objective = objective;
        self.direction = direction;
    }

    pub fn with_objective(&self, objective: Vec<Rational>, direction: Direction) -> Self {
        let mut lp = self.clone();
        lp.set_objective(objective, direction);
        lp
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars;
        if self.lower.len() != n || self.upper.len() != n || self.objective.len() != n {
            return Err(LpError::Dimension("bounds or objective length differs from variable count".into()));
        }
        if let Some(i) = self.constraints.iter().position(|c| c.coeffs.len() != n) {
            return Err(LpError::Dimension(format!("constraint {i} has wrong length")));
        }
        Ok(())
    }

    /// True when `x` satisfies every constraint and bound exactly.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars
            && self.constraints.iter().all(|c| {
                let s = c.slack(x);
                match c.relation {
                    Relation::Eq => s.is_zero(),
                    _ => !s.is_negative(),
                }
            })
            && x.iter().enumerate().all(|(k, v)| {
                self.lower[k].as_ref().is_none_or(|l| v >= l) && self.upper[k].as_ref().is_none_or(|u| v <= u)
            })
    }
}

fn term(f: &mut fmt::Formatter<'_>, coeffs: &[Rational]) -> fmt::Result {
    let mut first = true;
    for (k, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        if first {
            write!(f, "{} x{k}", format_rational(c))?;
        } else if c.is_negative() {
            write!(f, " - {} x{k}", format_rational(&-c))?;
        } else {
            write!(f, " + {} x{k}", format_rational(c))?;
        }
        first = false;
    }
    if first {
        f.write_str("0")?;
    }
    Ok(())
}

/// Plain-text LP listing.
impl fmt::Display for LPProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "\\ {} variables, {} constraints", self.num_vars, self.constraints.len())?;
        f.write_str(match self.direction {
            Direction::Max => "maximize\n  obj: ",
            Direction::Min => "minimize\n  obj: ",
        })?;
        term(f, &self.objective)?;
        f.write_str("\nsubject to\n")?;
        for (i, c) in self.constraints.iter().enumerate() {
            write!(f, "  c{i}: ")?;
            term(f, &c.coeffs)?;
            let rel = match c.relation {
                Relation::Eq => "=",
                Relation::Le => "<=",
                Relation::Ge => ">=",
            };
            writeln!(f, " {rel} {}", format_rational(&c.rhs))?;
        }
        f.write_str("bounds\n")?;
        for k in 0..self.num_vars {
            let lo = self.lower[k].as_ref().map_or("-inf".to_string(), format_rational);
            let hi = self.upper[k].as_ref().map_or("+inf".to_string(), format_rational);
            writeln!(f, "  {lo} <= x{k} <= {hi}")?;
        }
        f.write_str("end\n")
    }
}

/// Multipliers on constraints and finite bounds (see module docs).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multipliers {
    pub constraints: Vec<Rational>,
    pub lower: Vec<Rational>,
    pub upper: Vec<Rational>,
}

impl Multipliers {
    fn zeros(lp: &LPProblem) -> Self {
        Multipliers {
            constraints: vec![Rational::zero(); lp.constraints.len()],
            lower: vec![Rational::zero(); lp.num_vars],
            upper: vec![Rational::zero(); lp.num_vars],
        }
    }

    /// Sign conditions: inequality multipliers and bound multipliers are
    /// nonnegative, and bound multipliers vanish on infinite bounds.
    pub fn signs_ok(&self, lp: &LPProblem) -> bool {
        self.constraints.len() == lp.constraints.len()
            && self.lower.len() == lp.num_vars
            && self.upper.len() == lp.num_vars
            && lp
                .constraints
                .iter()
                .zip(&self.constraints)
                .all(|(c, y)| c.relation == Relation::Eq || !y.is_negative())
            && (0..lp.num_vars).all(|k| {
                let lo_ok = if lp.lower[k].is_some() {
                    !self.lower[k].is_negative()
                } else {
                    self.lower[k].is_zero()
                };
                let hi_ok = if lp.upper[k].is_some() {
                    !self.upper[k].is_negative()
                } else {
                    self.upper[k].is_zero()
                };
                lo_ok && hi_ok
            })
    }

    /// The combined inequality `L(x) = g·x - h`, returned as `(g, h)`.
    pub fn combine(&self, lp: &LPProblem) -> (Vec<Rational>, Rational) {
        let mut g = vec![Rational::zero(); lp.num_vars];
        let mut h = Rational::zero();
        for (c, y) in lp.constraints.iter().zip(&self.constraints) {
            if y.is_zero() {
                continue;
            }
            let ys = y * c.sign();
            for (gk, a) in g.iter_mut().zip(&c.coeffs) {
                if !a.is_zero() {
                    *gk += &ys * a;
                }
            }
            h += &ys * &c.rhs;
        }
        for k in 0..lp.num_vars {
            if let Some(l) = &lp.lower[k] {
                g[k] += &self.lower[k];
                h += &self.lower[k] * l;
            }
            if let Some(u) = &lp.upper[k] {
                g[k] -= &self.upper[k];
                h -= &self.upper[k] * u;
            }
        }
        (g, h)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LPOutcome {
    Optimal {
        point: Vec<Rational>,
        value: Rational,
        duals: Multipliers,
    },
    Infeasible(Multipliers),
    Unbounded {
        point: Vec<Rational>,
        ray: Vec<Rational>,
    },
}

impl LPOutcome {
    pub fn is_optimal(&self) -> bool {
        matches!(self, LPOutcome::Optimal { .. })
    }

    pub fn value(&self) -> Option<&Rational> {
        match self {
            LPOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn point(&self) -> Option<&[Rational]> {
        match self {
            LPOutcome::Optimal { point, .. } | LPOutcome::Unbounded { point, .. } => Some(point),
            LPOutcome::Infeasible(_) => None,
        }
    }
}

/// Verifies an outcome against the problem data, independently of the solver.
pub fn check_certificate(lp: &LPProblem, outcome: &LPOutcome) -> Result<bool, LpError> {
    lp.validate()?;
    let n = lp.num_vars;
    let sized = |v: &[Rational], what: &str| {
        if v.len() == n {
            Ok(())
        } else {
            Err(LpError::Dimension(format!("{what} has length {}, expected {n}", v.len())))
        }
    };
    Ok(match outcome {
        LPOutcome::Optimal { point, value, duals } => {
            sized(point, "point")?;
            if duals.constraints.len() != lp.constraints.len() || duals.lower.len() != n || duals.upper.len() != n {
                return Err(LpError::Dimension("multiplier vectors have wrong length".into()));
            }
            if !lp.is_feasible(point) || dot(&lp.objective, point) != *value || !duals.signs_ok(lp) {
                return Ok(false);
            }
            let (g, h) = duals.combine(lp);
            match lp.direction {
                Direction::Min => g == lp.objective && h == *value,
                Direction::Max => g.iter().zip(&lp.objective).all(|(a, b)| *a == -b) && h == -value,
            }
        }
        LPOutcome::Infeasible(y) => {
            if y.constraints.len() != lp.constraints.len() || y.lower.len() != n || y.upper.len() != n {
                return Err(LpError::Dimension("multiplier vectors have wrong length".into()));
            }
            if !y.signs_ok(lp) {
                return Ok(false);
            }
            let (g, h) = y.combine(lp);
            g.iter().all(Zero::is_zero) && h.is_positive()
        }
        LPOutcome::Unbounded { point, ray } => {
            sized(point, "point")?;
            sized(ray, "ray")?;
            if !lp.is_feasible(point) {
                return Ok(false);
            }
            let rows_ok = lp.constraints.iter().all(|c| {
                let d = dot(&c.coeffs, ray);
                match c.relation {
                    Relation::Eq => d.is_zero(),
                    Relation::Le => !d.is_positive(),
                    Relation::Ge => !d.is_negative(),
                }
            });
            let bounds_ok = (0..n).all(|k| {
                (lp.lower[k].is_none() || !ray[k].is_negative()) && (lp.upper[k].is_none() || !ray[k].is_positive())
            });
            let slope = dot(&lp.objective, ray);
            let improving = match lp.direction {
                Direction::Max => slope.is_positive(),
                Direction::Min => slope.is_negative(),
            };
            rows_ok && bounds_ok && improving
        }
    })
}

// ---------------------------------------------------------------------------
// solver internals

#[derive(Debug, Clone)]
enum VarMap {
    /// `x = lower + y`
    Shift { col: usize, lower: Rational },
    /// `x = upper - y`
    Flip { col: usize, upper: Rational },
    /// `x = y+ - y-`
    Split { pos: usize, neg: usize },
}

#[derive(Debug, Clone, Copy)]
enum RowOrigin {
    Constraint(usize),
    UpperBound(usize),
}

#[derive(Debug, Clone)]
struct Tableau {
    /// `rows[i]` has `ncols + 1` entries; the last is the right-hand side.
    rows: Vec<Vec<Rational>>,
    /// Reduced costs, with `-objective value` in the last entry.
    obj: Vec<Rational>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for x in self.rows[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let nz: Vec<(usize, Rational)> = self.rows[r]
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(j, v)| (j, v.clone()))
            .collect();
        let eliminate = |row: &mut Vec<Rational>| {
            if row[c].is_zero() {
                return;
            }
            let f = row[c].clone();
            for (j, v) in &nz {
                row[*j] -= &f * v;
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.obj);
        self.basis[r] = c;
    }

    /// Reduced costs for `cost` given the current basis.
    fn price(&mut self, cost: &[Rational]) {
        let mut obj: Vec<Rational> = cost.to_vec();
        obj.push(Rational::zero());
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for (o, t) in obj.iter_mut().zip(&self.rows[i]) {
                if !t.is_zero() {
                    *o -= cb * t;
                }
            }
        }
        self.obj = obj;
    }

    /// Bland's rule iterations. Returns the entering column of an unbounded
    /// direction, or `None` at optimality.
    fn run(&mut self, allowed: impl Fn(usize) -> bool) -> Option<usize> {
        let rhs = self.ncols;
        loop {
            let Some(c) = (0..self.ncols).find(|&j| allowed(j) && self.obj[j].is_negative()) else {
                return None;
            };
            let mut best: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[c].is_positive() {
                    continue;
                }
                let ratio = &row[rhs] / &row[c];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                None => return Some(c),
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }

    fn values(&self) -> Vec<Rational> {
        let mut z = vec![Rational::zero(); self.ncols];
        for (i, &b) in self.basis.iter().enumerate() {
            z[b] = self.rows[i][self.ncols].clone();
        }
        z
    }
}

/// A feasible basis for the constraints of an LP, reusable across objectives.
#[derive(Debug, Clone)]
pub struct Region {
    lp: LPProblem,
    maps: Vec<VarMap>,
    origins: Vec<RowOrigin>,
    /// Row sign flips applied so that right-hand sides are nonnegative.
    signs: Vec<bool>,
    /// Column carrying `+e_i` in the initial tableau of row `i`.
    units: Vec<usize>,
    structural: usize,
    artificial_from: usize,
    tableau: Tableau,
}

impl Region {
    /// Runs phase one. Returns Farkas multipliers when the constraints are infeasible.
    pub fn new(lp: &LPProblem) -> Result<Region, Multipliers> {
        lp.validate().expect("malformed LP problem");
        log::trace!(target: "conetrans::lp", "{lp}");
        let mut maps = Vec::with_capacity(lp.num_vars);
        let mut structural = 0;
        for k in 0..lp.num_vars {
            let map = match (&lp.lower[k], &lp.upper[k]) {
                (Some(l), _) => VarMap::Shift {
                    col: structural,
                    lower: l.clone(),
                },
                (None, Some(u)) => VarMap::Flip {
                    col: structural,
                    upper: u.clone(),
                },
                (None, None) => {
                    structural += 1;
                    VarMap::Split {
                        pos: structural - 1,
                        neg: structural,
                    }
                }
            };
            structural += 1;
            maps.push(map);
        }

        // internal rows over y: (coeffs, relation, rhs, origin)
        let mut rows: Vec<(Vec<Rational>, Relation, Rational, RowOrigin)> = Vec::new();
        for (i, c) in lp.constraints.iter().enumerate() {
            let mut coeffs = vec![Rational::zero(); structural];
            let mut rhs = c.rhs.clone();
            for (k, a) in c.coeffs.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                match &maps[k] {
                    VarMap::Shift { col, lower } => {
                        coeffs[*col] += a;
                        rhs -= a * lower;
                    }
                    VarMap::Flip { col, upper } => {
                        coeffs[*col] -= a;
                        rhs -= a * upper;
                    }
                    VarMap::Split { pos, neg } => {
                        coeffs[*pos] += a;
                        coeffs[*neg] -= a;
                    }
                }
            }
            rows.push((coeffs, c.relation, rhs, RowOrigin::Constraint(i)));
        }
        for k in 0..lp.num_vars {
            if let (Some(l), Some(u), VarMap::Shift { col, .. }) = (&lp.lower[k], &lp.upper[k], &maps[k]) {
                let mut coeffs = vec![Rational::zero(); structural];
                coeffs[*col] = Rational::one();
                rows.push((coeffs, Relation::Le, u - l, RowOrigin::UpperBound(k)));
            }
        }

        let nrows = rows.len();
        let slack_count = rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let signs: Vec<bool> = rows.iter().map(|r| r.2.is_negative()).collect();
        // a slack can serve as the initial basic column when it enters with +1
        let needs_artificial: Vec<bool> = rows
            .iter()
            .zip(&signs)
            .map(|(r, &flip)| match r.1 {
                Relation::Eq => true,
                Relation::Le => flip,
                Relation::Ge => !flip,
            })
            .collect();
        let artificial_from = structural + slack_count;
        let ncols = artificial_from + needs_artificial.iter().filter(|&&b| b).count();

        let mut t_rows = Vec::with_capacity(nrows);
        let mut units = Vec::with_capacity(nrows);
        let mut basis = Vec::with_capacity(nrows);
        let mut slack_col = structural;
        let mut art_col = artificial_from;
        for ((coeffs, rel, rhs, _), (&flip, &art)) in rows.iter().zip(signs.iter().zip(&needs_artificial)) {
            let mut row = vec![Rational::zero(); ncols + 1];
            for (j, a) in coeffs.iter().enumerate() {
                row[j] = if flip { -a } else { a.clone() };
            }
            row[ncols] = if flip { -rhs } else { rhs.clone() };
            if *rel != Relation::Eq {
                let s = if *rel == Relation::Le { Rational::one() } else { -Rational::one() };
                row[slack_col] = if flip { -s } else { s };
                if !art {
                    units.push(slack_col);
                    basis.push(slack_col);
                }
                slack_col += 1;
            }
            if art {
                row[art_col] = Rational::one();
                units.push(art_col);
                basis.push(art_col);
                art_col += 1;
            }
            t_rows.push(row);
        }

        let mut tableau = Tableau {
            rows: t_rows,
            obj: Vec::new(),
            basis,
            ncols,
        };
        let phase1: Vec<Rational> = (0..ncols)
            .map(|j| if j >= artificial_from { Rational::one() } else { Rational::zero() })
            .collect();
        tableau.price(&phase1);
        let unbounded = tableau.run(|_| true);
        debug_assert!(unbounded.is_none(), "phase one is bounded below");

        let origins: Vec<RowOrigin> = rows.iter().map(|r| r.3).collect();
        let mut region = Region {
            lp: lp.clone(),
            maps,
            origins,
            signs,
            units,
            structural,
            artificial_from,
            tableau,
        };

        if tableau_value(&region.tableau).is_positive() {
            return Err(region.multipliers(&phase1));
        }

        // drive zero-level artificials out of the basis where possible
        for r in 0..nrows {
            if region.tableau.basis[r] < artificial_from {
                continue;
            }
            if let Some(c) = (0..artificial_from).find(|&j| !region.tableau.rows[r][j].is_zero()) {
                region.tableau.pivot(r, c);
            }
        }
        Ok(region)
    }

    pub fn problem(&self) -> &LPProblem {
        &self.lp
    }

    fn to_original(&self, z: &[Rational]) -> Vec<Rational> {
        self.maps
            .iter()
            .map(|m| match m {
                VarMap::Shift { col, lower } => lower + &z[*col],
                VarMap::Flip { col, upper } => upper - &z[*col],
                VarMap::Split { pos, neg } => &z[*pos] - &z[*neg],
            })
            .collect()
    }

    fn direction_to_original(&self, dz: &[Rational]) -> Vec<Rational> {
        self.maps
            .iter()
            .map(|m| match m {
                VarMap::Shift { col, .. } => dz[*col].clone(),
                VarMap::Flip { col, .. } => -&dz[*col],
                VarMap::Split { pos, neg } => &dz[*pos] - &dz[*neg],
            })
            .collect()
    }

    /// The basic feasible point found by phase one.
    pub fn feasible_point(&self) -> Vec<Rational> {
        self.to_original(&self.tableau.values())
    }

    /// Reads multipliers off the current reduced costs priced with `cost`.
    fn multipliers(&self, cost: &[Rational]) -> Multipliers {
        let t = &self.tableau;
        let mut out = Multipliers::zeros(&self.lp);
        for (i, origin) in self.origins.iter().enumerate() {
            let u = self.units[i];
            let pi = &cost[u] - &t.obj[u];
            let rho = if self.signs[i] { -pi } else { pi };
            match *origin {
                RowOrigin::Constraint(c) => {
                    out.constraints[c] = rho * self.lp.constraints[c].sign();
                }
                RowOrigin::UpperBound(k) => out.upper[k] -= rho,
            }
        }
        for (k, m) in self.maps.iter().enumerate() {
            match m {
                VarMap::Shift { col, .. } => out.lower[k] += &t.obj[*col],
                VarMap::Flip { col, .. } => out.upper[k] += &t.obj[*col],
                VarMap::Split { .. } => {}
            }
        }
        out
    }

    /// Phase two from the stored basis.
    pub fn optimize(&self, objective: &[Rational], direction: Direction) -> LPOutcome {
        assert_eq!(objective.len(), self.lp.num_vars, "objective has wrong length");
        let mut cost = vec![Rational::zero(); self.tableau.ncols];
        for (k, m) in self.maps.iter().enumerate() {
            let c = match direction {
                Direction::Min => objective[k].clone(),
                Direction::Max => -&objective[k],
            };
            match m {
                VarMap::Shift { col, .. } => cost[*col] = c,
                VarMap::Flip { col, .. } => cost[*col] = -c,
                VarMap::Split { pos, neg } => {
                    cost[*neg] = -&c;
                    cost[*pos] = c;
                }
            }
        }
        let mut region = self.clone();
        region.tableau.price(&cost);
        let artificial_from = self.artificial_from;
        match region.tableau.run(|j| j < artificial_from) {
            Some(c) => {
                let z = region.tableau.values();
                let mut dz = vec![Rational::zero(); region.tableau.ncols];
                dz[c] = Rational::one();
                for (i, &b) in region.tableau.basis.iter().enumerate() {
                    dz[b] = -&region.tableau.rows[i][c];
                }
                LPOutcome::Unbounded {
                    point: region.to_original(&z),
                    ray: region.direction_to_original(&dz),
                }
            }
            None => {
                let point = region.to_original(&region.tableau.values());
                let value = dot(objective, &point);
                let duals = region.multipliers(&cost);
                LPOutcome::Optimal { point, value, duals }
            }
        }
    }

    /// Number of structural columns after splitting free variables.
    pub fn width(&self) -> usize {
        self.structural
    }
}

fn tableau_value(t: &Tableau) -> Rational {
    -&t.obj[t.ncols]
}

/// Solves `lp` exactly. Deterministic: Bland's rule fixes every pivot.
pub fn solve(lp: &LPProblem) -> LPOutcome {
    let outcome = match Region::new(lp) {
        Err(farkas) => LPOutcome::Infeasible(farkas),
        Ok(region) => region.optimize(&lp.objective, lp.direction),
    };
    debug_assert!(
        check_certificate(lp, &outcome).unwrap_or(false),
        "solver produced an invalid certificate"
    );
    outcome
}
