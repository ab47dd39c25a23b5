//! Instances: ground points, the generator matrix, and the two marginals.
//!
//! Generator row `r` holds the values `g_r(x_1), ..., g_r(x_n)`; column `j` is
//! therefore the evaluation functional of point `j` (see [`gelfand_embed`]).
//! The lattice cone is never materialized: every constraint "for all f in the
//! cone" is linear in `f`, so it is imposed on the listed generators only.

use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::linalg::Echelon;
use crate::rational::{format_rational, int, serde_matrix, serde_opt_matrix, serde_opt_vec, serde_vec, sum, Rational};

pub type Matrix = Vec<Vec<Rational>>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("field `{field}` has length {found}, expected {expected}")]
    Length {
        field: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("instance needs at least one point")]
    NoPoints,
    #[error("generator matrix needs at least two rows, found {0}")]
    TooFewGenerators(usize),
    #[error("{field} has a negative entry at index {index}")]
    Negative { field: &'static str, index: usize },
    #[error("{field} does not sum to 1 (sum = {sum})")]
    MassSum { field: &'static str, sum: String },
    #[error("generators must contain the all-ones row and its negation (contains constants)")]
    MissingConstants,
    #[error("points {first:?} and {second:?} have identical generator columns (generators must separate points)")]
    DuplicateColumns { first: String, second: String },
    #[error("label {0:?} is used twice")]
    DuplicateLabel(String),
    #[error("cone `{0}` needs `coords`")]
    MissingCoords(String),
    #[error("cone `custom` needs `generators`")]
    MissingGenerators,
    #[error("coordinates must all have the same positive dimension")]
    RaggedCoords,
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
}

/// Which cone of test functions orders the marginals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cone {
    /// Affine functions: the convex order.
    Martingale,
    /// Nondecreasing affine generators.
    Submartingale,
    /// Nonincreasing affine generators.
    Supermartingale,
    /// Generators given explicitly, one row per function.
    Custom(Matrix),
}

impl Cone {
    pub fn name(&self) -> &'static str {
        match self {
            Cone::Martingale => "martingale",
            Cone::Submartingale => "submartingale",
            Cone::Supermartingale => "supermartingale",
            Cone::Custom(_) => "custom",
        }
    }
}

fn ones(n: usize) -> Vec<Rational> {
    vec![Rational::one(); n]
}

fn neg(row: &[Rational]) -> Vec<Rational> {
    row.iter().map(|q| -q).collect()
}

fn check_distinct_columns(gens: &Matrix, labels: Option<&[String]>) -> Result<(), InstanceError> {
    let n = gens.first().map_or(0, Vec::len);
    let mut seen: HashMap<Vec<&Rational>, usize> = HashMap::new();
    for j in 0..n {
        let col: Vec<&Rational> = gens.iter().map(|row| &row[j]).collect();
        if let Some(&i) = seen.get(&col) {
            let name = |k: usize| labels.map_or_else(|| format!("#{k}"), |l| l[k].clone());
            return Err(InstanceError::DuplicateColumns {
                first: name(i),
                second: name(j),
            });
        }
        seen.insert(col, j);
    }
    Ok(())
}

/// Generator matrix of a cone evaluated at `coords` (one row per point).
///
/// Builder cones list `+x_r, -x_r` per coordinate (martingale), `+x_r`
/// (submartingale) or `-x_r` (supermartingale), followed by the constants
/// `+1, -1`. Custom matrices pass through with missing constant rows appended.
pub fn build_cone(cone: &Cone, coords: &[Vec<Rational>]) -> Result<Matrix, InstanceError> {
    let gens = match cone {
        Cone::Custom(m) => {
            let n = m.first().map_or(0, Vec::len);
            if m.iter().any(|row| row.len() != n) {
                return Err(InstanceError::Length {
                    field: "generators",
                    expected: n,
                    found: m.iter().map(Vec::len).find(|&l| l != n).unwrap_or(0),
                });
            }
            let mut out = m.clone();
            let one = ones(n);
            let minus = neg(&one);
            if !out.contains(&one) {
                out.push(one);
            }
            if !out.contains(&minus) {
                out.push(minus);
            }
            out
        }
        _ => {
            let n = coords.len();
            let d = coords.first().map_or(0, Vec::len);
            if d == 0 || coords.iter().any(|c| c.len() != d) {
                return Err(InstanceError::RaggedCoords);
            }
            let mut out = Vec::new();
            for r in 0..d {
                let axis: Vec<Rational> = coords.iter().map(|c| c[r].clone()).collect();
                match cone {
                    Cone::Martingale => {
                        let minus = neg(&axis);
                        out.push(axis);
                        out.push(minus);
                    }
                    Cone::Submartingale => out.push(axis),
                    Cone::Supermartingale => out.push(neg(&axis)),
                    Cone::Custom(_) => unreachable!(),
                }
            }
            out.push(ones(n));
            out.push(neg(&ones(n)));
            out
        }
    };
    check_distinct_columns(&gens, None)?;
    Ok(gens)
}

/// A functional on the span of the generators, stored by its values on the
/// listed generator rows.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DualVector(pub Vec<Rational>);

impl DualVector {
    pub fn values(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Convex combination `sum_k w_k v_k`.
    pub fn combination(weights: &[Rational], points: &[DualVector]) -> DualVector {
        let m = points.first().map_or(0, DualVector::len);
        let mut out = vec![Rational::zero(); m];
        for (w, p) in weights.iter().zip(points) {
            if w.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(&p.0) {
                *o += w * x;
            }
        }
        DualVector(out)
    }
}

impl fmt::Display for DualVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        crate::rational::Row(&self.0).fmt(f)
    }
}

/// Validated problem data. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    labels: Vec<String>,
    coords: Option<Matrix>,
    cone: Cone,
    gens: Matrix,
    mu: Vec<Rational>,
    nu: Vec<Rational>,
    p: Option<Vec<Rational>>,
}

/// The on-disk instance document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub labels: Vec<String>,
    #[serde(default, with = "serde_opt_matrix", skip_serializing_if = "Option::is_none")]
    pub coords: Option<Matrix>,
    pub cone: String,
    #[serde(default, with = "serde_opt_matrix", skip_serializing_if = "Option::is_none")]
    pub generators: Option<Matrix>,
    #[serde(with = "serde_vec")]
    pub mu: Vec<Rational>,
    #[serde(with = "serde_vec")]
    pub nu: Vec<Rational>,
    #[serde(default, with = "serde_opt_vec", skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<Rational>>,
}

#[derive(Serialize)]
struct DigestView<'a> {
    labels: &'a [String],
    #[serde(with = "serde_matrix")]
    gens: &'a [Vec<Rational>],
    #[serde(with = "serde_vec")]
    mu: &'a [Rational],
    #[serde(with = "serde_vec")]
    nu: &'a [Rational],
}

fn check_masses(field: &'static str, v: &[Rational], n: usize) -> Result<(), InstanceError> {
    if v.len() != n {
        return Err(InstanceError::Length {
            field,
            expected: n,
            found: v.len(),
        });
    }
    if let Some(index) = v.iter().position(Signed::is_negative) {
        return Err(InstanceError::Negative { field, index });
    }
    let total = sum(v);
    if !total.is_one() {
        return Err(InstanceError::MassSum {
            field,
            sum: format_rational(&total),
        });
    }
    Ok(())
}

impl Instance {
    /// Builds an instance from a cone description, validating every invariant.
    pub fn new(
        labels: Vec<String>,
        coords: Option<Matrix>,
        cone: Cone,
        mu: Vec<Rational>,
        nu: Vec<Rational>,
        p: Option<Vec<Rational>>,
    ) -> Result<Instance, InstanceError> {
        let n = labels.len();
        if n == 0 {
            return Err(InstanceError::NoPoints);
        }
        let mut seen = HashMap::new();
        for l in &labels {
            if seen.insert(l.as_str(), ()).is_some() {
                return Err(InstanceError::DuplicateLabel(l.clone()));
            }
        }
        if let Some(c) = &coords {
            if c.len() != n {
                return Err(InstanceError::Length {
                    field: "coords",
                    expected: n,
                    found: c.len(),
                });
            }
        }
        let gens = match (&cone, &coords) {
            (Cone::Custom(_), _) => build_cone(&cone, &[])?,
            (_, Some(c)) => build_cone(&cone, c)?,
            (_, None) => return Err(InstanceError::MissingCoords(cone.name().to_string())),
        };
        if gens.len() < 2 {
            return Err(InstanceError::TooFewGenerators(gens.len()));
        }
        if let Some(row) = gens.iter().find(|row| row.len() != n) {
            return Err(InstanceError::Length {
                field: "generators",
                expected: n,
                found: row.len(),
            });
        }
        let one = ones(n);
        if !gens.contains(&one) || !gens.contains(&neg(&one)) {
            return Err(InstanceError::MissingConstants);
        }
        check_distinct_columns(&gens, Some(&labels))?;
        check_masses("mu", &mu, n)?;
        check_masses("nu", &nu, n)?;
        if let Some(p) = &p {
            if p.len() != n {
                return Err(InstanceError::Length {
                    field: "p",
                    expected: n,
                    found: p.len(),
                });
            }
            if let Some(index) = p.iter().position(Signed::is_negative) {
                return Err(InstanceError::Negative { field: "p", index });
            }
        }
        Ok(Instance {
            labels,
            coords,
            cone,
            gens,
            mu,
            nu,
            p,
        })
    }

    /// Instance over a custom generator matrix, with labels `x0, x1, ...`.
    pub fn from_generators(gens: Matrix, mu: Vec<Rational>, nu: Vec<Rational>) -> Result<Instance, InstanceError> {
        let n = mu.len();
        let labels = (0..n).map(|j| format!("x{j}")).collect();
        Instance::new(labels, None, Cone::Custom(gens), mu, nu, None)
    }

    /// One-dimensional instance with integer coordinates used as labels.
    pub fn on_line(cone: Cone, points: &[i64], mu: Vec<Rational>, nu: Vec<Rational>) -> Result<Instance, InstanceError> {
        let labels = points.iter().map(|x| x.to_string()).collect();
        let coords = points.iter().map(|&x| vec![int(x)]).collect();
        Instance::new(labels, Some(coords), cone, mu, nu, None)
    }

    pub fn from_document(doc: InstanceDocument) -> Result<Instance, InstanceError> {
        let cone = match doc.cone.as_str() {
            "martingale" => Cone::Martingale,
            "submartingale" => Cone::Submartingale,
            "supermartingale" => Cone::Supermartingale,
            "custom" => Cone::Custom(doc.generators.ok_or(InstanceError::MissingGenerators)?),
            other => {
                return Err(InstanceError::Parse {
                    line: 0,
                    column: 0,
                    message: format!("unknown cone kind {other:?}"),
                })
            }
        };
        Instance::new(doc.labels, doc.coords, cone, doc.mu, doc.nu, doc.p)
    }

    pub fn to_document(&self) -> InstanceDocument {
        InstanceDocument {
            labels: self.labels.clone(),
            coords: self.coords.clone(),
            cone: self.cone.name().to_string(),
            generators: match &self.cone {
                Cone::Custom(m) => Some(m.clone()),
                _ => None,
            },
            mu: self.mu.clone(),
            nu: self.nu.clone(),
            p: self.p.clone(),
        }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Number of generator rows.
    pub fn m(&self) -> usize {
        self.gens.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, j: usize) -> &str {
        &self.labels[j]
    }

    pub fn index_of(&self, label: &str) -> Result<usize, InstanceError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| InstanceError::UnknownLabel(label.to_string()))
    }

    pub fn coords(&self) -> Option<&Matrix> {
        self.coords.as_ref()
    }

    pub fn cone(&self) -> &Cone {
        &self.cone
    }

    pub fn gens(&self) -> &Matrix {
        &self.gens
    }

    pub fn mu(&self) -> &[Rational] {
        &self.mu
    }

    pub fn nu(&self) -> &[Rational] {
        &self.nu
    }

    pub fn p(&self) -> Option<&[Rational]> {
        self.p.as_deref()
    }

    /// Sources carrying positive mass, in index order.
    pub fn sources(&self) -> impl Iterator<Item = usize> + '_ {
        self.mu.iter().enumerate().filter(|(_, m)| m.is_positive()).map(|(i, _)| i)
    }

    /// Evaluation functional of point `j` (column `j` of the generator matrix).
    pub fn phi(&self, j: usize) -> DualVector {
        DualVector(self.gens.iter().map(|row| row[j].clone()).collect())
    }

    /// True when generator row `r` takes the same value at every point.
    pub fn is_constant_row(&self, r: usize) -> bool {
        let row = &self.gens[r];
        row.iter().all(|q| *q == row[0])
    }

    /// Index of the all-ones generator row.
    pub fn constants_row(&self) -> usize {
        let one = ones(self.n());
        self.gens.iter().position(|r| *r == one).expect("validated instance contains constants")
    }

    /// Rows `r` whose negation is also a listed row (the linear part of the cone).
    pub fn symmetric_rows(&self) -> Vec<usize> {
        (0..self.m())
            .filter(|&r| {
                let minus = neg(&self.gens[r]);
                self.gens.contains(&minus)
            })
            .collect()
    }

    /// True when the generator list is closed under negation, i.e. its cone is a linear space.
    pub fn is_linear_cone(&self) -> bool {
        self.symmetric_rows().len() == self.m()
    }

    /// A dual vector is consistent when it vanishes on every generator
    /// combination that vanishes on all points, i.e. it lies in the column span.
    pub fn is_consistent(&self, v: &DualVector) -> bool {
        if v.len() != self.m() {
            return false;
        }
        let mut ech = Echelon::new(self.m());
        for j in 0..self.n() {
            ech.insert(self.phi(j).values());
        }
        ech.contains(v.values())
    }

    /// Hex SHA-256 of the labels, generator matrix and marginals.
    pub fn digest(&self) -> String {
        let view = DigestView {
            labels: &self.labels,
            gens: &self.gens,
            mu: &self.mu,
            nu: &self.nu,
        };
        let bytes = serde_json::to_vec(&view).expect("digest view serializes");
        hex::encode(Sha256::digest(bytes))
    }

    /// Replaces the marginals, re-validating them.
    pub fn with_marginals(&self, mu: Vec<Rational>, nu: Vec<Rational>) -> Result<Instance, InstanceError> {
        Instance::new(self.labels.clone(), self.coords.clone(), self.cone.clone(), mu, nu, self.p.clone())
    }

    /// Same points and marginals with extra custom generator rows appended.
    pub fn with_extra_generators(&self, rows: &[Vec<Rational>]) -> Result<Instance, InstanceError> {
        let mut gens = self.gens.clone();
        gens.extend(rows.iter().cloned());
        Instance::new(
            self.labels.clone(),
            self.coords.clone(),
            Cone::Custom(gens),
            self.mu.clone(),
            self.nu.clone(),
            self.p.clone(),
        )
    }
}

/// Parses and validates an instance document.
pub fn load_instance(text: &str) -> Result<Instance, InstanceError> {
    let doc: InstanceDocument = serde_json::from_str(text).map_err(|e| InstanceError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Instance::from_document(doc)
}

/// Evaluation functionals of all points, in index order.
pub fn gelfand_embed(inst: &Instance) -> Vec<DualVector> {
    (0..inst.n()).map(|j| inst.phi(j)).collect()
}
