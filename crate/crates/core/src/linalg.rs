//! Fraction-free exact elimination over integer-scaled rows.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

/// Scales a rational vector by the lcm of its denominators and divides out the
/// content, giving a primitive integer vector spanning the same line.
pub fn primitive(v: &[Rational]) -> Vec<BigInt> {
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let mut out: Vec<BigInt> = v
        .iter()
        .map(|q| q.numer() * (&lcm / q.denom()))
        .collect();
    normalize(&mut out);
    out
}

fn normalize(v: &mut [BigInt]) {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x /= &g;
        }
    }
}

/// Incrementally maintained row-echelon basis of a subspace of `Q^dim`.
#[derive(Debug, Clone)]
pub struct Echelon {
    dim: usize,
    rows: Vec<(usize, Vec<BigInt>)>,
}

impl Echelon {
    pub fn new(dim: usize) -> Self {
        Echelon {
            dim,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn reduce(&self, mut v: Vec<BigInt>) -> Vec<BigInt> {
        for (pivot, row) in &self.rows {
            if v[*pivot].is_zero() {
                continue;
            }
            let a = &row[*pivot];
            let b = v[*pivot].clone();
            for (x, r) in v.iter_mut().zip(row) {
                *x = &*x * a - &b * r;
            }
            normalize(&mut v);
        }
        v
    }

    /// Adds `v` to the basis; returns false when it was already in the span.
    pub fn insert(&mut self, v: &[Rational]) -> bool {
        assert_eq!(v.len(), self.dim, "vector length does not match echelon dimension");
        let reduced = self.reduce(primitive(v));
        match reduced.iter().position(|x| !x.is_zero()) {
            None => false,
            Some(pivot) => {
                let mut reduced = reduced;
                if reduced[pivot].is_negative() {
                    for x in reduced.iter_mut() {
                        *x = -&*x;
                    }
                }
                // keep earlier rows free of the new pivot so `reduce` stays one pass
                for (_, row) in self.rows.iter_mut() {
                    if !row[pivot].is_zero() {
                        let a = reduced[pivot].clone();
                        let b = row[pivot].clone();
                        for (x, r) in row.iter_mut().zip(&reduced) {
                            *x = &*x * &a - &b * r;
                        }
                        normalize(row);
                    }
                }
                self.rows.push((pivot, reduced));
                true
            }
        }
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        assert_eq!(v.len(), self.dim, "vector length does not match echelon dimension");
        self.reduce(primitive(v)).iter().all(Zero::is_zero)
    }
}

/// Rank of a list of vectors of common length.
pub fn rank(vectors: &[Vec<Rational>]) -> usize {
    let Some(first) = vectors.first() else {
        return 0;
    };
    let mut ech = Echelon::new(first.len());
    for v in vectors {
        ech.insert(v);
    }
    ech.rank()
}

/// Solves `A x = b` for square or tall `A` with independent columns, given as
/// columns. Returns `None` when `b` is outside the column span.
pub fn solve_columns(columns: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let rows = b.len();
    let k = columns.len();
    // augmented matrix, rows x (k + 1)
    let mut m: Vec<Vec<Rational>> = (0..rows)
        .map(|r| {
            let mut row: Vec<Rational> = columns.iter().map(|c| c[r].clone()).collect();
            row.push(b[r].clone());
            row
        })
        .collect();
    let mut pivot_row = 0;
    let mut pivots = Vec::with_capacity(k);
    for col in 0..k {
        let Some(found) = (pivot_row..rows).find(|&r| !m[r][col].is_zero()) else {
            return None;
        };
        m.swap(pivot_row, found);
        let inv = m[pivot_row][col].recip();
        for x in m[pivot_row].iter_mut() {
            *x *= &inv;
        }
        let prow = m[pivot_row].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != pivot_row && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, p) in row.iter_mut().zip(&prow) {
                    if !p.is_zero() {
                        *x -= &f * p;
                    }
                }
            }
        }
        pivots.push(pivot_row);
        pivot_row += 1;
    }
    if m[pivot_row..].iter().any(|row| !row[k].is_zero()) {
        return None;
    }
    Some(pivots.iter().map(|&r| m[r][k].clone()).collect())
}
