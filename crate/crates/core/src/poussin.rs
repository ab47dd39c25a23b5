//! de la Vallée-Poussin growth function for finitely supported measures.
//!
//! Given a weight `p >= 0` and two mass vectors, picks thresholds
//! `t_1 <= ... <= t_M` so that the `p`-weighted mass at or above `t_m` is below
//! `2^-m` for both measures, and evaluates
//! `xi(t) = (t + 1) + sum_m (t - t_m)_+`.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::rational::{int, inv_pow2, serde_vec, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PoussinFunction {
    #[serde(with = "serde_vec")]
    thresholds: Vec<Rational>,
}

impl PoussinFunction {
    pub fn thresholds(&self) -> &[Rational] {
        &self.thresholds
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        let mut value = t + int(1);
        for tm in &self.thresholds {
            if t > tm {
                value += t - tm;
            }
        }
        value
    }
}

/// `sum { p_i * mass_i : p_i >= t }`.
pub fn tail(p: &[Rational], mass: &[Rational], t: &Rational) -> Rational {
    p.iter()
        .zip(mass)
        .filter(|(pi, _)| *pi >= t)
        .fold(Rational::zero(), |acc, (pi, m)| acc + pi * m)
}

/// Builds the growth function for weights `p` under masses `mu` and `nu`.
///
/// Threshold `t_m` is the smallest candidate in `p ∪ {max p + 1}` whose tail
/// is below `2^-m` under both masses; the sequence stops once a threshold has
/// zero tail. When the total `p`-mass is already zero no threshold is needed.
pub fn poussin(p: &[Rational], mu: &[Rational], nu: &[Rational]) -> PoussinFunction {
    assert_eq!(p.len(), mu.len(), "p and mu must have equal length");
    assert_eq!(p.len(), nu.len(), "p and nu must have equal length");
    debug_assert!(p.iter().chain(mu).chain(nu).all(|q| !q.is_negative()));

    let zero = Rational::zero();
    let mut thresholds = Vec::new();
    if tail(p, mu, &zero).is_zero() && tail(p, nu, &zero).is_zero() {
        return PoussinFunction { thresholds };
    }
    let max_p = p.iter().max().cloned().unwrap_or_default();
    let mut candidates: Vec<Rational> = p.to_vec();
    candidates.push(max_p + int(1));
    candidates.sort();
    candidates.dedup();

    let mut m = 1u32;
    loop {
        let bound = inv_pow2(m);
        let t = candidates
            .iter()
            .find(|c| tail(p, mu, c) < bound && tail(p, nu, c) < bound)
            .expect("the candidate above max p has zero tail")
            .clone();
        let done = tail(p, mu, &t).is_zero() && tail(p, nu, &t).is_zero();
        thresholds.push(t);
        if done {
            break;
        }
        m += 1;
    }
    PoussinFunction { thresholds }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn zero_weights_need_no_threshold() {
        let f = poussin(&[int(0), int(0)], &[frac(1, 2), frac(1, 2)], &[int(1), int(0)]);
        assert!(f.thresholds().is_empty());
        assert_eq!(f.eval(&int(3)), int(4));
    }

    #[test]
    fn two_point_example() {
        // tail at 4 is 4 * 1/2 = 2, not below 1/2, so t_1 = max + 1 = 5
        let half = frac(1, 2);
        let f = poussin(&[int(0), int(4)], &[half.clone(), half.clone()], &[half.clone(), half]);
        assert_eq!(f.thresholds(), &[int(5)]);
        assert_eq!(f.eval(&int(4)), int(5));
        assert_eq!(f.eval(&int(7)), int(10));
    }

    #[test]
    fn light_tails_give_repeated_thresholds() {
        // tail(0) = 4/100 < 1/2, 1/4, 1/8, 1/16 but not < 1/32
        let f = poussin(&[int(0), int(4)], &[frac(99, 100), frac(1, 100)], &[int(1), int(0)]);
        assert_eq!(f.thresholds(), &[int(0), int(0), int(0), int(0), int(5)]);
    }
}
