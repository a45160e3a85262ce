//! Average over minimum-distance pairings of subjects.
//!
//! Subjects are paired inside their category as far as possible, so only the
//! odd-count categories each leave one subject over. Those leftovers are paired
//! by a minimum matching on the odd categories. A leftover is uniform among the
//! category's subjects, independently across categories, which makes the
//! average linear in the per-category leftover probabilities.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::graph::enumerate_min_matchings_by;

const MAX_ODD: usize = 16;

// Above this many subjects the pairing-count sum is replaced by its closed
// form `n_a n_b / (n_a + n_b - 1)`; the two agree exactly below it.
const EXACT_R0_LIMIT: u64 = 64;

fn double_factorial(n: i64) -> BigUint {
    let mut out = BigUint::one();
    let mut x = n;
    while x > 1 {
        out *= x as u64;
        x -= 2;
    }
    out
}

fn binomial(n: u64, k: u64) -> BigUint {
    let mut out = BigUint::one();
    for i in 0..k {
        out = out * (n - i) / (i + 1);
    }
    out
}

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, x| acc * x)
}

/// Mean number of cross-group pairs over all perfect pairings of `n_a` group-a
/// and `n_b` group-b subjects. `n_a + n_b` must be even.
pub fn r0(n_a: u64, n_b: u64) -> f64 {
    assert!((n_a + n_b).is_multiple_of(2), "R0 needs an even number of subjects");
    if n_a + n_b > EXACT_R0_LIMIT {
        return (n_a * n_b) as f64 / (n_a + n_b - 1) as f64;
    }
    let mut num = BigUint::zero();
    let start = n_a % 2;
    let mut i = start;
    while i <= n_a.min(n_b) {
        num += binomial(n_a, i)
            * binomial(n_b, i)
            * factorial(i)
            * double_factorial(n_a as i64 - i as i64 - 1)
            * double_factorial(n_b as i64 - i as i64 - 1)
            * i;
        i += 2;
    }
    let den = double_factorial(n_a as i64 + n_b as i64 - 1);
    let scaled = (num << 64u32) / den;
    scaled.to_f64().unwrap_or(f64::INFINITY) / 2f64.powi(64)
}

#[derive(Clone, Debug)]
pub struct MdpPlan {
    margins: Vec<u64>,
    even: Vec<usize>,
    odd: Vec<usize>,
    /// `within[k][a] = R0(a, m' - a)` where `m'` is `m_k` rounded down to even.
    within: Vec<Vec<f64>>,
    /// Share of minimum matchings using each pair of odd categories (indices
    /// into `odd`). Pairs with the pseudo category are dropped.
    pairs: Vec<(usize, usize, f64)>,
    matchings: usize,
}

impl MdpPlan {
    pub fn new(margins: &[u64], d: &DistanceMatrix, cap: u64) -> Result<Self> {
        let (odd, even): (Vec<usize>, Vec<usize>) =
            (0..margins.len()).partition(|&k| margins[k] % 2 == 1);
        let pseudo = odd.len() % 2 == 1;
        let nodes = odd.len() + usize::from(pseudo);
        if nodes > MAX_ODD {
            return Err(Error::TooManyOddCategories(nodes));
        }
        let dist = |i: usize, j: usize| {
            if i == odd.len() || j == odd.len() {
                0.0
            } else {
                d.get(odd[i], odd[j])
            }
        };
        let matchings = enumerate_min_matchings_by(nodes, dist, d.tolerance(), cap)?;
        let mut uses: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for matching in &matchings {
            for &(i, j) in matching {
                if j < odd.len() {
                    *uses.entry((i, j)).or_default() += 1;
                }
            }
        }
        let total = matchings.len() as f64;
        let within = margins
            .iter()
            .map(|&m| {
                let paired = m - m % 2;
                (0..=paired).map(|a| r0(a, paired - a)).collect()
            })
            .collect();
        Ok(Self {
            margins: margins.to_vec(),
            even,
            odd,
            within,
            pairs: uses
                .into_iter()
                .map(|((i, j), c)| (i, j, c as f64 / total))
                .collect(),
            matchings: matchings.len(),
        })
    }

    pub fn margins(&self) -> &[u64] {
        &self.margins
    }

    pub fn odd_categories(&self) -> &[usize] {
        &self.odd
    }

    /// Number of minimum matchings on the odd categories.
    pub fn matchings(&self) -> usize {
        self.matchings
    }

    pub fn eval(&self, counts_a: &[u64]) -> f64 {
        let mut total: f64 = self
            .even
            .iter()
            .map(|&k| self.within[k][counts_a[k] as usize])
            .sum();
        // probability that the leftover subject is in group a
        let q: Vec<f64> = self
            .odd
            .iter()
            .map(|&k| counts_a[k] as f64 / self.margins[k] as f64)
            .collect();
        for (i, &k) in self.odd.iter().enumerate() {
            let a = counts_a[k] as usize;
            let table = &self.within[k];
            if a > 0 {
                total += q[i] * table[a - 1];
            }
            if a < table.len() {
                total += (1.0 - q[i]) * table[a];
            }
        }
        for &(i, j, share) in &self.pairs {
            total += share * (q[i] * (1.0 - q[j]) + q[j] * (1.0 - q[i]));
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn r0_boundaries() {
        assert_eq!(r0(0, 0), 0.0);
        assert_eq!(r0(2, 0), 0.0);
        assert_eq!(r0(1, 1), 1.0);
        assert!((r0(2, 2) - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn r0_matches_closed_form() {
        for a in 0..=EXACT_R0_LIMIT {
            for b in (0..=EXACT_R0_LIMIT - a).filter(|b| (a + b) % 2 == 0) {
                if a + b == 0 {
                    continue;
                }
                let closed = (a * b) as f64 / (a + b - 1) as f64;
                assert!((r0(a, b) - closed).abs() < 1e-12, "{a} {b}");
            }
        }
    }

    #[test]
    fn odd_guard() {
        let margins = vec![1u64; 17];
        let d = DistanceMatrix::from_fn(17, |i, j| (i + j + 1) as f64).unwrap();
        assert!(matches!(
            MdpPlan::new(&margins, &d, 10),
            Err(Error::TooManyOddCategories(18))
        ));
    }
}
