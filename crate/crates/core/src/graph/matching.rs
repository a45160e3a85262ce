//! Minimum-weight perfect matchings on small node sets, by exhaustive search.

use serde::Serialize;

use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};

const MAX_NODES: usize = 16;

/// Disjoint pairs `(u, v)`, `u < v`, sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Matching {
    pairs: Vec<(usize, usize)>,
}

impl Matching {
    pub fn new(pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut pairs: Vec<_> = pairs.into_iter().map(|(u, v)| (u.min(v), u.max(v))).collect();
        pairs.sort_unstable();
        Self { pairs }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

struct Search<'a, F> {
    n: usize,
    dist: &'a F,
    tol: f64,
    cap: u64,
    best: f64,
    found: Vec<Vec<(usize, usize)>>,
    ties: u64,
}

impl<F: Fn(usize, usize) -> f64> Search<'_, F> {
    fn run(&mut self, used: &mut [bool], current: &mut Vec<(usize, usize)>, weight: f64) {
        if weight > self.best + self.tol {
            return;
        }
        let Some(i) = (0..self.n).find(|&i| !used[i]) else {
            if weight < self.best - self.tol {
                self.best = weight;
                self.found.clear();
                self.ties = 0;
            }
            self.ties += 1;
            if self.ties <= self.cap {
                self.found.push(current.clone());
            }
            return;
        };
        used[i] = true;
        for j in i + 1..self.n {
            if used[j] {
                continue;
            }
            used[j] = true;
            current.push((i, j));
            self.run(used, current, weight + (self.dist)(i, j));
            current.pop();
            used[j] = false;
        }
        used[i] = false;
    }
}

/// All minimum-weight perfect matchings of nodes `0..n` under `dist`, each as
/// sorted pairs. Weights within `tol` of the minimum count as ties.
pub fn enumerate_min_matchings_by<F>(
    n: usize,
    dist: F,
    tol: f64,
    cap: u64,
) -> Result<Vec<Vec<(usize, usize)>>>
where
    F: Fn(usize, usize) -> f64,
{
    if n % 2 == 1 {
        return Err(Error::OddSubset(n));
    }
    if n > MAX_NODES {
        return Err(Error::SubsetTooLarge(n));
    }
    let mut search = Search {
        n,
        dist: &dist,
        tol,
        cap,
        best: f64::INFINITY,
        found: Vec::new(),
        ties: 0,
    };
    search.run(&mut vec![false; n], &mut Vec::new(), 0.0);
    if search.ties > cap {
        return Err(Error::CapExceeded {
            what: "minimum matchings",
            count: search.ties.to_string(),
            cap,
        });
    }
    Ok(search.found)
}

/// All minimum-distance perfect matchings on the categories in `nodes`.
pub fn enumerate_min_matchings(
    d: &DistanceMatrix,
    nodes: &[usize],
    cap: u64,
) -> Result<Vec<Matching>> {
    for &u in nodes {
        if u >= d.k() {
            return Err(Error::IndexOutOfRange { index: u, k: d.k() });
        }
    }
    let local = enumerate_min_matchings_by(
        nodes.len(),
        |i, j| d.get(nodes[i], nodes[j]),
        d.tolerance(),
        cap,
    )?;
    Ok(local
        .into_iter()
        .map(|pairs| Matching::new(pairs.into_iter().map(|(i, j)| (nodes[i], nodes[j]))))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(k: usize) -> DistanceMatrix {
        DistanceMatrix::from_fn(k, |i, j| i.abs_diff(j) as f64).unwrap()
    }

    #[test]
    fn examples() {
        let d = path(4);
        let two = enumerate_min_matchings(&d, &[1, 3], 10).unwrap();
        assert_eq!(two, vec![Matching::new([(1, 3)])]);

        let flat = DistanceMatrix::from_fn(4, |_, _| 1.0).unwrap();
        assert_eq!(enumerate_min_matchings(&flat, &[0, 1, 2, 3], 10).unwrap().len(), 3);

        let unique = enumerate_min_matchings(&d, &[0, 1, 2, 3], 10).unwrap();
        assert_eq!(unique, vec![Matching::new([(0, 1), (2, 3)])]);
    }

    #[test]
    fn guards() {
        let d = path(20);
        assert_eq!(
            enumerate_min_matchings(&d, &[0, 1, 2], 10),
            Err(Error::OddSubset(3))
        );
        let all: Vec<usize> = (0..18).collect();
        assert_eq!(
            enumerate_min_matchings(&d, &all, 10),
            Err(Error::SubsetTooLarge(18))
        );
        let flat = DistanceMatrix::from_fn(6, |_, _| 1.0).unwrap();
        let nodes: Vec<usize> = (0..6).collect();
        assert!(matches!(
            enumerate_min_matchings(&flat, &nodes, 14),
            Err(Error::CapExceeded { .. })
        ));
        assert_eq!(enumerate_min_matchings(&flat, &nodes, 15).unwrap().len(), 15);
        assert_eq!(enumerate_min_matchings(&flat, &[], 1).unwrap(), vec![Matching::new([])]);
    }
}
